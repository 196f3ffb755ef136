//! Operator generators, the periodic multiplication example and its
//! counterexample check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ZERO};
use crate::operator::{DiagonalOperator, PerturbationMatrix};
use crate::quadrature::{self, QuadratureOptions};
use crate::spectrum::Spectrum;

/// `μ_k = (k + 1)^{1/α}`, `k = 1..M`.
pub fn gen_power_spectrum(alpha: f64, m: usize) -> Result<Spectrum> {
    if !(alpha > 0.0) {
        return Err(Error::Precondition(format!("alpha = {alpha} must be positive")));
    }
    let values = (1..=m).map(|k| ((k + 1) as f64).powf(1.0 / alpha)).collect();
    Spectrum::with_alpha(values, Some(alpha))
}

/// Clusters at the even integers `j = 2, 4, …`; the cluster starting at index
/// `k` holds `1 + ⌊log₂ k⌋` points spread over `[j, j + 1/2)`.
pub fn gen_condensing_spectrum(m: usize) -> Result<Spectrum> {
    let mut values = Vec::with_capacity(m);
    let mut j = 2.0;
    while values.len() < m {
        let k = values.len() + 1;
        let size = 1 + k.ilog2() as usize;
        let step = 0.5 / size as f64;
        for i in 0..size {
            if values.len() == m {
                break;
            }
            values.push(j + i as f64 * step);
        }
        j += 2.0;
    }
    Spectrum::with_alpha(values, Some(1.0))
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Random columns with `‖Bφ_k‖ = b μ_k^β` exactly.
pub fn gen_random_perturbation(t: &DiagonalOperator, beta: f64, b: f64, seed: u64) -> PerturbationMatrix {
    let n = t.dim();
    if b == 0.0 {
        return PerturbationMatrix::zeros(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMatrix::zeros(n, n);
    for (k, &mu) in t.values().iter().enumerate() {
        let col: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = b * mu.powf(beta) / norm;
        for (i, z) in col.into_iter().enumerate() {
            m[(i, k)] = z * scale;
        }
    }
    PerturbationMatrix::new(m).expect("square by construction")
}

/// Random Hermitian `κ D H D` with `D = diag(μ^{β/2})`, scaled so that
/// `max_k ‖Bφ_k‖/μ_k^β = b`.
pub fn gen_hermitian_perturbation(t: &DiagonalOperator, beta: f64, b: f64, seed: u64) -> PerturbationMatrix {
    let n = t.dim();
    if b == 0.0 {
        return PerturbationMatrix::zeros(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d: Vec<f64> = t.values().iter().map(|mu| mu.powf(0.5 * beta)).collect();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(StandardNormal.sample(&mut rng), 0.0) * (d[i] * d[i]);
        for j in i + 1..n {
            let z = complex_normal(&mut rng) * (d[i] * d[j] / 2f64.sqrt());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let ratio = t.values().iter().enumerate().map(|(k, mu)| m.column_norm(k) / mu.powf(beta)).fold(0.0, f64::max);
    PerturbationMatrix::new(m.scale(Complex64::new(b / ratio, 0.0))).expect("square by construction")
}

/// Coefficient functions on `(0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Symbol {
    /// `1 / (ln(x/4π) √x)`, square integrable but unbounded at 0.
    LogSingular,
    Constant {
        value: f64,
    },
    /// `mean + amplitude · cos x`.
    Cosine {
        mean: f64,
        amplitude: f64,
    },
}

impl Symbol {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Symbol::LogSingular => 1.0 / ((x / (4.0 * PI)).ln() * x.sqrt()),
            Symbol::Constant { value } => value,
            Symbol::Cosine { mean, amplitude } => mean + amplitude * x.cos(),
        }
    }

    fn singular(&self) -> bool {
        matches!(self, Symbol::LogSingular)
    }

    /// `b(e^u)² e^u`, evaluated without forming `e^u` where it would underflow.
    fn squared_log_density(&self, u: f64) -> f64 {
        match self {
            Symbol::LogSingular => (u - (4.0 * PI).ln()).powi(-2),
            _ => self.eval(u.exp()).powi(2) * u.exp(),
        }
    }
}

/// `f₀(x) = ln(x/4π)`.
pub fn f0(x: f64) -> f64 {
    (x / (4.0 * PI)).ln()
}

/// `(1/2π) ∫_0^{2π} f(x) e^{−imx} dx`, graded toward a possible singularity at 0.
pub fn fourier_coefficient<F>(f: F, m: i64, singular: bool, abs_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
{
    let opts = QuadratureOptions { abs_tol, rel_tol: 0.0, max_intervals: 100_000 };
    let mf = m as f64;
    let g = |x: f64| Ok(Complex64::from_polar(f(x), -mf * x));
    let x0 = if singular { (PI / (m.unsigned_abs() as f64 + 1.0)).min(1.0) } else { 0.0 };
    let mut total = ZERO;
    if singular {
        total += quadrature::integrate_singular_left(g, x0, opts)?.value;
    }
    let panels = (4 * m.unsigned_abs() as usize).max(8);
    let breaks: Vec<f64> = (0..=panels).map(|i| x0 + (2.0 * PI - x0) * i as f64 / panels as f64).collect();
    total += quadrature::integrate_panels(&g, &breaks, opts)?.value;
    Ok(total / (2.0 * PI))
}

/// Fourier coefficients `b̂(m)` for `|m| ≤ max_freq`.
#[derive(Debug, Clone, Serialize)]
pub struct FourierMultiplier {
    pub symbol: Symbol,
    pub max_freq: usize,
    pub abs_tol: f64,
    coefficients: Vec<Complex64>,
}

impl FourierMultiplier {
    /// Computes `m ≥ 0` by quadrature and fills `b̂(−m) = conj b̂(m)`.
    pub fn compute(symbol: Symbol, max_freq: usize, abs_tol: f64) -> Result<Self> {
        let positive: Vec<Complex64> = (0..=max_freq as i64)
            .into_par_iter()
            .map(|m| fourier_coefficient(|x| symbol.eval(x), m, symbol.singular(), abs_tol))
            .collect::<Result<_>>()?;
        let mut coefficients = vec![ZERO; 2 * max_freq + 1];
        for (m, &c) in positive.iter().enumerate() {
            coefficients[max_freq + m] = c;
            coefficients[max_freq - m] = c.conj();
        }
        Ok(Self { symbol, max_freq, abs_tol, coefficients })
    }

    pub fn coefficient(&self, m: i64) -> Complex64 {
        let idx = m + self.max_freq as i64;
        assert!(idx >= 0 && (idx as usize) < self.coefficients.len(), "frequency {m} not computed");
        self.coefficients[idx as usize]
    }

    /// `Σ_{|m| ≤ max_freq} |b̂(m)|²`.
    pub fn parseval_partial_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sqrt((1/2π) ∫ b²)` by quadrature.
    pub fn l2_norm(&self) -> Result<f64> {
        let opts = QuadratureOptions { abs_tol: 1e-12, rel_tol: 0.0, max_intervals: 100_000 };
        let x0 = 1.0;
        let head =
            quadrature::integrate_log_left(|u| Ok(Complex64::new(self.symbol.squared_log_density(u), 0.0)), x0, opts)?;
        let body = quadrature::integrate(|x| Ok(Complex64::new(self.symbol.eval(x).powi(2), 0.0)), x0, 2.0 * PI, opts)?;
        Ok(((head.value.re + body.value.re) / (2.0 * PI)).sqrt())
    }
}

/// How the integer frequencies are laid out as eigenvalues above 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyMapping {
    /// Frequencies `1..=M`, `μ = k + 1`.
    PositiveHalf,
    /// Frequencies `−M/2..M/2`, ordered by `|k|`, `μ = |k| + 2`.
    Folded,
}

impl FrequencyMapping {
    pub fn frequencies(&self, m: usize) -> Vec<i64> {
        match self {
            FrequencyMapping::PositiveHalf => (1..=m as i64).collect(),
            FrequencyMapping::Folded => {
                let half = (m / 2) as i64;
                let mut f: Vec<i64> = (-half..half).collect();
                f.sort_by_key(|&k| (k.abs(), k.signum()));
                f
            }
        }
    }

    pub fn eigenvalue(&self, k: i64) -> f64 {
        match self {
            FrequencyMapping::PositiveHalf => k as f64 + 1.0,
            FrequencyMapping::Folded => k.abs() as f64 + 2.0,
        }
    }
}

/// `T = i d/dx` on frequencies and the Toeplitz matrix of `Bf = b(x) f(x)`.
#[derive(Debug, Clone)]
pub struct PeriodicExample {
    pub t: DiagonalOperator,
    pub b: PerturbationMatrix,
    pub frequencies: Vec<i64>,
    pub mapping: FrequencyMapping,
    pub multiplier: FourierMultiplier,
}

pub fn build_periodic_example(m: usize, mapping: FrequencyMapping, symbol: Symbol) -> Result<PeriodicExample> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::Precondition(format!("M = {m} must be even and positive")));
    }
    let multiplier = FourierMultiplier::compute(symbol, m, 1e-10)?;
    build_with_multiplier(m, mapping, multiplier)
}

/// Reuses precomputed coefficients; `multiplier.max_freq` must cover `M`.
pub fn build_with_multiplier(
    m: usize,
    mapping: FrequencyMapping,
    multiplier: FourierMultiplier,
) -> Result<PeriodicExample> {
    if multiplier.max_freq < m {
        return Err(Error::Precondition(format!("coefficients up to {} do not cover M = {m}", multiplier.max_freq)));
    }
    let frequencies = mapping.frequencies(m);
    let values = frequencies.iter().map(|&k| mapping.eigenvalue(k)).collect();
    let t = DiagonalOperator::new(Spectrum::with_alpha(values, Some(1.0))?);
    let entries = CMatrix::from_fn(m, m, |j, k| multiplier.coefficient(frequencies[j] - frequencies[k]));
    let b = PerturbationMatrix::new(entries)?;
    Ok(PeriodicExample { t, b, frequencies, mapping, multiplier })
}

/// Partial sums across truncations with their relative growth per step.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesTrend {
    pub label: String,
    pub sums: Vec<f64>,
    /// `s_{i+1}/s_i − 1`.
    pub growth: Vec<f64>,
    pub diverging: bool,
    pub plateau: bool,
}

impl SeriesTrend {
    fn new(label: String, sums: Vec<f64>) -> Self {
        let growth: Vec<f64> = sums.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
        let diverging = !growth.is_empty() && growth.iter().all(|&g| g > 0.10);
        let plateau = growth.last().is_some_and(|g| g.abs() <= 0.01);
        Self { label, sums, growth, diverging, plateau }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub mapping: FrequencyMapping,
    pub truncations: Vec<usize>,
    pub l2_norm: f64,
    pub max_column_norm: f64,
    pub column_norms_bounded: bool,
    pub bf0: SeriesTrend,
    pub sobolev: Vec<SeriesTrend>,
    /// `‖Bφ_k‖ ≤ ‖b‖` holds at every truncation.
    pub local_condition_holds: bool,
    /// `‖Bf₀‖` grows while every Sobolev sum plateaus.
    pub global_condition_fails: bool,
}

/// Partial sums of `‖B f₀‖²` and `Σ |m|^{2β} |f̂₀(m)|²` over growing truncations.
pub fn counterexample_check(
    symbol: Symbol,
    mapping: FrequencyMapping,
    truncations: &[usize],
    beta_list: &[f64],
) -> Result<CounterexampleReport> {
    let m_max = truncations.iter().copied().max().unwrap_or(0);
    let multiplier = FourierMultiplier::compute(symbol, m_max, 1e-10)?;
    let l2_norm = multiplier.l2_norm()?;
    let f0_hat: Vec<Complex64> =
        (0..=m_max as i64).into_par_iter().map(|m| fourier_coefficient(f0, m, true, 1e-10)).collect::<Result<_>>()?;
    let f0_at = |k: i64| {
        let c = f0_hat[k.unsigned_abs() as usize];
        if k < 0 {
            c.conj()
        } else {
            c
        }
    };
    let mut bf0 = Vec::new();
    let mut max_column_norm: f64 = 0.0;
    let mut sobolev: Vec<Vec<f64>> = vec![Vec::new(); beta_list.len()];
    for &m in truncations {
        let freqs = mapping.frequencies(m);
        let rows: Vec<(f64, f64)> = freqs
            .par_iter()
            .map(|&j| {
                let mut acc = ZERO;
                let mut col = 0.0;
                for &k in &freqs {
                    let c = multiplier.coefficient(j - k);
                    acc += c * f0_at(k);
                    // the Toeplitz column of frequency j has entries b̂(k − j)
                    col += multiplier.coefficient(k - j).norm_sqr();
                }
                (acc.norm_sqr(), col.sqrt())
            })
            .collect();
        bf0.push(rows.iter().map(|r| r.0).sum());
        max_column_norm = rows.iter().map(|r| r.1).fold(max_column_norm, f64::max);
        for (i, &beta) in beta_list.iter().enumerate() {
            let s: f64 = freqs
                .iter()
                .filter(|&&k| k != 0)
                .map(|&k| (k.abs() as f64).powf(2.0 * beta) * f0_at(k).norm_sqr())
                .sum();
            sobolev[i].push(s);
        }
    }
    let bf0 = SeriesTrend::new("norm_Bf0_squared".into(), bf0);
    let sobolev: Vec<SeriesTrend> = beta_list
        .iter()
        .zip(sobolev)
        .map(|(beta, sums)| SeriesTrend::new(format!("sobolev_beta_{beta}"), sums))
        .collect();
    let column_norms_bounded = max_column_norm <= l2_norm + 1e-6;
    let global_condition_fails = bf0.diverging && sobolev.iter().all(|s| s.plateau);
    Ok(CounterexampleReport {
        mapping,
        truncations: truncations.to_vec(),
        l2_norm,
        max_column_norm,
        column_norms_bounded,
        bf0,
        sobolev,
        local_condition_holds: column_norms_bounded,
        global_condition_fails,
    })
}
