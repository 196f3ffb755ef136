//! Spectra of the unperturbed operator and their counting functions.
//!
//! A [`Spectrum`] is the nondecreasing eigenvalue sequence `1 < μ_1 ≤ μ_2 ≤ …`
//! of a truncated positive self-adjoint operator, repeated by multiplicity.
//! All counting here uses the strict convention `n(r) = #{k : μ_k < r}`;
//! window upper edges use `n(t + 0) = #{k : μ_k ≤ t}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rescaled values `μ^α` closer than this (relative) to an integer are snapped to it,
/// so that `((k + 1)^{1/α})^α` counts as exactly `k + 1`.
const SNAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declared_alpha: Option<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_alpha(values, None)
    }

    pub fn with_alpha(values: Vec<f64>, declared_alpha: Option<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 1.0 {
                return Err(Error::InvalidSpectrum(format!("value {v} at index {k} is not a finite number > 1")));
            }
        }
        if let Some(k) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpectrum(format!("values decrease at index {}", k + 1)));
        }
        if let Some(alpha) = declared_alpha {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidSpectrum(format!("declared alpha {alpha} is not positive")));
            }
        }
        Ok(Self { values, declared_alpha })
    }

    /// Parses either a bare JSON array of eigenvalues or `{"values": [...], "declared_alpha": a}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Bare(Vec<f64>),
            Full {
                values: Vec<f64>,
                #[serde(default)]
                declared_alpha: Option<f64>,
            },
        }
        match serde_json::from_str::<Repr>(text)? {
            Repr::Bare(values) => Self::new(values),
            Repr::Full { values, declared_alpha } => Self::with_alpha(values, declared_alpha),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn declared_alpha(&self) -> Option<f64> {
        self.declared_alpha
    }

    /// Declared α if present, otherwise the regression estimate.
    pub fn alpha(&self) -> Result<f64> {
        match self.declared_alpha {
            Some(a) => Ok(a),
            None => self.estimate_alpha(),
        }
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// `n(r) = #{k : μ_k < r}`.
    pub fn count(&self, r: f64) -> usize {
        self.values.partition_point(|&v| v < r)
    }

    /// `n(t + 0) = #{k : μ_k ≤ t}`.
    pub fn count_closed(&self, t: f64) -> usize {
        self.values.partition_point(|&v| v <= t)
    }

    /// `S_γ(r) = n(r + a r^γ) − n(r − a r^γ)`.
    ///
    /// Meaningful for `a > 0`, `0 ≤ γ < 1`, `r > 0`.
    pub fn window_count(&self, r: f64, a: f64, gamma: f64) -> usize {
        let half = a * r.powf(gamma);
        self.count(r + half).saturating_sub(self.count(r - half))
    }

    /// Least-squares slope of `ln n(μ_k + 0)` against `ln μ_k` over the upper half of the data.
    pub fn estimate_alpha(&self) -> Result<f64> {
        let n = self.values.len();
        if n < 10 {
            return Err(Error::Precondition(format!("alpha estimate needs at least 10 eigenvalues, got {n}")));
        }
        let upper = &self.values[n / 2..];
        let xs: Vec<f64> = upper.iter().map(|v| v.ln()).collect();
        let ys: Vec<f64> = upper.iter().map(|&v| (self.count_closed(v) as f64).ln()).collect();
        least_squares_slope(&xs, &ys).ok_or(Error::ConstantSpectrum)
    }

    /// The values `μ_k^α`, snapped to integers within a relative `1e-9`.
    pub fn rescaled(&self, alpha: f64) -> Vec<f64> {
        self.values
            .iter()
            .map(|&v| {
                let x = if alpha == 1.0 { v } else { v.powf(alpha) };
                let nearest = x.round();
                if (x - nearest).abs() <= SNAP_TOLERANCE * x.abs().max(1.0) {
                    nearest
                } else {
                    x
                }
            })
            .collect()
    }

    /// Largest number of rescaled values `μ_k^α` in any window `(t − 1, t]`.
    pub fn noncondensing_l(&self, alpha: f64) -> usize {
        max_unit_window(&self.rescaled(alpha))
    }

    pub fn psi_decompose(&self, alpha: f64) -> PsiDecomposition {
        PsiDecomposition::build(&self.rescaled(alpha), alpha, self.noncondensing_l(alpha))
    }
}

/// Sliding maximum of `#{x_i ∈ (t − 1, t]}` over sorted `xs`; the maximum is
/// attained with `t` at a data point.
pub(crate) fn max_unit_window(xs: &[f64]) -> usize {
    let mut best = 0;
    let mut lo = 0;
    for (hi, &right) in xs.iter().enumerate() {
        while xs[lo] <= right - 1.0 {
            lo += 1;
        }
        best = best.max(hi + 1 - lo);
    }
    best
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * n {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Continuous piecewise linear ψ with `|ψ(t) − n(t^{1/α})| ≤ l` and `0 ≤ ψ′ ≤ l`.
///
/// Built on unit segments `(m, m + 1]` of the rescaled axis from `s_m = n(m + 0)`:
/// `ψ(t) = s_m + (s_{m+1} − s_m)(t − m)`. The counting function it tracks is
/// evaluated on the rescaled axis as `#{k : μ_k^α < t}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiDecomposition {
    /// Integer breakpoints `m_0 < m_0 + 1 < … < m_1`.
    pub breakpoints: Vec<f64>,
    /// `s_m` at each breakpoint.
    pub knots: Vec<f64>,
    /// Slope on `(m_i, m_{i+1}]`; one fewer than the breakpoints.
    pub slopes: Vec<f64>,
    pub l_bound: usize,
    pub domain_alpha: f64,
    rescaled: Vec<f64>,
}

impl PsiDecomposition {
    fn build(rescaled: &[f64], alpha: f64, l_bound: usize) -> Self {
        let lo = rescaled[0].floor() - 1.0;
        let hi = rescaled[rescaled.len() - 1].ceil() + 1.0;
        let segments = (hi - lo) as usize;
        let breakpoints: Vec<f64> = (0..=segments).map(|i| lo + i as f64).collect();
        let knots: Vec<f64> = breakpoints.iter().map(|&m| rescaled.partition_point(|&x| x <= m) as f64).collect();
        let slopes = knots.windows(2).map(|w| w[1] - w[0]).collect();
        Self { breakpoints, knots, slopes, l_bound, domain_alpha: alpha, rescaled: rescaled.to_vec() }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().expect("nonempty"))
    }

    fn segment(&self, t: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if t <= lo || t > hi {
            return None;
        }
        // (m, m+1] → index of m
        let idx = (t - lo).ceil() as usize;
        Some(idx.clamp(1, self.slopes.len()) - 1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, _) = self.domain();
        match self.segment(t) {
            Some(i) => self.knots[i] + self.slopes[i] * (t - self.breakpoints[i]),
            None if t <= lo => self.knots[0],
            None => *self.knots.last().expect("nonempty"),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.segment(t).map_or(0.0, |i| self.slopes[i])
    }

    /// `n(t^{1/α}) = #{k : μ_k^α < t}`.
    pub fn counting(&self, t: f64) -> usize {
        self.rescaled.partition_point(|&x| x < t)
    }

    /// Evaluates both inequalities on `points` evenly spaced points of the domain.
    pub fn check_grid(&self, points: usize) -> PsiCheck {
        let (lo, hi) = self.domain();
        let l = self.l_bound as f64;
        let mut check = PsiCheck::default();
        for i in 0..points {
            let t = lo + (hi - lo) * (i as f64 + 0.5) / points as f64;
            let gap = (self.eval(t) - self.counting(t) as f64).abs();
            let slope = self.derivative(t);
            check.max_gap = check.max_gap.max(gap);
            check.max_slope = check.max_slope.max(slope);
            check.min_slope = check.min_slope.min(slope);
            if gap > l + 1e-9 || slope > l || slope < 0.0 {
                check.violations += 1;
            }
            check.points += 1;
        }
        check
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PsiCheck {
    pub points: usize,
    pub max_gap: f64,
    pub max_slope: f64,
    pub min_slope: f64,
    pub violations: usize,
}
