//! The weighted resolvent sum `W(λ) = Σ ‖Bφ_k‖²/|λ − μ_k|²` and the strip,
//! parabola and rectangle bounds built on it.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{DiagonalOperator, PerturbationMatrix, SubordinationProfile};

/// Distance below which `λ` is treated as sitting on an eigenvalue.
pub const POLE_TOL: f64 = 1e-12;

/// Majorant for the part of `W` coming from eigenvalues beyond the truncation.
///
/// Assumes `‖Bφ_k‖ ≤ b μ_k^β` and at most `l` values of `μ_k^α` in every unit
/// cell past `μ_M^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailModel {
    pub b: f64,
    pub beta: f64,
    pub alpha: f64,
    pub l: usize,
    /// `μ_M`, the largest retained eigenvalue.
    pub edge: f64,
}

impl TailModel {
    pub fn for_operator(t: &DiagonalOperator, prof: &SubordinationProfile) -> Result<Self> {
        let alpha = t.spectrum().alpha()?;
        let model = Self {
            b: prof.b,
            beta: prof.beta,
            alpha,
            l: t.spectrum().noncondensing_l(alpha),
            edge: t.spectrum().max_value(),
        };
        let q = model.decay();
        if q >= -1.0 {
            return Err(Error::DivergentTail { exponent: q });
        }
        Ok(model)
    }

    /// Exponent of `μ^{2β−2}` on the rescaled axis.
    fn decay(&self) -> f64 {
        (2.0 * self.beta - 2.0) / self.alpha
    }

    pub fn majorant(&self, lambda: Complex64) -> f64 {
        if self.b == 0.0 || self.l == 0 {
            return 0.0;
        }
        let b2 = self.b * self.b;
        let l = self.l as f64;
        let inv_alpha = 1.0 / self.alpha;
        let q = self.decay();
        let far = 2.0 * lambda.norm() + 1.0;
        let near_lo = 0.5 * lambda.re;
        let near_hi = 2.0 * lambda.re + 1.0;
        let growth = 1.25f64.powf(self.alpha) - 1.0;
        let mut xa = self.edge.powf(self.alpha);
        let mut total = 0.0;
        loop {
            let mu_lo = xa.powf(inv_alpha);
            if mu_lo >= far {
                // |λ − μ| ≥ μ/2 from here on
                total += 4.0 * b2 * l * (xa.powf(q) + xa.powf(q + 1.0) / (-q - 1.0));
                return total;
            }
            let coarse = (xa * growth).floor().max(1.0);
            let cells = if mu_lo >= near_lo && mu_lo <= near_hi {
                // μ-width up to a quarter of the distance to λ
                let reach = 0.25 * (mu_lo - lambda.re).abs().max(lambda.im.abs());
                ((mu_lo + reach).powf(self.alpha) - xa).floor().clamp(1.0, coarse)
            } else {
                coarse
            };
            let xb = xa + cells;
            let mu_hi = xb.powf(inv_alpha);
            let dx = if lambda.re < mu_lo {
                mu_lo - lambda.re
            } else if lambda.re > mu_hi {
                lambda.re - mu_hi
            } else {
                0.0
            };
            let dist2 = dx * dx + lambda.im * lambda.im;
            let weight = mu_lo.powf(2.0 * self.beta).max(mu_hi.powf(2.0 * self.beta));
            total += b2 * l * cells * weight / dist2;
            xa = xb;
        }
    }
}

/// Eigenvalue positions with their weights `‖Bφ_k‖²`, plus an optional tail.
#[derive(Debug, Clone)]
pub struct ResolventField {
    values: Vec<f64>,
    weights: Vec<f64>,
    tail: Option<TailModel>,
}

/// `W(λ)` split into the retained sum and the tail majorant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventSum {
    pub truncated: f64,
    pub tail: f64,
}

impl ResolventSum {
    pub fn total(&self) -> f64 {
        self.truncated + self.tail
    }
}

impl ResolventField {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::Dimension { expected: values.len(), actual: weights.len() });
        }
        Ok(Self { values, weights, tail: None })
    }

    /// Field of `T` with the column weights of `B`, without tail.
    pub fn from_operator(t: &DiagonalOperator, b: &PerturbationMatrix) -> Result<Self> {
        Self::new(t.values().to_vec(), b.column_weights())
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = Some(tail);
        self
    }

    /// Same weights at moved eigenvalue positions.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Dimension { expected: self.values.len(), actual: values.len() });
        }
        Ok(Self { values, weights: self.weights.clone(), tail: self.tail })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn eval(&self, lambda: Complex64) -> Result<ResolventSum> {
        let mut truncated = 0.0;
        for (&mu, &w) in self.values.iter().zip(&self.weights) {
            let d2 = (lambda - mu).norm_sqr();
            if d2.sqrt() <= POLE_TOL {
                return Err(Error::Pole { lambda, mu });
            }
            truncated += w / d2;
        }
        let tail = self.tail.map_or(0.0, |t| t.majorant(lambda));
        Ok(ResolventSum { truncated, tail })
    }

    /// `W` at every point, in order.
    pub fn eval_many(&self, points: &[Complex64]) -> Result<Vec<f64>> {
        points.par_iter().map(|&z| self.eval(z).map(|s| s.total())).collect()
    }
}

/// `W(λ)` for `T` and `B`; the tail is included when a profile is given.
pub fn resolvent_sum(
    t: &DiagonalOperator,
    b: &PerturbationMatrix,
    prof: Option<&SubordinationProfile>,
    lambda: Complex64,
) -> Result<ResolventSum> {
    let mut field = ResolventField::from_operator(t, b)?;
    if let Some(p) = prof {
        field = field.with_tail(TailModel::for_operator(t, p)?);
    }
    field.eval(lambda)
}

/// Vertical strip `|Re λ − r| ≤ a r^γ` inside the gap `(r − 2a r^γ, r + 2a r^γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripSpec {
    pub r: f64,
    pub a: f64,
    pub gamma_eff: f64,
    pub half_width: f64,
}

impl StripSpec {
    pub fn new(r: f64, a: f64, gamma_eff: f64) -> Self {
        Self { r, a, gamma_eff, half_width: a * r.powf(gamma_eff) }
    }

    /// The open gap `(r − 2w, r + 2w)`.
    pub fn gap(&self) -> (f64, f64) {
        (self.r - 2.0 * self.half_width, self.r + 2.0 * self.half_width)
    }

    /// Errors if some value lies in the open gap.
    pub fn check_gap(&self, values: &[f64]) -> Result<()> {
        let (lo, hi) = self.gap();
        match values.iter().find(|&&mu| mu > lo && mu < hi) {
            Some(mu) => Err(Error::Precondition(format!("eigenvalue {mu} lies in the gap ({lo}, {hi})"))),
            None => Ok(()),
        }
    }
}

/// Smallest `r` for which the strip estimate closes below `3/a`:
/// `(1+2^e)/a·(1 + a r^{e−1})^e + 2^e/(1−e)·(r − a r^e)^{e−1} < 3/a` with `e = γ_eff`.
pub fn strip_threshold(a: f64, gamma_eff: f64) -> Result<f64> {
    let e = gamma_eff;
    if !(0.0..1.0).contains(&e) {
        return Err(Error::ExponentOutOfRange(e));
    }
    if a <= 0.0 {
        return Err(Error::Precondition(format!("a = {a} must be positive")));
    }
    let two_e = 2f64.powf(e);
    let holds = |r: f64| {
        let inner = r - a * r.powf(e);
        if inner <= 0.0 {
            return false;
        }
        let lhs = (1.0 + two_e) / a * (1.0 + a * r.powf(e - 1.0)).powf(e) + two_e / (1.0 - e) * inner.powf(e - 1.0);
        lhs < 3.0 / a
    };
    // below a^{1/(1−e)} the left edge r − a r^e is not positive
    let mut lo = a.powf(1.0 / (1.0 - e));
    let mut hi = 2.0 * lo;
    while !holds(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Precondition(format!("strip estimate never closes for a = {a}, gamma = {e}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Sample layout for strip and line scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub sigma_points: usize,
    pub tau_points: usize,
    pub tau_min: f64,
    /// Largest `|τ|`; `None` means `10³ · max(r, 1)`.
    pub tau_max: Option<f64>,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self { sigma_points: 33, tau_points: 64, tau_min: 1e-3, tau_max: None }
    }
}

impl SamplingPlan {
    /// `{0} ∪ ±logspace(τ_min, τ_max)`.
    pub fn taus(&self, tau_max: f64) -> Vec<f64> {
        let mut out = vec![0.0];
        let n = self.tau_points;
        let (l0, l1) = (self.tau_min.ln(), tau_max.max(self.tau_min).ln());
        for i in 0..n {
            let s = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            let tau = (l0 + s * (l1 - l0)).exp();
            out.push(tau);
            out.push(-tau);
        }
        out
    }

    pub fn strip_samples(&self, spec: &StripSpec) -> Vec<Complex64> {
        let tau_max = self.tau_max.unwrap_or(1e3 * spec.r.max(1.0));
        let taus = self.taus(tau_max);
        let n = self.sigma_points.max(1);
        let mut out = Vec::with_capacity(n * taus.len());
        for i in 0..n {
            let s = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
            let sigma = spec.r - spec.half_width + 2.0 * spec.half_width * s;
            out.extend(taus.iter().map(|&tau| Complex64::new(sigma, tau)));
        }
        out
    }
}

/// Outcome of a sampled bound check; re-verifiable from `samples`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub lemma: String,
    pub params: serde_json::Value,
    pub bound: f64,
    pub max_value: f64,
    pub argmax_lambda: [f64; 2],
    pub violations: usize,
    pub pass: bool,
    pub samples_path: Option<String>,
    #[serde(skip)]
    pub samples: Vec<(Complex64, f64)>,
}

impl BoundReport {
    fn from_samples(
        lemma: &str,
        params: serde_json::Value,
        bound: f64,
        points: Vec<Complex64>,
        values: Vec<f64>,
    ) -> Self {
        let mut max_value = f64::NEG_INFINITY;
        let mut argmax = Complex64::new(f64::NAN, f64::NAN);
        for (&z, &v) in points.iter().zip(&values) {
            if v > max_value {
                max_value = v;
                argmax = z;
            }
        }
        let violations = values.iter().filter(|&&v| !(v < bound)).count();
        Self {
            lemma: lemma.to_string(),
            params,
            bound,
            max_value,
            argmax_lambda: [argmax.re, argmax.im],
            violations,
            pass: violations == 0,
            samples_path: None,
            samples: points.into_iter().zip(values).collect(),
        }
    }

    /// Writes `λ_re,λ_im,value` rows and records the path.
    pub fn write_samples_csv(&mut self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "lambda_re,lambda_im,value")?;
        for (z, v) in &self.samples {
            writeln!(w, "{},{},{}", z.re, z.im, v)?;
        }
        w.flush()?;
        self.samples_path = Some(path.display().to_string());
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Samples `W` over the strip and checks `W < 1/4` everywhere.
///
/// The gap condition is checked against the field's eigenvalue positions, so a
/// lacuna-shifted field can be passed directly.
pub fn strip_bound_check(
    spec: &StripSpec,
    field: &ResolventField,
    prof: &SubordinationProfile,
    l: usize,
    plan: &SamplingPlan,
) -> Result<BoundReport> {
    let need = 48.0 * l as f64 * prof.b * prof.b;
    if spec.a < need * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("a >= 48 l b^2 fails: a = {} < {need}", spec.a)));
    }
    let threshold = strip_threshold(spec.a, spec.gamma_eff)?;
    if spec.r < threshold {
        return Err(Error::Precondition(format!("r >= strip threshold fails: r = {} < {threshold}", spec.r)));
    }
    spec.check_gap(field.values())?;
    let points = plan.strip_samples(spec);
    let values = field.eval_many(&points)?;
    let params = serde_json::json!({
        "r": spec.r, "a": spec.a, "gamma_eff": spec.gamma_eff, "half_width": spec.half_width,
        "b": prof.b, "beta": prof.beta, "l": l, "threshold": threshold,
    });
    Ok(BoundReport::from_samples("strip", params, 0.25, points, values))
}

/// `σ_h` for `P(h, 2β)`.
pub fn sigma_h(h: f64, beta: f64) -> Result<f64> {
    if beta >= 0.5 {
        return Err(Error::ExponentOutOfRange(beta));
    }
    sigma_h_exponent(h, 2.0 * beta)
}

/// `σ_h = [2h / (π(1−e)(2^{1−e} − 1))]^{1/(1−e)}` for a parabola exponent `e < 1`.
pub fn sigma_h_exponent(h: f64, e: f64) -> Result<f64> {
    if e >= 1.0 {
        return Err(Error::ExponentOutOfRange(e));
    }
    if h <= 0.0 {
        return Err(Error::Precondition(format!("h = {h} must be positive")));
    }
    let base = 2.0 * h / (PI * (1.0 - e) * (2f64.powf(1.0 - e) - 1.0));
    Ok(base.powf(1.0 / (1.0 - e)))
}

/// `P(h, e) = {λ : Re λ ≥ 0, |Im λ| ≤ h (Re λ)^e}` with its `σ_h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParabolaSpec {
    pub h: f64,
    pub exponent: f64,
    pub sigma_h: f64,
}

impl ParabolaSpec {
    pub fn new(h: f64, beta: f64) -> Result<Self> {
        Ok(Self { h, exponent: 2.0 * beta, sigma_h: sigma_h(h, beta)? })
    }

    pub fn with_exponent(h: f64, exponent: f64) -> Result<Self> {
        Ok(Self { h, exponent, sigma_h: sigma_h_exponent(h, exponent)? })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= 0.0 && z.im.abs() <= self.h * z.re.powf(self.exponent)
    }

    /// Deterministic low-discrepancy samples with `σ ∈ [σ_h, σ_max]` and
    /// `|τ|` between just outside the parabola and `10³` times its height.
    pub fn samples(&self, count: usize, sigma_max: f64) -> Vec<Complex64> {
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let root2 = 2f64.sqrt() - 1.0;
        let span = (sigma_max.max(self.sigma_h) / self.sigma_h).ln();
        (0..count)
            .map(|i| {
                let u = (i as f64 * golden).fract();
                let v = (i as f64 * root2).fract();
                let sigma = self.sigma_h * (u * span).exp();
                let height = self.h * sigma.powf(self.exponent);
                let tau = height * (1.0 + 1e-9) * 10f64.powf(3.0 * v);
                Complex64::new(sigma, if i % 2 == 0 { tau } else { -tau })
            })
            .collect()
    }
}

/// Checks `W < 6π b² l / h` on samples outside the parabola.
pub fn parabola_bound_check(
    spec: &ParabolaSpec,
    field: &ResolventField,
    prof: &SubordinationProfile,
    l: usize,
    samples: &[Complex64],
) -> Result<BoundReport> {
    for &z in samples {
        if spec.contains(z) {
            return Err(Error::InsideParabola(z));
        }
        if z.re < spec.sigma_h {
            return Err(Error::Precondition(format!("sample {z} has Re < sigma_h = {}", spec.sigma_h)));
        }
    }
    let bound = 6.0 * PI * prof.b * prof.b * l as f64 / spec.h;
    let values = field.eval_many(samples)?;
    let params = serde_json::json!({
        "h": spec.h, "exponent": spec.exponent, "sigma_h": spec.sigma_h,
        "b": prof.b, "beta": prof.beta, "l": l,
    });
    Ok(BoundReport::from_samples("parabola", params, bound, samples.to_vec(), values))
}

/// Admissible rectangle found by doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectangleBound {
    pub radius: f64,
    /// Largest sampled `W` on the boundary at the returned radius.
    pub max_value: f64,
    pub doublings: usize,
}

/// Boundary samples of the rectangle with corners `−R ± iR`, `r ± iR`.
pub fn rectangle_samples(r: f64, radius: f64, plan: &SamplingPlan) -> Vec<Complex64> {
    let taus = SamplingPlan { tau_max: Some(radius), ..*plan }.taus(radius);
    let mut out = Vec::new();
    for &tau in &taus {
        out.push(Complex64::new(r, tau));
        out.push(Complex64::new(-radius, tau));
    }
    let n = 4 * plan.sigma_points.max(2) * 2 + 1;
    for i in 0..n {
        let sigma = -radius + (r + radius) * i as f64 / (n - 1) as f64;
        out.push(Complex64::new(sigma, radius));
        out.push(Complex64::new(sigma, -radius));
    }
    out
}

/// Doubles `R` from `max(2h r^γ, ‖B‖_F + 1)` until sampled `W < 1/4` on all
/// four sides of the rectangle.
pub fn rectangle_r(
    spec: &StripSpec,
    field: &ResolventField,
    h: f64,
    b_frobenius: f64,
    plan: &SamplingPlan,
) -> Result<RectangleBound> {
    let mut radius = (2.0 * h * spec.r.powf(spec.gamma_eff)).max(b_frobenius + 1.0);
    let limit = 1e6 * spec.r;
    let mut doublings = 0;
    loop {
        let values = field.eval_many(&rectangle_samples(spec.r, radius, plan))?;
        let max_value = values.iter().copied().fold(0.0, f64::max);
        if max_value < 0.25 {
            return Ok(RectangleBound { radius, max_value, doublings });
        }
        radius *= 2.0;
        doublings += 1;
        if radius > limit {
            return Err(Error::NoAdmissibleRectangle { radius, max_value });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Spectrum;

    fn linear(m: usize) -> DiagonalOperator {
        DiagonalOperator::new(Spectrum::with_alpha((1..=m).map(|k| k as f64 + 1.0).collect(), Some(1.0)).unwrap())
    }

    fn flat_field(m: usize, b: f64) -> ResolventField {
        ResolventField::new((1..=m).map(|k| k as f64 + 1.0).collect(), vec![b * b; m]).unwrap()
    }

    #[test]
    fn resolvent_sum_examples() {
        let f = ResolventField::new(vec![2.0], vec![1.0]).unwrap();
        assert!((f.eval(Complex64::new(2.0, 1.0)).unwrap().total() - 1.0).abs() < 1e-15);
        let f = ResolventField::new(vec![2.0, 3.0], vec![1.0, 4.0]).unwrap();
        assert!((f.eval(Complex64::new(4.0, 0.0)).unwrap().total() - 4.25).abs() < 1e-15);
        let t = linear(10);
        let zero = PerturbationMatrix::zeros(10);
        let s = resolvent_sum(&t, &zero, None, Complex64::new(3.3, 0.7)).unwrap();
        assert_eq!(s.total(), 0.0);
        assert!(matches!(f.eval(Complex64::new(3.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn tail_majorant_dominates_extension() {
        let prof = SubordinationProfile { beta: 0.2, b: 0.3 };
        let t = linear(50);
        let tail = TailModel::for_operator(&t, &prof).unwrap();
        for z in [Complex64::new(20.5, 0.0), Complex64::new(49.0, 3.0), Complex64::new(-100.0, 1e3)] {
            let exact: f64 = (51..=1000)
                .map(|k| {
                    let mu = k as f64 + 1.0;
                    prof.b * prof.b * mu.powf(0.4) / (z - mu).norm_sqr()
                })
                .sum();
            let bound = tail.majorant(z);
            assert!(bound >= exact, "{bound} < {exact} at {z}");
            assert!(bound < 50.0 * exact + 1e-3, "{bound} vs {exact}");
        }
    }

    #[test]
    fn threshold_reduces_to_two_a() {
        let t = strip_threshold(0.48, 0.0).unwrap();
        assert!((t - 0.96).abs() < 1e-9, "{t}");
        let t2 = strip_threshold(0.25, 0.4).unwrap();
        let t3 = strip_threshold(0.25, 0.2).unwrap();
        assert!(t2 > t3);
    }

    #[test]
    fn sigma_h_closed_form() {
        assert!((sigma_h(PI, 0.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((sigma_h(PI / 2.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(sigma_h(2.0, 0.2).unwrap() < sigma_h(3.0, 0.2).unwrap());
        assert!(matches!(sigma_h(1.0, 0.5), Err(Error::ExponentOutOfRange(_))));
    }

    #[test]
    fn strip_zero_perturbation_and_guard() {
        let field = flat_field(100, 0.0);
        let prof = SubordinationProfile { beta: 0.0, b: 0.0 };
        let spec = StripSpec::new(20.5, 0.2, 0.0);
        let rep = strip_bound_check(&spec, &field, &prof, 1, &SamplingPlan::default()).unwrap();
        assert_eq!(rep.max_value, 0.0);
        assert!(rep.pass);
        let heavy = SubordinationProfile { beta: 0.0, b: 1.0 };
        let err = strip_bound_check(&spec, &flat_field(100, 1.0), &heavy, 1, &SamplingPlan::default());
        assert!(matches!(err, Err(Error::Precondition(m)) if m.contains("48")));
    }

    #[test]
    fn strip_scan_in_natural_gap() {
        // a = 0.12 leaves (r − 0.24, r + 0.24) free around r = k + 1/2
        let b = 0.05;
        let prof = SubordinationProfile { beta: 0.0, b };
        let t = linear(200);
        let field = flat_field(200, b).with_tail(TailModel::for_operator(&t, &prof).unwrap());
        let spec = StripSpec::new(60.5, 48.0 * b * b, 0.0);
        let rep = strip_bound_check(&spec, &field, &prof, 1, &SamplingPlan::default()).unwrap();
        assert!(rep.pass, "max {}", rep.max_value);
        // direct oracle at the strip edge on the real axis
        let z = 60.5 - spec.half_width;
        let direct: f64 = (2..=201).map(|mu| b * b / (z - mu as f64).powi(2)).sum();
        assert!(rep.max_value >= direct - 1e-15);
    }

    #[test]
    fn parabola_scan() {
        let t = linear(300);
        let prof = SubordinationProfile { beta: 0.0, b: 1.0 };
        let field = flat_field(300, 1.0).with_tail(TailModel::for_operator(&t, &prof).unwrap());
        let spec = ParabolaSpec::new(10.0, 0.0).unwrap();
        let samples = spec.samples(200, 150.0);
        let rep = parabola_bound_check(&spec, &field, &prof, 1, &samples).unwrap();
        assert!(rep.pass, "{} vs {}", rep.max_value, rep.bound);
        assert!((6.0 * PI * 1.0 * 1.0 / (6.0 * PI) - 1.0f64).abs() < 1e-15);
        let inside = [Complex64::new(10.0, 1.0)];
        assert!(matches!(parabola_bound_check(&spec, &field, &prof, 1, &inside), Err(Error::InsideParabola(_))));
    }

    #[test]
    fn rectangle_rescan_and_monotone_top() {
        let field = flat_field(100, 0.05);
        let spec = StripSpec::new(30.5, 0.2, 0.0);
        let plan = SamplingPlan::default();
        let rect = rectangle_r(&spec, &field, 3.2, 0.5, &plan).unwrap();
        let again = field.eval_many(&rectangle_samples(30.5, rect.radius, &plan)).unwrap();
        assert!(again.iter().all(|&v| v < 0.25));
        let zero = rectangle_r(&spec, &flat_field(100, 0.0), 3.2, 0.0, &plan).unwrap();
        assert_eq!(zero.doublings, 0);
        assert_eq!(zero.radius, 2.0 * 3.2);
        let top = |radius: f64| {
            (0..200)
                .map(|i| Complex64::new(-radius + (30.5 + radius) * i as f64 / 199.0, radius))
                .map(|z| field.eval(z).unwrap().total())
                .fold(0.0, f64::max)
        };
        let mut last = f64::INFINITY;
        for k in 0..8 {
            let v = top(4.0 * 2f64.powi(k));
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn reflection_and_monotonicity() {
        let field = ResolventField::new(vec![2.0, 3.5, 7.0], vec![0.3, 1.0, 2.0]).unwrap();
        let z = Complex64::new(3.1, 0.4);
        assert_eq!(field.eval(z).unwrap(), field.eval(z.conj()).unwrap());
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let v = field.eval(Complex64::new(3.1, 0.1 * k as f64 + 0.01)).unwrap().total();
            assert!(v <= last);
            last = v;
        }
    }
}
