//! Artificial lacuna `K_r`, the perturbation determinant `D(λ)` and zero
//! counting by winding numbers.
//!
//! `T_r = T + K_r` where `K_r = c Σ_{k ∈ indices} ⟨·, φ_k⟩φ_k` shifts the
//! eigenvalues in the window right by `c = 4a r^γ`. With this sign,
//! `A = T_r + B − K_r` and
//!
//! ```text
//! D(λ) = det(λ − A) / det(λ − T_r − B) = det(I_N + c G(λ)),
//! G_ij(λ) = ⟨(λ − T_r − B)⁻¹ φ_{k_j}, φ_{k_i}⟩,
//! ```
//!
//! so zeros of `D` are eigenvalues of `A` and poles are eigenvalues of `T_r + B`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Hessenberg, ONE, ZERO};
use crate::operator::{DiagonalOperator, PerturbationMatrix, SubordinationProfile};
use crate::quadrature::{self, QuadratureOptions};
use crate::resolvent::{ResolventField, SamplingPlan, StripSpec, POLE_TOL};
use crate::spectrum::Spectrum;

/// Window, shift and moved eigenvalues of the lacuna at `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LacunaPlan {
    pub r: f64,
    pub a: f64,
    pub gamma_eff: f64,
    pub half_width: f64,
    pub shift_c: f64,
    pub window: (f64, f64),
    /// 0-based positions of the shifted eigenvalues.
    pub indices: Vec<usize>,
    pub rank_n: usize,
    pub shifted_spectrum: Vec<f64>,
}

impl LacunaPlan {
    /// Builds the shift without checking the perturbation preconditions.
    pub fn build(spectrum: &Spectrum, r: f64, a: f64, gamma_eff: f64) -> Self {
        let w = a * r.powf(gamma_eff);
        let window = (r - 2.0 * w, r + 2.0 * w);
        let shift_c = 4.0 * w;
        let mut indices = Vec::new();
        let shifted_spectrum = spectrum
            .values()
            .iter()
            .enumerate()
            .map(|(k, &mu)| {
                if mu > window.0 && mu < window.1 {
                    indices.push(k);
                    mu + shift_c
                } else {
                    mu
                }
            })
            .collect();
        let rank_n = indices.len();
        Self { r, a, gamma_eff, half_width: w, shift_c, window, indices, rank_n, shifted_spectrum }
    }

    pub fn strip(&self) -> StripSpec {
        StripSpec::new(self.r, self.a, self.gamma_eff)
    }

    /// `T_r + B` as a dense matrix.
    pub fn corrected(&self, b: &PerturbationMatrix) -> CMatrix {
        b.entries().add_diagonal(&self.shifted_spectrum)
    }
}

/// [`LacunaPlan::build`] after checking `a ≥ 96 b² l` and `r − 2a r^γ > 1`.
pub fn plan_lacuna(
    t: &DiagonalOperator,
    r: f64,
    a: f64,
    gamma_eff: f64,
    l: usize,
    prof: &SubordinationProfile,
) -> Result<LacunaPlan> {
    let need = 96.0 * prof.b * prof.b * l as f64;
    if a < need * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("a >= 96 b^2 l fails: a = {a} < {need}")));
    }
    let left = r - 2.0 * a * r.powf(gamma_eff);
    if left <= 1.0 {
        return Err(Error::Precondition(format!("r - 2 a r^gamma > 1 fails: {left}")));
    }
    Ok(LacunaPlan::build(t.spectrum(), r, a, gamma_eff))
}

/// `sqrt(Σ ‖Bφ_k‖²/|λ − μ′_k|²)`, a majorant of `‖B(λ − T_r)⁻¹‖`.
pub fn corrected_norm_bound(plan: &LacunaPlan, b: &PerturbationMatrix, lambda: Complex64) -> Result<f64> {
    if (lambda.re - plan.r).abs() >= plan.half_width {
        return Err(Error::Precondition(format!(
            "Re lambda = {} outside the half-window around r = {}",
            lambda.re, plan.r
        )));
    }
    let field = ResolventField::new(plan.shifted_spectrum.clone(), b.column_weights())?;
    Ok(field.eval(lambda)?.truncated.sqrt())
}

/// Evaluates `D(λ) = det(I_N + c G(λ))` through a Hessenberg form of `T_r + B`.
#[derive(Debug, Clone)]
pub struct DeterminantEvaluator {
    hess: Hessenberg,
    /// Row `i` holds `Qᴴ φ_{k_i}`.
    rhs: Vec<Vec<Complex64>>,
    /// Row `i` holds row `k_i` of `Q`.
    readout: Vec<Vec<Complex64>>,
    shift_c: f64,
}

impl DeterminantEvaluator {
    pub fn new(plan: &LacunaPlan, b: &PerturbationMatrix) -> Result<Self> {
        if b.dim() != plan.shifted_spectrum.len() {
            return Err(Error::Dimension { expected: plan.shifted_spectrum.len(), actual: b.dim() });
        }
        let hess = Hessenberg::reduce(&plan.corrected(b));
        let rhs = plan.indices.iter().map(|&k| hess.q.row(k).iter().map(|z| z.conj()).collect()).collect();
        let readout = plan.indices.iter().map(|&k| hess.q.row(k).to_vec()).collect();
        Ok(Self { hess, rhs, readout, shift_c: plan.shift_c })
    }

    pub fn rank(&self) -> usize {
        self.rhs.len()
    }

    /// `G(λ)`, `N × N`.
    pub fn resolvent_block(&self, lambda: Complex64) -> Result<CMatrix> {
        let n = self.rank();
        let mut g = CMatrix::zeros(n, n);
        if n == 0 {
            return Ok(g);
        }
        let lu = self.hess.shifted(lambda)?;
        for j in 0..n {
            let mut y = self.rhs[j].clone();
            lu.solve_in_place(&mut y);
            for i in 0..n {
                g[(i, j)] = self.readout[i].iter().zip(&y).map(|(q, v)| q * v).sum();
            }
        }
        Ok(g)
    }

    /// `c G(λ)`, the finite-rank part bounded by 8 in modulus on the strip.
    pub fn scaled_block(&self, lambda: Complex64) -> Result<CMatrix> {
        Ok(self.resolvent_block(lambda)?.scale(Complex64::new(self.shift_c, 0.0)))
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        if self.rank() == 0 {
            return Ok(ONE);
        }
        let mut m = self.scaled_block(lambda)?;
        for i in 0..self.rank() {
            m[(i, i)] += ONE;
        }
        Ok(linalg::determinant(&m))
    }
}

/// `D(λ)` for one point.
pub fn determinant(plan: &LacunaPlan, b: &PerturbationMatrix, lambda: Complex64) -> Result<Complex64> {
    DeterminantEvaluator::new(plan, b)?.eval(lambda)
}

#[derive(Debug, Clone, Serialize)]
pub struct DetBoundsReport {
    pub rank_n: usize,
    pub h: f64,
    pub upper_bound: f64,
    pub max_abs_d: f64,
    pub max_abs_d_at: [f64; 2],
    pub upper_violations: usize,
    pub lower_bound: f64,
    pub probe: [f64; 2],
    pub abs_d_at_probe: f64,
    pub lower_pass: bool,
    pub max_block_eigenvalue: f64,
    pub block_eigenvalue_violations: usize,
    pub pass: bool,
}

/// Samples `|D| ≤ 9^N` and `|λ_j(cG)| ≤ 8` on the strip, and
/// `|D(r + i h r^γ)| ≥ 2^{−N}`.
pub fn det_bounds_check(
    plan: &LacunaPlan,
    eval: &DeterminantEvaluator,
    h: f64,
    sampling: &SamplingPlan,
) -> Result<DetBoundsReport> {
    if h < 16.0 * plan.a * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("h >= 16 a fails: h = {h}, a = {}", plan.a)));
    }
    let n = plan.rank_n as i32;
    let upper_bound = 9f64.powi(n);
    let lower_bound = 0.5f64.powi(n);
    let points = sampling.strip_samples(&plan.strip());
    let per_point: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&z| -> Result<(f64, f64)> {
            let block = eval.scaled_block(z)?;
            let mut m = block.clone();
            for i in 0..m.rows() {
                m[(i, i)] += ONE;
            }
            let d = linalg::determinant(&m).norm();
            let eig = if block.rows() == 0 {
                0.0
            } else {
                linalg::eigenvalues(&block)?.iter().map(|v| v.norm()).fold(0.0, f64::max)
            };
            Ok((d, eig))
        })
        .collect::<Result<_>>()?;
    let mut max_abs_d = 0.0;
    let mut max_at = points.first().copied().unwrap_or(ZERO);
    let mut max_block_eigenvalue: f64 = 0.0;
    let mut upper_violations = 0;
    let mut block_eigenvalue_violations = 0;
    for (&z, &(d, e)) in points.iter().zip(&per_point) {
        if d > max_abs_d {
            max_abs_d = d;
            max_at = z;
        }
        if d > upper_bound {
            upper_violations += 1;
        }
        if e > 8.0 {
            block_eigenvalue_violations += 1;
        }
        max_block_eigenvalue = max_block_eigenvalue.max(e);
    }
    let probe = Complex64::new(plan.r, h * plan.r.powf(plan.gamma_eff));
    let abs_d_at_probe = eval.eval(probe)?.norm();
    let lower_pass = abs_d_at_probe >= lower_bound;
    Ok(DetBoundsReport {
        rank_n: plan.rank_n,
        h,
        upper_bound,
        max_abs_d,
        max_abs_d_at: [max_at.re, max_at.im],
        upper_violations,
        lower_bound,
        probe: [probe.re, probe.im],
        abs_d_at_probe,
        lower_pass,
        max_block_eigenvalue,
        block_eigenvalue_violations,
        pass: upper_violations == 0 && lower_pass && block_eigenvalue_violations == 0,
    })
}

/// Refinement controls for the winding computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourOptions {
    /// Initial points per side.
    pub initial_per_side: usize,
    /// Bisect a segment when its phase step reaches this many radians.
    pub max_phase_step: f64,
    /// Bisect a segment when `|D|` changes by more than this factor.
    pub max_modulus_ratio: f64,
    pub max_points: usize,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { initial_per_side: 32, max_phase_step: PI / 4.0, max_modulus_ratio: 4.0, max_points: 1_000_000 }
    }
}

/// Closed rectangle `(−R − iR) → (r − iR) → (r + iR) → (−R + iR)`, counterclockwise.
#[derive(Debug, Clone, Serialize)]
pub struct ContourPath {
    pub corners: [[f64; 2]; 4],
    /// Refined samples `(λ, f(λ))` in traversal order; the loop closes back to the first.
    #[serde(skip)]
    pub samples: Vec<(Complex64, Complex64)>,
    pub refinement_rounds: usize,
    pub total_phase: f64,
}

impl ContourPath {
    pub fn corners(r: f64, radius: f64) -> [Complex64; 4] {
        [
            Complex64::new(-radius, -radius),
            Complex64::new(r, -radius),
            Complex64::new(r, radius),
            Complex64::new(-radius, radius),
        ]
    }

    pub fn turns(&self) -> f64 {
        self.total_phase / (2.0 * PI)
    }

    /// Writes `λ_re,λ_im,D_re,D_im,phase` rows, `phase` being the unwrapped argument.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "lambda_re,lambda_im,D_re,D_im,phase")?;
        let mut phase = self.samples.first().map_or(0.0, |s| s.1.arg());
        for (i, (z, d)) in self.samples.iter().enumerate() {
            if i > 0 {
                phase += (d / self.samples[i - 1].1).arg();
            }
            writeln!(w, "{},{},{},{},{}", z.re, z.im, d.re, d.im, phase)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Traces `f` around the closed polygon through `corners` and returns the
/// accumulated principal-branch phase, refining where it moves fast.
pub fn trace_contour<F>(f: F, corners: &[Complex64], opts: &ContourOptions) -> Result<ContourPath>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let degenerate = |points: usize, near: Complex64| Error::DegenerateContour { points, near };
    let eval = |z: Complex64, count: usize| -> Result<Complex64> {
        match f(z) {
            Ok(v) if v.is_finite() && v != ZERO => Ok(v),
            Ok(_) | Err(Error::OnSpectrum(_)) | Err(Error::Pole { .. }) => Err(degenerate(count, z)),
            Err(e) => Err(e),
        }
    };
    let k = corners.len();
    let per_side = opts.initial_per_side.max(1);
    let mut points: Vec<Complex64> = Vec::with_capacity(k * per_side);
    for s in 0..k {
        let (p, q) = (corners[s], corners[(s + 1) % k]);
        for i in 0..per_side {
            points.push(p + (q - p) * (i as f64 / per_side as f64));
        }
    }
    let mut values: Vec<Complex64> = points.par_iter().map(|&z| eval(z, k * per_side)).collect::<Result<_>>()?;
    let scale = corners.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut rounds = 0;
    loop {
        let n = points.len();
        let needs_split = |i: usize| {
            let (d0, d1) = (values[i], values[(i + 1) % n]);
            let step = (d1 / d0).arg().abs();
            let ratio = d1.norm() / d0.norm();
            step >= opts.max_phase_step || ratio > opts.max_modulus_ratio || ratio < 1.0 / opts.max_modulus_ratio
        };
        let split: Vec<usize> = (0..n).filter(|&i| needs_split(i)).collect();
        if split.is_empty() {
            break;
        }
        if n + split.len() > opts.max_points {
            return Err(degenerate(n, points[split[0]]));
        }
        let mids: Vec<Complex64> = split.iter().map(|&i| 0.5 * (points[i] + points[(i + 1) % n])).collect();
        for (&i, m) in split.iter().zip(&mids) {
            if (points[(i + 1) % n] - points[i]).norm() <= 1e-13 * scale {
                return Err(degenerate(n, *m));
            }
        }
        let mid_values: Vec<Complex64> = mids.par_iter().map(|&z| eval(z, n)).collect::<Result<_>>()?;
        let mut new_points = Vec::with_capacity(n + split.len());
        let mut new_values = Vec::with_capacity(n + split.len());
        let mut next = split.iter().zip(mids.iter().zip(&mid_values)).peekable();
        for i in 0..n {
            new_points.push(points[i]);
            new_values.push(values[i]);
            if let Some(&(&j, (&m, &v))) = next.peek() {
                if j == i {
                    new_points.push(m);
                    new_values.push(v);
                    next.next();
                }
            }
        }
        points = new_points;
        values = new_values;
        rounds += 1;
    }
    let n = points.len();
    let total_phase: f64 = (0..n).map(|i| (values[(i + 1) % n] / values[i]).arg()).sum();
    Ok(ContourPath {
        corners: [
            [corners[0].re, corners[0].im],
            [corners[1 % k].re, corners[1 % k].im],
            [corners[2 % k].re, corners[2 % k].im],
            [corners[3 % k].re, corners[3 % k].im],
        ],
        samples: points.into_iter().zip(values).collect(),
        refinement_rounds: rounds,
        total_phase,
    })
}

/// Rounds the accumulated phase of a traced contour to whole turns.
pub fn winding_of(path: &ContourPath) -> Result<i64> {
    let turns = path.turns();
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::NonIntegralWinding { turns });
    }
    Ok(rounded as i64)
}

/// Zeros minus poles of `D` inside the rectangle `(−R, r) × (−R, R)`.
pub fn winding_number(
    eval: &DeterminantEvaluator,
    r: f64,
    radius: f64,
    opts: &ContourOptions,
) -> Result<(i64, ContourPath)> {
    if eval.rank() == 0 {
        let path = ContourPath {
            corners: ContourPath::corners(r, radius).map(|z| [z.re, z.im]),
            samples: Vec::new(),
            refinement_rounds: 0,
            total_phase: 0.0,
        };
        return Ok((0, path));
    }
    let path = trace_contour(|z| eval.eval(z), &ContourPath::corners(r, radius), opts)?;
    Ok((winding_of(&path)?, path))
}

fn inside(z: Complex64, r: f64, radius: f64) -> bool {
    z.re > -radius && z.re < r && z.im.abs() < radius
}

/// Integer verdict of `n_R(A) = n_R(T_r + B) + ν`, counts taken inside the rectangle.
#[derive(Debug, Clone, Serialize)]
pub struct WaReport {
    pub r: f64,
    pub radius: f64,
    pub rank_n: usize,
    #[serde(rename = "n_A")]
    pub n_a: usize,
    #[serde(rename = "n_TrB")]
    pub n_trb: usize,
    pub nu: i64,
    pub pass: bool,
    /// `#{|λ| < r}` for `A`, the theorem's counting function.
    pub n_a_modulus: usize,
    pub contour_points: usize,
    pub nudges: usize,
    #[serde(skip)]
    pub eigenvalues_a: Vec<Complex64>,
    #[serde(skip)]
    pub eigenvalues_trb: Vec<Complex64>,
    #[serde(skip)]
    pub contour: Option<ContourPath>,
}

/// Compares brute-force eigenvalue counts with the winding of `D`.
///
/// `eigs_a` may be passed in to reuse one eigensolve of `A` across many `r`.
pub fn wa_check(
    plan: &LacunaPlan,
    t: &DiagonalOperator,
    b: &PerturbationMatrix,
    radius: f64,
    eigs_a: Option<&[Complex64]>,
    opts: &ContourOptions,
) -> Result<WaReport> {
    let owned;
    let eigs_a = match eigs_a {
        Some(e) => e,
        None => {
            owned = linalg::eigenvalues(&t.perturbed(b))?;
            &owned
        }
    };
    let eigs_trb = if plan.rank_n == 0 { eigs_a.to_vec() } else { linalg::eigenvalues(&plan.corrected(b))? };
    let eval = DeterminantEvaluator::new(plan, b)?;
    let (nu, path) = winding_number(&eval, plan.r, radius, opts)?;
    let n_a = eigs_a.iter().filter(|&&z| inside(z, plan.r, radius)).count();
    let n_trb = eigs_trb.iter().filter(|&&z| inside(z, plan.r, radius)).count();
    Ok(WaReport {
        r: plan.r,
        radius,
        rank_n: plan.rank_n,
        n_a,
        n_trb,
        nu,
        pass: n_a as i64 == n_trb as i64 + nu,
        n_a_modulus: eigs_a.iter().filter(|z| z.norm() < plan.r).count(),
        contour_points: path.samples.len(),
        nudges: 0,
        eigenvalues_a: eigs_a.to_vec(),
        eigenvalues_trb: eigs_trb,
        contour: Some(path),
    })
}

/// Parameters for a full lacuna run at one `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LacunaSetup {
    pub a: f64,
    pub gamma_eff: f64,
    pub l: usize,
    pub h: f64,
}

/// Plans the lacuna, sizes the rectangle and runs [`wa_check`]; on a
/// degenerate contour retries at `r ± k·10⁻⁶ r`, up to 8 times.
#[allow(clippy::too_many_arguments)]
pub fn wa_check_nudged(
    t: &DiagonalOperator,
    b: &PerturbationMatrix,
    prof: &SubordinationProfile,
    r: f64,
    setup: &LacunaSetup,
    eigs_a: Option<&[Complex64]>,
    sampling: &SamplingPlan,
    opts: &ContourOptions,
) -> Result<WaReport> {
    let weights = b.column_weights();
    let frob = b.entries().frobenius_norm();
    let mut last_err = None;
    for attempt in 0..=8usize {
        let step = attempt.div_ceil(2) as f64;
        let sign = if attempt % 2 == 1 { 1.0 } else { -1.0 };
        let rr = r + sign * step * 1e-6 * r;
        let plan = plan_lacuna(t, rr, setup.a, setup.gamma_eff, setup.l, prof)?;
        let field = ResolventField::new(plan.shifted_spectrum.clone(), weights.clone())?;
        let rect = crate::resolvent::rectangle_r(&plan.strip(), &field, setup.h, frob, sampling)?;
        match wa_check(&plan, t, b, rect.radius, eigs_a, opts) {
            Ok(mut rep) => {
                rep.nudges = attempt;
                return Ok(rep);
            }
            Err(e @ Error::DegenerateContour { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Rank of the Riesz projector of `T_r + tB` for the rectangle, with its
/// eigenvalue cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszRank {
    pub t: f64,
    pub rank: usize,
    pub trace: f64,
    pub eigen_count: usize,
    pub matches: bool,
}

/// `(1/2πi)∮ tr(λ − T_r − tB)⁻¹ dλ` over the rectangle by adaptive quadrature.
pub fn riesz_rank(plan: &LacunaPlan, b: &PerturbationMatrix, t: f64, radius: f64) -> Result<RieszRank> {
    let m = plan.corrected(&b.scaled(t));
    let hess = Hessenberg::reduce(&m);
    let corners = ContourPath::corners(plan.r, radius);
    let opts = QuadratureOptions { abs_tol: 1e-7, rel_tol: 1e-9, max_intervals: 50_000 };
    let mut total = ZERO;
    for s in 0..4 {
        let (p, q) = (corners[s], corners[(s + 1) % 4]);
        let dir = q - p;
        let f = |u: f64| -> Result<Complex64> {
            let z = p + dir * u;
            Ok(hess.resolvent_trace(z)? * dir)
        };
        // the right side crosses the real axis in its middle
        let breaks = [0.0, 0.25, 0.5, 0.75, 1.0];
        total += quadrature::integrate_panels(&f, &breaks, opts)?.value;
    }
    let trace = (total / Complex64::new(0.0, 2.0 * PI)).re;
    let rounded = trace.round();
    let distance = (trace - rounded).abs();
    if distance > 0.1 {
        return Err(Error::QuadratureTooCoarse { trace, distance });
    }
    let rank = rounded.max(0.0) as usize;
    let eigen_count = linalg::eigenvalues(&m)?.iter().filter(|&&z| inside(z, plan.r, radius)).count();
    Ok(RieszRank { t, rank, trace, eigen_count, matches: rank == eigen_count })
}

/// Minimum distance from `λ` to the shifted spectrum; used to pick probe points.
pub fn distance_to_shifted(plan: &LacunaPlan, lambda: Complex64) -> f64 {
    plan.shifted_spectrum.iter().map(|&mu| (lambda - mu).norm()).fold(f64::INFINITY, f64::min).max(POLE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::gen_random_perturbation;

    fn linear(m: usize) -> DiagonalOperator {
        DiagonalOperator::new(Spectrum::with_alpha((1..=m).map(|k| k as f64 + 1.0).collect(), Some(1.0)).unwrap())
    }

    #[test]
    fn plan_hand_example() {
        let t = linear(20);
        let prof = SubordinationProfile { beta: 0.0, b: 0.0 };
        let plan = plan_lacuna(&t, 10.5, 1.0, 0.0, 1, &prof).unwrap();
        assert_eq!(plan.window, (8.5, 12.5));
        assert_eq!(plan.indices, vec![7, 8, 9, 10]);
        let moved: Vec<f64> = plan.indices.iter().map(|&k| t.values()[k]).collect();
        assert_eq!(moved, vec![9.0, 10.0, 11.0, 12.0]);
        assert_eq!(plan.rank_n, 4);
        assert_eq!(plan.shift_c, 4.0);
        assert_eq!(plan.rank_n, t.spectrum().count(12.5) - t.spectrum().count(8.5));
        for (&mu, &mu2) in t.values().iter().zip(&plan.shifted_spectrum) {
            assert!(mu2 >= mu);
            assert!(!(mu2 > 8.5 && mu2 < 12.5));
        }
        let gap = LacunaPlan::build(t.spectrum(), 10.5, 0.2, 0.0);
        assert_eq!(gap.rank_n, 0);
        assert_eq!(gap.shifted_spectrum, t.values());
    }

    #[test]
    fn plan_guards() {
        let t = linear(20);
        let prof = SubordinationProfile { beta: 0.0, b: 0.2 };
        assert!(matches!(plan_lacuna(&t, 10.5, 1.0, 0.0, 1, &prof), Err(Error::Precondition(m)) if m.contains("96")));
        let ok = SubordinationProfile { beta: 0.0, b: 0.05 };
        assert!(matches!(plan_lacuna(&t, 2.5, 1.0, 0.0, 1, &ok), Err(Error::Precondition(m)) if m.contains("> 1")));
    }

    #[test]
    fn rank_one_closed_form() {
        // one eigenvalue μ = 5 in the window, B = 0: D = (λ − μ)/(λ − μ − c)
        let t = DiagonalOperator::new(Spectrum::with_alpha(vec![2.0, 5.0, 9.0], Some(1.0)).unwrap());
        let plan = LacunaPlan::build(t.spectrum(), 5.2, 0.5, 0.0);
        assert_eq!(plan.indices, vec![1]);
        let b = PerturbationMatrix::zeros(3);
        let ev = DeterminantEvaluator::new(&plan, &b).unwrap();
        let c = plan.shift_c;
        for z in [Complex64::new(4.0, 1.0), Complex64::new(-3.0, 0.2), Complex64::new(6.9, -2.0)] {
            let closed = (z - 5.0) / (z - 5.0 - c);
            assert!((ev.eval(z).unwrap() - closed).norm() < 1e-13);
        }
        let opts = ContourOptions::default();
        // zero at 5 inside, pole at 7 outside
        assert_eq!(winding_number(&ev, 6.0, 3.0, &opts).unwrap().0, 1);
        // both inside
        assert_eq!(winding_number(&ev, 8.0, 3.0, &opts).unwrap().0, 0);
        // only the pole cannot be enclosed by these rectangles; shift the box instead
        let path = trace_contour(
            |z| ev.eval(z),
            &[Complex64::new(6.0, -1.0), Complex64::new(8.0, -1.0), Complex64::new(8.0, 1.0), Complex64::new(6.0, 1.0)],
            &opts,
        )
        .unwrap();
        assert_eq!(winding_of(&path).unwrap(), -1);
        // probe bound at h = 16a
        let h = 16.0 * plan.a;
        let probe = Complex64::new(plan.r, h);
        assert!(ev.eval(probe).unwrap().norm() >= 0.5);
    }

    #[test]
    fn winding_of_linear_function() {
        let opts = ContourOptions::default();
        let corners = ContourPath::corners(1.0, 2.0);
        let path = trace_contour(|z| Ok(z - Complex64::new(0.3, 0.1)), &corners, &opts).unwrap();
        assert_eq!(winding_of(&path).unwrap(), 1);
        let outside = trace_contour(|z| Ok(z - Complex64::new(1.5, 0.0)), &corners, &opts).unwrap();
        assert_eq!(winding_of(&outside).unwrap(), 0);
    }

    #[test]
    fn empty_window_is_trivial() {
        let t = linear(30);
        let plan = LacunaPlan::build(t.spectrum(), 10.5, 0.1, 0.0);
        let b = gen_random_perturbation(&t, 0.0, 0.01, 4);
        let ev = DeterminantEvaluator::new(&plan, &b).unwrap();
        assert_eq!(ev.eval(Complex64::new(3.0, 2.0)).unwrap(), ONE);
        let rep = det_bounds_check(&plan, &ev, 16.0 * 0.1, &SamplingPlan::default()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.upper_bound, 1.0);
        assert_eq!(rep.lower_bound, 1.0);
        assert_eq!(winding_number(&ev, 10.5, 20.0, &ContourOptions::default()).unwrap().0, 0);
    }

    #[test]
    fn zero_perturbation_identity() {
        let t = linear(40);
        let b = PerturbationMatrix::zeros(40);
        let prof = SubordinationProfile { beta: 0.0, b: 0.0 };
        let plan = plan_lacuna(&t, 15.5, 1.0, 0.0, 1, &prof).unwrap();
        let rep = wa_check(&plan, &t, &b, 30.0, None, &ContourOptions::default()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.n_a, t.spectrum().count(15.5));
        // shifted eigenvalues that started below r leave the rectangle
        let below = plan.indices.iter().filter(|&&k| t.values()[k] < 15.5).count();
        assert_eq!(rep.n_trb, rep.n_a - below);
        assert_eq!(rep.nu, below as i64);
    }

    #[test]
    fn random_perturbation_identity_and_homotopy() {
        let t = linear(64);
        let prof = SubordinationProfile { beta: 0.0, b: 0.1 };
        let b = gen_random_perturbation(&t, 0.0, 0.1, 11);
        let setup = LacunaSetup { a: 1.0, gamma_eff: 0.0, l: 1, h: 16.0 };
        let sampling = SamplingPlan::default();
        for r in [8.5, 17.5, 30.5] {
            let rep = wa_check_nudged(&t, &b, &prof, r, &setup, None, &sampling, &ContourOptions::default()).unwrap();
            assert!(rep.pass, "{rep:?}");
            let plan = plan_lacuna(&t, r, 1.0, 0.0, 1, &prof).unwrap();
            let ranks: Vec<RieszRank> =
                [0.0, 0.5, 1.0].iter().map(|&s| riesz_rank(&plan, &b, s, rep.radius).unwrap()).collect();
            assert!(ranks.iter().all(|q| q.matches && q.rank == ranks[0].rank));
            assert_eq!(ranks[0].rank, rep.n_trb);
        }
    }

    #[test]
    fn det_bounds_rank_one() {
        let t = linear(40);
        let b = PerturbationMatrix::zeros(40);
        let plan = LacunaPlan::build(t.spectrum(), 20.2, 0.25, 0.0);
        assert_eq!(plan.rank_n, 1);
        let ev = DeterminantEvaluator::new(&plan, &b).unwrap();
        let rep = det_bounds_check(&plan, &ev, 4.0, &SamplingPlan::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
        let probe = Complex64::new(20.2, 4.0);
        let closed = ((probe - 20.0) / (probe - 21.0)).norm();
        assert!((rep.abs_d_at_probe - closed).abs() < 1e-12);
    }

    #[test]
    fn corrected_norm_examples() {
        let t = linear(30);
        let plan = LacunaPlan::build(t.spectrum(), 10.5, 1.0, 0.0);
        let z = PerturbationMatrix::zeros(30);
        assert_eq!(corrected_norm_bound(&plan, &z, Complex64::new(10.5, 0.3)).unwrap(), 0.0);
        let single = DiagonalOperator::new(Spectrum::with_alpha(vec![3.0], Some(1.0)).unwrap());
        let plan1 = LacunaPlan::build(single.spectrum(), 3.0, 1.0, 0.0);
        let mu1 = plan1.shifted_spectrum[0];
        let b1 = PerturbationMatrix::new(CMatrix::identity(1)).unwrap();
        let field = ResolventField::new(vec![mu1], b1.column_weights()).unwrap();
        let v = field.eval(Complex64::new(mu1, 2.0)).unwrap().truncated.sqrt();
        assert!((v - 0.5).abs() < 1e-15);
        let bb = gen_random_perturbation(&t, 0.0, 0.05, 3);
        for i in 0..21 {
            let lam = Complex64::new(9.6 + 0.09 * i as f64, 0.01 * i as f64);
            assert!(corrected_norm_bound(&plan, &bb, lam).unwrap() < 0.5);
        }
    }
}
