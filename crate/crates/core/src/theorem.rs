//! Sweeps of `|n(r, A) − n(r, T)|` against `S_γ(r)` with fitted constants.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{self, count_perturbed, DiagonalOperator, PerturbationMatrix, SubordinationProfile};
use crate::spectrum::least_squares_slope;

/// `γ = max(0, β, 2β + α − 1)`.
pub fn gamma_of(alpha: f64, beta: f64) -> f64 {
    0.0f64.max(beta).max(2.0 * beta + alpha - 1.0)
}

/// Whether the main estimate applies, i.e. `γ < 1`.
pub fn gamma_admissible(gamma: f64) -> bool {
    gamma < 1.0
}

/// `μ_{⌈M/2⌉}`; counts above this are exposed to truncation effects.
pub fn trusted_range(t: &DiagonalOperator) -> f64 {
    let m = t.dim();
    t.values()[m.div_ceil(2).max(1) - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub r: f64,
    pub n_t: usize,
    pub n_a: usize,
    pub deviation: usize,
    pub s_gamma: usize,
    /// Whether a lacuna can be planned at this `r` (`a ≥ 96 b² l`, `r − 2a r^γ > 1`).
    pub lacuna_found: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub fitted_c: f64,
    pub fitted_c1: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub l: usize,
}

/// Minimal `(C, C₁)`: `C` is the least-squares slope through the origin on
/// records with `S > 0`, `C₁` the largest remaining excess.
pub fn fit_constants(records: &[SweepRecord]) -> (f64, f64) {
    let (sxy, sxx) = records.iter().filter(|r| r.s_gamma > 0).fold((0.0, 0.0), |(xy, xx), r| {
        let s = r.s_gamma as f64;
        (xy + s * r.deviation as f64, xx + s * s)
    });
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c1 = records.iter().map(|r| r.deviation as f64 - c * r.s_gamma as f64).fold(0.0, f64::max);
    (c, c1)
}

fn violates(r: &SweepRecord, c: f64, c1: f64) -> bool {
    r.deviation as f64 > c * r.s_gamma as f64 + c1 + 1e-9
}

impl SweepReport {
    pub fn max_deviation(&self) -> usize {
        self.records.iter().map(|r| r.deviation).max().unwrap_or(0)
    }

    pub fn violations(&self, c: f64, c1: f64) -> usize {
        self.records.iter().filter(|r| violates(r, c, c1)).count()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "r,n_T,n_A,deviation,S_gamma,lacuna_found")?;
        for r in &self.records {
            writeln!(w, "{},{},{},{},{},{}", r.r, r.n_t, r.n_a, r.deviation, r.s_gamma, r.lacuna_found)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `r, deviation, C·S_γ + C₁` for external plotting.
    pub fn write_plot_data(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "r,deviation,envelope")?;
        for r in &self.records {
            let env = self.fitted_c * r.s_gamma as f64 + self.fitted_c1;
            writeln!(w, "{},{},{}", r.r, r.deviation, env)?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON summary without the per-record rows.
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::json!({
            "records": self.records.len(),
            "fitted_C": self.fitted_c,
            "fitted_C1": self.fitted_c1,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "a": self.a,
            "l": self.l,
            "max_deviation": self.max_deviation(),
        }))?)
    }
}

/// Counts `n(r, T)`, `n(r, A)` and `S_γ(r)` over `r_grid` from one eigensolve of `A`.
pub fn sweep(
    t: &DiagonalOperator,
    b: &PerturbationMatrix,
    prof: &SubordinationProfile,
    r_grid: &[f64],
    a: f64,
) -> Result<SweepReport> {
    let eigs = operator::perturbed_eigenvalues(t, b)?;
    sweep_with_eigenvalues(t, &eigs, prof, r_grid, a)
}

/// [`sweep`] with the eigenvalues of `A` supplied.
pub fn sweep_with_eigenvalues(
    t: &DiagonalOperator,
    eigs: &[Complex64],
    prof: &SubordinationProfile,
    r_grid: &[f64],
    a: f64,
) -> Result<SweepReport> {
    let alpha = t.spectrum().alpha()?;
    let gamma = gamma_of(alpha, prof.beta);
    if !gamma_admissible(gamma) {
        return Err(Error::HypothesisViolated(gamma));
    }
    let r_max = trusted_range(t);
    if let Some(&r) = r_grid.iter().find(|&&r| r > r_max) {
        return Err(Error::Precondition(format!("r = {r} beyond trusted range {r_max}")));
    }
    let l = t.spectrum().noncondensing_l(alpha);
    let spec = t.spectrum();
    let records: Vec<SweepRecord> = r_grid
        .par_iter()
        .map(|&r| {
            let n_t = spec.count(r);
            let n_a = count_perturbed(eigs, r);
            let w = a * r.powf(gamma);
            SweepRecord {
                r,
                n_t,
                n_a,
                deviation: n_t.abs_diff(n_a),
                s_gamma: spec.window_count(r, a, gamma),
                lacuna_found: a >= 96.0 * prof.b * prof.b * l as f64 * (1.0 - 1e-12) && r - 2.0 * w > 1.0,
            }
        })
        .collect();
    let (fitted_c, fitted_c1) = fit_constants(&records);
    Ok(SweepReport { records, fitted_c, fitted_c1, alpha, beta: prof.beta, gamma, a, l })
}

/// Fit on even-indexed records, test on odd-indexed ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoldoutResult {
    pub fitted_c: f64,
    pub fitted_c1: f64,
    pub tested: usize,
    pub violations: usize,
}

pub fn holdout(report: &SweepReport) -> HoldoutResult {
    let even: Vec<SweepRecord> = report.records.iter().step_by(2).copied().collect();
    let (c, c1) = fit_constants(&even);
    let odd: Vec<&SweepRecord> = report.records.iter().skip(1).step_by(2).collect();
    HoldoutResult {
        fitted_c: c,
        fitted_c1: c1,
        tested: odd.len(),
        violations: odd.iter().filter(|r| violates(r, c, c1)).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CorollaryVerdict {
    Pass { slope: f64, bound: f64 },
    Fail { slope: f64, bound: f64 },
    Inconclusive { reason: String },
}

/// Slope of `log(deviation + 1)` against `log r`, compared with
/// `max(α + γ − 1, η) + 0.15`.
pub fn corollary_check(report: &SweepReport, eta: f64) -> CorollaryVerdict {
    if report.records.iter().all(|r| r.deviation == 0) {
        return CorollaryVerdict::Inconclusive { reason: "deviations vanish".into() };
    }
    let rs: Vec<f64> = report.records.iter().map(|r| r.r).collect();
    let (lo, hi) = rs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    if hi < 10.0 * lo {
        return CorollaryVerdict::Inconclusive { reason: format!("r range [{lo}, {hi}] spans less than a decade") };
    }
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = report.records.iter().map(|r| (r.deviation as f64 + 1.0).ln()).collect();
    let Some(slope) = least_squares_slope(&xs, &ys) else {
        return CorollaryVerdict::Inconclusive { reason: "degenerate regression".into() };
    };
    let bound = (report.alpha + report.gamma - 1.0).max(eta) + 0.15;
    if slope <= bound {
        CorollaryVerdict::Pass { slope, bound }
    } else {
        CorollaryVerdict::Fail { slope, bound }
    }
}

/// Evenly spaced grid of `count` points over `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
