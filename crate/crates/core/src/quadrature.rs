//! Globally adaptive Gauss–Kronrod (7/15) integration of complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ZERO;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 20_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss estimate.
pub fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx)? + f(c + dx)?;
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).norm()))
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// `∫_a^b f(x) dx`, bisecting the panel with the largest error estimate first.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    integrate_panels(&f, &[a, b], opts)
}

/// Like [`integrate`] but starting from the given breakpoints.
pub fn integrate_panels<F>(f: &F, breaks: &[f64], opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut heap = BinaryHeap::new();
    let mut value = ZERO;
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk15(f, w[0], w[1])?;
        value += v;
        error += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            return Ok(QuadratureResult { value, error, intervals: heap.len() });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonConvergence { achieved: error, requested: target });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence { achieved: error, requested: target });
        }
        let (vl, el) = gk15(f, worst.a, mid)?;
        let (vr, er) = gk15(f, mid, worst.b)?;
        value += vl + vr - worst.value;
        error += el + er - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: vl, error: el });
        heap.push(Panel { a: mid, b: worst.b, value: vr, error: er });
    }
}

/// `∫_0^{x0} f(x) dx` for `f` integrable but possibly singular at 0.
///
/// Substitutes `x = x0·exp(−(1 − t)/t)`, which maps `t ∈ (0, 1]` onto
/// `(0, x0]` and flattens algebraic and logarithmic endpoint singularities.
pub fn integrate_singular_left<F>(f: F, x0: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    integrate_log_left(
        |u| {
            let x = u.exp();
            if x == 0.0 {
                return Ok(ZERO);
            }
            Ok(f(x)? * x)
        },
        x0,
        opts,
    )
}

/// `∫_{−∞}^{ln x0} g(u) du`, where `g(u) = f(e^u) e^u` is supplied directly.
///
/// Use this when `f(x)·x` has to be evaluated analytically because `x`
/// underflows before the integrand is negligible (e.g. `1/(x ln² x)`).
pub fn integrate_log_left<G>(g: G, x0: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Result<Complex64>,
{
    let ln_x0 = x0.ln();
    let h = |t: f64| -> Result<Complex64> {
        if t <= 0.0 {
            return Ok(ZERO);
        }
        Ok(g(ln_x0 - (1.0 - t) / t)? / (t * t))
    };
    integrate(h, 0.0, 1.0, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<Complex64> {
        move |x| Ok(Complex64::new(f(x), 0.0))
    }

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        let (v, _) = gk15(&real(|x| x.powi(20)), -1.0, 1.0).unwrap();
        assert!((v.re - 2.0 / 21.0).abs() < 1e-14);
        let (v, e) = gk15(&real(|x| x.powi(12)), -1.0, 1.0).unwrap();
        assert!((v.re - 2.0 / 13.0).abs() < 1e-14);
        assert!(e < 1e-13);
    }

    #[test]
    fn oscillatory_integral() {
        // ∫_0^{2π} cos(40x) e^{-i 40 x} dx = π
        let f = |x: f64| Ok(Complex64::new((40.0 * x).cos(), 0.0) * Complex64::from_polar(1.0, -40.0 * x));
        let res = integrate(f, 0.0, 2.0 * PI, QuadratureOptions::default()).unwrap();
        assert!((res.value - Complex64::new(PI, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn endpoint_singularities() {
        let opts = QuadratureOptions::default();
        let inv_sqrt = integrate_singular_left(real(|x| x.powf(-0.5)), 1.0, opts).unwrap();
        assert!((inv_sqrt.value.re - 2.0).abs() < 1e-9);
        let log = integrate_singular_left(real(f64::ln), 1.0, opts).unwrap();
        assert!((log.value.re + 1.0).abs() < 1e-9);
        // ∫_0^{1/2} dx / (x ln²x) = 1/ln 2, with x·f(x) = 1/u² in u = ln x
        let slow = integrate_log_left(|u| Ok(Complex64::new(1.0 / (u * u), 0.0)), 0.5, opts).unwrap();
        assert!((slow.value.re - 1.0 / 2f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_reports_achieved_error() {
        let opts = QuadratureOptions { abs_tol: 1e-14, rel_tol: 0.0, max_intervals: 4 };
        let err = integrate(real(|x| (1.0 / x).sin()), 1e-3, 1.0, opts).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }
}
