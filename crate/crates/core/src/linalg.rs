//! Dense complex matrices and the factorizations the rest of the crate needs.
//!
//! Eigenvalues come from `faer`'s dense nonsymmetric solver and are
//! re-verified by residual. Everything else (LU with partial pivoting,
//! Householder reduction to Hessenberg form, shifted Hessenberg solves and
//! the resolvent trace) is implemented here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EigenDiagnostics, Error, Result};

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Largest dimension accepted by [`eigenvalues`] unless overridden.
pub const DEFAULT_MAX_EIGEN_DIM: usize = 512;

/// Relative residual accepted for an eigenpair: `‖Av − λv‖ ≤ tol·‖A‖_F` with `‖v‖ = 1`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, j)].norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    /// `self + diag(values)`.
    pub fn add_diagonal(&self, values: &[f64]) -> Self {
        assert!(self.is_square() && values.len() == self.rows);
        let mut m = self.clone();
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)].re += v;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..=i).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<Complex64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    fn diagnostics(&self, worst_residual: Option<f64>, detail: impl Into<String>) -> EigenDiagnostics {
        EigenDiagnostics {
            dim: self.rows,
            frobenius_norm: self.frobenius_norm(),
            max_abs_entry: self.max_abs(),
            worst_residual,
            detail: detail.into(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting, `PA = LU`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Returns `None` when a pivot vanishes exactly.
    pub fn factor(a: &CMatrix) -> Option<Self> {
        assert!(a.is_square());
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm())).expect("nonempty");
            if lu[(p, k)] == ZERO {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Some(Self { lu, perm, swaps })
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.rows;
        let prod: Complex64 = (0..n).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            -prod
        } else {
            prod
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = (0..i).fold(x[i], |s, j| s - self.lu[(i, j)] * x[j]);
            x[i] = s;
        }
        for i in (0..n).rev() {
            let s = (i + 1..n).fold(x[i], |s, j| s - self.lu[(i, j)] * x[j]);
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

pub fn determinant(a: &CMatrix) -> Complex64 {
    if a.rows == 0 {
        return ONE;
    }
    Lu::factor(a).map_or(ZERO, |lu| lu.determinant())
}

/// Unitary reduction `A = Q H Qᴴ` with `H` upper Hessenberg.
#[derive(Debug, Clone)]
pub struct Hessenberg {
    pub h: CMatrix,
    pub q: CMatrix,
}

impl Hessenberg {
    pub fn reduce(a: &CMatrix) -> Self {
        assert!(a.is_square());
        let n = a.rows;
        let mut h = a.clone();
        let mut q = CMatrix::identity(n);
        let mut v = vec![ZERO; n];
        for k in 0..n.saturating_sub(2) {
            let norm_x = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if norm_x == 0.0 {
                continue;
            }
            let x0 = h[(k + 1, k)];
            let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
            let alpha = -phase * norm_x;
            for i in k + 1..n {
                v[i] = h[(i, k)];
            }
            v[k + 1] -= alpha;
            let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                continue;
            }
            for vi in v.iter_mut().take(n).skip(k + 1) {
                *vi /= vnorm;
            }
            // H ← (I − 2vvᴴ) H
            for j in k..n {
                let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
                let s2 = s * 2.0;
                for i in k + 1..n {
                    h[(i, j)] -= v[i] * s2;
                }
            }
            // H ← H (I − 2vvᴴ), Q ← Q (I − 2vvᴴ)
            for m in [&mut h, &mut q] {
                for i in 0..n {
                    let s: Complex64 = (k + 1..n).map(|j| m[(i, j)] * v[j]).sum();
                    let s2 = s * 2.0;
                    for j in k + 1..n {
                        m[(i, j)] -= s2 * v[j].conj();
                    }
                }
            }
            for i in k + 2..n {
                h[(i, k)] = ZERO;
            }
        }
        Self { h, q }
    }

    pub fn dim(&self) -> usize {
        self.h.rows
    }

    /// Factors `zI − H` for repeated solves.
    pub fn shifted(&self, z: Complex64) -> Result<ShiftedHessenbergLu> {
        ShiftedHessenbergLu::factor(&self.h, z)
    }

    /// `tr (zI − A)⁻¹`, from the logarithmic derivative of `det(zI − H)`.
    pub fn resolvent_trace(&self, z: Complex64) -> Result<Complex64> {
        resolvent_trace(&self.h, z)
    }
}

/// Gaussian elimination with partial pivoting of `zI − H` for upper Hessenberg `H`.
/// Only adjacent rows are ever exchanged, so the factor stays `O(n²)`.
#[derive(Debug, Clone)]
pub struct ShiftedHessenbergLu {
    u: CMatrix,
    /// Per elimination step: whether rows k, k+1 were exchanged, and the multiplier.
    steps: Vec<(bool, Complex64)>,
}

impl ShiftedHessenbergLu {
    fn factor(h: &CMatrix, z: Complex64) -> Result<Self> {
        let n = h.rows;
        let mut u = h.scale(-ONE);
        for i in 0..n {
            u[(i, i)] += z;
        }
        let mut steps = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n.saturating_sub(1) {
            let swap = u[(k + 1, k)].norm() > u[(k, k)].norm();
            if swap {
                for j in k..n {
                    u.data.swap(k * n + j, (k + 1) * n + j);
                }
            }
            let pivot = u[(k, k)];
            if pivot == ZERO {
                return Err(Error::OnSpectrum(z));
            }
            let factor = u[(k + 1, k)] / pivot;
            u[(k + 1, k)] = ZERO;
            for j in k + 1..n {
                let t = u[(k, j)];
                u[(k + 1, j)] -= factor * t;
            }
            steps.push((swap, factor));
        }
        let scale = u.max_abs().max(1.0);
        for i in 0..n {
            if u[(i, i)].norm() <= f64::EPSILON * 1e-4 * scale {
                return Err(Error::OnSpectrum(z));
            }
        }
        Ok(Self { u, steps })
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.u.rows;
        for (k, &(swap, factor)) in self.steps.iter().enumerate() {
            if swap {
                b.swap(k, k + 1);
            }
            let t = b[k];
            b[k + 1] -= factor * t;
        }
        for i in (0..n).rev() {
            let row = self.u.row(i);
            let mut s = b[i];
            for j in i + 1..n {
                s -= row[j] * b[j];
            }
            b[i] = s / row[i];
        }
    }
}

/// `tr (zI − H)⁻¹ = d/dz ln det(zI − H)` for upper Hessenberg `H`.
///
/// Runs the pivoted Hessenberg elimination on value/derivative pairs, so
/// the trace comes out as `Σ u′_kk / u_kk` in `O(n²)`.
pub fn resolvent_trace(h: &CMatrix, z: Complex64) -> Result<Complex64> {
    let n = h.rows;
    let mut u = h.scale(-ONE);
    let mut du = CMatrix::identity(n);
    for i in 0..n {
        u[(i, i)] += z;
    }
    for k in 0..n.saturating_sub(1) {
        // both rows are supported on columns k.. in value and derivative
        if u[(k + 1, k)].norm() > u[(k, k)].norm() {
            for j in k..n {
                u.data.swap(k * n + j, (k + 1) * n + j);
                du.data.swap(k * n + j, (k + 1) * n + j);
            }
        }
        let pivot = u[(k, k)];
        if pivot == ZERO {
            return Err(Error::OnSpectrum(z));
        }
        let dpivot = du[(k, k)];
        let below = u[(k + 1, k)];
        let dbelow = du[(k + 1, k)];
        let factor = below / pivot;
        let dfactor = (dbelow * pivot - below * dpivot) / (pivot * pivot);
        for j in k..n {
            let (ukj, dukj) = (u[(k, j)], du[(k, j)]);
            u[(k + 1, j)] -= factor * ukj;
            du[(k + 1, j)] -= dfactor * ukj + factor * dukj;
        }
    }
    let mut trace = ZERO;
    for k in 0..n {
        let ukk = u[(k, k)];
        if ukk == ZERO {
            return Err(Error::OnSpectrum(z));
        }
        trace += du[(k, k)] / ukk;
    }
    Ok(trace)
}

/// Verified eigenpairs of a dense complex matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    /// Worst relative residual `‖Av − λv‖/(‖v‖·‖A‖_F)` over all pairs.
    pub worst_residual: f64,
}

/// Full spectrum with residual re-verification of every pair.
pub fn eigen(a: &CMatrix) -> Result<EigenDecomposition> {
    eigen_with_limit(a, DEFAULT_MAX_EIGEN_DIM)
}

pub fn eigen_with_limit(a: &CMatrix, max_dim: usize) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::Dimension { expected: a.rows, actual: a.cols });
    }
    if a.rows > max_dim {
        return Err(Error::Precondition(format!(
            "matrix dimension {} exceeds the configured maximum {max_dim}",
            a.rows
        )));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(EigenDecomposition { values: vec![], worst_residual: 0.0 });
    }
    let fa = a.to_faer();
    let decomposition = fa.eigen().map_err(|e| Error::EigenSolve(a.diagnostics(None, format!("{e:?}"))))?;
    let s = decomposition.S();
    let u = decomposition.U();
    let values: Vec<Complex64> = (0..n).map(|i| s[i]).collect();
    let anorm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for (j, &lambda) in values.iter().enumerate() {
        let v: Vec<Complex64> = (0..n).map(|i| u[(i, j)]).collect();
        let vnorm = vec_norm(&v);
        let av = a.mul_vec(&v);
        let res = av.iter().zip(&v).map(|(x, y)| (x - lambda * y).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(res / (vnorm * anorm));
    }
    if !(worst <= EIGEN_RESIDUAL_TOL) {
        return Err(Error::EigenSolve(a.diagnostics(Some(worst), "residual check failed")));
    }
    Ok(EigenDecomposition { values, worst_residual: worst })
}

pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    Ok(eigen(a)?.values)
}

/// Power-iteration estimate of `‖A‖₂` via `AᴴA`.
pub fn operator_norm_estimate(a: &CMatrix, iterations: usize) -> f64 {
    let n = a.cols;
    if n == 0 {
        return 0.0;
    }
    let ah = a.adjoint();
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + (i as f64 * 0.618).fract(), 0.0)).collect();
    let mut sigma = 0.0;
    for _ in 0..iterations {
        let norm = vec_norm(&v);
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        let w = a.mul_vec(&v);
        sigma = vec_norm(&w);
        v = ah.mul_vec(&w);
    }
    sigma
}
