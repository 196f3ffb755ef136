//! Truncated operators `T`, `B` and `A = T + B` in the eigenbasis of `T`.
//!
//! # Binary matrix format
//!
//! [`PerturbationMatrix::to_binary`] writes a little-endian file:
//!
//! ```text
//! offset  size  field
//! 0       8     magic  b"EIGCMAT1"
//! 8       8     dim    u64
//! 16      16·n² entries, row-major, each (re: f64, im: f64)
//! ```
//!
//! The JSON form is `{"dim": n, "entries_re": [...], "entries_im": [...]}`
//! with both arrays row-major of length `n²`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spectrum::Spectrum;

const BINARY_MAGIC: &[u8; 8] = b"EIGCMAT1";

/// `T = diag(μ_1, …, μ_M)` in its own eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalOperator {
    spectrum: Spectrum,
}

impl DiagonalOperator {
    pub fn new(spectrum: Spectrum) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn values(&self) -> &[f64] {
        self.spectrum.values()
    }

    /// Dense `T + B`.
    pub fn perturbed(&self, b: &PerturbationMatrix) -> CMatrix {
        b.entries().add_diagonal(self.values())
    }
}

/// Dense `B` with entry `(j, k) = ⟨Bφ_k, φ_j⟩` and cached column norms `‖Bφ_k‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationMatrix {
    entries: CMatrix,
    column_norms: Vec<f64>,
}

impl PerturbationMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension { expected: entries.rows(), actual: entries.cols() });
        }
        let column_norms = (0..entries.cols()).map(|k| entries.column_norm(k)).collect();
        Ok(Self { entries, column_norms })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: CMatrix::zeros(dim, dim), column_norms: vec![0.0; dim] }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    /// `‖Bφ_k‖²` per column.
    pub fn column_weights(&self) -> Vec<f64> {
        self.column_norms.iter().map(|n| n * n).collect()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            entries: self.entries.scale(Complex64::new(t, 0.0)),
            column_norms: self.column_norms.iter().map(|n| n * t.abs()).collect(),
        }
    }

    /// Recomputes every column norm and compares with the cache (relative `1e-12`).
    pub fn verify_column_norms(&self) -> bool {
        self.column_norms.iter().enumerate().all(|(k, &cached)| {
            let fresh = self.entries.column_norm(k);
            (fresh - cached).abs() <= 1e-12 * fresh.max(cached).max(f64::MIN_POSITIVE)
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let n = self.dim();
        let data = self.entries.as_slice();
        let repr = MatrixJson {
            dim: n,
            entries_re: data.iter().map(|z| z.re).collect(),
            entries_im: data.iter().map(|z| z.im).collect(),
        };
        Ok(serde_json::to_string(&repr)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: MatrixJson = serde_json::from_str(text)?;
        let n2 = repr.dim * repr.dim;
        if repr.entries_re.len() != n2 || repr.entries_im.len() != n2 {
            return Err(Error::Format(format!(
                "expected {n2} entries, got {} real and {} imaginary",
                repr.entries_re.len(),
                repr.entries_im.len()
            )));
        }
        let data = repr.entries_re.iter().zip(&repr.entries_im).map(|(&re, &im)| Complex64::new(re, im)).collect();
        Self::new(CMatrix::from_row_major(repr.dim, repr.dim, data)?)
    }

    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&(self.dim() as u64).to_le_bytes())?;
        for z in self.entries.as_slice() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(16 + 16 * self.dim() * self.dim());
        self.write_binary(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let dim =
            usize::try_from(u64::from_le_bytes(word)).map_err(|_| Error::Format("dimension overflows usize".into()))?;
        let count = dim.checked_mul(dim).ok_or_else(|| Error::Format("dimension overflows".into()))?;
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            let im = f64::from_le_bytes(word);
            data.push(Complex64::new(re, im));
        }
        Self::new(CMatrix::from_row_major(dim, dim, data)?)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries_re: Vec<f64>,
    entries_im: Vec<f64>,
}

/// Local subordination `‖Bφ_k‖ ≤ b μ_k^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinationProfile {
    pub beta: f64,
    pub b: f64,
}

impl SubordinationProfile {
    pub fn bound(&self, mu: f64) -> f64 {
        self.b * mu.powf(self.beta)
    }

    /// Whether every column satisfies the bound (relative slack `1e-12`).
    pub fn holds(&self, t: &DiagonalOperator, b: &PerturbationMatrix) -> bool {
        t.values().iter().zip(b.column_norms()).all(|(&mu, &norm)| norm <= self.bound(mu) * (1.0 + 1e-12))
    }
}

/// Minimal `b = max_k ‖Bφ_k‖ / μ_k^β`.
pub fn fit_subordination(b: &PerturbationMatrix, t: &DiagonalOperator, beta: f64) -> Result<SubordinationProfile> {
    if !(beta < 1.0) {
        return Err(Error::Precondition(format!("beta = {beta} must be < 1")));
    }
    if b.dim() != t.dim() {
        return Err(Error::Dimension { expected: t.dim(), actual: b.dim() });
    }
    let fitted = t.values().iter().zip(b.column_norms()).map(|(&mu, &norm)| norm / mu.powf(beta)).fold(0.0, f64::max);
    Ok(SubordinationProfile { beta, b: fitted })
}

/// `n(r, A) = #{k : |λ_k| < r}`.
pub fn count_perturbed(eigs: &[Complex64], r: f64) -> usize {
    eigs.iter().filter(|z| z.norm() < r).count()
}

/// Eigenvalues of `T + B`, residual-verified.
pub fn perturbed_eigenvalues(t: &DiagonalOperator, b: &PerturbationMatrix) -> Result<Vec<Complex64>> {
    linalg::eigenvalues(&t.perturbed(b))
}

/// Tail of the compactness estimate for `BT⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompactnessTail {
    /// `b² Σ_{N<k≤M} μ_k^{2β−2}`.
    pub truncated: f64,
    /// Integral majorant of `b² Σ_{k>M} μ_k^{2β−2}`.
    pub beyond: f64,
    pub alpha: f64,
    /// Non-condensing constant of `μ_k^α` used for the growth bound.
    pub l: usize,
}

impl CompactnessTail {
    pub fn total(&self) -> f64 {
        self.truncated + self.beyond
    }
}

/// `ε_N = b² Σ_{k>N} μ_k^{2β−2}`, split into the truncated part and a tail majorant.
///
/// `N` counts eigenvalues (1-based), so `N = 0` sums the whole sequence.
/// Beyond the truncation the sequence is assumed to stay α-non-condensing
/// with the measured `l`, which forces the growth `μ_k^α ≥ μ_M^α − 1 + (k − M)/l`;
/// the tail is the integral of that lower envelope.
pub fn compactness_tail(t: &DiagonalOperator, prof: &SubordinationProfile, n: usize) -> Result<CompactnessTail> {
    let dim = t.dim();
    if n >= dim {
        return Err(Error::Precondition(format!("N = {n} must be below the truncation {dim}")));
    }
    let alpha = t.spectrum().alpha()?;
    let exponent = (2.0 * prof.beta - 2.0) / alpha;
    if exponent >= -1.0 {
        return Err(Error::DivergentTail { exponent });
    }
    let b2 = prof.b * prof.b;
    let power = 2.0 * prof.beta - 2.0;
    let values = t.values();
    let truncated = b2 * values[n..].iter().map(|mu| mu.powf(power)).sum::<f64>();
    let l = t.spectrum().noncondensing_l(alpha);
    let edge = t.spectrum().max_value().powf(alpha) - 1.0;
    let beyond = if b2 == 0.0 {
        0.0
    } else if edge <= 0.0 {
        f64::INFINITY
    } else {
        // Σ_{k>M} (edge + (k−M)/l)^q ≤ ∫_M^∞ … = l·edge^{q+1}/(−q−1)
        b2 * l as f64 * edge.powf(exponent + 1.0) / (-exponent - 1.0)
    };
    Ok(CompactnessTail { truncated, beyond, alpha, l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn linear_op(m: usize) -> DiagonalOperator {
        DiagonalOperator::new(Spectrum::with_alpha((1..=m).map(|k| k as f64 + 1.0).collect(), Some(1.0)).unwrap())
    }

    #[test]
    fn fit_zero_and_equality_cases() {
        let t = linear_op(8);
        let zero = PerturbationMatrix::zeros(8);
        assert_eq!(fit_subordination(&zero, &t, 0.0).unwrap().b, 0.0);
        let beta = 0.3;
        let diag: Vec<f64> = t.values().iter().map(|mu| mu.powf(beta)).collect();
        let b = PerturbationMatrix::new(CMatrix::diagonal(&diag)).unwrap();
        let prof = fit_subordination(&b, &t, beta).unwrap();
        assert!((prof.b - 1.0).abs() < 1e-14);
        assert!(prof.holds(&t, &b));
        assert!(fit_subordination(&b, &t, 1.0).is_err());
    }

    #[test]
    fn counting_uses_modulus() {
        let eigs = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 4.0)];
        assert_eq!(count_perturbed(&eigs, 5.0), 1);
        assert_eq!(count_perturbed(&[Complex64::new(-2.0, 0.0)], 3.0), 1);
    }

    #[test]
    fn unperturbed_counts_agree() {
        let t = linear_op(20);
        let eigs = perturbed_eigenvalues(&t, &PerturbationMatrix::zeros(20)).unwrap();
        for i in 0..50 {
            let r = 1.5 + 0.45 * i as f64;
            assert_eq!(count_perturbed(&eigs, r), t.spectrum().count(r));
        }
    }

    #[test]
    fn compactness_tail_cases() {
        let t = linear_op(400);
        let zero = SubordinationProfile { beta: 0.0, b: 0.0 };
        assert_eq!(compactness_tail(&t, &zero, 10).unwrap().total(), 0.0);
        let prof = SubordinationProfile { beta: 0.0, b: 1.0 };
        // Σ_{k>10} (k+1)^{-2} by partial sum to 10^6
        let oracle: f64 = (11..=1_000_000).map(|k| ((k + 1) as f64).powi(-2)).sum();
        let eps = compactness_tail(&t, &prof, 10).unwrap();
        assert!(eps.total() >= oracle, "{} < {oracle}", eps.total());
        assert!(eps.total() - oracle < 2e-5);
        let mut last = f64::INFINITY;
        for n in 0..399 {
            let e = compactness_tail(&t, &prof, n).unwrap().total();
            assert!(e <= last);
            last = e;
        }
        let divergent = SubordinationProfile { beta: 0.6, b: 1.0 };
        assert!(matches!(compactness_tail(&t, &divergent, 3), Err(Error::DivergentTail { .. })));
    }

    #[test]
    fn serialization_round_trips() {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 - 0.5, j as f64 * 1e-3));
        let b = PerturbationMatrix::new(m).unwrap();
        assert_eq!(PerturbationMatrix::from_json(&b.to_json().unwrap()).unwrap(), b);
        let bytes = b.to_binary();
        assert_eq!(&bytes[..8], b"EIGCMAT1");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), -0.5);
        assert_eq!(PerturbationMatrix::read_binary(&bytes[..]).unwrap(), b);
        assert!(PerturbationMatrix::read_binary(&b"NOTMAGIC"[..]).is_err());
        assert!(PerturbationMatrix::from_json(r#"{"dim":2,"entries_re":[1],"entries_im":[0]}"#).is_err());
    }

    #[test]
    fn column_norm_cache() {
        let m = CMatrix::from_fn(4, 4, |i, j| if i <= j { Complex64::new(1.0, 1.0) } else { ZERO });
        let b = PerturbationMatrix::new(m).unwrap();
        assert!(b.verify_column_norms());
        assert!((b.column_norms()[3] - 8f64.sqrt()).abs() < 1e-15);
    }
}
