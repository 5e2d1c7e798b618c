//! Vectors and operators on the truncated space `span{e_j}` of λ-scaled
//! Hermite functions. A multi-index `(j_1, .., j_n)` is flattened row-major,
//! `j_1` most significant.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients of a vector of `L²(R^n)` in the orthonormal basis `{e_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteState {
    n: usize,
    m: usize,
    coeffs: Vec<Complex64>,
}

impl HermiteState {
    pub fn new(n: usize, m: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let dim = m.pow(n as u32);
        if coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("HermiteState coefficients".into()));
        }
        Ok(HermiteState { n, m, coeffs })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        HermiteState {
            n,
            m,
            coeffs: vec![ZERO; m.pow(n as u32)],
        }
    }

    /// The basis vector `e_j` for a flat index `j`.
    pub fn basis(n: usize, m: usize, j: usize) -> Self {
        let mut s = Self::zeros(n, m);
        s.coeffs[j] = ONE;
        s
    }

    /// The Gaussian vacuum, which is `e_0` in this basis.
    pub fn vacuum(n: usize, m: usize) -> Self {
        Self::basis(n, m, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(self | other) = Σ self_j conj(other_j)`.
    pub fn inner(&self, other: &HermiteState) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        HermiteState {
            n: self.n,
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &HermiteState, s: Complex64) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(HermiteState {
            n: self.n,
            m: self.m,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + s * b).collect(),
        })
    }

    pub fn check_same_space(&self, other: &HermiteState) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Per-axis indices of flat index `j` in a truncation of `m` levels per axis.
pub fn split_index(mut j: usize, n: usize, m: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for slot in idx.iter_mut().rev() {
        *slot = j % m;
        j /= m;
    }
    idx
}

/// A truncated operator as a dense `M^n × M^n` matrix in the `{e_j}` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if entries.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("OperatorMatrix entries".into()));
        }
        Ok(OperatorMatrix { entries })
    }

    pub fn from_row_slice(dim: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        OperatorMatrix {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    /// `u ⊗ v*`, the map `f ↦ (f | v) u`.
    pub fn rank_one(u: &HermiteState, v: &HermiteState) -> Result<Self> {
        u.check_same_space(v)?;
        let dim = u.dim();
        Ok(OperatorMatrix {
            entries: DMatrix::from_fn(dim, dim, |i, j| u.coeffs[i] * v.coeffs[j].conj()),
        })
    }

    /// Matrix unit `e_i ⊗ e_j*`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut entries = DMatrix::zeros(dim, dim);
        entries[(i, j)] = ONE;
        OperatorMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            entries: self.entries.adjoint(),
        }
    }

    pub fn apply(&self, f: &HermiteState) -> Result<HermiteState> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            });
        }
        let coeffs = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entries[(i, j)] * f.coeffs[j]).sum())
            .collect();
        HermiteState::new(f.n, f.m, coeffs)
    }

    pub fn compose(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Ok(OperatorMatrix {
            entries: &self.entries * &other.entries,
        })
    }

    /// `s·self + t·other`.
    pub fn combine(&self, s: Complex64, other: &OperatorMatrix, t: Complex64) -> Result<Self> {
        self.check_dim(other)?;
        Ok(OperatorMatrix {
            entries: self.entries.map(|x| x * s) + other.entries.map(|x| x * t),
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .entries
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Trace norm, the sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    /// Operator norm, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm() <= tol))
    }

    fn check_dim(&self, other: &OperatorMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Hilbert–Schmidt pairing `trace(B* A) = Σ A_ij conj(B_ij)`.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<Complex64> {
    a.check_dim(b)?;
    Ok(a.entries.iter().zip(b.entries.iter()).map(|(x, y)| x * y.conj()).sum())
}
