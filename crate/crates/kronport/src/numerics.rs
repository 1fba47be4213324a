//! Dense symmetric linear algebra: eigendecomposition with a deterministic
//! ordering, spectral pseudoinverse, inertia under an explicit zero-tolerance
//! policy, and generalized Schur complements.
//!
//! Matrix indices at this level are 0-based; the graph layer translates freely
//! between 1-based node labels and rows/columns.

use nalgebra::DMatrix;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;

use crate::{Error, Result};

/// Dense symmetric matrix storing the upper triangle only, so symmetry is
/// structural rather than approximate. Order 0 is allowed (an empty network
/// block) and has the empty spectrum.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from a generator called once per upper-triangle entry (i <= j).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from row-major dense data, averaging the two triangles. Used
    /// where a product like `A B A'` is symmetric in exact arithmetic but the
    /// computed result carries roundoff asymmetry.
    pub fn from_dense_symmetrized(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrization needs a square matrix");
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n - i * (i + 1) / 2 + j
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.upper[self.idx(a, b)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let k = self.idx(a, b);
        self.upper[k] = v;
    }

    pub fn add_assign_at(&mut self, i: usize, j: usize, v: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let k = self.idx(a, b);
        self.upper[k] += v;
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.upper.iter_mut().zip(&other.upper) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for a in out.upper.iter_mut() {
            *a *= s;
        }
        out
    }

    /// y = S x, rows accumulated in ascending column order.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.to_dense().norm()
    }

    /// Principal submatrix on the given (sorted, 0-based) index set.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        Self::from_fn(keep.len(), |i, j| self.get(keep[i], keep[j]))
    }

    pub fn non_finite_entry(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i..self.n {
                if !self.get(i, j).is_finite() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn min_entry(&self) -> f64 {
        self.upper.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymmetricMatrix {}x{} [", self.n, self.n)?;
        for row in self.rows() {
            writeln!(f, "  {:?}", row)?;
        }
        write!(f, "]")
    }
}

impl Serialize for SymmetricMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.rows();
        let mut seq = serializer.serialize_seq(Some(rows.len()))?;
        for r in &rows {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

/// Eigendecomposition with eigenvalues sorted ascending and a deterministic
/// sign convention per eigenvector (largest-magnitude entry made positive).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Assembles V f(Lambda) V' for a scalar spectral map f. This is how the
    /// pseudoinverse and the matrix exponential are produced.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let n = self.order();
        let mut scaled = self.eigenvectors.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let g = f(l);
            for i in 0..n {
                scaled[(i, k)] *= g;
            }
        }
        let dense = &scaled * self.eigenvectors.transpose();
        SymmetricMatrix::from_dense_symmetrized(&dense)
    }
}

/// Symmetric eigendecomposition. Deterministic for a fixed input: ties keep
/// the solver's order after a stable ascending sort, and each eigenvector's
/// largest-magnitude entry is made positive.
pub fn eigh(s: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if let Some((i, j)) = s.non_finite_entry() {
        return Err(Error::NonFinite { i, j });
    }
    let n = s.order();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    if n == 1 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![s.get(0, 0)],
            eigenvectors: DMatrix::from_element(1, 1, 1.0),
        });
    }
    let se = nalgebra::SymmetricEigen::new(s.to_dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = se.eigenvectors.column(src);
        let mut lead = 0;
        for i in 1..n {
            if col[i].abs() > col[lead].abs() {
                lead = i;
            }
        }
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[(i, dst)] = sign * col[i];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Signed eigenvalue counts. `minus + zero + plus` equals the matrix order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub minus: usize,
    pub zero: usize,
    pub plus: usize,
}

impl Inertia {
    pub fn new(minus: usize, zero: usize, plus: usize) -> Self {
        Inertia { minus, zero, plus }
    }

    pub fn order(&self) -> usize {
        self.minus + self.zero + self.plus
    }
}

/// Componentwise sum, the composition law for block-diagonal spectra.
impl std::ops::Add for Inertia {
    type Output = Inertia;

    fn add(self, other: Inertia) -> Inertia {
        Inertia {
            minus: self.minus + other.minus,
            zero: self.zero + other.zero,
            plus: self.plus + other.plus,
        }
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.minus, self.zero, self.plus)
    }
}

/// Zero-classification thresholds for spectra: an eigenvalue counts as zero
/// when |lambda| <= max(abs_floor, rel_zero * max|lambda|).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TolerancePolicy {
    pub rel_zero: f64,
    pub abs_floor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            rel_zero: 1e-9,
            abs_floor: 1e-12,
        }
    }
}

/// A classified spectrum: the inertia, the threshold used, and whether the
/// decision was marginal (an eigenvalue within a factor 10 of the threshold,
/// or more zeros than the structure of the matrix guarantees).
#[derive(Clone, Copy, Debug)]
pub struct SpectrumClass {
    pub inertia: Inertia,
    pub marginal: bool,
    pub tau: f64,
}

impl TolerancePolicy {
    pub fn new(rel_zero: f64, abs_floor: f64) -> Self {
        assert!(rel_zero > 0.0 && abs_floor > 0.0, "tolerances must be positive");
        TolerancePolicy { rel_zero, abs_floor }
    }

    pub fn tau(&self, scale: f64) -> f64 {
        (self.rel_zero * scale).max(self.abs_floor)
    }

    /// Classifies eigenvalues by sign. `structural_zeros` is the number of
    /// zeros guaranteed by construction (the component count for a graph
    /// Laplacian spectrum, 0 for a port or decision block); any excess zero
    /// marks the spectrum marginal because it comes from a weight cancellation
    /// sitting exactly on the decision boundary.
    pub fn classify(&self, eigenvalues: &[f64], structural_zeros: usize) -> SpectrumClass {
        let scale = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let tau = self.tau(scale);
        let mut inertia = Inertia::new(0, 0, 0);
        for &l in eigenvalues {
            if l < -tau {
                inertia.minus += 1;
            } else if l > tau {
                inertia.plus += 1;
            } else {
                inertia.zero += 1;
            }
        }
        let near_threshold = eigenvalues
            .iter()
            .any(|l| l.abs() >= tau / 10.0 && l.abs() <= tau * 10.0);
        SpectrumClass {
            inertia,
            marginal: near_threshold || inertia.zero > structural_zeros,
            tau,
        }
    }
}

/// Spectral Moore-Penrose pseudoinverse: eigenvalues inside the zero band are
/// dropped, the rest inverted.
pub fn pinv(s: &SymmetricMatrix, tol: &TolerancePolicy) -> Result<SymmetricMatrix> {
    let eig = eigh(s)?;
    let tau = tol.tau(eig.max_abs_eigenvalue());
    Ok(eig.map_spectrum(|l| if l.abs() <= tau { 0.0 } else { 1.0 / l }))
}

/// Eigenvalue sign counts under the tolerance policy. This is the oracle the
/// theorem-based routes are compared against.
pub fn inertia(s: &SymmetricMatrix, tol: &TolerancePolicy) -> Result<Inertia> {
    Ok(tol.classify(&eigh(s)?.eigenvalues, 0).inertia)
}

/// Generalized Schur complement S_kk - S_kd (S_dd)^+ S_dk, with `keep` the
/// retained (0-based) indices. The eliminated block is pseudo-inverted, so
/// singular interior blocks are tolerated.
pub fn schur_complement(
    s: &SymmetricMatrix,
    keep: &[usize],
    tol: &TolerancePolicy,
) -> Result<SymmetricMatrix> {
    let n = s.order();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.len() == n || keep.iter().any(|&i| i >= n) {
        return Err(Error::EmptyBlock);
    }
    let drop: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let skk = s.principal_submatrix(&keep).to_dense();
    let sdd = s.principal_submatrix(&drop);
    let skd = DMatrix::from_fn(keep.len(), drop.len(), |i, j| s.get(keep[i], drop[j]));
    let sdd_pinv = pinv(&sdd, tol)?.to_dense();
    let dense = &skk - &skd * sdd_pinv * skd.transpose();
    Ok(SymmetricMatrix::from_dense_symmetrized(&dense))
}
