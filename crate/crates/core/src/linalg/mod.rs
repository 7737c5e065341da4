//! Dense complex linear algebra on the small matrices used throughout the crate.
//!
//! Everything is SVD- or eigen-based (no row echelon forms) so that rank decisions are
//! stable on the near-degenerate inputs that appear at face boundaries. All routines are
//! deterministic for identical input bits.

mod roots;

pub use roots::{poly_eval, univariate_roots, PolyRoots};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const MAX_ITER: usize = 10_000;

/// Numerical thresholds shared by every decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular values at or below `rank_rel * sigma_max` count as zero.
    pub rank_rel: f64,
    /// Eigenvalue floor for positive semidefiniteness.
    pub psd_abs: f64,
    /// Residual bound for subspace membership and linear solves.
    pub residual_abs: f64,
    /// Two vectors are projectively equal when `1 - fidelity <= dedupe_fid`.
    pub dedupe_fid: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_rel: 1e-9,
            psd_abs: 1e-10,
            residual_abs: 1e-8,
            dedupe_fid: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, psd_abs: f64, residual_abs: f64, dedupe_fid: f64) -> Result<Self> {
        let tol = Self {
            rank_rel,
            psd_abs,
            residual_abs,
            dedupe_fid,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("psd_abs", self.psd_abs),
            ("residual_abs", self.residual_abs),
            ("dedupe_fid", self.dedupe_fid),
        ] {
            if !(v > 0.0 && v < 1e-2) {
                return Err(contract(format!("tolerance {name} = {v} must lie in (0, 1e-2)")));
            }
        }
        Ok(())
    }
}

/// An orthonormal list of vectors spanning a subspace of `C^ambient`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<CVector>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            vectors: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let vectors = (0..ambient)
            .map(|i| {
                let mut v = CVector::zeros(ambient);
                v[i] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Self { ambient, vectors }
    }

    /// Orthonormal basis of the span of `vectors` (which must share one length).
    pub fn spanned_by(ambient: usize, vectors: &[CVector], tol: &Tolerance) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let basis = orthonormalize(vectors, tol)?;
        if basis.ambient != ambient {
            return Err(Error::ShapeMismatch(format!(
                "vectors have length {}, expected {ambient}",
                basis.ambient
            )));
        }
        Ok(basis)
    }

    /// Wraps vectors the caller guarantees to be orthonormal.
    pub(crate) fn from_orthonormal(ambient: usize, vectors: Vec<CVector>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient));
        Self { ambient, vectors }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.ambient, self.dim());
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.ambient);
        for b in &self.vectors {
            out += b * b.dotc(v);
        }
        out
    }

    /// `||v - P v|| / ||v||`; zero vectors give 0.
    pub fn relative_residual(&self, v: &CVector) -> f64 {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (v - self.project(v)).norm() / norm
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self, tol: &Tolerance) -> Result<Self> {
        if self.vectors.is_empty() {
            return Ok(Self::full(self.ambient));
        }
        let rows = self.to_matrix().adjoint();
        kernel_basis(&rows, tol)
    }
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

struct Svd {
    /// Descending.
    values: Vec<f64>,
    /// Left singular vectors as columns, ordered like `values`.
    u: Option<CMatrix>,
    /// Right singular vectors as columns, ordered like `values` then the padding.
    v: Option<CMatrix>,
}

fn svd(m: &CMatrix, want_u: bool, want_v: bool) -> Result<Svd> {
    check_finite(m)?;
    let raw = m
        .clone()
        .try_svd(want_u, want_v, 5.0 * f64::EPSILON, MAX_ITER)
        .ok_or(Error::NoConvergence("singular value decomposition"))?;
    let mut order: Vec<usize> = (0..raw.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        raw.singular_values[b]
            .partial_cmp(&raw.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| raw.singular_values[i]).collect();
    let u = raw.u.map(|u| {
        let mut out = CMatrix::zeros(u.nrows(), order.len());
        for (j, &i) in order.iter().enumerate() {
            out.set_column(j, &u.column(i));
        }
        out
    });
    let v = raw.v_t.map(|vt| {
        let mut out = CMatrix::zeros(vt.ncols(), order.len());
        for (j, &i) in order.iter().enumerate() {
            out.set_column(j, &vt.row(i).adjoint());
        }
        out
    });
    Ok(Svd { values, u, v })
}

fn rank_from_values(values: &[f64], rank_rel: f64) -> usize {
    let max = values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rank_rel * max).count()
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(svd(m, false, false)?.values)
}

/// Number of singular values above `rank_rel * sigma_max`.
pub fn numeric_rank(m: &CMatrix, tol: &Tolerance) -> Result<usize> {
    if m.is_empty() {
        return Err(contract("numeric_rank of an empty matrix"));
    }
    Ok(rank_from_values(&singular_values(m)?, tol.rank_rel))
}

/// Orthonormal basis of the null space of `m`.
pub fn kernel_basis(m: &CMatrix, tol: &Tolerance) -> Result<SubspaceBasis> {
    kernel_with_cutoff(m, tol.rank_rel)
}

/// Null space where singular values up to `rel * sigma_max` are treated as zero.
pub(crate) fn kernel_with_cutoff(m: &CMatrix, rel: f64) -> Result<SubspaceBasis> {
    if m.is_empty() {
        return Err(contract("kernel_basis of an empty matrix"));
    }
    let cols = m.ncols();
    // Thin SVD only returns min(rows, cols) right vectors; pad so all of V is available.
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let dec = svd(&padded, false, true)?;
    let rank = rank_from_values(&dec.values, rel);
    let v = dec.v.expect("requested V");
    let vectors = (rank..cols).map(|j| v.column(j).into_owned()).collect();
    Ok(SubspaceBasis::from_orthonormal(cols, vectors))
}

/// Orthonormal spanning set of the span of `vectors`.
pub fn orthonormalize(vectors: &[CVector], tol: &Tolerance) -> Result<SubspaceBasis> {
    let Some(first) = vectors.first() else {
        return Err(contract("orthonormalize needs at least one vector to fix the dimension"));
    };
    let len = first.len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::ShapeMismatch("vectors of different lengths".into()));
    }
    let mut m = CMatrix::zeros(len, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    let dec = svd(&m, true, false)?;
    let rank = rank_from_values(&dec.values, tol.rank_rel);
    let u = dec.u.expect("requested U");
    let basis = (0..rank).map(|j| u.column(j).into_owned()).collect();
    Ok(SubspaceBasis::from_orthonormal(len, basis))
}

fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Spectrum (ascending) and matching orthonormal eigenvectors (as columns).
pub fn hermitian_eigen(m: &CMatrix, tol: &Tolerance) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() || m.is_empty() {
        return Err(contract(format!("expected a nonempty square matrix, got {:?}", m.shape())));
    }
    check_finite(m)?;
    let defect = hermitian_defect(m);
    if defect > tol.residual_abs {
        return Err(contract(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, MAX_ITER)
        .ok_or(Error::NoConvergence("Hermitian eigendecomposition"))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.ncols());
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &CMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m, tol)?.0)
}

/// Outcome of expressing a target in a list of independent vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum SpanFit {
    InSpan(Vec<C64>),
    NotInSpan { residual: f64 },
}

/// Least-squares coefficients of `target` in `basis_vectors`.
///
/// The target counts as inside the span when the synthesis residual is at most
/// `residual_abs * max(1, ||target||)`.
pub fn solve_in_span(basis_vectors: &[CVector], target: &CVector, tol: &Tolerance) -> Result<SpanFit> {
    let Some(first) = basis_vectors.first() else {
        return Err(contract("solve_in_span needs at least one basis vector"));
    };
    let len = first.len();
    if target.len() != len || basis_vectors.iter().any(|v| v.len() != len) {
        return Err(Error::ShapeMismatch("basis and target lengths differ".into()));
    }
    let mut a = CMatrix::zeros(len, basis_vectors.len());
    for (j, v) in basis_vectors.iter().enumerate() {
        a.set_column(j, v);
    }
    let dec = svd(&a, true, true)?;
    let k = basis_vectors.len();
    if rank_from_values(&dec.values, tol.rank_rel) < k {
        return Err(contract("basis vectors are linearly dependent"));
    }
    let u = dec.u.expect("requested U");
    let v = dec.v.expect("requested V");
    let mut coeffs = CVector::zeros(k);
    for j in 0..k {
        let proj = u.column(j).dotc(target) / C64::new(dec.values[j], 0.0);
        coeffs += v.column(j) * proj;
    }
    let residual = (&a * &coeffs - target).norm();
    if residual <= tol.residual_abs * target.norm().max(1.0) {
        Ok(SpanFit::InSpan(coeffs.iter().copied().collect()))
    } else {
        Ok(SpanFit::NotInSpan { residual })
    }
}
