//! Multipartite vectors and operators.
//!
//! Composite indices are mixed-radix with party 0 most significant, so the flattened
//! tensor of `x_0 ⊗ x_1 ⊗ ... ⊗ x_{n-1}` is the ordinary Kronecker product and the
//! three-qubit basis runs `|111>, |112>, |121>, ..., |222>`. Party indices in this API
//! are 0-based; reports and the CLI print them 1-based.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix, CVector, Tolerance, C64};

/// Local dimensions `(d_1, ..., d_n)` with `n >= 2` and every `d_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartyShape {
    dims: Vec<usize>,
}

impl TryFrom<Vec<usize>> for PartyShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<PartyShape> for Vec<usize> {
    fn from(shape: PartyShape) -> Self {
        shape.dims
    }
}

impl PartyShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(contract(format!("need at least two parties, got {dims:?}")));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(contract(format!("every local dimension must be at least 2, got {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("n >= 2 qubits")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// `sum (d_i - 1)`, the largest number of product vectors that always has no
    /// further product vectors in its span when in general position.
    pub fn local_excess(&self) -> usize {
        self.dims.iter().map(|d| d - 1).sum()
    }

    /// Mixed-radix digits of a composite index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }
}

impl fmt::Display for PartyShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

pub fn kron(a: &CVector, b: &CVector) -> CVector {
    CVector::from_iterator(a.len() * b.len(), a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)))
}

/// `|<a|b>|^2 / (||a||^2 ||b||^2)`.
pub fn fidelity(a: &CVector, b: &CVector) -> f64 {
    let na = a.norm_squared();
    let nb = b.norm_squared();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dotc(b).norm_sqr() / (na * nb)
}

/// Unit vector whose first non-negligible component is real and positive.
pub(crate) fn canonical_local(v: &CVector) -> CVector {
    let unit = v.unscale(v.norm());
    match unit.iter().find(|z| z.norm() > 1e-12) {
        Some(&lead) => unit * (lead.conj() / lead.norm()),
        None => unit,
    }
}

/// One local vector per party together with their flattened tensor product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    shape: PartyShape,
    locals: Vec<CVector>,
    flat: CVector,
}

impl ProductVector {
    pub fn new(shape: &PartyShape, locals: Vec<CVector>) -> Result<Self> {
        if locals.len() != shape.parties() {
            return Err(Error::ShapeMismatch(format!(
                "{} local vectors for {} parties",
                locals.len(),
                shape.parties()
            )));
        }
        for (j, (v, &d)) in locals.iter().zip(shape.dims()).enumerate() {
            if v.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "party {} has a local vector of length {}, expected {d}",
                    j + 1,
                    v.len()
                )));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if v.norm() == 0.0 {
                return Err(contract(format!("party {} has a zero local vector", j + 1)));
            }
        }
        let flat = locals[1..].iter().fold(locals[0].clone(), |acc, v| kron(&acc, v));
        Ok(Self {
            shape: shape.clone(),
            locals,
            flat,
        })
    }

    pub fn shape(&self) -> &PartyShape {
        &self.shape
    }

    pub fn locals(&self) -> &[CVector] {
        &self.locals
    }

    pub fn local(&self, party: usize) -> &CVector {
        &self.locals[party]
    }

    pub fn flat(&self) -> &CVector {
        &self.flat
    }

    pub fn norm(&self) -> f64 {
        self.flat.norm()
    }

    /// Same ray with every local vector scaled to unit norm.
    pub fn normalized(&self) -> Self {
        let locals = self.locals.iter().map(|v| v.unscale(v.norm())).collect();
        Self::new(&self.shape, locals).expect("scaling keeps locals valid")
    }

    /// Unit locals, each with its first non-negligible entry real positive. This makes the
    /// first nonzero component of the flat vector real positive as well.
    pub fn canonical(&self) -> Self {
        let locals = self.locals.iter().map(canonical_local).collect();
        Self::new(&self.shape, locals).expect("canonicalization keeps locals valid")
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        fidelity(&self.flat, &other.flat)
    }

    pub fn projectively_equal(&self, other: &Self, tol: &Tolerance) -> bool {
        self.shape == other.shape && 1.0 - self.fidelity(other) <= tol.dedupe_fid
    }

    /// Deterministic order on canonical forms; entries are compared after rounding so
    /// that numerically equal vectors sort identically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let key = |z: &C64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
        let a = self.canonical();
        let b = other.canonical();
        for (x, y) in a.flat.iter().zip(b.flat.iter()) {
            match key(x).cmp(&key(y)) {
                Ordering::Equal => continue,
                ord => return ord.reverse(),
            }
        }
        Ordering::Equal
    }
}

/// Builds the product vector of `locals` over `shape`.
pub fn flatten(locals: Vec<CVector>, shape: &PartyShape) -> Result<ProductVector> {
    ProductVector::new(shape, locals)
}

/// Canonicalizes, removes projective duplicates (keeping the first), and sorts.
pub fn dedupe_projective(vectors: Vec<ProductVector>, tol: &Tolerance) -> Vec<ProductVector> {
    let mut kept: Vec<ProductVector> = Vec::new();
    for v in vectors {
        if !kept.iter().any(|k| k.projectively_equal(&v, tol)) {
            kept.push(v.canonical());
        }
    }
    kept.sort_by(|a, b| a.canonical_cmp(b));
    kept
}

/// A Hermitian `d x d` operator on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    shape: PartyShape,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(shape: &PartyShape, matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        let d = shape.total();
        if matrix.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "operator is {:?}, shape {shape} needs {d}x{d}",
                matrix.shape()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = (&matrix - matrix.adjoint()).camax();
        if defect > tol.residual_abs {
            return Err(contract(format!("operator is not Hermitian (defect {defect:e})")));
        }
        Ok(Self {
            shape: shape.clone(),
            matrix,
        })
    }

    pub fn shape(&self) -> &PartyShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self, tol: &Tolerance) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix, tol)
    }
}

/// The rank-one projector `|z><z|` of a unit product vector.
pub fn pure_state(z: &ProductVector, tol: &Tolerance) -> Result<HermitianOperator> {
    let norm = z.norm();
    if (norm - 1.0).abs() > tol.residual_abs {
        return Err(contract(format!("pure_state needs a unit vector, norm is {norm}")));
    }
    let flat = z.flat();
    Ok(HermitianOperator {
        shape: z.shape().clone(),
        matrix: flat * flat.adjoint(),
    })
}

/// Convex combination `sum p_i rho_i`.
pub fn mix(states: &[HermitianOperator], weights: &[f64], tol: &Tolerance) -> Result<HermitianOperator> {
    let Some(first) = states.first() else {
        return Err(contract("mix of an empty list"));
    };
    if states.len() != weights.len() {
        return Err(contract(format!("{} states but {} weights", states.len(), weights.len())));
    }
    if let Some(bad) = weights.iter().find(|&&p| !(p > 0.0)) {
        return Err(contract(format!("weights must be positive, got {bad}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tol.residual_abs {
        return Err(contract(format!("weights sum to {total}, expected 1")));
    }
    let mut matrix = CMatrix::zeros(first.matrix.nrows(), first.matrix.ncols());
    for (s, &p) in states.iter().zip(weights) {
        if s.shape != first.shape {
            return Err(Error::ShapeMismatch(format!("cannot mix {} with {}", s.shape, first.shape)));
        }
        matrix += s.matrix.scale(p);
    }
    Ok(HermitianOperator {
        shape: first.shape.clone(),
        matrix,
    })
}

/// A subset `S` of the parties (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PartySubset {
    members: Vec<usize>,
}

impl PartySubset {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(party: usize) -> Self {
        Self { members: vec![party] }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, party: usize) -> bool {
        self.members.binary_search(&party).is_ok()
    }

    pub fn complement(&self, parties: usize) -> Self {
        Self::new((0..parties).filter(|j| !self.contains(*j)))
    }

    fn check(&self, parties: usize) -> Result<()> {
        match self.members.iter().find(|&&j| j >= parties) {
            Some(&index) => Err(Error::InvalidParty { index, parties }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for PartySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Raw-matrix partial transpose over the parties in `subset`.
pub(crate) fn partial_transpose_matrix(m: &CMatrix, shape: &PartyShape, subset: &PartySubset) -> CMatrix {
    let d = shape.total();
    let mut out = CMatrix::zeros(d, d);
    for r in 0..d {
        let rd = shape.digits(r);
        for c in 0..d {
            let cd = shape.digits(c);
            let (mut nr, mut nc) = (rd.clone(), cd.clone());
            for &j in subset.members() {
                nr[j] = cd[j];
                nc[j] = rd[j];
            }
            out[(shape.index(&nr), shape.index(&nc))] = m[(r, c)];
        }
    }
    out
}

/// `rho^{T(S)}`: transposition of the tensor factors in `subset`.
pub fn partial_transpose(rho: &HermitianOperator, subset: &PartySubset) -> Result<HermitianOperator> {
    subset.check(rho.shape.parties())?;
    Ok(HermitianOperator {
        shape: rho.shape.clone(),
        matrix: partial_transpose_matrix(&rho.matrix, &rho.shape, subset),
    })
}

/// `z^{Γ(S)}`: complex conjugation of the local vectors in `subset`.
pub fn partial_conjugate(z: &ProductVector, subset: &PartySubset) -> Result<ProductVector> {
    subset.check(z.shape.parties())?;
    let locals = z
        .locals
        .iter()
        .enumerate()
        .map(|(j, v)| if subset.contains(j) { v.conjugate() } else { v.clone() })
        .collect();
    ProductVector::new(&z.shape, locals)
}

/// Merges two adjacent parties `(j, j + 1)` into one of dimension `d_j d_{j+1}`.
pub fn regroup(z: &ProductVector, merge: (usize, usize)) -> Result<ProductVector> {
    let n = z.shape.parties();
    if n < 3 {
        return Err(contract("regroup needs at least three parties"));
    }
    let (a, b) = merge;
    if a >= n {
        return Err(Error::InvalidParty { index: a, parties: n });
    }
    if b >= n {
        return Err(Error::InvalidParty { index: b, parties: n });
    }
    if b != a + 1 {
        return Err(contract(format!(
            "only adjacent parties (j, j+1) can be merged without reordering, got ({}, {})",
            a + 1,
            b + 1
        )));
    }
    let mut dims = z.shape.dims.clone();
    dims[a] *= dims[b];
    dims.remove(b);
    let mut locals = z.locals.clone();
    locals[a] = kron(&z.locals[a], &z.locals[b]);
    locals.remove(b);
    let mut out = ProductVector::new(&PartyShape::new(dims)?, locals)?;
    // Same tensor, same flat vector: keep it bit-for-bit.
    out.flat = z.flat.clone();
    Ok(out)
}
