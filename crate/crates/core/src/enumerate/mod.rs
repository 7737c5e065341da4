//! All product vectors (up to scalars) inside a subspace of a two- or three-qubit space.

mod oracle;
mod solver;
mod system;

pub use oracle::{oracle_grid_search, DEFAULT_GRID_DENSITY};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{SubspaceBasis, Tolerance};
use crate::tensor::{PartyShape, ProductVector};
use solver::Solved;
use system::System;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationKind {
    Finite,
    Infinite,
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub kind: EnumerationKind,
    /// Canonical, pairwise projectively distinct, sorted. Empty when infinite.
    pub vectors: Vec<ProductVector>,
    /// Three verified points on a positive-dimensional family (infinite case only).
    pub samples: Vec<ProductVector>,
    /// Number of first-party slices examined by the elimination.
    pub charts_visited: usize,
    /// Largest subspace-membership residual among returned vectors and samples.
    pub residual_max: f64,
}

impl EnumerationResult {
    pub fn is_finite(&self) -> bool {
        self.kind == EnumerationKind::Finite
    }

    /// Number of product vectors, `None` for an infinite family.
    pub fn count(&self) -> Option<usize> {
        self.is_finite().then_some(self.vectors.len())
    }

    /// Whether `expected` and the enumerated set agree as projective sets.
    pub fn matches(&self, expected: &[ProductVector], tol: &Tolerance) -> bool {
        self.is_finite()
            && self.vectors.len() == expected.len()
            && expected
                .iter()
                .all(|e| self.vectors.iter().any(|v| v.projectively_equal(e, tol)))
    }
}

fn check_supported(shape: &PartyShape) -> Result<()> {
    if shape.is_qubits() && (shape.parties() == 2 || shape.parties() == 3) {
        Ok(())
    } else {
        Err(Error::UnsupportedShape(shape.dims().to_vec()))
    }
}

/// `||z - P z|| / ||z||` for the orthogonal projector `P` onto the subspace.
pub fn membership_residual(z: &ProductVector, basis: &SubspaceBasis) -> Result<f64> {
    if z.flat().len() != basis.ambient_dim() {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} against a subspace of C^{}",
            z.flat().len(),
            basis.ambient_dim()
        )));
    }
    Ok(basis.relative_residual(z.flat()))
}

/// Enumerates the product vectors of the subspace spanned by `basis`.
pub fn enumerate_in_subspace(basis: &SubspaceBasis, shape: &PartyShape, tol: &Tolerance) -> Result<EnumerationResult> {
    check_supported(shape)?;
    if basis.ambient_dim() != shape.total() {
        return Err(Error::ShapeMismatch(format!(
            "subspace of C^{} for shape {shape}",
            basis.ambient_dim()
        )));
    }
    if basis.dim() == 0 {
        return Ok(EnumerationResult {
            kind: EnumerationKind::Finite,
            vectors: Vec::new(),
            samples: Vec::new(),
            charts_visited: 0,
            residual_max: 0.0,
        });
    }
    let sys = System::from_subspace(basis, shape, tol)?;
    let solved = if shape.parties() == 2 {
        solver::solve_two_qubits(&sys, tol)?
    } else {
        solver::solve_three_qubits(&sys, tol)?
    };
    let (kind, vectors, samples, charts_visited) = match solved {
        Solved::Finite { vectors, slices } => (EnumerationKind::Finite, vectors, Vec::new(), slices),
        Solved::Infinite { samples, slices } => (EnumerationKind::Infinite, Vec::new(), samples, slices),
    };
    let residual_max = vectors
        .iter()
        .chain(&samples)
        .map(|z| basis.relative_residual(z.flat()))
        .fold(0.0, f64::max);
    Ok(EnumerationResult {
        kind,
        vectors,
        samples,
        charts_visited,
        residual_max,
    })
}
