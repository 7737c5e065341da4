//! Constraint systems `<w_k| x_1 ⊗ ... ⊗ x_n> = 0` and their Gauss–Newton refinement.

use nalgebra::Complex;

use crate::error::Result;
use crate::linalg::{CMatrix, CVector, SubspaceBasis, Tolerance, C64};
use crate::tensor::{PartyShape, ProductVector};

/// Orthonormal complement vectors stored as conjugated rows, so that the residual of a
/// flat vector `z` is simply `rows * z`.
#[derive(Debug, Clone)]
pub(crate) struct System {
    pub shape: PartyShape,
    pub rows: CMatrix,
}

impl System {
    pub fn from_subspace(basis: &SubspaceBasis, shape: &PartyShape, tol: &Tolerance) -> Result<Self> {
        let complement = basis.complement(tol)?;
        let d = shape.total();
        let mut rows = CMatrix::zeros(complement.dim(), d);
        for (k, w) in complement.vectors().iter().enumerate() {
            rows.set_row(k, &w.adjoint());
        }
        Ok(Self {
            shape: shape.clone(),
            rows,
        })
    }

    pub fn constraints(&self) -> usize {
        self.rows.nrows()
    }

    /// `||rows * z|| / ||z||`, which equals the distance of the unit ray to the subspace.
    pub fn residual(&self, flat: &CVector) -> f64 {
        let n = flat.norm();
        if n == 0.0 || self.rows.nrows() == 0 {
            return 0.0;
        }
        (&self.rows * flat).norm() / n
    }

    /// Gauss–Newton on the local vectors with minimum-norm steps (the per-party scale
    /// gauge is left free and removed by renormalizing after every step).
    pub fn polish(&self, locals: &[CVector]) -> Polished {
        let mut locals: Vec<CVector> = locals.iter().map(|v| v.unscale(v.norm())).collect();
        let mut best = (locals.clone(), f64::INFINITY);
        if self.rows.nrows() == 0 {
            return Polished { locals, residual: 0.0 };
        }
        let n = locals.len();
        let width: usize = locals.iter().map(|v| v.len()).sum();
        for _ in 0..100 {
            let flat = flatten(&locals);
            let r = &self.rows * &flat;
            let res = r.norm() / flat.norm();
            if res < best.1 {
                best = (locals.clone(), res);
            }
            if res <= 1e-15 {
                break;
            }
            let mut jac = CMatrix::zeros(self.rows.nrows(), width);
            let mut col = 0;
            for j in 0..n {
                for i in 0..locals[j].len() {
                    let mut parts = locals.clone();
                    parts[j] = CVector::zeros(locals[j].len());
                    parts[j][i] = C64::new(1.0, 0.0);
                    jac.set_column(col, &(&self.rows * flatten(&parts)));
                    col += 1;
                }
            }
            let svd = jac.svd(true, true);
            let smax = svd.singular_values.max();
            if smax == 0.0 {
                break;
            }
            let Ok(step) = svd.solve(&r, 1e-12 * smax) else {
                break;
            };
            let mut off = 0;
            let mut next = locals.clone();
            for v in next.iter_mut() {
                for i in 0..v.len() {
                    v[i] -= step[off + i];
                }
                off += v.len();
            }
            if next.iter().any(|v| v.norm() == 0.0 || !v.norm().is_finite()) {
                break;
            }
            let next: Vec<CVector> = next.iter().map(|v| v.unscale(v.norm())).collect();
            let flat_next = flatten(&next);
            let res_next = (&self.rows * &flat_next).norm() / flat_next.norm();
            if res_next >= res && res_next > 1e-13 {
                // Not contracting any more; keep the best iterate seen.
                break;
            }
            locals = next;
        }
        let (locals, residual) = best;
        Polished { locals, residual }
    }

    pub fn product(&self, locals: Vec<CVector>) -> ProductVector {
        ProductVector::new(&self.shape, locals).expect("polished locals are nonzero")
    }
}

pub(crate) struct Polished {
    pub locals: Vec<CVector>,
    pub residual: f64,
}

pub(crate) fn flatten(locals: &[CVector]) -> CVector {
    locals[1..]
        .iter()
        .fold(locals[0].clone(), |acc, v| crate::tensor::kron(&acc, v))
}

pub(crate) fn c2(a: C64, b: C64) -> CVector {
    CVector::from_vec(vec![a, b])
}

/// Rank-one factorization `m ≈ y v^t` of a 2x2 matrix (as `(y, v)`), pivoting on the
/// largest entry: `y` is its column and `v^t` its row divided by the pivot.
pub(crate) fn rank_one_factor(m: &nalgebra::Matrix2<C64>) -> (CVector, CVector) {
    let (mut a, mut b) = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if m[(i, j)].norm() > m[(a, b)].norm() {
                (a, b) = (i, j);
            }
        }
    }
    let pivot = m[(a, b)];
    let y = c2(m[(0, b)], m[(1, b)]);
    if pivot.norm() == 0.0 {
        return (c2(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)), y);
    }
    let v = c2(m[(a, 0)] / pivot, m[(a, 1)] / pivot);
    (y, v)
}
