//! Brute-force cross-check for the enumeration: Newton iterations seeded from a complex
//! grid in every affine chart. Shares no code with the elimination path beyond the
//! final canonicalization.

use crate::error::{contract, Error, Result};
use crate::linalg::{CVector, SubspaceBasis, Tolerance, C64};
use crate::tensor::{dedupe_projective, PartyShape, ProductVector};

pub const DEFAULT_GRID_DENSITY: usize = 4;

const MAX_ITER: usize = 40;
const CONVERGED: f64 = 1e-13;

struct Chart<'a> {
    rows: &'a [[C64; 8]],
    parties: usize,
    /// Bit j set: party j's local is `(x_j, 1)`, otherwise `(1, x_j)`.
    mask: usize,
}

impl Chart<'_> {
    fn local(&self, j: usize, x: C64) -> [C64; 2] {
        let one = C64::new(1.0, 0.0);
        if self.mask >> j & 1 == 1 {
            [x, one]
        } else {
            [one, x]
        }
    }

    fn dlocal(&self, j: usize) -> [C64; 2] {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        if self.mask >> j & 1 == 1 {
            [one, zero]
        } else {
            [zero, one]
        }
    }

    fn digit(&self, idx: usize, j: usize) -> usize {
        idx >> (self.parties - 1 - j) & 1
    }

    /// Residual vector, its squared norm relative to `||z||^2`, and the Jacobian.
    fn eval(&self, x: &[C64; 3], jac: Option<&mut [[C64; 3]; 8]>) -> ([C64; 8], f64) {
        let n = self.parties;
        let d = 1 << n;
        let locals: Vec<[C64; 2]> = (0..n).map(|j| self.local(j, x[j])).collect();
        let mut z = [C64::new(0.0, 0.0); 8];
        let mut dz = [[C64::new(0.0, 0.0); 8]; 3];
        for idx in 0..d {
            let mut p = C64::new(1.0, 0.0);
            for (j, l) in locals.iter().enumerate() {
                p *= l[self.digit(idx, j)];
            }
            z[idx] = p;
            for (j, dzj) in dz.iter_mut().enumerate().take(n) {
                let mut q = self.dlocal(j)[self.digit(idx, j)];
                for (l, loc) in locals.iter().enumerate() {
                    if l != j {
                        q *= loc[self.digit(idx, l)];
                    }
                }
                dzj[idx] = q;
            }
        }
        let znorm: f64 = z[..d].iter().map(|v| v.norm_sqr()).sum();
        let mut r = [C64::new(0.0, 0.0); 8];
        let mut cost = 0.0;
        for (k, row) in self.rows.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for idx in 0..d {
                acc += row[idx] * z[idx];
            }
            r[k] = acc;
            cost += acc.norm_sqr();
        }
        if let Some(jac) = jac {
            for (k, row) in self.rows.iter().enumerate() {
                for j in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for idx in 0..d {
                        acc += row[idx] * dz[j][idx];
                    }
                    jac[k][j] = acc;
                }
            }
        }
        (r, cost / znorm)
    }

    /// Levenberg–Marquardt from `x`; returns the converged chart point.
    fn newton(&self, mut x: [C64; 3]) -> Option<[C64; 3]> {
        let n = self.parties;
        let mut jac = [[C64::new(0.0, 0.0); 3]; 8];
        let (mut r, mut cost) = self.eval(&x, Some(&mut jac));
        let mut mu = 1e-3;
        for it in 0..MAX_ITER {
            if cost.sqrt() <= CONVERGED {
                return Some(x);
            }
            if it >= 15 && cost > 1e-6 {
                return None;
            }
            // (J^H J + mu diag) delta = -J^H r
            let mut a = [[C64::new(0.0, 0.0); 3]; 3];
            let mut b = [C64::new(0.0, 0.0); 3];
            for (k, jrow) in jac.iter().enumerate().take(self.rows.len()) {
                for i in 0..n {
                    b[i] -= jrow[i].conj() * r[k];
                    for j in 0..n {
                        a[i][j] += jrow[i].conj() * jrow[j];
                    }
                }
            }
            let scale = (0..n).map(|i| a[i][i].re).fold(0.0, f64::max).max(1e-300);
            for (i, row) in a.iter_mut().enumerate().take(n) {
                row[i] += C64::new(mu * scale, 0.0);
            }
            let delta = solve3(a, b, n)?;
            let mut trial = x;
            for i in 0..n {
                trial[i] += delta[i];
            }
            if trial[..n].iter().any(|t| !t.re.is_finite() || !t.im.is_finite() || t.norm() > 1e8) {
                return None;
            }
            let mut jac_trial = [[C64::new(0.0, 0.0); 3]; 8];
            let (r_trial, cost_trial) = self.eval(&trial, Some(&mut jac_trial));
            if cost_trial < cost {
                x = trial;
                r = r_trial;
                cost = cost_trial;
                jac = jac_trial;
                mu = (mu / 10.0).max(1e-15);
            } else {
                mu *= 10.0;
                if mu > 1e6 {
                    return None;
                }
            }
        }
        (cost.sqrt() <= CONVERGED).then_some(x)
    }
}

fn solve3(mut a: [[C64; 3]; 3], mut b: [C64; 3], n: usize) -> Option<[C64; 3]> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = [C64::new(0.0, 0.0); 3];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Best-effort list of product vectors in the subspace, found by seeding Newton's method
/// from `grid_density` points per real coordinate in each of the `2^n` charts.
pub fn oracle_grid_search(
    basis: &SubspaceBasis,
    shape: &PartyShape,
    grid_density: usize,
    tol: &Tolerance,
) -> Result<Vec<ProductVector>> {
    if !(shape.is_qubits() && (shape.parties() == 2 || shape.parties() == 3)) {
        return Err(Error::UnsupportedShape(shape.dims().to_vec()));
    }
    if basis.ambient_dim() != shape.total() {
        return Err(Error::ShapeMismatch(format!("subspace of C^{} for shape {shape}", basis.ambient_dim())));
    }
    if basis.dim() == 0 {
        return Err(contract("oracle needs a nonzero subspace"));
    }
    if grid_density < 2 {
        return Err(contract("grid density must be at least 2"));
    }
    let n = shape.parties();
    let d = shape.total();
    let complement = basis.complement(tol)?;
    let rows: Vec<[C64; 8]> = complement
        .vectors()
        .iter()
        .map(|w| {
            let mut row = [C64::new(0.0, 0.0); 8];
            for i in 0..d {
                row[i] = w[i].conj();
            }
            row
        })
        .collect();
    let grid: Vec<f64> = (0..grid_density)
        .map(|i| -1.0 + 2.0 * i as f64 / (grid_density - 1) as f64)
        .collect();
    let seeds = grid_density.pow(2 * n as u32);
    let mut found = Vec::new();
    for mask in 0..1usize << n {
        let chart = Chart {
            rows: &rows,
            parties: n,
            mask,
        };
        for seed in 0..seeds {
            let mut rest = seed;
            let mut x = [C64::new(0.0, 0.0); 3];
            for xj in x.iter_mut().take(n) {
                let re = grid[rest % grid_density];
                rest /= grid_density;
                let im = grid[rest % grid_density];
                rest /= grid_density;
                *xj = C64::new(re, im);
            }
            let Some(sol) = chart.newton(x) else { continue };
            let locals: Vec<CVector> = (0..n)
                .map(|j| {
                    let l = chart.local(j, sol[j]);
                    CVector::from_vec(vec![l[0], l[1]])
                })
                .collect();
            let z = ProductVector::new(shape, locals)?;
            if basis.relative_residual(z.flat()) <= tol.residual_abs {
                found.push(z);
            }
        }
    }
    Ok(dedupe_projective(found, tol))
}
