//! Exact-count product-vector search for two and three qubits.
//!
//! Three qubits: writing the first party's local as `x`, each constraint becomes a
//! bilinear form `y^t M_k(x) v` on the remaining two qubits. Three such forms share a
//! common zero on P1 x P1 exactly when the 6x6 matrix of the products `y_l f_k`
//! (in the basis of bidegree-(2,1) monomials) is singular. Its determinant is a binary
//! sextic in `x`, so a generic five-dimensional subspace yields exactly six slices.
//! Each root `x` is sliced back into a two-qubit problem, solved through the 2x2 matrix
//! pencil of the slice kernel, and every candidate is refined on the full system.
//! Positive-dimensional solution sets are reported only after three independent
//! verified samples on them.

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::{c2, rank_one_factor, System};
use crate::error::{Error, Result};
use crate::linalg::{kernel_with_cutoff, univariate_roots, CMatrix, CVector, PolyRoots, Tolerance, C64};
use crate::tensor::{dedupe_projective, fidelity, ProductVector};

const SEED: u64 = 0x5eed_f00d;
/// Singular-value cutoff for slices taken at numerically computed roots.
const SLICE_CUTOFF: f64 = 1e-6;
/// Refined candidates must reach this residual before the subspace check.
const POLISH_TARGET: f64 = 1e-12;
const SAMPLE_ATTEMPTS: usize = 24;

pub(crate) enum Solved {
    Finite { vectors: Vec<ProductVector>, slices: usize },
    Infinite { samples: Vec<ProductVector>, slices: usize },
}

enum SliceProducts {
    Finite(Vec<(CVector, CVector)>),
    /// The slice kernel looks like it holds a positive-dimensional family.
    Family,
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| random_c(rng))
}

fn random_unitary2(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let a = random_vec(rng, 2).normalize();
    let b = c2(-a[1].conj(), a[0].conj());
    Matrix2::new(a[0], b[0], a[1], b[1])
}

fn as_matrix2(v: &CVector) -> Matrix2<C64> {
    Matrix2::new(v[0], v[1], v[2], v[3])
}

fn det2(m: &Matrix2<C64>) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Product vectors `y ⊗ v` in the kernel of the `c x 4` matrix `rows`, a slice of an
/// orthonormal system at a unit first-party local (so its natural scale is 1).
fn products_in_slice(rows: &CMatrix, cutoff: f64, rng: &mut ChaCha8Rng) -> Result<SliceProducts> {
    let scale = rows.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if rows.nrows() == 0 || scale <= cutoff {
        return Ok(SliceProducts::Family);
    }
    let mut kernel = kernel_with_cutoff(rows, cutoff)?;
    if kernel.dim() == 0 {
        // Inexact root: fall back to the least-violated direction.
        kernel = kernel_with_cutoff(rows, 1.0 - 1e-12)?;
        let last = kernel.vectors().last().cloned();
        kernel = crate::linalg::SubspaceBasis::from_orthonormal(4, last.into_iter().collect());
    }
    match kernel.dim() {
        1 => Ok(SliceProducts::Finite(vec![rank_one_factor(&as_matrix2(&kernel.vectors()[0]))])),
        2 => {
            let u = random_unitary2(rng);
            let a0 = as_matrix2(&kernel.vectors()[0]);
            let b0 = as_matrix2(&kernel.vectors()[1]);
            let a = a0 * u[(0, 0)] + b0 * u[(1, 0)];
            let b = a0 * u[(0, 1)] + b0 * u[(1, 1)];
            // det(a + t b) = det a + t (a00 b11 + a11 b00 - a01 b10 - a10 b01) + t^2 det b
            let mixed = a[(0, 0)] * b[(1, 1)] + a[(1, 1)] * b[(0, 0)] - a[(0, 1)] * b[(1, 0)] - a[(1, 0)] * b[(0, 1)];
            let coeffs = [det2(&a), mixed, det2(&b)];
            let size = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if size <= 1e-9 {
                return Ok(SliceProducts::Family);
            }
            let mut out = Vec::new();
            let lead_small = coeffs[2].norm() <= 1e-10 * size;
            let used = if lead_small { &coeffs[..2] } else { &coeffs[..] };
            if let PolyRoots::Roots(ts) = univariate_roots(used, &loose_tol())? {
                for t in ts {
                    out.push(rank_one_factor(&(a + b * t)));
                }
            }
            if lead_small {
                out.push(rank_one_factor(&b));
            }
            Ok(SliceProducts::Finite(out))
        }
        _ => Ok(SliceProducts::Family),
    }
}

fn loose_tol() -> Tolerance {
    Tolerance {
        rank_rel: 1e-12,
        psd_abs: 1e-12,
        residual_abs: 1e-300,
        dedupe_fid: 1e-12,
    }
}

/// The `c x 4` slice of a three-qubit system at first-party local `x`.
fn slice_rows(sys: &System, x: &CVector) -> CMatrix {
    let c = sys.constraints();
    let mut out = CMatrix::zeros(c, 4);
    for k in 0..c {
        for j in 0..4 {
            out[(k, j)] = sys.rows[(k, j)] * x[0] + sys.rows[(k, 4 + j)] * x[1];
        }
    }
    out
}

/// Samples `y ⊗ v` from a slice family by fixing one local at random and solving for
/// the other.
fn sample_slice_family(rows: &CMatrix, rng: &mut ChaCha8Rng) -> Result<Option<(CVector, CVector)>> {
    if rows.nrows() == 0 {
        return Ok(Some((random_vec(rng, 2), random_vec(rng, 2))));
    }
    let fix_first = rng.random_bool(0.5);
    let fixed = random_vec(rng, 2);
    let mut reduced = CMatrix::zeros(rows.nrows(), 2);
    for k in 0..rows.nrows() {
        for free in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for f in 0..2 {
                let idx = if fix_first { 2 * f + free } else { 2 * free + f };
                acc += rows[(k, idx)] * fixed[f];
            }
            reduced[(k, free)] = acc;
        }
    }
    let scale = reduced.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let other = if scale <= 1e-14 {
        random_vec(rng, 2)
    } else {
        let k = kernel_with_cutoff(&reduced, SLICE_CUTOFF)?;
        match k.vectors().first() {
            Some(v) => v.clone(),
            None => return Ok(None),
        }
    };
    Ok(Some(if fix_first { (fixed, other) } else { (other, fixed) }))
}

struct Collector<'a> {
    sys: &'a System,
    tol: &'a Tolerance,
    found: Vec<ProductVector>,
}

impl<'a> Collector<'a> {
    /// Refines and verifies a candidate; returns the accepted vector.
    fn offer(&mut self, locals: Vec<CVector>) -> Option<ProductVector> {
        let polished = self.sys.polish(&locals);
        if polished.residual > POLISH_TARGET {
            return None;
        }
        let z = self.sys.product(polished.locals);
        if self.sys.residual(z.flat()) > self.tol.residual_abs {
            return None;
        }
        self.found.push(z.clone());
        Some(z)
    }
}

/// Collects verified samples until three pairwise distinct ones exist.
fn certify<F>(sys: &System, tol: &Tolerance, rng: &mut ChaCha8Rng, mut draw: F) -> Result<Option<Vec<ProductVector>>>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<Option<Vec<CVector>>>,
{
    let mut samples: Vec<ProductVector> = Vec::new();
    let mut col = Collector {
        sys,
        tol,
        found: Vec::new(),
    };
    for _ in 0..SAMPLE_ATTEMPTS {
        let Some(locals) = draw(rng)? else { continue };
        if let Some(z) = col.offer(locals) {
            if samples.iter().all(|s| fidelity(s.flat(), z.flat()) < 1.0 - 1e-6) {
                samples.push(z.canonical());
            }
        }
        if samples.len() == 3 {
            return Ok(Some(samples));
        }
    }
    Ok(None)
}

pub(crate) fn solve_two_qubits(sys: &System, tol: &Tolerance) -> Result<Solved> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let rows = &sys.rows;
    let family = if rows.nrows() == 0 {
        true
    } else {
        match products_in_slice(rows, tol.rank_rel, &mut rng)? {
            SliceProducts::Family => true,
            SliceProducts::Finite(cands) => {
                let mut col = Collector {
                    sys,
                    tol,
                    found: Vec::new(),
                };
                for (y, v) in cands {
                    col.offer(vec![y, v]);
                }
                return Ok(Solved::Finite {
                    vectors: dedupe_projective(col.found, tol),
                    slices: 1,
                });
            }
        }
    };
    debug_assert!(family);
    let samples = certify(sys, tol, &mut rng, |rng| {
        Ok(sample_slice_family(rows, rng)?.map(|(y, v)| vec![y, v]))
    })?;
    match samples {
        Some(samples) => Ok(Solved::Infinite { samples, slices: 1 }),
        None => Err(Error::NumericFailure {
            context: "two-qubit enumeration".into(),
            detail: "kernel looked positive-dimensional but no three samples verified".into(),
        }),
    }
}

/// Binary-sextic eliminant of three bilinear slices, as coefficients in `s` where the
/// first-party local is `x = u (1, s)`.
fn eliminant(sys3: &System, u: &Matrix2<C64>) -> Result<(Vec<C64>, f64)> {
    const N: usize = 8;
    let mut values = [C64::new(0.0, 0.0); N];
    let mut bound = 0.0f64;
    for (k, value) in values.iter_mut().enumerate() {
        let s = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / N as f64);
        let x = c2(u[(0, 0)] + u[(0, 1)] * s, u[(1, 0)] + u[(1, 1)] * s);
        let slice = slice_rows(sys3, &x);
        let mut r = CMatrix::zeros(6, 6);
        for f in 0..3 {
            for l in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        r[(2 * f + l, 2 * (l + b) + c)] += slice[(f, 2 * b + c)];
                    }
                }
            }
        }
        let hadamard: f64 = r.row_iter().map(|row| row.norm()).product();
        bound = bound.max(hadamard);
        *value = r.determinant();
    }
    // Inverse DFT on the unit circle recovers the coefficients exactly (degree 6 < N).
    let coeffs = (0..N)
        .map(|j| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / N as f64))
                .sum::<C64>()
                / N as f64
        })
        .collect();
    Ok((coeffs, bound))
}

/// Means of clusters of nearby roots at several radii. A root of multiplicity `m` comes
/// back from the companion matrix as a ring of radius about `eps^(1/m)`, while the mean of
/// the ring is accurate to working precision.
fn cluster_means(roots: &[C64]) -> Vec<C64> {
    let mut means: Vec<C64> = Vec::new();
    for radius in [1e-5, 1e-3, 3e-2] {
        let mut used = vec![false; roots.len()];
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            let mut members = vec![roots[i]];
            used[i] = true;
            for j in i + 1..roots.len() {
                if !used[j] && (roots[j] - roots[i]).norm() <= radius * roots[i].norm().max(1.0) {
                    used[j] = true;
                    members.push(roots[j]);
                }
            }
            if members.len() > 1 {
                let mean = members.iter().sum::<C64>() / members.len() as f64;
                if means.iter().all(|m| (m - mean).norm() > 1e-12 * mean.norm().max(1.0)) {
                    means.push(mean);
                }
            }
        }
    }
    means
}

/// Moves `x` to a nearby point where the slice drops rank. The `k` small singular values
/// are driven to zero by alternating between the right singular vectors `V` and the
/// least-squares step `s` in `min ||R(x + s x⊥) V||`, which is linear in `s`. Near a
/// root of multiplicity `m` this recovers digits the root finder loses to the ring.
fn refine_root(sys: &System, x: &CVector) -> CVector {
    let mut x = x.normalize();
    for _ in 0..60 {
        let rows = slice_rows(sys, &x);
        let svd = rows.clone().svd(false, true);
        let Some(v_t) = svd.v_t else { break };
        let sv = &svd.singular_values;
        let k = sv.iter().filter(|&&s| s <= 1e-2).count();
        if k == 0 || sv.iter().filter(|&&s| s <= 1e-2).all(|&s| s <= 1e-15) {
            break;
        }
        // nalgebra sorts singular values in decreasing order.
        let n = sv.len();
        let v = v_t.rows(n - k, k).adjoint();
        let perp = c2(-x[1].conj(), x[0].conj());
        let a = &rows * &v;
        let b = slice_rows(sys, &perp) * &v;
        let bb = b.norm_squared();
        if bb == 0.0 {
            break;
        }
        let step = -b.dotc(&a) / bb;
        if step.norm() <= 1e-16 {
            break;
        }
        x = (&x + &perp * step).normalize();
    }
    x
}

pub(crate) fn solve_three_qubits(sys: &System, tol: &Tolerance) -> Result<Solved> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let c = sys.constraints();
    let mut slices = 0usize;

    // Samples over random first-party locals: certifies a family that projects onto
    // the whole first factor.
    let dominant = |rng: &mut ChaCha8Rng, slices: &mut usize| -> Result<Option<Vec<ProductVector>>> {
        certify(sys, tol, rng, |rng| {
            let x = random_vec(rng, 2);
            *slices += 1;
            let rows = slice_rows(sys, &x);
            Ok(match products_in_slice(&rows, tol.rank_rel, rng)? {
                SliceProducts::Finite(c) => c.into_iter().next().map(|(y, v)| vec![x.clone(), y, v]),
                SliceProducts::Family => sample_slice_family(&rows, rng)?.map(|(y, v)| vec![x.clone(), y, v]),
            })
        })
    };

    if c <= 2 {
        // A codimension <= 2 section of P1 x P1 x P1 is at least a curve.
        return match dominant(&mut rng, &mut slices)? {
            Some(samples) => Ok(Solved::Infinite { samples, slices }),
            None => Err(Error::NumericFailure {
                context: "three-qubit enumeration".into(),
                detail: format!("{c} constraints but no curve of solutions could be sampled"),
            }),
        };
    }

    for attempt in 0..4 {
        let mixed = if c == 3 && attempt == 0 {
            sys.rows.clone()
        } else {
            let mut m = CMatrix::zeros(3, 8);
            for f in 0..3 {
                let w = random_vec(&mut rng, c);
                let row = w.transpose() * &sys.rows;
                m.set_row(f, &row);
            }
            m
        };
        let mut normalized = mixed.clone();
        for f in 0..3 {
            let n = mixed.row(f).norm();
            if n > 0.0 {
                normalized.set_row(f, &mixed.row(f).unscale(n));
            }
        }
        let mixed_sys = System {
            shape: sys.shape.clone(),
            rows: normalized,
        };

        let u = random_unitary2(&mut rng);
        let (coeffs, bound) = eliminant(&mixed_sys, &u)?;
        let size = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if size <= 1e-10 * bound.max(f64::MIN_POSITIVE) {
            if let Some(samples) = dominant(&mut rng, &mut slices)? {
                return Ok(Solved::Infinite { samples, slices });
            }
            continue;
        }
        let mut deg = 6;
        while deg > 0 && coeffs[deg].norm() <= 1e-10 * size {
            deg -= 1;
        }
        let roots = match univariate_roots(&coeffs[..=deg], &loose_tol())? {
            PolyRoots::Roots(r) => r,
            PolyRoots::Zero => Vec::new(),
        };
        let mut xs: Vec<CVector> = roots
            .iter()
            .chain(cluster_means(&roots).iter())
            .map(|s| c2(u[(0, 0)] + u[(0, 1)] * s, u[(1, 0)] + u[(1, 1)] * s))
            .collect();
        if deg < 6 {
            xs.push(c2(u[(0, 1)], u[(1, 1)]));
        }

        let mut col = Collector {
            sys,
            tol,
            found: Vec::new(),
        };
        let xs: Vec<CVector> = xs
            .iter()
            .flat_map(|x| {
                let x = x.normalize();
                let r = refine_root(sys, &x);
                if (r.dotc(&x).norm() - 1.0).abs() <= 1e-14 { vec![x] } else { vec![x, r] }
            })
            .collect();
        for x in xs {
            slices += 1;
            let rows = slice_rows(sys, &x);
            match products_in_slice(&rows, SLICE_CUTOFF, &mut rng)? {
                SliceProducts::Finite(cands) => {
                    for (y, v) in cands {
                        col.offer(vec![x.clone(), y, v]);
                    }
                }
                SliceProducts::Family => {
                    let fam = certify(sys, tol, &mut rng, |rng| {
                        Ok(sample_slice_family(&rows, rng)?.map(|(y, v)| vec![x.clone(), y, v]))
                    })?;
                    if let Some(samples) = fam {
                        return Ok(Solved::Infinite { samples, slices });
                    }
                    // Inflated kernel at an inexact root: retry with a strict cutoff.
                    if let SliceProducts::Finite(cands) = products_in_slice(&rows, tol.rank_rel, &mut rng)? {
                        for (y, v) in cands {
                            col.offer(vec![x.clone(), y, v]);
                        }
                    }
                }
            }
        }
        return Ok(Solved::Finite {
            vectors: dedupe_projective(col.found, tol),
            slices,
        });
    }
    Err(Error::NumericFailure {
        context: "three-qubit enumeration".into(),
        detail: "eliminant vanished identically but no solution family could be sampled".into(),
    })
}
