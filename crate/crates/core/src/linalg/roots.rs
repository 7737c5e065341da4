use nalgebra::linalg::Schur;

use super::{CMatrix, Tolerance, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PolyRoots {
    /// Every coefficient is below `residual_abs`; the caller decides what that means.
    Zero,
    Roots(Vec<C64>),
}

/// Value and derivative of `sum coeffs[k] x^k` (Horner).
pub fn poly_eval(coeffs: &[C64], x: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All complex roots of `sum coeffs[k] x^k` (ascending powers).
///
/// Roots are eigenvalues of the companion matrix, each polished by Newton steps that
/// are only accepted while they reduce `|p|`.
pub fn univariate_roots(coeffs: &[C64], tol: &Tolerance) -> Result<PolyRoots> {
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale <= tol.residual_abs {
        return Ok(PolyRoots::Zero);
    }
    let mut deg = coeffs.len() - 1;
    while coeffs[deg].norm() <= 4.0 * f64::EPSILON * scale {
        deg -= 1;
    }
    // Roots at the origin are split off exactly.
    let mut low = 0;
    while low < deg && coeffs[low].norm() <= 4.0 * f64::EPSILON * scale {
        low += 1;
    }
    let mut roots = vec![C64::new(0.0, 0.0); low];
    let coeffs = &coeffs[low..];
    let deg = deg - low;
    if deg == 0 {
        return Ok(PolyRoots::Roots(roots));
    }
    let lead = coeffs[deg];
    let mut companion = CMatrix::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let poly = &coeffs[..=deg];
    let eigen = match Schur::try_new(companion, f64::EPSILON, 10_000).and_then(|s| s.eigenvalues()) {
        Some(e) => e.iter().cloned().collect(),
        None => aberth(poly).ok_or(Error::NoConvergence("polynomial roots"))?,
    };
    roots.extend(eigen.into_iter().map(|r| polish(poly, r)));
    Ok(PolyRoots::Roots(roots))
}

/// Simultaneous Aberth–Ehrlich iteration, used when the companion Schur form fails.
fn aberth(coeffs: &[C64]) -> Option<Vec<C64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg].norm();
    let radius = 1.0 + coeffs[..deg].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = poly_eval(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..deg).filter(|&j| j != i).map(|j| C64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    Some(z)
}

fn polish(coeffs: &[C64], mut x: C64) -> C64 {
    let (mut p, mut dp) = poly_eval(coeffs, x);
    for _ in 0..20 {
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let next = x - p / dp;
        let (np, ndp) = poly_eval(coeffs, next);
        if np.norm() >= p.norm() {
            break;
        }
        x = next;
        p = np;
        dp = ndp;
    }
    x
}
