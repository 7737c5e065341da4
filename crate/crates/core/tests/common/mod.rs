#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use sepface::linalg::orthonormalize;
use sepface::{CVector, PartyShape, ProductVector, SubspaceBasis, Tolerance, C64};

pub fn gaussian(rng: &mut impl Rng, len: usize) -> CVector {
    CVector::from_iterator(
        len,
        (0..len).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))),
    )
}

pub fn real_gaussian(rng: &mut impl Rng, len: usize) -> CVector {
    CVector::from_iterator(len, (0..len).map(|_| C64::new(StandardNormal.sample(rng), 0.0)))
}

pub fn random_product(rng: &mut impl Rng, shape: &PartyShape) -> ProductVector {
    let locals = shape.dims().iter().map(|&d| gaussian(rng, d)).collect();
    ProductVector::new(shape, locals).unwrap()
}

pub fn random_real_product(rng: &mut impl Rng, shape: &PartyShape) -> ProductVector {
    let locals = shape.dims().iter().map(|&d| real_gaussian(rng, d)).collect();
    ProductVector::new(shape, locals).unwrap()
}

pub fn random_subspace(rng: &mut impl Rng, ambient: usize, dim: usize) -> SubspaceBasis {
    let vs: Vec<CVector> = (0..dim).map(|_| gaussian(rng, ambient)).collect();
    orthonormalize(&vs, &Tolerance::default()).unwrap()
}

pub fn span_of(vs: &[ProductVector]) -> SubspaceBasis {
    let flats: Vec<CVector> = vs.iter().map(|v| v.flat().clone()).collect();
    SubspaceBasis::spanned_by(vs[0].flat().len(), &flats, &Tolerance::default()).unwrap()
}

/// Uniform draw from the probability simplex.
pub fn dirichlet(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

pub fn same_projective_set(a: &[ProductVector], b: &[ProductVector], tol: &Tolerance) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| x.projectively_equal(y, tol)))
        && b.iter().all(|x| a.iter().any(|y| x.projectively_equal(y, tol)))
}
