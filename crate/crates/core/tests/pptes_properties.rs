mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepface::linalg::{hermitian_eigen, numeric_rank};
use sepface::pptes::{
    boundary_data, boundary_lambda, build_rho, expansion_coefficients, rho_line, verify_pptes, PptesVerdict, ProductCount,
    SixTuple,
};
use sepface::registry::load_example;
use sepface::tensor::partial_transpose;
use sepface::{enumerate_in_subspace, CVector, HermitianOperator, PartyShape, PartySubset, ProductVector, Tolerance, C64};

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Five random real product vectors and the sixth product vector of their span, which is
/// real as well (the remaining root of a real sextic).
fn random_real_six(rng: &mut ChaCha8Rng) -> SixTuple {
    let q3 = PartyShape::qubits(3);
    loop {
        let five: Vec<_> = (0..5).map(|_| random_real_product(rng, &q3)).collect();
        let found = enumerate_in_subspace(&span_of(&five), &q3, &tol()).unwrap();
        if found.count() != Some(6) {
            continue;
        }
        let Some(sixth) = found
            .vectors
            .iter()
            .find(|f| five.iter().all(|v| !v.projectively_equal(f, &tol())))
        else {
            continue;
        };
        assert!(sixth.flat().iter().all(|z| z.im.abs() < 1e-9), "sixth vector is not real");
        let locals = sixth
            .locals()
            .iter()
            .map(|l| l.map(|z| C64::new(z.re, 0.0)))
            .collect();
        let mut vs = five;
        vs.push(ProductVector::new(&q3, locals).unwrap());
        if let Ok(six) = SixTuple::new(vs, &tol()) {
            return six;
        }
    }
}

fn projector(z: &ProductVector) -> sepface::CMatrix {
    z.flat() * z.flat().adjoint()
}

#[test]
fn closed_forms_agree_and_ranks_drop_to_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let six = random_real_six(&mut rng);
        let p = dirichlet(&mut rng, 5);
        let data = boundary_data(&six, &p, &tol()).unwrap();
        let rho = build_rho(&six, &p, &tol()).unwrap();
        let mix = six
            .others()
            .iter()
            .zip(&p)
            .fold(sepface::CMatrix::zeros(8, 8), |acc, (z, &w)| acc + projector(z) * C64::new(w, 0.0));
        let other = (mix * C64::new(data.s, 0.0) - projector(six.distinguished_vector())) / C64::new(data.s - 1.0, 0.0);
        let gap = (rho.matrix() - other).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(gap <= 1e-12, "closed forms differ by {gap:e}");
        for j in 0..4 {
            let s = if j == 0 { PartySubset::empty() } else { PartySubset::single(j - 1) };
            let t = partial_transpose(&rho, &s).unwrap();
            assert_eq!(numeric_rank(t.matrix(), &tol()).unwrap(), 4, "T({j})");
        }
    }
}

#[test]
fn face_interior_has_rank_five_and_is_ppt() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let six = random_real_six(&mut rng);
        let p = dirichlet(&mut rng, 5);
        for t in [0.5, 1.0] {
            let rho = HermitianOperator::new(&PartyShape::qubits(3), rho_line(&six, &p, t).unwrap(), &tol()).unwrap();
            assert_eq!(numeric_rank(rho.matrix(), &tol()).unwrap(), 5);
            for j in 0..3 {
                let eigs = partial_transpose(&rho, &PartySubset::single(j)).unwrap().eigenvalues(&tol()).unwrap();
                assert!(eigs[0] >= -tol().psd_abs);
            }
        }
    }
}

#[test]
fn kernel_vector_overlaps_follow_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut cases: Vec<(SixTuple, Vec<f64>)> = vec![
        (SixTuple::new(load_example("exam-a").unwrap().products(), &tol()).unwrap(), vec![0.2; 5]),
        (SixTuple::new(load_example("vec-ex").unwrap().products(), &tol()).unwrap(), vec![0.3, 0.2, 0.2, 0.2, 0.1]),
    ];
    for _ in 0..20 {
        let six = random_real_six(&mut rng);
        let p = dirichlet(&mut rng, 5);
        cases.push((six, p));
    }
    for (six, p) in cases {
        let data = boundary_data(&six, &p, &tol()).unwrap();
        let rho = build_rho(&six, &p, &tol()).unwrap();
        let flats: Vec<CVector> = six.vectors().iter().map(|v| v.flat().clone()).collect();
        let d = sepface::SubspaceBasis::spanned_by(8, &flats, &tol()).unwrap();
        // xi spans D ∩ ker rho: the null vector of P_D rho P_D restricted to D.
        let basis = d.to_matrix();
        let restricted = basis.adjoint() * rho.matrix() * &basis;
        let (values, vectors) = hermitian_eigen(&restricted, &tol()).unwrap();
        assert!(values[0].abs() <= 1e-10 && values[1] > 1e-6);
        let xi = &basis * vectors.column(0);
        let anchor = six.distinguished_vector().flat().dotc(&xi);
        let l = data.lambda;
        for (i, z) in six.others().iter().enumerate() {
            let ratio = z.flat().dotc(&xi) / anchor;
            let expect = data.a[i] * C64::new(-(1.0 - l) / (l * p[i]), 0.0);
            assert!((ratio - expect).norm() <= 1e-8 * expect.norm().max(1.0), "{ratio} vs {expect}");
        }
    }
}

#[test]
fn lambda_is_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let six = SixTuple::new(load_example("exam-a").unwrap().products(), &tol()).unwrap();
    let a = expansion_coefficients(&six, &tol()).unwrap();
    for _ in 0..50 {
        let p = dirichlet(&mut rng, 5);
        let base = boundary_lambda(&a, &p, &tol()).unwrap();
        let perm = [3, 0, 4, 1, 2];
        let pa: Vec<C64> = perm.iter().map(|&i| a[i]).collect();
        let pp: Vec<f64> = perm.iter().map(|&i| p[i]).collect();
        assert!((boundary_lambda(&pa, &pp, &tol()).unwrap() - base).abs() <= 1e-12 * base);
    }
}

#[test]
fn distinguished_index_can_move() {
    let z = load_example("exam-a").unwrap().products();
    let six = SixTuple::with_distinguished(z, 0, &tol()).unwrap();
    let rho = build_rho(&six, &[0.2; 5], &tol()).unwrap();
    assert_eq!(verify_pptes(&rho, &tol()).unwrap().verdict, PptesVerdict::PptesEdgeRank4);
}

#[test]
fn exam_a_kernel_exceptional_weights() {
    // Maps how often a Dirichlet-uniform weight vector leaves a product vector in the
    // kernel. Only the uniform point is asserted.
    let six = SixTuple::new(load_example("exam-a").unwrap().products(), &tol()).unwrap();
    let uniform = verify_pptes(&build_rho(&six, &[0.2; 5], &tol()).unwrap(), &tol()).unwrap();
    assert_eq!(uniform.kernel_products, ProductCount::Finite(0));
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut hits = Vec::new();
    let mut edge = 0;
    for _ in 0..1000 {
        let p = dirichlet(&mut rng, 5);
        let Ok(rho) = build_rho(&six, &p, &tol()) else { continue };
        let report = verify_pptes(&rho, &tol()).unwrap();
        if report.verdict == PptesVerdict::PptesEdgeRank4 {
            edge += 1;
        }
        if !report.kernel_products.is_zero() {
            hits.push(p);
        }
    }
    println!("exam-a: {edge}/1000 edge states, {} with kernel product vectors", hits.len());
    for p in hits.iter().take(10) {
        println!("  kernel product vector at p = {p:.4?}");
    }
    assert_eq!(edge, 1000);
}
