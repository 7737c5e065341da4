//! Acceptance criteria. Each check prints one PASS/FAIL line; a test fails if any of its
//! checks fails.

mod common;

use std::time::Instant;

use common::*;
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepface::linalg::{numeric_rank, CMatrix};
use sepface::position::{
    check_general_position, check_gupb_complement, check_gupb_partition, classify_four_gp, five_subset_independence,
    product_states_independent, product_vectors_independent, FourClass,
};
use sepface::pptes::{
    boundary_data, build_rho, gamma_span_dims, lambda_bisection_check, verify_pptes, PptesVerdict, ProductCount, SixTuple,
};
use sepface::registry::load_example;
use sepface::tensor::{partial_conjugate, partial_transpose, pure_state};
use sepface::{
    enumerate_in_subspace, oracle_grid_search, Error, HermitianOperator, PartyShape, PartySubset, ProductVector,
    SubspaceBasis, Tolerance, C64,
};

const UNIFORM: [f64; 5] = [0.2; 5];

fn tol() -> Tolerance {
    Tolerance::default()
}

struct Checks {
    criterion: &'static str,
    failed: Vec<String>,
}

impl Checks {
    fn new(criterion: &'static str) -> Self {
        Self {
            criterion,
            failed: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, ok: bool, detail: impl std::fmt::Display) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {what}: {detail}", self.criterion);
        if !ok {
            self.failed.push(what.to_string());
        }
    }

    fn finish(self) {
        assert!(self.failed.is_empty(), "{} failed: {:?}", self.criterion, self.failed);
    }
}

fn flats(vs: &[ProductVector]) -> CMatrix {
    let mut m = CMatrix::zeros(vs[0].flat().len(), vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v.flat());
    }
    m
}

fn random_gp(rng: &mut ChaCha8Rng, shape: &PartyShape, k: usize) -> Vec<ProductVector> {
    loop {
        let vs: Vec<_> = (0..k).map(|_| random_product(rng, shape)).collect();
        if check_general_position(&vs, &tol()).unwrap().is_gp {
            return vs;
        }
    }
}

fn six_of(name: &str) -> SixTuple {
    SixTuple::new(load_example(name).unwrap().products(), &tol()).unwrap()
}

#[test]
fn criterion_01_example_reproduction() {
    let mut c = Checks::new("1 exam-a");
    let start = Instant::now();
    let ex = load_example("exam-a").unwrap();
    let z = ex.products();
    let span = numeric_rank(&flats(&z), &tol()).unwrap();
    c.check("span of z1..z6", span == 5, format!("dim {span}"));

    let w = ex.auxiliary();
    let d = SubspaceBasis::spanned_by(8, &w[..3], &tol()).unwrap().complement(&tol()).unwrap();
    let found = enumerate_in_subspace(&d, &ex.shape, &tol()).unwrap();
    let gap = z
        .iter()
        .map(|zi| found.vectors.iter().map(|f| 1.0 - f.fidelity(zi)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    c.check(
        "complement of w1..w3 has exactly z1..z6",
        found.count() == Some(6) && gap <= 1e-8,
        format!("count {:?}, worst fidelity gap {gap:.1e}", found.count()),
    );

    for row in &ex.expected.subset_table {
        let mut subsets = 0;
        let mut mismatches = Vec::new();
        for subset in (0..6).combinations(row.size) {
            if subset.contains(&5) != row.contains_last {
                continue;
            }
            subsets += 1;
            let vs: Vec<_> = subset.iter().map(|&i| z[i].clone()).collect();
            let gp = check_general_position(&vs, &tol()).unwrap().is_gp;
            let gupb_p = check_gupb_partition(&vs, &tol()).unwrap().is_gupb;
            let gupb_c = check_gupb_complement(&vs, &tol()).unwrap().is_gupb;
            if gp != row.general_position || gupb_p != row.gupb || gupb_c != row.gupb {
                mismatches.push(format!("{subset:?}: gp {gp} gupb {gupb_p}/{gupb_c}"));
            }
        }
        c.check(
            &format!(
                "table row size {} z6 {} GP {} GUPB {}",
                row.size,
                if row.contains_last { "in" } else { "out" },
                row.general_position,
                row.gupb
            ),
            mismatches.is_empty() && subsets > 0,
            format!("{subsets} subsets, mismatches {mismatches:?}"),
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check("runtime under 5 s", elapsed < 5.0, format!("{elapsed:.3} s"));
    c.finish();
}

#[test]
fn criterion_02_alpha_closed_forms() {
    let mut c = Checks::new("2 alpha");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let forms: [(&str, [f64; 5]); 2] = [
        ("exam-a", [2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 8.0 / 81.0, 125.0 / 81.0]),
        ("vec-ex", [0.5, 0.4, 0.2, 0.4, 0.5]),
    ];
    for (name, numerators) in forms {
        let six = six_of(name);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let p = dirichlet(&mut rng, 5);
            let s = boundary_data(&six, &p, &tol()).unwrap().s;
            let closed: f64 = numerators.iter().zip(&p).map(|(n, p)| n / p).sum();
            worst = worst.max((s - closed).abs() / closed);
        }
        c.check(&format!("{name} S matches closed form"), worst <= 1e-10, format!("max rel err {worst:.1e}"));
    }
    c.finish();
}

fn edge_state_checks(c: &mut Checks, name: &str, p: &[f64]) -> Option<sepface::pptes::PptesReport> {
    let six = six_of(name);
    let rho = match build_rho(&six, p, &tol()) {
        Ok(r) => r,
        Err(e) => {
            c.check(&format!("{name} build"), false, e);
            return None;
        }
    };
    c.check(&format!("{name} trace"), (rho.trace() - 1.0).abs() <= 1e-12, format!("{:.15}", rho.trace()));
    let report = verify_pptes(&rho, &tol()).unwrap();
    c.check(&format!("{name} partial transpose ranks"), report.ranks == [4; 4], format!("{:?}", report.ranks));
    let min = report.min_eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    c.check(&format!("{name} min eigenvalue"), min >= -1e-10, format!("{min:.2e}"));
    c.check(
        &format!("{name} range product-free"),
        report.range_products == ProductCount::Finite(0),
        format!("{:?}", report.range_products),
    );
    c.check(
        &format!("{name} verdict"),
        report.verdict == PptesVerdict::PptesEdgeRank4,
        format!("{:?}", report.verdict),
    );
    let analytic = boundary_data(&six, p, &tol()).unwrap().lambda;
    let numeric = lambda_bisection_check(&six, p, &tol()).unwrap();
    c.check(
        &format!("{name} lambda vs bisection"),
        (analytic - numeric).abs() <= 1e-8,
        format!("{analytic:.12} vs {numeric:.12}"),
    );
    Some(report)
}

#[test]
fn criterion_03_edge_states() {
    let mut c = Checks::new("3 pptes");
    let start = Instant::now();
    if let Some(r) = edge_state_checks(&mut c, "exam-a", &UNIFORM) {
        c.check("exam-a kernel product-free", r.kernel_products.is_zero(), format!("{:?}", r.kernel_products));
    }
    edge_state_checks(&mut c, "vec-ex", &UNIFORM);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let p = dirichlet(&mut rng, 5);
        edge_state_checks(&mut c, "vec-ex", &p);
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check("runtime under 10 s", elapsed < 10.0, format!("{elapsed:.3} s"));
    c.finish();
}

#[test]
fn criterion_03_vec_ex_kernel_product_free() {
    let mut c = Checks::new("3 vec-ex kernel");
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let six = six_of("vec-ex");
    let mut weights = vec![UNIFORM.to_vec()];
    weights.extend((0..10).map(|_| dirichlet(&mut rng, 5)));
    for p in &weights {
        let rho = build_rho(&six, p, &tol()).unwrap();
        let report = verify_pptes(&rho, &tol()).unwrap();
        c.check(
            "vec-ex kernel has no product vector",
            report.kernel_products.is_zero(),
            format!("p = {p:.3?}: {:?}", report.kernel_products),
        );
    }
    c.finish();
}

#[test]
fn criterion_04_degenerate_family() {
    let mut c = Checks::new("4 w-family");
    let six = six_of("w-family");
    let dims = gamma_span_dims(&six, &tol()).unwrap();
    c.check("some partial conjugate spans 6", dims.contains(&6), format!("{dims:?}"));
    let built = build_rho(&six, &UNIFORM, &tol());
    c.check(
        "build refuses",
        matches!(built, Err(Error::DegenerateGammaSpan { .. })),
        format!("{:?}", built.err()),
    );
    c.finish();
}

#[test]
fn criterion_05_independence_and_faces() {
    let mut c = Checks::new("5 general position sets");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [3, 4] {
        let shape = PartyShape::qubits(n);
        let k = shape.local_excess() + 1;
        let bad = (0..500)
            .filter(|_| !product_vectors_independent(&random_gp(&mut rng, &shape, k), &tol()).unwrap())
            .count();
        c.check(&format!("{k} GP vectors over {shape} independent"), bad == 0, format!("{bad}/500 dependent"));
    }
    let q3 = PartyShape::qubits(3);
    let mut bad = 0;
    for _ in 0..200 {
        let vs = random_gp(&mut rng, &q3, 3);
        let found = enumerate_in_subspace(&span_of(&vs), &q3, &tol()).unwrap();
        if !found.matches(&vs, &tol()) {
            bad += 1;
        }
    }
    c.check("span of 3 GP vectors has exactly them", bad == 0, format!("{bad}/200 mismatched"));
    c.finish();
}

#[test]
fn criterion_06_state_independence_boundary() {
    let mut c = Checks::new("6 state independence boundary");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let q3 = PartyShape::qubits(3);
    let bad = (0..200)
        .filter(|_| !product_states_independent(&random_gp(&mut rng, &q3, 7), &tol()).unwrap())
        .count();
    c.check("7 GP product states independent", bad == 0, format!("{bad}/200 dependent"));
    let zt = load_example("zt-family:0,1,2,3,4,5,6,7").unwrap().products();
    let dependent = !product_states_independent(&zt, &tol()).unwrap();
    let mut states = CMatrix::zeros(64, 8);
    for (j, z) in zt.iter().enumerate() {
        let p = pure_state(&z.normalized(), &tol()).unwrap();
        states.set_column(j, &sepface::CVector::from_iterator(64, p.matrix().iter().cloned()));
    }
    let rank = numeric_rank(&states, &tol()).unwrap();
    c.check("z_t states t=0..7 dependent, span 7", dependent && rank == 7, format!("rank {rank}"));
    c.finish();
}

#[test]
fn criterion_07_generic_count() {
    let mut c = Checks::new("7 generic count");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q3 = PartyShape::qubits(3);
    let (mut wrong_count, mut dependent_five, mut dependent_states) = (0, 0, 0);
    for _ in 0..200 {
        let found = enumerate_in_subspace(&random_subspace(&mut rng, 8, 5), &q3, &tol()).unwrap();
        if found.count() != Some(6) {
            wrong_count += 1;
            continue;
        }
        if !five_subset_independence(&found.vectors, &tol()).unwrap() {
            dependent_five += 1;
        }
        if !product_states_independent(&found.vectors, &tol()).unwrap() {
            dependent_states += 1;
        }
    }
    c.check("exactly 6 product vectors", wrong_count == 0, format!("{wrong_count}/200 wrong"));
    c.check("every 5-subset independent", dependent_five == 0, format!("{dependent_five}/200 failed"));
    c.check("six states independent", dependent_states == 0, format!("{dependent_states}/200 failed"));
    c.finish();
}

#[test]
fn criterion_08_four_vector_classes() {
    let mut c = Checks::new("8 four-vector classification");
    let zt = load_example("zt-family").unwrap().products();
    let cls = classify_four_gp(&zt, &tol()).unwrap();
    c.check(
        "z_t quadruple infinite with ranks 3",
        cls.class == FourClass::InfiniteFamily && cls.pairing_ranks == [3, 3, 3],
        format!("{:?} {:?}", cls.class, cls.pairing_ranks),
    );
    let z = load_example("exam-a").unwrap().products();
    let upb = &z[..4];
    let cls = classify_four_gp(upb, &tol()).unwrap();
    let found = enumerate_in_subspace(&span_of(upb), &PartyShape::qubits(3), &tol()).unwrap();
    c.check(
        "UPB finite face with exactly 4",
        cls.class == FourClass::FiniteFace && found.matches(upb, &tol()),
        format!("{:?} {:?}, count {:?}", cls.class, cls.pairing_ranks, found.count()),
    );
    c.finish();
}

#[test]
fn criterion_09_cross_oracle() {
    let mut c = Checks::new("9 cross-oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q3 = PartyShape::qubits(3);
    for dim in [3, 4, 5] {
        let mut disagree = Vec::new();
        let mut nonempty = 0;
        for i in 0..200 {
            // Half plain random subspaces, half spanned by planted product vectors plus one
            // random direction.
            let basis = if i % 2 == 0 {
                random_subspace(&mut rng, 8, dim)
            } else {
                let mut vs: Vec<_> = (0..dim - 1).map(|_| random_product(&mut rng, &q3).flat().clone()).collect();
                vs.push(gaussian(&mut rng, 8));
                SubspaceBasis::spanned_by(8, &vs, &tol()).unwrap()
            };
            let found = enumerate_in_subspace(&basis, &q3, &tol()).unwrap();
            let oracle = oracle_grid_search(&basis, &q3, 3, &tol()).unwrap();
            if !found.vectors.is_empty() {
                nonempty += 1;
            }
            if !same_projective_set(&found.vectors, &oracle, &tol()) {
                disagree.push((i, found.vectors.len(), oracle.len()));
            }
        }
        c.check(
            &format!("dim {dim} agreement"),
            disagree.is_empty(),
            format!("{nonempty}/200 nonempty, disagreements {disagree:?}"),
        );
    }
    c.finish();
}

fn random_state(rng: &mut ChaCha8Rng, shape: &PartyShape) -> HermitianOperator {
    let d = shape.total();
    let mut g = CMatrix::zeros(d, d);
    for j in 0..d {
        g.set_column(j, &gaussian(rng, d));
    }
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    HermitianOperator::new(shape, m / C64::new(tr, 0.0), &tol()).unwrap()
}

fn all_subsets(n: usize) -> Vec<PartySubset> {
    (0..1usize << n)
        .map(|mask| PartySubset::new((0..n).filter(|j| mask >> j & 1 == 1)))
        .collect()
}

#[test]
fn criterion_10_involutions() {
    let mut c = Checks::new("10 identities");
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let q3 = PartyShape::qubits(3);
    let subsets = all_subsets(3);
    let (mut tt, mut gg, mut intertwine, mut spectral) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..200 {
        let s = &subsets[i % subsets.len()];
        let rho = random_state(&mut rng, &q3);
        let twice = partial_transpose(&partial_transpose(&rho, s).unwrap(), s).unwrap();
        tt = tt.max((twice.matrix() - rho.matrix()).amax_abs());

        let z = random_product(&mut rng, &q3).normalized();
        let back = partial_conjugate(&partial_conjugate(&z, s).unwrap(), s).unwrap();
        gg = gg.max((back.flat() - z.flat()).amax_abs());

        let lhs = pure_state(&partial_conjugate(&z, s).unwrap(), &tol()).unwrap();
        let rhs = partial_transpose(&pure_state(&z, &tol()).unwrap(), s).unwrap();
        intertwine = intertwine.max((lhs.matrix() - rhs.matrix()).amax_abs());

        let a = partial_transpose(&rho, s).unwrap().eigenvalues(&tol()).unwrap();
        let b = partial_transpose(&rho, &s.complement(3)).unwrap().eigenvalues(&tol()).unwrap();
        spectral = spectral.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    c.check("T(S) twice is identity", tt <= 1e-10, format!("max dev {tt:.1e}"));
    c.check("Γ(S) twice is identity", gg <= 1e-10, format!("max dev {gg:.1e}"));
    c.check("pure state of Γ(S) is T(S) of pure state", intertwine <= 1e-10, format!("max dev {intertwine:.1e}"));
    c.check("T(S) and T(S^c) share spectra", spectral <= 1e-10, format!("max dev {spectral:.1e}"));
    c.finish();
}

trait AmaxAbs {
    fn amax_abs(&self) -> f64;
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::Storage<C64, R, C>> AmaxAbs for nalgebra::Matrix<C64, R, C, S> {
    fn amax_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
