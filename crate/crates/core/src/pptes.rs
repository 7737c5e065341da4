//! Rank-four three-qubit PPT entangled edge states.
//!
//! Six product vectors `z_1..z_6` spanning a five-dimensional subspace, with `z_6`
//! expanded as `sum a_i z_i`, give the line of states
//! `rho_t = (1 - t)|z_6><z_6| + t sum p_i |z_i><z_i|`. For `t` in `[0, 1]` it stays in a
//! simplicial face of the separable states. Past `t = 1` the rank drops to four at
//! `t = lambda = S / (S - 1)` with `S = sum |a_i|^2 / p_i`, where the state is PPT but
//! its range contains no product vector.

use serde::Serialize;

use crate::enumerate::{enumerate_in_subspace, EnumerationKind, EnumerationResult};
use crate::error::{contract, Error, Result};
use crate::linalg::{hermitian_eigen, numeric_rank, solve_in_span, CMatrix, CVector, SpanFit, SubspaceBasis, Tolerance, C64};
use crate::position::five_subset_independence;
use crate::tensor::{partial_conjugate, partial_transpose, HermitianOperator, PartyShape, PartySubset, ProductVector};

/// Agreement required between the two closed forms of `rho_lambda`.
const FORM_AGREEMENT: f64 = 1e-12;
/// Largest tolerated gap between the closed-form and bisected boundary.
const AUDIT_GAP: f64 = 1e-6;
const BISECTION_WIDTH: f64 = 1e-10;

/// Six normalized three-qubit product vectors spanning five dimensions, any five of
/// them independent, with one distinguished vector (the last by default).
#[derive(Debug, Clone)]
pub struct SixTuple {
    vectors: Vec<ProductVector>,
    distinguished: usize,
}

impl SixTuple {
    pub fn new(vectors: Vec<ProductVector>, tol: &Tolerance) -> Result<Self> {
        Self::with_distinguished(vectors, 5, tol)
    }

    pub fn with_distinguished(vectors: Vec<ProductVector>, distinguished: usize, tol: &Tolerance) -> Result<Self> {
        if vectors.len() != 6 {
            return Err(contract(format!("expected six product vectors, got {}", vectors.len())));
        }
        if distinguished >= 6 {
            return Err(contract(format!("distinguished index {distinguished} out of range")));
        }
        let shape = PartyShape::qubits(3);
        if let Some(v) = vectors.iter().find(|v| *v.shape() != shape) {
            return Err(Error::UnsupportedShape(v.shape().dims().to_vec()));
        }
        let vectors: Vec<ProductVector> = vectors.iter().map(|v| v.normalized()).collect();
        for i in 0..6 {
            for j in i + 1..6 {
                if vectors[i].projectively_equal(&vectors[j], tol) {
                    return Err(contract(format!("vectors {} and {} coincide", i + 1, j + 1)));
                }
            }
        }
        let flats: Vec<CVector> = vectors.iter().map(|v| v.flat().clone()).collect();
        let span = SubspaceBasis::spanned_by(8, &flats, tol)?;
        if span.dim() != 5 {
            return Err(contract(format!("six vectors span {} dimensions, not 5", span.dim())));
        }
        if !five_subset_independence(&vectors, tol)? {
            return Err(contract("some five of the six vectors are dependent"));
        }
        Ok(Self { vectors, distinguished })
    }

    pub fn vectors(&self) -> &[ProductVector] {
        &self.vectors
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn distinguished_vector(&self) -> &ProductVector {
        &self.vectors[self.distinguished]
    }

    /// The five non-distinguished vectors in input order.
    pub fn others(&self) -> Vec<&ProductVector> {
        (0..6).filter(|&i| i != self.distinguished).map(|i| &self.vectors[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryData {
    #[serde(serialize_with = "serialize_complex_list")]
    pub a: Vec<C64>,
    pub p: Vec<f64>,
    /// `sum |a_i|^2 / p_i`.
    pub s: f64,
    pub lambda: f64,
}

fn serialize_complex_list<S: serde::Serializer>(a: &[C64], ser: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(a.len()))?;
    for z in a {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Coefficients `a_i` with `z_dist = sum a_i z_i` over the other five (unit) vectors.
pub fn expansion_coefficients(six: &SixTuple, tol: &Tolerance) -> Result<Vec<C64>> {
    let basis: Vec<CVector> = six.others().iter().map(|v| v.flat().clone()).collect();
    match solve_in_span(&basis, six.distinguished_vector().flat(), tol)? {
        SpanFit::InSpan(a) => Ok(a),
        SpanFit::NotInSpan { residual } => Err(contract(format!(
            "distinguished vector is not in the span of the others (residual {residual:e})"
        ))),
    }
}

fn check_weights(p: &[f64]) -> Result<()> {
    if p.len() != 5 {
        return Err(contract(format!("expected five weights, got {}", p.len())));
    }
    if p.iter().any(|&x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if p.iter().any(|&x| x <= 0.0) {
        return Err(contract("weights must be positive"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(contract(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// `lambda = S / (S - 1)`, the root of `(1 - lambda) S + lambda = 0`.
pub fn boundary_lambda(a: &[C64], p: &[f64], tol: &Tolerance) -> Result<f64> {
    check_weights(p)?;
    if a.len() != 5 {
        return Err(contract(format!("expected five coefficients, got {}", a.len())));
    }
    let s = weighted_sum(a, p);
    if s <= 1.0 + tol.residual_abs {
        return Err(Error::NoPptBoundary(s));
    }
    Ok(s / (s - 1.0))
}

fn weighted_sum(a: &[C64], p: &[f64]) -> f64 {
    a.iter().zip(p).map(|(a, p)| a.norm_sqr() / p).sum()
}

pub fn boundary_data(six: &SixTuple, p: &[f64], tol: &Tolerance) -> Result<BoundaryData> {
    let a = expansion_coefficients(six, tol)?;
    let lambda = boundary_lambda(&a, p, tol)?;
    let s = weighted_sum(&a, p);
    Ok(BoundaryData {
        a,
        p: p.to_vec(),
        s,
        lambda,
    })
}

/// Rank of `{z_i^Γ(j)}` for `j = 1, 2, 3`.
pub fn gamma_span_dims(six: &SixTuple, tol: &Tolerance) -> Result<[usize; 3]> {
    let mut dims = [0; 3];
    for (j, slot) in dims.iter_mut().enumerate() {
        let mut m = CMatrix::zeros(8, 6);
        for (i, v) in six.vectors().iter().enumerate() {
            m.set_column(i, partial_conjugate(v, &PartySubset::single(j))?.flat());
        }
        *slot = numeric_rank(&m, tol)?;
    }
    Ok(dims)
}

fn projector(z: &ProductVector) -> CMatrix {
    let u = z.flat();
    u * u.adjoint()
}

fn mixture(six: &SixTuple, p: &[f64]) -> CMatrix {
    six.others()
        .iter()
        .zip(p)
        .fold(CMatrix::zeros(8, 8), |acc, (z, &w)| acc + projector(z) * C64::new(w, 0.0))
}

/// `rho_t = (1 - t)|z_dist><z_dist| + t sum p_i |z_i><z_i|`.
pub fn rho_line(six: &SixTuple, p: &[f64], t: f64) -> Result<CMatrix> {
    check_weights(p)?;
    Ok(projector(six.distinguished_vector()) * C64::new(1.0 - t, 0.0) + mixture(six, p) * C64::new(t, 0.0))
}

/// The boundary state `rho_lambda`. Refuses when some partial conjugate of the six
/// vectors spans more than five dimensions, or when a numeric bisection of the PPT
/// boundary disagrees with the closed form.
pub fn build_rho(six: &SixTuple, p: &[f64], tol: &Tolerance) -> Result<HermitianOperator> {
    let dims = gamma_span_dims(six, tol)?;
    if dims.iter().any(|&d| d != 5) {
        return Err(Error::DegenerateGammaSpan { dims });
    }
    let data = boundary_data(six, p, tol)?;
    let rho = rho_line(six, p, data.lambda)?;
    let alpha = data.s;
    let other = (mixture(six, p) * C64::new(alpha, 0.0) - projector(six.distinguished_vector())) * C64::new(1.0 / (alpha - 1.0), 0.0);
    let gap = (&rho - &other).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if gap > FORM_AGREEMENT {
        return Err(Error::NumericFailure {
            context: "boundary state".into(),
            detail: format!("closed forms differ by {gap:e}"),
        });
    }
    let numeric = lambda_bisection_check(six, p, tol)?;
    if (numeric - data.lambda).abs() > AUDIT_GAP {
        return Err(Error::LambdaAudit {
            analytic: data.lambda,
            numeric,
        });
    }
    HermitianOperator::new(&PartyShape::qubits(3), rho, tol)
}

fn transposes() -> [PartySubset; 4] {
    [
        PartySubset::empty(),
        PartySubset::single(0),
        PartySubset::single(1),
        PartySubset::single(2),
    ]
}

fn min_ppt_eigenvalue(m: CMatrix, tol: &Tolerance) -> Result<f64> {
    let rho = HermitianOperator::new(&PartyShape::qubits(3), m, tol)?;
    let mut worst = f64::INFINITY;
    for s in transposes() {
        let eigs = partial_transpose(&rho, &s)?.eigenvalues(tol)?;
        worst = worst.min(eigs[0]);
    }
    Ok(worst)
}

/// Bisects the largest `t >= 1` for which every partial transpose of `rho_t` is positive
/// (within `psd_abs`).
pub fn lambda_bisection_check(six: &SixTuple, p: &[f64], tol: &Tolerance) -> Result<f64> {
    let ppt = |t: f64| -> Result<bool> { Ok(min_ppt_eigenvalue(rho_line(six, p, t)?, tol)? >= -tol.psd_abs) };
    if !ppt(1.0)? {
        return Err(contract("the separable mixture at t = 1 is not PPT"));
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while ppt(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NumericFailure {
                context: "PPT boundary".into(),
                detail: "no upper bound found".into(),
            });
        }
    }
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if ppt(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductCount {
    Finite(usize),
    Infinite,
}

impl ProductCount {
    fn of(result: &EnumerationResult) -> Self {
        match result.kind {
            EnumerationKind::Finite => Self::Finite(result.vectors.len()),
            EnumerationKind::Infinite => Self::Infinite,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::Finite(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PptesVerdict {
    PptesEdgeRank4,
    Separable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptesReport {
    /// Ranks of `rho^{T(j)}` for `j` = none, 1, 2, 3.
    pub ranks: [usize; 4],
    pub min_eigs: [f64; 4],
    pub range_products: ProductCount,
    pub kernel_products: ProductCount,
    /// Filled in when the state was built from six product vectors.
    pub gamma_span_dims: Option<[usize; 3]>,
    pub verdict: PptesVerdict,
    pub notes: Vec<String>,
}

/// Ranks and spectra of the partial transposes of a three-qubit state and the product
/// vectors in its range and kernel.
pub fn verify_pptes(rho: &HermitianOperator, tol: &Tolerance) -> Result<PptesReport> {
    let shape = PartyShape::qubits(3);
    if *rho.shape() != shape {
        return Err(Error::UnsupportedShape(rho.shape().dims().to_vec()));
    }
    let trace = rho.trace();
    if (trace - 1.0).abs() > tol.residual_abs {
        return Err(contract(format!("state has trace {trace}, not 1")));
    }
    let mut ranks = [0; 4];
    let mut min_eigs = [0.0; 4];
    for (k, s) in transposes().iter().enumerate() {
        let t = partial_transpose(rho, s)?;
        ranks[k] = numeric_rank(t.matrix(), tol)?;
        min_eigs[k] = t.eigenvalues(tol)?[0];
    }
    let (values, vectors) = hermitian_eigen(rho.matrix(), tol)?;
    let cutoff = tol.rank_rel * values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let (mut range, mut kernel) = (Vec::new(), Vec::new());
    for (i, &v) in values.iter().enumerate() {
        let col = vectors.column(i).into_owned();
        if v.abs() > cutoff {
            range.push(col);
        } else {
            kernel.push(col);
        }
    }
    let range_basis = SubspaceBasis::spanned_by(8, &range, tol)?;
    let kernel_basis = SubspaceBasis::spanned_by(8, &kernel, tol)?;
    let range_enum = enumerate_in_subspace(&range_basis, &shape, tol)?;
    let kernel_enum = enumerate_in_subspace(&kernel_basis, &shape, tol)?;
    let range_products = ProductCount::of(&range_enum);
    let kernel_products = ProductCount::of(&kernel_enum);

    let ppt = min_eigs.iter().all(|&e| e >= -tol.psd_abs);
    let mut notes = Vec::new();
    if !ppt {
        notes.push("some partial transpose has a negative eigenvalue".to_string());
    }
    let verdict = if ranks.iter().all(|&r| r == 4) && ppt && range_products.is_zero() {
        notes.push("PPT of rank four with a product-free range".to_string());
        PptesVerdict::PptesEdgeRank4
    } else if ranks[0] == 4 && ppt && !range_products.is_zero() {
        notes.push("PPT of rank four whose range contains a product vector".to_string());
        PptesVerdict::Separable
    } else {
        if ranks.iter().any(|&r| r != 4) {
            notes.push(format!("partial transpose ranks {ranks:?} are not all four"));
        }
        match range_products {
            ProductCount::Finite(0) => notes.push("range has no product vector".to_string()),
            ProductCount::Finite(c) if ppt && c >= ranks[0] && product_states_span(rho, &range_enum.vectors, tol)? => {
                notes.push(format!(
                    "range contains {c} product vectors whose states decompose rho; separable"
                ))
            }
            ProductCount::Finite(c) => notes.push(format!("range contains {c} product vectors")),
            ProductCount::Infinite => notes.push("range contains infinitely many product vectors".to_string()),
        }
        PptesVerdict::Inconclusive
    };
    Ok(PptesReport {
        ranks,
        min_eigs,
        range_products,
        kernel_products,
        gamma_span_dims: None,
        verdict,
        notes,
    })
}

/// Whether `rho` is a nonnegative combination of the pure states of `vs` (checked when
/// those states are independent, so the combination is unique).
fn product_states_span(rho: &HermitianOperator, vs: &[ProductVector], tol: &Tolerance) -> Result<bool> {
    let states: Vec<CVector> = vs
        .iter()
        .map(|z| {
            let m = projector(&z.normalized());
            CVector::from_iterator(64, m.iter().cloned())
        })
        .collect();
    let target = CVector::from_iterator(64, rho.matrix().iter().cloned());
    match solve_in_span(&states, &target, tol) {
        Ok(SpanFit::InSpan(c)) => Ok(c.iter().all(|w| w.re >= -tol.psd_abs && w.im.abs() <= tol.residual_abs)),
        Ok(SpanFit::NotInSpan { .. }) | Err(Error::Contract(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::load_example;

    const UNIFORM: [f64; 5] = [0.2; 5];

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn six(name: &str) -> SixTuple {
        SixTuple::new(load_example(name).unwrap().products(), &tol()).unwrap()
    }

    #[test]
    fn coefficient_magnitudes() {
        let a = expansion_coefficients(&six("exam-a"), &tol()).unwrap();
        let expect = [2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 8.0 / 81.0, 125.0 / 81.0];
        for (a, e) in a.iter().zip(expect) {
            assert!((a.norm_sqr() - e).abs() < 1e-12);
        }
        let a = expansion_coefficients(&six("vec-ex"), &tol()).unwrap();
        let expect = [0.5, 0.4, 0.2, 0.4, 0.5];
        for (a, e) in a.iter().zip(expect) {
            assert!((a.norm_sqr() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_vector_rejected() {
        let mut z = load_example("exam-a").unwrap().products();
        z[5] = z[4].clone();
        assert!(SixTuple::new(z, &tol()).is_err());
    }

    #[test]
    fn single_term_lambda() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let lambda = boundary_lambda(&[one, zero, zero, zero, zero], &[0.5, 0.125, 0.125, 0.125, 0.125], &tol()).unwrap();
        assert!((lambda - 2.0).abs() < 1e-15);
        let small = [C64::new(0.1, 0.0), zero, zero, zero, zero];
        assert!(matches!(boundary_lambda(&small, &UNIFORM, &tol()), Err(Error::NoPptBoundary(_))));
    }

    #[test]
    fn uniform_lambdas() {
        let data = boundary_data(&six("exam-a"), &UNIFORM, &tol()).unwrap();
        assert!((data.s - 935.0 / 81.0).abs() < 1e-10);
        assert!((data.lambda - 935.0 / 854.0).abs() < 1e-12);
        let data = boundary_data(&six("vec-ex"), &UNIFORM, &tol()).unwrap();
        assert!((data.s - 10.0).abs() < 1e-10);
        assert!((data.lambda - 10.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_dims() {
        assert_eq!(gamma_span_dims(&six("exam-a"), &tol()).unwrap(), [5, 5, 5]);
        assert!(gamma_span_dims(&six("w-family"), &tol()).unwrap().contains(&6));
        assert!(matches!(
            build_rho(&six("w-family"), &UNIFORM, &tol()),
            Err(Error::DegenerateGammaSpan { .. })
        ));
    }

    #[test]
    fn exam_a_edge_state() {
        let s = six("exam-a");
        let rho = build_rho(&s, &UNIFORM, &tol()).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let report = verify_pptes(&rho, &tol()).unwrap();
        assert_eq!(report.ranks, [4; 4]);
        assert_eq!(report.verdict, PptesVerdict::PptesEdgeRank4);
        assert_eq!(report.kernel_products, ProductCount::Finite(0));
    }

    #[test]
    fn bisection_matches_closed_form() {
        let l = lambda_bisection_check(&six("vec-ex"), &UNIFORM, &tol()).unwrap();
        assert!((l - 10.0 / 9.0).abs() < 1e-8);
    }

    #[test]
    fn separable_mixture_is_inconclusive() {
        let s = six("exam-a");
        let m = rho_line(&s, &UNIFORM, 5.0 / 6.0).unwrap();
        let rho = HermitianOperator::new(&PartyShape::qubits(3), m, &tol()).unwrap();
        let report = verify_pptes(&rho, &tol()).unwrap();
        assert_eq!(report.ranks[0], 5);
        assert_eq!(report.range_products, ProductCount::Finite(6));
        assert_eq!(report.verdict, PptesVerdict::Inconclusive);
        assert!(report.notes.iter().any(|n| n.contains("separable")));
    }
}
