//! Worked examples as exact integer (Gaussian integer) fixtures.
//!
//! Vectors are stored unnormalized; floats are produced on load so that rational
//! identities (such as the squared expansion coefficients) can be checked exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};
use crate::tensor::{PartyShape, ProductVector};

/// `re + i im` with integer parts.
pub type GaussInt = (i64, i64);

/// A reduced fraction `num / den`.
pub type Rational = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub size: usize,
    /// Whether the subsets of this row contain the last (distinguished) vector.
    pub contains_last: bool,
    pub general_position: bool,
    pub gupb: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedCount {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExpectedFacts {
    pub span_dim: Option<usize>,
    /// Product vectors in the span of the fixture's product vectors.
    pub span_products: Option<ExpectedCount>,
    /// Product vectors in the orthogonal complement of that span.
    pub complement_products: Option<ExpectedCount>,
    pub subset_table: Vec<TableRow>,
    /// `|a_i|^2` for the normalized vectors, where the last vector is `sum a_i z_i`.
    pub abs_coeff_sq: Option<Vec<Rational>>,
    /// Unnormalized expansion of the last vector in the first five.
    pub dependency: Option<Vec<i64>>,
    /// Product vectors known to lie in the complement, as exact locals.
    pub complement_witnesses: Vec<Vec<Vec<GaussInt>>>,
    /// Lower bound on `max_j dim span{z_i^Γ(j)}`.
    pub min_gamma_span: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedExample {
    pub name: String,
    pub shape: PartyShape,
    /// Exact local vectors, one list per product vector.
    pub product_vectors: Vec<Vec<Vec<GaussInt>>>,
    /// Exact flat vectors that are not product vectors (e.g. complement spanning sets).
    pub auxiliary_vectors: Vec<Vec<GaussInt>>,
    pub expected: ExpectedFacts,
}

pub const NAMES: [&str; 4] = ["exam-a", "vec-ex", "w-family", "zt-family"];

fn to_c(v: &[GaussInt]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&(re, im)| C64::new(re as f64, im as f64)))
}

fn locals_to_product(shape: &PartyShape, locals: &[Vec<GaussInt>]) -> ProductVector {
    ProductVector::new(shape, locals.iter().map(|l| to_c(l)).collect()).expect("fixture locals are nonzero")
}

impl NamedExample {
    pub fn products(&self) -> Vec<ProductVector> {
        self.product_vectors
            .iter()
            .map(|l| locals_to_product(&self.shape, l))
            .collect()
    }

    pub fn auxiliary(&self) -> Vec<CVector> {
        self.auxiliary_vectors.iter().map(|v| to_c(v)).collect()
    }

    pub fn complement_witnesses(&self) -> Vec<ProductVector> {
        self.expected
            .complement_witnesses
            .iter()
            .map(|l| locals_to_product(&self.shape, l))
            .collect()
    }
}

fn r(x: i64) -> GaussInt {
    (x, 0)
}

fn real(xs: &[i64]) -> Vec<GaussInt> {
    xs.iter().map(|&x| r(x)).collect()
}

const E1: [i64; 2] = [1, 0];
const E2: [i64; 2] = [0, 1];

fn pv(locals: [&[i64]; 3]) -> Vec<Vec<GaussInt>> {
    locals.iter().map(|l| real(l)).collect()
}

/// The three-qubit unextendible product basis `z1..z4`, completed by `z5 = (2,1)^⊗3` and
/// `z6 = e1 ⊗ e1 ⊗ e1` to the six product vectors of a five-dimensional subspace.
pub fn exam_a() -> NamedExample {
    let product_vectors = vec![
        pv([&E1, &E2, &[1, 1]]),
        pv([&E2, &[1, 1], &E1]),
        pv([&[1, 1], &E1, &E2]),
        pv([&[1, -1], &[1, -1], &[1, -1]]),
        pv([&[2, 1], &[2, 1], &[2, 1]]),
        pv([&E1, &E1, &E1]),
    ];
    let auxiliary_vectors = vec![
        real(&[0, 0, 1, -1, 0, 0, 0, -2]),
        real(&[0, 0, 0, 0, 1, 0, -1, -2]),
        real(&[0, 1, 0, 0, 0, -1, 0, -2]),
        real(&[1, 0, 0, 0, 0, 0, 0, 1]),
    ];
    let row = |size, contains_last, general_position, gupb| TableRow {
        size,
        contains_last,
        general_position,
        gupb,
    };
    NamedExample {
        name: "exam-a".into(),
        shape: PartyShape::qubits(3),
        product_vectors,
        auxiliary_vectors,
        expected: ExpectedFacts {
            span_dim: Some(5),
            span_products: Some(ExpectedCount::Finite(6)),
            complement_products: Some(ExpectedCount::Finite(0)),
            subset_table: vec![
                row(6, true, false, true),
                row(5, false, true, true),
                row(5, true, false, true),
                row(4, false, true, true),
                row(4, true, false, false),
            ],
            abs_coeff_sq: Some(vec![(2, 9), (2, 9), (2, 9), (8, 81), (125, 81)]),
            dependency: None,
            complement_witnesses: Vec::new(),
            min_gamma_span: None,
        },
    }
}

/// Six product vectors spanning five dimensions with `z1 + z3 + z5 = z2 + z4 + z6`.
pub fn vec_ex() -> NamedExample {
    NamedExample {
        name: "vec-ex".into(),
        shape: PartyShape::qubits(3),
        product_vectors: vec![
            pv([&E2, &[1, 2], &E1]),
            pv([&E2, &[1, 1], &[1, 1]]),
            pv([&E1, &E2, &[1, -1]]),
            pv([&[1, 1], &E2, &[1, 1]]),
            pv([&[1, 2], &E1, &E2]),
            pv([&[1, 1], &[1, -2], &E2]),
        ],
        auxiliary_vectors: Vec::new(),
        expected: ExpectedFacts {
            span_dim: Some(5),
            span_products: Some(ExpectedCount::Finite(6)),
            complement_products: Some(ExpectedCount::Finite(1)),
            subset_table: Vec::new(),
            abs_coeff_sq: Some(vec![(1, 2), (2, 5), (1, 5), (2, 5), (1, 2)]),
            dependency: Some(vec![1, -1, 1, -1, 1]),
            complement_witnesses: vec![pv([&E1, &E1, &E1])],
            min_gamma_span: None,
        },
    }
}

/// Six complex product vectors spanning five dimensions whose partial conjugates do not.
pub fn w_family() -> NamedExample {
    let l = |a: GaussInt, b: GaussInt| vec![a, b];
    let one = (1, 0);
    let (i, mi, m1) = ((0, 1), (0, -1), (-1, 0));
    NamedExample {
        name: "w-family".into(),
        shape: PartyShape::qubits(3),
        product_vectors: vec![
            vec![l(one, one), l(one, one), l(one, one)],
            vec![l(one, i), l(one, m1), l(one, mi)],
            vec![l(one, m1), l(one, one), l(one, m1)],
            vec![l(one, mi), l(one, m1), l(one, i)],
            vec![l(one, (0, 0)), l(one, (0, 0)), l(one, (0, 0))],
            vec![l((0, 0), one), l(one, (0, 0)), l((0, 0), one)],
        ],
        auxiliary_vectors: Vec::new(),
        expected: ExpectedFacts {
            span_dim: Some(5),
            span_products: Some(ExpectedCount::Finite(6)),
            complement_products: Some(ExpectedCount::Finite(0)),
            subset_table: Vec::new(),
            abs_coeff_sq: None,
            dependency: None,
            complement_witnesses: Vec::new(),
            min_gamma_span: Some(6),
        },
    }
}

/// `(1, t)^⊗3` for each `t`.
pub fn zt_family(ts: &[i64]) -> NamedExample {
    let product_vectors = ts.iter().map(|&t| pv([&[1, t], &[1, t], &[1, t]])).collect();
    let distinct = {
        let mut v = ts.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    NamedExample {
        name: "zt-family".into(),
        shape: PartyShape::qubits(3),
        product_vectors,
        auxiliary_vectors: Vec::new(),
        expected: ExpectedFacts {
            span_dim: Some(distinct.min(4)),
            span_products: Some(if distinct >= 4 {
                ExpectedCount::Infinite
            } else {
                ExpectedCount::Finite(distinct)
            }),
            ..ExpectedFacts::default()
        },
    }
}

/// Loads a fixture by name. `zt-family` takes an optional comma-separated parameter
/// list, e.g. `zt-family:0,1,2,3`; the default is `t = 1, 2, 3, 4`.
pub fn load_example(name: &str) -> Result<NamedExample> {
    match name {
        "exam-a" => Ok(exam_a()),
        "vec-ex" => Ok(vec_ex()),
        "w-family" => Ok(w_family()),
        "zt-family" => Ok(zt_family(&[1, 2, 3, 4])),
        other => {
            let params = other
                .strip_prefix("zt-family:")
                .ok_or_else(|| Error::UnknownExample(other.into()))?;
            let ts: std::result::Result<Vec<i64>, _> = params.split(',').map(|t| t.trim().parse::<i64>()).collect();
            match ts {
                Ok(ts) if !ts.is_empty() => Ok(zt_family(&ts)),
                _ => Err(Error::UnknownExample(other.into())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exam_a_fifth_vector() {
        let ex = load_example("exam-a").unwrap();
        let z5 = &ex.products()[4];
        let expect: Vec<f64> = vec![8.0, 4.0, 4.0, 2.0, 4.0, 2.0, 2.0, 1.0];
        assert_eq!(z5.flat().iter().map(|z| z.re).collect::<Vec<_>>(), expect);
    }

    #[test]
    fn vec_ex_first_vector() {
        let ex = load_example("vec-ex").unwrap();
        assert_eq!(ex.product_vectors[0], vec![real(&E2), real(&[1, 2]), real(&E1)]);
    }

    #[test]
    fn w_family_second_vector() {
        let ex = load_example("w-family").unwrap();
        assert_eq!(ex.product_vectors[1][0], vec![(1, 0), (0, 1)]);
    }

    #[test]
    fn zt_parameters() {
        let ex = load_example("zt-family:0,1,2").unwrap();
        assert_eq!(ex.product_vectors.len(), 3);
        assert_eq!(ex.expected.span_products, Some(ExpectedCount::Finite(3)));
        assert_eq!(load_example("zt-family").unwrap().expected.span_products, Some(ExpectedCount::Infinite));
        assert!(matches!(load_example("nope"), Err(Error::UnknownExample(_))));
        assert!(load_example("zt-family:a").is_err());
    }
}
