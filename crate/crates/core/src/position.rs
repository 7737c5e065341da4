//! General position, generalized unextendible product bases, independence of product
//! vectors and product states, and simplicial-face certificates.

use itertools::Itertools;
use serde::Serialize;

use crate::enumerate::{enumerate_in_subspace, EnumerationKind, EnumerationResult};
use crate::error::{contract, Error, Result};
use crate::linalg::{numeric_rank, CMatrix, CVector, SubspaceBasis, Tolerance};
use crate::tensor::{kron, PartyShape, ProductVector};

/// Largest number of labeled partitions `n^k` the exhaustive scan will visit.
const MAX_PARTITIONS: u64 = 1 << 27;

fn shared_shape(vs: &[ProductVector]) -> Result<&PartyShape> {
    let first = vs.first().ok_or_else(|| contract("empty list of product vectors"))?;
    let shape = first.shape();
    if let Some(other) = vs.iter().find(|v| v.shape() != shape) {
        return Err(Error::ShapeMismatch(format!("mixed shapes {shape} and {}", other.shape())));
    }
    Ok(shape)
}

fn columns(vectors: &[&CVector]) -> CMatrix {
    let rows = vectors.first().map_or(0, |v| v.len());
    let mut m = CMatrix::zeros(rows, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

fn rank_of(vectors: &[&CVector], tol: &Tolerance) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    numeric_rank(&columns(vectors), tol)
}

fn parallel(a: &CVector, b: &CVector, tol: &Tolerance) -> bool {
    a.dotc(b).norm_sqr() >= (1.0 - tol.dedupe_fid) * a.norm_squared() * b.norm_squared()
}

/// Local vectors of one party that fail to be independent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GpWitness {
    pub party: usize,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GpReport {
    pub is_gp: bool,
    pub witness: Option<GpWitness>,
}

/// Every choice of at most `d_j` local vectors of party `j` is independent, for all `j`.
pub fn check_general_position(vs: &[ProductVector], tol: &Tolerance) -> Result<GpReport> {
    let shape = shared_shape(vs)?;
    for (party, &d) in shape.dims().iter().enumerate() {
        for size in 2..=d.min(vs.len()) {
            for subset in (0..vs.len()).combinations(size) {
                let dependent = if size == 2 {
                    parallel(vs[subset[0]].local(party), vs[subset[1]].local(party), tol)
                } else {
                    let locals: Vec<&CVector> = subset.iter().map(|&i| vs[i].local(party)).collect();
                    rank_of(&locals, tol)? < size
                };
                if dependent {
                    return Ok(GpReport {
                        is_gp: false,
                        witness: Some(GpWitness { party, indices: subset }),
                    });
                }
            }
        }
    }
    Ok(GpReport {
        is_gp: true,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GupbReport {
    pub is_gupb: bool,
    /// `blocks[j]` lists the input indices assigned to party `j`; no block spans its party.
    pub bad_partition: Option<Vec<Vec<usize>>>,
    /// A product vector orthogonal to every input.
    pub witness_vector: Option<ProductVector>,
}

fn orthogonal_local(d: usize, block: &[&CVector], tol: &Tolerance) -> Result<CVector> {
    let span = SubspaceBasis::spanned_by(d, &block.iter().map(|v| (*v).clone()).collect::<Vec<_>>(), tol)?;
    let comp = span.complement(tol)?;
    comp.vectors()
        .first()
        .cloned()
        .ok_or_else(|| contract("block spans its party space"))
}

/// Decides the GUPB property by scanning every assignment of the inputs to parties.
/// The first failing assignment in lexicographic order (input 0 most significant) is
/// reported with a product vector orthogonal to all inputs.
pub fn check_gupb_partition(vs: &[ProductVector], tol: &Tolerance) -> Result<GupbReport> {
    let shape = shared_shape(vs)?;
    let n = shape.parties();
    let k = vs.len();
    if (n as u64).checked_pow(k as u32).is_none_or(|c| c > MAX_PARTITIONS) {
        return Err(contract(format!("{n}^{k} partitions is too many to scan")));
    }
    // spans[j][mask]: the locals of party j indexed by `mask` span C^{d_j}.
    let mut spans = Vec::with_capacity(n);
    for (party, &d) in shape.dims().iter().enumerate() {
        let mut table = vec![false; 1 << k];
        for (mask, slot) in table.iter_mut().enumerate() {
            if (mask as u32).count_ones() as usize >= d {
                let locals: Vec<&CVector> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| vs[i].local(party)).collect();
                *slot = rank_of(&locals, tol)? == d;
            }
        }
        spans.push(table);
    }
    let total = (n as u64).pow(k as u32);
    let mut labels = vec![0usize; k];
    for code in 0..total {
        let mut rest = code;
        for slot in labels.iter_mut().rev() {
            *slot = (rest % n as u64) as usize;
            rest /= n as u64;
        }
        let mut masks = vec![0usize; n];
        for (i, &j) in labels.iter().enumerate() {
            masks[j] |= 1 << i;
        }
        if (0..n).any(|j| spans[j][masks[j]]) {
            continue;
        }
        let blocks: Vec<Vec<usize>> = (0..n).map(|j| (0..k).filter(|&i| labels[i] == j).collect()).collect();
        let mut locals = Vec::with_capacity(n);
        for (party, block) in blocks.iter().enumerate() {
            let vecs: Vec<&CVector> = block.iter().map(|&i| vs[i].local(party)).collect();
            locals.push(orthogonal_local(shape.dims()[party], &vecs, tol)?);
        }
        let witness = ProductVector::new(shape, locals)?.canonical();
        return Ok(GupbReport {
            is_gupb: false,
            bad_partition: Some(blocks),
            witness_vector: Some(witness),
        });
    }
    Ok(GupbReport {
        is_gupb: true,
        bad_partition: None,
        witness_vector: None,
    })
}

/// Decides the GUPB property by enumerating product vectors in the orthogonal complement
/// of the span (two or three qubits only).
pub fn check_gupb_complement(vs: &[ProductVector], tol: &Tolerance) -> Result<GupbReport> {
    let shape = shared_shape(vs)?;
    let flats: Vec<CVector> = vs.iter().map(|v| v.flat().clone()).collect();
    let span = SubspaceBasis::spanned_by(shape.total(), &flats, tol)?;
    let comp = span.complement(tol)?;
    let found = enumerate_in_subspace(&comp, shape, tol)?;
    let witness = found.vectors.first().or(found.samples.first()).cloned();
    Ok(GupbReport {
        is_gupb: witness.is_none(),
        bad_partition: None,
        witness_vector: witness,
    })
}

/// Whether the flat vectors are linearly independent.
pub fn product_vectors_independent(vs: &[ProductVector], tol: &Tolerance) -> Result<bool> {
    if vs.is_empty() {
        return Ok(true);
    }
    shared_shape(vs)?;
    let flats: Vec<&CVector> = vs.iter().map(|v| v.flat()).collect();
    Ok(rank_of(&flats, tol)? == vs.len())
}

/// `|z><z|` for unit `z`, flattened row-major to a vector of length `d^2`.
fn state_vector(z: &ProductVector) -> CVector {
    let u = z.flat().unscale(z.norm());
    CVector::from_iterator(u.len() * u.len(), u.iter().flat_map(|&a| u.iter().map(move |&b| a * b.conj())))
}

/// Whether the pure states `|z_i><z_i|` are linearly independent as operators.
pub fn product_states_independent(vs: &[ProductVector], tol: &Tolerance) -> Result<bool> {
    if vs.is_empty() {
        return Ok(true);
    }
    shared_shape(vs)?;
    let states: Vec<CVector> = vs.iter().map(state_vector).collect();
    let refs: Vec<&CVector> = states.iter().collect();
    Ok(rank_of(&refs, tol)? == vs.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourClass {
    FiniteFace,
    InfiniteFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FourClassification {
    pub class: FourClass,
    /// Ranks of `{x_ji ⊗ x_ki}` for the party pairs (1,2), (2,3), (3,1).
    pub pairing_ranks: [usize; 3],
}

/// Four three-qubit product vectors in general position: their span has finitely many
/// product vectors exactly when some pair of parties gives four independent vectors.
pub fn classify_four_gp(vs: &[ProductVector], tol: &Tolerance) -> Result<FourClassification> {
    if vs.len() != 4 {
        return Err(contract(format!("expected four product vectors, got {}", vs.len())));
    }
    let shape = shared_shape(vs)?;
    if *shape != PartyShape::qubits(3) {
        return Err(Error::UnsupportedShape(shape.dims().to_vec()));
    }
    if !check_general_position(vs, tol)?.is_gp {
        return Err(contract("four vectors are not in general position"));
    }
    let mut pairing_ranks = [0; 3];
    for (slot, (j, k)) in pairing_ranks.iter_mut().zip([(0, 1), (1, 2), (2, 0)]) {
        let pairs: Vec<CVector> = vs.iter().map(|v| kron(v.local(j), v.local(k))).collect();
        *slot = rank_of(&pairs.iter().collect::<Vec<_>>(), tol)?;
    }
    let class = if pairing_ranks.contains(&4) {
        FourClass::FiniteFace
    } else {
        FourClass::InfiniteFamily
    };
    Ok(FourClassification { class, pairing_ranks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceVerdict {
    SimplicialFace,
    NotSimplicialFace,
    InfiniteFamily,
}

#[derive(Debug, Clone)]
pub struct FaceCertificate {
    pub k: usize,
    pub states_independent: bool,
    /// Product vectors of the span of the inputs.
    pub enumeration: EnumerationResult,
    pub verdict: FaceVerdict,
}

/// Certifies that the separable states `|z_i><z_i|` span a simplicial face: the states
/// are independent and the span of the vectors has no other product vectors.
pub fn certify_simplicial_face(vs: &[ProductVector], tol: &Tolerance) -> Result<FaceCertificate> {
    let shape = shared_shape(vs)?;
    if vs.len() > 6 {
        return Err(contract(format!("at most six product vectors, got {}", vs.len())));
    }
    let states_independent = product_states_independent(vs, tol)?;
    let flats: Vec<CVector> = vs.iter().map(|v| v.flat().clone()).collect();
    let span = SubspaceBasis::spanned_by(shape.total(), &flats, tol)?;
    let enumeration = enumerate_in_subspace(&span, shape, tol)?;
    let verdict = if enumeration.kind == EnumerationKind::Infinite {
        FaceVerdict::InfiniteFamily
    } else if states_independent && enumeration.matches(vs, tol) {
        FaceVerdict::SimplicialFace
    } else {
        FaceVerdict::NotSimplicialFace
    };
    Ok(FaceCertificate {
        k: vs.len(),
        states_independent,
        enumeration,
        verdict,
    })
}

/// All six five-element subsets of six product vectors are independent.
pub fn five_subset_independence(vs: &[ProductVector], tol: &Tolerance) -> Result<bool> {
    if vs.len() != 6 {
        return Err(contract(format!("expected six product vectors, got {}", vs.len())));
    }
    shared_shape(vs)?;
    for skip in 0..6 {
        let flats: Vec<&CVector> = (0..6).filter(|&i| i != skip).map(|i| vs[i].flat()).collect();
        if rank_of(&flats, tol)? < 5 {
            return Ok(false);
        }
    }
    Ok(true)
}
