//! JSON file formats. Complex numbers are `[re, im]` pairs and flat vectors use the
//! lexicographic basis order with party 1 most significant.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sepface::{CMatrix, CVector, HermitianOperator, PartyShape, ProductVector, Tolerance, C64};

use crate::CliError;

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    /// One local vector per party.
    pub locals: Vec<Vec<Complex>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceMode {
    Span,
    Complement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    pub mode: SubspaceMode,
}

/// Product vectors, optionally with plain flat vectors that join them in spanning a
/// subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub shape: Vec<usize>,
    #[serde(default)]
    pub product_vectors: Vec<ProductEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<Vec<Complex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<SubspaceSpec>,
}

/// A `d x d` operator, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub shape: Vec<usize>,
    pub matrix: Vec<Vec<Complex>>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    // serde_json reports line and column for syntax and type errors.
    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn to_c(z: &Complex, field: &str) -> Result<C64, CliError> {
    if z.iter().all(|x| x.is_finite()) {
        Ok(C64::new(z[0], z[1]))
    } else {
        Err(input(format!("{field}: non-finite entry")))
    }
}

fn to_vector(entries: &[Complex], len: usize, field: &str) -> Result<CVector, CliError> {
    if entries.len() != len {
        return Err(input(format!("{field}: expected {len} entries, got {}", entries.len())));
    }
    let zs = entries
        .iter()
        .enumerate()
        .map(|(i, z)| to_c(z, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CVector::from_vec(zs))
}

pub fn complex(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn entries(v: &CVector) -> Vec<Complex> {
    v.iter().map(|&z| complex(z)).collect()
}

pub fn product_entry(z: &ProductVector) -> ProductEntry {
    ProductEntry {
        locals: z.locals().iter().map(entries).collect(),
    }
}

fn parse_shape(dims: &[usize]) -> Result<PartyShape, CliError> {
    PartyShape::new(dims.to_vec()).map_err(|e| input(format!("shape: {e}")))
}

impl VectorFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn from_products(shape: &PartyShape, vs: &[ProductVector]) -> Self {
        Self {
            shape: shape.dims().to_vec(),
            product_vectors: vs.iter().map(product_entry).collect(),
            vectors: Vec::new(),
            subspace: None,
        }
    }

    pub fn party_shape(&self) -> Result<PartyShape, CliError> {
        parse_shape(&self.shape)
    }

    pub fn products(&self) -> Result<Vec<ProductVector>, CliError> {
        let shape = self.party_shape()?;
        self.product_vectors
            .iter()
            .enumerate()
            .map(|(i, entry)| {
                let field = format!("product_vectors[{i}]");
                if entry.locals.len() != shape.parties() {
                    return Err(input(format!(
                        "{field}.locals: expected {} parties, got {}",
                        shape.parties(),
                        entry.locals.len()
                    )));
                }
                let locals = entry
                    .locals
                    .iter()
                    .zip(shape.dims())
                    .enumerate()
                    .map(|(j, (l, &d))| to_vector(l, d, &format!("{field}.locals[{j}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                ProductVector::new(&shape, locals).map_err(|e| input(format!("{field}: {e}")))
            })
            .collect()
    }

    /// Flat vectors of the product vectors followed by the plain `vectors`.
    pub fn spanning_set(&self) -> Result<Vec<CVector>, CliError> {
        let shape = self.party_shape()?;
        let mut out: Vec<CVector> = self.products()?.iter().map(|z| z.flat().clone()).collect();
        for (i, v) in self.vectors.iter().enumerate() {
            out.push(to_vector(v, shape.total(), &format!("vectors[{i}]"))?);
        }
        Ok(out)
    }
}

impl StateFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn from_operator(rho: &HermitianOperator) -> Self {
        let m = rho.matrix();
        Self {
            shape: rho.shape().dims().to_vec(),
            matrix: (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| complex(m[(r, c)])).collect()).collect(),
        }
    }

    pub fn operator(&self, tol: &Tolerance) -> Result<HermitianOperator, CliError> {
        let shape = parse_shape(&self.shape)?;
        let d = shape.total();
        if self.matrix.len() != d {
            return Err(input(format!("matrix: expected {d} rows, got {}", self.matrix.len())));
        }
        let rows = self
            .matrix
            .iter()
            .enumerate()
            .map(|(r, row)| to_vector(row, d, &format!("matrix[{r}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let m = CMatrix::from_fn(d, d, |r, c| rows[r][c]);
        HermitianOperator::new(&shape, m, tol).map_err(|e| input(format!("matrix: {e}")))
    }
}
