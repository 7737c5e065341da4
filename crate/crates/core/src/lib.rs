//! Analysis of finite sets of multipartite product vectors.
//!
//! The crate covers four layers:
//!
//! - [`linalg`]: small dense complex linear algebra (rank, kernels, Hermitian spectra,
//!   polynomial roots) on top of `nalgebra`.
//! - [`tensor`]: product vectors in lexicographic (party 1 most significant) order,
//!   partial transposes and partial conjugates.
//! - [`position`] and [`enumerate`]: general position, generalized unextendible product
//!   bases, linear independence, and exact enumeration of product vectors inside
//!   subspaces of two- and three-qubit spaces.
//! - [`pptes`]: rank-four three-qubit PPT entangled edge states built from six product
//!   vectors spanning a five-dimensional subspace, and their verification.
//!
//! [`registry`] ships the worked examples as exact integer fixtures.
//!
//! ```
//! use sepface::pptes::{build_rho, verify_pptes, PptesVerdict, SixTuple};
//! use sepface::registry::load_example;
//! use sepface::Tolerance;
//!
//! let tol = Tolerance::default();
//! let six = SixTuple::new(load_example("exam-a")?.products(), &tol)?;
//! let rho = build_rho(&six, &[0.2; 5], &tol)?;
//! assert_eq!(verify_pptes(&rho, &tol)?.verdict, PptesVerdict::PptesEdgeRank4);
//! # Ok::<(), sepface::Error>(())
//! ```

pub mod enumerate;
pub mod error;
pub mod linalg;
pub mod position;
pub mod pptes;
pub mod registry;
pub mod tensor;

pub use enumerate::{enumerate_in_subspace, membership_residual, oracle_grid_search, EnumerationKind, EnumerationResult};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, SubspaceBasis, Tolerance, C64};
pub use tensor::{HermitianOperator, PartyShape, PartySubset, ProductVector};
