//! Operator theory on semi-Hilbertian spaces, computed.
//!
//! A positive semidefinite weight `A` induces the semi-inner product
//! `⟨x, y⟩_A = y* A x`. This crate builds that structure for finite matrices
//! and for lazily-defined infinite diagonal models, and computes A-adjoints,
//! A-normality, A-numerical ranges and the A-spectra of operators acting on it.
//!
//! Finite pairs are handled through the compression `M = Λ^{1/2} Q* T Q Λ^{−1/2}`
//! of `T` to the range of `A` (with `A = Q Λ Q*`), which intertwines with `T`
//! and carries every A-quantity over to a classical one.

pub mod cso;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod model;
pub mod numrange;
pub mod operator;
pub mod space;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{c, ComplexMatrix, MatrixFile, C64};
pub use operator::SemiHilbertOperator;
pub use space::SemiHilbertSpace;
