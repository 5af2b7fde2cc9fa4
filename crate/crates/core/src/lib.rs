//! Maximum information transfer capacity (ITC) of spin networks in the
//! single-excitation subspace, the geometry it induces on the nodes, and
//! bang-bang control that lifts the free-evolution cap.
//!
//! Node indices are zero-based throughout the library.

pub mod cluster;
pub mod control;
mod eig;
pub mod error;
pub mod geometry;
pub mod itc;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
pub use itc::{itc_matrix, ItcMatrix};
pub use model::{CouplingKind, SpinNetwork, SymmetricMatrix};
pub use spectral::{eigendecompose, Spectrum, UnitaryMatrix};
