//! Entanglement witnesses evaluated by preparing a network state, post-selecting
//! Bell outcomes and reading out a single fixed measurement.

pub mod bell;
pub mod catalog;
pub mod density;
pub mod eigen;
pub mod error;
pub mod graph;
pub mod network;
pub mod protocol;
pub mod random;
pub mod report;
pub mod seesaw;
pub mod tensor;
pub mod tolerance;
pub mod witness;
pub mod zoo;

pub use density::DensityOperator;
pub use error::{Error, Result};
pub use tensor::{ComplexMatrix, Ket, C64};
