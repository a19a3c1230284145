//! Exact computations with differential modules: square-zero matrices
//! over commutative rings, their homology, flags, flag spectral sequences
//! and the rank and class inequalities they satisfy.

pub mod error;
pub mod field;
pub mod flags;
pub mod harness;
pub mod json;
pub mod module;
pub mod rank;
pub mod ring;
pub mod spectral;

pub use error::{Error, Result};
pub use ring::{Ring, RingElem, RingMatrix, RingSpec};
