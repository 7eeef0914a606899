//! Exact computation of pre-Bloch invariants of spherical CR triangulations.

pub mod ball;
pub mod catalog;
pub mod crgeom;
pub mod dilog;
pub mod error;
pub mod format;
pub mod numfield;
pub mod prebloch;
pub mod simplicial;
pub mod wedge;

pub use error::{Error, Result};
pub use numfield::{FieldElement, NumberField};
