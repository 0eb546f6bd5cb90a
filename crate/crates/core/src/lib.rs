pub mod billiard;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod orbits;
pub mod spectra;
pub mod verifier;

pub use error::{Error, Result};
pub use geometry::{BoundaryCurve, DomainSpec};
