//! Discrete Helmholtz–Hodge machinery, transverse cavity modes and
//! Dicke-model reduction for 2D perfect-conductor cavities with holes.
//!
//! Units: `ε₀ = c = ħ = 1`; lengths are in the units of the domain
//! description and frequencies in units of `c / length`.

pub mod dicke;
pub mod electrostatics;
pub mod error;
pub mod geometry;
pub mod hodge;
pub mod io;
pub mod linalg;
pub mod modes;
pub mod operators;
pub mod pipeline;
pub mod sparse;

pub use error::{Error, Result};
pub use geometry::{build_grid, DomainSpec, Grid, Hole};
pub use operators::{inner, DiscreteOperators, FieldVector};
pub use sparse::SparseOperator;

/// Vacuum permittivity.
pub const EPSILON_0: f64 = 1.0;
/// Speed of light.
pub const SPEED_OF_LIGHT: f64 = 1.0;
