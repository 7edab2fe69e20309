//! A numerical laboratory for Bohnenblust-Hille type inequalities in Lorentz
//! sequence spaces: rearrangement norms, mixed norms over multi-indices,
//! sup norms of multilinear forms and homogeneous polynomials, real
//! interpolation functionals, lower-bound constructions, and the Bohr lift
//! to Dirichlet series.

pub mod dirichlet;
pub mod error;
pub mod forms;
pub mod interpolate;
pub mod lorentz;
pub mod lowerbounds;
pub mod mixed;
pub mod multiindex;
pub mod rng;
pub mod schema;
pub mod suite;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
