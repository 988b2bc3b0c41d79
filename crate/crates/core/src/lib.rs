//! Manin-type asymptotics for rational points on projective toric varieties
//! counted by generalized polynomial heights.
//!
//! The pipeline runs from a relation matrix to minimal lattice generators,
//! their Newton polyhedron and diagonal face, the archimedean volume constant,
//! the regularized Euler product, and finally the predicted leading constant,
//! which can be compared against brute-force point counts.

pub mod counting;
pub mod error;
pub mod euler;
pub mod generators;
pub mod manin;
pub mod geometry;
pub mod polynomial;
pub mod problem;
pub mod quadrature;
pub mod rational;
pub mod volume;

pub use error::{Error, Result};
