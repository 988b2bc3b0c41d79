//! Exact polyhedral geometry over Q.

pub mod hull;
pub mod linalg;
pub mod lp;
pub mod newton;
pub mod polytope;
