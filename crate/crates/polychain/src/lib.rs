//! Exact polyhedral chains with coefficients in normed abelian groups.

pub mod chains;
pub mod coeff;
pub mod exact;
pub mod flatnorm;
pub mod geometry;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod lp;
pub mod slicing;
pub mod suite;
pub mod tensor;
