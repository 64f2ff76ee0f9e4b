//! Exact computations on the secondary Burniat surface with K² = 5 and a
//! checker for proof certificates of its global log canonical thresholds.

pub mod linarith;
pub mod poly;
pub mod rational;
pub mod cone;
pub mod picard;
pub mod surface;
pub mod bicover;
pub mod lct;
pub mod certs;
