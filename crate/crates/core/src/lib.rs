//! Exact computations around toric exponential sums over finite fields:
//! Newton polyhedra and their weight functions, Poincaré series, Hodge bases
//! of the graded Jacobian quotient, fiber L-polynomials by direct character
//! sums, relative polytopes of deformation families, truncated Euler products
//! of family L-functions under linear-algebra operations, and the associated
//! degree / total-degree / divisibility / Newton-polygon bound calculators.
//!
//! All arithmetic is exact: rationals are arbitrary precision, cyclotomic
//! integers live in `Z[zeta_p]` reduced modulo the p-th cyclotomic polynomial,
//! and p-adic valuations are computed through field norms.

pub mod cyclotomic;
pub mod cycpoly;
pub mod euler;
pub mod expsum;
pub mod family;
pub mod ffield;
pub mod intlin;
pub mod linop;
pub mod polytope;
pub mod problem;
pub mod rat;
pub mod report;
pub mod toric;

pub use cyclotomic::{CycInt, CycRat, OrdVal, PadicVal};
pub use rat::Rat;
