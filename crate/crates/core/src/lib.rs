//! Exact invariants of subschemes of affine space through their jet schemes.
//!
//! The crate computes, over the rationals and with no floating point on any
//! exact path:
//!
//! * truncated-arc (jet) equations of an ideal at every level, in both the
//!   derivation and the arc-coefficient presentations ([`jet`]);
//! * the Newton polytope of a monomial ideal, its polar polyhedron, and the
//!   log canonical threshold as the optimum of an exact rational linear
//!   program, with an optimal-vertex certificate ([`newton`]);
//! * jet-scheme dimensions of monomial ideals at every level via a small
//!   integer program over order strata, and the LCT recovered constructively
//!   from the jet dimension at the certificate level ([`jet_dim`]);
//! * brute-force counts of truncated arcs over small finite fields, giving
//!   dimension and LCT estimates for arbitrary ideals ([`fp`]);
//! * a seeded property harness exercising the product, intersection, bound,
//!   monotonicity and restriction identities of the LCT ([`theorems`]).

pub mod fp;
pub mod jet;
pub mod jet_dim;
pub mod newton;
pub mod parse;
pub mod poly;
pub mod simplex;
pub mod theorems;

pub use jet::{JetConvention, JetSystem};
pub use jet_dim::{JetDimReport, JetLctCertificate};
pub use newton::{LctCertificate, LctValue, PolarProgram};
pub use parse::{parse_ideal, ParseError};
pub use poly::{Ideal, Monomial, MonomialIdeal, Polynomial, Rational};
pub use theorems::{TrialConfig, Violation};
