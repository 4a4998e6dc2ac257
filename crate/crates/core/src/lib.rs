//! Identity testing and reconstruction for sums of powers of sparse
//! polynomials over prime fields.
//!
//! A circuit in the class computes `f = a_1 f_1^d + ... + a_r f_r^d` where
//! each `f_i` has at most `s` monomials and total degree at most `delta`.
//! The crate provides
//!
//! * exact arithmetic in `F_p` ([`field`]) and polynomials over it ([`poly`],
//!   [`factor`]);
//! * the Klivans-Spielman substitution and an erasure-tolerant sparse
//!   interpolating set ([`ks_gen`]);
//! * explicit hitting sets and black-box identity testing ([`hitting`]);
//! * Wronskians and annihilating differential operators ([`diffop`]);
//! * univariate and multivariate reconstruction ([`reconstruct`]);
//! * a text format for circuits, oracle adapters and the CLI ([`circuit_io`]).

pub mod circuit_io;
pub mod diffop;
pub mod error;
pub mod factor;
pub mod field;
pub mod hitting;
pub mod ks_gen;
pub mod linalg;
pub mod poly;
pub mod reconstruct;

pub use error::{Error, Result};
pub use field::{FpElem, PrimeField};
pub use poly::{ExponentVector, SparsePoly, UniPoly};
