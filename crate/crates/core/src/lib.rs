//! q-hypergeometric terms and the dilogarithm machinery attached to them.
//!
//! A q-term is a summand `q^{Q(k)} ε^{L(k)} Π (q)_{A_j(k)}^{ε_j}`. From it we
//! build the variational equations, their solutions in log coordinates, the
//! extended Bloch group element and its Rogers dilogarithm, the potential
//! `V_t`, and finally the generating series of the term evaluated at roots of
//! unity together with estimates of its singularities.

pub mod bloch;
pub mod builtin;
pub mod dilog;
mod error;
pub mod lp;
pub mod model;
pub mod roots;
pub mod selftest;
pub mod series;
pub mod variational;

pub use error::{Error, Result, SchemaIssue};
pub use num_complex::Complex64;
