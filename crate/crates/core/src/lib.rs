//! Exact computer algebra for the KdV hierarchy and topological 2D gravity.
//!
//! The crate is organised bottom-up:
//!
//! * [`diffpoly`]: differential polynomials in the jet variables `u0, u1, ...`
//!   with an even-power `λ` grading, together with the total derivative, the
//!   variational derivative and a certifying formal antiderivative.
//! * [`gelfand_dickey`]: the Gelfand-Dickey polynomials `R_n`, their
//!   potentials `T_n`, the `P_{k,l}` antiderivatives, identity verifiers and
//!   the action density of the mean-field theory.
//! * [`series`]: truncated multivariate power series in the times
//!   `t0, t1, ...` and a brute-force solver for the string equation.
//! * [`genus`]: the `(t0, t2)` restriction: closed forms for `u_g`, the
//!   `c_g` / `a_n` recursions, asymptotics and divergence certificates.

pub mod diffpoly;
pub mod gelfand_dickey;
pub mod genus;
pub mod rational;
pub mod report;
pub mod series;

pub use diffpoly::{DiffPoly, DiffPolyError, Jet, Monomial, Slot};
pub use rational::Rational;
pub use report::{Check, Report};
