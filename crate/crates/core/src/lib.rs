//! Reachability correlations in randomly oriented random graphs.
//!
//! For distinct vertices `a`, `s`, `b` let `A = {a -/-> s}` and
//! `B = {s -/-> b}`. This crate computes `P(A)`, `P(A n B)` and their
//! covariance in randomly oriented `G(n, p)` and `G(n, m)`:
//!
//! * [`gnp`]: exact cluster-size recursions, symbolic in `p` or at a fixed
//!   rational `p`;
//! * [`gnm`]: edge-avoidance probabilities and the inversion from `G(n, p)`
//!   polynomials to `G(n, m)` tables;
//! * [`asymptotics`]: leading-order formulas and the critical density `p_c`;
//! * [`sim`] and [`oracle`]: seeded Monte-Carlo estimators and exhaustive
//!   enumeration ground truth, annealed and quenched.

pub mod asymptotics;
pub mod binomial;
pub mod error;
pub mod gnm;
pub mod gnp;
pub mod graph;
pub mod modular;
pub mod oracle;
pub mod poly;
pub mod rational;
pub mod report;
pub mod ring;
pub mod roots;
pub mod sim;

pub use error::{Error, Result};
pub use poly::PolyP;
pub use rational::Rational;
pub use report::{CovarianceReport, Model, Provenance};
pub use rug::Float;
