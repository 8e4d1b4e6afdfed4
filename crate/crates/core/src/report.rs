use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::rational::{serde_fraction, serde_fraction_opt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Gnp,
    Gnm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Float { precision_bits: u32 },
    Asymptotic,
    MonteCarlo { trials: u64 },
}

/// Covariance of `A = {a -/-> s}` and `B = {s -/-> b}` for one `(n, parameter)`.
///
/// `parameter` is `p` for `G(n,p)` and the edge count `m` for `G(n,m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub n: usize,
    pub model: Model,
    #[serde(with = "serde_fraction")]
    pub parameter: Rational,
    /// `P(A) = P(B)`
    #[serde(with = "serde_fraction")]
    pub prob_a: Rational,
    #[serde(with = "serde_fraction")]
    pub prob_ab: Rational,
    #[serde(with = "serde_fraction")]
    pub cov: Rational,
    /// `cov / P(A n B)`, absent when the joint probability vanishes.
    #[serde(with = "serde_fraction_opt")]
    pub relcov: Option<Rational>,
    pub provenance: Provenance,
}

impl CovarianceReport {
    pub(crate) fn exact(
        n: usize,
        model: Model,
        parameter: Rational,
        prob_a: Rational,
        prob_ab: Rational,
    ) -> Self {
        let cov = &prob_ab - Rational::from(prob_a.square_ref()) ;
        let relcov = if prob_ab.is_zero() {
            None
        } else {
            Some(Rational::from(&cov / &prob_ab))
        };
        CovarianceReport {
            n,
            model,
            parameter,
            prob_a,
            prob_ab,
            cov,
            relcov,
            provenance: Provenance::Exact,
        }
    }
}

/// Serializes a float as a decimal string with 30 significant digits.
pub(crate) fn serialize_float<S: serde::Serializer>(f: &Float, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_string_radix(10, Some(30)))
}
