//! Leading-order formulas for fixed `p` as `n -> infinity`.
//!
//! With `y = 1 - p/2` and `u(p) = p(1-p)/(2-p)^2`:
//!
//! ```text
//!                 G(n,p)                 G(n,m), p = m/N
//! P(A)            2 y^(n-1)              2 y^(n-1) e^(-u)
//! P(A n B)        3 y^(2n-3)             3 y^(2n-3) e^(-4u)
//! Cov(A, B)       (2p-1) y^(2n-3)        (3 e^(-2u) - 4 + 2p) y^(2n-3) e^(-2u)
//! ```
//!
//! Powers of `y` underflow doubles long before the interesting `n`, so all
//! values are MPFR floats.

use log::warn;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::serde_fraction;
use crate::report::{serialize_float, Model};

/// Default mantissa width for asymptotic values.
pub const DEFAULT_BITS: u32 = 256;

fn check_p(p: &Rational) -> Result<()> {
    if *p <= 0 || *p > 1 {
        return Err(Error::param("p", "asymptotic formulas need 0 < p <= 1"));
    }
    Ok(())
}

fn two_p_minus_one(p: &Rational) -> Rational {
    Rational::from(p * 2u32) - 1u32
}

fn float(bits: u32, r: &Rational) -> Float {
    Float::with_val(bits, r)
}

/// `y = 1 - p/2`.
fn y_of(bits: u32, p: &Float) -> Float {
    Float::with_val(bits, 1 - Float::with_val(bits, p / 2u32))
}

/// `u(p) = p(1-p)/(2-p)^2`.
fn u_of(bits: u32, p: &Float) -> Float {
    let one_minus = Float::with_val(bits, 1 - p);
    let two_minus = Float::with_val(bits, 2 - p);
    Float::with_val(bits, p * one_minus) / two_minus.square()
}

fn y_pow(bits: u32, p: &Float, e: usize) -> Float {
    y_of(bits, p).pow(e as u32)
}

fn exp_neg(bits: u32, scale: u32, u: &Float) -> Float {
    Float::with_val(bits, -(Float::with_val(bits, u * scale))).exp()
}

/// Leading-order `P(s -/-> a)`.
pub fn approx_not_reach(n: usize, p: &Rational, model: Model, bits: u32) -> Result<Float> {
    check_p(p)?;
    if n < 2 {
        return Err(Error::param("n", "need n >= 2"));
    }
    let pf = float(bits, p);
    let base = y_pow(bits, &pf, n - 1) * 2u32;
    Ok(match model {
        Model::Gnp => base,
        Model::Gnm => base * exp_neg(bits, 1, &u_of(bits, &pf)),
    })
}

/// Leading-order `P(s -/-> a, b -/-> s)`.
pub fn approx_joint(n: usize, p: &Rational, model: Model, bits: u32) -> Result<Float> {
    check_p(p)?;
    if n < 3 {
        return Err(Error::param("n", "need n >= 3"));
    }
    let pf = float(bits, p);
    let base = y_pow(bits, &pf, 2 * n - 3) * 3u32;
    Ok(match model {
        Model::Gnp => base,
        Model::Gnm => base * exp_neg(bits, 4, &u_of(bits, &pf)),
    })
}

/// Leading-order covariance.
pub fn approx_cov(n: usize, p: &Rational, model: Model, bits: u32) -> Result<Float> {
    check_p(p)?;
    if n < 3 {
        return Err(Error::param("n", "need n >= 3"));
    }
    let pf = float(bits, p);
    let yp = y_pow(bits, &pf, 2 * n - 3);
    Ok(match model {
        Model::Gnp => yp * float(bits, &two_p_minus_one(p)),
        Model::Gnm => {
            let e2 = exp_neg(bits, 2, &u_of(bits, &pf));
            yp * pc_function_at(bits, &pf) * e2
        }
    })
}

/// `lim_n relcov = (2p - 1)/3` in `G(n, p)`.
pub fn limit_relcov_gnp(p: &Rational) -> Result<Rational> {
    check_p(p)?;
    Ok(two_p_minus_one(p) / 3u32)
}

/// `lim_n relcov = (3 e^(-2u) - 4 + 2p) / (3 e^(-2u))` in `G(n, m)` with `m/N -> p`.
pub fn limit_relcov_gnm(p: &Rational, bits: u32) -> Result<Float> {
    check_p(p)?;
    let pf = float(bits, p);
    let e2 = exp_neg(bits, 2, &u_of(bits, &pf));
    Ok(pc_function_at(bits, &pf) / (e2 * 3u32))
}

/// `f(p) = 3 e^(-2p(1-p)/(2-p)^2) - 4 + 2p`, whose root is `p_c`.
pub fn pc_function(p: &Float) -> Float {
    pc_function_at(p.prec(), p)
}

fn pc_function_at(bits: u32, p: &Float) -> Float {
    let e2 = exp_neg(bits, 2, &u_of(bits, p));
    e2 * 3u32 - 4u32 + Float::with_val(bits, p * 2u32)
}

/// `f'(p) = 2 - 6 (2 - 3p) e^(-2u) / (2-p)^3`.
pub fn pc_function_derivative(p: &Float) -> Float {
    let bits = p.prec();
    let e2 = exp_neg(bits, 2, &u_of(bits, p));
    let two_minus = Float::with_val(bits, 2 - p);
    let lin = Float::with_val(bits, 2 - Float::with_val(bits, p * 3u32));
    2u32 - e2 * lin * 6u32 / two_minus.pow(3u32)
}

#[derive(Clone, Debug, Serialize)]
pub struct PcSolution {
    #[serde(serialize_with = "serialize_float")]
    pub p_c: Float,
    /// `f(p_c)`
    #[serde(serialize_with = "serialize_float")]
    pub residual: Float,
    /// Final bracket width.
    #[serde(serialize_with = "serialize_float")]
    pub width: Float,
    /// `f' > 0` at every sampled grid point.
    pub monotone: bool,
    /// Smallest sampled `f'`.
    #[serde(serialize_with = "serialize_float")]
    pub min_derivative: Float,
}

/// Bisection for the root of [`pc_function`] on `[0, 1]` (`f(0) = -1`, `f(1) = 1`).
pub fn solve_pc(tol: f64, bits: u32) -> Result<PcSolution> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "tolerance must be positive"));
    }
    let tol = Float::with_val(bits, tol);
    let mut lo = Float::with_val(bits, 0);
    let mut hi = Float::with_val(bits, 1);
    while Float::with_val(bits, &hi - &lo) > tol {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        if pc_function(&mid).is_sign_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p_c = Float::with_val(bits, &lo + &hi) / 2u32;
    let mut min_derivative = pc_function_derivative(&Float::with_val(bits, 0));
    for i in 1..=256u32 {
        let d = pc_function_derivative(&(Float::with_val(bits, i) / 256u32));
        if d < min_derivative {
            min_derivative = d;
        }
    }
    Ok(PcSolution {
        residual: pc_function(&p_c),
        width: Float::with_val(bits, &hi - &lo),
        monotone: min_derivative.is_sign_positive() && !min_derivative.is_zero(),
        min_derivative,
        p_c,
    })
}

/// Leading terms of `E[Cov(A, B | M)]` and `Var(P(A | M))` in `G(n, p)`,
/// with `E = e^(2u)`:
/// `(3 - (4-2p) E) y^(2n-3)` and `4 (E - 1) y^(2n-2)`.
pub fn varcond_terms(n: usize, p: &Rational, bits: u32) -> Result<(Float, Float)> {
    check_p(p)?;
    if n < 3 {
        return Err(Error::param("n", "need n >= 3"));
    }
    let pf = float(bits, p);
    let e = Float::with_val(bits, u_of(bits, &pf) * 2u32).exp();
    let four_minus = float(bits, &(4 - Rational::from(p * 2u32)));
    let cond = (3u32 - four_minus * &e) * y_pow(bits, &pf, 2 * n - 3);
    let var = (e - 1u32) * 4u32 * y_pow(bits, &pf, 2 * n - 2);
    Ok((cond, var))
}

/// `(3 - (4-2p)E) + 4(E-1)(1-p/2) - (2p - 1)`, zero in exact arithmetic.
pub fn varcond_identity_residual(p: &Rational, bits: u32) -> Result<Float> {
    check_p(p)?;
    let pf = float(bits, p);
    let e = Float::with_val(bits, u_of(bits, &pf) * 2u32).exp();
    let four_minus = float(bits, &(4 - Rational::from(p * 2u32)));
    let cond = 3u32 - four_minus * &e;
    let var = (e - 1u32) * 4u32 * y_of(bits, &pf);
    Ok(cond + var - float(bits, &two_p_minus_one(p)))
}

/// Approximation of [`crate::gnm::q_exact`]:
/// `y^l exp(-(l/n)^2 p(1-p)/(2-p)^2)` with `p = m/N`.
///
/// Intended for `l = O(n)`; logs a warning when `l > 10 n`.
pub fn approx_q(l: usize, n: usize, m: usize, bits: u32) -> Result<Float> {
    let big_n = n * n.saturating_sub(1) / 2;
    if big_n == 0 || l > big_n || m > big_n {
        return Err(Error::param(
            "l, m",
            format!("need l, m <= N = {big_n} and n >= 2"),
        ));
    }
    if l > 10 * n {
        warn!(
            "approx_q: l = {l} > 10 n = {}; the approximation targets l = O(n)",
            10 * n
        );
    }
    let pf = float(bits, &Rational::from((m, big_n)));
    let ratio = Float::with_val(bits, l) / n as u32;
    let expo = u_of(bits, &pf) * ratio.square();
    Ok(y_pow(bits, &pf, l) * Float::with_val(bits, -expo).exp())
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub n: usize,
    #[serde(with = "serde_fraction")]
    pub p: Rational,
    pub model: Model,
    #[serde(serialize_with = "serialize_float")]
    pub not_reach: Float,
    #[serde(serialize_with = "serialize_float")]
    pub joint: Float,
    #[serde(serialize_with = "serialize_float")]
    pub cov: Float,
    #[serde(serialize_with = "serialize_float")]
    pub relcov_limit: Float,
}

pub fn asymptotic_report(
    n: usize,
    p: &Rational,
    model: Model,
    bits: u32,
) -> Result<AsymptoticReport> {
    let relcov_limit = match model {
        Model::Gnp => float(bits, &limit_relcov_gnp(p)?),
        Model::Gnm => limit_relcov_gnm(p, bits)?,
    };
    Ok(AsymptoticReport {
        n,
        p: p.clone(),
        model,
        not_reach: approx_not_reach(n, p, model, bits)?,
        joint: approx_joint(n, p, model, bits)?,
        cov: approx_cov(n, p, model, bits)?,
        relcov_limit,
    })
}
