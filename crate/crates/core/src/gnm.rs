//! Randomly oriented `G(n, m)`.
//!
//! `G(n, p)` is the binomial mixture of the `G(n, m)`, so
//! `f_n(p) = sum_m C(N, m) p^m (1-p)^(N-m) h_n(m)` and likewise `g_n` with
//! `k_n`. Reading off the coefficient of `p^m` gives the triangular system
//!
//! ```text
//! h_n(m) = [p^m] f_n / C(N, m) - sum_{i<m} C(m, i) (-1)^(m-i) h_n(i)
//! ```
//!
//! which [`invert_to_gnm`] solves exactly. The alternating sum cancels
//! catastrophically in floating point, so everything here is rational.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::binomial::binomial;
use crate::error::{Error, Result};
use crate::gnp::{annealed_polys, AnnealedPolys, Guards};
use crate::poly::PolyP;
use crate::rational::{check_probability, serde_fraction, to_fraction_string};
use crate::report::{CovarianceReport, Model};

fn edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_edge_count(name: &'static str, v: usize, big_n: usize) -> Result<()> {
    if v > big_n {
        return Err(Error::param(name, format!("{v} exceeds N = {big_n}")));
    }
    Ok(())
}

/// Probability that `l` fixed oriented edges are all missing from a randomly
/// oriented `G(n, m)`.
///
/// With `X` the number of the `l` underlying pairs present (hypergeometric),
/// this is `sum_k 2^-k P(X = k)`. Terms follow from the ratio
/// `P(X=k+1)/P(X=k) = (l-k)(m-k) / ((k+1)(N-l-m+k+1))`.
pub fn q_exact(l: usize, n: usize, m: usize) -> Result<Rational> {
    let big_n = edges(n);
    check_edge_count("l", l, big_n)?;
    check_edge_count("m", m, big_n)?;
    let k0 = m.saturating_sub(big_n - l);
    let k1 = l.min(m);
    let mut term = Rational::from((
        binomial(l as i64, k0 as i64) * binomial((big_n - l) as i64, (m - k0) as i64),
        binomial(big_n as i64, m as i64),
    )) >> k0 as u32;
    let mut acc = term.clone();
    for k in k0..k1 {
        let num = Integer::from((l - k) * (m - k));
        // the extra 2 in the denominator moves 2^-k to 2^-(k+1)
        let den = Integer::from(2 * (k + 1) * (big_n + k + 1 - l - m));
        term *= Rational::from((num, den));
        acc += &term;
    }
    Ok(acc)
}

/// Probability that none of `l` fixed pairs is an edge of `G(n, m)`:
/// `C(N-l, m) / C(N, m)`, zero when `l + m > N`.
pub fn no_edge_prob(l: usize, n: usize, m: usize) -> Result<Rational> {
    let big_n = edges(n);
    check_edge_count("l", l, big_n)?;
    check_edge_count("m", m, big_n)?;
    if l + m > big_n {
        return Ok(Rational::new());
    }
    Ok(Rational::from((
        binomial((big_n - l) as i64, m as i64),
        binomial(big_n as i64, m as i64),
    )))
}

/// Solves the binomial-mixture system for the per-`m` values whose mixture
/// is `poly`. Fails if any value leaves `[0, 1]`.
pub fn invert_to_gnm(poly: &PolyP, n: usize) -> Result<Vec<Rational>> {
    let big_n = edges(n);
    if poly.degree().is_some_and(|d| d > big_n) {
        return Err(Error::param(
            "poly",
            format!("degree exceeds N = {big_n} for n = {n}"),
        ));
    }
    let mut out: Vec<Rational> = Vec::with_capacity(big_n + 1);
    for m in 0..=big_n {
        let mut v = poly.derivative_at_zero(m);
        if !v.is_zero() {
            // (N-m)!/N! * m! coeff = coeff / C(N, m)
            v /= Integer::from(Integer::factorial(m as u32));
            v /= binomial(big_n as i64, m as i64);
        }
        for (i, h) in out.iter().enumerate() {
            let t = Rational::from(h * binomial(m as i64, i as i64));
            if (m - i) % 2 == 1 {
                v += t;
            } else {
                v -= t;
            }
        }
        if !(0..=1).contains(&v) {
            return Err(Error::OutOfUnitInterval {
                index: m,
                value: to_fraction_string(&v),
            });
        }
        out.push(v);
    }
    Ok(out)
}

/// `h_n(m) = P(a -/-> s)` and `k_n(m) = P(a -/-> s, s -/-> b)` for every `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct GnmTables {
    pub n: usize,
    pub big_n: usize,
    pub h: Vec<Rational>,
    pub k: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GnmRow {
    pub m: usize,
    #[serde(with = "serde_fraction")]
    pub h: Rational,
    #[serde(with = "serde_fraction")]
    pub k: Rational,
    #[serde(with = "serde_fraction")]
    pub cov: Rational,
}

impl GnmTables {
    /// Tables from exact `G(n, p)` polynomials; needs `n` within the symbolic guard.
    pub fn new(n: usize, guards: &Guards) -> Result<Self> {
        Self::from_polys(&annealed_polys(n, guards)?)
    }

    pub fn from_polys(polys: &AnnealedPolys) -> Result<Self> {
        let n = polys.n;
        let h = invert_to_gnm(&polys.f, n)?;
        let k = invert_to_gnm(&polys.g, n)?;
        for (m, (hm, km)) in h.iter().zip(&k).enumerate() {
            if km > hm {
                return Err(Error::IdentityViolation(format!(
                    "k_{n}({m}) = {} exceeds h_{n}({m}) = {}",
                    to_fraction_string(km),
                    to_fraction_string(hm)
                )));
            }
        }
        Ok(GnmTables {
            n,
            big_n: edges(n),
            h,
            k,
        })
    }

    pub fn cov(&self, m: usize) -> Result<CovarianceReport> {
        check_edge_count("m", m, self.big_n)?;
        Ok(CovarianceReport::exact(
            self.n,
            Model::Gnm,
            Rational::from(m),
            self.h[m].clone(),
            self.k[m].clone(),
        ))
    }

    pub fn rows(&self) -> Vec<GnmRow> {
        (0..=self.big_n)
            .map(|m| GnmRow {
                m,
                h: self.h[m].clone(),
                k: self.k[m].clone(),
                cov: (&self.k[m] - Rational::from(self.h[m].square_ref())),
            })
            .collect()
    }

    /// Sign changes of `m -> cov(n, m)` for `m >= 1` (`m = 0` is a trivial zero).
    pub fn sign_changes(&self) -> Vec<MSignChange> {
        let covs: Vec<Rational> = self.rows().into_iter().map(|r| r.cov).collect();
        let mut out = Vec::new();
        for m in 1..=self.big_n {
            if covs[m].is_zero() {
                out.push(MSignChange::Zero { m });
            } else if m < self.big_n
                && covs[m].cmp0() != covs[m + 1].cmp0()
                && !covs[m + 1].is_zero()
            {
                out.push(MSignChange::Between { m });
            }
        }
        out
    }
}

/// A sign change of the `G(n, m)` covariance between `m` and `m + 1`, or an
/// exact zero at `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MSignChange {
    Between { m: usize },
    Zero { m: usize },
}

pub fn cov_gnm(n: usize, m: usize) -> Result<CovarianceReport> {
    if n < 3 {
        return Err(Error::param("n", "covariance needs n >= 3"));
    }
    check_edge_count("m", m, edges(n))?;
    GnmTables::new(n, &Guards::default())?.cov(m)
}

pub fn critical_m(n: usize) -> Result<Vec<MSignChange>> {
    if n < 3 {
        return Err(Error::param("n", "covariance needs n >= 3"));
    }
    Ok(GnmTables::new(n, &Guards::default())?.sign_changes())
}

/// `round(frac * N)` with ties to even.
pub fn m_from_fraction(frac: &Rational, n: usize) -> Result<usize> {
    check_probability("m fraction", frac)?;
    let x = Rational::from(frac * edges(n) as u64);
    let fl = Integer::from(x.floor_ref());
    let rem = x - &fl;
    let half = Rational::from((1, 2));
    let up = rem > half || (rem == half && fl.is_odd());
    let m = if up { fl + 1u32 } else { fl };
    Ok(m.to_usize().expect("bounded by N"))
}

/// `Cov_{G(n,p)}(A, B) = E[Cov(A, B | M)] + Var(P(A | M))` with
/// `M ~ Bin(N, p)` the edge count.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub n: usize,
    #[serde(with = "serde_fraction")]
    pub p: Rational,
    #[serde(with = "serde_fraction")]
    pub annealed_cov: Rational,
    #[serde(with = "serde_fraction")]
    pub expected_conditional_cov: Rational,
    #[serde(with = "serde_fraction")]
    pub variance_of_conditional: Rational,
}

/// Computes all three terms independently and insists on exact equality.
pub fn decompose(polys: &AnnealedPolys, tables: &GnmTables, p: &Rational) -> Result<Decomposition> {
    check_probability("p", p)?;
    if polys.n != tables.n {
        return Err(Error::param(
            "tables",
            "polynomials and tables are for different n",
        ));
    }
    let big_n = tables.big_n;
    let q = Rational::from(1 - p);
    let mut expected_cov = Rational::new();
    let mut mean_h = Rational::new();
    let mut mean_h2 = Rational::new();
    for m in 0..=big_n {
        let w = Rational::from(binomial(big_n as i64, m as i64)) * rpow(p, m) * rpow(&q, big_n - m);
        if w.is_zero() {
            continue;
        }
        let h2 = Rational::from(tables.h[m].square_ref());
        expected_cov += Rational::from(&tables.k[m] - &h2) * &w;
        mean_h += Rational::from(&tables.h[m] * &w);
        mean_h2 += h2 * &w;
    }
    let variance = mean_h2 - Rational::from(mean_h.square_ref());
    let annealed = polys.cov_at(p);
    let total = Rational::from(&expected_cov + &variance);
    if total != annealed {
        return Err(Error::IdentityViolation(format!(
            "E[Cov | M] + Var(P(A | M)) = {} but the annealed covariance is {}",
            to_fraction_string(&total),
            to_fraction_string(&annealed)
        )));
    }
    Ok(Decomposition {
        n: polys.n,
        p: p.clone(),
        annealed_cov: annealed,
        expected_conditional_cov: expected_cov,
        variance_of_conditional: variance,
    })
}

fn rpow(x: &Rational, e: usize) -> Rational {
    Rational::from(x.pow(e as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn q_exact_examples() {
        assert_eq!(q_exact(0, 6, 7).unwrap(), 1);
        // N = 15
        for m in 0..=15usize {
            assert_eq!(q_exact(1, 6, m).unwrap(), 1 - r(m as i64, 30));
        }
        assert_eq!(q_exact(15, 6, 15).unwrap(), r(1, 1 << 15));
        assert!(q_exact(16, 6, 3).is_err());
    }

    #[test]
    fn no_edge_examples() {
        assert_eq!(no_edge_prob(0, 5, 4).unwrap(), 1);
        assert_eq!(no_edge_prob(1, 5, 4).unwrap(), r(6, 10));
        assert_eq!(no_edge_prob(7, 5, 4).unwrap(), 0);
    }

    #[test]
    fn h3_values() {
        let polys = annealed_polys(3, &Guards::default()).unwrap();
        let t = GnmTables::from_polys(&polys).unwrap();
        assert_eq!(t.h, vec![r(1, 1), r(5, 6), r(7, 12), r(3, 8)]);
        assert_eq!(PolyP::binomial_mixture(&t.h), polys.f);
        assert_eq!(PolyP::binomial_mixture(&t.k), polys.g);
        assert_eq!(t.cov(3).unwrap().cov, r(-1, 64));
        assert_eq!(t.cov(0).unwrap().cov, 0);
    }

    #[test]
    fn inversion_rejects_non_probability_input() {
        let bad = PolyP::from_coeffs(vec![r(1, 1), r(5, 1)]);
        let err = invert_to_gnm(&bad, 3).unwrap_err();
        assert_eq!(err.kind(), "out_of_unit_interval");
        let too_long = PolyP::p().pow(4);
        assert!(invert_to_gnm(&too_long, 3).is_err());
    }

    #[test]
    fn k4_zero_at_full_edge_count() {
        let changes = critical_m(4).unwrap();
        assert!(changes.contains(&MSignChange::Zero { m: 6 }));
    }

    #[test]
    fn single_sign_change_for_small_n() {
        for n in 5..=8 {
            let changes = critical_m(n).unwrap();
            assert_eq!(changes.len(), 1, "n = {n}: {changes:?}");
        }
    }

    #[test]
    fn tables_are_monotone_and_nested() {
        let t = GnmTables::new(7, &Guards::default()).unwrap();
        for m in 0..t.big_n {
            assert!(t.h[m + 1] <= t.h[m]);
            assert!(t.k[m + 1] <= t.k[m]);
        }
        assert_eq!(t.h[0], 1);
        assert_eq!(t.k[0], 1);
    }

    #[test]
    fn fraction_rounding_ties_to_even() {
        // n = 5, N = 10
        assert_eq!(m_from_fraction(&r(1, 4), 5).unwrap(), 2);
        assert_eq!(m_from_fraction(&r(3, 20), 5).unwrap(), 2);
        assert_eq!(m_from_fraction(&r(1, 3), 5).unwrap(), 3);
        assert_eq!(m_from_fraction(&r(1, 1), 5).unwrap(), 10);
        assert!(m_from_fraction(&r(3, 2), 5).is_err());
    }

    #[test]
    fn decomposition_at_p_one_has_no_variance() {
        let polys = annealed_polys(6, &Guards::default()).unwrap();
        let t = GnmTables::from_polys(&polys).unwrap();
        let d = decompose(&polys, &t, &r(1, 1)).unwrap();
        assert_eq!(d.variance_of_conditional, 0);
        assert_eq!(d.annealed_cov, d.expected_conditional_cov);
    }

    proptest! {
        #[test]
        fn q_bounded_by_annealed_value(n in 2usize..40, a in 0u32..1000, b in 0u32..1000) {
            let big_n = edges(n);
            let l = a as usize % (big_n + 1);
            let m = b as usize % (big_n + 1);
            let q = q_exact(l, n, m).unwrap();
            let y = 1 - Rational::from((m, 2 * big_n));
            prop_assert!(q <= rpow(&y, l));
            if l < big_n {
                prop_assert!(q_exact(l + 1, n, m).unwrap() <= q);
            }
            if m < big_n {
                prop_assert!(q_exact(l, n, m + 1).unwrap() <= q);
            }
        }

        #[test]
        fn no_edge_bounded(n in 2usize..40, a in 0u32..1000, b in 0u32..1000) {
            let big_n = edges(n);
            let l = a as usize % (big_n + 1);
            let m = b as usize % (big_n + 1);
            let v = no_edge_prob(l, n, m).unwrap();
            let bound = rpow(&Rational::from((big_n - m, big_n)), l);
            prop_assert!(v <= bound);
        }
    }
}
