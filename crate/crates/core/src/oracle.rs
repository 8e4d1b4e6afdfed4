//! Exhaustive enumeration over every edge subset and every orientation.
//!
//! One pass over the `3^N` oriented graphs gathers, per edge count `e`,
//! integer sums of the per-graph orientation counts `c_A(G)`, `c_B(G)`,
//! `c_AB(G)` and `c_A(G) c_B(G)`. Every annealed and quenched quantity for
//! `G(n, p)` and `G(n, m)` is an exact function of those sums.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::binomial::binomial;
use crate::error::{Error, Result};
use crate::graph::{edge_pairs, reach_set};
use crate::poly::PolyP;
use crate::rational::check_probability;

/// Largest `n` for polynomial annealed output.
pub const ANNEALED_SYMBOLIC_MAX_N: usize = 5;
/// Largest `n` for everything else without the long-run flag.
pub const ORACLE_MAX_N: usize = 6;
/// Largest `n` with the long-run flag (`3^21` oriented graphs).
pub const ORACLE_LONG_MAX_N: usize = 7;

const S: usize = 0;
const A: usize = 1;
const B: usize = 2;

/// Per-edge-count sums over all edge subsets `G` with `|G| = e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCounts {
    pub n: usize,
    pub sum_a: Vec<u64>,
    pub sum_b: Vec<u64>,
    pub sum_ab: Vec<u64>,
    /// `sum_G c_A(G) c_B(G)`
    pub sum_a_times_b: Vec<u128>,
}

impl OracleCounts {
    fn new(n: usize) -> Self {
        let len = n * (n - 1) / 2 + 1;
        OracleCounts {
            n,
            sum_a: vec![0; len],
            sum_b: vec![0; len],
            sum_ab: vec![0; len],
            sum_a_times_b: vec![0; len],
        }
    }

    fn merge(mut self, o: OracleCounts) -> OracleCounts {
        for e in 0..self.sum_a.len() {
            self.sum_a[e] += o.sum_a[e];
            self.sum_b[e] += o.sum_b[e];
            self.sum_ab[e] += o.sum_ab[e];
            self.sum_a_times_b[e] += o.sum_a_times_b[e];
        }
        self
    }

    pub fn edges(&self) -> usize {
        self.sum_a.len() - 1
    }

    /// Polynomial `sum_e p^e (1-p)^(N-e) w[e]`.
    fn weighted_poly(&self, w: impl Fn(usize) -> Rational) -> PolyP {
        let big_n = self.edges();
        let mut out = PolyP::zero();
        for e in 0..=big_n {
            let c = w(e);
            if c.is_zero() {
                continue;
            }
            let term = &PolyP::p().pow(e as u32) * &PolyP::one_minus_p().pow((big_n - e) as u32);
            out = &out + &term.scale(&c);
        }
        out
    }

    fn weighted_at(&self, p: &Rational, w: impl Fn(usize) -> Rational) -> Rational {
        let big_n = self.edges();
        let q = Rational::from(1 - p);
        let mut out = Rational::new();
        for e in 0..=big_n {
            let c = w(e);
            if c.is_zero() {
                continue;
            }
            let pe = Rational::from(p.pow(e as u32));
            let qe = Rational::from((&q).pow((big_n - e) as u32));
            out += c * pe * qe;
        }
        out
    }

    fn per_orientation(sum: u64, e: usize) -> Rational {
        Rational::from((Integer::from(sum), Integer::from(1) << (e as u32)))
    }

    fn product_term(&self, e: usize) -> Rational {
        Rational::from((
            Integer::from(self.sum_a_times_b[e]),
            Integer::from(1) << (2 * e as u32),
        ))
    }

    fn quenched_weight(&self, e: usize) -> Rational {
        Self::per_orientation(self.sum_ab[e], e) - self.product_term(e)
    }

    /// `(P(A), P(B), P(A n B))` as polynomials in `p`.
    pub fn annealed_polys(&self) -> (PolyP, PolyP, PolyP) {
        (
            self.weighted_poly(|e| Self::per_orientation(self.sum_a[e], e)),
            self.weighted_poly(|e| Self::per_orientation(self.sum_b[e], e)),
            self.weighted_poly(|e| Self::per_orientation(self.sum_ab[e], e)),
        )
    }

    /// `E_G[P(A n B | G) - P(A | G) P(B | G)]` as a polynomial.
    pub fn quenched_poly(&self) -> PolyP {
        self.weighted_poly(|e| self.quenched_weight(e))
    }

    /// `Cov_G(P(A | G), P(B | G))` as a polynomial.
    pub fn cross_term_poly(&self) -> PolyP {
        let (fa, fb, _) = self.annealed_polys();
        &self.weighted_poly(|e| self.product_term(e)) - &(&fa * &fb)
    }

    /// `(P(A), P(B), P(A n B))` at a fixed `p`.
    pub fn annealed_at(&self, p: &Rational) -> Result<(Rational, Rational, Rational)> {
        check_probability("p", p)?;
        Ok((
            self.weighted_at(p, |e| Self::per_orientation(self.sum_a[e], e)),
            self.weighted_at(p, |e| Self::per_orientation(self.sum_b[e], e)),
            self.weighted_at(p, |e| Self::per_orientation(self.sum_ab[e], e)),
        ))
    }

    pub fn quenched_at(&self, p: &Rational) -> Result<Rational> {
        check_probability("p", p)?;
        Ok(self.weighted_at(p, |e| self.quenched_weight(e)))
    }

    fn check_m(&self, m: usize) -> Result<Integer> {
        if m > self.edges() {
            return Err(Error::param(
                "m",
                format!("{m} exceeds N = {}", self.edges()),
            ));
        }
        Ok(binomial(self.edges() as i64, m as i64))
    }

    /// `P(s -/-> b)` in the annealed `G(n, m)`.
    pub fn gnm_prob_b(&self, m: usize) -> Result<Rational> {
        let graphs = self.check_m(m)?;
        Ok(Self::per_orientation(self.sum_b[m], m) / graphs)
    }

    /// Annealed `G(n, m)` covariance.
    pub fn gnm_annealed_cov(&self, m: usize) -> Result<Rational> {
        let graphs = self.check_m(m)?;
        let pa = Self::per_orientation(self.sum_a[m], m) / &graphs;
        let pb = Self::per_orientation(self.sum_b[m], m) / &graphs;
        Ok(Self::per_orientation(self.sum_ab[m], m) / graphs - pa * pb)
    }

    /// Quenched `G(n, m)` covariance: the quenched sum restricted to graphs
    /// with exactly `m` edges.
    pub fn gnm_quenched_cov(&self, m: usize) -> Result<Rational> {
        let graphs = self.check_m(m)?;
        Ok(self.quenched_weight(m) / graphs)
    }
}

fn limit(n: usize, long_run: bool) -> Result<()> {
    let max = if long_run {
        ORACLE_LONG_MAX_N
    } else {
        ORACLE_MAX_N
    };
    if n < 3 {
        return Err(Error::param("n", "the oracle needs n >= 3"));
    }
    if n > max {
        return Err(Error::GuardExceeded {
            n,
            limit: max,
            mode: "oracle",
        });
    }
    Ok(())
}

/// Orientation counts `(c_A, c_B, c_AB)` of the edge subset `mask`, visiting
/// orientations in Gray-code order so each step flips one edge.
fn subset_counts(n: usize, pairs: &[(usize, usize)], mask: u64) -> (u64, u64, u64) {
    let present: Vec<(usize, usize)> = pairs
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, &e)| e)
        .collect();
    let mut rows = [0u64; ORACLE_LONG_MAX_N];
    let rows = &mut rows[..n];
    for &(i, j) in &present {
        rows[i] |= 1 << j;
    }
    let (mut ca, mut cb, mut cab) = (0, 0, 0);
    let total = 1u64 << present.len();
    for step in 0..total {
        if step > 0 {
            let (i, j) = present[step.trailing_zeros() as usize];
            rows[i] ^= 1 << j;
            rows[j] ^= 1 << i;
        }
        let a = reach_set(rows, A) >> S & 1 == 0;
        let b = reach_set(rows, S) >> B & 1 == 0;
        ca += u64::from(a);
        cb += u64::from(b);
        cab += u64::from(a && b);
    }
    (ca, cb, cab)
}

/// Enumerates all `3^N` oriented graphs on `n` vertices. `n <= 6`, or `7`
/// with `long_run`.
pub fn oracle_counts(n: usize, long_run: bool) -> Result<OracleCounts> {
    limit(n, long_run)?;
    let pairs = edge_pairs(n);
    let subsets = 1u64 << pairs.len();
    Ok((0..subsets)
        .into_par_iter()
        .fold(
            || OracleCounts::new(n),
            |mut acc, mask| {
                let e = mask.count_ones() as usize;
                let (ca, cb, cab) = subset_counts(n, &pairs, mask);
                acc.sum_a[e] += ca;
                acc.sum_b[e] += cb;
                acc.sum_ab[e] += cab;
                acc.sum_a_times_b[e] += u128::from(ca) * u128::from(cb);
                acc
            },
        )
        .reduce(|| OracleCounts::new(n), OracleCounts::merge))
}

/// `(f_n, g_n)` by enumeration, `n <= 5`.
pub fn oracle_annealed(n: usize) -> Result<(PolyP, PolyP)> {
    if n > ANNEALED_SYMBOLIC_MAX_N {
        return Err(Error::GuardExceeded {
            n,
            limit: ANNEALED_SYMBOLIC_MAX_N,
            mode: "oracle_symbolic",
        });
    }
    let (_, f, g) = oracle_counts(n, false)?.annealed_polys();
    Ok((f, g))
}

/// `(f_n(p), g_n(p))` by enumeration, `n <= 6` (`7` with `long_run`).
pub fn oracle_annealed_at(n: usize, p: &Rational, long_run: bool) -> Result<(Rational, Rational)> {
    check_probability("p", p)?;
    let (_, f, g) = oracle_counts(n, long_run)?.annealed_at(p)?;
    Ok((f, g))
}

/// Quenched covariance polynomial, `n <= 6`.
pub fn oracle_quenched(n: usize) -> Result<PolyP> {
    Ok(oracle_counts(n, false)?.quenched_poly())
}

/// Quenched covariance at a fixed `p`, `n <= 6` (`7` with `long_run`).
pub fn oracle_quenched_at(n: usize, p: &Rational, long_run: bool) -> Result<Rational> {
    check_probability("p", p)?;
    oracle_counts(n, long_run)?.quenched_at(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    #[test]
    fn triangle_by_hand() {
        let (f, g) = oracle_annealed(3).unwrap();
        let y = PolyP::one_minus_half_p();
        let expect = &(&y * &y) * &(&PolyP::one() + &PolyP::p().scale(&r(1, 2)));
        assert_eq!(f, expect);
        assert_eq!(g.eval(&r(1, 1)), r(1, 8));
    }

    #[test]
    fn k4_is_independent() {
        let (f, g) = oracle_annealed(4).unwrap();
        let one = r(1, 1);
        assert_eq!(g.eval(&one), f.eval(&one).square());
    }

    #[test]
    fn symmetric_marginals() {
        let c = oracle_counts(5, false).unwrap();
        assert_eq!(c.sum_a, c.sum_b);
    }

    #[test]
    fn decomposition_is_exact() {
        for n in 3..=5 {
            let c = oracle_counts(n, false).unwrap();
            let (fa, fb, g) = c.annealed_polys();
            let annealed = &g - &(&fa * &fb);
            assert_eq!(
                annealed,
                &c.quenched_poly() + &c.cross_term_poly(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn numeric_matches_polynomial() {
        let c = oracle_counts(5, false).unwrap();
        let p = r(9, 10);
        assert_eq!(c.quenched_at(&p).unwrap(), c.quenched_poly().eval(&p));
        let (_, _, g) = c.annealed_polys();
        assert_eq!(c.annealed_at(&p).unwrap().2, g.eval(&p));
    }

    #[test]
    fn gnm_slices_mix_back() {
        let c = oracle_counts(5, false).unwrap();
        let h: Vec<Rational> = (0..=10).map(|m| c.gnm_prob_b(m).unwrap()).collect();
        let (_, f, _) = c.annealed_polys();
        assert_eq!(PolyP::binomial_mixture(&h), f);
        assert!(c.gnm_prob_b(11).is_err());
    }

    #[test]
    fn guards() {
        assert!(oracle_annealed(6).is_err());
        assert!(oracle_counts(7, false).is_err());
        assert!(oracle_counts(8, true).is_err());
        assert!(oracle_counts(2, false).is_err());
    }
}
