//! Dense polynomials in the edge probability `p` with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Assign, Integer, Rational};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use crate::binomial::binomial;
use crate::error::{Error, Result};
use crate::rational::{parse_rational, to_fraction_string};

/// `coeffs[i]` is the coefficient of `p^i`. Trailing zeros are always trimmed,
/// so the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PolyP {
    coeffs: Vec<Rational>,
}

impl PolyP {
    pub fn zero() -> Self {
        PolyP { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `p`.
    pub fn p() -> Self {
        Self::from_coeffs(vec![Rational::new(), Rational::from(1)])
    }

    /// `1 - p/2`, the probability that one fixed orientation of an edge is absent.
    pub fn one_minus_half_p() -> Self {
        Self::from_coeffs(vec![Rational::from(1), Rational::from((-1, 2))])
    }

    /// `1 - p`, the probability that an edge is absent.
    pub fn one_minus_p() -> Self {
        Self::from_coeffs(vec![Rational::from(1), Rational::from(-1)])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyP { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `p^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PolyP {
            coeffs: self.coeffs.iter().map(|a| Rational::from(a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact value at `x`.
    ///
    /// Denominators are cleared first so the Horner loop runs on integers:
    /// with `x = a/b` and integer coefficients `c_i`, the loop accumulates
    /// `sum c_i a^i b^(d-i)`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let Some(deg) = self.degree() else {
            return Rational::new();
        };
        let mut lcm = Integer::from(1);
        for c in &self.coeffs {
            lcm.lcm_mut(c.denom());
        }
        let a = x.numer();
        let b = x.denom();
        let scaled = |c: &Rational| c.numer() * Integer::from(&lcm / c.denom());
        let mut acc = scaled(&self.coeffs[deg]);
        let mut bpow = Integer::from(1);
        for c in self.coeffs[..deg].iter().rev() {
            bpow *= b;
            acc *= a;
            if !c.is_zero() {
                acc += scaled(c) * &bpow;
            }
        }
        Rational::from((acc, lcm * bpow))
    }

    /// Sign of the value at `x`: -1, 0 or 1.
    pub fn sign_at(&self, x: &Rational) -> i32 {
        match self.eval(x).cmp0() {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        }
    }

    /// `m`-th derivative at zero, i.e. `m! * coeff(m)`.
    pub fn derivative_at_zero(&self, m: usize) -> Rational {
        let c = self.coeff(m);
        if c.is_zero() {
            return c;
        }
        c * Integer::from(Integer::factorial(m as u32))
    }

    /// Builds a polynomial in `p` from integer coefficients of the same
    /// polynomial written in `x = p/2` over a common denominator:
    /// coefficient `i` becomes `c_i / (denom * 2^i)`.
    pub(crate) fn from_half_variable(int_coeffs: Vec<Integer>, denom: &Integer) -> Self {
        let coeffs = int_coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let d = Integer::from(denom << (i as u32));
                Rational::from((c, d))
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// `sum_m C(N, m) p^m (1-p)^(N-m) w[m]`: the binomial mixture of `w`.
    pub fn binomial_mixture(weights: &[Rational]) -> Self {
        let Some(big_n) = weights.len().checked_sub(1) else {
            return Self::zero();
        };
        // coefficient of p^k is sum_{m<=k} C(N,m) C(N-m,k-m) (-1)^(k-m) w[m]
        let mut out = vec![Rational::new(); big_n + 1];
        for (m, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let base = Rational::from(binomial(big_n as i64, m as i64)) * w;
            for j in 0..=(big_n - m) {
                let mut term = Rational::from(&base * binomial((big_n - m) as i64, j as i64));
                if j % 2 == 1 {
                    term = -term;
                }
                out[m + j] += term;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string array serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|_| Error::Parse {
            what: "polynomial",
            input: s.chars().take(80).collect(),
        })
    }
}

impl fmt::Debug for PolyP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})p")?,
                _ => write!(f, "({c})p^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for PolyP {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.coeffs.iter().map(to_fraction_string).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyP {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs: Vec<String> = Vec::deserialize(d)?;
        let coeffs = strs
            .iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(PolyP::from_coeffs(coeffs))
    }
}

impl Add for &PolyP {
    type Output = PolyP;
    fn add(self, rhs: &PolyP) -> PolyP {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (a, b) in coeffs.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        PolyP::from_coeffs(coeffs)
    }
}

impl Sub for &PolyP {
    type Output = PolyP;
    fn sub(self, rhs: &PolyP) -> PolyP {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, Rational::new());
        for (a, b) in coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        PolyP::from_coeffs(coeffs)
    }
}

impl Mul for &PolyP {
    type Output = PolyP;
    fn mul(self, rhs: &PolyP) -> PolyP {
        if self.is_zero() || rhs.is_zero() {
            return PolyP::zero();
        }
        let mut coeffs = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        let mut tmp = Rational::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                tmp.assign(a * b);
                coeffs[i + j] += &tmp;
            }
        }
        PolyP::from_coeffs(coeffs)
    }
}

impl Neg for &PolyP {
    type Output = PolyP;
    fn neg(self) -> PolyP {
        PolyP {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PolyP {
            type Output = PolyP;
            fn $m(self, rhs: PolyP) -> PolyP {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn poly(cs: &[(i64, i64)]) -> PolyP {
        PolyP::from_coeffs(cs.iter().map(|&(n, d)| r(n, d)).collect())
    }

    fn f3() -> PolyP {
        poly(&[(1, 1), (-1, 2), (-1, 4), (1, 8)])
    }

    #[test]
    fn square_of_one_minus_half_p() {
        let y = PolyP::one_minus_half_p();
        assert_eq!(&y * &y, poly(&[(1, 1), (-1, 1), (1, 4)]));
    }

    #[test]
    fn adding_zero_is_identity() {
        assert_eq!(&f3() + &PolyP::zero(), f3());
        assert_eq!(&PolyP::zero() + &f3(), f3());
    }

    #[test]
    fn product_gives_f3() {
        let a = poly(&[(1, 1), (-1, 1), (1, 4)]);
        let b = poly(&[(1, 1), (1, 2)]);
        assert_eq!(&a * &b, f3());
    }

    #[test]
    fn trimming_and_degree() {
        let p = poly(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert!(PolyP::from_coeffs(vec![Rational::new()]).is_zero());
        assert_eq!(PolyP::zero().degree(), None);
        assert!((&f3() - &f3()).is_zero());
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(f3().eval(&r(1, 1)), r(3, 8));
        assert_eq!(f3().eval(&Rational::new()), r(1, 1));
        assert_eq!(PolyP::one_minus_half_p().eval(&r(1, 3)), r(5, 6));
        assert_eq!(PolyP::zero().eval(&r(1, 3)), Rational::new());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(f3().derivative_at_zero(1), r(-1, 2));
        assert_eq!(f3().derivative_at_zero(2), r(-1, 2));
        assert_eq!(f3().derivative_at_zero(0), r(1, 1));
        assert_eq!(f3().derivative_at_zero(3), r(3, 4));
        assert_eq!(f3().derivative_at_zero(9), Rational::new());
    }

    #[test]
    fn json_format_is_array_of_fractions() {
        assert_eq!(f3().to_json(), r#"["1/1","-1/2","-1/4","1/8"]"#);
        assert_eq!(PolyP::from_json(&f3().to_json()).unwrap(), f3());
        assert_eq!(PolyP::zero().to_json(), "[]");
        assert!(PolyP::from_json("[\"x\"]").is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let y = PolyP::one_minus_half_p();
        assert_eq!(y.pow(3), &(&y * &y) * &y);
        assert_eq!(y.pow(0), PolyP::one());
    }

    #[test]
    fn mixture_of_constant_weights_is_constant() {
        let w = vec![r(2, 3); 6];
        assert_eq!(PolyP::binomial_mixture(&w), PolyP::constant(r(2, 3)));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| r(n, d))
    }

    fn arb_poly() -> impl Strategy<Value = PolyP> {
        proptest::collection::vec(arb_rational(), 0..8).prop_map(PolyP::from_coeffs)
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(Rational::from(&a + &b) + &c, a.clone() + Rational::from(&b + &c));
            prop_assert_eq!(Rational::from(&a * &b), Rational::from(&b * &a));
            prop_assert_eq!(
                &a * Rational::from(&b + &c),
                Rational::from(&a * &b) + Rational::from(&a * &c)
            );
        }

        #[test]
        fn eval_matches_naive_sum(p in arb_poly(), x in arb_rational()) {
            let mut naive = Rational::new();
            let mut xp = Rational::from(1);
            for c in p.coeffs() {
                naive += Rational::from(c * &xp);
                xp *= &x;
            }
            prop_assert_eq!(p.eval(&x), naive);
        }

        #[test]
        fn derivative_is_factorial_times_coeff(p in arb_poly(), m in 0usize..8) {
            let expected = p.coeff(m) * Integer::from(Integer::factorial(m as u32));
            prop_assert_eq!(p.derivative_at_zero(m), expected);
        }

        #[test]
        fn product_degree_adds(a in arb_poly(), b in arb_poly()) {
            let prod = &a * &b;
            match (a.degree(), b.degree()) {
                (Some(da), Some(db)) => prop_assert_eq!(prod.degree(), Some(da + db)),
                _ => prop_assert!(prod.is_zero()),
            }
        }

        #[test]
        fn evaluation_is_a_ring_map(a in arb_poly(), b in arb_poly(), x in arb_rational()) {
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!((&a - &b).eval(&x), a.eval(&x) - b.eval(&x));
        }

        #[test]
        fn json_round_trip(a in arb_poly()) {
            prop_assert_eq!(PolyP::from_json(&a.to_json()).unwrap(), a);
        }
    }
}
