//! Commutative rings the cluster recursions can be evaluated in.
//!
//! The recursions only ever add, subtract and multiply, so the same table
//! code runs symbolically ([`PolyRing`]), at a fixed rational `p`
//! ([`RationalRing`]), in high-precision floating point ([`FloatRing`]) or
//! modulo a word-sized prime ([`crate::modular::PrimeField`]).

use rug::{Float, Integer, Rational};

use crate::poly::PolyP;

pub trait Ring {
    type Elem: Clone;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_integer(&self, v: &Integer) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn from_u64(&self, v: u64) -> Self::Elem {
        self.from_integer(&Integer::from(v))
    }

    fn add_assign(&self, acc: &mut Self::Elem, b: &Self::Elem) {
        *acc = self.add(acc, b);
    }

    fn mul3(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(a, b), c)
    }

    fn pow(&self, base: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut b = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RationalRing;

impl Ring for RationalRing {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::new()
    }
    fn one(&self) -> Rational {
        Rational::from(1)
    }
    fn from_integer(&self, v: &Integer) -> Rational {
        Rational::from(v)
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a + b)
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a - b)
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a * b)
    }
    fn add_assign(&self, acc: &mut Rational, b: &Rational) {
        *acc += b;
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PolyRing;

impl Ring for PolyRing {
    type Elem = PolyP;

    fn zero(&self) -> PolyP {
        PolyP::zero()
    }
    fn one(&self) -> PolyP {
        PolyP::one()
    }
    fn from_integer(&self, v: &Integer) -> PolyP {
        PolyP::constant(Rational::from(v))
    }
    fn add(&self, a: &PolyP, b: &PolyP) -> PolyP {
        a + b
    }
    fn sub(&self, a: &PolyP, b: &PolyP) -> PolyP {
        a - b
    }
    fn mul(&self, a: &PolyP, b: &PolyP) -> PolyP {
        a * b
    }
}

/// Binary floating point with a fixed mantissa width.
#[derive(Clone, Copy, Debug)]
pub struct FloatRing {
    pub precision_bits: u32,
}

impl FloatRing {
    /// Mantissa width used by the float backend unless overridden; enough to
    /// keep `g - f^2` meaningful up to `n = 300`.
    pub const DEFAULT_BITS: u32 = 2560;

    pub fn new(precision_bits: u32) -> Self {
        FloatRing { precision_bits }
    }

    pub fn from_rational(&self, r: &Rational) -> Float {
        Float::with_val(self.precision_bits, r)
    }
}

impl Ring for FloatRing {
    type Elem = Float;

    fn zero(&self) -> Float {
        Float::new(self.precision_bits)
    }
    fn one(&self) -> Float {
        Float::with_val(self.precision_bits, 1)
    }
    fn from_integer(&self, v: &Integer) -> Float {
        Float::with_val(self.precision_bits, v)
    }
    fn add(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.precision_bits, a + b)
    }
    fn sub(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.precision_bits, a - b)
    }
    fn mul(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.precision_bits, a * b)
    }
    fn add_assign(&self, acc: &mut Float, b: &Float) {
        *acc += b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_by_squaring() {
        let r = RationalRing;
        assert_eq!(r.pow(&Rational::from((2, 3)), 5), Rational::from((32, 243)));
        assert_eq!(r.pow(&Rational::from(7), 0), 1);
        let p = PolyRing;
        assert_eq!(
            p.pow(&PolyP::one_minus_half_p(), 3),
            PolyP::one_minus_half_p().pow(3)
        );
    }

    #[test]
    fn float_ring_keeps_precision() {
        let f = FloatRing::new(200);
        let third = f.from_rational(&Rational::from((1, 3)));
        let back = f.mul(&third, &f.from_u64(3));
        let err = Float::with_val(200, &back - 1u32).abs();
        assert!(err < Float::with_val(200, Float::i_exp(1, -190)));
    }
}
