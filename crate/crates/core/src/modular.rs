//! Word-sized prime fields, Chinese remaindering and interpolation.
//!
//! Exact results with very large numerators (the `n = 300` covariances carry
//! ~10^5-bit numerators) are computed residue by residue and reassembled with
//! the CRT. Every quantity reassembled here is an integer with a known bound,
//! so the reconstruction is exact once the prime product exceeds twice that
//! bound.

use std::sync::{Mutex, OnceLock};

use rug::integer::IsPrime;
use rug::ops::RemRounding;
use rug::Integer;

use crate::ring::Ring;

/// Primes are drawn downward from here; 62 bits keeps Montgomery sums in u128.
const PRIME_CEILING: u64 = (1 << 62) - 1;

/// `Z / pZ` for an odd prime `p < 2^62`, elements kept in Montgomery form.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    modulus: u64,
    /// `-p^{-1} mod 2^64`
    neg_inv: u64,
    /// `2^128 mod p`
    r2: u64,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Self {
        assert!(
            modulus % 2 == 1 && modulus < (1 << 62),
            "modulus must be odd and below 2^62"
        );
        // Newton iteration for p^{-1} mod 2^64
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(modulus.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % modulus as u128) as u64;
        let r2 = ((r as u128 * r as u128) % modulus as u128) as u64;
        PrimeField {
            modulus,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let s = ((t + m as u128 * self.modulus as u128) >> 64) as u64;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    /// Plain residue `v mod p` into Montgomery form.
    #[inline]
    pub fn elem(&self, v: u64) -> u64 {
        self.redc((v % self.modulus) as u128 * self.r2 as u128)
    }

    /// Montgomery form back to the plain residue in `[0, p)`.
    #[inline]
    pub fn residue(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(&a, self.modulus - 2)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        self.elem(1)
    }
    fn from_integer(&self, v: &Integer) -> u64 {
        self.elem(reduce(v, self.modulus))
    }
    #[inline]
    fn from_u64(&self, v: u64) -> u64 {
        self.elem(v)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.redc(*a as u128 * *b as u128)
    }
    #[inline]
    fn add_assign(&self, acc: &mut u64, b: &u64) {
        *acc = self.add(acc, b);
    }
}

/// `v mod p` in `[0, p)`.
pub fn reduce(v: &Integer, p: u64) -> u64 {
    Integer::from(v.rem_euc(p))
        .to_u64()
        .expect("residue fits in u64")
}

fn prime_cache() -> &'static Mutex<Vec<u64>> {
    static PRIMES: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    PRIMES.get_or_init(|| Mutex::new(Vec::new()))
}

/// The first `count` primes below `2^62`, in decreasing order.
pub fn primes(count: usize) -> Vec<u64> {
    let mut cache = prime_cache().lock().expect("prime cache poisoned");
    let mut candidate = cache.last().map_or(PRIME_CEILING, |&p| p - 2);
    while cache.len() < count {
        if Integer::from(candidate).is_probably_prime(30) != IsPrime::No {
            cache.push(candidate);
        }
        candidate -= 2;
    }
    cache[..count].to_vec()
}

/// Enough primes (none dividing `avoid`) for their product to exceed `2^bits`.
pub fn primes_for_bits(bits: u64, avoid: &Integer) -> Vec<u64> {
    let mut want = (bits / 61 + 1) as usize;
    loop {
        let ps: Vec<u64> = primes(want)
            .into_iter()
            .filter(|&p| !avoid.is_divisible(&Integer::from(p)))
            .collect();
        let have: f64 = ps.iter().map(|&p| (p as f64).log2()).sum();
        if have > bits as f64 + 1.0 {
            return ps;
        }
        want += 1 + want / 16;
    }
}

/// Chinese remaindering of residues (plain, not Montgomery form).
///
/// With `signed`, the result is taken in `(-P/2, P/2]`, otherwise in `[0, P)`,
/// where `P` is the product of the moduli.
pub fn crt(residues: &[u64], moduli: &[u64], signed: bool) -> Integer {
    assert_eq!(residues.len(), moduli.len());
    let mut x = Integer::new();
    let mut prod = Integer::from(1);
    for (&r, &p) in residues.iter().zip(moduli) {
        let field = PrimeField::new(p);
        let x_mod = reduce(&x, p);
        let prod_mod = reduce(&prod, p);
        // t = (r - x) / prod  (mod p)
        let diff = field.sub(&field.elem(r), &field.elem(x_mod));
        let t = field.residue(field.mul(&diff, &field.inv(field.elem(prod_mod))));
        x += Integer::from(&prod * t);
        prod *= p;
    }
    if signed {
        let half = Integer::from(&prod >> 1);
        if x > half {
            x -= &prod;
        }
    }
    x
}

/// Monomial coefficients (Montgomery form) of the unique polynomial of degree
/// `<= values.len() - 1` taking `values[i]` at `x = i`.
pub fn interpolate_on_naturals(field: &PrimeField, values: &[u64]) -> Vec<u64> {
    let len = values.len();
    if len == 0 {
        return Vec::new();
    }
    // forward differences: diffs[k] = Delta^k v(0)
    let mut work = values.to_vec();
    let mut diffs = Vec::with_capacity(len);
    for k in 0..len {
        diffs.push(work[0]);
        for i in 0..len - 1 - k {
            work[i] = field.sub(&work[i + 1], &work[i]);
        }
    }
    // Newton form sum_k diffs[k]/k! * x(x-1)...(x-k+1), expanded by Horner
    let mut inv_fact = vec![field.one(); len];
    let mut fact = field.one();
    for k in 1..len {
        fact = field.mul(&fact, &field.from_u64(k as u64));
        inv_fact[k] = fact;
    }
    for f in inv_fact.iter_mut().skip(1) {
        *f = field.inv(*f);
    }
    let mut poly: Vec<u64> = vec![field.mul(&diffs[len - 1], &inv_fact[len - 1])];
    for k in (0..len - 1).rev() {
        let kk = field.from_u64(k as u64);
        // poly <- poly * (x - k) + a_k
        let mut next = vec![0u64; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = field.add(&next[i + 1], c);
            next[i] = field.sub(&next[i], &field.mul(c, &kk));
        }
        next[0] = field.add(&next[0], &field.mul(&diffs[k], &inv_fact[k]));
        poly = next;
    }
    poly
}
