//! Multi-modular evaluation of `f_n` and `g_n`.
//!
//! In the variable `x = p/2` every table entry is a polynomial with integer
//! coefficients (`y = 1 - x`, `q = 1 - 2x`). Hence:
//!
//! * symbolically, `f_n(x)` and `(n-1)(n-2) g_n(x)` have degree `<= N = C(n,2)`
//!   and coefficients bounded by `5^N` and `(n-1)(n-2) 5^N` in absolute value
//!   (each of the `3^N` edge states contributes `(1-2x)^a x^b`, whose
//!   coefficients sum to at most `3^a`);
//! * at `p/2 = a/c` in lowest terms, `c^N f_n` and `c^N (n-1)(n-2) g_n` are
//!   non-negative integers no larger than `c^N` resp. `(n-1)(n-2) c^N`.
//!
//! Both are recovered exactly from residues modulo enough 62-bit primes.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

use super::tables::ClusterTables;
use crate::modular::{crt, interpolate_on_naturals, primes_for_bits, PrimeField};
use crate::poly::PolyP;
use crate::ring::Ring;

/// Called as `(primes_done, primes_total)` after every prime.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

pub(crate) fn edges(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

fn log2_ceil_f(v: f64) -> u64 {
    v.max(1.0).log2().ceil() as u64
}

/// Exact `(f_n, g_n)` polynomials for every `n` in `lo..=hi` (`lo >= 3`).
pub(crate) fn symbolic_range(
    lo: usize,
    hi: usize,
    progress: Option<Progress<'_>>,
) -> Vec<(PolyP, PolyP)> {
    assert!(lo >= 3 && lo <= hi);
    let big_n = edges(hi);
    let weight = ((hi - 1) * (hi - 2)) as f64;
    let bits = (big_n as f64 * 5f64.log2()).ceil() as u64 + log2_ceil_f(weight) + 2;
    let moduli = primes_for_bits(bits, &Integer::from(1));
    let done = AtomicUsize::new(0);

    // residues[prime][n - lo] = (f coefficients, g' coefficients), plain residues
    let residues: Vec<Vec<(Vec<u64>, Vec<u64>)>> = moduli
        .par_iter()
        .map(|&modulus| {
            let field = PrimeField::new(modulus);
            let mut f_vals = vec![Vec::with_capacity(big_n + 1); hi - lo + 1];
            let mut g_vals = vec![Vec::with_capacity(big_n + 1); hi - lo + 1];
            for x in 0..=big_n as u64 {
                let tables = ClusterTables::new(field, field.from_u64(x), hi);
                for n in lo..=hi {
                    f_vals[n - lo].push(tables.f(n).expect("n within table range"));
                    g_vals[n - lo].push(tables.g_scaled(n).expect("n within table range"));
                }
            }
            let plain = |vals: &[u64], n: usize| -> Vec<u64> {
                let mut coeffs = interpolate_on_naturals(&field, vals);
                coeffs.truncate(edges(n) + 1);
                coeffs.into_iter().map(|c| field.residue(c)).collect()
            };
            let out = (lo..=hi)
                .map(|n| (plain(&f_vals[n - lo], n), plain(&g_vals[n - lo], n)))
                .collect();
            if let Some(cb) = progress {
                cb(done.fetch_add(1, Ordering::Relaxed) + 1, moduli.len());
            }
            out
        })
        .collect();

    (lo..=hi)
        .map(|n| {
            let idx = n - lo;
            let coeffs_of = |pick: fn(&(Vec<u64>, Vec<u64>)) -> &Vec<u64>| -> Vec<Integer> {
                (0..=edges(n))
                    .map(|i| {
                        let rs: Vec<u64> = residues.iter().map(|per| pick(&per[idx])[i]).collect();
                        crt(&rs, &moduli, true)
                    })
                    .collect()
            };
            let f = PolyP::from_half_variable(coeffs_of(|pair| &pair.0), &Integer::from(1));
            let g_den = Integer::from((n - 1) * (n - 2));
            let g = PolyP::from_half_variable(coeffs_of(|pair| &pair.1), &g_den);
            (f, g)
        })
        .collect()
}

/// Exact `(f_n, g_n)` at a fixed rational `p` for every `n` in `lo..=hi`.
pub(crate) fn numeric_range(
    lo: usize,
    hi: usize,
    p: &Rational,
    progress: Option<Progress<'_>>,
) -> Vec<(Rational, Rational)> {
    assert!(lo >= 3 && lo <= hi);
    let half = Rational::from(p / 2u32);
    let (a, c) = (half.numer().clone(), half.denom().clone());
    let big_n = edges(hi);
    let weight = ((hi - 1) * (hi - 2)) as f64;
    let c_bits = c.significant_bits() as f64;
    let bits = (big_n as f64 * c_bits).ceil() as u64 + log2_ceil_f(weight) + 2;
    let moduli = primes_for_bits(bits, &c);
    let done = AtomicUsize::new(0);

    let residues: Vec<Vec<(u64, u64)>> = moduli
        .par_iter()
        .map(|&modulus| {
            let field = PrimeField::new(modulus);
            let x = field.mul(&field.from_integer(&a), &field.inv(field.from_integer(&c)));
            let tables = ClusterTables::new(field, x, hi);
            let c_elem = field.from_integer(&c);
            let out = (lo..=hi)
                .map(|n| {
                    let scale = field.pow(&c_elem, edges(n) as u64);
                    let f = field.mul(&tables.f(n).expect("in range"), &scale);
                    let g = field.mul(&tables.g_scaled(n).expect("in range"), &scale);
                    (field.residue(f), field.residue(g))
                })
                .collect();
            if let Some(cb) = progress {
                cb(done.fetch_add(1, Ordering::Relaxed) + 1, moduli.len());
            }
            out
        })
        .collect();

    (lo..=hi)
        .map(|n| {
            let idx = n - lo;
            let den = Integer::from((&c).pow(edges(n) as u32));
            let f_res: Vec<u64> = residues.iter().map(|per| per[idx].0).collect();
            let g_res: Vec<u64> = residues.iter().map(|per| per[idx].1).collect();
            let f = Rational::from((crt(&f_res, &moduli, false), den.clone()));
            let g_den = den * Integer::from((n - 1) * (n - 2));
            let g = Rational::from((crt(&g_res, &moduli, false), g_den));
            (f, g)
        })
        .collect()
}
