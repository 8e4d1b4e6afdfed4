//! Memoized binomial coefficients.

use std::sync::{OnceLock, RwLock};

use rug::Integer;

/// Rows of Pascal's triangle are cached up to this index; larger rows go
/// straight to GMP's `mpz_bin_uiui`.
const CACHED_ROWS: usize = 1024;

fn table() -> &'static RwLock<Vec<Vec<Integer>>> {
    static TABLE: OnceLock<RwLock<Vec<Vec<Integer>>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![vec![Integer::from(1)]]))
}

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> Integer {
    if n < 0 || k < 0 || k > n {
        return Integer::new();
    }
    let (nu, ku) = (n as usize, k as usize);
    if nu >= CACHED_ROWS {
        return Integer::from(Integer::binomial_u(n as u32, k as u32));
    }
    {
        let rows = table().read().expect("binomial table poisoned");
        if let Some(row) = rows.get(nu) {
            return row[ku].clone();
        }
    }
    let mut rows = table().write().expect("binomial table poisoned");
    // another writer may have extended the table while we waited
    while rows.len() <= nu {
        let prev = rows.last().expect("row 0 always present");
        let mut row = Vec::with_capacity(prev.len() + 1);
        row.push(Integer::from(1));
        for w in prev.windows(2) {
            row.push(Integer::from(&w[0] + &w[1]));
        }
        row.push(Integer::from(1));
        rows.push(row);
    }
    rows[nu][ku].clone()
}

/// Multinomial `n! / (k_1! ... k_r!)`; zero unless the parts are
/// non-negative and sum to `n`.
pub fn multinomial(n: i64, parts: &[i64]) -> Integer {
    if parts.iter().any(|&k| k < 0) || parts.iter().sum::<i64>() != n {
        return Integer::new();
    }
    let mut rest = n;
    let mut acc = Integer::from(1);
    for &k in parts {
        acc *= binomial(rest, k);
        rest -= k;
    }
    acc
}
