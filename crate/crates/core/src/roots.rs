//! Sign-change scanning with exact bisection refinement.

use std::cmp::Ordering;

use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::serde_fraction;

/// Grid size used by the covariance zero scans unless overridden.
pub const DEFAULT_GRID_POINTS: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: &Rational) -> Sign {
        match v.cmp0() {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

/// An interval whose endpoints have opposite, exactly known signs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracket {
    #[serde(with = "serde_fraction")]
    pub lo: Rational,
    #[serde(with = "serde_fraction")]
    pub hi: Rational,
    pub sign_lo: Sign,
    pub sign_hi: Sign,
}

impl Bracket {
    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    pub fn midpoint(&self) -> Rational {
        Rational::from(&self.lo + &self.hi) / 2u32
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Root {
    /// The function evaluated to exactly zero here.
    Exact {
        #[serde(with = "serde_fraction")]
        at: Rational,
    },
    /// A sign change refined to a bracket no wider than the tolerance.
    Bracketed(Bracket),
}

impl Root {
    /// The exact zero, or the bracket midpoint.
    pub fn location(&self) -> Rational {
        match self {
            Root::Exact { at } => at.clone(),
            Root::Bracketed(b) => b.midpoint(),
        }
    }

    pub fn width(&self) -> Rational {
        match self {
            Root::Exact { .. } => Rational::new(),
            Root::Bracketed(b) => b.width(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Root::Exact { .. })
    }

    pub fn to_f64(&self) -> f64 {
        self.location().to_f64()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SignScan {
    /// Strictly increasing.
    pub roots: Vec<Root>,
    /// Places where the sampled curve approached zero without a detected sign
    /// change; a finer grid may reveal a pair of nearby roots there.
    pub warnings: Vec<String>,
}

/// Scans `(lo, hi]` on the grid `lo + i (hi - lo) / grid_points`, `i = 1..=grid_points`,
/// brackets every sign change between neighbours and bisects each bracket
/// down to width `<= tol`.
///
/// The left endpoint is excluded: the covariance curves all vanish
/// identically at `p = 0`.
pub fn find_sign_changes<F>(
    mut f: F,
    lo: &Rational,
    hi: &Rational,
    grid_points: usize,
    tol: &Rational,
) -> Result<SignScan>
where
    F: FnMut(&Rational) -> Rational,
{
    if grid_points < 2 {
        return Err(Error::param("grid_points", "need at least 2 grid points"));
    }
    if lo >= hi {
        return Err(Error::param("interval", "lo must be below hi"));
    }
    if *tol <= 0 {
        return Err(Error::param("tol", "tolerance must be positive"));
    }
    let step = Rational::from(hi - lo) / grid_points as u32;
    let xs: Vec<Rational> = (1..=grid_points)
        .map(|i| lo + Rational::from(&step * i as u32))
        .collect();
    let values: Vec<Rational> = xs.iter().map(&mut f).collect();

    let mut scan = SignScan::default();
    for i in 0..xs.len() {
        let s = Sign::of(&values[i]);
        if s == Sign::Zero {
            scan.roots.push(Root::Exact { at: xs[i].clone() });
            continue;
        }
        if i > 0 {
            let prev = Sign::of(&values[i - 1]);
            if prev != Sign::Zero && prev != s {
                let bracket = Bracket {
                    lo: xs[i - 1].clone(),
                    hi: xs[i].clone(),
                    sign_lo: prev,
                    sign_hi: s,
                };
                scan.roots.push(bisect(&mut f, bracket, tol));
            }
        }
        if i > 0 && i + 1 < xs.len() {
            let (a, b) = (&values[i - 1], &values[i + 1]);
            let same_sign = Sign::of(a) == s && Sign::of(b) == s;
            let (ma, mb, mc) = (a.clone().abs(), b.clone().abs(), values[i].clone().abs());
            if same_sign && mc < ma && mc < mb {
                scan.warnings.push(format!(
                    "curve approaches zero without crossing near {:.6}; raise grid_points to rule out a hidden root pair",
                    xs[i].to_f64()
                ));
            }
        }
    }
    Ok(scan)
}

fn bisect<F>(f: &mut F, mut b: Bracket, tol: &Rational) -> Root
where
    F: FnMut(&Rational) -> Rational,
{
    while b.width() > *tol {
        let mid = b.midpoint();
        let s = Sign::of(&f(&mid));
        if s == Sign::Zero {
            return Root::Exact { at: mid };
        }
        if s == b.sign_lo {
            b.lo = mid;
        } else {
            b.hi = mid;
        }
    }
    Root::Bracketed(b)
}
