//! Exact `f_n(p) = P(s -/-> b)` and `g_n(p) = P(a -/-> s, s -/-> b)` in
//! randomly oriented `G(n, p)`.
//!
//! Two routes compute the same numbers:
//!
//! * [`ClusterTables`] evaluates the cluster recursions directly in a ring
//!   ([`symbolic_tables`], [`numeric_tables`], [`float_tables`]); it exposes
//!   the individual `d` and `M` entries.
//! * the multi-modular engine behind [`annealed_polys`] and [`annealed_exact`]
//!   runs the same tables modulo word-sized primes and reconstructs exact
//!   results. This is what makes `n = 30` polynomials and `n = 300` exact
//!   values cheap.

mod engine;
pub mod tables;

use rug::{Float, Rational};
use serde::Serialize;

pub use engine::Progress;
pub use tables::ClusterTables;

use crate::error::{Error, Result};
use crate::poly::PolyP;
use crate::rational::{check_probability, serde_fraction};
use crate::report::{serialize_float, CovarianceReport, Model};
use crate::ring::{FloatRing, PolyRing, RationalRing, Ring};
use crate::roots::{find_sign_changes, SignScan};

/// Largest `n` computed symbolically unless the guard is lifted.
pub const SYMBOLIC_N_GUARD: usize = 40;
/// Largest `n` computed at a fixed `p` unless the guard is lifted.
pub const NUMERIC_N_GUARD: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Full polynomials in `p`, then evaluation.
    Symbolic,
    /// Exact rationals at the requested `p` only.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guards {
    pub symbolic_max_n: usize,
    pub numeric_max_n: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            symbolic_max_n: SYMBOLIC_N_GUARD,
            numeric_max_n: NUMERIC_N_GUARD,
        }
    }
}

impl Guards {
    pub fn unlimited() -> Self {
        Guards {
            symbolic_max_n: usize::MAX,
            numeric_max_n: usize::MAX,
        }
    }

    fn symbolic(&self, n: usize) -> Result<()> {
        if n > self.symbolic_max_n {
            return Err(Error::GuardExceeded {
                n,
                limit: self.symbolic_max_n,
                mode: "symbolic",
            });
        }
        Ok(())
    }

    fn numeric(&self, n: usize) -> Result<()> {
        if n > self.numeric_max_n {
            return Err(Error::GuardExceeded {
                n,
                limit: self.numeric_max_n,
                mode: "numeric",
            });
        }
        Ok(())
    }
}

/// Direct recursion tables with polynomial entries.
pub fn symbolic_tables(n_max: usize) -> ClusterTables<PolyRing> {
    let half_p = PolyP::p().scale(&Rational::from((1, 2)));
    ClusterTables::new(PolyRing, half_p, n_max)
}

/// Direct recursion tables with exact rational entries at a fixed `p`.
pub fn numeric_tables(p: &Rational, n_max: usize) -> Result<ClusterTables<RationalRing>> {
    check_probability("p", p)?;
    Ok(ClusterTables::new(
        RationalRing,
        Rational::from(p / 2u32),
        n_max,
    ))
}

/// Direct recursion tables in binary floating point.
pub fn float_tables(
    p: &Rational,
    n_max: usize,
    precision_bits: u32,
) -> Result<ClusterTables<FloatRing>> {
    check_probability("p", p)?;
    let ring = FloatRing::new(precision_bits);
    let half_p = ring.from_rational(&Rational::from(p / 2u32));
    Ok(ClusterTables::new(ring, half_p, n_max))
}

/// `f_n` and `g_n` as exact polynomials in `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnealedPolys {
    pub n: usize,
    pub f: PolyP,
    pub g: PolyP,
}

impl AnnealedPolys {
    /// `g_n - f_n^2`.
    pub fn cov(&self) -> PolyP {
        &self.g - &(&self.f * &self.f)
    }

    pub fn cov_at(&self, p: &Rational) -> Rational {
        let f = self.f.eval(p);
        self.g.eval(p) - f.square()
    }

    pub fn report_at(&self, p: &Rational) -> CovarianceReport {
        CovarianceReport::exact(
            self.n,
            Model::Gnp,
            p.clone(),
            self.f.eval(p),
            self.g.eval(p),
        )
    }
}

/// `f_n` as a polynomial (`n >= 2`).
pub fn f_poly(n: usize) -> Result<PolyP> {
    match n {
        0 | 1 => Err(Error::param("n", "f_n needs n >= 2")),
        2 => symbolic_tables(2).f(2),
        _ => Ok(annealed_polys(n, &Guards::default())?.f),
    }
}

/// `g_n` as a polynomial (`n >= 3`).
pub fn g_poly(n: usize) -> Result<PolyP> {
    Ok(annealed_polys(n, &Guards::default())?.g)
}

pub fn annealed_polys(n: usize, guards: &Guards) -> Result<AnnealedPolys> {
    Ok(annealed_polys_range(n, n, guards, None)?
        .pop()
        .expect("one entry"))
}

/// Polynomials for every `n` in `lo..=hi`, sharing one modular sweep.
pub fn annealed_polys_range(
    lo: usize,
    hi: usize,
    guards: &Guards,
    progress: Option<Progress<'_>>,
) -> Result<Vec<AnnealedPolys>> {
    if lo < 3 || lo > hi {
        return Err(Error::param(
            "n",
            format!("need 3 <= lo <= hi, got {lo}..={hi}"),
        ));
    }
    guards.symbolic(hi)?;
    Ok(engine::symbolic_range(lo, hi, progress)
        .into_iter()
        .zip(lo..)
        .map(|((f, g), n)| AnnealedPolys { n, f, g })
        .collect())
}

/// Exact `(f_n(p), g_n(p))` without forming polynomials.
pub fn annealed_exact(
    n: usize,
    p: &Rational,
    guards: &Guards,
    progress: Option<Progress<'_>>,
) -> Result<(Rational, Rational)> {
    let report = annealed_exact_range(n, n, p, guards, progress)?
        .pop()
        .expect("one entry");
    Ok((report.prob_a, report.prob_ab))
}

/// Exact covariance reports at a fixed `p` for every `n` in `lo..=hi`.
pub fn annealed_exact_range(
    lo: usize,
    hi: usize,
    p: &Rational,
    guards: &Guards,
    progress: Option<Progress<'_>>,
) -> Result<Vec<CovarianceReport>> {
    if lo < 3 || lo > hi {
        return Err(Error::param(
            "n",
            format!("need 3 <= lo <= hi, got {lo}..={hi}"),
        ));
    }
    check_probability("p", p)?;
    guards.numeric(hi)?;
    Ok(engine::numeric_range(lo, hi, p, progress)
        .into_iter()
        .zip(lo..)
        .map(|((f, g), n)| CovarianceReport::exact(n, Model::Gnp, p.clone(), f, g))
        .collect())
}

/// Exact covariance report for `G(n, p)` (`n >= 3`).
pub fn cov_gnp(n: usize, p: &Rational, backend: Backend) -> Result<CovarianceReport> {
    check_probability("p", p)?;
    match backend {
        Backend::Symbolic => Ok(annealed_polys(n, &Guards::default())?.report_at(p)),
        Backend::Numeric => Ok(annealed_exact_range(n, n, p, &Guards::default(), None)?
            .pop()
            .expect("one entry")),
    }
}

/// Float-backend counterpart of [`CovarianceReport`].
#[derive(Clone, Debug, Serialize)]
pub struct FloatCovariance {
    pub n: usize,
    #[serde(with = "serde_fraction")]
    pub p: Rational,
    pub precision_bits: u32,
    #[serde(serialize_with = "serialize_float")]
    pub prob_a: Float,
    #[serde(serialize_with = "serialize_float")]
    pub prob_ab: Float,
    #[serde(serialize_with = "serialize_float")]
    pub cov: Float,
    #[serde(serialize_with = "serialize_float")]
    pub relcov: Float,
}

pub fn cov_gnp_float(n: usize, p: &Rational, precision_bits: u32) -> Result<FloatCovariance> {
    if n < 3 {
        return Err(Error::param("n", "covariance needs n >= 3"));
    }
    let tables = float_tables(p, n, precision_bits)?;
    let ring = *tables.ring();
    let f = tables.f(n)?;
    let g = Float::with_val(
        precision_bits,
        tables.g_scaled(n)? / ((n - 1) * (n - 2)) as u32,
    );
    let cov = ring.sub(&g, &ring.mul(&f, &f));
    let relcov = Float::with_val(precision_bits, &cov / &g);
    Ok(FloatCovariance {
        n,
        p: p.clone(),
        precision_bits,
        prob_a: f,
        prob_ab: g,
        cov,
        relcov,
    })
}

/// All sign changes of `p -> cov(n, p)` on `(0, 1]`, from the exact polynomials.
pub fn critical_ps(n: usize, tol: &Rational, grid_points: usize) -> Result<SignScan> {
    let polys = annealed_polys(n, &Guards::default())?;
    critical_ps_of(&polys, tol, grid_points)
}

pub fn critical_ps_of(
    polys: &AnnealedPolys,
    tol: &Rational,
    grid_points: usize,
) -> Result<SignScan> {
    find_sign_changes(
        |p| polys.cov_at(p),
        &Rational::new(),
        &Rational::from(1),
        grid_points,
        tol,
    )
}
