use orientcov_core::asymptotics::{approx_cov, approx_q, solve_pc, varcond_terms};
use orientcov_core::gnm::{decompose, no_edge_prob, q_exact, GnmTables, MSignChange};
use orientcov_core::gnp::{
    annealed_exact, annealed_exact_range, annealed_polys, annealed_polys_range, cov_gnp_float,
    critical_ps_of, Guards,
};
use orientcov_core::graph::GraphModel;
use orientcov_core::oracle::{oracle_counts, ORACLE_MAX_N};
use orientcov_core::rational::{check_probability, to_decimal_string, to_fraction_string};
use orientcov_core::roots::{find_sign_changes, SignScan, DEFAULT_GRID_POINTS};
use orientcov_core::sim::{
    estimate_annealed, estimate_quenched, quenched_scan, SeMethod, SimResult,
};
use orientcov_core::{Error, Float, Model, Rational};

use crate::{Backend, CliError, Command, Global, ModelKind, NRange, Regime, SimArgs, Table};

/// Numeric runs above this `n` need `--long-run`.
pub const LONG_RUN_NUMERIC_N: usize = 100;

pub(crate) fn dispatch(g: &Global, cmd: &Command) -> Result<Table, CliError> {
    match cmd {
        Command::Curve { n, p } => curve(g, *n, p),
        Command::Zeros { n, annealed_only } => zeros(g, *n, *annealed_only),
        Command::Decompose { n, p } => decomposition(g, *n, p),
        Command::Quenched { n, sim } => quenched(g, *n, sim),
        Command::Pc => pc(g),
        Command::GnmTable { n } => gnm_table(g, *n),
        Command::QExact { l, n, m } => q_table(g, *l, *n, *m),
        Command::Simulate {
            n,
            model,
            p,
            m,
            regime,
            jackknife,
            sim,
        } => simulate(*n, *model, p.as_ref(), *m, *regime, *jackknife, sim),
    }
}

/// Column layout: plain columns, then one decimal column per quantity, then
/// (with `--exact`) one `<name>_exact` fraction column per quantity.
struct Layout {
    digits: usize,
    exact: bool,
    plain: usize,
    quantities: usize,
}

impl Layout {
    fn table(
        g: &Global,
        command: &str,
        plain: &[&str],
        quantities: &[&str],
        digits: usize,
    ) -> (Layout, Table) {
        let mut columns: Vec<String> = plain
            .iter()
            .chain(quantities)
            .map(|c| c.to_string())
            .collect();
        if g.exact {
            columns.extend(quantities.iter().map(|q| format!("{q}_exact")));
        }
        let layout = Layout {
            digits: g.digits.unwrap_or(digits),
            exact: g.exact,
            plain: plain.len(),
            quantities: quantities.len(),
        };
        (layout, Table::from_columns(command, columns))
    }

    fn row(&self, plain: Vec<String>, values: &[Option<Rational>]) -> Vec<String> {
        debug_assert_eq!((plain.len(), values.len()), (self.plain, self.quantities));
        let mut row = plain;
        row.extend(values.iter().map(|v| {
            v.as_ref()
                .map_or(String::new(), |r| to_decimal_string(r, self.digits))
        }));
        if self.exact {
            row.extend(
                values
                    .iter()
                    .map(|v| v.as_ref().map_or(String::new(), to_fraction_string)),
            );
        }
        row
    }
}

fn guards(g: &Global) -> Guards {
    if g.allow_large {
        Guards::unlimited()
    } else {
        Guards::default()
    }
}

fn p_grid(explicit: &[Rational], grid: usize) -> Result<Vec<Rational>, CliError> {
    if explicit.is_empty() {
        return Ok((1..=grid as i64)
            .map(|k| Rational::from((k, grid as i64)))
            .collect());
    }
    for p in explicit {
        check_probability("p", p)?;
    }
    Ok(explicit.to_vec())
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n < 3 {
        return Err(CliError::Usage(format!("n = {n}: covariances need n >= 3")));
    }
    Ok(())
}

fn rpow(x: &Rational, mut e: usize) -> Rational {
    let mut base = x.clone();
    let mut acc = Rational::from(1);
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = Rational::from(base.square_ref());
        e >>= 1;
    }
    acc
}

/// `3 (1 - p/2)^(2n-3)`
fn normalizer(n: usize, p: &Rational) -> Rational {
    let y = 1 - Rational::from(p / 2u32) ;
    rpow(&y, 2 * n - 3) * 3u32
}

fn float_q(f: &Float) -> Option<Rational> {
    f.to_rational()
}

fn ratio(a: &Rational, b: &Rational) -> Option<Rational> {
    (!b.is_zero()).then(|| Rational::from(a / b))
}

fn progress(label: &'static str) -> impl Fn(usize, usize) + Sync {
    move |done, total| eprintln!("{label}: {done}/{total} primes")
}

fn tolerance(g: &Global, default: f64) -> Result<Rational, CliError> {
    let t = g.tol.unwrap_or(default);
    Rational::from_f64(t).ok_or_else(|| CliError::Usage(format!("--tol {t} is not finite")))
}

/// `(f, g)` per `(n, p)`, rows ordered by `n` then `p`.
fn annealed_grid(
    g: &Global,
    n: NRange,
    ps: &[Rational],
) -> Result<Vec<(usize, Rational, Rational, Rational)>, CliError> {
    check_n(n.lo)?;
    let mut out = Vec::new();
    match g.backend {
        Backend::Symbolic => {
            let cb = progress("symbolic");
            let polys =
                annealed_polys_range(n.lo, n.hi, &guards(g), g.long_run.then_some(&cb as _))?;
            for poly in &polys {
                for p in ps {
                    out.push((poly.n, p.clone(), poly.f.eval(p), poly.g.eval(p)));
                }
            }
        }
        Backend::Numeric => {
            if n.hi > LONG_RUN_NUMERIC_N && !g.long_run {
                return Err(CliError::Usage(format!(
                    "numeric n = {} exceeds {LONG_RUN_NUMERIC_N}; pass --long-run",
                    n.hi
                )));
            }
            let cb = progress("numeric");
            let mut per_p = Vec::new();
            for p in ps {
                per_p.push(annealed_exact_range(
                    n.lo,
                    n.hi,
                    p,
                    &guards(g),
                    g.long_run.then_some(&cb as _),
                )?);
            }
            for k in 0..=(n.hi - n.lo) {
                for reports in &per_p {
                    let r = &reports[k];
                    out.push((
                        r.n,
                        r.parameter.clone(),
                        r.prob_a.clone(),
                        r.prob_ab.clone(),
                    ));
                }
            }
        }
        Backend::Float => {
            for nn in n.lo..=n.hi {
                for p in ps {
                    let c = cov_gnp_float(nn, p, g.precision_bits)?;
                    let f = float_q(&c.prob_a).unwrap_or_default();
                    let gg = float_q(&c.prob_ab).unwrap_or_default();
                    out.push((nn, p.clone(), f, gg));
                }
            }
        }
    }
    Ok(out)
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Symbolic => "symbolic",
        Backend::Numeric => "numeric",
        Backend::Float => "float",
    }
}

fn curve(g: &Global, n: NRange, ps: &[Rational]) -> Result<Table, CliError> {
    let ps = p_grid(ps, g.grid.unwrap_or(512))?;
    let (layout, mut table) = Layout::table(
        g,
        "curve",
        &["n", "backend"],
        &[
            "p",
            "f",
            "g",
            "cov",
            "relcov",
            "normalized_cov",
            "asymptote",
        ],
        12,
    );
    for (nn, p, f, gg) in annealed_grid(g, n, &ps)? {
        let cov = &gg - Rational::from(f.square_ref()) ;
        let relcov = ratio(&cov, &gg);
        let normalized = ratio(&cov, &normalizer(nn, &p));
        let asymptote = (Rational::from(&p * 2u32) - 1u32) / 3u32;
        table.push(layout.row(
            vec![nn.to_string(), backend_name(g.backend).into()],
            &[
                Some(p),
                Some(f),
                Some(gg),
                Some(cov),
                relcov,
                normalized,
                Some(asymptote),
            ],
        ));
    }
    Ok(table)
}

fn annealed_scan(g: &Global, n: usize, tol: &Rational, grid: usize) -> Result<SignScan, CliError> {
    let (zero, one) = (Rational::new(), Rational::from(1));
    Ok(match g.backend {
        Backend::Symbolic => critical_ps_of(&annealed_polys(n, &guards(g))?, tol, grid)?,
        Backend::Numeric => {
            let gu = guards(g);
            annealed_exact(n, &one, &gu, None)?;
            find_sign_changes(
                |p| {
                    let (f, gg) = annealed_exact(n, p, &gu, None).expect("validated above");
                    gg - f.square()
                },
                &zero,
                &one,
                grid,
                tol,
            )?
        }
        Backend::Float => {
            cov_gnp_float(n, &one, g.precision_bits)?;
            find_sign_changes(
                |p| {
                    let c = cov_gnp_float(n, p, g.precision_bits).expect("validated above");
                    float_q(&c.cov).unwrap_or_default()
                },
                &zero,
                &one,
                grid,
                tol,
            )?
        }
    })
}

fn zeros(g: &Global, n: NRange, annealed_only: bool) -> Result<Table, CliError> {
    check_n(n.lo)?;
    let tol = tolerance(g, 1e-6)?;
    let grid = g.grid.unwrap_or(DEFAULT_GRID_POINTS);
    let (layout, mut table) = Layout::table(
        g,
        "zeros",
        &["n", "regime", "zeros"],
        &["p1", "p2", "p3", "n_p1", "n_p2"],
        6,
    );
    let quenched_max = if g.long_run {
        ORACLE_MAX_N + 1
    } else {
        ORACLE_MAX_N
    };
    for nn in n.lo..=n.hi {
        let mut scans = vec![("annealed", annealed_scan(g, nn, &tol, grid)?)];
        if !annealed_only && nn <= quenched_max {
            let q = oracle_counts(nn, g.long_run)?.quenched_poly();
            let scan = find_sign_changes(
                |p| q.eval(p),
                &Rational::new(),
                &Rational::from(1),
                grid,
                &tol,
            )?;
            scans.push(("quenched", scan));
        }
        for (regime, scan) in scans {
            for w in &scan.warnings {
                eprintln!("n = {nn}, {regime}: {w}");
            }
            let at = |i: usize| scan.roots.get(i).map(|r| r.location());
            let scaled = |i: usize| at(i).map(|p| p * nn as u32);
            table.push(layout.row(
                vec![nn.to_string(), regime.into(), scan.roots.len().to_string()],
                &[at(0), at(1), at(2), scaled(0), scaled(1)],
            ));
        }
    }
    Ok(table)
}

fn decomposition(g: &Global, n: NRange, ps: &[Rational]) -> Result<Table, CliError> {
    check_n(n.lo)?;
    let ps = p_grid(ps, g.grid.unwrap_or(50))?;
    let (layout, mut table) = Layout::table(
        g,
        "decompose",
        &["n", "identity"],
        &[
            "p",
            "annealed_cov",
            "expected_conditional_cov",
            "variance_of_conditional",
            "normalizer",
            "annealed_norm",
            "expected_conditional_norm",
            "variance_norm",
            "asymptotic_annealed_norm",
            "asymptotic_conditional_norm",
            "asymptotic_variance_norm",
        ],
        12,
    );
    let bits = g.precision_bits;
    for nn in n.lo..=n.hi {
        let polys = annealed_polys(nn, &guards(g))?;
        let tables = GnmTables::from_polys(&polys)?;
        for p in &ps {
            let d = decompose(&polys, &tables, p)?;
            let z = normalizer(nn, p);
            let norm = |v: &Rational| ratio(v, &z);
            let (asym_cov, asym_cond, asym_var) = if p.is_zero() {
                (None, None, None)
            } else {
                let (cond, var) = varcond_terms(nn, p, bits)?;
                let cov = approx_cov(nn, p, Model::Gnp, bits)?;
                (
                    float_q(&cov).and_then(|v| norm(&v)),
                    float_q(&cond).and_then(|v| norm(&v)),
                    float_q(&var).and_then(|v| norm(&v)),
                )
            };
            table.push(layout.row(
                vec![nn.to_string(), "exact".into()],
                &[
                    Some(p.clone()),
                    Some(d.annealed_cov.clone()),
                    Some(d.expected_conditional_cov.clone()),
                    Some(d.variance_of_conditional.clone()),
                    Some(z.clone()),
                    norm(&d.annealed_cov),
                    norm(&d.expected_conditional_cov),
                    norm(&d.variance_of_conditional),
                    asym_cov,
                    asym_cond,
                    asym_var,
                ],
            ));
        }
    }
    Ok(table)
}

fn quenched(g: &Global, n: usize, sim: &SimArgs) -> Result<Table, CliError> {
    check_n(n)?;
    let ps = p_grid(&[], g.grid.unwrap_or(50))?;
    let (layout, mut table) = Layout::table(
        g,
        "quenched",
        &["series", "n", "method", "m"],
        &[
            "x",
            "annealed",
            "quenched",
            "quenched_se",
            "cross_term",
            "quenched_gnp_at_x",
            "gap",
        ],
        12,
    );
    let exact = n <= ORACLE_MAX_N || (n == ORACLE_MAX_N + 1 && g.long_run);
    if exact {
        let counts = oracle_counts(n, g.long_run)?;
        let (fa, fb, gab) = counts.annealed_polys();
        let annealed = &gab - &(&fa * &fb);
        let q = counts.quenched_poly();
        let cross = counts.cross_term_poly();
        for p in &ps {
            let c = cross.eval(p);
            if n <= ORACLE_MAX_N && c < 0 {
                return Err(Error::IdentityViolation(format!(
                    "quenched covariance exceeds annealed at n = {n}, p = {}",
                    to_fraction_string(p)
                ))
                .into());
            }
            table.push(layout.row(
                vec!["gnp".into(), n.to_string(), "exact".into(), String::new()],
                &[
                    Some(p.clone()),
                    Some(annealed.eval(p)),
                    Some(q.eval(p)),
                    None,
                    Some(c),
                    None,
                    None,
                ],
            ));
        }
        let big_n = counts.edges();
        let mut max_gap = Rational::new();
        for m in 0..=big_n {
            let x = Rational::from((m as i64, big_n as i64));
            let qm = counts.gnm_quenched_cov(m)?;
            let at_x = q.eval(&x);
            let gap = Rational::from(&qm - &at_x);
            if Rational::from(gap.abs_ref()) > max_gap {
                max_gap = Rational::from(gap.abs_ref());
            }
            table.push(layout.row(
                vec!["gnm".into(), n.to_string(), "exact".into(), m.to_string()],
                &[
                    Some(x),
                    Some(counts.gnm_annealed_cov(m)?),
                    Some(qm),
                    None,
                    None,
                    Some(at_x),
                    Some(gap),
                ],
            ));
        }
        table.push(layout.row(
            vec![
                "max_gap".into(),
                n.to_string(),
                "exact".into(),
                String::new(),
            ],
            &[None, None, None, None, None, None, Some(max_gap)],
        ));
    } else {
        let polys = annealed_polys(n, &guards(g))?;
        let scan = quenched_scan(n, &ps, sim.trials, sim.seed, sim.streams)?;
        for (p, est) in ps.iter().zip(scan.results()) {
            let annealed = polys.cov_at(p);
            let qe = Rational::from_f64(est.cov);
            let cross = qe.as_ref().map(|q| Rational::from(&annealed - q));
            table.push(layout.row(
                vec![
                    "gnp".into(),
                    n.to_string(),
                    "monte_carlo".into(),
                    String::new(),
                ],
                &[
                    Some(p.clone()),
                    Some(annealed),
                    qe,
                    Rational::from_f64(est.se_cov),
                    cross,
                    None,
                    None,
                ],
            ));
        }
    }
    Ok(table)
}

/// Rounds to `places` decimal places and prints without exponent.
pub fn fixed_decimal(r: &Rational, places: usize) -> String {
    let scale = rpow(&Rational::from(10), places);
    let scaled = Rational::from(r * &scale).round();
    let digits = scaled.numer().clone().abs().to_string();
    let sign = if scaled < 0 { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{int}.{frac}")
}

fn pc(g: &Global) -> Result<Table, CliError> {
    let digits = g.digits.unwrap_or(9);
    let tol = g.tol.unwrap_or(10f64.powi(-(digits as i32) - 3));
    if !(tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let sol = solve_pc(tol, g.precision_bits.max(64))?;
    let mut table = Table::new(
        "pc",
        &[
            "p_c",
            "p_c_full",
            "residual",
            "bracket_width",
            "monotone",
            "min_derivative",
        ],
    );
    let p_c = float_q(&sol.p_c).expect("finite root");
    table.push(vec![
        fixed_decimal(&p_c, digits),
        sol.p_c.to_string_radix(10, Some(30)),
        sol.residual.to_string_radix(10, Some(6)),
        sol.width.to_string_radix(10, Some(6)),
        sol.monotone.to_string(),
        sol.min_derivative.to_string_radix(10, Some(12)),
    ]);
    Ok(table)
}

fn gnm_table(g: &Global, n: usize) -> Result<Table, CliError> {
    check_n(n)?;
    let tables = GnmTables::new(n, &guards(g))?;
    let (layout, mut table) = Layout::table(
        g,
        "gnm-table",
        &["n", "m", "sign", "sign_change"],
        &["m_over_n", "h", "k", "cov", "relcov"],
        12,
    );
    let changes = tables.sign_changes();
    for row in tables.rows() {
        let change = changes.iter().find_map(|c| match *c {
            MSignChange::Zero { m } if m == row.m => Some("zero"),
            MSignChange::Between { m } if m == row.m => Some("after"),
            _ => None,
        });
        let sign = match row.cov.cmp0() {
            std::cmp::Ordering::Less => "-",
            std::cmp::Ordering::Equal => "0",
            std::cmp::Ordering::Greater => "+",
        };
        let relcov = ratio(&row.cov, &row.k);
        table.push(layout.row(
            vec![
                n.to_string(),
                row.m.to_string(),
                sign.into(),
                change.unwrap_or("").into(),
            ],
            &[
                Some(Rational::from((row.m as i64, tables.big_n as i64))),
                Some(row.h),
                Some(row.k),
                Some(row.cov),
                relcov,
            ],
        ));
    }
    Ok(table)
}

fn q_table(g: &Global, l: usize, n: usize, m: usize) -> Result<Table, CliError> {
    if n < 2 {
        return Err(CliError::Usage("q-exact needs n >= 2".into()));
    }
    let q = q_exact(l, n, m)?;
    let big_n = n * (n - 1) / 2;
    let p = Rational::from((m as i64, big_n as i64));
    let bound = rpow(&(1 - Rational::from(&p / 2u32)), l);
    let approx = if m == 0 {
        None
    } else {
        approx_q(l, n, m, g.precision_bits)?.to_rational()
    };
    let (layout, mut table) = Layout::table(
        g,
        "q-exact",
        &["l", "n", "m"],
        &["p", "q_exact", "annealed_bound", "approx_q", "no_edge"],
        12,
    );
    table.push(layout.row(
        vec![l.to_string(), n.to_string(), m.to_string()],
        &[
            Some(p),
            Some(q),
            Some(bound),
            approx,
            Some(no_edge_prob(l, n, m)?),
        ],
    ));
    Ok(table)
}

const SIM_COLUMNS: [&str; 16] = [
    "regime",
    "n",
    "model",
    "parameter",
    "trials",
    "seed",
    "stream_count",
    "p_a",
    "p_b",
    "p_ab",
    "product",
    "cov",
    "se_p_a",
    "se_p_b",
    "se_p_ab",
    "se_cov",
];

fn simulate(
    n: usize,
    model: ModelKind,
    p: Option<&Rational>,
    m: Option<usize>,
    regime: Regime,
    jackknife: bool,
    sim: &SimArgs,
) -> Result<Table, CliError> {
    let (graph_model, model_name, parameter) = match (model, p, m) {
        (ModelKind::Gnp, Some(p), None) => {
            (GraphModel::Gnp(p.clone()), "gnp", to_fraction_string(p))
        }
        (ModelKind::Gnm, None, Some(m)) => (GraphModel::Gnm(m), "gnm", m.to_string()),
        _ => {
            return Err(CliError::Usage(
                "give --p with --model gnp, or --m with --model gnm".into(),
            ))
        }
    };
    let res: SimResult = match regime {
        Regime::Annealed => {
            let se = if jackknife {
                SeMethod::Jackknife
            } else {
                SeMethod::Delta
            };
            estimate_annealed(n, &graph_model, sim.trials, sim.seed, sim.streams, se)?
        }
        Regime::Quenched if jackknife => {
            return Err(CliError::Usage(
                "--jackknife applies to the annealed estimator only".into(),
            ))
        }
        Regime::Quenched => estimate_quenched(n, &graph_model, sim.trials, sim.seed, sim.streams)?,
    };
    let mut table = Table::new("simulate", &SIM_COLUMNS);
    let regime_name = match res.regime {
        orientcov_core::sim::Regime::Annealed => "annealed",
        orientcov_core::sim::Regime::Quenched => "quenched",
    };
    table.push(vec![
        regime_name.into(),
        res.n.to_string(),
        model_name.into(),
        parameter.clone(),
        res.trials.to_string(),
        res.seed.to_string(),
        res.stream_count.to_string(),
        res.p_a.to_string(),
        res.p_b.to_string(),
        res.p_ab.to_string(),
        res.product.to_string(),
        res.cov.to_string(),
        res.se_p_a.to_string(),
        res.se_p_b.to_string(),
        res.se_p_ab.to_string(),
        res.se_cov.to_string(),
    ]);
    let mut json = serde_json::to_value(&res).map_err(std::io::Error::from)?;
    if let Some(obj) = json.as_object_mut() {
        obj.insert("model".into(), model_name.into());
        obj.insert("parameter".into(), parameter.into());
    }
    table.json = Some(json);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_decimal_rounds() {
        let r = Rational::from((799_288_221_4i64, 10_000_000_000i64));
        assert_eq!(fixed_decimal(&r, 9), "0.799288221");
        assert_eq!(fixed_decimal(&r, 3), "0.799");
        assert_eq!(fixed_decimal(&Rational::from((-1, 8)), 2), "-0.13");
        assert_eq!(fixed_decimal(&Rational::from(3), 0), "3");
        assert_eq!(fixed_decimal(&Rational::from((1, 200)), 2), "0.01");
    }

    #[test]
    fn normalizer_small() {
        assert_eq!(normalizer(3, &Rational::from(1)), Rational::from((3, 8)));
    }
}
