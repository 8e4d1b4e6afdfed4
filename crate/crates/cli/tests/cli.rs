use std::process::Command as Process;

use clap::Parser;
use orientcov_cli::{run, Cli, Table};
use orientcov_core::gnp::{annealed_polys, Guards};
use orientcov_core::rational::parse_rational;
use orientcov_core::Rational;

fn table(args: &[&str]) -> Table {
    let cli =
        Cli::try_parse_from(std::iter::once("orientcov").chain(args.iter().copied())).unwrap();
    run(&cli).unwrap()
}

fn col<'a>(t: &'a Table, name: &str) -> impl Iterator<Item = &'a str> + 'a {
    let i = t.column(name).unwrap_or_else(|| panic!("no column {name}"));
    t.rows.iter().map(move |r| r[i].as_str())
}

fn exe() -> Process {
    Process::new(env!("CARGO_BIN_EXE_orientcov"))
}

#[test]
fn csv_file_round_trips_to_exact_values() {
    let dir = std::env::temp_dir().join(format!("orientcov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let status = exe()
        .args(["curve", "--n", "5..6", "--grid", "8", "--exact", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let t = Table::read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(t.schema, "orientcov/curve/v1");
    assert_eq!(t.rows.len(), 16);
    for n in 5..=6 {
        let polys = annealed_polys(n, &Guards::default()).unwrap();
        for row in t.rows.iter().filter(|r| r[0] == n.to_string()) {
            let get = |name: &str| parse_rational(&row[t.column(name).unwrap()]).unwrap();
            let p = get("p_exact");
            assert_eq!(get("f_exact"), polys.f.eval(&p));
            assert_eq!(get("g_exact"), polys.g.eval(&p));
            assert_eq!(get("cov_exact"), polys.cov_at(&p));
            let dec: f64 = row[t.column("cov").unwrap()].parse().unwrap();
            assert!((dec - polys.cov_at(&p).to_f64()).abs() <= 1e-11 * dec.abs().max(1e-300));
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn curve_facts() {
    let t = table(&["curve", "--n", "8", "--p", "1/2,1"]);
    let asym: Vec<f64> = col(&t, "asymptote").map(|s| s.parse().unwrap()).collect();
    assert_eq!(asym[0], 0.0);
    let relcov_at_one: f64 = col(&t, "relcov").nth(1).unwrap().parse().unwrap();
    assert!(relcov_at_one > 0.0);
}

#[test]
fn n30_curve_crosses_zero_three_times() {
    let t = table(&["curve", "--n", "30", "--grid", "512", "--exact"]);
    let signs: Vec<i32> = col(&t, "cov_exact")
        .map(|s| parse_rational(s).unwrap().cmp0() as i32)
        .collect();
    let crossings = signs.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(crossings, 3);
}

#[test]
fn zero_table_matches_published_annealed_values() {
    let t = table(&["zeros", "--n", "5..7", "--annealed-only"]);
    let p1: Vec<f64> = col(&t, "p1").map(|s| s.parse().unwrap()).collect();
    for (got, want) in p1.iter().zip([0.729, 0.276, 0.152]) {
        assert!((got - want).abs() < 5e-4, "{got} vs {want}");
    }
}

#[test]
fn zero_tables_agree_across_backends() {
    let tol = 1e-6;
    let args = |b: &'static str| {
        [
            "zeros",
            "--n",
            "5..9",
            "--annealed-only",
            "--grid",
            "256",
            "--backend",
            b,
            "--exact",
        ]
    };
    let sym = table(&args("symbolic"));
    let num = table(&args("numeric"));
    assert_eq!(
        col(&sym, "zeros").collect::<Vec<_>>(),
        col(&num, "zeros").collect::<Vec<_>>()
    );
    for (a, b) in col(&sym, "p1_exact").zip(col(&num, "p1_exact")) {
        let d = (parse_rational(a).unwrap() - parse_rational(b).unwrap()).abs();
        assert!(d <= 2.0 * tol, "{a} vs {b}");
    }
}

#[test]
fn decompose_holds_exactly() {
    let t = table(&["decompose", "--n", "3..12", "--p", "1/4,1/2,3/4", "--exact"]);
    assert_eq!(t.rows.len(), 30);
    assert!(col(&t, "identity").all(|s| s == "exact"));
    for ((a, e), v) in col(&t, "annealed_cov_exact")
        .zip(col(&t, "expected_conditional_cov_exact"))
        .zip(col(&t, "variance_of_conditional_exact"))
    {
        let (a, e, v) = (
            parse_rational(a).unwrap(),
            parse_rational(e).unwrap(),
            parse_rational(v).unwrap(),
        );
        assert_eq!(a, e + &v);
        assert!(v >= 0);
    }
    let one = table(&["decompose", "--n", "7", "--p", "1", "--exact"]);
    assert_eq!(
        col(&one, "variance_of_conditional_exact").next(),
        Some("0/1")
    );
}

#[test]
fn quenched_report() {
    let t = table(&["quenched", "--n", "4", "--grid", "4"]);
    let last_gnp = t.rows.iter().filter(|r| r[0] == "gnp").next_back().unwrap();
    let i = (t.column("annealed").unwrap(), t.column("quenched").unwrap());
    assert_eq!((last_gnp[i.0].as_str(), last_gnp[i.1].as_str()), ("0", "0"));

    let t = table(&["quenched", "--n", "6", "--grid", "10"]);
    let gap: f64 = t
        .rows
        .iter()
        .find(|r| r[0] == "max_gap")
        .map(|r| r[t.column("gap").unwrap()].parse().unwrap())
        .unwrap();
    assert!(gap < 0.0091, "{gap}");
    assert_eq!(t.rows.iter().filter(|r| r[0] == "gnm").count(), 16);
}

#[test]
fn pc_digits() {
    let t = table(&["pc"]);
    assert_eq!(col(&t, "p_c").next(), Some("0.799288221"));
    let residual: f64 = col(&t, "residual").next().unwrap().parse().unwrap();
    assert!(residual.abs() < 1e-8);
    let t = table(&["pc", "--digits", "3"]);
    assert_eq!(col(&t, "p_c").next(), Some("0.799"));
}

#[test]
fn gnm_table_h3() {
    let t = table(&["gnm-table", "--n", "3", "--exact"]);
    assert_eq!(
        col(&t, "h_exact").collect::<Vec<_>>(),
        ["1/1", "5/6", "7/12", "3/8"]
    );
}

#[test]
fn q_exact_row_respects_bound() {
    let t = table(&["q-exact", "--l", "7", "--n", "12", "--m", "30", "--exact"]);
    let q = parse_rational(col(&t, "q_exact_exact").next().unwrap()).unwrap();
    let bound = parse_rational(col(&t, "annealed_bound_exact").next().unwrap()).unwrap();
    assert!(q <= bound);
}

#[test]
fn simulate_json_and_determinism() {
    let args = [
        "simulate", "--n", "6", "--p", "0.7", "--trials", "20000", "--seed", "9", "--format",
        "json",
    ];
    let a = exe().args(args).output().unwrap();
    let b = exe().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "orientcov/simulate/v1");
    assert_eq!(v["rows"]["seed"], 9);
    assert_eq!(v["rows"]["trials"], 20000);
    assert_eq!(v["rows"]["parameter"], "7/10");
    assert!(v["rows"]["cov"].is_f64());
}

#[test]
fn errors_are_json_on_stderr() {
    for (args, kind) in [
        (vec!["curve", "--n", "5", "--p", "3/2"], "invalid_parameter"),
        (vec!["curve", "--n", "41", "--p", "1/2"], "guard_exceeded"),
        (vec!["zeros", "--n", "5", "--tol", "0"], "invalid_parameter"),
        (
            vec!["simulate", "--n", "5", "--model", "gnm", "--m", "11"],
            "invalid_parameter",
        ),
        (vec!["curve", "--n", "nope"], "usage"),
    ] {
        let out = exe().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(v["error"], kind, "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn explicit_p_is_parsed_exactly() {
    let t = table(&["curve", "--n", "4", "--p", "0.125", "--exact"]);
    assert_eq!(col(&t, "p_exact").next(), Some("1/8"));
    assert_eq!(parse_rational("1/8").unwrap(), Rational::from((1, 8)));
}
