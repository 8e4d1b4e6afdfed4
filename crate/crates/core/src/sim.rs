//! Seeded Monte-Carlo estimators, annealed and quenched.
//!
//! Vertices `s, a, b` are `0, 1, 2`. Trials are split into `streams`
//! contiguous blocks; block `i` draws from ChaCha8 stream `i` of `seed`, and
//! blocks accumulate integer counts only, so results depend on
//! `(seed, streams, trials)` alone and not on the thread pool.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{edge_pairs, reach_set, threshold, GraphModel, Sampler};

pub const DEFAULT_STREAMS: usize = 64;

const S: usize = 0;
const A: usize = 1;
const B: usize = 2;

/// `(1{a -/-> s}, 1{s -/-> b})` for one oriented graph.
#[inline]
fn events(rows: &[u64]) -> (bool, bool) {
    let from_a = reach_set(rows, A);
    let from_s = reach_set(rows, S);
    (from_a >> S & 1 == 0, from_s >> B & 1 == 0)
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn block_sizes(trials: u64, streams: usize) -> Vec<u64> {
    let s = streams as u64;
    (0..s)
        .map(|i| trials / s + u64::from(i < trials % s))
        .collect()
}

fn check_run(trials: u64, streams: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    if streams == 0 {
        return Err(Error::param("streams", "need at least one stream"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Annealed,
    Quenched,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeMethod {
    /// Per-trial influence values.
    Delta,
    /// Leave-one-trial-out.
    Jackknife,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub regime: Regime,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub stream_count: usize,
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
    /// `P(A)P(B)` (annealed) or `E[P(A|G) P(B|G)]` (quenched), as subtracted.
    pub product: f64,
    pub cov: f64,
    pub se_p_a: f64,
    pub se_p_b: f64,
    pub se_p_ab: f64,
    pub se_cov: f64,
}

/// Mean and standard error from an integer sum and sum of squares.
fn mean_se(sum: u64, sum_sq: u64, t: u64, scale: f64) -> (f64, f64) {
    let tf = t as f64;
    let mean = sum as f64 / tf;
    if t < 2 {
        return (mean / scale, 0.0);
    }
    let var = ((sum_sq as f64 - tf * mean * mean) / (tf - 1.0)).max(0.0);
    (mean / scale, (var / tf).sqrt() / scale)
}

/// 2x2 contingency counts of `(1_A, 1_B)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Cells {
    both: u64,
    a_only: u64,
    b_only: u64,
    neither: u64,
}

impl Cells {
    fn add(&mut self, a: bool, b: bool) {
        match (a, b) {
            (true, true) => self.both += 1,
            (true, false) => self.a_only += 1,
            (false, true) => self.b_only += 1,
            (false, false) => self.neither += 1,
        }
    }

    fn merge(mut self, o: Cells) -> Cells {
        self.both += o.both;
        self.a_only += o.a_only;
        self.b_only += o.b_only;
        self.neither += o.neither;
        self
    }

    fn total(&self) -> u64 {
        self.both + self.a_only + self.b_only + self.neither
    }

    /// Unbiased sample covariance of the two indicators.
    fn cov(&self) -> f64 {
        let t = self.total() as f64;
        if t < 2.0 {
            return 0.0;
        }
        let pa = (self.both + self.a_only) as f64 / t;
        let pb = (self.both + self.b_only) as f64 / t;
        let pab = self.both as f64 / t;
        t / (t - 1.0) * (pab - pa * pb)
    }

    fn without(&self, cell: usize) -> Cells {
        let mut c = *self;
        match cell {
            0 => c.both -= 1,
            1 => c.a_only -= 1,
            2 => c.b_only -= 1,
            _ => c.neither -= 1,
        }
        c
    }

    fn result(&self, n: usize, seed: u64, streams: usize, se: SeMethod) -> SimResult {
        let t = self.total();
        let tf = t as f64;
        let na = self.both + self.a_only;
        let nb = self.both + self.b_only;
        let (p_a, se_p_a) = mean_se(na, na, t, 1.0);
        let (p_b, se_p_b) = mean_se(nb, nb, t, 1.0);
        let (p_ab, se_p_ab) = mean_se(self.both, self.both, t, 1.0);
        let cov = self.cov();
        let se_cov = if t < 3 {
            0.0
        } else {
            match se {
                SeMethod::Delta => {
                    let plug = p_ab - p_a * p_b;
                    let cells = [
                        (self.both, 1.0, 1.0),
                        (self.a_only, 1.0, 0.0),
                        (self.b_only, 0.0, 1.0),
                        (self.neither, 0.0, 0.0),
                    ];
                    let ss: f64 = cells
                        .iter()
                        .map(|&(c, x, y)| {
                            let psi = (x - p_a) * (y - p_b) - plug;
                            c as f64 * psi * psi
                        })
                        .sum();
                    (ss / (tf - 1.0) / tf).sqrt()
                }
                SeMethod::Jackknife => {
                    let counts = [self.both, self.a_only, self.b_only, self.neither];
                    let loo: Vec<(u64, f64)> = counts
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0)
                        .map(|(i, &c)| (c, self.without(i).cov()))
                        .collect();
                    let mean = loo.iter().map(|&(c, v)| c as f64 * v).sum::<f64>() / tf;
                    let ss: f64 = loo
                        .iter()
                        .map(|&(c, v)| c as f64 * (v - mean) * (v - mean))
                        .sum();
                    ((tf - 1.0) / tf * ss).sqrt()
                }
            }
        };
        SimResult {
            regime: Regime::Annealed,
            n,
            trials: t,
            seed,
            stream_count: streams,
            p_a,
            p_b,
            p_ab,
            product: p_a * p_b,
            cov,
            se_p_a,
            se_p_b,
            se_p_ab,
            se_cov,
        }
    }
}

/// Annealed estimate: one oriented sample per trial.
pub fn estimate_annealed(
    n: usize,
    model: &GraphModel,
    trials: u64,
    seed: u64,
    streams: usize,
    se: SeMethod,
) -> Result<SimResult> {
    check_run(trials, streams)?;
    let sampler = Sampler::new(n, model)?;
    let cells = block_sizes(trials, streams)
        .into_par_iter()
        .enumerate()
        .map(|(block, size)| {
            let mut rng = block_rng(seed, block);
            let mut rows = vec![0u64; n];
            let mut c = Cells::default();
            for _ in 0..size {
                sampler.sample_rows(&mut rng, &mut rows);
                let (a, b) = events(&rows);
                c.add(a, b);
            }
            c
        })
        .reduce(Cells::default, Cells::merge);
    Ok(cells.result(n, seed, streams, se))
}

/// Per-graph sums for the quenched estimator. With two independent
/// orientations `O1, O2` of the same graph, `w = A1 B1 + A2 B2` and
/// `c = A1 B2 + A2 B1` have means `2 E[P(AB|G)]` and `2 E[P(A|G) P(B|G)]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QuenchedSums {
    pub graphs: u64,
    a: u64,
    a2: u64,
    b: u64,
    b2: u64,
    w: u64,
    w2: u64,
    c: u64,
    x: i64,
    x2: u64,
}

impl QuenchedSums {
    #[inline]
    fn add(&mut self, (a1, b1): (bool, bool), (a2, b2): (bool, bool)) {
        let a = u64::from(a1) + u64::from(a2);
        let b = u64::from(b1) + u64::from(b2);
        let w = u64::from(a1 && b1) + u64::from(a2 && b2);
        let c = u64::from(a1 && b2) + u64::from(a2 && b1);
        let x = w as i64 - c as i64;
        self.graphs += 1;
        self.a += a;
        self.a2 += a * a;
        self.b += b;
        self.b2 += b * b;
        self.w += w;
        self.w2 += w * w;
        self.c += c;
        self.x += x;
        self.x2 += (x * x) as u64;
    }

    fn merge(mut self, o: QuenchedSums) -> QuenchedSums {
        self.graphs += o.graphs;
        self.a += o.a;
        self.a2 += o.a2;
        self.b += o.b;
        self.b2 += o.b2;
        self.w += o.w;
        self.w2 += o.w2;
        self.c += o.c;
        self.x += o.x;
        self.x2 += o.x2;
        self
    }

    pub fn cov(&self) -> f64 {
        self.x as f64 / (2.0 * self.graphs as f64)
    }

    fn result(&self, n: usize, seed: u64, streams: usize) -> SimResult {
        let t = self.graphs;
        let tf = t as f64;
        let (p_a, se_p_a) = mean_se(self.a, self.a2, t, 2.0);
        let (p_b, se_p_b) = mean_se(self.b, self.b2, t, 2.0);
        let (p_ab, se_p_ab) = mean_se(self.w, self.w2, t, 2.0);
        let se_cov = if t < 2 {
            0.0
        } else {
            let mean = self.x as f64 / tf;
            let var = ((self.x2 as f64 - tf * mean * mean) / (tf - 1.0)).max(0.0);
            (var / tf).sqrt() / 2.0
        };
        SimResult {
            regime: Regime::Quenched,
            n,
            trials: t,
            seed,
            stream_count: streams,
            p_a,
            p_b,
            p_ab,
            product: self.c as f64 / (2.0 * tf),
            cov: self.cov(),
            se_p_a,
            se_p_b,
            se_p_ab,
            se_cov,
        }
    }
}

/// Quenched estimate: per sampled graph, two independent orientations.
pub fn estimate_quenched(
    n: usize,
    model: &GraphModel,
    graph_trials: u64,
    seed: u64,
    streams: usize,
) -> Result<SimResult> {
    check_run(graph_trials, streams)?;
    model.validate(n)?;
    let pairs = edge_pairs(n);
    let t_p = match model {
        GraphModel::Gnp(p) => Some(threshold(p)),
        GraphModel::Gnm(_) => None,
    };
    let sums = block_sizes(graph_trials, streams)
        .into_par_iter()
        .enumerate()
        .map(|(block, size)| {
            let mut rng = block_rng(seed, block);
            let mut present: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
            let (mut r1, mut r2) = (vec![0u64; n], vec![0u64; n]);
            let mut acc = QuenchedSums::default();
            for _ in 0..size {
                present.clear();
                match (model, t_p) {
                    (_, Some(t)) => {
                        for &e in &pairs {
                            if (rng.gen::<u64>() as u128) < t {
                                present.push(e);
                            }
                        }
                    }
                    (GraphModel::Gnm(m), None) => {
                        present.extend(
                            index::sample(&mut rng, pairs.len(), *m)
                                .into_iter()
                                .map(|i| pairs[i]),
                        );
                    }
                    (GraphModel::Gnp(_), None) => unreachable!(),
                }
                orient(&mut rng, &present, &mut r1);
                orient(&mut rng, &present, &mut r2);
                acc.add(events(&r1), events(&r2));
            }
            acc
        })
        .reduce(QuenchedSums::default, QuenchedSums::merge);
    Ok(sums.result(n, seed, streams))
}

fn orient<R: Rng>(rng: &mut R, present: &[(usize, usize)], rows: &mut [u64]) {
    rows.iter_mut().for_each(|r| *r = 0);
    for &(i, j) in present {
        if rng.gen::<bool>() {
            rows[i] |= 1 << j;
        } else {
            rows[j] |= 1 << i;
        }
    }
}

/// Quenched `G(n, p)` estimates on a grid of `p` with common random numbers:
/// each trial draws one uniform per pair and two orientation bits per pair,
/// and every grid point keeps the pairs whose uniform falls below it.
#[derive(Clone, Debug)]
pub struct QuenchedScan {
    pub n: usize,
    pub ps: Vec<Rational>,
    pub seed: u64,
    /// `blocks[stream][grid index]`
    pub blocks: Vec<Vec<QuenchedSums>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroFit {
    pub root: f64,
    /// Jackknife over streams.
    pub se: f64,
    pub slope: f64,
    pub intercept: f64,
}

pub fn quenched_scan(
    n: usize,
    ps: &[Rational],
    graph_trials: u64,
    seed: u64,
    streams: usize,
) -> Result<QuenchedScan> {
    check_run(graph_trials, streams)?;
    if ps.is_empty() {
        return Err(Error::param("ps", "empty grid"));
    }
    for p in ps {
        GraphModel::Gnp(p.clone()).validate(n)?;
    }
    let pairs = edge_pairs(n);
    let thresholds: Vec<u128> = ps.iter().map(threshold).collect();
    let blocks = block_sizes(graph_trials, streams)
        .into_par_iter()
        .enumerate()
        .map(|(block, size)| {
            let mut rng = block_rng(seed, block);
            let mut u = vec![0u64; pairs.len()];
            let words = pairs.len().div_ceil(64);
            let mut o1 = vec![0u64; words];
            let mut o2 = vec![0u64; words];
            let (mut r1, mut r2) = (vec![0u64; n], vec![0u64; n]);
            let mut acc = vec![QuenchedSums::default(); ps.len()];
            for _ in 0..size {
                u.iter_mut().for_each(|x| *x = rng.gen());
                o1.iter_mut().for_each(|x| *x = rng.gen());
                o2.iter_mut().for_each(|x| *x = rng.gen());
                for (k, &t) in thresholds.iter().enumerate() {
                    r1.iter_mut().for_each(|r| *r = 0);
                    r2.iter_mut().for_each(|r| *r = 0);
                    for (e, &(i, j)) in pairs.iter().enumerate() {
                        if (u[e] as u128) < t {
                            let (w, b) = (e / 64, e % 64);
                            if o1[w] >> b & 1 == 1 {
                                r1[i] |= 1 << j
                            } else {
                                r1[j] |= 1 << i
                            }
                            if o2[w] >> b & 1 == 1 {
                                r2[i] |= 1 << j
                            } else {
                                r2[j] |= 1 << i
                            }
                        }
                    }
                    acc[k].add(events(&r1), events(&r2));
                }
            }
            acc
        })
        .collect();
    Ok(QuenchedScan {
        n,
        ps: ps.to_vec(),
        seed,
        blocks,
    })
}

impl QuenchedScan {
    fn merged_except(&self, skip: Option<usize>) -> Vec<QuenchedSums> {
        let mut out = vec![QuenchedSums::default(); self.ps.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            if Some(b) == skip {
                continue;
            }
            for (o, s) in out.iter_mut().zip(block) {
                *o = o.merge(*s);
            }
        }
        out
    }

    pub fn results(&self) -> Vec<SimResult> {
        self.merged_except(None)
            .iter()
            .map(|s| s.result(self.n, self.seed, self.blocks.len()))
            .collect()
    }

    fn fit(&self, sums: &[QuenchedSums]) -> (f64, f64, f64) {
        let xs: Vec<f64> = self.ps.iter().map(|p| p.to_f64()).collect();
        let ys: Vec<f64> = sums.iter().map(QuenchedSums::cov).collect();
        let k = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        (-intercept / slope, slope, intercept)
    }

    /// Least-squares line through the covariance estimates and its root.
    pub fn fit_zero(&self) -> Result<ZeroFit> {
        if self.ps.len() < 2 {
            return Err(Error::param("ps", "a line fit needs two grid points"));
        }
        let (root, slope, intercept) = self.fit(&self.merged_except(None));
        let g = self.blocks.len();
        let se = if g < 2 {
            f64::NAN
        } else {
            let loo: Vec<f64> = (0..g)
                .map(|b| self.fit(&self.merged_except(Some(b))).0)
                .collect();
            let mean = loo.iter().sum::<f64>() / g as f64;
            let ss: f64 = loo.iter().map(|r| (r - mean) * (r - mean)).sum();
            ((g as f64 - 1.0) / g as f64 * ss).sqrt()
        };
        Ok(ZeroFit {
            root,
            se,
            slope,
            intercept,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gnp(a: i64, b: i64) -> GraphModel {
        GraphModel::Gnp(Rational::from((a, b)))
    }

    #[test]
    fn empty_graph_gives_zero_covariance() {
        let r = estimate_annealed(6, &gnp(0, 1), 1000, 1, 4, SeMethod::Delta).unwrap();
        assert_eq!((r.p_a, r.p_b, r.p_ab, r.cov), (1.0, 1.0, 1.0, 0.0));
        let q = estimate_quenched(6, &gnp(0, 1), 1000, 1, 4).unwrap();
        assert_eq!(q.cov, 0.0);
    }

    #[test]
    fn deterministic_given_seed_and_streams() {
        let a = estimate_annealed(7, &gnp(1, 2), 20_000, 42, 8, SeMethod::Delta).unwrap();
        let b = estimate_annealed(7, &gnp(1, 2), 20_000, 42, 8, SeMethod::Delta).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool
            .install(|| estimate_annealed(7, &gnp(1, 2), 20_000, 42, 8, SeMethod::Delta).unwrap());
        assert_eq!(a, c);
        let d = estimate_annealed(7, &gnp(1, 2), 20_000, 43, 8, SeMethod::Delta).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn k3_joint_probability() {
        let r = estimate_annealed(3, &gnp(1, 1), 200_000, 5, 16, SeMethod::Delta).unwrap();
        assert!((r.p_ab - 0.125).abs() < 4.0 * r.se_p_ab);
        assert!((r.cov + 1.0 / 64.0).abs() < 4.0 * r.se_cov);
        let j = estimate_annealed(3, &gnp(1, 1), 200_000, 5, 16, SeMethod::Jackknife).unwrap();
        assert!((j.se_cov - r.se_cov).abs() < 0.05 * r.se_cov);
    }

    #[test]
    fn gnm_full_is_tournament() {
        let r = estimate_annealed(3, &GraphModel::Gnm(3), 100_000, 9, 4, SeMethod::Delta).unwrap();
        assert!((r.p_ab - 0.125).abs() < 4.0 * r.se_p_ab);
    }

    #[test]
    fn block_sizes_cover_trials() {
        assert_eq!(block_sizes(10, 4), vec![3, 3, 2, 2]);
        assert_eq!(block_sizes(3, 5).iter().sum::<u64>(), 3);
    }

    #[test]
    fn scan_matches_single_point_in_distribution() {
        let ps = [Rational::from((9, 10))];
        let scan = quenched_scan(5, &ps, 100_000, 3, 8).unwrap();
        let s = &scan.results()[0];
        let q = estimate_quenched(5, &gnp(9, 10), 100_000, 4, 8).unwrap();
        let tol = 4.0 * (s.se_cov.powi(2) + q.se_cov.powi(2)).sqrt();
        assert!((s.cov - q.cov).abs() < tol);
    }
}
