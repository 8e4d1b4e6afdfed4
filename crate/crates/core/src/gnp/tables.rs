//! Cluster-size recursion tables for randomly oriented `G(n, p)`.
//!
//! Notation: `y = 1 - p/2` (a given oriented edge is absent), `q = 1 - p`
//! (the edge is absent). `d(k)` is the probability that the out-cluster of
//! `s` is one given `k`-set inside `K_k`, i.e. that `s` reaches everything.
//!
//! For the joint out/in-cluster probabilities `M(n, k, m, 0)` we write
//! `t = k + m - n` (size of the intersection), `u = n - k` and `v = n - m`
//! (sizes of the in-only and out-only parts). Unrolling the removal
//! recursion on the in-only part shows the `v` dependence enters only through
//! a factor `y^(uv)`, which gives the factorisation
//!
//! ```text
//! M(n, k, m, 0) = y^(uv) * R_t(u) * R_t(v) * F(t)
//! R_t(0) = 1
//! R_t(u) = sum_{j=1..u} C(u-1, j-1) d(j) R_t(u-j)
//!          * (y^t - y^(u-j) q^t) * q^((j-1)t) * y^((j-1)(u-j))
//! F(t)   = M(t, t, t, 0)
//!        = d(t) - sum_{k=1..t-1} C(t-1, k-1) R_k(t-k) F(k)
//! ```
//!
//! The last line sums `M(t, k, t, 0)` over out-clusters when the in-cluster
//! is everything. The tables therefore hold `O(n^2)` entries instead of the
//! `O(n^3)` joint table, and every quantity is a ring expression, which lets
//! the same code run over polynomials, rationals, floats or prime fields.

use crate::error::{Error, Result};
use crate::ring::Ring;

pub struct ClusterTables<R: Ring> {
    ring: R,
    n_max: usize,
    y: R::Elem,
    q: R::Elem,
    y_pow: Vec<R::Elem>,
    q_pow: Vec<R::Elem>,
    /// `binom[a][b] = C(a, b)` for `a <= n_max`.
    binom: Vec<Vec<R::Elem>>,
    /// `d[k] = d(k, k)`; index 0 unused.
    d: Vec<R::Elem>,
    /// `r[t][u] = R_t(u)` for `t >= 1`, `t + u <= n_max`.
    r: Vec<Vec<R::Elem>>,
    /// `full[t] = M(t, t, t, 0)`; index 0 unused.
    full: Vec<R::Elem>,
}

impl<R: Ring> ClusterTables<R> {
    /// Builds all tables up to `n_max` vertices with `half_p = p/2` given as a
    /// ring element.
    pub fn new(ring: R, half_p: R::Elem, n_max: usize) -> Self {
        let n_max = n_max.max(1);
        let one = ring.one();
        let y = ring.sub(&one, &half_p);
        let q = ring.sub(&y, &half_p);
        // every exponent used below counts distinct edges of K_{n_max}
        let max_exp = n_max * (n_max - 1) / 2 + n_max;
        let y_pow = powers(&ring, &y, max_exp);
        let q_pow = powers(&ring, &q, max_exp);

        let mut binom: Vec<Vec<R::Elem>> = Vec::with_capacity(n_max + 1);
        binom.push(vec![one.clone()]);
        for a in 1..=n_max {
            let prev = &binom[a - 1];
            let mut row = Vec::with_capacity(a + 1);
            row.push(one.clone());
            for b in 1..a {
                row.push(ring.add(&prev[b - 1], &prev[b]));
            }
            row.push(one.clone());
            binom.push(row);
        }

        let mut tables = ClusterTables {
            ring,
            n_max,
            y,
            q,
            y_pow,
            q_pow,
            binom,
            d: Vec::with_capacity(n_max + 1),
            r: Vec::with_capacity(n_max + 1),
            full: Vec::with_capacity(n_max + 1),
        };
        tables.build();
        tables
    }

    fn build(&mut self) {
        let ring = &self.ring;
        let zero = ring.zero();
        self.d.push(zero.clone());
        self.full.push(zero.clone());
        self.r.push(Vec::new());
        for _ in 1..=self.n_max {
            self.r.push(vec![ring.one()]);
        }
        for size in 1..=self.n_max {
            // d(size) = 1 - sum_i C(size-1, i-1) d(i) y^(i(size-i))
            let mut acc = ring.zero();
            for i in 1..size {
                let term = ring.mul3(
                    &self.binom[size - 1][i - 1],
                    &self.d[i],
                    &self.y_pow[i * (size - i)],
                );
                ring.add_assign(&mut acc, &term);
            }
            self.d.push(ring.sub(&ring.one(), &acc));

            // R_t(u) with t + u = size
            for t in 1..size {
                let u = size - t;
                let mut acc = ring.zero();
                for j in 1..=u {
                    let bracket = ring.sub(
                        &self.y_pow[t],
                        &ring.mul(&self.y_pow[u - j], &self.q_pow[t]),
                    );
                    let spread = ring.mul(&self.q_pow[(j - 1) * t], &self.y_pow[(j - 1) * (u - j)]);
                    let head = ring.mul3(&self.binom[u - 1][j - 1], &self.d[j], &self.r[t][u - j]);
                    let term = ring.mul3(&head, &bracket, &spread);
                    ring.add_assign(&mut acc, &term);
                }
                self.r[t].push(acc);
            }

            // F(size) = d(size) - sum_k C(size-1, k-1) R_k(size-k) F(k)
            let mut acc = ring.zero();
            for k in 1..size {
                let term = ring.mul3(
                    &self.binom[size - 1][k - 1],
                    &self.r[k][size - k],
                    &self.full[k],
                );
                ring.add_assign(&mut acc, &term);
            }
            self.full.push(ring.sub(&self.d[size], &acc));
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn y(&self) -> &R::Elem {
        &self.y
    }

    pub fn q(&self) -> &R::Elem {
        &self.q
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::param(
                "n",
                format!("tables were built for n <= {}, asked for {n}", self.n_max),
            ));
        }
        Ok(())
    }

    /// `d(k, k)`: probability that `s` reaches all of `K_k`.
    pub fn d_full(&self, k: usize) -> Result<&R::Elem> {
        if k == 0 {
            return Err(Error::InvalidIndex(format!("d({k},{k})")));
        }
        self.check_n(k)?;
        Ok(&self.d[k])
    }

    /// `d(n, k)`: probability that the out-cluster of `s` is a given `k`-set in `K_n`.
    pub fn d(&self, n: usize, k: usize) -> Result<R::Elem> {
        if k == 0 || k > n {
            return Err(Error::InvalidIndex(format!("d({n},{k})")));
        }
        self.check_n(n)?;
        Ok(self.ring.mul(&self.d[k], &self.y_pow[k * (n - k)]))
    }

    /// `R_t(u)` from the factorisation above.
    pub fn reach_factor(&self, t: usize, u: usize) -> Result<&R::Elem> {
        if t == 0 {
            return Err(Error::InvalidIndex(format!("R_{t}({u})")));
        }
        self.check_n(t + u)?;
        Ok(&self.r[t][u])
    }

    /// `M(n, n, n, 0)`: `s` reaches and is reached from every vertex.
    pub fn strongly_full(&self, n: usize) -> Result<&R::Elem> {
        if n == 0 {
            return Err(Error::InvalidIndex("M(0,0,0,0)".into()));
        }
        self.check_n(n)?;
        Ok(&self.full[n])
    }

    /// `M(n, k, m, r)`: probability that the out-cluster of `s` is a given
    /// `k`-set `X` and its in-cluster a given `m`-set `Y` with
    /// `|[n] \ (X u Y)| = r`.
    ///
    /// Requires `k, m >= 1` and `k + m > n - r >= max(k, m)`.
    pub fn m(&self, n: usize, k: usize, m: usize, r: usize) -> Result<R::Elem> {
        let bad = || Error::InvalidIndex(format!("M({n},{k},{m},{r})"));
        if k == 0 || m == 0 || r > n {
            return Err(bad());
        }
        let core = n - r;
        if !(k + m > core && core >= k && core >= m) {
            return Err(bad());
        }
        self.check_n(core)?;
        let t = k + m - core;
        let (u, v) = (core - k, core - m);
        let ring = &self.ring;
        let mut val = ring.mul(
            &ring.mul3(&self.y_pow[u * v], &self.r[t][u], &self.r[t][v]),
            &self.full[t],
        );
        if r > 0 {
            // vertices outside X u Y: no edge at all to X n Y, no edge into
            // Y \ X, none out of X \ Y
            let outside = ring.mul(&self.q_pow[r * t], &self.y_pow[r * (u + v)]);
            val = ring.mul(&val, &outside);
        }
        Ok(val)
    }

    /// `f_n = P(s -/-> b)` for distinct `s, b`.
    pub fn f(&self, n: usize) -> Result<R::Elem> {
        if n < 2 {
            return Err(Error::param("n", "f_n needs n >= 2"));
        }
        self.check_n(n)?;
        let ring = &self.ring;
        let mut acc = ring.zero();
        for k in 1..n {
            let term = ring.mul3(
                &self.binom[n - 2][k - 1],
                &self.d[k],
                &self.y_pow[k * (n - k)],
            );
            ring.add_assign(&mut acc, &term);
        }
        Ok(acc)
    }

    /// `(n-1)(n-2) * g_n` where `g_n = P(a -/-> s, s -/-> b)`.
    ///
    /// The weight `((n-k-1)(n-m-1) + n-j-1) / ((n-1)(n-2))` averages over
    /// whether `a` lies in the out-cluster; the denominator is left to the
    /// caller so the sum stays inside the ring.
    pub fn g_scaled(&self, n: usize) -> Result<R::Elem> {
        if n < 3 {
            return Err(Error::param("n", "g_n needs n >= 3"));
        }
        self.check_n(n)?;
        let ring = &self.ring;
        let mut total = ring.zero();
        // j = |X n Y|, v = k - j, u = m - j, r = n - j - u - v
        for j in 1..=n - 2 {
            let mut over_v = ring.zero();
            for v in 0..=(n - 1 - j) {
                let head = ring.mul(&self.binom[n - j][v], &self.r[j][v]);
                let mut over_u = ring.zero();
                for u in 0..=(n - j - v) {
                    let r = n - j - u - v;
                    // (n-k-1)(n-m-1) + n-j-1, never negative on this range
                    let weight = (u + r) as i64 - 1;
                    let weight = weight * ((v + r) as i64 - 1) + (n - j) as i64 - 1;
                    if weight == 0 {
                        continue;
                    }
                    let edges = ring.mul(&self.y_pow[u * v + r * (u + v)], &self.q_pow[r * j]);
                    let term = ring.mul(
                        &ring.mul3(&self.binom[n - j - v][u], &self.r[j][u], &edges),
                        &ring.from_u64(weight as u64),
                    );
                    ring.add_assign(&mut over_u, &term);
                }
                ring.add_assign(&mut over_v, &ring.mul(&head, &over_u));
            }
            let outer = ring.mul3(&self.binom[n - 1][j - 1], &self.full[j], &over_v);
            ring.add_assign(&mut total, &outer);
        }
        Ok(total)
    }
}

fn powers<R: Ring>(ring: &R, base: &R::Elem, max_exp: usize) -> Vec<R::Elem> {
    let mut out = Vec::with_capacity(max_exp + 1);
    out.push(ring.one());
    for e in 1..=max_exp {
        out.push(ring.mul(&out[e - 1], base));
    }
    out
}
