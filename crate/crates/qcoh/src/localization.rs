//! Fixed-point localization for genus zero local invariants of
//! `O(k) + O(-2-k) -> P1`.
//!
//! Two independent routes to `F(q, z)`: a direct sum over colored trees, and
//! the generating-function assembly in which one-edge graphs, star graphs and
//! a propagator fixed point account for every tree. All intermediate objects
//! are truncated power series in the equivariant parameter `λ`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::{q, Error, Result, Q};

/// Parameters of one localization run.
#[derive(Clone, Debug)]
pub struct LocConfig {
    pub k: u32,
    pub z: Q,
    pub d_max: u32,
    /// Highest power of `λ` kept. Must be at least `2 d_max - 2`.
    pub lambda_order: u32,
}

impl LocConfig {
    /// A config with the smallest admissible `λ` window.
    pub fn new(k: u32, z: Q, d_max: u32) -> Self {
        LocConfig { k, z, d_max, lambda_order: (2 * d_max).saturating_sub(2) }
    }

    fn check(&self) -> Result<()> {
        if self.d_max == 0 {
            return Err(Error::Invalid("d_max must be positive".into()));
        }
        if self.lambda_order + 2 < 2 * self.d_max {
            return Err(Error::WindowTooSmall(vec![self.lambda_order]));
        }
        Ok(())
    }
}

/// Power series in `λ` truncated above a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSeries {
    c: Vec<Q>,
}

impl LambdaSeries {
    pub fn zero(order: u32) -> Self {
        LambdaSeries { c: vec![Q::zero(); order as usize + 1] }
    }

    pub fn constant(x: Q, order: u32) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = x;
        s
    }

    /// `1 + t λ`.
    pub fn linear(t: Q, order: u32) -> Self {
        let mut s = Self::constant(Q::one(), order);
        if order > 0 {
            s.c[1] = t;
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.c.len() as u32 - 1
    }

    /// Coefficient of `λ^n`, zero above the window.
    pub fn coeff(&self, n: u32) -> Q {
        self.c.get(n as usize).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Sum over the longer window; the shorter operand is zero-padded.
    pub fn add(&self, o: &Self) -> Self {
        let (long, short) = if self.c.len() >= o.c.len() { (self, o) } else { (o, self) };
        let mut c = long.c.clone();
        for (x, y) in c.iter_mut().zip(&short.c) {
            *x += y;
        }
        LambdaSeries { c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, x: &Q) -> Self {
        LambdaSeries { c: self.c.iter().map(|a| a * x).collect() }
    }

    /// Product, truncated to the shorter window. Coefficients are cleared to a
    /// common denominator first so the convolution runs over integers.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len().min(o.c.len());
        let (xa, da) = integral(&self.c[..n]);
        let (xb, db) = integral(&o.c[..n]);
        let den = da * db;
        let mut acc = vec![BigInt::zero(); n];
        for (i, a) in xa.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in xb.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    acc[i + j] += a * b;
                }
            }
        }
        LambdaSeries { c: acc.into_iter().map(|v| Q::new(v, den.clone())).collect() }
    }

    /// Drops every power above `order`.
    pub fn truncate(&self, order: u32) -> Self {
        LambdaSeries { c: self.c[..self.c.len().min(order as usize + 1)].to_vec() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::constant(Q::one(), self.order());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Result<Self> {
        if self.c[0].is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let n = self.c.len();
        let c0 = self.c[0].recip();
        let mut r = vec![Q::zero(); n];
        r[0] = c0.clone();
        for m in 1..n {
            let mut acc = Q::zero();
            for j in 1..=m {
                acc += &self.c[j] * &r[m - j];
            }
            r[m] = -acc * &c0;
        }
        Ok(LambdaSeries { c: r })
    }
}

/// Numerators over a common denominator.
fn integral(c: &[Q]) -> (Vec<BigInt>, BigInt) {
    let den = c.iter().fold(BigInt::one(), |l, x| if x.denom().is_one() { l } else { l.lcm(x.denom()) });
    let nums = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (nums, den)
}

/// `a_d` as a `λ`-series.
pub fn a_coeff(cfg: &LocConfig, d: u32) -> Result<LambdaSeries> {
    if d == 0 {
        return Err(Error::Invalid("a_d needs d >= 1".into()));
    }
    let o = cfg.lambda_order;
    let di = d as i64;
    let mut fact = Q::one();
    for m in 1..=di {
        fact *= q(m);
    }
    let mut lead = Q::one();
    for _ in 0..2 * d {
        lead *= q(di);
    }
    let mut num = LambdaSeries::constant(lead / (&fact * &fact), o);
    for m in (-(2 + cfg.k as i64) * di + 1)..=-1 {
        num = num.mul(&LambdaSeries::linear(Q::new(m.into(), di.into()), o));
    }
    let mut den = LambdaSeries::constant(Q::one(), o);
    for m in 1..=(cfg.k as i64 * di) {
        den = den.mul(&LambdaSeries::linear(Q::new(m.into(), di.into()) * &cfg.z, o));
    }
    Ok(num.mul(&den.inv()?))
}

/// The weight `(1 - (k+2)λ)(1 + kzλ)` of a vertex of the second color.
pub fn f_poly(cfg: &LocConfig) -> LambdaSeries {
    let o = cfg.lambda_order;
    let k = q(cfg.k as i64);
    LambdaSeries::linear(-(&k + q(2)), o).mul(&LambdaSeries::linear(k * &cfg.z, o))
}

/// A tree on labelled vertices with colors and edge degrees.
#[derive(Clone, Debug)]
pub struct ColoredTree {
    /// Color of each vertex, 1 or 2.
    pub colors: Vec<u8>,
    /// `(u, v, degree)` with `u < v`.
    pub edges: Vec<(usize, usize, u32)>,
}

impl ColoredTree {
    pub fn degree(&self) -> u32 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Vertex permutations preserving colors, adjacency and edge degrees.
    pub fn automorphisms(&self) -> u64 {
        let n = self.colors.len();
        let mut adj = vec![vec![0u32; n]; n];
        for &(u, v, d) in &self.edges {
            adj[u][v] = d;
            adj[v][u] = d;
        }
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        count_auts(0, &mut perm, &mut used, &adj, &self.colors)
    }
}

fn count_auts(i: usize, perm: &mut [usize], used: &mut [bool], adj: &[Vec<u32>], colors: &[u8]) -> u64 {
    let n = colors.len();
    if i == n {
        return 1;
    }
    let mut total = 0;
    for t in 0..n {
        if used[t] || colors[t] != colors[i] {
            continue;
        }
        if (0..i).any(|j| adj[i][j] != adj[t][perm[j]]) {
            continue;
        }
        perm[i] = t;
        used[t] = true;
        total += count_auts(i + 1, perm, used, adj, colors);
        used[t] = false;
    }
    total
}

/// Labelled trees on `n` vertices, decoded from Prüfer sequences.
fn labelled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = n - 2;
    let mut out = Vec::new();
    let mut seq = vec![0usize; len];
    loop {
        let mut deg = vec![1usize; n];
        for &s in &seq {
            deg[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&v| deg[v] == 1).expect("a leaf always exists");
            edges.push((leaf.min(s), leaf.max(s)));
            deg[leaf] -= 1;
            deg[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
        // odometer
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return out;
        }
    }
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every colored tree of degree `d` up to isomorphism.
pub fn colored_trees(d: u32) -> Vec<ColoredTree> {
    let mut seen: BTreeMap<String, ColoredTree> = BTreeMap::new();
    for n in 2..=(d as usize + 1) {
        for shape in labelled_trees(n) {
            let colors = bipartite_colors(n, &shape);
            for degs in compositions(d, n - 1) {
                for flip in [false, true] {
                    let colors: Vec<u8> = colors.iter().map(|&c| if flip { 3 - c } else { c }).collect();
                    let edges: Vec<_> = shape.iter().zip(&degs).map(|(&(u, v), &w)| (u, v, w)).collect();
                    let tree = ColoredTree { colors, edges };
                    seen.entry(canonical_form(&tree)).or_insert(tree);
                }
            }
        }
    }
    seen.into_values().collect()
}

fn bipartite_colors(n: usize, edges: &[(usize, usize)]) -> Vec<u8> {
    let mut colors = vec![0u8; n];
    colors[0] = 1;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if colors[w] == 0 {
                colors[w] = 3 - colors[v];
                stack.push(w);
            }
        }
    }
    colors
}

/// AHU-style encoding: the minimum over roots of the rooted canonical string.
fn canonical_form(t: &ColoredTree) -> String {
    let n = t.colors.len();
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v, d) in &t.edges {
        nbrs[u].push((v, d));
        nbrs[v].push((u, d));
    }
    fn enc(v: usize, parent: usize, nbrs: &[Vec<(usize, u32)>], colors: &[u8]) -> String {
        let mut kids: Vec<String> = nbrs[v]
            .iter()
            .filter(|&&(w, _)| w != parent)
            .map(|&(w, d)| format!("{d}:{}", enc(w, v, nbrs, colors)))
            .collect();
        kids.sort();
        format!("{}({})", colors[v], kids.join(","))
    }
    (0..n).map(|r| enc(r, usize::MAX, &nbrs, &t.colors)).min().unwrap_or_default()
}

/// The graph-sum integrand for one tree, before `λ` extraction.
fn tree_contribution(t: &ColoredTree, a: &[LambdaSeries], f: &LambdaSeries, d: u32) -> LambdaSeries {
    let o = f.order();
    let e = t.edges.len() as u32;
    let sign = if (e + d).is_multiple_of(2) { Q::one() } else { -Q::one() };
    let aut = Q::from_integer((t.automorphisms() as i64).into());
    let mut w = LambdaSeries::constant(sign / aut, o);
    let n = t.colors.len();
    let mut dv = vec![0u32; n];
    let mut val = vec![0i32; n];
    for &(u, v, da) in &t.edges {
        w = w.mul(&a[da as usize].scale(&q(da as i64)));
        for x in [u, v] {
            dv[x] += da;
            val[x] += 1;
        }
    }
    for x in 0..n {
        let pw = val[x] - 3;
        let base = q(dv[x] as i64);
        let factor = if pw >= 0 {
            num_traits::pow(base, pw as usize)
        } else {
            num_traits::pow(base.recip(), (-pw) as usize)
        };
        w = w.scale(&factor);
        if t.colors[x] == 2 {
            w = w.mul(&f.pow(val[x] as u32 - 1));
        }
    }
    w
}

fn a_table(cfg: &LocConfig, d_max: u32) -> Result<Vec<LambdaSeries>> {
    let mut a = vec![LambdaSeries::zero(cfg.lambda_order)];
    for d in 1..=d_max {
        a.push(a_coeff(cfg, d)?);
    }
    Ok(a)
}

/// The `q^d` coefficient of `F` by direct enumeration of colored trees.
///
/// The tree count grows factorially, so keep `d` small.
pub fn brute_force_f(cfg: &LocConfig, d: u32) -> Result<Q> {
    if d == 0 || d > 6 {
        return Err(Error::Invalid(format!("brute force supports 1 <= d <= 6, got {d}")));
    }
    let mut cfg = cfg.clone();
    cfg.lambda_order = cfg.lambda_order.max(2 * d - 2);
    let a = a_table(&cfg, d)?;
    let f = f_poly(&cfg);
    let mut total = LambdaSeries::zero(cfg.lambda_order);
    for t in colored_trees(d) {
        total = total.add(&tree_contribution(&t, &a, &f, d));
    }
    Ok(total.coeff(2 * d - 2))
}


/// A `q`-series with `λ`-series coefficients, indexed by the power of `q`.
type QL = Vec<LambdaSeries>;

fn ql_zero(len: usize, o: u32) -> QL {
    vec![LambdaSeries::zero(o); len]
}

/// Product truncated to the shorter length.
fn ql_mul(x: &QL, y: &QL) -> QL {
    let n = x.len().min(y.len());
    let o = x[0].order();
    let mut r = ql_zero(n, o);
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..n - i {
            if !y[j].is_zero() {
                r[i + j] = r[i + j].add(&x[i].mul(&y[j]));
            }
        }
    }
    r
}

fn sign(n: usize) -> Q {
    if n.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

/// A star-graph generating function and its gradient, evaluated at a point.
struct Star {
    value: QL,
    /// `grad[m]` is the partial derivative in the `m`-th coefficient.
    grad: Vec<QL>,
}

/// Evaluates `Σ_d q^d/d³ ((-1)^d w⁻¹ [exp(-d w Σ_j b_j t^j/j)]_{t^d} + (-1)^d b_d)`
/// and its gradient in the `b_m`, where each `b_j` is itself a `q`-series.
///
/// The bracket is a polynomial in the `b_j`, so it is expanded in an auxiliary
/// variable `t` before the `q`-dependence of `b` is substituted.
fn star(b: &[QL], w: &LambdaSeries, w_inv: &LambdaSeries, dm: usize) -> Star {
    let o = w.order();
    let per_degree: Vec<(QL, Vec<QL>)> = (1..=dm).into_par_iter().map(|n| star_degree(b, w, w_inv, dm, n)).collect();
    let mut value = ql_zero(dm + 1, o);
    let mut grad = vec![ql_zero(dm + 1, o); dm + 1];
    for (n, (v, g)) in (1..=dm).zip(per_degree) {
        for (r, c) in v.into_iter().enumerate() {
            value[n + r] = value[n + r].add(&c);
        }
        for (m, gm) in g.into_iter().enumerate() {
            for (r, c) in gm.into_iter().enumerate() {
                grad[m][n + r] = grad[m][n + r].add(&c);
            }
        }
    }
    Star { value, grad }
}

/// The `q^n` term of [`star`], as `q`-series relative to `q^n`.
fn star_degree(b: &[QL], w: &LambdaSeries, w_inv: &LambdaSeries, dm: usize, n: usize) -> (QL, Vec<QL>) {
    let o = w.order();
    let len = dm - n + 1;
    let nq = q(n as i64);
    let h: Vec<QL> = (0..=n)
        .map(|j| {
            if j == 0 {
                return ql_zero(len, o);
            }
            let wj = w.scale(&(-&nq / q(j as i64)));
            (0..len).map(|r| b[j][r].mul(&wj)).collect()
        })
        .collect();
    // exp in t: m E_m = Σ_j j h_j E_{m-j}
    let mut e: Vec<QL> = Vec::with_capacity(n + 1);
    let mut e0 = ql_zero(len, o);
    e0[0] = LambdaSeries::constant(Q::one(), o);
    e.push(e0);
    for m in 1..=n {
        let mut acc = ql_zero(len, o);
        for j in 1..=m {
            let prod = ql_mul(&h[j], &e[m - j]);
            let jq = q(j as i64);
            for (a, p) in acc.iter_mut().zip(prod) {
                *a = a.add(&p.scale(&jq));
            }
        }
        let inv_m = q(m as i64).recip();
        e.push(acc.into_iter().map(|a| a.scale(&inv_m)).collect());
    }
    let pre = sign(n) / q((n * n * n) as i64);
    let value: QL = (0..len).map(|r| e[n][r].mul(w_inv).add(&b[n][r]).scale(&pre)).collect();
    // The bracket's derivative in b_m is -(n/m) w E_{n-m}; w cancels against w⁻¹.
    let mut grad = vec![ql_zero(len, o); n + 1];
    for m in 1..=n {
        let c = -(&pre * &nq) / q(m as i64);
        for r in 0..len {
            grad[m][r] = e[n - m][r].scale(&c);
        }
    }
    grad[n][0] = grad[n][0].add(&LambdaSeries::constant(pre, o));
    (value, grad)
}

/// The assembled generating function.
#[derive(Clone, Debug)]
pub struct Assembly {
    /// Coefficient of `q^d` as a `λ`-series, for `d = 0..=d_max`.
    pub raw: Vec<LambdaSeries>,
    /// Extracted coefficients of `q^1..=q^{d_max}`.
    pub coeffs: Vec<Q>,
    /// Fixed-point rounds until the perturbations stopped changing.
    pub rounds: u32,
}

/// `F(q, z)` through `q^{d_max}` from one-edge graphs, star graphs and the
/// propagator fixed point.
pub fn assemble_f(cfg: &LocConfig) -> Result<Assembly> {
    cfg.check()?;
    let dm = cfg.d_max as usize;
    let o = cfg.lambda_order;
    let a = a_table(cfg, cfg.d_max)?;
    let one = LambdaSeries::constant(Q::one(), o);
    let f = f_poly(cfg);
    let f_inv = f.inv()?;

    let mut total = ql_zero(dm + 1, o);
    for d in 1..=dm {
        total[d] = a[d].scale(&(sign(d - 1) / q((d * d * d) as i64)));
    }

    // p_d without its q^{-d}; that factor is applied as an index shift.
    let p: Vec<LambdaSeries> = (0..=dm)
        .map(|d| a[d].scale(&(sign(d + 1) * q((d * d * d) as i64))))
        .collect();

    let perturbed = |pert: &[QL]| -> Vec<QL> {
        (0..=dm)
            .map(|j| {
                let mut s = pert[j].clone();
                s[0] = s[0].add(&a[j]);
                s
            })
            .collect()
    };

    let mut x = vec![ql_zero(dm + 1, o); dm + 1];
    let mut y = x.clone();
    let mut rounds = 0u32;
    let (bx, cy) = loop {
        let bx = star(&perturbed(&x), &one, &one, dm);
        let cy = star(&perturbed(&y), &f, &f_inv, dm);
        let mut nx = vec![ql_zero(dm + 1, o); dm + 1];
        let mut ny = nx.clone();
        for d in 1..=dm {
            for n in d..=dm {
                ny[d][n - d] = bx.grad[d][n].mul(&p[d]);
                nx[d][n - d] = cy.grad[d][n].mul(&p[d]);
            }
        }
        rounds += 1;
        if nx == x && ny == y {
            break (bx, cy);
        }
        if rounds > cfg.d_max + 2 {
            return Err(Error::NotConverged);
        }
        x = nx;
        y = ny;
    };

    for d in 1..=dm {
        let xy = ql_mul(&x[d], &y[d]);
        let p_inv = p[d].inv()?;
        for r in 0..=dm - d {
            total[r + d] = total[r + d].sub(&xy[r].mul(&p_inv));
        }
    }
    for n in 0..=dm {
        total[n] = total[n].add(&bx.value[n]).add(&cy.value[n]);
    }
    let coeffs = (1..=dm).map(|d| total[d].coeff(2 * d as u32 - 2)).collect();
    Ok(Assembly { raw: total, coeffs, rounds })
}

/// `4 q dF/dq`, coefficients of `q^1..=q^{d_max}`.
pub fn derivative_check(cfg: &LocConfig) -> Result<Vec<Q>> {
    Ok(four_q_ddq(&assemble_f(cfg)?.coeffs))
}

/// `4 q d/dq` applied to coefficients of `q^1, q^2, ...`.
pub fn four_q_ddq(coeffs: &[Q]) -> Vec<Q> {
    coeffs.iter().enumerate().map(|(i, c)| c * q(4 * (i as i64 + 1))).collect()
}
