//! I-functions of toric spaces with optional equivariant bundle twists.

use crate::cohomology::{build_ring, CohomologyRing, Poly, RingPresentation};
use crate::error::{Error, Result};
use crate::formal::series::box_degrees;
use crate::formal::{BiLaurent, CohValue, Expand, QSeries, Series, Window};
use crate::{q, Q};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::sync::Arc;

/// Equivariant weight of a twist, as a multiple of the single parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Rational(Q),
    Lambda1,
    Lambda2,
}

/// `Denominator` is the standard factor `prod_{m<=0} / prod_{m<=<d,c>}` of
/// `c + m hbar + w lambda`; `Numerator` is its reciprocal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistKind {
    Denominator,
    Numerator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Twist {
    pub class: Vec<i64>,
    pub weight: Weight,
    pub kind: TwistKind,
}

/// Torus action on the two fibre directions of `X_k`.
#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Diagonal,
    /// `(lambda_1, lambda_2) = (-lambda, lambda)`; lambda is the weight on `O(-2-k)`.
    Antidiagonal,
    /// `(0, 1)`, the action used for `X_0`.
    Second,
    Custom(Q, Q),
}

impl Action {
    pub fn pair(&self) -> (Q, Q) {
        match self {
            Action::Diagonal => (q(1), q(1)),
            Action::Antidiagonal => (q(-1), q(1)),
            Action::Second => (q(0), q(1)),
            Action::Custom(a, b) => (a.clone(), b.clone()),
        }
    }

    pub fn parse(s: &str) -> Result<Action> {
        Ok(match s {
            "diagonal" => Action::Diagonal,
            "antidiagonal" => Action::Antidiagonal,
            "second" | "x0" => Action::Second,
            _ => {
                let (a, b) = s
                    .split_once(',')
                    .ok_or_else(|| Error::Invalid(format!("unknown action {s:?}")))?;
                Action::Custom(crate::parse_q(a)?, crate::parse_q(b)?)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySpec {
    pub name: String,
    /// `k x n` matrix; column `j` gives `u_j = sum_i m_ij p_i`.
    pub weights: Vec<Vec<i64>>,
    pub relations: Vec<Poly>,
    pub twists: Vec<Twist>,
    pub bx: Vec<u32>,
    /// `(lambda_1, lambda_2)` as multiples of lambda.
    pub lambda: (Q, Q),
    pub degree_cap: u32,
    pub window: Option<Window>,
    pub eta: Option<Vec<Vec<Q>>>,
}

/// A single factor `m hbar + c lambda + sum_i u_i p_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub m: i64,
    pub c: Q,
    pub u: Vec<i64>,
}

/// Finite form of `prod_{m<=0} / prod_{m<=n}` of `u + m hbar + c lambda`,
/// returned as `(numerator, denominator)` factor lists.
pub fn standard_factors(u: &[i64], n: i64, c: &Q) -> (Vec<Factor>, Vec<Factor>) {
    let f = |m| Factor { m, c: c.clone(), u: u.to_vec() };
    if n >= 0 {
        (Vec::new(), (1..=n).map(f).collect())
    } else {
        ((n + 1..=0).map(f).collect(), Vec::new())
    }
}

fn pairing(d: &[u32], c: &[i64]) -> i64 {
    d.iter().zip(c).map(|(&a, &b)| a as i64 * b).sum()
}

impl GeometrySpec {
    fn base(name: &str, weights: Vec<Vec<i64>>, rels: &[Vec<Vec<i64>>], cap: u32, bx: Vec<u32>) -> Self {
        let k = weights.len();
        GeometrySpec {
            name: name.into(),
            weights,
            relations: RingPresentation::from_linear_products(k, rels).relations,
            twists: Vec::new(),
            bx,
            lambda: (q(1), q(1)),
            degree_cap: cap,
            window: None,
            eta: None,
        }
    }

    pub fn p1(d: u32) -> Self {
        Self::base("P1", vec![vec![1, 1]], &[vec![vec![1], vec![1]]], 2, vec![d])
    }

    /// `O(k) + O(-2-k)` over P1 with the given torus action.
    pub fn xk(k: i64, action: Action, d: u32) -> Self {
        let mut s = Self::p1(d);
        s.name = format!("X{k}");
        s.lambda = action.pair();
        s.twists = vec![
            Twist { class: vec![k], weight: Weight::Lambda1, kind: TwistKind::Denominator },
            Twist { class: vec![-2 - k], weight: Weight::Lambda2, kind: TwistKind::Denominator },
        ];
        s
    }

    /// The threefold `G_k`; `k = -1` is the resolved conifold bundle over P1xP1.
    pub fn gk(k: i64, bx: [u32; 2]) -> Self {
        let (n1, n2) = if k == -1 { (-1, -1) } else { (-k, -2 - 2 * k) };
        let weights = vec![vec![1, 1, n1, n2, 0], vec![0, 0, 1, 1, 1]];
        let rels = [vec![vec![1, 0], vec![1, 0]], vec![vec![0, 1], vec![n1, 1], vec![n2, 1]]];
        Self::base(&format!("G{k}"), weights, &rels, 4, bx.to_vec())
    }

    /// Hirzebruch surface `F_n`.
    pub fn fn_(n: i64, bx: [u32; 2]) -> Self {
        let weights = vec![vec![1, 1, -n, 0], vec![0, 0, 1, 1]];
        let rels = [vec![vec![1, 0], vec![1, 0]], vec![vec![-n, 1], vec![0, 1]]];
        let mut s = Self::base(&format!("F{n}"), weights, &rels, 3, bx.to_vec());
        if n == 3 {
            s.eta = Some(f3_eta());
        }
        s
    }

    /// Looks up a preset such as `P1`, `X1`, `X-1`, `G1`, `F3`.
    pub fn preset(name: &str, action: Option<Action>, bx: &[u32]) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown preset {name:?}"));
        let two = |bx: &[u32]| -> Result<[u32; 2]> {
            bx.try_into().map_err(|_| Error::Invalid("preset needs a two-variable box".into()))
        };
        let one = |bx: &[u32]| -> Result<u32> {
            match bx {
                [d] => Ok(*d),
                _ => Err(Error::Invalid("preset needs a one-variable box".into())),
            }
        };
        if name == "P1" {
            return Ok(Self::p1(one(bx)?));
        }
        let (head, num) = name.split_at(1);
        let n: i64 = num.parse().map_err(|_| bad())?;
        match head {
            "X" => {
                let default = if n == 0 { Action::Second } else { Action::Diagonal };
                Ok(Self::xk(n, action.unwrap_or(default), one(bx)?))
            }
            "G" => Ok(Self::gk(n, two(bx)?)),
            "F" => Ok(Self::fn_(n, two(bx)?)),
            _ => Err(bad()),
        }
    }

    pub fn is_equivariant(&self) -> bool {
        self.twists.iter().any(|t| !self.weight_value(&t.weight).is_zero())
    }

    pub fn weight_value(&self, w: &Weight) -> Q {
        match w {
            Weight::Rational(r) => r.clone(),
            Weight::Lambda1 => self.lambda.0.clone(),
            Weight::Lambda2 => self.lambda.1.clone(),
        }
    }

    /// The window used when none is configured.
    pub fn effective_window(&self) -> Window {
        if let Some(w) = self.window {
            return w;
        }
        if self.is_equivariant() {
            let d: u32 = self.bx.iter().sum();
            let r = 2 * d as i32 + 4;
            Window::symmetric(r, r)
        } else {
            Window::UNBOUNDED
        }
    }

    pub fn ring(&self) -> Result<Arc<CohomologyRing>> {
        let pres = RingPresentation { num_generators: self.weights.len(), relations: self.relations.clone() };
        Ok(Arc::new(build_ring(&pres, self.degree_cap)?))
    }

    /// Column sums of the weight matrix, i.e. `c_1` in the generators.
    pub fn c1(&self) -> Vec<i64> {
        self.weights.iter().map(|row| row.iter().sum()).collect()
    }

    fn factors(&self, d: &[u32]) -> (Vec<Factor>, Vec<Factor>) {
        let k = self.weights.len();
        let n = self.weights.first().map_or(0, |r| r.len());
        let mut num = Vec::new();
        let mut den = Vec::new();
        for j in 0..n {
            let u: Vec<i64> = (0..k).map(|i| self.weights[i][j]).collect();
            let (a, b) = standard_factors(&u, pairing(d, &u), &Q::zero());
            num.extend(a);
            den.extend(b);
        }
        for t in &self.twists {
            let (a, b) = standard_factors(&t.class, pairing(d, &t.class), &self.weight_value(&t.weight));
            match t.kind {
                TwistKind::Denominator => {
                    num.extend(a);
                    den.extend(b);
                }
                TwistKind::Numerator => {
                    num.extend(b);
                    den.extend(a);
                }
            }
        }
        (num, den)
    }
}

/// Intersection matrix of `F_3` in the basis `{1, p1, p2, p2^2}`.
pub fn f3_eta() -> Vec<Vec<Q>> {
    [[0, 0, 0, 3], [0, 0, 1, 0], [0, 1, 3, 0], [3, 0, 0, 0]]
        .iter()
        .map(|r| r.iter().map(|&x| q(x)).collect())
        .collect()
}

fn factor_class(ring: &CohomologyRing, f: &Factor) -> Vec<Q> {
    ring.linear_class(&f.u)
}

/// Exact value of `prod(num) / prod(den)` truncated to `win`.
///
/// Factors carrying lambda are expanded in `1/lambda`; pure hbar factors
/// give finite `1/hbar` expansions. Intermediate windows are widened so the
/// final truncation is the only lossy step.
pub fn eval_ratio(ring: &CohomologyRing, num: &[Factor], den: &[Factor], win: Window) -> Result<CohValue> {
    let dim = ring.dim();
    let mut numer = CohValue::unit(dim, Window::UNBOUNDED);
    let mut nl = 0i32;
    for f in num {
        let mut v = CohValue::from_class(&factor_class(ring, f), Window::UNBOUNDED);
        v.comps[0].add_term(1, 0, q(f.m));
        v.comps[0].add_term(0, 1, f.c.clone());
        numer = numer.mul(ring, &v);
        nl += !f.c.is_zero() as i32;
    }
    let (lam, hb): (Vec<&Factor>, Vec<&Factor>) = den.iter().partition(|f| !f.c.is_zero());
    let lowering = hb.len() as i32 + ring.top_degree() as i32;
    let wd = Window {
        hbar: (i32::MIN, win.hbar.1.saturating_add(lowering)),
        lambda: (win.lambda.0.saturating_sub(nl), i32::MAX),
    };
    let mut denom = CohValue::unit(dim, wd);
    for f in &lam {
        let inv = CohValue::inv_affine(ring, &q(f.m), &f.c, &factor_class(ring, f), wd, Expand::Lambda)?;
        denom = denom.mul(ring, &inv);
    }
    let wp = Window {
        hbar: (win.hbar.0, win.hbar.1.saturating_add(lowering)),
        lambda: win.lambda,
    };
    let mut acc = numer.mul(ring, &denom).with_window(wp);
    for f in &hb {
        let inv = CohValue::inv_affine(ring, &q(f.m), &Q::zero(), &factor_class(ring, f), wp, Expand::Lambda)?;
        acc = acc.mul(ring, &inv);
    }
    Ok(acc.with_window(win))
}

pub fn i_coefficient(spec: &GeometrySpec, ring: &CohomologyRing, d: &[u32], win: Window) -> Result<CohValue> {
    let (num, den) = spec.factors(d);
    eval_ratio(ring, &num, &den, win)
}

/// The I-function over the spec's box, with the `q^{p/hbar}` prefactor.
pub fn build_i(spec: &GeometrySpec) -> Result<QSeries> {
    let ring = spec.ring()?;
    build_i_with(spec, ring, spec.effective_window())
}

pub fn build_i_with(spec: &GeometrySpec, ring: Arc<CohomologyRing>, win: Window) -> Result<QSeries> {
    let degs = box_degrees(&spec.bx);
    let coeffs = degs
        .par_iter()
        .map(|d| i_coefficient(spec, &ring, d, win))
        .collect::<Result<Vec<_>>>()?;
    let mut comps = vec![Series::zero(&spec.bx, win); ring.dim()];
    for (d, c) in degs.iter().zip(coeffs) {
        for (s, v) in comps.iter_mut().zip(c.comps) {
            s.add_at(d, &v);
        }
    }
    QSeries::from_comps(ring, comps, true)
}

/// Multiplies each `q^d` coefficient of `j` by the twist factor of
/// `class + m hbar + weight lambda` at pairing `<d, class>`.
pub fn twist_j(j: &QSeries, class: &[i64], weight: &Q) -> Result<QSeries> {
    let ring = j.ring().clone();
    let win = j.window();
    let degs = box_degrees(j.bx());
    let parts = degs
        .par_iter()
        .map(|d| {
            let c = j.coeff(d);
            if c.is_zero() {
                return Ok(None);
            }
            let (num, den) = standard_factors(class, pairing(d, class), weight);
            let f = eval_ratio(&ring, &num, &den, factor_window(&win, &c, weight))?;
            Ok(Some(f.mul(&ring, &c).with_window(win)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut comps = vec![Series::zero(j.bx(), win); ring.dim()];
    for (d, c) in degs.iter().zip(parts) {
        if let Some(c) = c {
            for (s, v) in comps.iter_mut().zip(c.comps) {
                s.add_at(d, &v);
            }
        }
    }
    QSeries::from_comps(ring, comps, j.has_prefactor())
}

/// Window for a factor that will multiply `c` and then be cut to `win`.
fn factor_window(win: &Window, c: &CohValue, weight: &Q) -> Window {
    if weight.is_zero() {
        return Window::UNBOUNDED;
    }
    let terms = || c.comps.iter().flat_map(|x| x.terms().map(|(e, l, _)| (e, l)));
    let (hlo, hhi) = terms().fold((i32::MAX, i32::MIN), |(a, b), (e, _)| (a.min(e), b.max(e)));
    let (llo, lhi) = terms().fold((i32::MAX, i32::MIN), |(a, b), (_, l)| (a.min(l), b.max(l)));
    Window {
        hbar: (win.hbar.0.saturating_sub(hhi), win.hbar.1.saturating_sub(hlo)),
        lambda: (win.lambda.0.saturating_sub(lhi), win.lambda.1.saturating_sub(llo)),
    }
}

/// `1` as a rational check value for `i_coefficient` at `d = 0`.
pub fn is_unit(v: &CohValue) -> bool {
    v.comps[0].as_constant() == Some(Q::one()) && v.comps[1..].iter().all(BiLaurent::is_zero)
}
