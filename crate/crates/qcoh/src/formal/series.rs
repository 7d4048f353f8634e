//! Multivariate q-series truncated to a box, with bi-Laurent coefficients.

use super::scalar::{BiLaurent, Window};
use crate::error::{Error, Result};
use crate::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Multidegrees of a box ordered by total degree, then lexicographically.
pub fn box_degrees(bx: &[u32]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for &b in bx {
        out = out
            .into_iter()
            .flat_map(|d| {
                (0..=b).map(move |x| {
                    let mut e = d.clone();
                    e.push(x);
                    e
                })
            })
            .collect();
    }
    out.sort_by(|a, b| {
        let sa: u32 = a.iter().sum();
        let sb: u32 = b.iter().sum();
        sa.cmp(&sb).then_with(|| a.cmp(b))
    });
    out
}

pub fn in_box(d: &[u32], bx: &[u32]) -> bool {
    d.iter().zip(bx).all(|(a, b)| a <= b)
}

/// Scalar q-series `sum_d c_d q^d` with every `d` inside the box.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    bx: Vec<u32>,
    win: Window,
    terms: BTreeMap<Vec<u32>, BiLaurent>,
}

impl Series {
    pub fn zero(bx: &[u32], win: Window) -> Self {
        Series { bx: bx.to_vec(), win, terms: BTreeMap::new() }
    }

    pub fn one(bx: &[u32], win: Window) -> Self {
        Self::constant(BiLaurent::one(win), bx)
    }

    pub fn constant(c: BiLaurent, bx: &[u32]) -> Self {
        let win = c.window();
        let mut s = Self::zero(bx, win);
        s.add_at(&vec![0; bx.len()], &c);
        s
    }

    pub fn monomial(d: &[u32], c: BiLaurent, bx: &[u32]) -> Self {
        let win = c.window();
        let mut s = Self::zero(bx, win);
        s.add_at(d, &c);
        s
    }

    /// The variable `q_i`.
    pub fn var(i: usize, bx: &[u32], win: Window) -> Self {
        let mut d = vec![0; bx.len()];
        d[i] = 1;
        Self::monomial(&d, BiLaurent::one(win), bx)
    }

    /// Rational-coefficient series from `(degree, value)` pairs.
    pub fn from_rationals<'a>(
        bx: &[u32],
        win: Window,
        terms: impl IntoIterator<Item = (&'a [u32], Q)>,
    ) -> Self {
        let mut s = Self::zero(bx, win);
        for (d, c) in terms {
            s.add_at(d, &BiLaurent::monomial(0, 0, c, win));
        }
        s
    }

    pub fn bx(&self) -> &[u32] {
        &self.bx
    }

    pub fn window(&self) -> Window {
        self.win
    }

    pub fn nvars(&self) -> usize {
        self.bx.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BiLaurent)> {
        self.terms.iter()
    }

    pub fn coeff(&self, d: &[u32]) -> BiLaurent {
        self.terms.get(d).cloned().unwrap_or_else(|| BiLaurent::zero(self.win))
    }

    /// Rational coefficient of `hbar^e lambda^l q^d`.
    pub fn coeff_at(&self, d: &[u32], e: i32, l: i32) -> Q {
        self.terms.get(d).map_or_else(Q::zero, |c| c.coeff(e, l))
    }

    /// Rational coefficient of `q^d` in an hbar- and lambda-free series.
    pub fn rat(&self, d: &[u32]) -> Q {
        self.coeff_at(d, 0, 0)
    }

    pub fn add_at(&mut self, d: &[u32], c: &BiLaurent) {
        if c.is_zero() || !in_box(d, &self.bx) {
            return;
        }
        let win = self.win;
        let entry = self.terms.entry(d.to_vec()).or_insert_with(|| BiLaurent::zero(win));
        entry.add_assign_ref(c);
        if entry.is_zero() {
            self.terms.remove(d);
        }
    }

    pub fn set_at(&mut self, d: &[u32], c: BiLaurent) {
        if !in_box(d, &self.bx) {
            return;
        }
        let c = c.with_window(self.win);
        if c.is_zero() {
            self.terms.remove(d);
        } else {
            self.terms.insert(d.to_vec(), c);
        }
    }

    fn check(&self, o: &Series) {
        assert_eq!(self.bx, o.bx, "series boxes differ");
    }

    pub fn add(&self, o: &Series) -> Series {
        self.check(o);
        let mut out = self.clone();
        out.win = self.win.meet(&o.win);
        for (d, c) in &o.terms {
            out.add_at(d, c);
        }
        if out.win != self.win {
            out = out.with_window(out.win);
        }
        out
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Series {
        self.scale_q(&-Q::one())
    }

    pub fn add_assign(&mut self, o: &Series) {
        self.check(o);
        for (d, c) in &o.terms {
            self.add_at(d, c);
        }
    }

    pub fn sub_assign(&mut self, o: &Series) {
        self.check(o);
        for (d, c) in &o.terms {
            self.add_at(d, &-c);
        }
    }

    pub fn mul(&self, o: &Series) -> Series {
        self.check(o);
        let mut out = Series::zero(&self.bx, self.win.meet(&o.win));
        let mut acc: BTreeMap<Vec<u32>, BiLaurent> = BTreeMap::new();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &o.terms {
                let d: Vec<u32> = d1.iter().zip(d2).map(|(a, b)| a + b).collect();
                if !in_box(&d, &self.bx) {
                    continue;
                }
                acc.entry(d).or_insert_with(|| BiLaurent::zero(out.win)).add_product(c1, c2);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        out.terms = acc;
        out
    }

    pub fn scale_q(&self, k: &Q) -> Series {
        let mut out = Series::zero(&self.bx, self.win);
        if k.is_zero() {
            return out;
        }
        for (d, c) in &self.terms {
            out.terms.insert(d.clone(), c.scale(k));
        }
        out
    }

    pub fn scale(&self, k: &BiLaurent) -> Series {
        let mut out = Series::zero(&self.bx, self.win.meet(&k.window()));
        for (d, c) in &self.terms {
            out.add_at(d, &(c * k));
        }
        out
    }

    /// Multiplies by `hbar^e lambda^l`.
    pub fn shift_hl(&self, e: i32, l: i32) -> Series {
        self.map_coeffs(|c| c.shift(e, l))
    }

    /// Multiplies by `q^d`.
    pub fn shift_q(&self, d: &[u32]) -> Series {
        let mut out = Series::zero(&self.bx, self.win);
        for (e, c) in &self.terms {
            let f: Vec<u32> = e.iter().zip(d).map(|(a, b)| a + b).collect();
            out.add_at(&f, c);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&BiLaurent) -> BiLaurent) -> Series {
        let mut out = Series::zero(&self.bx, self.win);
        for (d, c) in &self.terms {
            out.add_at(d, &f(c));
        }
        out
    }

    /// Multiplies the `q^d` coefficient by `w(d)`.
    pub fn weight(&self, w: impl Fn(&[u32]) -> Q) -> Series {
        let mut out = Series::zero(&self.bx, self.win);
        for (d, c) in &self.terms {
            out.add_at(d, &c.scale(&w(d)));
        }
        out
    }

    /// `q_i d/dq_i`.
    pub fn d_log(&self, i: usize) -> Series {
        self.weight(|d| Q::from_integer(d[i].into()))
    }

    /// `hbar q_i d/dq_i`.
    pub fn theta(&self, i: usize) -> Series {
        self.d_log(i).shift_hl(1, 0)
    }

    pub fn with_window(&self, win: Window) -> Series {
        let mut out = Series::zero(&self.bx, win);
        for (d, c) in &self.terms {
            out.add_at(d, &c.with_window(win));
        }
        out
    }

    /// Restricts to a smaller box, or pads the box without new terms.
    pub fn with_box(&self, bx: &[u32]) -> Series {
        let mut out = Series::zero(bx, self.win);
        for (d, c) in &self.terms {
            out.add_at(d, c);
        }
        out
    }

    /// Keeps coefficient terms accepted by `keep(e, l)`.
    pub fn filter_hl(&self, keep: impl Fn(i32, i32) -> bool + Copy) -> Series {
        self.map_coeffs(|c| c.filter(keep))
    }

    /// The rational series sitting at `hbar^e lambda^l`.
    pub fn extract(&self, e: i32, l: i32) -> Series {
        let mut out = Series::zero(&self.bx, Window::UNBOUNDED);
        for (d, c) in &self.terms {
            let x = c.coeff(e, l);
            if !x.is_zero() {
                out.add_at(d, &BiLaurent::constant(x));
            }
        }
        out
    }

    pub fn constant_term(&self) -> BiLaurent {
        self.coeff(&vec![0; self.bx.len()])
    }

    pub fn is_hbar_free(&self) -> bool {
        self.terms.values().all(|c| c.terms().all(|(e, _, _)| e == 0))
    }

    pub fn max_hbar(&self) -> Option<i32> {
        self.terms.values().filter_map(|c| c.max_hbar()).max()
    }

    /// Sum of `coefs[n] x^n` for `n >= 1` plus `coefs[0]`, stopping early
    /// once powers of `x` vanish.
    fn power_sum(x: &Series, coefs: impl Fn(usize) -> Q, constant: Series) -> Series {
        let mut out = constant;
        let mut pw = x.clone();
        let mut n = 1;
        while !pw.is_zero() {
            out.add_assign(&pw.scale_q(&coefs(n)));
            pw = pw.mul(x);
            n += 1;
        }
        out
    }

    fn split_constant(&self) -> (BiLaurent, Series) {
        let c0 = self.constant_term();
        let mut rest = self.clone();
        rest.terms.remove(&vec![0; self.bx.len()]);
        (c0, rest)
    }

    /// Multiplicative inverse; the constant term must be a nonzero rational.
    pub fn inverse(&self) -> Result<Series> {
        let (c0, rest) = self.split_constant();
        let c0 = c0
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::BadConstantTerm(format!("{c0}")))?;
        let inv0 = Q::one() / &c0;
        let x = rest.scale_q(&-inv0.clone());
        let one = Series::one(&self.bx, self.win);
        Ok(Series::power_sum(&x, |_| Q::one(), one).scale_q(&inv0))
    }

    /// Exponential; the constant term must vanish.
    pub fn exp(&self) -> Result<Series> {
        let (c0, rest) = self.split_constant();
        if !c0.is_zero() {
            return Err(Error::BadConstantTerm(format!("{c0}")));
        }
        let mut fact = Q::one();
        let facts: Vec<Q> = (0..=self.max_total_degree() + 1)
            .map(|n| {
                if n > 0 {
                    fact /= Q::from_integer((n as i64).into());
                }
                fact.clone()
            })
            .collect();
        let one = Series::one(&self.bx, self.win);
        Ok(Series::power_sum(&rest, |n| facts.get(n).cloned().unwrap_or_else(Q::zero), one))
    }

    /// Logarithm; the constant term must be 1.
    pub fn log(&self) -> Result<Series> {
        let (c0, rest) = self.split_constant();
        if c0.as_constant() != Some(Q::one()) {
            return Err(Error::BadConstantTerm(format!("{c0}")));
        }
        let zero = Series::zero(&self.bx, self.win);
        Ok(Series::power_sum(
            &rest,
            |n| {
                let v = Q::one() / Q::from_integer((n as i64).into());
                if n % 2 == 0 {
                    -v
                } else {
                    v
                }
            },
            zero,
        ))
    }

    /// `self^n` for `n >= 0`.
    pub fn pow(&self, n: u32) -> Series {
        let mut out = Series::one(&self.bx, self.win);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    fn max_total_degree(&self) -> usize {
        self.bx.iter().map(|&b| b as usize).sum()
    }

    /// Substitutes `q_i -> maps[i]`; each map needs zero constant term.
    pub fn compose(&self, maps: &[Series]) -> Result<Series> {
        let nb = maps.first().map(|m| m.bx.clone()).unwrap_or_default();
        for m in maps {
            if !m.constant_term().is_zero() {
                return Err(Error::BadConstantTerm("composition map".into()));
            }
        }
        // powers[i][n] = maps[i]^n
        let powers: Vec<Vec<Series>> = maps
            .iter()
            .zip(&self.bx)
            .map(|(m, &b)| {
                let mut v = vec![Series::one(&nb, m.win)];
                for n in 1..=b as usize {
                    let next = v[n - 1].mul(m);
                    v.push(next);
                }
                v
            })
            .collect();
        let win = maps.iter().fold(self.win, |w, m| w.meet(&m.win));
        let mut out = Series::zero(&nb, win);
        for (d, c) in &self.terms {
            let mut term = Series::constant(c.clone(), &nb);
            for (i, &e) in d.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[i][e as usize]);
                }
            }
            out.add_assign(&term);
        }
        Ok(out)
    }

    /// Substitutes `q_i -> prod_j y_j^{exps[i][j]}` into a series over `bx`.
    pub fn mono_subst(&self, exps: &[Vec<i64>], bx: &[u32]) -> Result<Series> {
        let mut out = Series::zero(bx, self.win);
        for (d, c) in &self.terms {
            let mut e = vec![0i64; bx.len()];
            for (i, &di) in d.iter().enumerate() {
                for (j, x) in e.iter_mut().enumerate() {
                    *x += exps[i][j] * di as i64;
                }
            }
            if e.iter().any(|&x| x < 0) {
                return Err(Error::BoxOverflow);
            }
            let e: Vec<u32> = e.into_iter().map(|x| x as u32).collect();
            out.add_at(&e, c);
        }
        Ok(out)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})q^{d:?}")?;
        }
        Ok(())
    }
}
