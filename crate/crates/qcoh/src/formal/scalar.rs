//! Laurent polynomials in hbar and lambda truncated to a window.

use crate::error::{Error, Result};
use crate::{fmt_q, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Inclusive exponent bounds for hbar and lambda.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub hbar: (i32, i32),
    pub lambda: (i32, i32),
}

impl Window {
    pub const UNBOUNDED: Window = Window {
        hbar: (i32::MIN, i32::MAX),
        lambda: (i32::MIN, i32::MAX),
    };

    pub fn new(hmin: i32, hmax: i32, lmin: i32, lmax: i32) -> Self {
        Window { hbar: (hmin, hmax), lambda: (lmin, lmax) }
    }

    /// Symmetric window `[-h, h] x [-l, l]`.
    pub fn symmetric(h: i32, l: i32) -> Self {
        Window::new(-h, h, -l, l)
    }

    pub fn contains(&self, e: i32, l: i32) -> bool {
        self.hbar.0 <= e && e <= self.hbar.1 && self.lambda.0 <= l && l <= self.lambda.1
    }

    pub fn meet(&self, o: &Window) -> Window {
        Window {
            hbar: (self.hbar.0.max(o.hbar.0), self.hbar.1.min(o.hbar.1)),
            lambda: (self.lambda.0.max(o.lambda.0), self.lambda.1.min(o.lambda.1)),
        }
    }

    /// Grows each bound outward by the given amounts.
    pub fn widen(&self, hmin: i32, hmax: i32, lmin: i32, lmax: i32) -> Window {
        Window {
            hbar: (self.hbar.0.saturating_sub(hmin), self.hbar.1.saturating_add(hmax)),
            lambda: (self.lambda.0.saturating_sub(lmin), self.lambda.1.saturating_add(lmax)),
        }
    }

    pub fn is_unbounded(&self) -> bool {
        *self == Window::UNBOUNDED
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::UNBOUNDED
    }
}

/// Which variable absorbs the inverse of a factor `m hbar + c lambda + u`
/// when both coefficients are nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Expand {
    /// Expand in `1/lambda`; this creates positive hbar powers.
    #[default]
    Lambda,
    /// Expand in `1/hbar`.
    Hbar,
}

/// Sparse Laurent polynomial in (hbar, lambda) with no stored zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct BiLaurent {
    terms: BTreeMap<(i32, i32), Q>,
    win: Window,
}

impl BiLaurent {
    pub fn zero(win: Window) -> Self {
        BiLaurent { terms: BTreeMap::new(), win }
    }

    pub fn one(win: Window) -> Self {
        Self::monomial(0, 0, Q::one(), win)
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(0, 0, c, Window::UNBOUNDED)
    }

    /// `c hbar^e lambda^l`, or zero if outside the window.
    pub fn monomial(e: i32, l: i32, c: Q, win: Window) -> Self {
        let mut s = Self::zero(win);
        s.add_term(e, l, c);
        s
    }

    pub fn window(&self) -> Window {
        self.win
    }

    /// Same terms, truncated to `win`.
    pub fn with_window(&self, win: Window) -> Self {
        let mut out = Self::zero(win);
        for (&(e, l), c) in &self.terms {
            out.add_term(e, l, c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i32, &Q)> {
        self.terms.iter().map(|(&(e, l), c)| (e, l, c))
    }

    pub fn coeff(&self, e: i32, l: i32) -> Q {
        self.terms.get(&(e, l)).cloned().unwrap_or_else(Q::zero)
    }

    /// Adds `c hbar^e lambda^l`, dropping it outside the window.
    pub fn add_term(&mut self, e: i32, l: i32, c: Q) {
        if c.is_zero() || !self.win.contains(e, l) {
            return;
        }
        match self.terms.entry((e, l)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, o: &BiLaurent) {
        for (&(e, l), c) in &o.terms {
            self.add_term(e, l, c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, o: &BiLaurent) {
        for (&(e, l), c) in &o.terms {
            self.add_term(e, l, -c.clone());
        }
    }

    /// Adds `k * o`.
    pub fn add_scaled(&mut self, o: &BiLaurent, k: &Q) {
        if k.is_zero() {
            return;
        }
        for (&(e, l), c) in &o.terms {
            self.add_term(e, l, c * k);
        }
    }

    /// Adds `a * b`, truncating each product term to this window.
    pub fn add_product(&mut self, a: &BiLaurent, b: &BiLaurent) {
        for (&(e1, l1), c1) in &a.terms {
            for (&(e2, l2), c2) in &b.terms {
                self.add_term(e1 + e2, l1 + l2, c1 * c2);
            }
        }
    }

    pub fn scale(&self, k: &Q) -> BiLaurent {
        let mut out = Self::zero(self.win);
        out.add_scaled(self, k);
        out
    }

    /// Multiplies by `hbar^e lambda^l`.
    pub fn shift(&self, e: i32, l: i32) -> BiLaurent {
        let mut out = Self::zero(self.win);
        for (&(a, b), c) in &self.terms {
            out.add_term(a + e, b + l, c.clone());
        }
        out
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(i32, i32) -> bool) -> BiLaurent {
        BiLaurent {
            terms: self
                .terms
                .iter()
                .filter(|(&(e, l), _)| keep(e, l))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            win: self.win,
        }
    }

    pub fn max_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn min_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).min()
    }

    /// Pure rational if the only term is `hbar^0 lambda^0`.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Inverse of `m hbar + c lambda` as a series in the chosen direction.
    ///
    /// The hbar direction is used when `c = 0` or the policy asks for it
    /// with `m != 0`; otherwise the lambda direction. A one-term factor is
    /// inverted exactly; a two-term factor needs a finite bound on the side
    /// the expansion runs towards.
    pub fn inv_linear(m: &Q, c: &Q, win: Window, policy: Expand) -> Result<BiLaurent> {
        let name = || format!("{m}*hbar + {c}*lambda");
        if m.is_zero() && c.is_zero() {
            return Err(Error::NonInvertibleFactor(name()));
        }
        let lambda_first = !c.is_zero() && (m.is_zero() || policy == Expand::Lambda);
        let mut out = Self::zero(win);
        // 1/(a X + b Y) = sum_n (-b)^n / a^(n+1) Y^n X^(-n-1)
        let (a, b) = if lambda_first { (c, m) } else { (m, c) };
        let mut coef = Q::one() / a;
        let ratio = -(b / a);
        let mut n: i32 = 0;
        loop {
            let (e, l) = if lambda_first { (n, -n - 1) } else { (-n - 1, n) };
            out.add_term(e, l, coef.clone());
            if b.is_zero() {
                break;
            }
            let exhausted = if lambda_first {
                l - 1 < win.lambda.0 || e + 1 > win.hbar.1
            } else {
                e - 1 < win.hbar.0 || l + 1 > win.lambda.1
            };
            if exhausted {
                break;
            }
            if (lambda_first && win.lambda.0 == i32::MIN && win.hbar.1 == i32::MAX)
                || (!lambda_first && win.hbar.0 == i32::MIN && win.lambda.1 == i32::MAX)
            {
                return Err(Error::UnboundedExpansion(name()));
            }
            coef *= &ratio;
            n += 1;
        }
        Ok(out)
    }

    /// Total degree range `e + l` of the stored terms.
    pub fn degrees(&self) -> Option<(i32, i32)> {
        let it = self.terms.keys().map(|&(e, l)| e + l);
        let lo = it.clone().min()?;
        Some((lo, it.max()?))
    }
}

impl Add for &BiLaurent {
    type Output = BiLaurent;
    fn add(self, o: &BiLaurent) -> BiLaurent {
        let mut out = self.with_window(self.win.meet(&o.win));
        out.add_assign_ref(o);
        out
    }
}

impl Sub for &BiLaurent {
    type Output = BiLaurent;
    fn sub(self, o: &BiLaurent) -> BiLaurent {
        let mut out = self.with_window(self.win.meet(&o.win));
        out.sub_assign_ref(o);
        out
    }
}

impl Mul for &BiLaurent {
    type Output = BiLaurent;
    fn mul(self, o: &BiLaurent) -> BiLaurent {
        let mut out = BiLaurent::zero(self.win.meet(&o.win));
        out.add_product(self, o);
        out
    }
}

impl Neg for &BiLaurent {
    type Output = BiLaurent;
    fn neg(self) -> BiLaurent {
        self.scale(&-Q::one())
    }
}

impl fmt::Debug for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(e, l), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", fmt_q(c))?;
            if e != 0 {
                write!(f, "*h^{e}")?;
            }
            if l != 0 {
                write!(f, "*l^{l}")?;
            }
        }
        Ok(())
    }
}
