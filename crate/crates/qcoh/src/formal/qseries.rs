use super::map::SeriesMap;
use super::scalar::{BiLaurent, Expand, Window};
use super::series::Series;
use crate::cohomology::CohomologyRing;
use crate::error::{Error, Result};
use crate::Q;
use num_traits::{One, Zero};
use std::sync::Arc;

/// Cohomology class with bi-Laurent coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CohValue {
    pub comps: Vec<BiLaurent>,
}

impl CohValue {
    pub fn zero(dim: usize, win: Window) -> Self {
        CohValue { comps: vec![BiLaurent::zero(win); dim] }
    }

    pub fn unit(dim: usize, win: Window) -> Self {
        Self::scalar(dim, BiLaurent::one(win))
    }

    pub fn scalar(dim: usize, c: BiLaurent) -> Self {
        let mut v = Self::zero(dim, c.window());
        v.comps[0] = c;
        v
    }

    pub fn from_class(c: &[Q], win: Window) -> Self {
        CohValue { comps: c.iter().map(|x| BiLaurent::constant(x.clone()).with_window(win)).collect() }
    }

    pub fn window(&self) -> Window {
        self.comps.iter().fold(Window::UNBOUNDED, |w, c| w.meet(&c.window()))
    }

    pub fn with_window(&self, win: Window) -> Self {
        CohValue { comps: self.comps.iter().map(|c| c.with_window(win)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &CohValue) -> CohValue {
        CohValue { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: &BiLaurent) -> CohValue {
        CohValue { comps: self.comps.iter().map(|c| c * k).collect() }
    }

    pub fn mul(&self, ring: &CohomologyRing, o: &CohValue) -> CohValue {
        let mut out = CohValue::zero(ring.dim(), self.window().meet(&o.window()));
        for (a, b, c, k) in ring.structure() {
            if self.comps[*a].is_zero() || o.comps[*b].is_zero() {
                continue;
            }
            let p = (&self.comps[*a] * &o.comps[*b]).scale(k);
            out.comps[*c].add_assign_ref(&p);
        }
        out
    }

    /// `(m hbar + c lambda + u)^{-1}` for a nilpotent rational class `u`.
    pub fn inv_affine(
        ring: &CohomologyRing,
        m: &Q,
        c: &Q,
        u: &[Q],
        win: Window,
        policy: Expand,
    ) -> Result<CohValue> {
        if !u[0].is_zero() {
            return Err(Error::Invalid("affine factor class must be nilpotent".into()));
        }
        let ainv = BiLaurent::inv_linear(m, c, win, policy)?;
        let n = CohValue::from_class(u, win).scale(&-&ainv);
        let mut out = CohValue::unit(ring.dim(), win);
        let mut pw = n.clone();
        while !pw.is_zero() {
            out = out.add(&pw);
            pw = pw.mul(ring, &n);
        }
        Ok(out.scale(&ainv))
    }
}

/// Cohomology-valued q-series, optionally carrying the implicit factor
/// `exp(sum_i p_i log q_i / hbar)` on the left of the stored data.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    ring: Arc<CohomologyRing>,
    comps: Vec<Series>,
    prefactor: bool,
}

impl QSeries {
    pub fn zero(ring: Arc<CohomologyRing>, bx: &[u32], win: Window) -> Self {
        let comps = vec![Series::zero(bx, win); ring.dim()];
        QSeries { ring, comps, prefactor: false }
    }

    pub fn one(ring: Arc<CohomologyRing>, bx: &[u32], win: Window) -> Self {
        let mut s = Self::zero(ring, bx, win);
        s.comps[0] = Series::one(bx, win);
        s
    }

    /// Constant rational class.
    pub fn class(ring: Arc<CohomologyRing>, c: &[Q], bx: &[u32], win: Window) -> Self {
        let comps = c
            .iter()
            .map(|x| Series::constant(BiLaurent::constant(x.clone()).with_window(win), bx))
            .collect();
        QSeries { ring, comps, prefactor: false }
    }

    pub fn from_comps(ring: Arc<CohomologyRing>, comps: Vec<Series>, prefactor: bool) -> Result<Self> {
        if comps.len() != ring.dim() {
            return Err(Error::RingMismatch);
        }
        if comps.windows(2).any(|w| w[0].bx() != w[1].bx()) {
            return Err(Error::BoxMismatch);
        }
        Ok(QSeries { ring, comps, prefactor })
    }

    pub fn ring(&self) -> &Arc<CohomologyRing> {
        &self.ring
    }

    pub fn comps(&self) -> &[Series] {
        &self.comps
    }

    pub fn comp(&self, a: usize) -> &Series {
        &self.comps[a]
    }

    pub fn bx(&self) -> &[u32] {
        self.comps[0].bx()
    }

    pub fn window(&self) -> Window {
        self.comps.iter().fold(Window::UNBOUNDED, |w, c| w.meet(&c.window()))
    }

    pub fn has_prefactor(&self) -> bool {
        self.prefactor
    }

    pub fn with_prefactor(mut self, p: bool) -> Self {
        self.prefactor = p;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Coefficient of `q^d` as a class.
    pub fn coeff(&self, d: &[u32]) -> CohValue {
        CohValue { comps: self.comps.iter().map(|c| c.coeff(d)).collect() }
    }

    /// Rational series per component at `hbar^e lambda^l`.
    pub fn extract(&self, e: i32, l: i32) -> Vec<Series> {
        self.comps.iter().map(|c| c.extract(e, l)).collect()
    }

    fn compatible(&self, o: &QSeries) -> Result<()> {
        if !Arc::ptr_eq(&self.ring, &o.ring) && *self.ring != *o.ring {
            return Err(Error::RingMismatch);
        }
        if self.bx() != o.bx() {
            return Err(Error::BoxMismatch);
        }
        Ok(())
    }

    fn same(&self, comps: Vec<Series>) -> QSeries {
        QSeries { ring: self.ring.clone(), comps, prefactor: self.prefactor }
    }

    pub fn map_comps(&self, f: impl Fn(&Series) -> Series) -> QSeries {
        self.same(self.comps.iter().map(f).collect())
    }

    pub fn add(&self, o: &QSeries) -> Result<QSeries> {
        self.compatible(o)?;
        if self.prefactor != o.prefactor {
            return Err(Error::Invalid("adding series with and without prefactor".into()));
        }
        Ok(self.same(self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect()))
    }

    pub fn sub(&self, o: &QSeries) -> Result<QSeries> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> QSeries {
        self.map_comps(|c| c.neg())
    }

    pub fn scale_series(&self, s: &Series) -> QSeries {
        self.map_comps(|c| c.mul(s))
    }

    pub fn scale(&self, k: &BiLaurent) -> QSeries {
        self.map_comps(|c| c.scale(k))
    }

    /// Cup product; at most one factor may carry the prefactor.
    pub fn mul(&self, o: &QSeries) -> Result<QSeries> {
        self.compatible(o)?;
        if self.prefactor && o.prefactor {
            return Err(Error::Invalid("product of two prefactored series".into()));
        }
        let mut out = vec![Series::zero(self.bx(), self.window().meet(&o.window())); self.ring.dim()];
        for (a, b, c, k) in self.ring.structure() {
            if self.comps[*a].is_zero() || o.comps[*b].is_zero() {
                continue;
            }
            out[*c].add_assign(&self.comps[*a].mul(&o.comps[*b]).scale_q(k));
        }
        Ok(QSeries { ring: self.ring.clone(), comps: out, prefactor: self.prefactor || o.prefactor })
    }

    /// Product with a constant rational class.
    pub fn mul_class(&self, c: &[Q]) -> QSeries {
        let mut out = vec![Series::zero(self.bx(), self.window()); self.ring.dim()];
        for (a, b, k, x) in self.ring.structure() {
            if c[*b].is_zero() || self.comps[*a].is_zero() {
                continue;
            }
            out[*k].add_assign(&self.comps[*a].scale_q(&(x * &c[*b])));
        }
        self.same(out)
    }

    /// `hbar q_i d/dq_i`, acting through the prefactor when present.
    pub fn theta(&self, i: usize) -> QSeries {
        let d = self.map_comps(|c| c.theta(i));
        if !self.prefactor {
            return d;
        }
        let p = self.mul_class(&self.ring.generator(i));
        self.same(d.comps.iter().zip(&p.comps).map(|(a, b)| a.add(b)).collect())
    }

    fn split_unit_constant(&self) -> (BiLaurent, QSeries) {
        let c0 = self.comps[0].constant_term();
        let mut rest = self.clone();
        rest.comps[0] = rest.comps[0].sub(&Series::constant(c0.clone(), self.bx()));
        (c0, rest)
    }

    fn nilpotent_power_sum(x: &QSeries, coefs: impl Fn(usize) -> Q, mut out: QSeries) -> QSeries {
        let mut pw = x.clone();
        let mut n = 1;
        while !pw.is_zero() {
            let k = coefs(n);
            out = out.same(out.comps.iter().zip(&pw.comps).map(|(a, b)| a.add(&b.scale_q(&k))).collect());
            pw = pw.mul(x).expect("same ring");
            n += 1;
        }
        out
    }

    fn no_prefactor(&self) -> Result<()> {
        if self.prefactor {
            return Err(Error::Invalid("operation undefined with prefactor".into()));
        }
        Ok(())
    }

    /// Exponential; the unit component must have zero constant term.
    pub fn exp(&self) -> Result<QSeries> {
        self.no_prefactor()?;
        let (c0, rest) = self.split_unit_constant();
        if !c0.is_zero() {
            return Err(Error::BadConstantTerm(format!("{c0}")));
        }
        let mut fact = Q::one();
        let mut facts = vec![Q::one()];
        let bound = self.ring.top_degree() as usize + self.bx().iter().sum::<u32>() as usize + 1;
        for n in 1..=bound {
            fact /= crate::q(n as i64);
            facts.push(fact.clone());
        }
        let one = QSeries::one(self.ring.clone(), self.bx(), self.window());
        Ok(Self::nilpotent_power_sum(&rest, |n| facts.get(n).cloned().unwrap_or_else(Q::zero), one))
    }

    /// Logarithm; the unit component must have constant term 1.
    pub fn log(&self) -> Result<QSeries> {
        self.no_prefactor()?;
        let (c0, rest) = self.split_unit_constant();
        if c0.as_constant() != Some(Q::one()) {
            return Err(Error::BadConstantTerm(format!("{c0}")));
        }
        let zero = QSeries::zero(self.ring.clone(), self.bx(), self.window());
        Ok(Self::nilpotent_power_sum(
            &rest,
            |n| {
                let v = Q::one() / crate::q(n as i64);
                if n % 2 == 0 {
                    -v
                } else {
                    v
                }
            },
            zero,
        ))
    }

    /// Inverse; the unit component must start with a nonzero rational.
    pub fn inverse(&self) -> Result<QSeries> {
        self.no_prefactor()?;
        let (c0, rest) = self.split_unit_constant();
        let c0 = c0
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::BadConstantTerm(format!("{c0}")))?;
        let inv0 = Q::one() / c0;
        let x = rest.map_comps(|c| c.scale_q(&-inv0.clone()));
        let one = QSeries::one(self.ring.clone(), self.bx(), self.window());
        Ok(Self::nilpotent_power_sum(&x, |_| Q::one(), one).map_comps(|c| c.scale_q(&inv0)))
    }

    /// Substitutes `q = y v(y)` where `map` is that inverse map. With a
    /// prefactor, `q^{p/hbar}` becomes `y^{p/hbar} exp(sum_i p_i log v_i / hbar)`
    /// and the second factor is folded into the stored data.
    pub fn substitute(&self, map: &SeriesMap) -> Result<QSeries> {
        let inner = map.components();
        let comps = self.comps.iter().map(|c| c.compose(&inner)).collect::<Result<Vec<_>>>()?;
        let out = QSeries { ring: self.ring.clone(), comps, prefactor: self.prefactor };
        if !self.prefactor {
            return Ok(out);
        }
        let bx = map.bx().to_vec();
        let mut expo = QSeries::zero(self.ring.clone(), &bx, Window::UNBOUNDED);
        for (i, v) in map.units().iter().enumerate() {
            let lv = v.log()?.shift_hl(-1, 0);
            let term = QSeries::one(self.ring.clone(), &bx, Window::UNBOUNDED)
                .mul_class(&self.ring.generator(i))
                .scale_series(&lv);
            expo = expo.add(&term)?;
        }
        let factor = expo.exp()?.map_comps(|c| c.with_window(out.window()));
        let stripped = out.clone().with_prefactor(false);
        Ok(factor.mul(&stripped)?.with_prefactor(true))
    }

    /// Monomial change `q_i -> prod_j y_j^{exps[i][j]}` on the stored data.
    pub fn mono_subst(&self, exps: &[Vec<i64>], bx: &[u32]) -> Result<QSeries> {
        let comps = self.comps.iter().map(|c| c.mono_subst(exps, bx)).collect::<Result<Vec<_>>>()?;
        Ok(self.same(comps))
    }

    /// Re-expresses in another ring through a basis map whose row `a` is the
    /// image of basis element `a`.
    pub fn map_basis(&self, target: Arc<CohomologyRing>, phi: &[Vec<Q>]) -> QSeries {
        let mut out = vec![Series::zero(self.bx(), self.window()); target.dim()];
        for (a, row) in phi.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    out[b].add_assign(&self.comps[a].scale_q(x));
                }
            }
        }
        QSeries { ring: target, comps: out, prefactor: self.prefactor }
    }

    pub fn with_window(&self, win: Window) -> QSeries {
        self.map_comps(|c| c.with_window(win))
    }

    pub fn with_box(&self, bx: &[u32]) -> QSeries {
        self.map_comps(|c| c.with_box(bx))
    }

    pub fn filter_hl(&self, keep: impl Fn(i32, i32) -> bool + Copy) -> QSeries {
        self.map_comps(|c| c.filter_hl(keep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{build_ring, RingPresentation};
    use crate::q;

    fn p1() -> Arc<CohomologyRing> {
        let pres = RingPresentation::from_linear_products(1, &[vec![vec![1], vec![1]]]);
        Arc::new(build_ring(&pres, 2).unwrap())
    }

    #[test]
    fn exp_log_round_trip() {
        let r = p1();
        let bx = [4];
        let w = Window::UNBOUNDED;
        let x = QSeries::class(r.clone(), &[q(0), q(1)], &bx, w)
            .add(&QSeries::one(r.clone(), &bx, w).scale_series(&Series::var(0, &bx, w)))
            .unwrap();
        let back = x.exp().unwrap().log().unwrap();
        assert_eq!(back, x);
        let inv = x.exp().unwrap().inverse().unwrap();
        assert_eq!(inv, x.neg().exp().unwrap());
    }

    #[test]
    fn inverse_of_affine_factor() {
        let r = p1();
        let w = Window::new(-6, 6, -6, 6);
        let u = [q(0), q(1)];
        let inv = CohValue::inv_affine(&r, &q(1), &q(1), &u, w, Expand::Lambda).unwrap();
        let f = CohValue {
            comps: vec![
                &BiLaurent::monomial(1, 0, q(1), w) + &BiLaurent::monomial(0, 1, q(1), w),
                BiLaurent::constant(q(1)).with_window(w),
            ],
        };
        let prod = inv.mul(&r, &f);
        // exact away from the truncation edge
        assert_eq!(prod.comps[0].filter(|e, l| e.abs() < 3 && l.abs() < 3), BiLaurent::one(w));
        assert!(prod.comps[1].filter(|e, l| e.abs() < 3 && l.abs() < 3).is_zero());
    }

    #[test]
    fn ring_mismatch() {
        let r = p1();
        let pres = RingPresentation::from_linear_products(1, &[vec![vec![1], vec![1], vec![1]]]);
        let r3 = Arc::new(build_ring(&pres, 3).unwrap());
        let a = QSeries::one(r, &[2], Window::UNBOUNDED);
        let b = QSeries::one(r3, &[2], Window::UNBOUNDED);
        assert_eq!(a.add(&b), Err(Error::RingMismatch));
    }
}
