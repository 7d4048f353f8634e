//! Mirror maps read from the `1/hbar` coefficient of J, their inversion, and
//! the shifted and stripped J-functions they produce.

use crate::cohomology::CohomologyRing;
use crate::error::{Error, Result};
use crate::formal::{BiLaurent, QSeries, Series, SeriesMap, Window};
use crate::matrix::SeriesMatrix;
use crate::Q;
use num_traits::Zero;
use std::sync::Arc;

/// The `1/hbar` data of a J-function.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorData {
    pub ring: Arc<CohomologyRing>,
    /// `lambda^0` part per basis element; for divisors this is `t_i - log q_i`.
    pub slots: Vec<Series>,
    /// Coefficient of `lambda` in the unit component.
    pub tilde: Series,
}

pub fn divisor_index(ring: &CohomologyRing, i: usize) -> usize {
    let mut m = vec![0; ring.num_generators()];
    m[i] = 1;
    ring.index_of(&m).expect("generator is a basis element")
}

impl MirrorData {
    pub fn extract(j: &QSeries) -> MirrorData {
        let slots = j.extract(-1, 0);
        let tilde = j.comp(0).extract(-1, 1);
        MirrorData { ring: j.ring().clone(), slots, tilde }
    }

    /// `t_i - log q_i`.
    pub fn divisor(&self, i: usize) -> &Series {
        &self.slots[divisor_index(&self.ring, i)]
    }

    /// `y_i = q_i exp(t_i - log q_i)`.
    pub fn forward_map(&self) -> Result<SeriesMap> {
        let k = self.ring.num_generators();
        let f: Vec<Series> = (0..k).map(|i| self.divisor(i).clone()).collect();
        SeriesMap::from_log_corrections(&f)
    }

    pub fn inverse_map(&self) -> Result<SeriesMap> {
        self.forward_map()?.invert()
    }

    pub fn is_trivial(&self) -> bool {
        (0..self.ring.num_generators()).all(|i| self.divisor(i).is_zero())
    }
}

/// `J(q(y))` with the prefactor carried into the new variables.
pub fn shift_by_mirror(j: &QSeries, m: &MirrorData) -> Result<QSeries> {
    if m.is_trivial() {
        return Ok(j.clone());
    }
    j.substitute(&m.inverse_map()?)
}

/// Multiplies by `exp(-lambda tilde / hbar)`.
pub fn strip_equivariant(j: &QSeries, tilde: &Series) -> Result<QSeries> {
    let win = j.window();
    let e = tilde.with_window(Window::UNBOUNDED).shift_hl(-1, 1).neg().exp()?.with_window(win);
    Ok(j.scale_series(&e))
}

/// Named series of an `X_k` computation.
#[derive(Clone, Debug, PartialEq)]
pub struct GwOutput {
    /// `t - log q` in q.
    pub t: Series,
    /// Coefficient of lambda in the equivariant mirror map, in q.
    pub t_tilde: Series,
    /// `hbar^-2 lambda p` slot of J, in q.
    pub w: Series,
    /// `hbar^-2 lambda^2` unit slot of J, in q.
    pub w_tilde: Series,
    /// `hbar^-2 lambda p` slot after shifting and stripping, in `e^t`.
    pub w_hat: Series,
    /// `hbar^-2 lambda^2` unit slot after shifting and stripping, in `e^t`.
    pub w_hat_unit: Series,
    /// `c` with `W~ - t~^2/2 = c W` in `e^t` when such a constant exists.
    pub ratio: Option<Q>,
    pub stripped: QSeries,
}

/// Full readout for a one-parameter equivariant J.
pub fn gw_readout(j: &QSeries) -> Result<GwOutput> {
    let md = MirrorData::extract(j);
    let p = divisor_index(j.ring(), 0);
    let shifted = shift_by_mirror(j, &md)?;
    let tilde_y = if md.is_trivial() {
        md.tilde.clone()
    } else {
        md.tilde.compose(&md.inverse_map()?.components())?
    };
    let stripped = strip_equivariant(&shifted, &tilde_y)?;
    let w = j.comp(p).extract(-2, 1);
    let w_tilde = j.comp(0).extract(-2, 2);
    let w_hat = stripped.comp(p).extract(-2, 1);
    let w_hat_unit = stripped.comp(0).extract(-2, 2);
    let ratio = ratio_of(&w_tilde_relation(&w_tilde, &md, &tilde_y)?, &w_hat);
    Ok(GwOutput { t: md.divisor(0).clone(), t_tilde: md.tilde, w, w_tilde, w_hat, w_hat_unit, ratio, stripped })
}

/// `W~(q(t)) - t~(q(t))^2 / 2`.
fn w_tilde_relation(w_tilde: &Series, md: &MirrorData, tilde_y: &Series) -> Result<Series> {
    let wt = if md.is_trivial() { w_tilde.clone() } else { w_tilde.compose(&md.inverse_map()?.components())? };
    Ok(wt.sub(&tilde_y.mul(tilde_y).scale_q(&crate::qr(1, 2))))
}

/// `c` with `a = c b` coefficientwise, if it exists.
pub fn ratio_of(a: &Series, b: &Series) -> Option<Q> {
    let mut c: Option<Q> = None;
    for (d, x) in b.terms() {
        let x = x.as_constant()?;
        let y = a.coeff(d).as_constant().unwrap_or_else(Q::zero);
        let r = y / x;
        match &c {
            None => c = Some(r),
            Some(v) if *v != r => return None,
            _ => {}
        }
    }
    let c = c?;
    let rebuilt = b.scale_q(&c);
    (rebuilt == *a).then_some(c)
}

/// Big J on extra variables: row `0` of `exp(Theta/hbar) R` where
/// `Theta = x_0 Id + sum_j x_j Omega_j` and `R` holds the rows of the
/// normalized fundamental solution. The extra variables are given as
/// series in `q`, so the result is again a series in `q`.
pub fn modified_j(r: &SeriesMatrix, x0: &Series, extra: &[(Series, SeriesMatrix)], ring: Arc<CohomologyRing>) -> Result<QSeries> {
    let n = r.nrows();
    let bx = r.bx().to_vec();
    let win = r.window();
    let mut theta = SeriesMatrix::zero(n, n, &bx, Window::UNBOUNDED);
    for (x, om) in extra {
        if !om.is_hbar_free() {
            return Err(Error::NotHbarFree);
        }
        theta = theta.add(&om.map(|e| e.mul(x)));
    }
    let e = theta.map(|s| s.shift_hl(-1, 0)).exp()?.with_window(win);
    let row0 = SeriesMatrix { rows: vec![e.rows[0].clone()] };
    let combined = row0.mul(r);
    let e0 = x0.with_window(Window::UNBOUNDED).shift_hl(-1, 0).exp()?.with_window(win);
    let comps = combined.rows[0].iter().map(|c| c.mul(&e0)).collect();
    QSeries::from_comps(ring, comps, true)
}

/// J on the divisor directions after the non-divisor `1/hbar` slots have
/// been absorbed into extra variables.
#[derive(Clone, Debug)]
pub struct ExtendedJ {
    /// `J'` in the flat variables `y`.
    pub j: QSeries,
    /// Unshifted J (row 0 of `R`).
    pub raw: QSeries,
    /// Mirror data of `raw`.
    pub mirror: MirrorData,
    /// Value of the unit variable as a series in `q`.
    pub x0: Series,
    /// Basis index and value of each extra variable as a series in `q`.
    pub extra: Vec<(usize, Series)>,
    /// `y(q)`.
    pub map: SeriesMap,
    pub omegas: Vec<SeriesMatrix>,
}

/// Builds `J'` from an I-function.
///
/// Each basis element `b` that is neither `1` nor a divisor gets a variable
/// `x_b` acting through its quantum multiplication matrix (the product of
/// gauge-fixed connection matrices along its monomial). The `x_b` and `x_0`
/// are chosen as series in `q` so that the `1/hbar` slots of `1` and of every
/// such `b` vanish, and the remaining divisor slots define `y(q)`.
pub fn extended_j(i: &QSeries) -> Result<ExtendedJ> {
    let ring = i.ring().clone();
    let fs = crate::birkhoff::build_fundamental(i)?;
    let pair = crate::birkhoff::birkhoff_matrix(&fs)?;
    let omegas = crate::connection::gauge_fixed_all(&fs, &pair)?;
    let raw = QSeries::from_comps(ring.clone(), pair.r.rows[0].clone(), true)?;
    let md = MirrorData::extract(&raw);
    let bx = raw.bx().to_vec();
    let win = Window::UNBOUNDED;
    let nondiv: Vec<usize> = (1..ring.dim()).filter(|&a| ring.basis_degree(a) != 1).collect();
    let mats: Vec<SeriesMatrix> = nondiv
        .iter()
        .map(|&b| {
            let mut m = SeriesMatrix::identity(ring.dim(), &bx, win);
            for (g, &e) in ring.basis()[b].iter().enumerate() {
                for _ in 0..e {
                    m = m.mul(&omegas[g].with_window(win));
                }
            }
            m
        })
        .collect();
    let n = nondiv.len();
    let mut a = SeriesMatrix::zero(n, n, &bx, win);
    for (r, &c) in nondiv.iter().enumerate() {
        for k in 0..n {
            a.rows[r][k] = mats[k].entry(0, c).clone();
        }
    }
    let ainv = a.inverse()?;
    let xs: Vec<Series> = (0..n)
        .map(|k| {
            let mut acc = Series::zero(&bx, win);
            for (r, &c) in nondiv.iter().enumerate() {
                acc.sub_assign(&ainv.entry(k, r).mul(&md.slots[c]));
            }
            acc
        })
        .collect();
    let mut x0 = md.slots[0].neg();
    for (x, m) in xs.iter().zip(&mats) {
        x0.sub_assign(&x.mul(m.entry(0, 0)));
    }
    let f: Vec<Series> = (0..ring.num_generators())
        .map(|g| {
            let c = divisor_index(&ring, g);
            let mut acc = md.slots[c].clone();
            for (x, m) in xs.iter().zip(&mats) {
                acc.add_assign(&x.mul(m.entry(0, c)));
            }
            acc
        })
        .collect();
    let map = SeriesMap::from_log_corrections(&f)?;
    let extra_pairs: Vec<(Series, SeriesMatrix)> = xs.iter().cloned().zip(mats).collect();
    let hat = modified_j(&pair.r, &x0, &extra_pairs, ring.clone())?;
    let j = hat.substitute(&map.invert()?)?;
    Ok(ExtendedJ {
        j,
        raw,
        mirror: md,
        x0,
        extra: nondiv.into_iter().zip(xs).collect(),
        map,
        omegas,
    })
}

/// Genus-zero invariants of a local surface read from a twisted J.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalReadout {
    /// Mirror map corrections `s_i - log y_i`.
    pub s: Vec<Series>,
    /// The `(hbar^-2, top class)` slot before the shift.
    pub w: Series,
    /// The same slot after the shift, in `Q = exp(s)`.
    pub w_flat: Series,
    /// `N_d`, or `None` where `<d, kc>` vanishes.
    pub invariants: std::collections::BTreeMap<Vec<u32>, Option<Q>>,
}

/// Twists `j` by the canonical class `kc`, shifts by the mirror map and
/// inverts `W = sum_e <e, kc> sum_{k | e} N_{e/k} / k^3 Q^e` degree by degree,
/// where `W` is the `(hbar^-2, top class)` slot of the shifted function.
pub fn local_readout(j: &QSeries, kc: &[i64]) -> Result<LocalReadout> {
    let twisted = crate::ifunction::twist_j(j, kc, &Q::zero())?;
    let md = MirrorData::extract(&twisted);
    let top = twisted.ring().dim() - 1;
    let w = twisted.comp(top).extract(-2, 0);
    let w_flat = shift_by_mirror(&twisted, &md)?.comp(top).extract(-2, 0);
    let mut invariants = std::collections::BTreeMap::new();
    for e in crate::formal::series::box_degrees(w.bx()).into_iter().skip(1) {
        let weight: i64 = e.iter().zip(kc).map(|(&a, &b)| a as i64 * b).sum();
        if weight == 0 {
            invariants.insert(e, None);
            continue;
        }
        let mut n = w_flat.rat(&e) / crate::q(weight);
        let g = e.iter().fold(0u32, |a, &b| num_integer::gcd(a, b));
        for k in 2..=g {
            if g % k != 0 {
                continue;
            }
            let sub: Vec<u32> = e.iter().map(|x| x / k).collect();
            if let Some(Some(v)) = invariants.get(&sub) {
                n -= v / crate::q((k * k * k) as i64);
            }
        }
        invariants.insert(e, Some(n));
    }
    let s = (0..twisted.ring().num_generators()).map(|i| md.divisor(i).clone()).collect();
    Ok(LocalReadout { s, w, w_flat, invariants })
}

/// Constant `BiLaurent` helper for hbar and lambda monomials.
pub fn monomial(e: i32, l: i32, c: Q) -> BiLaurent {
    BiLaurent::monomial(e, l, c, Window::UNBOUNDED)
}
