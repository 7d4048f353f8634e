//! Connection matrices of the quantum differential system and annihilating
//! differential operators.

use crate::birkhoff::{BirkhoffPair, FundamentalSolution};
use crate::cohomology::CohomologyRing;
use crate::error::{Error, Result};
use crate::formal::series::box_degrees;
use crate::formal::{BiLaurent, QSeries, Series, Window};
use crate::linalg::{self, rref};
use crate::matrix::SeriesMatrix;
use crate::mirror::MirrorData;
use crate::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Classical multiplication by `p_i`, row `a` holding `p_i e_a`.
pub fn classical(ring: &CohomologyRing, i: usize) -> Vec<Vec<Q>> {
    ring.mult_matrix(&ring.generator(i))
}

/// `Omega_i = (hbar D_i S + S M_i) S^-1`.
pub fn raw_connection(fs: &FundamentalSolution, i: usize) -> Result<SeriesMatrix> {
    let s = &fs.s;
    let m = SeriesMatrix::from_rational(&classical(&fs.ring, i), s.bx(), s.window());
    let lhs = s.theta(i).add(&s.mul(&m));
    Ok(lhs.mul(&s.inverse()?))
}

/// `Omega^_i = Q^-1 Omega_i Q + hbar D_i(Q^-1) Q`, checked to be hbar-free
/// and equal to `M_i + D_i R_1` where `R_1` is the `1/hbar` part of `R`.
pub fn gauge_fix(omega: &SeriesMatrix, pair: &BirkhoffPair, ring: &CohomologyRing, i: usize) -> Result<SeriesMatrix> {
    let qinv = pair.q.inverse()?;
    let out = qinv.mul(omega).mul(&pair.q).add(&qinv.theta(i).mul(&pair.q));
    if !out.is_hbar_free() {
        return Err(Error::GaugeResidual(format!("hbar terms remain in direction {i}")));
    }
    let m = SeriesMatrix::from_rational(&classical(ring, i), out.bx(), out.window());
    let r1 = pair.r.filter_hl(|e, _| e == -1).map(|s| s.shift_hl(1, 0));
    let check = m.add(&r1.d_log(i));
    if check != out {
        return Err(Error::GaugeResidual(format!("Omega^ and M + D R1 differ in direction {i}")));
    }
    Ok(out)
}

/// `Omega^_i` for every generator.
pub fn gauge_fixed_all(fs: &FundamentalSolution, pair: &BirkhoffPair) -> Result<Vec<SeriesMatrix>> {
    (0..fs.ring.num_generators())
        .map(|i| gauge_fix(&raw_connection(fs, i)?, pair, &fs.ring, i))
        .collect()
}

/// Connection matrices in flat coordinates.
///
/// `Omega~_j = sum_i (dlog q_i / dt_j) Omega^_i(q(y))`, then conjugated into
/// the target basis by `phi^-1 M phi` (row `a` of `phi` is the image of
/// basis element `a`), then recombined for the new generators
/// `p_i = sum_j gens[i][j] p~_j`.
pub fn to_flat(
    omega_hats: &[SeriesMatrix],
    m: &MirrorData,
    phi: Option<&[Vec<Q>]>,
    gens: Option<&[Vec<Q>]>,
) -> Result<Vec<SeriesMatrix>> {
    let k = omega_hats.len();
    let bx = omega_hats[0].bx().to_vec();
    let win = omega_hats[0].window();
    let mut t = SeriesMatrix::identity(k, &bx, win);
    for j in 0..k {
        for i in 0..k {
            t.rows[j][i].add_assign(&m.divisor(j).d_log(i).with_window(win));
        }
    }
    let tinv = t.inverse()?;
    let inv = m.inverse_map()?;
    let maps = inv.components();
    let tinv = tinv.compose(&maps)?;
    let subbed = omega_hats.iter().map(|o| o.compose(&maps)).collect::<Result<Vec<_>>>()?;
    let mut flat: Vec<SeriesMatrix> = (0..k)
        .map(|j| {
            let mut acc = SeriesMatrix::zero(subbed[0].nrows(), subbed[0].ncols(), &bx, win);
            for (i, o) in subbed.iter().enumerate() {
                acc = acc.add(&o.map(|e| e.mul(&tinv.rows[i][j])));
            }
            acc
        })
        .collect();
    if let Some(phi) = phi {
        let pinv = linalg::inverse(phi).ok_or(Error::Singular)?;
        let a = SeriesMatrix::from_rational(&pinv, &bx, win);
        let b = SeriesMatrix::from_rational(phi, &bx, win);
        flat = flat.iter().map(|o| a.mul(o).mul(&b)).collect();
    }
    if let Some(l) = gens {
        let linv = linalg::inverse(l).ok_or(Error::Singular)?;
        flat = (0..k)
            .map(|j| {
                let mut acc = SeriesMatrix::zero(flat[0].nrows(), flat[0].ncols(), &bx, win);
                for (i, o) in flat.iter().enumerate() {
                    if !linv[j][i].is_zero() {
                        acc = acc.add(&o.scale_q(&linv[j][i]));
                    }
                }
                acc
            })
            .collect();
    }
    Ok(flat)
}

/// Residual of `hbar D_i Omega_j - hbar D_j Omega_i + [Omega_j, Omega_i]`.
pub fn flatness_residual(oi: &SeriesMatrix, oj: &SeriesMatrix, i: usize, j: usize) -> SeriesMatrix {
    oj.theta(i).sub(&oi.theta(j)).add(&oj.mul(oi)).sub(&oi.mul(oj))
}

pub fn commutator(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    a.mul(b).sub(&b.mul(a))
}

/// One term `coeff * y^y * hbar^hbar * lambda^lambda * theta^theta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpTerm {
    pub theta: Vec<u32>,
    pub y: Vec<u32>,
    pub hbar: u32,
    pub lambda: u32,
    pub coeff: Q,
}

/// Differential operator with coefficients to the left of the thetas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    pub terms: Vec<OpTerm>,
}

impl DiffOperator {
    pub fn new(mut terms: Vec<OpTerm>) -> Self {
        terms.retain(|t| !t.coeff.is_zero());
        terms.sort_by_key(term_key);
        DiffOperator { terms }
    }

    /// Builds an operator from `(coeff, theta, y, hbar, lambda)` tuples.
    pub fn from_tuples(ts: &[(Q, Vec<u32>, Vec<u32>, u32, u32)]) -> Self {
        let terms = ts
            .iter()
            .map(|(c, a, b, e, l)| OpTerm { theta: a.clone(), y: b.clone(), hbar: *e, lambda: *l, coeff: c.clone() })
            .collect();
        let mut out = DiffOperator::new(Vec::new());
        for t in Self::merge(terms) {
            out.terms.push(t);
        }
        out.terms.sort_by_key(term_key);
        out
    }

    fn merge(terms: Vec<OpTerm>) -> Vec<OpTerm> {
        let mut m: BTreeMap<(Vec<u32>, Vec<u32>, u32, u32), Q> = BTreeMap::new();
        for t in terms {
            *m.entry((t.theta, t.y, t.hbar, t.lambda)).or_insert_with(Q::zero) += t.coeff;
        }
        m.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((a, b, e, l), c)| OpTerm { theta: a, y: b, hbar: e, lambda: l, coeff: c })
            .collect()
    }

    /// Operator product `self * o`, moving thetas through `y` monomials with
    /// `theta_i y^b = y^b (theta_i + b_i hbar)`.
    pub fn compose(&self, o: &DiffOperator) -> DiffOperator {
        let mut out = Vec::new();
        for s in &self.terms {
            for t in &o.terms {
                // theta^a y^b = y^b prod_i (theta_i + b_i hbar)^{a_i}
                let mut poly: Vec<(Vec<u32>, u32, Q)> = vec![(t.theta.clone(), 0, Q::one())];
                for (i, &ai) in s.theta.iter().enumerate() {
                    for _ in 0..ai {
                        let mut next = Vec::new();
                        for (a, e, c) in &poly {
                            let mut a2 = a.clone();
                            a2[i] += 1;
                            next.push((a2, *e, c.clone()));
                            if t.y[i] > 0 {
                                next.push((a.clone(), e + 1, c * crate::q(t.y[i] as i64)));
                            }
                        }
                        poly = next;
                    }
                }
                for (a, e, c) in poly {
                    out.push(OpTerm {
                        theta: a,
                        y: s.y.iter().zip(&t.y).map(|(x, z)| x + z).collect(),
                        hbar: s.hbar + t.hbar + e,
                        lambda: s.lambda + t.lambda,
                        coeff: c * &s.coeff * &t.coeff,
                    });
                }
            }
        }
        let mut d = DiffOperator { terms: Self::merge(out) };
        d.terms.sort_by_key(term_key);
        d
    }

    pub fn add(&self, o: &DiffOperator) -> DiffOperator {
        let mut d = DiffOperator { terms: Self::merge(self.terms.iter().chain(&o.terms).cloned().collect()) };
        d.terms.sort_by_key(term_key);
        d
    }

    pub fn scale(&self, k: &Q) -> DiffOperator {
        DiffOperator::new(self.terms.iter().map(|t| OpTerm { coeff: &t.coeff * k, ..t.clone() }).collect())
    }
}

/// Ordering of terms: higher theta degree first, then higher powers of later
/// thetas, then lower `y` degree, then lower hbar and lambda powers.
fn term_key(t: &OpTerm) -> (i64, Vec<i64>, u32, Vec<u32>, u32, u32) {
    let deg: u32 = t.theta.iter().sum();
    let rev: Vec<i64> = t.theta.iter().rev().map(|&x| -(x as i64)).collect();
    (-(deg as i64), rev, t.y.iter().sum(), t.y.clone(), t.hbar, t.lambda)
}

/// `sum c hbar^e lambda^l y^b (theta^a s)`.
pub fn apply_operator(op: &DiffOperator, s: &QSeries) -> Result<QSeries> {
    let mut cache: BTreeMap<Vec<u32>, QSeries> = BTreeMap::new();
    let mut out = QSeries::zero(s.ring().clone(), s.bx(), s.window()).with_prefactor(s.has_prefactor());
    for t in &op.terms {
        if !cache.contains_key(&t.theta) {
            cache.insert(t.theta.clone(), crate::birkhoff::theta_monomial(s, &t.theta));
        }
        let base = &cache[&t.theta];
        let k = BiLaurent::monomial(t.hbar as i32, t.lambda as i32, t.coeff.clone(), Window::UNBOUNDED);
        let term = base.map_comps(|c| c.shift_q(&t.y).scale(&k).with_window(s.window()));
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Unknown monomials of a homogeneous operator of the given degree.
fn unknowns(nvars: usize, theta_deg: u32, y_deg: u32, y_weights: &[i64], with_lambda: bool) -> Vec<OpTerm> {
    let mut out = Vec::new();
    let thetas: Vec<Vec<u32>> = (0..=theta_deg).flat_map(|n| monos(nvars, n)).collect();
    let ys = box_degrees(&vec![y_deg; nvars]);
    for a in &thetas {
        for b in &ys {
            let da: i64 = a.iter().sum::<u32>() as i64;
            let db: i64 = b.iter().zip(y_weights).map(|(&x, &w)| x as i64 * w).sum();
            let rest = theta_deg as i64 - da - db;
            if rest < 0 {
                continue;
            }
            let lmax = if with_lambda { rest } else { 0 };
            for l in 0..=lmax {
                out.push(OpTerm {
                    theta: a.clone(),
                    y: b.clone(),
                    hbar: (rest - l) as u32,
                    lambda: l as u32,
                    coeff: Q::one(),
                });
            }
        }
    }
    out.sort_by_key(term_key);
    out
}

fn monos(k: usize, deg: u32) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![deg]];
    }
    (0..=deg)
        .rev()
        .flat_map(|f| {
            monos(k - 1, deg - f).into_iter().map(move |mut r| {
                r.insert(0, f);
                r
            })
        })
        .collect()
}

/// Annihilators of `s` that are homogeneous of degree `theta_deg`, where
/// `deg theta = deg hbar = deg lambda = 1` and `deg y_i = y_weights[i]`.
///
/// Multiples of other annihilators by nonconstant degree-zero monomials
/// `y^c hbar^e lambda^l` are quotiented out, operators with a common `y`
/// factor are dropped, and the rest is row reduced in [`term_key`] order so
/// each operator is monic in its leading term.
pub fn find_annihilators(s: &QSeries, theta_deg: u32, y_deg: u32, y_weights: &[i64]) -> Result<Vec<DiffOperator>> {
    let nvars = s.bx().len();
    let with_lambda = s.comps().iter().any(|c| c.terms().any(|(_, x)| x.terms().any(|(_, l, _)| l != 0)));
    let cols = unknowns(nvars, theta_deg, y_deg, y_weights, with_lambda);
    let rows = equations(s, &cols)?;
    let sol = linalg::nullspace(&rows, cols.len());
    if sol.is_empty() {
        return Err(Error::NoOperatorsFound);
    }
    // degree-zero multiples y^c hbar^e lambda^l (c != 0) of smaller annihilators
    let mut w: Vec<Vec<Q>> = Vec::new();
    for c in box_degrees(&vec![y_deg; nvars]).into_iter().skip(1) {
        let dc: i64 = c.iter().zip(y_weights).map(|(&x, &w)| x as i64 * w).sum();
        if dc > 0 {
            continue;
        }
        let lmax = if with_lambda { -dc } else { 0 };
        for l in 0..=lmax {
            let e = (-dc - l) as u32;
            let l = l as u32;
            let shifted = |t: &OpTerm| OpTerm {
                y: t.y.iter().zip(&c).map(|(a, b)| a + b).collect(),
                hbar: t.hbar + e,
                lambda: t.lambda + l,
                ..t.clone()
            };
            let index = |t: &OpTerm| cols.iter().position(|u| u.theta == t.theta && u.y == t.y && u.hbar == t.hbar && u.lambda == t.lambda);
            let sub: Vec<(usize, usize)> = (0..cols.len()).filter_map(|i| index(&shifted(&cols[i])).map(|j| (i, j))).collect();
            let sub_rows: Vec<Vec<Q>> = rows.iter().map(|r| sub.iter().map(|&(i, _)| r[i].clone()).collect()).collect();
            for v in linalg::nullspace(&sub_rows, sub.len()) {
                let mut full = vec![Q::zero(); cols.len()];
                for (x, &(_, j)) in v.iter().zip(&sub) {
                    full[j] = x.clone();
                }
                w.push(full);
            }
        }
    }
    let mut wr = w.clone();
    let wpiv = rref(&mut wr);
    let reduce = |v: &mut Vec<Q>| {
        for (row, &p) in wr.iter().zip(&wpiv) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
    };
    let mut reps: Vec<Vec<Q>> = sol
        .into_iter()
        .map(|mut v| {
            reduce(&mut v);
            v
        })
        .collect();
    rref(&mut reps);
    let ops: Vec<DiffOperator> = reps
        .into_iter()
        .map(|v| {
            DiffOperator::new(
                v.into_iter()
                    .zip(&cols)
                    .filter(|(x, _)| !x.is_zero())
                    .map(|(x, t)| OpTerm { coeff: x, ..t.clone() })
                    .collect(),
            )
        })
        .filter(|op| !has_y_factor(op))
        .collect();
    if ops.is_empty() {
        return Err(Error::NoOperatorsFound);
    }
    Ok(ops)
}

/// True if every term shares a nonconstant `y` monomial. Such operators only
/// vanish because the shift pushes the check past the box.
fn has_y_factor(op: &DiffOperator) -> bool {
    let mut g = match op.terms.first() {
        Some(t) => t.y.clone(),
        None => return false,
    };
    for t in &op.terms {
        for (a, b) in g.iter_mut().zip(&t.y) {
            *a = (*a).min(*b);
        }
    }
    g.iter().any(|&x| x > 0)
}

/// One equation per `(q^d, hbar, lambda, basis)` slot.
fn equations(s: &QSeries, cols: &[OpTerm]) -> Result<Vec<Vec<Q>>> {
    let mut slots: BTreeMap<(Vec<u32>, i32, i32, usize), Vec<(usize, Q)>> = BTreeMap::new();
    for (ci, t) in cols.iter().enumerate() {
        let op = DiffOperator { terms: vec![t.clone()] };
        let v = apply_operator(&op, s)?;
        for (a, comp) in v.comps().iter().enumerate() {
            for (d, c) in comp.terms() {
                for (e, l, x) in c.terms() {
                    slots.entry((d.clone(), e, l, a)).or_default().push((ci, x.clone()));
                }
            }
        }
    }
    Ok(slots
        .into_values()
        .map(|entries| {
            let mut row = vec![Q::zero(); cols.len()];
            for (i, x) in entries {
                row[i] += x;
            }
            row
        })
        .collect())
}

/// Renders an operator such as `theta1^2 - y1*y2^2`.
pub fn format_operator(op: &DiffOperator) -> String {
    let mut parts = Vec::new();
    for t in &op.terms {
        let mut f = Vec::new();
        let single = t.theta.len() == 1;
        let name = |base: &str, i: usize| if single { base.to_string() } else { format!("{base}{}", i + 1) };
        for (i, &e) in t.y.iter().enumerate() {
            if e > 0 {
                f.push(if e == 1 { name("y", i) } else { format!("{}^{e}", name("y", i)) });
            }
        }
        if t.hbar > 0 {
            f.push(if t.hbar == 1 { "hbar".into() } else { format!("hbar^{}", t.hbar) });
        }
        if t.lambda > 0 {
            f.push(if t.lambda == 1 { "lambda".into() } else { format!("lambda^{}", t.lambda) });
        }
        for (i, &e) in t.theta.iter().enumerate() {
            if e > 0 {
                f.push(if e == 1 { name("theta", i) } else { format!("{}^{e}", name("theta", i)) });
            }
        }
        let body = if f.is_empty() { "1".to_string() } else { f.join("*") };
        parts.push(format!("({})*{body}", crate::fmt_q(&t.coeff)));
    }
    parts.join(" + ")
}

/// Series `Sum_d c_d q^d` as a rational scalar series helper.
pub fn rational_series(bx: &[u32], coeffs: &[(Vec<u32>, Q)]) -> Series {
    let mut s = Series::zero(bx, Window::UNBOUNDED);
    for (d, c) in coeffs {
        s.add_at(d, &BiLaurent::constant(c.clone()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::{birkhoff_matrix, birkhoff_scalar, build_fundamental};
    use crate::ifunction::{build_i, Action, GeometrySpec};
    use crate::mirror::{shift_by_mirror, MirrorData};
    use crate::q;

    #[test]
    fn p1_classical_limit() {
        let i = build_i(&GeometrySpec::p1(3)).unwrap();
        let fs = build_fundamental(&i).unwrap();
        let om = raw_connection(&fs, 0).unwrap();
        assert_eq!(om.rat(&[0]), vec![vec![q(0), q(1)], vec![q(0), q(0)]]);
        assert_eq!(om.rat(&[1]), vec![vec![q(0), q(0)], vec![q(1), q(0)]]);
    }

    #[test]
    fn operator_composition_moves_theta_past_y() {
        // theta * y = y theta + hbar y
        let th = DiffOperator::from_tuples(&[(q(1), vec![1], vec![0], 0, 0)]);
        let y = DiffOperator::from_tuples(&[(q(1), vec![0], vec![1], 0, 0)]);
        let want = DiffOperator::from_tuples(&[(q(1), vec![1], vec![1], 0, 0), (q(1), vec![0], vec![1], 1, 0)]);
        assert_eq!(th.compose(&y), want);
    }

    #[test]
    fn f3_gauge_fixed_is_hbar_free_and_flat() {
        let i = build_i(&GeometrySpec::fn_(3, [3, 2])).unwrap();
        let fs = build_fundamental(&i).unwrap();
        let pair = birkhoff_matrix(&fs).unwrap();
        let raw = raw_connection(&fs, 0).unwrap();
        assert!(!raw.is_hbar_free());
        let om = gauge_fixed_all(&fs, &pair).unwrap();
        assert!(commutator(&om[0], &om[1]).is_zero());
        let r0 = raw_connection(&fs, 1).unwrap();
        assert!(flatness_residual(&raw, &r0, 0, 1).is_zero());
    }

    #[test]
    fn constant_is_killed_by_theta() {
        let ring = GeometrySpec::p1(2).ring().unwrap();
        let one = QSeries::one(ring, &[2], Window::UNBOUNDED);
        let ops = find_annihilators(&one, 1, 0, &[0]).unwrap();
        assert_eq!(ops, vec![DiffOperator::from_tuples(&[(q(1), vec![1], vec![0], 0, 0)])]);
    }

    #[test]
    fn equivariant_conifold_operator() {
        let mut spec = GeometrySpec::xk(-1, Action::Diagonal, 4);
        spec.window = Some(Window::UNBOUNDED);
        let i = build_i(&spec).unwrap();
        let ops = find_annihilators(&i, 2, 1, &[0]).unwrap();
        // theta^2 - y (theta - lambda)^2
        let want = DiffOperator::from_tuples(&[
            (q(1), vec![2], vec![0], 0, 0),
            (q(-1), vec![2], vec![1], 0, 0),
            (q(2), vec![1], vec![1], 0, 1),
            (q(-1), vec![0], vec![1], 0, 2),
        ]);
        assert_eq!(ops, vec![want]);
    }

    #[test]
    fn f4_annihilators_after_birkhoff() {
        let i = build_i(&GeometrySpec::fn_(4, [2, 3])).unwrap();
        let j = birkhoff_scalar(&i).unwrap().j;
        let j = shift_by_mirror(&j, &MirrorData::extract(&j)).unwrap();
        let ops = find_annihilators(&j, 2, 2, &[-2, 2]).unwrap();
        let d1 = DiffOperator::from_tuples(&[(q(1), vec![2, 0], vec![0, 0], 0, 0), (q(-1), vec![0, 0], vec![1, 2], 0, 0)]);
        assert!(ops.contains(&d1));
        assert_eq!(ops.len(), 2);
        for op in &ops {
            assert!(apply_operator(op, &j).unwrap().is_zero());
        }
    }
}
