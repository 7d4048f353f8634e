//! Big quantum cohomology of `F_3` from its I-function: B-model connection
//! matrices, the Jacobian to flat coordinates, the intermediate matrices on
//! the surface `x_3 = 0`, the generating function fixed by the modified
//! Kahler and associativity equations, and parallel transport to `t_3 = 0`.
//!
//! Matrices act on the basis `{1, p1, p2, p2^2}`; row `a` of the matrix for
//! direction `i` is `e_i * e_a`.

use crate::birkhoff::{birkhoff_matrix, build_fundamental};
use crate::cohomology::CohomologyRing;
use crate::connection::gauge_fixed_all;
use crate::error::{Error, Result};
use crate::formal::series::box_degrees;
use crate::formal::{BiLaurent, QSeries, Series, SeriesMap, Window};
use crate::matrix::SeriesMatrix;
use crate::{linalg, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Coordinate frame of the B-model side: the fourth coordinate is attached
/// to `p2^2 = scale * p1p2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub basis: Vec<String>,
    pub scale: Q,
}

impl Frame {
    /// `t_3` in this frame is `1/scale` times the `p1p2` slot of J.
    pub fn t3_factor(&self) -> Q {
        Q::one() / &self.scale
    }
}

/// `B_0 = 1`, `B_1`, `B_2` and `B_3 = B_2^2`.
#[derive(Clone, Debug)]
pub struct BMatrices {
    pub frame: Frame,
    pub b: Vec<SeriesMatrix>,
}

/// Gauge-fixed connection matrices of `i` rewritten in the frame
/// `{1, p1, p2, p2^2}`.
pub fn b_matrices(i: &QSeries) -> Result<BMatrices> {
    let ring = i.ring();
    if ring.dim() != 4 || ring.num_generators() != 2 {
        return Err(Error::Invalid("big quantum pipeline needs a rank four surface".into()));
    }
    let fs = build_fundamental(i)?;
    let pair = birkhoff_matrix(&fs)?;
    let om = gauge_fixed_all(&fs, &pair)?;
    let frame = frame_of(ring)?;
    let t = rescale(&frame.scale);
    let tinv = rescale(&(Q::one() / &frame.scale));
    let bx = om[0].bx().to_vec();
    let win = om[0].window();
    let conj = |m: &SeriesMatrix| {
        SeriesMatrix::from_rational(&t, &bx, win).mul(m).mul(&SeriesMatrix::from_rational(&tinv, &bx, win))
    };
    let b1 = conj(&om[0]);
    let b2 = conj(&om[1]);
    let b3 = b2.mul(&b2);
    Ok(BMatrices { frame, b: vec![SeriesMatrix::identity(4, &bx, win), b1, b2, b3] })
}

fn frame_of(ring: &CohomologyRing) -> Result<Frame> {
    let sq = ring.monomial_class(&[0, 2]);
    let top = ring.dim() - 1;
    if sq.iter().take(top).any(|x| !x.is_zero()) || sq[top].is_zero() {
        return Err(Error::Invalid("p2^2 is not a multiple of the top class".into()));
    }
    let basis = vec!["1".into(), "p1".into(), "p2".into(), "p2^2".into()];
    Ok(Frame { basis, scale: sq[top].clone() })
}

fn rescale(s: &Q) -> Vec<Vec<Q>> {
    let mut m = linalg::identity(4);
    m[3][3] = s.clone();
    m
}

/// Jacobian `jac[j][i] = dt_i/dx_j = (B_j)_{0i}` and the integrated
/// coordinates `t_i - x_i` as series in `q`.
#[derive(Clone, Debug)]
pub struct Jacobian {
    pub jac: SeriesMatrix,
    pub t: Vec<Series>,
}

pub fn jacobian_from_b(b: &[SeriesMatrix]) -> Result<Jacobian> {
    let n = b.len();
    let bx = b[0].bx().to_vec();
    let win = b[0].window();
    let mut jac = SeriesMatrix::zero(n, n, &bx, win);
    for (j, bj) in b.iter().enumerate() {
        for i in 0..n {
            jac.rows[j][i] = bj.entry(0, i).clone();
        }
    }
    let mut t = Vec::with_capacity(n);
    for i in 0..n {
        let mut ti = Series::zero(&bx, win);
        for d in box_degrees(&bx).into_iter().skip(1) {
            let mut val: Option<Q> = None;
            for (g, &dg) in d.iter().enumerate() {
                let x = jac.entry(g + 1, i).rat(&d);
                if dg == 0 {
                    if !x.is_zero() {
                        return Err(Error::InconsistentJacobian(d.clone()));
                    }
                    continue;
                }
                let v = x / Q::from_integer(dg.into());
                match &val {
                    None => val = Some(v),
                    Some(w) if *w != v => return Err(Error::InconsistentJacobian(d.clone())),
                    _ => {}
                }
            }
            if let Some(v) = val {
                ti.add_at(&d, &BiLaurent::constant(v));
            }
        }
        t.push(ti);
    }
    Ok(Jacobian { jac, t })
}

/// `C~_i = sum_j (dx_j/dt_i) B_j` in `Q_i = exp(t_i)`, with `t_3` and the
/// map `Q(q)`.
#[derive(Clone, Debug)]
pub struct Intermediate {
    pub c: Vec<SeriesMatrix>,
    pub t3: Series,
    pub map: SeriesMap,
}

pub fn intermediate_c(b: &[SeriesMatrix], jac: &Jacobian) -> Result<Intermediate> {
    let inv = jac.jac.inverse()?;
    let map = SeriesMap::from_log_corrections(&[jac.t[1].clone(), jac.t[2].clone()])?;
    let back = map.invert()?.components();
    let bx = b[0].bx().to_vec();
    let win = b[0].window();
    let mut c = Vec::new();
    for i in 1..=2 {
        let mut acc = SeriesMatrix::zero(4, 4, &bx, win);
        for (j, bj) in b.iter().enumerate() {
            acc = acc.add(&bj.map(|e| e.mul(inv.entry(i, j))));
        }
        c.push(acc.compose(&back)?);
    }
    let t3 = jac.t[3].compose(&back)?;
    Ok(Intermediate { c, t3, map })
}

/// Truncated big-quantum data around the surface `t_3 = t_3(Q)`.
///
/// `a[i]` is multiplication by `p1`, `p2`, `p2^2` as a series in
/// `(Q1, Q2, s)` where `s = u_3`; the `u_1, u_2` directions follow from
/// `d/du_i = D_i - tau_i d/ds` with `tau_i = D_i t_3`.
#[derive(Clone, Debug)]
pub struct BigQGF {
    pub eta: Vec<Vec<Q>>,
    pub order: u32,
    pub t3: Series,
    pub a: Vec<SeriesMatrix>,
    tau: Vec<Series>,
    /// Instanton coefficients keyed by `(d, [n1, n2, n3])`.
    pub coeffs: BTreeMap<(Vec<u32>, [u32; 3]), Q>,
}

fn lift(s: &Series, order: u32) -> Result<Series> {
    let mut bx = s.bx().to_vec();
    bx.push(order);
    s.mono_subst(&[vec![1, 0, 0], vec![0, 1, 0]], &bx)
}

fn ds(s: &Series) -> Series {
    let mut out = Series::zero(s.bx(), s.window());
    for (d, c) in s.terms() {
        if d[2] > 0 {
            let mut e = d.clone();
            e[2] -= 1;
            out.add_at(&e, &c.scale(&Q::from_integer(d[2].into())));
        }
    }
    out
}

fn integrate_s(s: &Series) -> Series {
    let mut out = Series::zero(s.bx(), s.window());
    for (d, c) in s.terms() {
        let mut e = d.clone();
        e[2] += 1;
        out.add_at(&e, &c.scale(&(Q::one() / Q::from_integer(e[2].into()))));
    }
    out
}

/// Multiplication by `p2^2` from `p2 * p2 = sum_l c_l e_l`.
fn associate(a1: &SeriesMatrix, a2: &SeriesMatrix) -> Result<SeriesMatrix> {
    let c: Vec<&Series> = (0..4).map(|l| a2.entry(2, l)).collect();
    let mut m = a2.mul(a2);
    let id = SeriesMatrix::identity(4, a1.bx(), a1.window());
    for (l, ml) in [(0, &id), (1, a1), (2, a2)] {
        m = m.sub(&ml.map(|e| e.mul(c[l])));
    }
    let inv = c[3].inverse()?;
    Ok(m.map(|e| e.mul(&inv)))
}

fn kahler(a: &SeriesMatrix, tau: &Series, i: usize) -> SeriesMatrix {
    a.d_log(i).sub(&a.map(|e| ds(e).mul(tau)))
}

/// Solves for the big-quantum matrices to order `order` in `u_3`, then
/// tabulates the coefficients `w(d; n)` with `n1 + n2 <= 2`.
pub fn solve_bigq(cbar: &[SeriesMatrix], eta: &[Vec<Q>], t3: &Series, order: u32) -> Result<BigQGF> {
    let lifted: Vec<SeriesMatrix> = cbar
        .iter()
        .map(|m| m.try_map(|e| lift(e, order)))
        .collect::<Result<_>>()?;
    let t3l = lift(t3, order)?;
    let tau: Vec<Series> = (0..2).map(|i| t3l.d_log(i)).collect();
    let mut a1 = lifted[0].clone();
    let mut a2 = lifted[1].clone();
    let budget = order as usize + t3.bx().iter().sum::<u32>() as usize + 4;
    let mut a3 = associate(&a1, &a2)?;
    let mut done = false;
    for _ in 0..=budget {
        let n1 = lifted[0].add(&kahler(&a3, &tau[0], 0).map(integrate_s));
        let n2 = lifted[1].add(&kahler(&a3, &tau[1], 1).map(integrate_s));
        let n3 = associate(&n1, &n2)?;
        let stable = n1 == a1 && n2 == a2 && n3 == a3;
        a1 = n1;
        a2 = n2;
        a3 = n3;
        if stable {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::NotConverged);
    }
    let mut gf = BigQGF { eta: eta.to_vec(), order, t3: t3.clone(), a: vec![a1, a2, a3], tau, coeffs: BTreeMap::new() };
    gf.tabulate();
    Ok(gf)
}

impl BigQGF {
    /// `d_i d_j d_k F~` as a series in `(Q1, Q2, s)`, indices in `1..=3`.
    pub fn third(&self, i: usize, j: usize, k: usize) -> Series {
        let a = &self.a[i - 1];
        let mut out = Series::zero(a.bx(), a.window());
        for l in 0..4 {
            if !self.eta[l][k].is_zero() {
                out.add_assign(&a.entry(j, l).scale_q(&self.eta[l][k]));
            }
        }
        out
    }

    fn tabulate(&mut self) {
        let bx = self.a[0].bx().to_vec();
        let qbox = &bx[..2];
        for n3 in 0..=self.order {
            for n12 in 0..=2u32 {
                for n1 in 0..=n12 {
                    let n = [n1, n12 - n1, n3];
                    if n.iter().sum::<u32>() < 3 {
                        continue;
                    }
                    let mut idx: Vec<usize> = Vec::new();
                    for (slot, &c) in n.iter().enumerate().rev() {
                        idx.extend(std::iter::repeat_n(slot + 1, c as usize));
                    }
                    let (head, rest) = idx.split_at(3);
                    let extra = rest.len() as u32;
                    if extra > self.order {
                        continue;
                    }
                    let mut f = self.third(head[0], head[1], head[2]);
                    let mut r3 = 0u32;
                    for &x in rest {
                        if x == 3 {
                            r3 += 1;
                        } else {
                            f = f.d_log(x - 1).sub(&ds(&f).mul(&self.tau[x - 1]));
                        }
                    }
                    let fact: u64 = (1..=r3 as u64).product();
                    for d in box_degrees(qbox).into_iter().skip(1) {
                        let mut key = d.clone();
                        key.push(r3);
                        let v = f.rat(&key) * Q::from_integer(fact.into());
                        if !v.is_zero() {
                            self.coeffs.insert((d, n), v);
                        }
                    }
                }
            }
        }
    }

    /// Commutators `[A_a, A_b]` and flatness defects, truncated one order
    /// below the `u_3` bound where a derivative is involved.
    pub fn wdvv_residual(&self) -> Vec<SeriesMatrix> {
        let cut = |m: SeriesMatrix| {
            let mut b = m.bx().to_vec();
            b[2] = self.order.saturating_sub(1);
            m.with_box(&b)
        };
        let mut out = Vec::new();
        for x in 0..3 {
            for y in (x + 1)..3 {
                out.push(self.a[x].mul(&self.a[y]).sub(&self.a[y].mul(&self.a[x])));
            }
        }
        let d = |m: &SeriesMatrix, dir: usize| {
            if dir == 2 {
                m.map(ds)
            } else {
                kahler(m, &self.tau[dir], dir)
            }
        };
        for x in 0..3 {
            for y in (x + 1)..3 {
                out.push(cut(d(&self.a[y], x).sub(&d(&self.a[x], y))));
            }
        }
        out
    }

    /// JSON rows `{"d": [d1, d2], "n": [n1, n2, n3], "coeff": "num/den"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|((d, n), c)| serde_json::json!({"d": d, "n": n, "coeff": crate::fmt_q(c)}))
                .collect(),
        )
    }
}

/// `C_i(Q) = C~_i(Q, u_3 = -t_3(Q))`.
pub fn parallel_transport(f: &BigQGF) -> Result<Vec<SeriesMatrix>> {
    let qbox = f.t3.bx().to_vec();
    if f.order < qbox[0] {
        return Err(Error::OrderTooLow);
    }
    let win = Window::UNBOUNDED;
    let maps = vec![Series::var(0, &qbox, win), Series::var(1, &qbox, win), f.t3.neg()];
    f.a[..2].iter().map(|m| m.compose(&maps)).collect()
}

/// Output of the whole pipeline.
#[derive(Clone, Debug)]
pub struct BigQuantum {
    pub b: BMatrices,
    pub jacobian: Jacobian,
    pub intermediate: Intermediate,
    pub gf: BigQGF,
    pub c: Vec<SeriesMatrix>,
}

pub fn run(i: &QSeries, eta: &[Vec<Q>]) -> Result<BigQuantum> {
    let b = b_matrices(i)?;
    let jacobian = jacobian_from_b(&b.b)?;
    let intermediate = intermediate_c(&b.b, &jacobian)?;
    let order = 2 * i.bx().iter().sum::<u32>();
    let gf = solve_bigq(&intermediate.c, eta, &intermediate.t3, order)?;
    let c = parallel_transport(&gf)?;
    Ok(BigQuantum { b, jacobian, intermediate, gf, c })
}
