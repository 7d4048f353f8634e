//! Birkhoff factorization of I-functions, in scalar and matrix form.

use crate::cohomology::CohomologyRing;
use crate::error::{Error, Result};
use crate::formal::series::{box_degrees, in_box};
use crate::formal::{BiLaurent, QSeries, Series};
use crate::matrix::SeriesMatrix;
use std::collections::HashMap;
use std::sync::Arc;

/// `theta^a` applied to a prefactored series.
pub fn theta_monomial(s: &QSeries, a: &[u32]) -> QSeries {
    let mut out = s.clone();
    for (i, &e) in a.iter().enumerate() {
        for _ in 0..e {
            out = out.theta(i);
        }
    }
    out
}

/// `d_alpha I` for every basis monomial `alpha`, in basis order.
pub fn derivatives(i: &QSeries) -> Vec<QSeries> {
    i.ring().basis().iter().map(|m| theta_monomial(i, m)).collect()
}

fn check_input(i: &QSeries) -> Result<()> {
    if !i.has_prefactor() {
        return Err(Error::Invalid("Birkhoff input must carry the prefactor".into()));
    }
    let zero = vec![0; i.bx().len()];
    let c = i.coeff(&zero);
    let unit = c.comps[0].as_constant() == Some(crate::q(1)) && c.comps[1..].iter().all(|x| x.is_zero());
    if !unit {
        return Err(Error::BadConstantTerm("I must start with 1".into()));
    }
    Ok(())
}

/// `dst += k q^d src`, dropping terms outside the box.
fn add_shifted(dst: &mut Series, src: &Series, k: &BiLaurent, d: &[u32]) {
    for (e, c) in src.terms() {
        let f: Vec<u32> = e.iter().zip(d).map(|(a, b)| a + b).collect();
        if in_box(&f, dst.bx()) {
            dst.add_at(&f, &(c * k));
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarBirkhoff {
    pub j: QSeries,
    /// `c_alpha` with `J = sum_alpha c_alpha d_alpha I`.
    pub coeffs: Vec<Series>,
}

/// Combines derivatives of `I` so that no nonnegative hbar power survives
/// outside `q^0`.
///
/// Degrees are visited in graded order; at each degree the whole
/// nonnegative part is removed in one step using `d_gamma I = gamma + O(q)`.
pub fn birkhoff_scalar(i: &QSeries) -> Result<ScalarBirkhoff> {
    check_input(i)?;
    let ring = i.ring().clone();
    let derivs = derivatives(i);
    let win = i.window();
    let bx = i.bx().to_vec();
    let mut j: Vec<Series> = i.comps().to_vec();
    let mut coeffs = vec![Series::zero(&bx, win); ring.dim()];
    coeffs[0] = Series::one(&bx, win);
    for d in box_degrees(&bx).into_iter().skip(1) {
        let pos: Vec<BiLaurent> = j.iter().map(|s| s.coeff(&d).filter(|e, _| e >= 0)).collect();
        for (g, p) in pos.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let neg = -p;
            for (a, comp) in j.iter_mut().enumerate() {
                add_shifted(comp, derivs[g].comp(a), &neg, &d);
            }
            coeffs[g].add_at(&d, &neg);
        }
        if j.iter().any(|s| !s.coeff(&d).filter(|e, _| e >= 0).is_empty()) {
            return Err(Error::WindowTooSmall(d));
        }
    }
    let j = QSeries::from_comps(ring, j, true)?;
    Ok(ScalarBirkhoff { j, coeffs })
}

/// Rows are the stripped components of `d_alpha I`.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalSolution {
    pub ring: Arc<CohomologyRing>,
    pub s: SeriesMatrix,
}

pub fn build_fundamental(i: &QSeries) -> Result<FundamentalSolution> {
    check_input(i)?;
    let rows = derivatives(i).into_iter().map(|d| d.comps().to_vec()).collect();
    Ok(FundamentalSolution { ring: i.ring().clone(), s: SeriesMatrix { rows } })
}

/// `S = Q R` with `Q` in nonnegative and `R` in negative hbar powers away
/// from `q^0`, and `Q(0) = R(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffPair {
    pub q: SeriesMatrix,
    pub r: SeriesMatrix,
}

type CoeffMatrix = Vec<Vec<BiLaurent>>;

fn mat_mul_add(acc: &mut CoeffMatrix, a: &CoeffMatrix, b: &CoeffMatrix) {
    let n = a.len();
    for i in 0..n {
        for (k, x) in a[i].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    acc[i][j].sub_assign_ref(&(x * &b[k][j]));
                }
            }
        }
    }
}

pub fn birkhoff_matrix(fs: &FundamentalSolution) -> Result<BirkhoffPair> {
    let s = &fs.s;
    let n = s.nrows();
    let bx = s.bx().to_vec();
    let win = s.window();
    let c0 = s.constant_rational();
    if c0 != Some(crate::linalg::identity(n)) {
        return Err(Error::BadConstantTerm("S(0) must be the identity".into()));
    }
    let mut qd: HashMap<Vec<u32>, CoeffMatrix> = HashMap::new();
    let mut rd: HashMap<Vec<u32>, CoeffMatrix> = HashMap::new();
    let mut qm = SeriesMatrix::identity(n, &bx, win);
    let mut rm = SeriesMatrix::identity(n, &bx, win);
    let degs = box_degrees(&bx);
    for d in degs.iter().skip(1) {
        let mut x = s.coeff(d);
        for (e, qe) in &qd {
            if !e.iter().zip(d).all(|(a, b)| a <= b) {
                continue;
            }
            let f: Vec<u32> = d.iter().zip(e).map(|(a, b)| a - b).collect();
            if let Some(rf) = rd.get(&f) {
                mat_mul_add(&mut x, qe, rf);
            }
        }
        let qx: CoeffMatrix = x.iter().map(|r| r.iter().map(|c| c.filter(|e, _| e >= 0)).collect()).collect();
        let rx: CoeffMatrix = x.iter().map(|r| r.iter().map(|c| c.filter(|e, _| e < 0)).collect()).collect();
        for a in 0..n {
            for b in 0..n {
                qm.rows[a][b].add_at(d, &qx[a][b]);
                rm.rows[a][b].add_at(d, &rx[a][b]);
            }
        }
        qd.insert(d.clone(), qx);
        rd.insert(d.clone(), rx);
    }
    Ok(BirkhoffPair { q: qm, r: rm })
}

/// Checks the factorization postconditions exactly.
pub fn verify_pair(fs: &FundamentalSolution, p: &BirkhoffPair) -> bool {
    let id = crate::linalg::identity(fs.s.nrows());
    p.q.mul(&p.r) == fs.s
        && p.q.constant_rational() == Some(id.clone())
        && p.r.constant_rational() == Some(id)
        && p.q.entries().all(|e| e.terms().all(|(_, c)| c.terms().all(|(h, _, _)| h >= 0)))
        && p.r.entries().all(|e| {
            e.terms().all(|(d, c)| d.iter().all(|&x| x == 0) || c.terms().all(|(h, _, _)| h < 0))
        })
}

/// True when no coefficient outside `q^0` has a nonnegative hbar power.
pub fn is_negative_hbar(j: &QSeries) -> bool {
    j.comps().iter().all(|s| {
        s.terms().all(|(d, c)| d.iter().all(|&x| x == 0) || c.terms().all(|(h, _, _)| h < 0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifunction::{build_i, GeometrySpec};

    #[test]
    fn nef_j_equals_i() {
        let i = build_i(&GeometrySpec::p1(4)).unwrap();
        let b = birkhoff_scalar(&i).unwrap();
        assert_eq!(b.j, i);
        assert!(b.coeffs[1].is_zero());
        assert!(b.coeffs[0].constant_term().as_constant() == Some(crate::q(1)));
    }

    #[test]
    fn f3_scalar_and_matrix_agree() {
        let i = build_i(&GeometrySpec::fn_(3, [4, 2])).unwrap();
        let b = birkhoff_scalar(&i).unwrap();
        assert!(is_negative_hbar(&b.j));
        let fs = build_fundamental(&i).unwrap();
        let p = birkhoff_matrix(&fs).unwrap();
        assert!(verify_pair(&fs, &p));
        assert_eq!(p.r.rows[0], b.j.comps().to_vec());
        let again = birkhoff_scalar(&i).unwrap();
        assert_eq!(again, b);
    }
}
