//! Square and rectangular matrices of q-series.

use crate::error::{Error, Result};
use crate::formal::{BiLaurent, Series, SeriesMap, Window};
use crate::Q;
use num_traits::Zero;

#[derive(Clone, PartialEq)]
pub struct SeriesMatrix {
    pub rows: Vec<Vec<Series>>,
}

impl SeriesMatrix {
    pub fn zero(n: usize, m: usize, bx: &[u32], win: Window) -> Self {
        SeriesMatrix { rows: vec![vec![Series::zero(bx, win); m]; n] }
    }

    pub fn identity(n: usize, bx: &[u32], win: Window) -> Self {
        let mut out = Self::zero(n, n, bx, win);
        for i in 0..n {
            out.rows[i][i] = Series::one(bx, win);
        }
        out
    }

    /// Constant matrix from rationals.
    pub fn from_rational(m: &[Vec<Q>], bx: &[u32], win: Window) -> Self {
        let rows = m
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        if x.is_zero() {
                            Series::zero(bx, win)
                        } else {
                            Series::constant(BiLaurent::constant(x.clone()).with_window(win), bx)
                        }
                    })
                    .collect()
            })
            .collect();
        SeriesMatrix { rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn bx(&self) -> &[u32] {
        self.rows[0][0].bx()
    }

    pub fn window(&self) -> Window {
        self.entries().fold(Window::UNBOUNDED, |w, e| w.meet(&e.window()))
    }

    pub fn entry(&self, i: usize, j: usize) -> &Series {
        &self.rows[i][j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Series> {
        self.rows.iter().flatten()
    }

    pub fn map(&self, f: impl Fn(&Series) -> Series) -> SeriesMatrix {
        SeriesMatrix { rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Series) -> Result<Series>) -> Result<SeriesMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesMatrix { rows })
    }

    fn zip(&self, o: &SeriesMatrix, f: impl Fn(&Series, &Series) -> Series) -> SeriesMatrix {
        let rows = self
            .rows
            .iter()
            .zip(&o.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        SeriesMatrix { rows }
    }

    pub fn add(&self, o: &SeriesMatrix) -> SeriesMatrix {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &SeriesMatrix) -> SeriesMatrix {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &SeriesMatrix) -> SeriesMatrix {
        let n = self.nrows();
        let m = o.ncols();
        let win = self.window().meet(&o.window());
        let mut out = Self::zero(n, m, self.bx(), win);
        for i in 0..n {
            for (k, a) in self.rows[i].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let b = &o.rows[k][j];
                    if !b.is_zero() {
                        out.rows[i][j].add_assign(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SeriesMatrix {
        let rows = (0..self.ncols()).map(|j| self.rows.iter().map(|r| r[j].clone()).collect()).collect();
        SeriesMatrix { rows }
    }

    pub fn scale_q(&self, k: &Q) -> SeriesMatrix {
        self.map(|e| e.scale_q(k))
    }

    pub fn d_log(&self, i: usize) -> SeriesMatrix {
        self.map(|e| e.d_log(i))
    }

    pub fn theta(&self, i: usize) -> SeriesMatrix {
        self.map(|e| e.theta(i))
    }

    /// The `q^0` coefficients as rationals, if they are all rational.
    pub fn constant_rational(&self) -> Option<Vec<Vec<Q>>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| {
                        let c = e.constant_term();
                        if c.is_zero() {
                            Some(Q::zero())
                        } else {
                            c.as_constant()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Inverse when the `q^0` part is an invertible rational matrix.
    pub fn inverse(&self) -> Result<SeriesMatrix> {
        let bx = self.bx().to_vec();
        let win = self.window();
        let c0 = self
            .constant_rational()
            .ok_or_else(|| Error::BadConstantTerm("matrix constant term is not rational".into()))?;
        let c0inv = crate::linalg::inverse(&c0).ok_or(Error::Singular)?;
        let a0inv = SeriesMatrix::from_rational(&c0inv, &bx, win);
        let n = self.nrows();
        // self = A0 (1 + A0^-1 N), N = self - A0
        let rest = self.sub(&SeriesMatrix::from_rational(&c0, &bx, win));
        let x = a0inv.mul(&rest).scale_q(&-crate::q(1));
        let mut acc = SeriesMatrix::identity(n, &bx, win);
        let mut pw = x.clone();
        while !pw.is_zero() {
            acc = acc.add(&pw);
            pw = pw.mul(&x);
        }
        Ok(acc.mul(&a0inv))
    }

    /// `exp(self)` when the power series terminates within the box.
    pub fn exp(&self) -> Result<SeriesMatrix> {
        let n = self.nrows();
        let mut acc = SeriesMatrix::identity(n, self.bx(), self.window());
        let mut pw = acc.clone();
        let mut k = 1i64;
        loop {
            pw = pw.mul(self).scale_q(&(Q::from_integer(1.into()) / crate::q(k)));
            if pw.is_zero() {
                return Ok(acc);
            }
            acc = acc.add(&pw);
            k += 1;
            if k > 4096 {
                return Err(Error::NotConverged);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries().all(|e| e.is_zero())
    }

    pub fn is_hbar_free(&self) -> bool {
        self.entries().all(|e| e.is_hbar_free())
    }

    pub fn filter_hl(&self, keep: impl Fn(i32, i32) -> bool + Copy) -> SeriesMatrix {
        self.map(|e| e.filter_hl(keep))
    }

    pub fn extract(&self, e: i32, l: i32) -> SeriesMatrix {
        self.map(|x| x.extract(e, l))
    }

    pub fn with_window(&self, win: Window) -> SeriesMatrix {
        self.map(|x| x.with_window(win))
    }

    pub fn with_box(&self, bx: &[u32]) -> SeriesMatrix {
        self.map(|x| x.with_box(bx))
    }

    pub fn compose(&self, maps: &[Series]) -> Result<SeriesMatrix> {
        self.try_map(|e| e.compose(maps))
    }

    pub fn substitute(&self, m: &SeriesMap) -> Result<SeriesMatrix> {
        self.compose(&m.components())
    }

    pub fn mono_subst(&self, exps: &[Vec<i64>], bx: &[u32]) -> Result<SeriesMatrix> {
        self.try_map(|e| e.mono_subst(exps, bx))
    }

    /// The `q^d` coefficient of every entry.
    pub fn coeff(&self, d: &[u32]) -> Vec<Vec<BiLaurent>> {
        self.rows.iter().map(|r| r.iter().map(|e| e.coeff(d)).collect()).collect()
    }

    /// Entrywise rational coefficients at `q^d`, for hbar-free matrices.
    pub fn rat(&self, d: &[u32]) -> Vec<Vec<Q>> {
        self.rows.iter().map(|r| r.iter().map(|e| e.rat(d)).collect()).collect()
    }
}

impl std::fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|e| format!("{e}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn inverse_round_trip() {
        let bx = [4];
        let w = Window::UNBOUNDED;
        let x = Series::var(0, &bx, w);
        let one = Series::one(&bx, w);
        let m = SeriesMatrix { rows: vec![vec![one.clone(), x.clone()], vec![x.mul(&x), one.add(&x)]] };
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), SeriesMatrix::identity(2, &bx, w));
    }

    #[test]
    fn exp_of_nilpotent() {
        let bx = [0];
        let w = Window::UNBOUNDED;
        let n = SeriesMatrix::from_rational(&[vec![q(0), q(2)], vec![q(0), q(0)]], &bx, w);
        let e = n.exp().unwrap();
        assert_eq!(e.rat(&[0]), vec![vec![q(1), q(2)], vec![q(0), q(1)]]);
    }
}
