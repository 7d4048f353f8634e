//! Exact dense linear algebra over the rationals.

use crate::Q;
use num_traits::{One, Zero};

/// Row-reduces `m` in place and returns the pivot columns.
///
/// Columns are scanned in index order, so the earliest nonzero column of a
/// row space vector becomes its pivot.
pub fn rref(m: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (row, &pc) in a.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Outcome of solving `a x = b`.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Unique(Vec<Q>),
    /// Consistent, with the listed unknowns left free.
    Partial { values: Vec<Option<Q>>, free: Vec<usize> },
    Inconsistent,
}

/// Solves `a x = b`; unknowns fixed by the system are reported even when
/// others stay free.
pub fn solve(a: &[Vec<Q>], b: &[Q], cols: usize) -> Solution {
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return Solution::Inconsistent;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut values = vec![None; cols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        if free.iter().all(|&f| row[f].is_zero()) {
            values[pc] = Some(row[cols].clone());
        }
    }
    if free.is_empty() {
        Solution::Unique(values.into_iter().map(|v| v.unwrap()).collect())
    } else {
        Solution::Partial { values, free }
    }
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(Q::zero(), |acc, (x, br)| acc + x * &br[j])
                })
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn inverse_of_triangular() {
        let m = vec![vec![q(1), q(2)], vec![q(0), q(1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-2)], vec![q(0), q(1)]]);
        assert_eq!(mat_mul(&m, &inv), identity(2));
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(inverse(&m).is_none());
        let ns = nullspace(&m, 2);
        assert_eq!(ns, vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn partial_solution_reports_fixed_unknowns() {
        let a = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(1)]];
        match solve(&a, &[q(3), q(1)], 3) {
            Solution::Partial { values, free } => {
                assert_eq!(values[0], Some(q(3)));
                assert_eq!(values[1], None);
                assert_eq!(free, vec![2]);
            }
            other => panic!("{other:?}"),
        }
        let b = vec![vec![q(1)], vec![q(1)]];
        assert_eq!(solve(&b, &[q(1), q(2)], 1), Solution::Inconsistent);
    }
}
