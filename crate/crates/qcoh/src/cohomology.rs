//! Finite-dimensional graded quotients `Q[p_1..p_k]/I` with a monomial basis.

use crate::error::{Error, Result};
use crate::linalg::{self, rref};
use crate::{q, Q};
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Integer polynomial as `(exponents, coefficient)` terms.
pub type Poly = Vec<(Vec<u32>, i64)>;

/// Product of integer linear forms `sum_i f[i] p_i`.
pub fn linear_product(forms: &[Vec<i64>]) -> Poly {
    let k = forms.first().map_or(0, |f| f.len());
    let mut acc: HashMap<Vec<u32>, i64> = HashMap::from([(vec![0; k], 1)]);
    for f in forms {
        let mut next: HashMap<Vec<u32>, i64> = HashMap::new();
        for (m, c) in &acc {
            for (i, &a) in f.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let mut e = m.clone();
                e[i] += 1;
                *next.entry(e).or_default() += c * a;
            }
        }
        acc = next;
    }
    let mut out: Poly = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    pub num_generators: usize,
    pub relations: Vec<Poly>,
}

impl RingPresentation {
    /// Relations given as products of linear forms.
    pub fn from_linear_products(k: usize, rels: &[Vec<Vec<i64>>]) -> Self {
        RingPresentation {
            num_generators: k,
            relations: rels.iter().map(|r| linear_product(r)).collect(),
        }
    }
}

fn monomials(k: usize, deg: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in monomials(k - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Commutative quotient ring with its multiplication table.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyRing {
    pres: RingPresentation,
    basis: Vec<Vec<u32>>,
    nf: HashMap<Vec<u32>, Vec<Q>>,
    mul_table: Vec<Vec<Vec<Q>>>,
    /// Nonzero structure constants `(a, b, c, coeff)` of `e_a e_b`.
    structure: Vec<(usize, usize, usize, Q)>,
    top_degree: u32,
}

/// Reduces the presentation degree by degree and returns the ring.
///
/// Basis monomials at each degree are the non-pivot columns when the
/// relation span is row reduced with smaller monomials first, listed in
/// descending graded-lex order with `p_1 > p_2 > ...`.
pub fn build_ring(pres: &RingPresentation, degree_cap: u32) -> Result<CohomologyRing> {
    let k = pres.num_generators;
    for (i, r) in pres.relations.iter().enumerate() {
        let degs: Vec<u32> = r.iter().map(|(m, _)| degree(m)).collect();
        if degs.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Invalid(format!("relation {i} is not homogeneous")));
        }
    }
    let mut basis = Vec::new();
    let mut nf_local: Vec<(Vec<u32>, Vec<(Vec<u32>, Q)>)> = Vec::new();
    let mut top = 0;
    for n in 0..=degree_cap {
        let mut mons = monomials(k, n);
        mons.reverse();
        let col: HashMap<&Vec<u32>, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = Vec::new();
        for r in &pres.relations {
            let rd = r.first().map_or(0, |(m, _)| degree(m));
            if rd > n {
                continue;
            }
            for mult in monomials(k, n - rd) {
                let mut row = vec![Q::zero(); mons.len()];
                for (m, c) in r {
                    let e: Vec<u32> = m.iter().zip(&mult).map(|(a, b)| a + b).collect();
                    row[col[&e]] += q(*c);
                }
                rows.push(row);
            }
        }
        let pivots = rref(&mut rows);
        let survivors: Vec<usize> = (0..mons.len()).filter(|c| !pivots.contains(c)).collect();
        if n == 0 && survivors.is_empty() {
            return Err(Error::InconsistentRelations);
        }
        if n == degree_cap && !survivors.is_empty() {
            return Err(Error::NotFiniteDimensional(degree_cap));
        }
        for (row, &p) in rows.iter().zip(&pivots) {
            let expr = survivors
                .iter()
                .filter(|&&s| !row[s].is_zero())
                .map(|&s| (mons[s].clone(), -row[s].clone()))
                .collect();
            nf_local.push((mons[p].clone(), expr));
        }
        if !survivors.is_empty() {
            top = n;
        }
        for &s in survivors.iter().rev() {
            basis.push(mons[s].clone());
        }
    }
    let dim = basis.len();
    let index: HashMap<Vec<u32>, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut nf: HashMap<Vec<u32>, Vec<Q>> = HashMap::new();
    for (i, m) in basis.iter().enumerate() {
        let mut v = vec![Q::zero(); dim];
        v[i] = Q::one();
        nf.insert(m.clone(), v);
    }
    for (m, expr) in nf_local {
        let mut v = vec![Q::zero(); dim];
        for (s, c) in expr {
            v[index[&s]] += c;
        }
        nf.insert(m, v);
    }
    let mut ring = CohomologyRing {
        pres: pres.clone(),
        basis,
        nf,
        mul_table: Vec::new(),
        structure: Vec::new(),
        top_degree: top,
    };
    let mut table = vec![vec![Vec::new(); dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let e: Vec<u32> = ring.basis[a].iter().zip(&ring.basis[b]).map(|(x, y)| x + y).collect();
            table[a][b] = ring.monomial_class(&e);
        }
    }
    for (a, row) in table.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            for (c, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    ring.structure.push((a, b, c, x.clone()));
                }
            }
        }
    }
    ring.mul_table = table;
    Ok(ring)
}

impl CohomologyRing {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_generators(&self) -> usize {
        self.pres.num_generators
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    pub fn presentation(&self) -> &RingPresentation {
        &self.pres
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn basis_degree(&self, a: usize) -> u32 {
        degree(&self.basis[a])
    }

    pub fn index_of(&self, m: &[u32]) -> Option<usize> {
        self.basis.iter().position(|b| b == m)
    }

    /// Readable name such as `p1p2^2`.
    pub fn basis_name(&self, a: usize) -> String {
        let m = &self.basis[a];
        if degree(m) == 0 {
            return "1".into();
        }
        let single = m.len() == 1;
        m.iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let v = if single { "p".to_string() } else { format!("p{}", i + 1) };
                if e == 1 {
                    v
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect()
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        (0..self.dim()).find(|&a| self.basis_name(a) == name)
    }

    pub fn mul_table(&self) -> &[Vec<Vec<Q>>] {
        &self.mul_table
    }

    pub fn structure(&self) -> &[(usize, usize, usize, Q)] {
        &self.structure
    }

    pub fn unit(&self) -> Vec<Q> {
        self.basis_vector(0)
    }

    pub fn basis_vector(&self, a: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[a] = Q::one();
        v
    }

    /// Normal form of a monomial; zero beyond the degree cap.
    pub fn monomial_class(&self, m: &[u32]) -> Vec<Q> {
        self.nf.get(m).cloned().unwrap_or_else(|| vec![Q::zero(); self.dim()])
    }

    pub fn generator(&self, i: usize) -> Vec<Q> {
        let mut m = vec![0; self.num_generators()];
        m[i] = 1;
        self.monomial_class(&m)
    }

    /// Class of `sum_i c[i] p_i`.
    pub fn linear_class(&self, c: &[i64]) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        for (i, &ci) in c.iter().enumerate() {
            for (x, g) in v.iter_mut().zip(self.generator(i)) {
                *x += g * q(ci);
            }
        }
        v
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (i, j, k, c) in &self.structure {
            if a[*i].is_zero() || b[*j].is_zero() {
                continue;
            }
            out[*k] += &a[*i] * &b[*j] * c;
        }
        out
    }

    /// Class of an integer polynomial.
    pub fn poly_class(&self, p: &Poly) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        for (m, c) in p {
            for (x, y) in v.iter_mut().zip(self.monomial_class(m)) {
                *x += y * q(*c);
            }
        }
        v
    }

    /// Matrix of `x -> c x` with row `a` holding the coordinates of `c e_a`.
    pub fn mult_matrix(&self, c: &[Q]) -> Vec<Vec<Q>> {
        (0..self.dim()).map(|a| self.mul(&self.basis_vector(a), c)).collect()
    }
}

/// Symmetric nondegenerate pairing on a ring.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionForm {
    pub eta: Vec<Vec<Q>>,
    pub eta_inv: Vec<Vec<Q>>,
}

impl IntersectionForm {
    pub fn new(eta: Vec<Vec<Q>>) -> Result<Self> {
        let n = eta.len();
        for i in 0..n {
            for j in 0..n {
                if eta[i][j] != eta[j][i] {
                    return Err(Error::Invalid("intersection form is not symmetric".into()));
                }
            }
        }
        let eta_inv = linalg::inverse(&eta).ok_or(Error::Singular)?;
        Ok(IntersectionForm { eta, eta_inv })
    }
}

/// Ring homomorphism induced by `p_i -> sum_j map[i][j] p~_j`, returned as
/// the matrix whose row `a` is the image of basis element `a` of `src`.
pub fn linear_substitute(
    src: &CohomologyRing,
    dst: &CohomologyRing,
    map: &[Vec<Q>],
) -> Result<Vec<Vec<Q>>> {
    let images: Vec<Vec<Q>> = map
        .iter()
        .map(|row| {
            let mut v = vec![Q::zero(); dst.dim()];
            for (j, c) in row.iter().enumerate() {
                for (x, g) in v.iter_mut().zip(dst.generator(j)) {
                    *x += g * c;
                }
            }
            v
        })
        .collect();
    let eval = |m: &[u32]| {
        let mut v = dst.unit();
        for (i, &e) in m.iter().enumerate() {
            for _ in 0..e {
                v = dst.mul(&v, &images[i]);
            }
        }
        v
    };
    for (idx, rel) in src.presentation().relations.iter().enumerate() {
        let mut v = vec![Q::zero(); dst.dim()];
        for (m, c) in rel {
            for (x, y) in v.iter_mut().zip(eval(m)) {
                *x += y * q(*c);
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            return Err(Error::NotAHomomorphism(idx));
        }
    }
    Ok(src.basis().iter().map(|m| eval(m)).collect())
}

/// Applies a basis map from [`linear_substitute`] to a class.
pub fn apply_map(map: &[Vec<Q>], a: &[Q]) -> Vec<Q> {
    let cols = map.first().map_or(0, |r| r.len());
    let mut out = vec![Q::zero(); cols];
    for (x, row) in a.iter().zip(map) {
        if x.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += x * r;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> CohomologyRing {
        let pres = RingPresentation::from_linear_products(
            2,
            &[vec![vec![1, 0], vec![1, 0]], vec![vec![-3, 1], vec![0, 1]]],
        );
        build_ring(&pres, 3).unwrap()
    }

    #[test]
    fn p1_ring() {
        let pres = RingPresentation::from_linear_products(1, &[vec![vec![1], vec![1]]]);
        let r = build_ring(&pres, 2).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.mul(&r.generator(0), &r.generator(0)), vec![q(0), q(0)]);
        assert_eq!(r.basis_name(1), "p");
    }

    #[test]
    fn f3_basis_and_normal_form() {
        let r = f3();
        let names: Vec<String> = (0..r.dim()).map(|a| r.basis_name(a)).collect();
        assert_eq!(names, ["1", "p1", "p2", "p1p2"]);
        assert_eq!(r.monomial_class(&[0, 2]), vec![q(0), q(0), q(0), q(3)]);
        let p2 = r.generator(1);
        assert_eq!(r.mul(&p2, &p2), vec![q(0), q(0), q(0), q(3)]);
    }

    #[test]
    fn cap_too_low_is_detected() {
        let pres = RingPresentation::from_linear_products(1, &[vec![vec![1], vec![1]]]);
        assert_eq!(build_ring(&pres, 1), Err(Error::NotFiniteDimensional(1)));
        let unit = RingPresentation { num_generators: 1, relations: vec![vec![(vec![0], 1)]] };
        assert_eq!(build_ring(&unit, 2), Err(Error::InconsistentRelations));
    }

    #[test]
    fn g1_basis() {
        let pres = RingPresentation::from_linear_products(
            2,
            &[vec![vec![1, 0], vec![1, 0]], vec![vec![0, 1], vec![-1, 1], vec![-4, 1]]],
        );
        let r = build_ring(&pres, 4).unwrap();
        let names: Vec<String> = (0..r.dim()).map(|a| r.basis_name(a)).collect();
        assert_eq!(names, ["1", "p1", "p2", "p1p2", "p2^2", "p1p2^2"]);
    }

    #[test]
    fn f3_to_f1_is_a_homomorphism() {
        let f1 = build_ring(
            &RingPresentation::from_linear_products(
                2,
                &[vec![vec![1, 0], vec![1, 0]], vec![vec![-1, 1], vec![0, 1]]],
            ),
            3,
        )
        .unwrap();
        // F1 generators in terms of F3 ones: p~1 = p1, p~2 = p2 - p1
        let map = vec![vec![q(1), q(0)], vec![q(-1), q(1)]];
        let phi = linear_substitute(&f1, &f3(), &map).unwrap();
        assert_eq!(phi[3], vec![q(0), q(0), q(0), q(1)]);
        let bad = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(linear_substitute(&f1, &f3(), &bad), Err(Error::NotAHomomorphism(0)));
    }
}
