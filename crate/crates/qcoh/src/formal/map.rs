use super::series::Series;
use crate::error::{Error, Result};
use crate::Q;
use num_traits::One;

/// Change of variables `y_i = x_i u_i(x)` with each unit `u_i = 1 + O(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMap {
    units: Vec<Series>,
}

impl SeriesMap {
    pub fn new(units: Vec<Series>) -> Result<Self> {
        for u in &units {
            if u.constant_term().as_constant() != Some(Q::one()) || !u.is_hbar_free() {
                return Err(Error::BadConstantTerm(format!("map unit {u}")));
            }
        }
        Ok(SeriesMap { units })
    }

    pub fn identity(bx: &[u32]) -> Self {
        let units = (0..bx.len()).map(|_| Series::one(bx, Default::default())).collect();
        SeriesMap { units }
    }

    /// The map `y_i = exp(t_i)` for log coordinates `t_i = log x_i + f_i(x)`.
    pub fn from_log_corrections(f: &[Series]) -> Result<Self> {
        SeriesMap::new(f.iter().map(|fi| fi.exp()).collect::<Result<_>>()?)
    }

    pub fn bx(&self) -> &[u32] {
        self.units.first().map_or(&[], |u| u.bx())
    }

    pub fn units(&self) -> &[Series] {
        &self.units
    }

    /// `x_i u_i(x)` as a series.
    pub fn component(&self, i: usize) -> Series {
        let u = &self.units[i];
        let mut d = vec![0; u.nvars()];
        d[i] = 1;
        u.shift_q(&d)
    }

    pub fn components(&self) -> Vec<Series> {
        (0..self.units.len()).map(|i| self.component(i)).collect()
    }

    /// Composite `self(other(x))`.
    pub fn compose(&self, other: &SeriesMap) -> Result<SeriesMap> {
        let inner = other.components();
        let units = self
            .units
            .iter()
            .zip(&other.units)
            .map(|(u, v)| Ok(u.compose(&inner)?.mul(v)))
            .collect::<Result<_>>()?;
        Ok(SeriesMap { units })
    }

    /// Compositional inverse within the box, by fixed-point iteration on
    /// `v = 1 / u(y v)`.
    pub fn invert(&self) -> Result<SeriesMap> {
        let bx = self.bx().to_vec();
        let mut inv = SeriesMap::identity(&bx);
        let rounds = bx.iter().sum::<u32>() + 2;
        for _ in 0..rounds {
            let inner = inv.components();
            let next = self
                .units
                .iter()
                .map(|u| u.compose(&inner)?.inverse())
                .collect::<Result<Vec<_>>>()?;
            let next = SeriesMap { units: next };
            if next == inv {
                return Ok(inv);
            }
            inv = next;
        }
        Err(Error::NotConverged)
    }
}
