//! Exact truncated-series engine for Givental I and J functions of toric
//! spaces: Birkhoff factorization, mirror maps, connection matrices, quantum
//! differential operators, big quantum cohomology of F3 and a localization
//! graph-sum oracle for O(k)+O(-2-k) over P1.
//!
//! Everything is computed over arbitrary precision rationals.

pub mod bigquantum;
pub mod birkhoff;
pub mod cli;
pub mod cohomology;
pub mod connection;
pub mod error;
pub mod formal;
pub mod golden;
pub mod ifunction;
pub mod json;
pub mod linalg;
pub mod localization;
pub mod matrix;
pub mod mirror;

pub use error::{Error, Result};

use num_bigint::BigInt;
use num_rational::BigRational;

/// The coefficient field.
pub type Q = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `n/d` as a rational.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n/d"` or `"n"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Renders a rational as `"num/den"`, always with an explicit denominator.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}
