//! Truncated bi-Laurent scalars in (hbar, lambda) and multivariate q-series
//! over them.

pub mod map;
pub mod qseries;
pub mod scalar;
pub mod series;

pub use map::SeriesMap;
pub use qseries::{CohValue, QSeries};
pub use scalar::{BiLaurent, Expand, Window};
pub use series::Series;
