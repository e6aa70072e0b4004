//! Laurent-series coefficients of the zeros of the partial theta function
//! `θ(q, x) = Σ_{j≥0} q^{j(j+1)/2} x^j`.
//!
//! The `j`-th zero has the expansion
//! `-q^{-j} + (-1)^j q^{j(j-1)/2} (1 + Σ_{k≥1} g_{j,k} q^k)`.
//! This crate computes the `g_{j,k}` exactly, compares them with the
//! stabilized sequence built from partitions into parts of three kinds,
//! and cross-checks the expansion against numerically located zeros.

pub mod cli;
pub mod numeric;
pub mod qsequences;
pub mod series;
pub mod stabilization;
pub mod zero_series;

pub use series::{Coef, LaurentSeries, PowerSeries, SeriesError};
