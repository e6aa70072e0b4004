//! Exact truncated power-series and Laurent-series arithmetic over the
//! rationals.

mod coef;
mod laurent;
mod power;

pub use coef::Coef;
pub use laurent::{laurent_add, laurent_coeff, laurent_mul, laurent_pow, laurent_sub, LaurentSeries};
pub use power::{ps_add, ps_mul, ps_neg, ps_recip, ps_sub, PowerSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series has a zero constant term and is not invertible")]
    NotInvertible,
    #[error("coefficient of q^{exponent} requested but the series is only known through q^{max_exponent}")]
    OutOfWindow { exponent: i64, max_exponent: i64 },
}
