//! Truncated Laurent series `q^v (b_0 + b_1 q + ...)`.
//!
//! Three shapes are distinguished:
//!
//! * an exact zero, which absorbs products and is the identity for sums;
//! * a series known to vanish through some exponent but unknown above it,
//!   which is what a sum produces when every known coefficient cancels;
//! * a normalized series with a nonzero leading body coefficient.

use std::fmt;

use super::power::{ps_mul, ps_neg};
use super::{Coef, PowerSeries, SeriesError};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    kind: Kind,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Kind {
    Zero,
    /// Every coefficient of `q^e` with `e <= through` is zero; nothing is
    /// known above.
    VanishingThrough(i64),
    Series { valuation: i64, body: PowerSeries },
}

impl LaurentSeries {
    /// `q^valuation * body`, normalized so that the leading body
    /// coefficient is nonzero. Leading zeros shift the valuation up and
    /// shrink the body order; an all-zero body becomes a vanishing series.
    pub fn new(valuation: i64, body: PowerSeries) -> Self {
        let coeffs = body.coeffs();
        match coeffs.iter().position(|c| !c.is_zero()) {
            None => LaurentSeries { kind: Kind::VanishingThrough(valuation + body.order() as i64) },
            Some(0) => LaurentSeries { kind: Kind::Series { valuation, body } },
            Some(shift) => {
                let body = PowerSeries::from_coeffs(coeffs[shift..].to_vec());
                LaurentSeries { kind: Kind::Series { valuation: valuation + shift as i64, body } }
            }
        }
    }

    pub fn zero() -> Self {
        LaurentSeries { kind: Kind::Zero }
    }

    /// `O(q^(through+1))` with all lower coefficients known to vanish.
    pub fn vanishing_through(through: i64) -> Self {
        LaurentSeries { kind: Kind::VanishingThrough(through) }
    }

    /// `c q^exponent` with body order `order`.
    pub fn monomial(c: Coef, exponent: i64, order: usize) -> Self {
        if c.is_zero() {
            return Self::vanishing_through(exponent + order as i64);
        }
        LaurentSeries::new(exponent, PowerSeries::monomial(c, 0, order))
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    /// True when no coefficient inside the known window is nonzero.
    pub fn vanishes_in_window(&self) -> bool {
        !matches!(self.kind, Kind::Series { .. })
    }

    /// Lowest exponent with a nonzero coefficient, if one is known.
    pub fn valuation(&self) -> Option<i64> {
        match &self.kind {
            Kind::Series { valuation, .. } => Some(*valuation),
            _ => None,
        }
    }

    pub fn body(&self) -> Option<&PowerSeries> {
        match &self.kind {
            Kind::Series { body, .. } => Some(body),
            _ => None,
        }
    }

    /// Highest exponent whose coefficient is known; `None` for an exact zero.
    pub fn max_exponent(&self) -> Option<i64> {
        match &self.kind {
            Kind::Zero => None,
            Kind::VanishingThrough(e) => Some(*e),
            Kind::Series { valuation, body } => Some(valuation + body.order() as i64),
        }
    }

    /// Reduces the known window to exponents `<= max_exponent`.
    pub fn truncate(&self, max_exponent: i64) -> Self {
        match &self.kind {
            Kind::Zero => self.clone(),
            Kind::VanishingThrough(e) => Self::vanishing_through((*e).min(max_exponent)),
            Kind::Series { valuation, body } => {
                if max_exponent < *valuation {
                    Self::vanishing_through(max_exponent)
                } else {
                    let order = (max_exponent - valuation) as usize;
                    LaurentSeries { kind: Kind::Series { valuation: *valuation, body: body.truncate(order) } }
                }
            }
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        match &self.kind {
            Kind::Zero => self.clone(),
            Kind::VanishingThrough(e) => Self::vanishing_through(e + k),
            Kind::Series { valuation, body } => {
                LaurentSeries { kind: Kind::Series { valuation: valuation + k, body: body.clone() } }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.kind {
            Kind::Series { valuation, body } => {
                LaurentSeries { kind: Kind::Series { valuation: *valuation, body: ps_neg(body) } }
            }
            _ => self.clone(),
        }
    }

    /// Known coefficients as `(exponent, coefficient)` pairs, nonzero only.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Coef)> {
        let (valuation, coeffs) = match &self.kind {
            Kind::Series { valuation, body } => (*valuation, body.coeffs()),
            _ => (0, &[][..]),
        };
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (valuation + i as i64, c))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Zero => write!(f, "0"),
            Kind::VanishingThrough(e) => write!(f, "O(q^{})", e + 1),
            Kind::Series { valuation, body } => write!(f, "q^{valuation} * ({body:?})"),
        }
    }
}

/// Coefficient of `q^e`: zero below the valuation, an error past the
/// truncation window.
pub fn laurent_coeff(a: &LaurentSeries, e: i64) -> Result<Coef, SeriesError> {
    match &a.kind {
        Kind::Zero => Ok(Coef::zero()),
        Kind::VanishingThrough(t) if e <= *t => Ok(Coef::zero()),
        Kind::VanishingThrough(t) => Err(SeriesError::OutOfWindow { exponent: e, max_exponent: *t }),
        Kind::Series { valuation, body } => {
            if e < *valuation {
                return Ok(Coef::zero());
            }
            body.coeff((e - valuation) as usize)
                .cloned()
                .ok_or(SeriesError::OutOfWindow { exponent: e, max_exponent: valuation + body.order() as i64 })
        }
    }
}

/// Product: valuations add and bodies multiply at the smaller order.
pub fn laurent_mul(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    match (&a.kind, &b.kind) {
        (Kind::Zero, _) | (_, Kind::Zero) => LaurentSeries::zero(),
        (Kind::Series { valuation: va, body: ba }, Kind::Series { valuation: vb, body: bb }) => {
            LaurentSeries { kind: Kind::Series { valuation: va + vb, body: ps_mul(ba, bb) } }
        }
        // O(q^(t+1)) * q^v(...) = O(q^(t+v+1)).
        (Kind::VanishingThrough(t), Kind::Series { valuation, .. })
        | (Kind::Series { valuation, .. }, Kind::VanishingThrough(t)) => {
            LaurentSeries::vanishing_through(t + valuation)
        }
        (Kind::VanishingThrough(s), Kind::VanishingThrough(t)) => LaurentSeries::vanishing_through(s + t + 1),
    }
}

/// Sum over the common known window, renormalized.
pub fn laurent_add(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    let (top_a, top_b) = match (a.max_exponent(), b.max_exponent()) {
        (None, _) => return b.clone(),
        (_, None) => return a.clone(),
        (Some(x), Some(y)) => (x, y),
    };
    let top = top_a.min(top_b);
    let low = match (a.valuation(), b.valuation()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return LaurentSeries::vanishing_through(top),
    };
    if low > top {
        return LaurentSeries::vanishing_through(top);
    }
    let mut coeffs = vec![Coef::zero(); (top - low + 1) as usize];
    for s in [a, b] {
        for (e, c) in s.terms() {
            if e <= top {
                coeffs[(e - low) as usize] += c;
            }
        }
    }
    LaurentSeries::new(low, PowerSeries::from_coeffs(coeffs))
}

pub fn laurent_sub(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    laurent_add(a, &b.neg())
}

/// `a^n` by binary exponentiation; `a^0` is the exact constant 1 at the
/// body order of `a`.
pub fn laurent_pow(a: &LaurentSeries, n: u32) -> LaurentSeries {
    let order = match &a.kind {
        Kind::Series { body, .. } => body.order(),
        _ => 0,
    };
    let mut result = LaurentSeries::new(0, PowerSeries::one(order));
    if n == 0 {
        return result;
    }
    let mut base = a.clone();
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = laurent_mul(&result, &base);
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = laurent_mul(&base, &base);
    }
    result
}
