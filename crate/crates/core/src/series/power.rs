//! Truncated formal power series in `q`.
//!
//! A series is known modulo `q^(order+1)`; binary operations truncate to
//! the smaller of the two operand orders and never extend precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Coef, SeriesError};

/// `c_0 + c_1 q + ... + c_order q^order + O(q^(order+1))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Coef>,
}

impl PowerSeries {
    /// Builds a series whose order is `coeffs.len() - 1`.
    ///
    /// Panics if `coeffs` is empty: a series always knows at least its
    /// constant term.
    pub fn from_coeffs(coeffs: Vec<Coef>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        PowerSeries { coeffs }
    }

    /// Builds a series of the given order from a coefficient prefix,
    /// padding with zeros or dropping terms above `order`.
    pub fn with_order<I>(coeffs: I, order: usize) -> Self
    where
        I: IntoIterator,
        I::Item: Into<Coef>,
    {
        let mut v: Vec<Coef> = coeffs.into_iter().take(order + 1).map(Into::into).collect();
        v.resize(order + 1, Coef::zero());
        PowerSeries { coeffs: v }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![Coef::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(Coef::one(), 0, order)
    }

    /// `c q^exponent` known to `order`; the term vanishes if `exponent > order`.
    pub fn monomial(c: Coef, exponent: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if exponent <= order {
            s.coeffs[exponent] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Coef] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Coef> {
        self.coeffs
    }

    /// Coefficient of `q^k`, or `None` beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&Coef> {
        self.coeffs.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coef::is_zero)
    }

    /// Drops precision down to `order`. Asking for more precision than the
    /// series carries leaves it unchanged.
    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order());
        PowerSeries { coeffs: self.coeffs[..=keep].to_vec() }
    }

    pub fn scale(&self, c: &Coef) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})q")?,
                _ => write!(f, "({c})q^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

/// Coefficientwise sum, truncated to the smaller order.
pub fn ps_add(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let order = a.order().min(b.order());
    let coeffs = a.coeffs[..=order].iter().zip(&b.coeffs[..=order]).map(|(x, y)| x + y).collect();
    PowerSeries { coeffs }
}

pub fn ps_sub(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let order = a.order().min(b.order());
    let coeffs = a.coeffs[..=order].iter().zip(&b.coeffs[..=order]).map(|(x, y)| x - y).collect();
    PowerSeries { coeffs }
}

pub fn ps_neg(a: &PowerSeries) -> PowerSeries {
    PowerSeries { coeffs: a.coeffs.iter().map(|c| -c).collect() }
}

/// Schoolbook Cauchy product truncated to the smaller order.
///
/// Zero coefficients of either operand are skipped, which keeps products
/// of sparse series (the zero ansatz is mostly gaps) cheap.
pub fn ps_mul(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let order = a.order().min(b.order());
    let mut out = vec![Coef::zero(); order + 1];
    let b_terms: Vec<(usize, &Coef)> =
        b.coeffs[..=order].iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    for (i, x) in a.coeffs[..=order].iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for &(k, y) in &b_terms {
            if i + k > order {
                break;
            }
            out[i + k].add_mul(x, y);
        }
    }
    PowerSeries { coeffs: out }
}

/// Multiplicative inverse modulo `q^(order+1)`.
pub fn ps_recip(a: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    let a0 = &a.coeffs[0];
    if a0.is_zero() {
        return Err(SeriesError::NotInvertible);
    }
    let inv0 = &Coef::one() / a0;
    let order = a.order();
    let mut out: Vec<Coef> = Vec::with_capacity(order + 1);
    out.push(inv0.clone());
    for n in 1..=order {
        let mut acc = Coef::zero();
        for k in 1..=n {
            let ak = &a.coeffs[k];
            if !ak.is_zero() {
                acc.add_mul(ak, &out[n - k]);
            }
        }
        out.push(-(&acc * &inv0));
    }
    Ok(PowerSeries { coeffs: out })
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        ps_add(self, rhs)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        ps_sub(self, rhs)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        ps_mul(self, rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        ps_neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(v: &[i64], order: usize) -> PowerSeries {
        PowerSeries::with_order(v.iter().copied(), order)
    }

    fn ints(s: &PowerSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn add_examples() {
        assert_eq!(ps_add(&ps(&[1, 3], 1), &ps(&[0], 1)), ps(&[1, 3], 1));
        let h = ps(&[1, 3, 9], 2);
        assert!(ps_add(&h, &ps_neg(&h)).is_zero());
        assert_eq!(ps_add(&h, &ps_neg(&h)).order(), 2);
        let sum = ps_add(&ps(&[1, 1], 3), &ps(&[1, 0, 1], 1));
        assert_eq!(sum.order(), 1);
        assert_eq!(ints(&sum), vec![2, 1]);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(ints(&ps_mul(&ps(&[1, 1], 4), &ps(&[1, -1], 4))), vec![1, 0, -1, 0, 0]);

        // r_0..r_6 times (1 - q^6)
        let h = ps(&[1, 3, 9, 22, 51, 108, 221], 6);
        let corr = ps(&[1, 0, 0, 0, 0, 0, -1], 6);
        assert_eq!(ints(&ps_mul(&h, &corr)), vec![1, 3, 9, 22, 51, 108, 220]);

        let s = ps(&[4, -2, 7, 0, 1, 5, 9, 9], 7);
        assert_eq!(ps_mul(&PowerSeries::one(5), &s), s.truncate(5));
    }

    #[test]
    fn recip_examples() {
        assert_eq!(ints(&ps_recip(&ps(&[1, -1], 3)).unwrap()), vec![1, 1, 1, 1]);
        let half = ps_recip(&ps(&[2], 2)).unwrap();
        assert_eq!(half.coeff(0), Some(&Coef::from((1, 2))));
        assert!(half.coeffs()[1..].iter().all(Coef::is_zero));
        let h = ps(&[1, 3, 9], 4);
        let twice = ps_recip(&ps_recip(&h).unwrap()).unwrap();
        assert_eq!(ints(&twice), vec![1, 3, 9, 0, 0]);
        assert_eq!(ps_recip(&ps(&[0, 1], 2)), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn truncate_never_extends() {
        let s = ps(&[1, 2, 3], 2);
        assert_eq!(s.truncate(10), s);
        assert_eq!(s.truncate(1).order(), 1);
    }

    fn arb_series() -> impl Strategy<Value = PowerSeries> {
        (0usize..=12).prop_flat_map(|order| {
            prop::collection::vec(-50i64..=50, order + 1)
                .prop_map(move |v| PowerSeries::with_order(v, order))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let lhs = ps_mul(&a, &ps_add(&b, &c));
            let rhs = ps_add(&ps_mul(&a, &b), &ps_mul(&a, &c));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(ps_mul(&a, &b), ps_mul(&b, &a));
            prop_assert_eq!(ps_mul(&ps_mul(&a, &b), &c), ps_mul(&a, &ps_mul(&b, &c)));
        }

        #[test]
        fn recip_is_inverse(a in arb_series()) {
            prop_assume!(!a.coeffs()[0].is_zero());
            let r = ps_recip(&a).unwrap();
            prop_assert_eq!(ps_mul(&a, &r), PowerSeries::one(a.order()));
            // lowest terms are maintained by Coef; spot-check one coefficient
            for c in r.coeffs() {
                let (n, d) = (c.numer(), c.denom());
                prop_assert!(d > 0);
                prop_assert_eq!(n.gcd(&d), 1u32);
            }
        }
    }
}
