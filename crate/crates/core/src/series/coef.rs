//! Exact rational coefficients with a machine-integer fast path.
//!
//! Almost every coefficient met in practice is an integer that fits in an
//! `i64`, so that case is kept unboxed and promoted to a GMP rational only
//! on overflow or when a genuine fraction appears.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rug::{Integer, Rational};

/// An arbitrary-precision rational number, always in lowest terms.
///
/// Canonical form: values that are integers fitting in `i64` are stored as
/// `Small`; everything else is a reduced `Rational`. Equality and hashing
/// rely on that canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coef(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64),
    Big(Rational),
}

impl Coef {
    pub const fn zero() -> Self {
        Coef(Repr::Small(0))
    }

    pub const fn one() -> Self {
        Coef(Repr::Small(1))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1))
    }

    /// True when the denominator is exactly 1.
    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_) => true,
            Repr::Big(r) => *r.denom() == 1,
        }
    }

    pub fn numer(&self) -> Integer {
        match &self.0 {
            Repr::Small(v) => Integer::from(*v),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> Integer {
        match &self.0 {
            Repr::Small(_) => Integer::from(1),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<Integer> {
        match &self.0 {
            Repr::Small(v) => Some(Integer::from(*v)),
            Repr::Big(r) if *r.denom() == 1 => Some(r.numer().clone()),
            Repr::Big(_) => None,
        }
    }

    /// The value as an `i64`, if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Big(_) => None,
        }
    }

    pub fn to_rational(&self) -> Rational {
        match &self.0 {
            Repr::Small(v) => Rational::from(*v),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(v) => v.signum() as i32,
            Repr::Big(r) => r.cmp0() as i32,
        }
    }

    /// `self += a * b`, the inner step of every convolution.
    pub fn add_mul(&mut self, a: &Coef, b: &Coef) {
        if let (Repr::Small(acc), Repr::Small(x), Repr::Small(y)) = (&mut self.0, &a.0, &b.0) {
            if let Some(sum) = x.checked_mul(*y).and_then(|p| acc.checked_add(p)) {
                *acc = sum;
                return;
            }
        }
        let product = a * b;
        *self += &product;
    }

    fn from_rational(r: Rational) -> Self {
        if *r.denom() == 1 {
            if let Some(v) = r.numer().to_i64() {
                return Coef(Repr::Small(v));
            }
        }
        Coef(Repr::Big(r))
    }

    /// Exact quotient; `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &Coef) -> Option<Coef> {
        if rhs.is_zero() {
            return None;
        }
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let (Some(0), Some(q)) = (a.checked_rem(*b), a.checked_div(*b)) {
                return Some(Coef(Repr::Small(q)));
            }
        }
        Some(Coef::from_rational(self.to_rational() / rhs.to_rational()))
    }
}

impl Default for Coef {
    fn default() -> Self {
        Coef::zero()
    }
}

impl From<i64> for Coef {
    fn from(v: i64) -> Self {
        Coef(Repr::Small(v))
    }
}

impl From<i32> for Coef {
    fn from(v: i32) -> Self {
        Coef(Repr::Small(v as i64))
    }
}

impl From<u64> for Coef {
    fn from(v: u64) -> Self {
        match i64::try_from(v) {
            Ok(v) => Coef(Repr::Small(v)),
            Err(_) => Coef::from_rational(Rational::from(v)),
        }
    }
}

impl From<Integer> for Coef {
    fn from(v: Integer) -> Self {
        Coef::from_rational(Rational::from(v))
    }
}

impl From<Rational> for Coef {
    fn from(v: Rational) -> Self {
        Coef::from_rational(v)
    }
}

impl From<(i64, i64)> for Coef {
    /// `(numerator, denominator)`; panics on a zero denominator.
    fn from((n, d): (i64, i64)) -> Self {
        assert!(d != 0, "zero denominator");
        Coef::from_rational(Rational::from((n, d)))
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for Coef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coef {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl<'a> Add<&'a Coef> for &'a Coef {
    type Output = Coef;
    fn add(self, rhs: &Coef) -> Coef {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(v) = a.checked_add(*b) {
                return Coef(Repr::Small(v));
            }
        }
        Coef::from_rational(self.to_rational() + rhs.to_rational())
    }
}

impl<'a> Sub<&'a Coef> for &'a Coef {
    type Output = Coef;
    fn sub(self, rhs: &Coef) -> Coef {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(v) = a.checked_sub(*b) {
                return Coef(Repr::Small(v));
            }
        }
        Coef::from_rational(self.to_rational() - rhs.to_rational())
    }
}

impl<'a> Mul<&'a Coef> for &'a Coef {
    type Output = Coef;
    fn mul(self, rhs: &Coef) -> Coef {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(v) = a.checked_mul(*b) {
                return Coef(Repr::Small(v));
            }
        }
        Coef::from_rational(self.to_rational() * rhs.to_rational())
    }
}

impl<'a> Div<&'a Coef> for &'a Coef {
    type Output = Coef;
    fn div(self, rhs: &Coef) -> Coef {
        self.checked_div(rhs).expect("division by zero coefficient")
    }
}

impl Neg for &Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        if let Repr::Small(a) = &self.0 {
            if let Some(v) = a.checked_neg() {
                return Coef(Repr::Small(v));
            }
        }
        Coef::from_rational(-self.to_rational())
    }
}

impl Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Coef> for Coef {
            type Output = Coef;
            fn $m(self, rhs: Coef) -> Coef { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Coef> for Coef {
            type Output = Coef;
            fn $m(self, rhs: &Coef) -> Coef { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Coef> for Coef {
    fn add_assign(&mut self, rhs: &Coef) {
        if let (Repr::Small(a), Repr::Small(b)) = (&mut self.0, &rhs.0) {
            if let Some(v) = a.checked_add(*b) {
                *a = v;
                return;
            }
        }
        *self = &*self + rhs;
    }
}

impl SubAssign<&Coef> for Coef {
    fn sub_assign(&mut self, rhs: &Coef) {
        *self = &*self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Coef::from(i64::MAX);
        let sum = &big + &Coef::one();
        assert_eq!(sum.to_i64(), None);
        assert!(sum.is_integer());
        let back = &sum - &Coef::one();
        assert_eq!(back.to_i64(), Some(i64::MAX));
        assert_eq!(back, big);
    }

    #[test]
    fn fractions_stay_reduced() {
        let half = Coef::from((2, 4));
        assert_eq!(half.numer(), 1);
        assert_eq!(half.denom(), 2);
        assert!(!half.is_integer());
        let one = &half + &half;
        assert!(one.is_one());
        assert_eq!(Coef::from((-6, -3)), Coef::from(2));
    }

    #[test]
    fn division() {
        assert_eq!(&Coef::from(12) / &Coef::from(-4), Coef::from(-3));
        assert_eq!(&Coef::from(1) / &Coef::from(3), Coef::from((1, 3)));
        assert!(Coef::one().checked_div(&Coef::zero()).is_none());
        assert_eq!(Coef::from(i64::MIN).checked_div(&Coef::from(-1)).unwrap().to_i64(), None);
    }

    #[test]
    fn add_mul_matches_plain_ops() {
        let mut acc = Coef::from(i64::MAX - 1);
        acc.add_mul(&Coef::from(3), &Coef::from(i64::MAX / 2));
        let expected = Integer::from(i64::MAX - 1) + Integer::from(3) * Integer::from(i64::MAX / 2);
        assert_eq!(acc.to_integer().unwrap(), expected);
    }

    #[test]
    fn ordering_across_representations() {
        let huge = Coef::from(Integer::from(1) << 100);
        assert!(huge > Coef::from(i64::MAX));
        assert!(Coef::from((-1, 2)) < Coef::zero());
        assert_eq!(Coef::from((-1, 2)).signum(), -1);
    }
}
