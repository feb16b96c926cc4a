//! Exact rational scalars with a machine-integer fast path.
//!
//! Values whose reduced numerator and denominator fit in `i64` are stored
//! inline; anything larger falls back to an arbitrary-precision fraction.
//! The representation is canonical, so derived equality and hashing agree
//! with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone)]
enum Repr {
    /// Reduced, denominator positive.
    Small(i64, i64),
    /// Reduced and too large for `Small`.
    Big(BigRational),
}

#[derive(Clone)]
pub struct Rational(Repr);

impl Rational {
    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        if d == 1 {
            if let Ok(n) = i64::try_from(n) {
                return Rational(Repr::Small(n, 1));
            }
        }
        let g = match (u64::try_from(n.unsigned_abs()), u64::try_from(d.unsigned_abs())) {
            (Ok(a), Ok(b)) => a.gcd(&b) as i128,
            _ => n.gcd(&d),
        };
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `n / d`; panics when `d` is zero.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_i128(n as i128, d as i128)
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn recip(&self) -> Self {
        Rational::one() / self
    }
}

fn add_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, 1), Repr::Small(bn, 1)) => match an.checked_add(*bn) {
            Some(n) => Rational(Repr::Small(n, 1)),
            None => Rational::from_i128(*an as i128 + *bn as i128, 1),
        },
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            let (an, ad, bn, bd) = (*an as i128, *ad as i128, *bn as i128, *bd as i128);
            Rational::from_i128(an * bd + bn * ad, ad * bd)
        }
        _ => Rational::from_big(a.to_big() + b.to_big()),
    }
}

fn mul_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, 1), Repr::Small(bn, 1)) => match an.checked_mul(*bn) {
            Some(n) => Rational(Repr::Small(n, 1)),
            None => Rational::from_i128(*an as i128 * *bn as i128, 1),
        },
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            Rational::from_i128(*an as i128 * *bn as i128, *ad as i128 * *bd as i128)
        }
        _ => Rational::from_big(a.to_big() * b.to_big()),
    }
}

fn neg_ref(a: &Rational) -> Rational {
    match &a.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(m) => Rational(Repr::Small(m, *d)),
            None => Rational::from_i128(-(*n as i128), *d as i128),
        },
        Repr::Big(r) => Rational::from_big(-r),
    }
}

fn div_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            assert!(*bn != 0, "division by zero");
            Rational::from_i128(*an as i128 * *bd as i128, *ad as i128 * *bn as i128)
        }
        _ => {
            assert!(!b.is_zero(), "division by zero");
            Rational::from_big(a.to_big() / b.to_big())
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident, $atr:ident, $am:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl $atr<&Rational> for Rational {
            fn $am(&mut self, rhs: &Rational) {
                *self = $f(self, rhs);
            }
        }
        impl $atr<Rational> for Rational {
            fn $am(&mut self, rhs: Rational) {
                *self = $f(self, &rhs);
            }
        }
    };
}

fn sub_ref(a: &Rational, b: &Rational) -> Rational {
    add_ref(a, &neg_ref(b))
}

binop!(Add, add, add_ref, AddAssign, add_assign);
binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
binop!(Div, div, div_ref, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(self)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `"p"` or `"p/q"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let r = BigRational::from_str(t).map_err(|_| Error::Config(format!("bad rational {s:?}")))?;
        Ok(Rational::from_big(r))
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// `(-1)^e` as a rational.
pub fn sign(e: usize) -> Rational {
    if e % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * int(k as i64))
}

pub fn parse(s: &str) -> Result<Rational> {
    s.parse()
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn is_unit(r: &Rational) -> bool {
    r.abs().is_one()
}

pub fn nonzero(r: &Rational) -> bool {
    !r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    #[test]
    fn parses_and_reduces() {
        assert_eq!(parse("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse("-7").unwrap(), int(-7));
        assert!(parse("1/0x").is_err());
        assert_eq!(format(&frac(-2, 4)), "-1/2");
        assert_eq!(format(&int(5)), "5");
    }

    #[test]
    fn denominators_stay_positive() {
        let r = frac(1, -3);
        assert!(!r.to_big().denom().is_negative());
        assert_eq!(format(&r), "-1/3");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let m = int(i64::MAX);
        let sum = &m + &m;
        assert_eq!(sum.to_big(), big(&format!("{}", 2 * (i64::MAX as i128))));
        assert_eq!(&sum - &m, m);
        let tiny = frac(1, i64::MAX);
        let sq = &tiny * &tiny;
        assert_eq!(format(&sq), format!("1/{}", (i64::MAX as i128) * (i64::MAX as i128)));
        assert_eq!(&sq * &(&m * &m), Rational::one());
        assert_eq!(-int(i64::MIN), &int(i64::MAX) + &Rational::one());
        let huge: Rational = "123456789012345678901234567891/2".parse().unwrap();
        assert_eq!(huge.to_string(), "123456789012345678901234567891/2");
        assert!(huge > m);
    }

    #[test]
    fn agrees_with_bigrational_oracle() {
        let vals = [frac(3, 7), frac(-5, 2), int(0), int(12), frac(i64::MAX, 3), frac(-1, i64::MAX), int(i64::MIN)];
        for a in &vals {
            for b in &vals {
                let (ba, bb) = (a.to_big(), b.to_big());
                assert_eq!((a + b).to_big(), &ba + &bb);
                assert_eq!((a - b).to_big(), &ba - &bb);
                assert_eq!((a * b).to_big(), &ba * &bb);
                if !b.is_zero() {
                    assert_eq!((a / b).to_big(), &ba / &bb);
                }
                assert_eq!(a.cmp(b), ba.cmp(&bb));
            }
        }
    }
}
