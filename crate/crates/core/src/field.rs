//! Real valued fields at desk scale.
//!
//! Three kinds are supported: the rationals with the usual absolute value, the
//! rationals with a p-adic absolute value, and prime fields with the trivial
//! valuation. Valuations are exact nonnegative rationals so that every norm
//! inequality downstream is decidable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Choice of coefficient field together with its absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// `Q` with the archimedean absolute value.
    Rational,
    /// `Q` with the p-adic absolute value `|p^m a/b| = p^{-m}`.
    PAdic { p: u64 },
    /// `F_p` with the trivial absolute value.
    FiniteField { p: u64 },
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn padic(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldSpec::PAdic { p })
        } else {
            Err(Error::InvalidField(format!("{p} is not prime")))
        }
    }

    pub fn finite(p: u64) -> Result<Self> {
        // keep products inside u128 comfortably
        if is_prime(p) && p < (1 << 32) {
            Ok(FieldSpec::FiniteField { p })
        } else {
            Err(Error::InvalidField(format!(
                "{p} is not a supported prime modulus"
            )))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rational | FieldSpec::PAdic { .. } => 0,
            FieldSpec::FiniteField { p } => *p,
        }
    }

    /// True when the valuation satisfies the ultrametric inequality.
    pub fn is_ultrametric(&self) -> bool {
        !matches!(self, FieldSpec::Rational)
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::FiniteField { p } => Scalar::Residue {
                value: 0,
                modulus: *p,
            },
            _ => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::FiniteField { p } => Scalar::Residue {
                value: (n as i128).rem_euclid(*p as i128) as u64,
                modulus: *p,
            },
            _ => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            FieldSpec::FiniteField { p } => {
                let r = n.mod_floor(&BigInt::from(*p));
                Scalar::Residue {
                    value: r.to_u64().expect("residue fits"),
                    modulus: *p,
                }
            }
            _ => Scalar::Rational(BigRational::from_integer(n.clone())),
        }
    }

    /// Embeds `num/den`; fails when `den` vanishes in the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return Err(Error::CoefficientNotInField(format!("{num}/{den}")));
        }
        Ok(&self.from_bigint(num) * &d.inv()?)
    }

    /// Parses an integer or `a/b` literal.
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        let text = text.trim();
        let bad = || Error::CoefficientNotInField(text.to_string());
        let (num, den) = match text.split_once('/') {
            Some((a, b)) => (
                BigInt::from_str(a.trim()).map_err(|_| bad())?,
                BigInt::from_str(b.trim()).map_err(|_| bad())?,
            ),
            None => (BigInt::from_str(text).map_err(|_| bad())?, BigInt::one()),
        };
        self.from_ratio(&num, &den)
    }

    /// The absolute value `|a|` as an exact rational.
    pub fn valuation(&self, a: &Scalar) -> NormValue {
        if a.is_zero() {
            return NormValue::zero();
        }
        match (self, a) {
            (FieldSpec::Rational, Scalar::Rational(q)) => NormValue(q.abs()),
            (FieldSpec::PAdic { p }, Scalar::Rational(q)) => {
                let p_big = BigInt::from(*p);
                let m = multiplicity(q.numer(), &p_big) - multiplicity(q.denom(), &p_big);
                let pm = num_traits::pow(p_big, m.unsigned_abs() as usize);
                if m >= 0 {
                    NormValue(BigRational::new(BigInt::one(), pm))
                } else {
                    NormValue(BigRational::from_integer(pm))
                }
            }
            (FieldSpec::FiniteField { .. }, Scalar::Residue { .. }) => NormValue::one(),
            _ => panic!("scalar {a:?} does not belong to field {self}"),
        }
    }

    pub fn contains(&self, a: &Scalar) -> bool {
        match (self, a) {
            (FieldSpec::FiniteField { p }, Scalar::Residue { modulus, .. }) => p == modulus,
            (FieldSpec::FiniteField { .. }, _) | (_, Scalar::Residue { .. }) => false,
            _ => true,
        }
    }
}

fn multiplicity(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut m = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        m += 1;
    }
    m
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// `Q`, `Q_p:<p>` or `F:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let prime = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidField(s.to_string()))
        };
        if s == "Q" {
            Ok(FieldSpec::Rational)
        } else if let Some(rest) = s.strip_prefix("Q_p:") {
            FieldSpec::padic(prime(rest)?)
        } else if let Some(rest) = s.strip_prefix("F:") {
            FieldSpec::finite(prime(rest)?)
        } else {
            Err(Error::InvalidField(s.to_string()))
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::PAdic { p } => write!(f, "Q_p:{p}"),
            FieldSpec::FiniteField { p } => write!(f, "F:{p}"),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An exact field element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(BigRational::zero()),
            Scalar::Residue { modulus, .. } => Scalar::Residue {
                value: 0,
                modulus: *modulus,
            },
        }
    }

    pub fn one_like(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(BigRational::one()),
            Scalar::Residue { modulus, .. } => Scalar::Residue {
                value: 1,
                modulus: *modulus,
            },
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Residue { .. } => None,
        }
    }

    /// Multiplies by an integer, reduced in the scalar's own field.
    pub fn mul_int(&self, n: i64) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(q * BigRational::from_integer(BigInt::from(n))),
            Scalar::Residue { value, modulus } => {
                let n = (n as i128).rem_euclid(*modulus as i128) as u128;
                Scalar::Residue {
                    value: ((*value as u128 * n) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
        }
    }
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = base as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    base = acc as u64;
    base
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalars from different fields: {a:?} vs {b:?}")
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (
                Scalar::Residue { value: a, modulus },
                Scalar::Residue {
                    value: b,
                    modulus: m2,
                },
            ) if modulus == m2 => Scalar::Residue {
                value: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (
                Scalar::Residue { value: a, modulus },
                Scalar::Residue {
                    value: b,
                    modulus: m2,
                },
            ) if modulus == m2 => Scalar::Residue {
                value: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A nonnegative exact rational: values of `|.|` and of the polyradius norms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormValue(BigRational);

impl NormValue {
    pub fn new(value: BigRational) -> Self {
        assert!(!value.is_negative(), "norm values are nonnegative");
        NormValue(value)
    }

    pub fn zero() -> Self {
        NormValue(BigRational::zero())
    }

    pub fn one() -> Self {
        NormValue(BigRational::one())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        NormValue::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn pow(&self, e: u32) -> NormValue {
        NormValue(num_traits::pow(self.0.clone(), e as usize))
    }

    /// `self / other`; panics on a zero divisor.
    pub fn div(&self, other: &NormValue) -> NormValue {
        assert!(!other.is_zero(), "division by a zero norm");
        NormValue(&self.0 / &other.0)
    }

    pub fn max(self, other: NormValue) -> NormValue {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Approximate decimal value for display only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl<'a> Add<&'a NormValue> for &'a NormValue {
    type Output = NormValue;
    fn add(self, rhs: &NormValue) -> NormValue {
        NormValue(&self.0 + &rhs.0)
    }
}

impl<'a> Mul<&'a NormValue> for &'a NormValue {
    type Output = NormValue;
    fn mul(self, rhs: &NormValue) -> NormValue {
        NormValue(&self.0 * &rhs.0)
    }
}

impl Add for NormValue {
    type Output = NormValue;
    fn add(self, rhs: NormValue) -> NormValue {
        NormValue(self.0 + rhs.0)
    }
}

impl Mul for NormValue {
    type Output = NormValue;
    fn mul(self, rhs: NormValue) -> NormValue {
        NormValue(self.0 * rhs.0)
    }
}

impl AddAssign<&NormValue> for NormValue {
    fn add_assign(&mut self, rhs: &NormValue) {
        self.0 += &rhs.0;
    }
}

impl std::iter::Sum for NormValue {
    fn sum<I: Iterator<Item = NormValue>>(iter: I) -> NormValue {
        iter.fold(NormValue::zero(), |a, b| a + b)
    }
}

impl PartialEq<BigRational> for NormValue {
    fn eq(&self, other: &BigRational) -> bool {
        &self.0 == other
    }
}

impl PartialOrd<BigRational> for NormValue {
    fn partial_cmp(&self, other: &BigRational) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses a positive rational literal such as `1/2`.
pub fn parse_positive_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("`{text}` is not a positive rational"));
    let t = text.trim();
    let q = match t.split_once('/') {
        Some((a, b)) => {
            let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            BigRational::new(a, b)
        }
        None => BigRational::from_integer(BigInt::from_str(t).map_err(|_| bad())?),
    };
    if q.is_positive() {
        Ok(q)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        FieldSpec::Rational
            .from_ratio(&BigInt::from(n), &BigInt::from(d))
            .unwrap()
    }

    #[test]
    fn rational_arithmetic() {
        assert_eq!(&q(1, 3) + &q(1, 6), q(1, 2));
        assert_eq!(q(1, 3).inv().unwrap(), q(3, 1));
        assert_eq!(q(0, 1).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FieldSpec::finite(5).unwrap();
        assert_eq!(&f5.from_i64(3) * &f5.from_i64(4), f5.from_i64(2));
        assert_eq!(f5.from_i64(3).inv().unwrap(), f5.from_i64(2));
        assert_eq!(-f5.from_i64(0), f5.zero());
        assert_eq!(f5.from_i64(-1), f5.from_i64(4));
    }

    #[test]
    fn valuations_of_the_example_fields() {
        assert_eq!(
            FieldSpec::Rational.valuation(&q(-3, 4)),
            NormValue::from_ratio(3, 4)
        );
        let two_adic = FieldSpec::padic(2).unwrap();
        assert_eq!(two_adic.valuation(&q(12, 1)), NormValue::from_ratio(1, 4));
        assert_eq!(two_adic.valuation(&q(1, 8)), NormValue::from_ratio(8, 1));
        let f7 = FieldSpec::finite(7).unwrap();
        assert_eq!(f7.valuation(&f7.from_i64(5)), NormValue::one());
        assert_eq!(f7.valuation(&f7.zero()), NormValue::zero());
    }

    #[test]
    fn config_strings() {
        assert_eq!("Q".parse::<FieldSpec>().unwrap(), FieldSpec::Rational);
        assert_eq!(
            "Q_p:3".parse::<FieldSpec>().unwrap(),
            FieldSpec::PAdic { p: 3 }
        );
        assert_eq!(
            "F:2".parse::<FieldSpec>().unwrap(),
            FieldSpec::FiniteField { p: 2 }
        );
        assert!("F:4".parse::<FieldSpec>().is_err());
        assert!("Q_p:1".parse::<FieldSpec>().is_err());
        assert!("R".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn scalar_literals() {
        let f2 = FieldSpec::finite(2).unwrap();
        assert!(matches!(
            f2.parse_scalar("1/2"),
            Err(Error::CoefficientNotInField(_))
        ));
        assert_eq!(f2.parse_scalar("3").unwrap(), f2.one());
        assert_eq!(FieldSpec::Rational.parse_scalar("-6/4").unwrap(), q(-3, 2));
        let f5 = FieldSpec::finite(5).unwrap();
        assert_eq!(f5.parse_scalar("1/2").unwrap(), f5.from_i64(3));
    }
}
