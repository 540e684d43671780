use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Serialize, Serializer};

use super::monomial::Exponent;
use crate::error::{Error, Result};
use crate::field::{parse_positive_rational, NormValue};

/// A polyradius `ε = (ε_1, …, ε_n)` with strictly positive rational entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadiusVector(Vec<BigRational>);

impl RadiusVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        if entries.iter().any(|r| !r.is_positive()) {
            return Err(Error::InvalidInput(
                "radius entries must be positive".into(),
            ));
        }
        Ok(RadiusVector(entries))
    }

    pub fn uniform(n: usize, r: BigRational) -> Result<Self> {
        RadiusVector::new(vec![r; n])
    }

    pub fn from_ratios(entries: &[(i64, i64)]) -> Result<Self> {
        RadiusVector::new(
            entries
                .iter()
                .map(|&(a, b)| BigRational::new(a.into(), b.into()))
                .collect(),
        )
    }

    /// Parses `1/2,1/4`.
    pub fn parse(text: &str) -> Result<Self> {
        text.split(',')
            .map(parse_positive_rational)
            .collect::<Result<Vec<_>>>()
            .and_then(RadiusVector::new)
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `ε^α`.
    pub fn monomial(&self, alpha: &Exponent) -> NormValue {
        let mut acc = BigRational::one();
        for (r, &a) in self.0.iter().zip(alpha.entries()) {
            if a > 0 {
                acc *= num_traits::pow(r.clone(), a as usize);
            }
        }
        NormValue::new(acc)
    }

    /// `λ∘ε = (λε_1, …, λε_n)`.
    pub fn scaled(&self, lambda: &BigRational) -> Result<Self> {
        RadiusVector::new(self.0.iter().map(|r| r * lambda).collect())
    }

    /// `(ε_1, …, ε_s, λε_{s+1}, …, λε_n)`.
    pub fn nested_scaled(&self, s: usize, lambda: &BigRational) -> Result<Self> {
        RadiusVector::new(
            self.0
                .iter()
                .enumerate()
                .map(|(i, r)| if i < s { r.clone() } else { r * lambda })
                .collect(),
        )
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &RadiusVector) -> RadiusVector {
        RadiusVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.min(b).clone())
                .collect(),
        )
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &RadiusVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn concat(&self, other: &RadiusVector) -> RadiusVector {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        RadiusVector(v)
    }

    pub(crate) fn set(&mut self, i: usize, value: BigRational) {
        assert!(value.is_positive());
        self.0[i] = value;
    }
}

impl fmt::Display for RadiusVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|r| NormValue::new(r.clone()).to_string())
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for RadiusVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|r| NormValue::new(r.clone()).to_string())
            .collect();
        parts.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_values() {
        let r = RadiusVector::from_ratios(&[(1, 2), (1, 3)]).unwrap();
        assert_eq!(
            r.monomial(&Exponent::new(vec![2, 1])),
            NormValue::from_ratio(1, 12)
        );
        assert_eq!(r.monomial(&Exponent::zero(2)), NormValue::one());
    }

    #[test]
    fn rejects_nonpositive_entries() {
        assert!(RadiusVector::from_ratios(&[(0, 1)]).is_err());
        assert!(RadiusVector::parse("1/2,-1").is_err());
        assert_eq!(
            RadiusVector::parse("1/2, 1/4").unwrap(),
            RadiusVector::from_ratios(&[(1, 2), (1, 4)]).unwrap()
        );
    }

    #[test]
    fn nested_scaling() {
        let r = RadiusVector::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            r.nested_scaled(1, &half).unwrap(),
            RadiusVector::from_ratios(&[(1, 2), (1, 4)]).unwrap()
        );
    }
}
