use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::jet::{Jet, JetRing};
use super::monomial::{format_module_monomial, Exponent, ModuleMonomial};
use super::radius::RadiusVector;
use crate::error::{Error, Result};
use crate::field::{NormValue, Scalar};

/// An element of `K[[x]]^N` truncated at `D`, one jet per unit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JetVector {
    comps: Vec<Jet>,
}

/// Leading monomial, coefficient and term of a nonzero vector, plus its tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingData {
    pub monomial: ModuleMonomial,
    pub coeff: Scalar,
    pub term: JetVector,
    pub tail: JetVector,
}

impl JetVector {
    pub fn new(comps: Vec<Jet>) -> Result<Self> {
        let Some(first) = comps.first() else {
            return Err(Error::InvalidInput("vectors need a component".into()));
        };
        for c in &comps[1..] {
            first.ring().check_same(c.ring())?;
        }
        Ok(JetVector { comps })
    }

    pub fn from_jet(f: Jet) -> Self {
        JetVector { comps: vec![f] }
    }

    pub fn zero(ring: &JetRing, rank: usize) -> Self {
        assert!(rank > 0);
        JetVector {
            comps: vec![Jet::zero(ring); rank],
        }
    }

    /// `c·x^α e_i`.
    pub fn term(ring: &JetRing, rank: usize, m: &ModuleMonomial, c: Scalar) -> Self {
        let mut v = JetVector::zero(ring, rank);
        v.comps[m.unit].add_term(m.exponent.clone(), c);
        v
    }

    pub fn ring(&self) -> &JetRing {
        self.comps[0].ring()
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Jet] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Jet {
        &self.comps[i]
    }

    pub fn into_comps(self) -> Vec<Jet> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Jet::is_zero)
    }

    pub fn is_exact(&self) -> bool {
        self.comps.iter().all(Jet::is_exact)
    }

    pub fn with_exact(self, exact: bool) -> Self {
        JetVector {
            comps: self.comps.into_iter().map(|c| c.with_exact(exact)).collect(),
        }
    }

    /// All `(x^α e_i, c)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (ModuleMonomial, &Scalar)> {
        self.comps.iter().enumerate().flat_map(|(i, f)| {
            f.terms()
                .iter()
                .map(move |(a, c)| (ModuleMonomial::new(a.clone(), i), c))
        })
    }

    /// Terms sorted in decreasing module order.
    pub fn terms_desc(&self) -> Vec<(ModuleMonomial, Scalar)> {
        let mut t: Vec<(ModuleMonomial, Scalar)> =
            self.terms().map(|(m, c)| (m, c.clone())).collect();
        t.sort_by(|a, b| b.0.cmp(&a.0));
        t
    }

    pub fn coeff(&self, m: &ModuleMonomial) -> Scalar {
        self.comps[m.unit].coeff(&m.exponent)
    }

    pub fn add_term(&mut self, m: ModuleMonomial, c: Scalar) {
        self.comps[m.unit].add_term(m.exponent, c);
    }

    pub fn leading_monomial(&self) -> Option<ModuleMonomial> {
        self.comps
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.leading().map(|(a, _)| ModuleMonomial::new(a.clone(), i)))
            .max()
    }

    pub fn leading_data(&self) -> Result<LeadingData> {
        let lm = self.leading_monomial().ok_or(Error::ZeroElement)?;
        let lc = self.coeff(&lm);
        let term = JetVector::term(self.ring(), self.rank(), &lm, lc.clone());
        let mut tail = self.clone();
        tail.comps[lm.unit].add_term(lm.exponent.clone(), -&lc);
        Ok(LeadingData {
            monomial: lm,
            coeff: lc,
            term,
            tail,
        })
    }

    pub fn order(&self) -> Option<u32> {
        self.comps.iter().filter_map(Jet::order).min()
    }

    fn check(&self, other: &JetVector) -> Result<()> {
        self.ring().check_same(other.ring())?;
        if self.rank() != other.rank() {
            return Err(Error::VariableMismatch(format!(
                "rank {} vs {}",
                self.rank(),
                other.rank()
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &JetVector) -> Result<JetVector> {
        self.check(other)?;
        Ok(JetVector {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &JetVector) -> Result<JetVector> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> JetVector {
        JetVector {
            comps: self.comps.iter().map(Jet::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> JetVector {
        JetVector {
            comps: self.comps.iter().map(|f| f.scale(c)).collect(),
        }
    }

    /// `g·self` for a scalar series `g`.
    pub fn mul_jet(&self, g: &Jet) -> JetVector {
        JetVector {
            comps: self.comps.iter().map(|f| g * f).collect(),
        }
    }

    /// `c·x^γ·self`.
    pub fn mul_term(&self, gamma: &Exponent, c: &Scalar) -> JetVector {
        JetVector {
            comps: self.comps.iter().map(|f| f.mul_term(gamma, c)).collect(),
        }
    }

    pub fn truncate(&self, degree: u32) -> JetVector {
        JetVector {
            comps: self.comps.iter().map(|f| f.truncate(degree)).collect(),
        }
    }

    pub fn norm(&self, radius: &RadiusVector) -> NormValue {
        self.comps.iter().map(|f| f.norm(radius)).sum()
    }

    pub fn same_terms(&self, other: &JetVector) -> bool {
        self.rank() == other.rank()
            && self
                .comps
                .iter()
                .zip(&other.comps)
                .all(|(a, b)| a.same_terms(b))
    }

    pub fn format_monomial(&self, m: &ModuleMonomial) -> String {
        format_module_monomial(self.ring().vars(), m, self.rank())
    }
}

impl<'a> std::ops::Add<&'a JetVector> for &'a JetVector {
    type Output = JetVector;
    fn add(self, rhs: &JetVector) -> JetVector {
        self.checked_add(rhs).expect("vectors from different modules")
    }
}

impl<'a> std::ops::Sub<&'a JetVector> for &'a JetVector {
    type Output = JetVector;
    fn sub(self, rhs: &JetVector) -> JetVector {
        self.checked_sub(rhs).expect("vectors from different modules")
    }
}

impl std::ops::AddAssign<&JetVector> for JetVector {
    fn add_assign(&mut self, rhs: &JetVector) {
        self.check(rhs).expect("vectors from different modules");
        for (a, b) in self.comps.iter_mut().zip(&rhs.comps) {
            *a += b;
        }
    }
}

impl std::ops::SubAssign<&JetVector> for JetVector {
    fn sub_assign(&mut self, rhs: &JetVector) {
        *self += &rhs.neg();
    }
}

impl fmt::Display for JetVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() == 1 {
            return write!(f, "{}", self.comps[0]);
        }
        let parts: Vec<String> = self.comps.iter().map(Jet::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for JetVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("JetVector", 2)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("components", &self.comps)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn leading_data_prefers_smaller_unit() {
        let r = JetRing::new(FieldSpec::Rational, &["x", "y"], 4).unwrap();
        let y = Jet::variable(&r, 1);
        let v = JetVector::new(vec![y.clone(), y]).unwrap();
        let ld = v.leading_data().unwrap();
        assert_eq!(ld.monomial, ModuleMonomial::new(Exponent::new(vec![0, 1]), 0));
        assert!(ld.tail.comp(0).is_zero());
        assert_eq!(ld.tail.comp(1).to_string(), "y");
    }

    #[test]
    fn leading_data_of_scalar_series() {
        let r = JetRing::new(FieldSpec::Rational, &["x", "y"], 4).unwrap();
        let x = Jet::variable(&r, 0);
        let three = Jet::constant(&r, FieldSpec::Rational.from_i64(3));
        let f = JetVector::from_jet(&(&three * &x) + &(&x * &x));
        let ld = f.leading_data().unwrap();
        assert_eq!(ld.coeff, FieldSpec::Rational.from_i64(3));
        assert_eq!(ld.term.to_string(), "3*x");
        assert_eq!(ld.tail.to_string(), "x^2");
        assert_eq!(
            JetVector::zero(&r, 1).leading_data(),
            Err(Error::ZeroElement)
        );
    }
}
