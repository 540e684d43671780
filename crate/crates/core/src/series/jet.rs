use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::monomial::{write_monomial, Exponent};
use super::radius::RadiusVector;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, NormValue, Scalar};

/// The jet space `K[x_1..x_n] / m^{D+1}`: field, variable names, truncation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JetRing {
    field: FieldSpec,
    vars: Arc<[String]>,
    degree: u32,
}

impl JetRing {
    pub fn new<S: AsRef<str>>(field: FieldSpec, vars: &[S], degree: u32) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            let valid = v
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidInput(format!("bad variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidInput(format!("duplicate variable `{v}`")));
            }
        }
        Ok(JetRing {
            field,
            vars: vars.into(),
            degree,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// The truncation degree `D`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn with_degree(&self, degree: u32) -> JetRing {
        JetRing {
            field: self.field,
            vars: self.vars.clone(),
            degree,
        }
    }

    /// Ring on the variables of `self` followed by those of `other`.
    pub fn concat(&self, other: &JetRing, degree: u32) -> Result<JetRing> {
        let vars: Vec<String> = self.vars.iter().chain(other.vars.iter()).cloned().collect();
        JetRing::new(self.field, &vars, degree)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn check_same(&self, other: &JetRing) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VariableMismatch(format!(
                "{} over ({}) at D={} vs {} over ({}) at D={}",
                self.field,
                self.vars.join(","),
                self.degree,
                other.field,
                other.vars.join(","),
                other.degree
            )))
        }
    }

    pub fn zero(&self) -> Scalar {
        self.field.zero()
    }

    pub fn one(&self) -> Scalar {
        self.field.one()
    }
}

/// A truncated power series `f mod m^{D+1}`.
///
/// `exact` records whether the stored terms are the whole object, i.e. the jet
/// is a genuine polynomial and nothing beyond degree `D` was discarded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Jet {
    ring: JetRing,
    terms: BTreeMap<Exponent, Scalar>,
    exact: bool,
}

impl Jet {
    pub fn zero(ring: &JetRing) -> Jet {
        Jet {
            ring: ring.clone(),
            terms: BTreeMap::new(),
            exact: true,
        }
    }

    pub fn constant(ring: &JetRing, c: Scalar) -> Jet {
        Jet::monomial(ring, Exponent::zero(ring.nvars()), c)
    }

    pub fn one(ring: &JetRing) -> Jet {
        Jet::constant(ring, ring.one())
    }

    /// The coordinate function `x_i`.
    pub fn variable(ring: &JetRing, i: usize) -> Jet {
        Jet::monomial(ring, Exponent::unit(ring.nvars(), i), ring.one())
    }

    /// `c·x^α`, dropped (and marked inexact) when `|α| > D`.
    pub fn monomial(ring: &JetRing, alpha: Exponent, c: Scalar) -> Jet {
        let mut j = Jet::zero(ring);
        j.add_term(alpha, c);
        j
    }

    /// Builds a jet from terms; terms beyond `D` are dropped and clear `exact`.
    pub fn from_terms<I>(ring: &JetRing, terms: I, exact: bool) -> Jet
    where
        I: IntoIterator<Item = (Exponent, Scalar)>,
    {
        let mut j = Jet::zero(ring);
        for (a, c) in terms {
            j.add_term(a, c);
        }
        j.exact &= exact;
        j
    }

    /// Adds `c·x^α` in place.
    pub fn add_term(&mut self, alpha: Exponent, c: Scalar) {
        assert_eq!(alpha.len(), self.ring.nvars(), "exponent length");
        debug_assert!(self.ring.field.contains(&c));
        if c.is_zero() {
            return;
        }
        if alpha.degree() > self.ring.degree {
            self.exact = false;
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ring(&self) -> &JetRing {
        &self.ring
    }

    pub fn field(&self) -> FieldSpec {
        self.ring.field
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn with_exact(mut self, exact: bool) -> Jet {
        self.exact = exact;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Scalar> {
        &self.terms
    }

    /// Terms in decreasing deglex order (the constant term first).
    pub fn iter_desc(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &Exponent) -> Scalar {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Exponent::zero(self.ring.nvars()))
    }

    /// `ord(f)`: least degree of a stored term, `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponent::degree)
    }

    /// Largest degree of a stored term, `None` for zero.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Exponent::degree)
    }

    /// Leading monomial and coefficient in the local ordering.
    pub fn leading(&self) -> Option<(&Exponent, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// The homogeneous part of degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.degree() == k)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
            exact: self.exact || k <= self.ring.degree,
        }
    }

    /// Sum of the parts of degree in `lo..=hi`.
    pub fn degree_range(&self, lo: u32, hi: u32) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| (lo..=hi).contains(&a.degree()))
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
            exact: true,
        }
    }

    /// Moves the jet into the ring truncated at `degree`, discarding terms above it.
    pub fn truncate(&self, degree: u32) -> Jet {
        let ring = self.ring.with_degree(degree);
        let terms: BTreeMap<Exponent, Scalar> = self
            .terms
            .iter()
            .filter(|(a, _)| a.degree() <= degree)
            .map(|(a, c)| (a.clone(), c.clone()))
            .collect();
        let exact = self.exact && terms.len() == self.terms.len();
        Jet { ring, terms, exact }
    }

    /// Reinterprets the jet in another ring with the same field whose
    /// variable `i` is `positions[i]`; used to embed into larger rings.
    pub fn embed(&self, target: &JetRing, positions: &[usize]) -> Jet {
        assert_eq!(positions.len(), self.ring.nvars());
        let n = target.nvars();
        let mut j = Jet::zero(target);
        for (a, c) in &self.terms {
            let mut e = vec![0; n];
            for (i, &p) in positions.iter().enumerate() {
                e[p] += a.get(i);
            }
            j.add_term(Exponent::new(e), c.clone());
        }
        j.exact &= self.exact;
        j
    }

    pub fn neg(&self) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
            exact: self.exact,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Jet {
        if c.is_zero() {
            return Jet::zero(&self.ring);
        }
        Jet {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, b)| (a.clone(), b * c))
                .collect(),
            exact: self.exact,
        }
    }

    /// `c·x^γ·self`.
    pub fn mul_term(&self, gamma: &Exponent, c: &Scalar) -> Jet {
        let mut out = Jet::zero(&self.ring);
        if c.is_zero() {
            return out;
        }
        for (a, b) in &self.terms {
            out.add_term(a.add(gamma), b * c);
        }
        out.exact &= self.exact;
        out
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.ring.check_same(&other.ring)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.ring.check_same(&other.ring)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_assign_unchecked(&mut self, other: &Jet) {
        for (a, c) in &other.terms {
            self.add_term(a.clone(), c.clone());
        }
        self.exact &= other.exact;
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let d = self.ring.degree;
        let mut out = Jet::zero(&self.ring);
        if (self.is_zero() && self.exact) || (other.is_zero() && other.exact) {
            return out;
        }
        let mut rhs: Vec<(&Exponent, u32, &Scalar)> =
            other.terms.iter().map(|(a, c)| (a, a.degree(), c)).collect();
        rhs.sort_by_key(|t| t.1);
        let mut acc: BTreeMap<Exponent, Scalar> = BTreeMap::new();
        let mut lost = false;
        for (a, ca) in &self.terms {
            let da = a.degree();
            for &(b, db, cb) in &rhs {
                if da + db > d {
                    lost = true;
                    break;
                }
                let p = ca * cb;
                match acc.entry(a.add(b)) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(p);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += &p;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        out.terms = acc;
        out.exact = self.exact && other.exact && !lost;
        out
    }

    pub fn pow(&self, e: u32) -> Jet {
        let mut acc = Jet::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `∂f/∂x_i`; exact when `f` is, since degrees only drop.
    pub fn derivative(&self, i: usize) -> Jet {
        let mut out = Jet::zero(&self.ring);
        for (a, c) in &self.terms {
            let ai = a.get(i);
            if ai == 0 {
                continue;
            }
            out.add_term(a.lowered(i).expect("positive"), c.mul_int(ai as i64));
        }
        // a discarded term of degree D+1 would contribute in degree D
        out.exact = self.exact;
        out
    }

    /// `f(g_1, …, g_n)` computed in `target`.
    ///
    /// Substituted jets must have zero constant term unless `f` is an exact
    /// polynomial, in which case the finite expansion is carried out.
    pub fn substitute(&self, values: &[Jet], target: &JetRing) -> Result<Jet> {
        if values.len() != self.ring.nvars() {
            return Err(Error::VariableMismatch(format!(
                "expected {} substitution values, got {}",
                self.ring.nvars(),
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            target.check_same(&v.ring)?;
            if v.ring.field != self.ring.field {
                return Err(Error::VariableMismatch("field mismatch".into()));
            }
            if !self.exact && !v.constant_term().is_zero() {
                return Err(Error::SubstitutionConstantTerm { index: i });
            }
        }
        let mut powers: Vec<Vec<Jet>> = values.iter().map(|v| vec![Jet::one(target), v.clone()]).collect();
        let mut out = Jet::zero(target);
        // discarded terms of f would only contribute in degree > D when all
        // substituted values lie in the maximal ideal
        let all_in_m = values.iter().all(|v| v.constant_term().is_zero());
        let drop_ok = all_in_m && target.degree <= self.ring.degree;
        for (a, c) in &self.terms {
            let mut term = Jet::constant(target, c.clone());
            for (i, &ai) in a.entries().iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                while powers[i].len() <= ai as usize {
                    let next = &powers[i][powers[i].len() - 1] * &values[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][ai as usize];
                if term.is_zero() && term.exact {
                    break;
                }
            }
            out.add_assign_unchecked(&term);
        }
        out.exact &= self.exact || drop_ok;
        Ok(out)
    }

    /// `Σ |c_α| ε^α` over the stored terms.
    pub fn norm(&self, radius: &RadiusVector) -> NormValue {
        assert_eq!(radius.len(), self.ring.nvars(), "radius dimension");
        let field = self.ring.field;
        self.terms
            .iter()
            .map(|(a, c)| &field.valuation(c) * &radius.monomial(a))
            .sum()
    }

    /// Variables that occur in some stored term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.keys().any(|a| a.get(i) > 0))
            .collect()
    }

    /// Equality of stored terms and ring, ignoring the exact flag.
    pub fn same_terms(&self, other: &Jet) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl<'a> std::ops::Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.checked_add(rhs).expect("jets from different rings")
    }
}

impl<'a> std::ops::Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.checked_sub(rhs).expect("jets from different rings")
    }
}

impl<'a> std::ops::Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.checked_mul(rhs).expect("jets from different rings")
    }
}

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::neg(self)
    }
}

impl std::ops::AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.ring.check_same(&rhs.ring).expect("jets from different rings");
        self.add_assign_unchecked(rhs);
    }
}

impl std::ops::SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self += &rhs.neg();
    }
}

/// Writes terms in decreasing deglex order, e.g. `4 - 1/2*z + 3*x^2*y`.
fn write_terms<'a, I>(f: &mut impl fmt::Write, vars: &[String], terms: I) -> fmt::Result
where
    I: Iterator<Item = (&'a Exponent, &'a Scalar)>,
{
    let mut first = true;
    for (a, c) in terms {
        let text = c.to_string();
        let (neg, mag) = match text.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, text),
        };
        if first {
            if neg {
                f.write_char('-')?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        if a.is_zero() {
            f.write_str(&mag)?;
        } else {
            if mag != "1" {
                write!(f, "{mag}*")?;
            }
            write_monomial(f, vars, a)?;
        }
    }
    if first {
        f.write_char('0')?;
    }
    Ok(())
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.ring.vars(), self.iter_desc())
    }
}

impl Serialize for Jet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(&Exponent, String)> = self
            .iter_desc()
            .map(|(a, c)| (a, c.to_string()))
            .collect();
        let mut st = s.serialize_struct("Jet", 4)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("terms", &terms)?;
        st.serialize_field("truncation", &self.ring.degree)?;
        st.serialize_field("exact", &self.exact)?;
        st.end()
    }
}
