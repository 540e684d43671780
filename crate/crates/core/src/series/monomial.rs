use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

/// An exponent vector `α`, ordered by the local degree ordering.
///
/// `a > b` means `x^a > x^b` in deglex: lower total degree is larger, and on
/// equal degree the first differing entry decides with the smaller entry
/// being larger. In particular `1` is the maximum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponent(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `other - self` when `self` divides `other`.
    pub fn quotient(&self, other: &Exponent) -> Option<Exponent> {
        self.divides(other)
            .then(|| Exponent(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Exponent with entry `i` lowered by one, if positive.
    pub fn lowered(&self, i: usize) -> Option<Exponent> {
        (self.0[i] > 0).then(|| {
            let mut e = self.0.clone();
            e[i] -= 1;
            Exponent(e)
        })
    }

    pub fn raised(&self, i: usize) -> Exponent {
        let mut e = self.0.clone();
        e[i] += 1;
        Exponent(e)
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &Exponent) -> Exponent {
        let mut e = self.0.clone();
        e.extend_from_slice(&other.0);
        Exponent(e)
    }

    /// Entries at the given positions.
    pub fn select(&self, positions: &[usize]) -> Exponent {
        Exponent(positions.iter().map(|&i| self.0[i]).collect())
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match other.degree().cmp(&self.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0) {
            if a != b {
                return b.cmp(a);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponents in `n` variables of total degree exactly `d`, listed in
/// decreasing deglex order.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(Exponent(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in 0..=d {
            prefix.push(a);
            rec(n, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Exponent(Vec::new()));
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All exponents of total degree at most `d`, in decreasing deglex order.
pub fn exponents_up_to(n: usize, d: u32) -> Vec<Exponent> {
    (0..=d).flat_map(|k| exponents_of_degree(n, k)).collect()
}

/// `x^α e_i` with a zero-based unit index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ModuleMonomial {
    pub exponent: Exponent,
    pub unit: usize,
}

impl ModuleMonomial {
    pub fn new(exponent: Exponent, unit: usize) -> Self {
        ModuleMonomial { exponent, unit }
    }

    /// `self | other` in the module sense: same unit and componentwise `≤`.
    pub fn divides(&self, other: &ModuleMonomial) -> bool {
        self.unit == other.unit && self.exponent.divides(&other.exponent)
    }

    pub fn degree(&self) -> u32 {
        self.exponent.degree()
    }
}

impl Ord for ModuleMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exponent
            .cmp(&other.exponent)
            .then_with(|| other.unit.cmp(&self.unit))
    }
}

impl PartialOrd for ModuleMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Writes `x^2*y` style monomials; the empty monomial prints as `1`.
pub fn write_monomial(f: &mut impl fmt::Write, vars: &[String], e: &Exponent) -> fmt::Result {
    let mut first = true;
    for (name, &a) in vars.iter().zip(e.entries()) {
        if a == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        f.write_str(name)?;
        if a > 1 {
            write!(f, "^{a}")?;
        }
    }
    if first {
        f.write_char('1')?;
    }
    Ok(())
}

pub fn format_monomial(vars: &[String], e: &Exponent) -> String {
    let mut s = String::new();
    write_monomial(&mut s, vars, e).expect("writing to a string");
    s
}

/// `x^α*e2` style rendering of a module monomial (unit indices are 1-based).
pub fn format_module_monomial(vars: &[String], m: &ModuleMonomial, rank: usize) -> String {
    let mono = format_monomial(vars, &m.exponent);
    if rank == 1 {
        mono
    } else if m.exponent.is_zero() {
        format!("e{}", m.unit + 1)
    } else {
        format!("{mono}*e{}", m.unit + 1)
    }
}
