//! Truncated power series, the deglex local ordering and the ε-norm calculus.

mod jet;
mod monomial;
mod radius;
mod vector;

pub use jet::{Jet, JetRing};
pub use monomial::{
    exponents_of_degree, exponents_up_to, format_module_monomial, format_monomial, Exponent,
    ModuleMonomial,
};
pub use radius::RadiusVector;
pub use vector::{JetVector, LeadingData};

use std::cmp::Ordering;

/// Compares module monomials in the local ordering; `Greater` means larger.
pub fn deglex_compare(a: &ModuleMonomial, b: &ModuleMonomial) -> Ordering {
    a.cmp(b)
}

/// `count` names `prefix1, prefix2, …` avoiding `taken`; underscores are
/// appended to the prefix until no name collides.
pub fn fresh_names(prefix: &str, count: usize, taken: &[String]) -> Vec<String> {
    let mut p = prefix.to_string();
    loop {
        let names: Vec<String> = (1..=count).map(|i| format!("{p}{i}")).collect();
        if names.iter().all(|n| !taken.contains(n)) {
            return names;
        }
        p.push('_');
    }
}
