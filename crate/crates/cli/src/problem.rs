//! The TOML problem file of `cartan-solve`.
//!
//! ```toml
//! field = "Q"
//! x = ["x", "y"]
//! s = ["s1"]
//! deg = 6
//! a = ["x"]
//! b = ["1", "y"]
//! c = "s1*x + 2*s1*y"
//! rho = "1/2,1/2"
//! tau = "1/4"
//! ```
//!
//! `field`, `x` and `deg` fall back to `--field`, `--vars` and `--deg`.
//! Entries of `a` and `b` are polynomials or `[p1, ..., pN]` vectors over the
//! `x` variables; `c` lives over `(x, s)` and is homogeneous in `s`.

use std::collections::BTreeMap;
use std::path::Path;

use jetalg::cartan::{split_s, CartanProblem};
use jetalg::parse::parse_vector;
use jetalg::{Error, FieldSpec, JetRing, JetVector, RadiusVector, Result};
use serde::Deserialize;

use crate::Common;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    field: Option<String>,
    x: Option<Vec<String>>,
    s: Vec<String>,
    deg: Option<u32>,
    #[serde(default)]
    a: Vec<String>,
    #[serde(default)]
    b: Vec<String>,
    c: String,
    rho: String,
    tau: String,
}

pub fn load(path: &Path, common: &Common) -> Result<CartanProblem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let file: ProblemFile =
        toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;

    let field: FieldSpec = match (&file.field, &common.field) {
        (Some(f), _) | (None, Some(f)) => f.parse()?,
        (None, None) => return Err(Error::InvalidInput("no field given".into())),
    };
    let x_vars = match (&file.x, &common.vars) {
        (Some(v), _) => v.clone(),
        (None, Some(v)) => crate::commands::split_names(v),
        (None, None) => return Err(Error::InvalidInput("no variables given".into())),
    };
    let deg = file
        .deg
        .or(common.deg)
        .ok_or_else(|| Error::InvalidInput("no truncation degree given".into()))?;
    let ring = JetRing::new(field, &x_vars, deg)?;
    let all: Vec<String> = x_vars.iter().chain(&file.s).cloned().collect();
    let big = JetRing::new(field, &all, deg)?;

    let a: Vec<JetVector> = file.a.iter().map(|t| parse_vector(t, &ring)).collect::<Result<_>>()?;
    let b: Vec<JetVector> = file.b.iter().map(|t| parse_vector(t, &ring)).collect::<Result<_>>()?;
    let c_full = parse_vector(&file.c, &big)?;
    let rank = c_full.rank();
    if a.iter().chain(&b).any(|v| v.rank() != rank) {
        return Err(Error::InvalidInput(format!("every vector must have rank {rank}")));
    }
    let c = split_s(&c_full, &ring);
    let degree = homogeneous_degree(&c)?;
    let rho = radius(&file.rho, x_vars.len())?;
    let tau = radius(&file.tau, file.s.len())?;
    Ok(CartanProblem {
        ring,
        rank,
        a,
        b,
        s_vars: file.s,
        degree,
        c,
        rho,
        tau,
        witness: None,
    })
}

fn homogeneous_degree(c: &BTreeMap<jetalg::Exponent, JetVector>) -> Result<u32> {
    let mut degrees = c.keys().map(|beta| beta.degree());
    let Some(e) = degrees.next() else {
        return Ok(0);
    };
    if degrees.any(|d| d != e) {
        return Err(Error::InvalidInput("c is not homogeneous in s".into()));
    }
    Ok(e)
}

/// A `,` or `:` separated list, or one value repeated `n` times.
pub fn radius(text: &str, n: usize) -> Result<RadiusVector> {
    let r = RadiusVector::parse(&text.replace(':', ","))?;
    match r.len() {
        len if len == n => Ok(r),
        1 => RadiusVector::uniform(n, r.entries()[0].clone()),
        len => Err(Error::InvalidInput(format!("radius has {len} entries, expected {n}"))),
    }
}
