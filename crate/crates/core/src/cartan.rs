//! Cartan's bounded linear solver.
//!
//! Given `a_1..a_r, b_1..b_t ∈ K{x}^N` and a right-hand side `C` whose
//! components are homogeneous of degree `e` in auxiliary variables `s`, the
//! solver returns `z_i ∈ K{x}[s]` and `y_j ∈ K[s]`, homogeneous of degree `e`,
//! with `Σ a_i z_i + Σ b_j y_j = C` mod `m_x^{D+1}`, together with a constant
//! `L` bounding `‖z_i‖_{(ρ,τ)}` and `‖y_j‖_τ` by `L‖C‖_{(ρ,τ)}`.
//!
//! Polynomials in `s` are stored as maps from `s`-exponents to coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::division::{divide_with_epsilon, shrink_radius};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, NormValue, Scalar};
use crate::linalg::{det, inverse, minor_matrix, EchelonBasis, Matrix};
use crate::series::{
    exponents_up_to, format_monomial, Exponent, Jet, JetRing, JetVector, ModuleMonomial,
    RadiusVector,
};
use crate::standard_basis::std_basis;

/// A polynomial in `s` with coefficients of type `T`.
pub type SPoly<T> = BTreeMap<Exponent, T>;

/// A user-supplied solution `(z̄, ȳ)` whose existence the solver assumes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanWitness {
    pub z: Vec<SPoly<Jet>>,
    pub y: Vec<SPoly<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanProblem {
    /// The ring of `x`; every `a_i`, `b_j` and coefficient of `C` lives here.
    pub ring: JetRing,
    pub rank: usize,
    pub a: Vec<JetVector>,
    pub b: Vec<JetVector>,
    pub s_vars: Vec<String>,
    /// The common `s`-degree `e` of `C`.
    pub degree: u32,
    pub c: SPoly<JetVector>,
    pub rho: RadiusVector,
    pub tau: RadiusVector,
    pub witness: Option<CartanWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanSolution {
    pub x_vars: Vec<String>,
    pub s_vars: Vec<String>,
    pub z: Vec<SPoly<Jet>>,
    pub y: Vec<SPoly<Scalar>>,
    /// The radius the bounds refer to; for `r > 0` it is shrunk below the
    /// input radius so that division by the standard basis is certified.
    pub rho: RadiusVector,
    pub tau: RadiusVector,
    /// Implementation constant, twice the proof constant.
    pub l: NormValue,
    /// The constant assembled literally from the proof.
    pub l_proof: NormValue,
    /// Constant of the reduced system without `a`.
    pub l0: NormValue,
    /// The rows `(α_j, k_j)` spanning the coefficient space of the `b`.
    pub selected_rows: Vec<ModuleMonomial>,
    /// The `b` indices carrying the nonzero minor.
    pub selected_columns: Vec<usize>,
    pub norm_c: NormValue,
    pub norm_z: Vec<NormValue>,
    pub norm_y: Vec<NormValue>,
    pub identity_verified: bool,
    pub bounds_verified: bool,
}

/// Splits a vector over the ring `(x, s)` into its `s`-coefficients over the
/// ring of `x`, truncating the `x` parts at the degree of `x_ring`.
pub fn split_s(v: &JetVector, x_ring: &JetRing) -> SPoly<JetVector> {
    let nx = x_ring.nvars();
    let n = v.ring().nvars();
    let x_pos: Vec<usize> = (0..nx).collect();
    let s_pos: Vec<usize> = (nx..n).collect();
    let mut out: SPoly<JetVector> = BTreeMap::new();
    for (m, c) in v.terms() {
        let alpha = m.exponent.select(&x_pos);
        let beta = m.exponent.select(&s_pos);
        out.entry(beta)
            .or_insert_with(|| JetVector::zero(x_ring, v.rank()))
            .add_term(ModuleMonomial::new(alpha, m.unit), c.clone());
    }
    if !v.is_exact() {
        for w in out.values_mut() {
            *w = w.clone().with_exact(false);
        }
    }
    out.retain(|_, w| !w.is_zero() || !w.is_exact());
    out
}

/// `Σ_β c_β s^β` as a vector over the ring `(x, s)` of `target`.
pub fn join_s(c: &SPoly<JetVector>, target: &JetRing, rank: usize) -> JetVector {
    let mut out = JetVector::zero(target, rank);
    for (beta, v) in c {
        for (m, coeff) in v.terms() {
            let e = m.exponent.concat(beta);
            out.add_term(ModuleMonomial::new(e, m.unit), coeff.clone());
        }
    }
    out
}

/// `Σ_β ‖c_β‖_ρ τ^β`.
pub fn norm_vector_poly(c: &SPoly<JetVector>, rho: &RadiusVector, tau: &RadiusVector) -> NormValue {
    c.iter().map(|(beta, v)| v.norm(rho) * tau.monomial(beta)).sum()
}

pub fn norm_jet_poly(c: &SPoly<Jet>, rho: &RadiusVector, tau: &RadiusVector) -> NormValue {
    c.iter().map(|(beta, v)| v.norm(rho) * tau.monomial(beta)).sum()
}

pub fn norm_scalar_poly(c: &SPoly<Scalar>, field: FieldSpec, tau: &RadiusVector) -> NormValue {
    c.iter().map(|(beta, v)| field.valuation(v) * tau.monomial(beta)).sum()
}

/// Formats `Σ_β c_β s^β` given a formatter for the coefficients.
pub fn format_s_poly<T>(c: &SPoly<T>, s_vars: &[String], coeff: impl Fn(&T) -> String) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.iter()
        .rev()
        .map(|(beta, v)| {
            let mono = format_monomial(s_vars, beta);
            if mono == "1" {
                format!("({})", coeff(v))
            } else {
                format!("({})*{}", coeff(v), mono)
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

impl CartanSolution {
    pub fn z_text(&self, i: usize) -> String {
        format_s_poly(&self.z[i], &self.s_vars, |j| j.to_string())
    }

    pub fn y_text(&self, j: usize) -> String {
        format_s_poly(&self.y[j], &self.s_vars, |c| c.to_string())
    }
}

impl Serialize for CartanSolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            z: Vec<String>,
            y: Vec<String>,
            rho: &'a RadiusVector,
            tau: &'a RadiusVector,
            l: &'a NormValue,
            l_proof: &'a NormValue,
            l0: &'a NormValue,
            selected_rows: Vec<String>,
            selected_columns: Vec<usize>,
            norm_c: &'a NormValue,
            norm_z: &'a [NormValue],
            norm_y: &'a [NormValue],
            identity_verified: bool,
            bounds_verified: bool,
        }
        Out {
            z: (0..self.z.len()).map(|i| self.z_text(i)).collect(),
            y: (0..self.y.len()).map(|j| self.y_text(j)).collect(),
            rho: &self.rho,
            tau: &self.tau,
            l: &self.l,
            l_proof: &self.l_proof,
            l0: &self.l0,
            selected_rows: self
                .selected_rows
                .iter()
                .map(|m| format!("{}*e{}", format_monomial(&self.x_vars, &m.exponent), m.unit + 1))
                .collect(),
            selected_columns: self.selected_columns.iter().map(|j| j + 1).collect(),
            norm_c: &self.norm_c,
            norm_z: &self.norm_z,
            norm_y: &self.norm_y,
            identity_verified: self.identity_verified,
            bounds_verified: self.bounds_verified,
        }
        .serialize(serializer)
    }
}

/// The data of the reduced system `Σ b_j y_j = C`: a basis of the row space
/// and a nonzero minor.
struct Selection {
    rows: Vec<ModuleMonomial>,
    columns: Vec<usize>,
    /// Inverse of the transposed minor: `y_{columns[p]} = Σ_q inv[p][q] C_{rows[q]}`.
    inv: Matrix,
    l_proof: NormValue,
}

fn module_monomials(ring: &JetRing, rank: usize, max_degree: u32) -> Vec<ModuleMonomial> {
    exponents_up_to(ring.nvars(), max_degree)
        .into_iter()
        .flat_map(|e| (0..rank).map(move |u| ModuleMonomial::new(e.clone(), u)))
        .collect()
}

fn select_rows(b: &[JetVector], ring: &JetRing, rank: usize, rho: &RadiusVector) -> Result<Selection> {
    let field = ring.field();
    let d = ring.degree();
    let row_of = |m: &ModuleMonomial| -> Vec<Scalar> { b.iter().map(|g| g.coeff(m)).collect() };

    let mut basis = EchelonBasis::new(field);
    let mut rows = Vec::new();
    for m in module_monomials(ring, rank, d) {
        if basis.insert(&row_of(&m)) {
            rows.push(m);
        }
    }
    if b.iter().any(|g| !g.is_exact()) && d > 0 {
        let mut lower = EchelonBasis::new(field);
        for m in module_monomials(ring, rank, d - 1) {
            lower.insert(&row_of(&m));
        }
        if lower.rank() < basis.rank() {
            return Err(Error::TruncationTooSmall(format!(
                "the coefficient space of the b_j grows at degree {d}"
            )));
        }
    }

    // M[p][q] = b_p at (α_q, k_q); choose d rows p with a nonzero minor
    let full: Matrix = (0..b.len())
        .map(|p| rows.iter().map(|m| b[p].coeff(m)).collect())
        .collect();
    let mut col_basis = EchelonBasis::new(field);
    let mut columns = Vec::new();
    for (p, row) in full.iter().enumerate() {
        if columns.len() == rows.len() {
            break;
        }
        if col_basis.insert(row) {
            columns.push(p);
        }
    }
    let minor: Matrix = columns.iter().map(|&p| full[p].clone()).collect();
    let dim = rows.len();
    let transposed: Matrix = (0..dim)
        .map(|q| (0..dim).map(|p| minor[p][q].clone()).collect())
        .collect();
    let inv = inverse(field, &transposed).expect("selected minor is nonzero");

    let m_det = field.valuation(&det(field, &minor));
    let mut l_proof = NormValue::zero();
    for i in 0..dim {
        for (j, row) in rows.iter().enumerate() {
            let mij = field.valuation(&det(field, &minor_matrix(&minor, i, j)));
            let candidate = mij.div(&(&m_det * &rho.monomial(&row.exponent)));
            l_proof = l_proof.max(candidate);
        }
    }
    Ok(Selection {
        rows,
        columns,
        inv,
        l_proof,
    })
}

fn check_homogeneous(c: &SPoly<JetVector>, e: u32, ring: &JetRing, rank: usize, ns: usize) -> Result<()> {
    for (beta, v) in c {
        if beta.len() != ns {
            return Err(Error::VariableMismatch(format!(
                "s-exponent of length {} for {ns} s-variables",
                beta.len()
            )));
        }
        if beta.degree() != e {
            return Err(Error::InvalidInput(format!(
                "right-hand side is not homogeneous of degree {e} in s"
            )));
        }
        ring.check_same(v.ring())?;
        if v.rank() != rank {
            return Err(Error::VariableMismatch("right-hand side has the wrong rank".into()));
        }
    }
    Ok(())
}

struct ReducedSolution {
    y: Vec<SPoly<Scalar>>,
    selection: Selection,
}

/// Solves `Σ b_j y_j = C` with `y_j ∈ K[s]` by Cramer's rule on a fixed
/// nonzero minor.
fn solve_reduced(
    b: &[JetVector],
    c: &SPoly<JetVector>,
    ring: &JetRing,
    rank: usize,
    rho: &RadiusVector,
) -> Result<ReducedSolution> {
    let field = ring.field();
    let selection = select_rows(b, ring, rank, rho)?;
    let mut y: Vec<SPoly<Scalar>> = vec![BTreeMap::new(); b.len()];
    for (beta, cb) in c {
        if cb.is_zero() {
            continue;
        }
        if selection.rows.is_empty() {
            return Err(Error::RankDeficientInput);
        }
        let rhs: Vec<Scalar> = selection.rows.iter().map(|m| cb.coeff(m)).collect();
        let mut sum = JetVector::zero(ring, rank);
        for (p, &col) in selection.columns.iter().enumerate() {
            let mut v = field.zero();
            for (q, r) in rhs.iter().enumerate() {
                v = &v + &(&selection.inv[p][q] * r);
            }
            if !v.is_zero() {
                sum += &b[col].scale(&v);
                y[col].insert(beta.clone(), v);
            }
        }
        if !sum.same_terms(cb) {
            return Err(Error::Inconsistent(format!(
                "no solution for the coefficient of s^{:?}",
                beta.entries()
            )));
        }
    }
    Ok(ReducedSolution { y, selection })
}

/// The case `r = 0`: `Σ b_j y_j = C` with `y_j` homogeneous in `s`.
///
/// `L_proof = max_{i,j} |M_ij| / (ρ^{α_j}|M|)` over the chosen minor `M`;
/// the reported `L` is twice that.
pub fn cartan_solve_r0(
    b: &[JetVector],
    c: &SPoly<JetVector>,
    s_vars: &[String],
    degree: u32,
    rho: &RadiusVector,
    tau: &RadiusVector,
) -> Result<CartanSolution> {
    let first = b
        .first()
        .ok_or_else(|| Error::InvalidInput("no coefficient vectors b".into()))?;
    let problem = CartanProblem {
        ring: first.ring().clone(),
        rank: first.rank(),
        a: Vec::new(),
        b: b.to_vec(),
        s_vars: s_vars.to_vec(),
        degree,
        c: c.clone(),
        rho: rho.clone(),
        tau: tau.clone(),
        witness: None,
    };
    cartan_solve(&problem)
}

fn validate(p: &CartanProblem) -> Result<()> {
    for v in p.a.iter().chain(&p.b) {
        p.ring.check_same(v.ring())?;
        if v.rank() != p.rank {
            return Err(Error::VariableMismatch("coefficient vectors of different rank".into()));
        }
    }
    if p.rho.len() != p.ring.nvars() {
        return Err(Error::InvalidInput("ρ has the wrong dimension".into()));
    }
    if p.tau.len() != p.s_vars.len() {
        return Err(Error::InvalidInput("τ has the wrong dimension".into()));
    }
    check_homogeneous(&p.c, p.degree, &p.ring, p.rank, p.s_vars.len())
}

/// `Σ a_i z_i + Σ b_j y_j − C`, per `s`-monomial.
fn residual(
    p: &CartanProblem,
    z: &[SPoly<Jet>],
    y: &[SPoly<Scalar>],
) -> SPoly<JetVector> {
    let mut out: SPoly<JetVector> = BTreeMap::new();
    let zero = || JetVector::zero(&p.ring, p.rank);
    for (ai, zi) in p.a.iter().zip(z) {
        for (beta, c) in zi {
            *out.entry(beta.clone()).or_insert_with(zero) += &ai.mul_jet(c);
        }
    }
    for (bj, yj) in p.b.iter().zip(y) {
        for (beta, c) in yj {
            *out.entry(beta.clone()).or_insert_with(zero) += &bj.scale(c);
        }
    }
    for (beta, c) in &p.c {
        *out.entry(beta.clone()).or_insert_with(zero) -= c;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn check_degrees<T>(polys: &[SPoly<T>], e: u32) -> bool {
    polys.iter().all(|p| p.keys().all(|b| b.degree() == e))
}

/// Cartan's solver for arbitrary `r`.
///
/// With `r > 0` a standard basis `f_ν = Σ h_νi a_i` of `V = ⟨a⟩` is computed,
/// `b_j` and `C` are divided by it (`ε = 1/2`), the reduced system
/// `Σ NF(b_j) y_j = NF(C)` is solved as for `r = 0`, and
/// `z_i = −Σ_j α_ij y_j + β_i` with `α_ij = Σ_ν b_jν h_νi`,
/// `β_i = Σ_ν h_νi C_ν`. The constants are
/// `L_h = 2m·max ‖h_νi‖_ρ/‖LT(f_ν)‖_ρ`, `L' = L_h(2L_0 Σ_j‖b_j‖_ρ + 1)` and
/// `L_proof = max(2L_0, L')`.
pub fn cartan_solve(p: &CartanProblem) -> Result<CartanSolution> {
    validate(p)?;
    if let Some(w) = &p.witness {
        if w.z.len() != p.a.len() || w.y.len() != p.b.len() {
            return Err(Error::InvalidInput("witness has the wrong shape".into()));
        }
        if !residual(p, &w.z, &w.y).is_empty() || !check_degrees(&w.z, p.degree) || !check_degrees(&w.y, p.degree) {
            return Err(Error::InvalidInput("witness does not solve the system".into()));
        }
    }
    let polynomial = p.a.iter().chain(&p.b).all(JetVector::is_exact)
        && p.c.values().all(JetVector::is_exact);
    let field = p.ring.field();
    let two = NormValue::new(BigRational::from_integer(BigInt::from(2)));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    let nonzero_a: Vec<usize> = (0..p.a.len()).filter(|&i| !p.a[i].is_zero()).collect();
    let (z, y, rho, l0, l_proof, selection, mut certified) = if nonzero_a.is_empty() {
        let reduced = solve_reduced(&p.b, &p.c, &p.ring, p.rank, &p.rho)?;
        let l0 = reduced.selection.l_proof.clone();
        let z = vec![BTreeMap::new(); p.a.len()];
        (z, reduced.y, p.rho.clone(), l0.clone(), l0, reduced.selection, true)
    } else {
        let sb = std_basis(&p.a)?;
        let gens = sb.generators();
        let mut certified = sb.is_exact() && polynomial;
        let rho = if certified {
            match shrink_radius(gens, &half, &p.rho) {
                Ok(r) => r,
                Err(Error::NotCertifiable(_)) => {
                    certified = false;
                    p.rho.clone()
                }
                Err(e) => return Err(e),
            }
        } else {
            p.rho.clone()
        };

        let mut nf_b = Vec::with_capacity(p.b.len());
        let mut b_quot: Vec<Vec<Jet>> = Vec::with_capacity(p.b.len());
        for bj in &p.b {
            let res = divide_with_epsilon(bj, gens, None)?;
            nf_b.push(res.remainder);
            b_quot.push(res.quotients);
        }
        let mut nf_c: SPoly<JetVector> = BTreeMap::new();
        let mut c_quot: SPoly<Vec<Jet>> = BTreeMap::new();
        for (beta, cb) in &p.c {
            let res = divide_with_epsilon(cb, gens, None)?;
            nf_c.insert(beta.clone(), res.remainder);
            c_quot.insert(beta.clone(), res.quotients);
        }

        let reduced = if nf_b.is_empty() {
            if nf_c.values().any(|v| !v.is_zero()) {
                return Err(Error::Inconsistent("C does not lie in ⟨a⟩".into()));
            }
            None
        } else {
            match solve_reduced(&nf_b, &nf_c, &p.ring, p.rank, &rho) {
                Ok(r) => Some(r),
                Err(Error::RankDeficientInput) => {
                    return Err(Error::Inconsistent("NF(C, ⟨a⟩) ≠ 0 but every NF(b_j, ⟨a⟩) vanishes".into()))
                }
                Err(e) => return Err(e),
            }
        };
        let y: Vec<SPoly<Scalar>> = reduced
            .as_ref()
            .map_or_else(Vec::new, |r| r.y.clone());

        // transcripts over the source list, which is exactly a
        let h = sb.transcript();
        let zero = Jet::zero(&p.ring);
        let mut z: Vec<SPoly<Jet>> = vec![BTreeMap::new(); p.a.len()];
        for i in 0..p.a.len() {
            let alpha: Vec<Jet> = b_quot
                .iter()
                .map(|qs| {
                    let mut acc = zero.clone();
                    for (q, hv) in qs.iter().zip(h) {
                        acc += &(q * &hv[i]);
                    }
                    acc
                })
                .collect();
            for (beta, qs) in &c_quot {
                let mut zi = zero.clone();
                for (q, hv) in qs.iter().zip(h) {
                    zi += &(&hv[i] * q);
                }
                for (aij, yj) in alpha.iter().zip(&y) {
                    if let Some(c) = yj.get(beta) {
                        zi -= &aij.scale(c);
                    }
                }
                if !zi.is_zero() {
                    z[i].insert(beta.clone(), zi);
                }
            }
        }

        let l0 = reduced
            .as_ref()
            .map_or_else(NormValue::zero, |r| r.selection.l_proof.clone());
        let m = gens.len();
        let mut lh = NormValue::zero();
        for (g, hv) in gens.iter().zip(h) {
            let lt = g.leading_data().expect("standard basis elements are nonzero").term.norm(&rho);
            for hvi in hv {
                lh = lh.max(hvi.norm(&rho).div(&lt));
            }
        }
        let lh = &NormValue::new(BigRational::from_integer(BigInt::from(2 * m))) * &lh;
        let sum_b: NormValue = p.b.iter().map(|bj| bj.norm(&rho)).sum();
        let l_prime = &lh * &(&(&(&two * &l0) * &sum_b) + &NormValue::one());
        let l_proof = (&two * &l0).max(l_prime);
        let selection = reduced.map_or_else(
            || Selection {
                rows: Vec::new(),
                columns: Vec::new(),
                inv: Vec::new(),
                l_proof: NormValue::zero(),
            },
            |r| r.selection,
        );
        (z, pad(y, p.b.len()), rho, l0, l_proof, selection, certified)
    };

    let l = &two * &l_proof;
    let identity_verified = residual(p, &z, &y).is_empty();
    let norm_c = norm_vector_poly(&p.c, &rho, &p.tau);
    let norm_z: Vec<NormValue> = z.iter().map(|zi| norm_jet_poly(zi, &rho, &p.tau)).collect();
    let norm_y: Vec<NormValue> = y
        .iter()
        .map(|yj| norm_scalar_poly(yj, field, &p.tau))
        .collect();
    let bound = &l * &norm_c;
    certified &= polynomial;
    let bounds_hold = norm_z.iter().chain(&norm_y).all(|v| *v <= bound);
    Ok(CartanSolution {
        x_vars: p.ring.vars().to_vec(),
        s_vars: p.s_vars.clone(),
        z,
        y,
        rho,
        tau: p.tau.clone(),
        l,
        l_proof,
        l0,
        selected_rows: selection.rows,
        selected_columns: selection.columns,
        norm_c,
        norm_z,
        norm_y,
        identity_verified,
        bounds_verified: certified && identity_verified && bounds_hold,
    })
}

fn pad(mut y: Vec<SPoly<Scalar>>, t: usize) -> Vec<SPoly<Scalar>> {
    y.resize(t, BTreeMap::new());
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::parse::parse_vector;

    fn setup() -> (JetRing, JetRing) {
        let x = JetRing::new(FieldSpec::Rational, &["x"], 4).unwrap();
        let xs = JetRing::new(FieldSpec::Rational, &["x", "s"], 8).unwrap();
        (x, xs)
    }

    fn problem(a: &[&str], b: &[&str], c: &str, e: u32) -> CartanProblem {
        let (x, xs) = setup();
        CartanProblem {
            ring: x.clone(),
            rank: 1,
            a: a.iter().map(|t| parse_vector(t, &x).unwrap()).collect(),
            b: b.iter().map(|t| parse_vector(t, &x).unwrap()).collect(),
            s_vars: vec!["s".into()],
            degree: e,
            c: split_s(&parse_vector(c, &xs).unwrap(), &x),
            rho: RadiusVector::from_ratios(&[(1, 2)]).unwrap(),
            tau: RadiusVector::from_ratios(&[(1, 2)]).unwrap(),
            witness: None,
        }
    }

    #[test]
    fn r0_needs_x_free_right_hand_side() {
        let p = problem(&[], &["1"], "s*x", 1);
        assert!(matches!(cartan_solve(&p), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn r0_two_by_two_cramer() {
        let p = problem(&[], &["1 + x", "x"], "s", 1);
        let sol = cartan_solve(&p).unwrap();
        assert_eq!(sol.y_text(0), "(1)*s");
        assert_eq!(sol.y_text(1), "(-1)*s");
        assert!(sol.identity_verified && sol.bounds_verified);
        assert_eq!(sol.selected_columns, vec![0, 1]);
    }

    #[test]
    fn r0_single_equation() {
        let p = problem(&[], &["1"], "3*s^2", 2);
        let sol = cartan_solve(&p).unwrap();
        assert_eq!(sol.y_text(0), "(3)*s^2");
        assert_eq!(sol.norm_y[0], NormValue::from_ratio(3, 4));
        assert!(sol.bounds_verified);
    }

    #[test]
    fn r0_all_zero_b_with_nonzero_c() {
        let p = problem(&[], &["0"], "s", 1);
        assert_eq!(cartan_solve(&p), Err(Error::RankDeficientInput));
    }

    #[test]
    fn r_positive_examples() {
        let sol = cartan_solve(&problem(&["x"], &["1"], "s*x", 1)).unwrap();
        assert_eq!(sol.z_text(0), "(1)*s");
        assert!(sol.y[0].is_empty());
        assert!(sol.bounds_verified);

        let sol = cartan_solve(&problem(&["x"], &["1"], "s + s*x", 1)).unwrap();
        assert_eq!(sol.z_text(0), "(1)*s");
        assert_eq!(sol.y_text(0), "(1)*s");
        assert!(sol.bounds_verified);

        let sol = cartan_solve(&problem(&["x"], &["1"], "0", 1)).unwrap();
        assert!(sol.z[0].is_empty() && sol.y[0].is_empty());
    }

    #[test]
    fn witness_is_checked() {
        let (x, _) = setup();
        let mut p = problem(&["x"], &["1"], "s*x", 1);
        let s1 = Exponent::new(vec![1]);
        p.witness = Some(CartanWitness {
            z: vec![BTreeMap::from([(s1.clone(), Jet::one(&x))])],
            y: vec![BTreeMap::new()],
        });
        assert!(cartan_solve(&p).is_ok());
        p.witness = Some(CartanWitness {
            z: vec![BTreeMap::from([(s1, Jet::variable(&x, 0))])],
            y: vec![BTreeMap::new()],
        });
        assert!(matches!(cartan_solve(&p), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn inhomogeneous_right_hand_side_is_rejected() {
        let p = problem(&[], &["1"], "s + s^2", 1);
        assert!(matches!(cartan_solve(&p), Err(Error::InvalidInput(_))));
    }
}
