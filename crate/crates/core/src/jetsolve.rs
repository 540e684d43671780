//! Order-by-order solution of nested systems `F(x, s, y(s), z(x, s)) = 0`.
//!
//! A state of order `e` solves the system modulo `⟨s⟩^{e+1}` (and modulo
//! `m^{D+1}` in the combined variables `(x, s)`, since everything is stored
//! as jets of total degree `≤ D`). [`extend_order`] asks an
//! [`ExtensionOracle`] for corrections `(u, v)` that kill the residual of
//! `s`-degree `e + 1`, and checks that the result solves to order `e + 1`.
//!
//! Three instantiations are provided: right equivalence of jets
//! ([`jet_right_equiv`]), induction of unfoldings from a semiuniversal one
//! ([`induce_unfolding`]) and induction of deformations of complete
//! intersections ([`induce_deformation`]).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::cartan::{cartan_solve, split_s, CartanProblem, SPoly};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, NormValue, Scalar};
use crate::linalg::{inverse, solve, Matrix};
use crate::series::{
    exponents_of_degree, exponents_up_to, fresh_names, Exponent, Jet, JetRing, JetVector,
    ModuleMonomial, RadiusVector,
};
use crate::singularity::{determinacy_bound, DeterminacyMode, DeterminacyReport, FamilyKind, VersalFamily};
use crate::standard_basis::{std_basis, StandardBasis};

/// The system `F = 0` over the ring `(x, s, Y, Z)` with an optional ideal
/// `I ⊆ K{s}` given by a standard basis over the ring of `s`.
#[derive(Debug, Clone)]
pub struct NestedProblem {
    pub ring: JetRing,
    pub nx: usize,
    pub ns: usize,
    pub p: usize,
    pub q: usize,
    pub equations: Vec<Jet>,
    pub ideal: Option<StandardBasis>,
}

impl NestedProblem {
    pub fn new(
        ring: JetRing,
        (nx, ns, p, q): (usize, usize, usize, usize),
        equations: Vec<Jet>,
        ideal: Option<StandardBasis>,
    ) -> Result<Self> {
        if nx + ns + p + q != ring.nvars() {
            return Err(Error::VariableMismatch(format!(
                "{} variables do not split as {nx} + {ns} + {p} + {q}",
                ring.nvars()
            )));
        }
        if equations.is_empty() {
            return Err(Error::InvalidInput("no equations".into()));
        }
        for f in &equations {
            ring.check_same(f.ring())?;
        }
        let prob = NestedProblem {
            ring,
            nx,
            ns,
            p,
            q,
            equations,
            ideal,
        };
        if let Some(sb) = &prob.ideal {
            sb.ring().check_same(&prob.s_ring())?;
        }
        Ok(prob)
    }

    pub fn degree(&self) -> u32 {
        self.ring.degree()
    }

    fn sub_ring(&self, from: usize, to: usize) -> JetRing {
        JetRing::new(self.ring.field(), &self.ring.vars()[from..to], self.degree())
            .expect("names were validated")
    }

    /// The ring `(x, s)` carrying solutions and residuals.
    pub fn solution_ring(&self) -> JetRing {
        self.sub_ring(0, self.nx + self.ns)
    }

    pub fn x_ring(&self) -> JetRing {
        self.sub_ring(0, self.nx)
    }

    pub fn s_ring(&self) -> JetRing {
        self.sub_ring(self.nx, self.nx + self.ns)
    }
}

/// `y_i ∈ K[s]` and `z_j ∈ K{x}[s]`, both stored over the ring `(x, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedSolutionState {
    pub degree: u32,
    pub y: Vec<Jet>,
    pub z: Vec<Jet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    /// The `s`-degree `e + 1` treated in this step.
    pub degree: u32,
    pub residual: Vec<Jet>,
    pub u: Vec<Jet>,
    pub v: Vec<Jet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExtensionTrace {
    pub records: Vec<TraceRecord>,
}

/// Corrections `y ← y + u`, `z ← z + v` over the ring `(x, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correction {
    pub u: Vec<Jet>,
    pub v: Vec<Jet>,
}

pub struct ExtensionContext<'a> {
    pub problem: &'a NestedProblem,
    pub state: &'a NestedSolutionState,
    /// The part of `s`-degree `e + 1` of the reduced residual, per equation.
    pub residual: &'a [Jet],
}

/// Produces the corrections of one extension step.
pub trait ExtensionOracle {
    fn extend(&mut self, ctx: &ExtensionContext<'_>) -> Result<Correction>;
}

fn s_degree(e: &Exponent, nx: usize) -> u32 {
    e.entries()[nx..].iter().sum()
}

/// Terms of `s`-degree exactly `k`.
pub fn s_part(f: &Jet, nx: usize, k: u32) -> Jet {
    let mut out = Jet::zero(f.ring());
    for (a, c) in f.terms() {
        if s_degree(a, nx) == k {
            out.add_term(a.clone(), c.clone());
        }
    }
    out
}

/// Least `s`-degree of a stored term.
pub fn s_order(f: &Jet, nx: usize) -> Option<u32> {
    f.terms().keys().map(|a| s_degree(a, nx)).min()
}

/// `f(x, 0)` over the ring of `x`.
fn at_s_zero(f: &Jet, x_ring: &JetRing) -> Jet {
    let nx = x_ring.nvars();
    let pos: Vec<usize> = (0..nx).collect();
    let mut out = Jet::zero(x_ring);
    for (a, c) in f.terms() {
        if s_degree(a, nx) == 0 {
            out.add_term(a.select(&pos), c.clone());
        }
    }
    out
}

/// Reduces every `x`-coefficient modulo `I`.
fn reduce_mod_ideal(f: &Jet, problem: &NestedProblem) -> Result<Jet> {
    let Some(sb) = &problem.ideal else {
        return Ok(f.clone());
    };
    let nx = problem.nx;
    let d = problem.degree();
    let n = nx + problem.ns;
    let s_ring = problem.s_ring();
    let x_pos: Vec<usize> = (0..nx).collect();
    let s_pos: Vec<usize> = (nx..n).collect();
    let mut groups: BTreeMap<Exponent, Jet> = BTreeMap::new();
    for (a, c) in f.terms() {
        groups
            .entry(a.select(&x_pos))
            .or_insert_with(|| Jet::zero(&s_ring))
            .add_term(a.select(&s_pos), c.clone());
    }
    let mut out = Jet::zero(f.ring());
    for (alpha, coeff) in groups {
        let cap = d - alpha.degree();
        let nf = sb.truncate(cap).normal_form(&JetVector::from_jet(coeff.truncate(cap)))?;
        for (b, c) in nf.comp(0).terms() {
            out.add_term(alpha.concat(b), c.clone());
        }
    }
    Ok(out.with_exact(f.is_exact()))
}

/// `NF_I(F(x, s, y, z))` over the ring `(x, s)`.
pub fn evaluate(problem: &NestedProblem, state: &NestedSolutionState) -> Result<Vec<Jet>> {
    if state.y.len() != problem.p || state.z.len() != problem.q {
        return Err(Error::NotASolution(format!(
            "expected {} y and {} z components",
            problem.p, problem.q
        )));
    }
    let sol = problem.solution_ring();
    let mut values: Vec<Jet> = (0..sol.nvars()).map(|i| Jet::variable(&sol, i)).collect();
    values.extend(state.y.iter().cloned());
    values.extend(state.z.iter().cloned());
    problem
        .equations
        .iter()
        .map(|f| reduce_mod_ideal(&f.substitute(&values, &sol)?, problem))
        .collect()
}

/// Checks nesting and that the residual vanishes to `s`-order `degree + 1`.
pub fn check_solution(problem: &NestedProblem, state: &NestedSolutionState) -> Result<Vec<Jet>> {
    let nx = problem.nx;
    for (i, y) in state.y.iter().enumerate() {
        if y.terms().keys().any(|a| a.entries()[..nx].iter().any(|&k| k > 0)) {
            return Err(Error::NotASolution(format!("y{} depends on x", i + 1)));
        }
    }
    let residual = evaluate(problem, state)?;
    for (i, r) in residual.iter().enumerate() {
        if let Some(o) = s_order(r, nx) {
            if o <= state.degree {
                return Err(Error::NotASolution(format!(
                    "equation {} has a residual of s-degree {o} at order {}",
                    i + 1,
                    state.degree
                )));
            }
        }
    }
    Ok(residual)
}

/// One extension step from order `e` to order `e + 1`.
pub fn extend_order(
    problem: &NestedProblem,
    state: &NestedSolutionState,
    oracle: &mut dyn ExtensionOracle,
    trace: &mut ExtensionTrace,
) -> Result<NestedSolutionState> {
    let residual = check_solution(problem, state)?;
    let e = state.degree;
    let nx = problem.nx;
    let sol = problem.solution_ring();
    let fe: Vec<Jet> = residual.iter().map(|r| s_part(r, nx, e + 1)).collect();
    let correction = if fe.iter().all(Jet::is_zero) {
        Correction {
            u: vec![Jet::zero(&sol); problem.p],
            v: vec![Jet::zero(&sol); problem.q],
        }
    } else {
        oracle.extend(&ExtensionContext {
            problem,
            state,
            residual: &fe,
        })?
    };
    let failure = |reason: String| Error::OracleFailure { degree: e + 1, reason };
    if correction.u.len() != problem.p || correction.v.len() != problem.q {
        return Err(failure("correction has the wrong shape".into()));
    }
    let mut next = NestedSolutionState {
        degree: e + 1,
        y: Vec::with_capacity(problem.p),
        z: Vec::with_capacity(problem.q),
    };
    for (y, u) in state.y.iter().zip(&correction.u) {
        next.y.push(reduce_mod_ideal(&y.checked_add(u)?, problem)?);
    }
    for (z, v) in state.z.iter().zip(&correction.v) {
        next.z.push(reduce_mod_ideal(&z.checked_add(v)?, problem)?);
    }
    match check_solution(problem, &next) {
        Ok(_) => {}
        Err(Error::NotASolution(reason)) => return Err(failure(reason)),
        Err(err) => return Err(err),
    }
    trace.records.push(TraceRecord {
        degree: e + 1,
        residual: fe,
        u: correction.u,
        v: correction.v,
    });
    Ok(next)
}

/// Extends `state` until its order reaches `target`.
pub fn solve_to(
    problem: &NestedProblem,
    mut state: NestedSolutionState,
    oracle: &mut dyn ExtensionOracle,
    target: u32,
) -> Result<(NestedSolutionState, ExtensionTrace)> {
    let mut trace = ExtensionTrace::default();
    check_solution(problem, &state)?;
    while state.degree < target {
        state = extend_order(problem, &state, oracle, &mut trace)?;
    }
    Ok((state, trace))
}

/// `A_i = ∂F/∂Y_i` and `B_j = ∂F/∂Z_j` at `(x, 0, y(0), z(x, 0))`, as vectors
/// over the ring of `x`.
pub fn linearization(problem: &NestedProblem, state: &NestedSolutionState) -> Result<(Vec<JetVector>, Vec<JetVector>)> {
    let xr = problem.x_ring();
    let mut values: Vec<Jet> = (0..problem.nx).map(|i| Jet::variable(&xr, i)).collect();
    values.extend((0..problem.ns).map(|_| Jet::zero(&xr)));
    values.extend(state.y.iter().chain(&state.z).map(|j| at_s_zero(j, &xr)));
    let column = |pos: usize| -> Result<JetVector> {
        let comps = problem
            .equations
            .iter()
            .map(|f| f.derivative(pos).substitute(&values, &xr))
            .collect::<Result<Vec<_>>>()?;
        JetVector::new(comps)
    };
    let base = problem.nx + problem.ns;
    let a = (0..problem.p).map(|i| column(base + i)).collect::<Result<Vec<_>>>()?;
    let b = (0..problem.q)
        .map(|j| column(base + problem.p + j))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, b))
}

/// `−F_e` split by `s`-monomials, with `x`-parts truncated at `D − e − 1`.
fn right_hand_side(ctx: &ExtensionContext<'_>, cap: u32) -> Result<SPoly<JetVector>> {
    let xr = ctx.problem.x_ring().with_degree(cap);
    let v = JetVector::new(ctx.residual.iter().map(Jet::neg).collect())?;
    Ok(split_s(&v, &xr)
        .into_iter()
        .map(|(b, w)| (b, w.with_exact(true)))
        .filter(|(_, w)| !w.is_zero())
        .collect())
}

/// Assembles `Σ_ν c_ν(x) s^ν` over the ring `(x, s)`.
fn assemble(parts: &SPoly<Jet>, sol: &JetRing, nx: usize) -> Jet {
    let pos: Vec<usize> = (0..nx).collect();
    let mut out = Jet::zero(sol);
    for (nu, c) in parts {
        let shift = Exponent::zero(nx).concat(nu);
        out += &c.embed(sol, &pos).mul_term(&shift, &sol.one());
    }
    out.with_exact(true)
}

fn scalar_parts(parts: &SPoly<Scalar>, x_ring: &JetRing) -> SPoly<Jet> {
    parts
        .iter()
        .map(|(nu, c)| (nu.clone(), Jet::constant(x_ring, c.clone())))
        .collect()
}

#[derive(Debug, Clone)]
struct Linearized {
    a: Vec<JetVector>,
    b: Vec<JetVector>,
    /// Indices of the nonzero `b_j` and a standard basis of their span.
    b_index: Vec<usize>,
    basis: Option<StandardBasis>,
}

impl Linearized {
    fn new(problem: &NestedProblem, state: &NestedSolutionState) -> Result<Self> {
        let (a, b) = linearization(problem, state)?;
        let b_index: Vec<usize> = (0..b.len()).filter(|&j| !b[j].is_zero()).collect();
        let gens: Vec<JetVector> = b_index.iter().map(|&j| b[j].clone()).collect();
        let basis = if gens.is_empty() { None } else { Some(std_basis(&gens)?) };
        Ok(Linearized { a, b, b_index, basis })
    }
}

/// Solves the linearized equation `Σ u_i A_i + Σ v_j B_j = −F_e` by division:
/// the `u_i` come from the normal forms modulo `⟨B⟩`, the `v_j` from the
/// standard basis transcript.
#[derive(Debug, Clone, Default)]
pub struct LiftOracle {
    cache: Option<Linearized>,
}

impl ExtensionOracle for LiftOracle {
    fn extend(&mut self, ctx: &ExtensionContext<'_>) -> Result<Correction> {
        let problem = ctx.problem;
        if self.cache.is_none() {
            self.cache = Some(Linearized::new(problem, ctx.state)?);
        }
        let lin = self.cache.as_ref().expect("just set");
        let e = ctx.state.degree;
        let fail = |reason: &str| Error::OracleFailure {
            degree: e + 1,
            reason: reason.into(),
        };
        let cap = problem.degree() - e - 1;
        let xr = problem.x_ring().with_degree(cap);
        let rank = problem.equations.len();
        let field = xr.field();
        let basis = lin.basis.as_ref().map(|s| s.truncate(cap));
        let nf = |v: &JetVector| -> Result<JetVector> {
            match &basis {
                Some(s) => s.normal_form(v),
                None => Ok(v.clone()),
            }
        };
        let a: Vec<JetVector> = lin.a.iter().map(|v| v.truncate(cap)).collect();
        let nf_a = a.iter().map(&nf).collect::<Result<Vec<_>>>()?;
        let rows: Vec<ModuleMonomial> = exponents_up_to(xr.nvars(), cap)
            .into_iter()
            .flat_map(|e| (0..rank).map(move |u| ModuleMonomial::new(e.clone(), u)))
            .collect();
        let matrix: Matrix = rows
            .iter()
            .map(|m| nf_a.iter().map(|v| v.coeff(m)).collect())
            .collect();
        let mut u_parts: Vec<SPoly<Scalar>> = vec![BTreeMap::new(); problem.p];
        let mut v_parts: Vec<SPoly<Jet>> = vec![BTreeMap::new(); problem.q];
        for (nu, c) in right_hand_side(ctx, cap)? {
            let nf_c = nf(&c)?;
            let rhs: Vec<Scalar> = rows.iter().map(|m| nf_c.coeff(m)).collect();
            let u = if problem.p == 0 {
                if rhs.iter().any(|x| !x.is_zero()) {
                    return Err(fail("linearized system is inconsistent"));
                }
                Vec::new()
            } else {
                solve(field, &matrix, &rhs, problem.p).ok_or_else(|| fail("linearized system is inconsistent"))?
            };
            let mut rest = c.clone();
            for (ui, ai) in u.iter().zip(&a) {
                rest -= &ai.scale(ui);
            }
            let cof = match &basis {
                Some(s) => {
                    let (cof, r) = s.lift(&rest)?;
                    if !r.is_zero() {
                        return Err(fail("remainder survives the lift"));
                    }
                    cof
                }
                None if rest.is_zero() => Vec::new(),
                None => return Err(fail("remainder survives the lift")),
            };
            for (i, ui) in u.into_iter().enumerate() {
                if !ui.is_zero() {
                    u_parts[i].insert(nu.clone(), ui);
                }
            }
            for (k, c) in cof.into_iter().enumerate() {
                if !c.is_zero() {
                    v_parts[lin.b_index[k]].insert(nu.clone(), c);
                }
            }
        }
        let sol = problem.solution_ring();
        Ok(Correction {
            u: u_parts.iter().map(|p| assemble(&scalar_parts(p, &xr), &sol, problem.nx)).collect(),
            v: v_parts.iter().map(|p| assemble(p, &sol, problem.nx)).collect(),
        })
    }
}

/// Solves the linearized equation with the bounded linear solver and keeps
/// the constants it reports.
#[derive(Debug, Clone)]
pub struct CartanOracle {
    pub rho: RadiusVector,
    pub tau: RadiusVector,
    /// `(degree, L, bounds verified)` per nontrivial step.
    pub constants: Vec<(u32, NormValue, bool)>,
    cache: Option<Linearized>,
}

impl CartanOracle {
    pub fn new(rho: RadiusVector, tau: RadiusVector) -> Self {
        CartanOracle {
            rho,
            tau,
            constants: Vec::new(),
            cache: None,
        }
    }
}

impl ExtensionOracle for CartanOracle {
    fn extend(&mut self, ctx: &ExtensionContext<'_>) -> Result<Correction> {
        let problem = ctx.problem;
        if self.cache.is_none() {
            self.cache = Some(Linearized::new(problem, ctx.state)?);
        }
        let lin = self.cache.as_ref().expect("just set");
        let e = ctx.state.degree;
        let cap = problem.degree() - e - 1;
        let xr = problem.x_ring().with_degree(cap);
        let cp = CartanProblem {
            ring: xr.clone(),
            rank: problem.equations.len(),
            a: lin.b.iter().map(|v| v.truncate(cap)).collect(),
            b: lin.a.iter().map(|v| v.truncate(cap)).collect(),
            s_vars: problem.s_ring().vars().to_vec(),
            degree: e + 1,
            c: right_hand_side(ctx, cap)?,
            rho: self.rho.clone(),
            tau: self.tau.clone(),
            witness: None,
        };
        let sol = match cartan_solve(&cp) {
            Ok(s) => s,
            Err(err @ (Error::Inconsistent(_) | Error::RankDeficientInput)) => {
                return Err(Error::OracleFailure {
                    degree: e + 1,
                    reason: err.to_string(),
                })
            }
            Err(err) => return Err(err),
        };
        self.constants.push((e + 1, sol.l.clone(), sol.bounds_verified));
        let ring = problem.solution_ring();
        Ok(Correction {
            u: sol.y.iter().map(|p| assemble(&scalar_parts(p, &xr), &ring, problem.nx)).collect(),
            v: sol.z.iter().map(|p| assemble(p, &ring, problem.nx)).collect(),
        })
    }
}

/// Which oracle drives an induction.
#[derive(Debug, Clone)]
pub enum OracleChoice {
    Lift,
    Cartan { rho: RadiusVector, tau: RadiusVector },
}

fn run_with(
    choice: &OracleChoice,
    problem: &NestedProblem,
    state: NestedSolutionState,
) -> Result<(NestedSolutionState, ExtensionTrace)> {
    let d = problem.degree();
    let out = match choice {
        OracleChoice::Lift => solve_to(problem, state, &mut LiftOracle::default(), d),
        OracleChoice::Cartan { rho, tau } => {
            solve_to(problem, state, &mut CartanOracle::new(rho.clone(), tau.clone()), d)
        }
    };
    out.map_err(|err| match err {
        Error::OracleFailure { degree, reason } => Error::LiftFailure(format!("degree {degree}: {reason}")),
        other => other,
    })
}

/// Corrections for `f(φ) = g`: the degree `e + 1` residual is written as
/// `Σ b_i ∂f/∂x_i` with `b_i ∈ m^{e−k+1}` and `φ_i ← φ_i − b_i`.
struct RightEquivalenceOracle {
    f: Jet,
    k: u32,
}

impl ExtensionOracle for RightEquivalenceOracle {
    fn extend(&mut self, ctx: &ExtensionContext<'_>) -> Result<Correction> {
        let e = ctx.state.degree;
        let ring = self.f.ring().clone();
        let n = ring.nvars();
        let top = e + 1;
        let ring_e = ring.with_degree(top);
        let power = top - self.k;
        let df: Vec<Jet> = (0..n).map(|i| self.f.derivative(i).truncate(top)).collect();
        let mut index = Vec::new();
        let mut gens = Vec::new();
        for gamma in exponents_of_degree(n, power) {
            for (i, d) in df.iter().enumerate() {
                let g = d.mul_term(&gamma, &ring.one());
                if !g.is_zero() {
                    index.push((gamma.clone(), i));
                    gens.push(JetVector::from_jet(g));
                }
            }
        }
        let hypothesis = || {
            Error::HypothesisFailure(format!(
                "the degree {top} residual is not in m^{power}·⟨∂f⟩"
            ))
        };
        if gens.is_empty() {
            return Err(hypothesis());
        }
        let sb = std_basis(&gens)?;
        let r = JetVector::from_jet(ctx.residual[0].truncate(top));
        let (cof, rem) = sb.lift(&r)?;
        if !rem.is_zero() {
            return Err(hypothesis());
        }
        let mut b = vec![Jet::zero(&ring_e); n];
        for ((gamma, i), c) in index.iter().zip(&cof) {
            b[*i] += &c.mul_term(gamma, &ring.one());
        }
        if b.iter().any(|bi| bi.order().is_some_and(|o| o < power)) {
            return Err(Error::HypothesisFailure(format!(
                "a lifted coefficient at degree {top} has order below {power}"
            )));
        }
        Ok(Correction {
            u: b.iter().map(|bi| bi.truncate(ring.degree()).with_exact(true).neg()).collect(),
            v: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightEquivalence {
    /// `x_i ↦ φ_i(x)` with `f(φ) ≡ g mod m^{D+1}`.
    pub phi: Vec<Jet>,
    pub determinacy: Option<DeterminacyReport>,
    pub trace: ExtensionTrace,
    pub verified: bool,
}

/// A coordinate change `φ` with identity linear part and `f(φ) ≡ g` mod
/// `m^{D+1}`, for `g − f ∈ m^{N+1}` with `N` the right determinacy bound of `f`.
pub fn jet_right_equiv(f: &Jet, g: &Jet) -> Result<RightEquivalence> {
    f.ring().check_same(g.ring())?;
    let ring = f.ring().clone();
    let n = ring.nvars();
    let d = ring.degree();
    for h in [f, g] {
        if h.order().is_some_and(|o| o < 2) {
            return Err(Error::OrderTooLow);
        }
    }
    let identity: Vec<Jet> = (0..n).map(|i| Jet::variable(&ring, i)).collect();
    let diff = f.checked_sub(g)?;
    if diff.is_zero() {
        return Ok(RightEquivalence {
            phi: identity,
            determinacy: None,
            trace: ExtensionTrace::default(),
            verified: true,
        });
    }
    let report = match determinacy_bound(f, DeterminacyMode::Right) {
        Ok(r) => r,
        Err(Error::NotDetectable(w)) => {
            return Err(Error::HypothesisFailure(format!(
                "f is not finitely determined below degree {w}"
            )))
        }
        Err(err) => return Err(err),
    };
    let bound = report.bound;
    if diff.order().is_some_and(|o| o <= bound) {
        return Err(Error::HypothesisFailure(format!("f − g does not lie in m^{}", bound + 1)));
    }
    let y_names = fresh_names("Y", n, ring.vars());
    let names: Vec<String> = ring.vars().iter().chain(&y_names).cloned().collect();
    let big = JetRing::new(ring.field(), &names, d)?;
    let s_pos: Vec<usize> = (0..n).collect();
    let y_pos: Vec<usize> = (n..2 * n).collect();
    let equation = f.embed(&big, &y_pos).checked_sub(&g.embed(&big, &s_pos))?;
    let problem = NestedProblem::new(big, (0, n, n, 0), vec![equation], None)?;
    let state = NestedSolutionState {
        degree: bound.min(d),
        y: identity,
        z: Vec::new(),
    };
    let mut oracle = RightEquivalenceOracle { f: f.clone(), k: report.k };
    let (state, trace) = solve_to(&problem, state, &mut oracle, d)?;
    let verified = f.substitute(&state.y, &ring)?.same_terms(g);
    Ok(RightEquivalence {
        phi: state.y,
        determinacy: Some(report),
        trace,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfoldingInduction {
    /// The ring `(x, t)`.
    pub ring: JetRing,
    pub phi: Vec<Jet>,
    pub big_phi: Vec<Jet>,
    pub alpha: Jet,
    pub trace: ExtensionTrace,
    pub verified: bool,
}

fn check_x_names(g_ring: &JetRing, x_ring: &JetRing) -> Result<()> {
    let nx = x_ring.nvars();
    if g_ring.field() != x_ring.field() || g_ring.nvars() < nx || g_ring.vars()[..nx] != *x_ring.vars() {
        return Err(Error::VariableMismatch(format!(
            "the family lives over ({}) but the input starts with ({})",
            x_ring.vars().join(","),
            g_ring.vars()[..nx.min(g_ring.nvars())].join(",")
        )));
    }
    Ok(())
}

/// Names `(x, t, groups…)` with every group made fresh.
fn extended_ring(base: &JetRing, groups: &[(&str, usize)]) -> Result<(JetRing, Vec<Vec<usize>>)> {
    let mut names: Vec<String> = base.vars().to_vec();
    let mut positions = Vec::new();
    for (prefix, count) in groups {
        let fresh = fresh_names(prefix, *count, &names);
        positions.push((names.len()..names.len() + count).collect());
        names.extend(fresh);
    }
    Ok((JetRing::new(base.field(), &names, base.degree())?, positions))
}

/// `φ, Φ, α` with `G(Φ(x, t), t) = F(x, φ(t)) + α(t)` mod `m^{D+1}`, for an
/// unfolding `G` of `f` and the semiuniversal unfolding `F` of `f`.
pub fn induce_unfolding(g: &Jet, family: &VersalFamily, oracle: &OracleChoice) -> Result<UnfoldingInduction> {
    if family.kind != FamilyKind::RightUnfolding || family.f.len() != 1 {
        return Err(Error::InvalidInput("expected a right unfolding of a single function".into()));
    }
    let g_ring = g.ring().clone();
    check_x_names(&g_ring, &family.x_ring)?;
    let nx = family.x_ring.nvars();
    let nt = g_ring.nvars() - nx;
    let np = family.parameters.len();
    let d = g_ring.degree();
    let xr = family.x_ring.with_degree(d);
    let w = d.min(family.x_ring.degree());
    if !at_s_zero(g, &xr).truncate(w).same_terms(&family.f[0].truncate(w)) {
        return Err(Error::NotAnUnfolding("G(x, 0) differs from f".into()));
    }
    let (big, pos) = extended_ring(&g_ring, &[("phi", np), ("alpha", 1), ("Phi", nx)])?;
    let (phi_pos, alpha_pos, z_pos) = (&pos[0], pos[1][0], &pos[2]);
    let mut g_pos: Vec<usize> = z_pos.clone();
    g_pos.extend(nx..nx + nt);
    let mut f_pos: Vec<usize> = (0..nx).collect();
    f_pos.extend(phi_pos.iter().copied());
    let equation = g.embed(&big, &g_pos).checked_sub(&family.family[0].embed(&big, &f_pos))?.checked_sub(&Jet::variable(&big, alpha_pos))?;
    let problem = NestedProblem::new(big, (nx, nt, np + 1, nx), vec![equation], None)?;
    let sol = problem.solution_ring();
    let state = NestedSolutionState {
        degree: 0,
        y: vec![Jet::zero(&sol); np + 1],
        z: (0..nx).map(|i| Jet::variable(&sol, i)).collect(),
    };
    let (state, trace) = run_with(oracle, &problem, state)?;
    let mut phi = state.y;
    let alpha = phi.pop().expect("alpha is the last component");
    let mut args: Vec<Jet> = state.z.clone();
    args.extend((nx..nx + nt).map(|i| Jet::variable(&sol, i)));
    let lhs = g.substitute(&args, &sol)?;
    let mut fargs: Vec<Jet> = (0..nx).map(|i| Jet::variable(&sol, i)).collect();
    fargs.extend(phi.iter().cloned());
    let rhs = &family.family[0].substitute(&fargs, &sol.with_degree(d))? + &alpha;
    let verified = lhs.same_terms(&rhs);
    Ok(UnfoldingInduction {
        ring: sol,
        phi,
        big_phi: state.z,
        alpha,
        trace,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeformationInduction {
    /// The ring `(x, s)`.
    pub ring: JetRing,
    pub phi: Vec<Jet>,
    pub big_phi: Vec<Jet>,
    /// `M(x, s)` row by row.
    pub m: Vec<Vec<Jet>>,
    pub trace: ExtensionTrace,
    pub verified: bool,
}

/// `φ, Φ, M` with `G(Φ(x, s), s) = M(x, s)·F(x, φ(s))` mod `m^{D+1}`, for a
/// deformation `G` of `f` with `G(x, 0) = M₀ f` (`M₀` constant, identity by
/// default) and the semiuniversal deformation `F` of `f`.
///
/// The unknown matrix is written `M₀(I + M')`; its entries come before `Φ`
/// among the unknowns, so the division prefers matrix corrections over
/// coordinate changes when both solve a step.
pub fn induce_deformation(
    g: &[Jet],
    family: &VersalFamily,
    m0: Option<&Matrix>,
    oracle: &OracleChoice,
) -> Result<DeformationInduction> {
    if family.kind != FamilyKind::Deformation {
        return Err(Error::InvalidInput("expected a deformation family".into()));
    }
    let k = family.f.len();
    if g.len() != k {
        return Err(Error::NotADeformation(format!("{} components for {k} equations", g.len())));
    }
    let g_ring = g[0].ring().clone();
    for gi in g {
        g_ring.check_same(gi.ring())?;
    }
    check_x_names(&g_ring, &family.x_ring)?;
    let field = g_ring.field();
    let nx = family.x_ring.nvars();
    let ns = g_ring.nvars() - nx;
    let tau = family.parameters.len();
    let d = g_ring.degree();
    let m0: Matrix = match m0 {
        Some(m) => m.clone(),
        None => identity(field, k),
    };
    let m0_inv = inverse(field, &m0).ok_or_else(|| Error::NotADeformation("M₀ is not invertible".into()))?;
    let gt: Vec<Jet> = (0..k)
        .map(|a| {
            let mut acc = Jet::zero(&g_ring);
            for (b, gb) in g.iter().enumerate() {
                acc += &gb.scale(&m0_inv[a][b]);
            }
            acc
        })
        .collect();
    let xr = family.x_ring.with_degree(d);
    let w = d.min(family.x_ring.degree());
    for (a, (gi, fi)) in gt.iter().zip(&family.f).enumerate() {
        if !at_s_zero(gi, &xr).truncate(w).same_terms(&fi.truncate(w)) {
            return Err(Error::NotADeformation(format!("component {} of M₀⁻¹G(x, 0) differs from f", a + 1)));
        }
    }
    let (big, pos) = extended_ring(&g_ring, &[("phi", tau), ("M", k * k), ("Phi", nx)])?;
    let (phi_pos, m_pos, z_pos) = (&pos[0], &pos[1], &pos[2]);
    let mut g_pos: Vec<usize> = z_pos.clone();
    g_pos.extend(nx..nx + ns);
    let mut f_pos: Vec<usize> = (0..nx).collect();
    f_pos.extend(phi_pos.iter().copied());
    let fam: Vec<Jet> = family.family.iter().map(|fb| fb.embed(&big, &f_pos)).collect();
    let mut equations = Vec::with_capacity(k);
    for a in 0..k {
        let mut eq = gt[a].embed(&big, &g_pos).checked_sub(&fam[a])?;
        for (b, fb) in fam.iter().enumerate() {
            eq -= &(&Jet::variable(&big, m_pos[a * k + b]) * fb);
        }
        equations.push(eq);
    }
    let problem = NestedProblem::new(big, (nx, ns, tau, k * k + nx), equations, None)?;
    let sol = problem.solution_ring();
    let mut z = vec![Jet::zero(&sol); k * k];
    z.extend((0..nx).map(|i| Jet::variable(&sol, i)));
    let state = NestedSolutionState {
        degree: 0,
        y: vec![Jet::zero(&sol); tau],
        z,
    };
    let (state, trace) = run_with(oracle, &problem, state)?;
    let big_phi = state.z[k * k..].to_vec();
    let inner: Vec<Vec<Jet>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let mut e = state.z[a * k + b].clone();
                    if a == b {
                        e += &Jet::one(&sol);
                    }
                    e
                })
                .collect()
        })
        .collect();
    let m: Vec<Vec<Jet>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let mut acc = Jet::zero(&sol);
                    for (c, row) in inner.iter().enumerate() {
                        acc += &row[b].scale(&m0[a][c]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut args = big_phi.clone();
    args.extend((nx..nx + ns).map(|i| Jet::variable(&sol, i)));
    let mut fargs: Vec<Jet> = (0..nx).map(|i| Jet::variable(&sol, i)).collect();
    fargs.extend(state.y.iter().cloned());
    let fvals = family
        .family
        .iter()
        .map(|fb| fb.substitute(&fargs, &sol))
        .collect::<Result<Vec<_>>>()?;
    let mut verified = true;
    for (a, ga) in g.iter().enumerate() {
        let lhs = ga.substitute(&args, &sol)?;
        let mut rhs = Jet::zero(&sol);
        for (b, fb) in fvals.iter().enumerate() {
            rhs += &(&m[a][b] * fb);
        }
        verified &= lhs.same_terms(&rhs);
    }
    Ok(DeformationInduction {
        ring: sol,
        phi: state.y,
        big_phi,
        m,
        trace,
        verified,
    })
}

fn identity(field: FieldSpec, k: usize) -> Matrix {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormTraceRow {
    pub degree: u32,
    pub residual: NormValue,
    pub u: Vec<NormValue>,
    pub v: Vec<NormValue>,
    /// Every correction is at most `L` times the residual.
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormTraceReport {
    pub rows: Vec<NormTraceRow>,
    pub bound: NormValue,
    pub all_within_bound: bool,
    pub first_violation: Option<u32>,
    /// `Σ_e max_i ‖u_i^{(e)}‖` at the halved radius `(ρ, τ/2)`.
    pub y_half_norm: NormValue,
    pub z_half_norm: NormValue,
    /// Both halved sums stay below `2L`.
    pub geometric_ok: bool,
}

/// Norms of residuals and corrections along a trace, measured at `(ρ, τ)`
/// on the ring `(x, s)`, compared with the constant `l`.
pub fn norm_trace(trace: &ExtensionTrace, rho: &RadiusVector, tau: &RadiusVector, l: &NormValue) -> Result<NormTraceReport> {
    let radius = rho.concat(tau);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let half_radius = rho.concat(&tau.scaled(&half)?);
    let norm = |j: &Jet, r: &RadiusVector| -> Result<NormValue> {
        if r.len() != j.ring().nvars() {
            return Err(Error::InvalidInput(format!(
                "radius has {} entries for {} variables",
                r.len(),
                j.ring().nvars()
            )));
        }
        Ok(j.norm(r))
    };
    let max_of = |js: &[Jet], r: &RadiusVector| -> Result<NormValue> {
        js.iter().try_fold(NormValue::zero(), |acc, j| Ok(acc.max(norm(j, r)?)))
    };
    let mut rows = Vec::new();
    let mut first_violation = None;
    let mut y_half = NormValue::zero();
    let mut z_half = NormValue::zero();
    for rec in &trace.records {
        let residual = rec.residual.iter().map(|j| norm(j, &radius)).sum::<Result<NormValue>>()?;
        let u = rec.u.iter().map(|j| norm(j, &radius)).collect::<Result<Vec<_>>>()?;
        let v = rec.v.iter().map(|j| norm(j, &radius)).collect::<Result<Vec<_>>>()?;
        let cap = l * &residual;
        let within_bound = u.iter().chain(&v).all(|x| *x <= cap);
        if !within_bound && first_violation.is_none() {
            first_violation = Some(rec.degree);
        }
        y_half += &max_of(&rec.u, &half_radius)?;
        z_half += &max_of(&rec.v, &half_radius)?;
        rows.push(NormTraceRow {
            degree: rec.degree,
            residual,
            u,
            v,
            within_bound,
        });
    }
    let two_l = l * &NormValue::from_ratio(2, 1);
    Ok(NormTraceReport {
        all_within_bound: first_violation.is_none(),
        first_violation,
        geometric_ok: y_half < two_l && z_half < two_l,
        y_half_norm: y_half,
        z_half_norm: z_half,
        bound: l.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_jet;
    use crate::singularity::{semiuniversal_deformation, semiuniversal_unfolding};

    fn q_ring(vars: &[&str], d: u32) -> JetRing {
        JetRing::new(FieldSpec::Rational, vars, d).unwrap()
    }

    #[test]
    fn single_linear_equation() {
        // F = Y1 − s1
        let ring = q_ring(&["s1", "Y1"], 4);
        let f = parse_jet("Y1 - s1", &ring).unwrap();
        let p = NestedProblem::new(ring, (0, 1, 1, 0), vec![f], None).unwrap();
        let sol = p.solution_ring();
        let s0 = NestedSolutionState {
            degree: 0,
            y: vec![Jet::zero(&sol)],
            z: vec![],
        };
        let mut trace = ExtensionTrace::default();
        let s1 = extend_order(&p, &s0, &mut LiftOracle::default(), &mut trace).unwrap();
        assert!(s1.y[0].same_terms(&parse_jet("s1", &sol).unwrap()));
    }

    #[test]
    fn nested_z_equation() {
        // F = Z − s·x
        let ring = q_ring(&["x", "s", "Z"], 4);
        let f = parse_jet("Z - s*x", &ring).unwrap();
        let p = NestedProblem::new(ring, (1, 1, 0, 1), vec![f], None).unwrap();
        let sol = p.solution_ring();
        let s0 = NestedSolutionState {
            degree: 0,
            y: vec![],
            z: vec![Jet::zero(&sol)],
        };
        let (st, _) = solve_to(&p, s0, &mut LiftOracle::default(), 4).unwrap();
        assert!(st.z[0].same_terms(&parse_jet("s*x", &sol).unwrap()));
    }

    #[test]
    fn not_a_solution_is_rejected() {
        let ring = q_ring(&["s1", "Y1"], 4);
        let f = parse_jet("Y1 - s1", &ring).unwrap();
        let p = NestedProblem::new(ring, (0, 1, 1, 0), vec![f], None).unwrap();
        let sol = p.solution_ring();
        let bad = NestedSolutionState {
            degree: 1,
            y: vec![Jet::zero(&sol)],
            z: vec![],
        };
        assert!(matches!(check_solution(&p, &bad), Err(Error::NotASolution(_))));
    }

    #[test]
    fn cubic_unfolding_is_induced() {
        let xr = q_ring(&["x"], 8);
        let fam = semiuniversal_unfolding(&parse_jet("x^3", &xr).unwrap()).unwrap();
        let g = parse_jet("x^3 + t*x^2", &q_ring(&["x", "t"], 8)).unwrap();
        let ind = induce_unfolding(&g, &fam, &OracleChoice::Lift).unwrap();
        assert!(ind.verified);
        assert!(ind.phi[0].same_terms(&parse_jet("-t^2/3", &ind.ring).unwrap()));
        assert!(ind.alpha.same_terms(&parse_jet("2*t^3/27", &ind.ring).unwrap()));
    }

    #[test]
    fn cubic_deformation_is_induced() {
        let xr = q_ring(&["x"], 6);
        let fam = semiuniversal_deformation(&[parse_jet("x^3", &xr).unwrap()]).unwrap();
        let ring = q_ring(&["x", "s"], 6);
        let g = parse_jet("(1 + s)*x^3", &ring).unwrap();
        let ind = induce_deformation(&[g], &fam, None, &OracleChoice::Lift).unwrap();
        assert!(ind.verified);
        assert!(ind.m[0][0].same_terms(&parse_jet("1 + s", &ind.ring).unwrap()));
        assert!(ind.phi.iter().all(Jet::is_zero));
        let g = parse_jet("x^3 + s", &ring).unwrap();
        let ind = induce_deformation(&[g], &fam, None, &OracleChoice::Lift).unwrap();
        assert!(ind.verified);
    }

    #[test]
    fn right_equivalence_of_a_perturbed_cusp() {
        let ring = q_ring(&["x", "y"], 8);
        let f = parse_jet("x^3 + y^3", &ring).unwrap();
        let g = parse_jet("x^3 + y^3 + x^2*y^2 + y^5", &ring).unwrap();
        let r = jet_right_equiv(&f, &g).unwrap();
        assert!(r.verified);
        let bad = parse_jet("x^3 + y^3 + x*y^2", &ring).unwrap();
        assert!(matches!(jet_right_equiv(&f, &bad), Err(Error::HypothesisFailure(_))));
        let h = parse_jet("x^2", &ring).unwrap();
        let h2 = parse_jet("x^2 + y^3", &ring).unwrap();
        assert!(matches!(jet_right_equiv(&h, &h2), Err(Error::HypothesisFailure(_))));
    }
}
