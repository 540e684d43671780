//! Invariants, determinacy, the splitting lemma and semiuniversal families
//! of isolated hypersurface and complete intersection singularities.
//!
//! Everything is computed at the jet level. For an exact polynomial `f` at
//! truncation `D` the working degree is `D`; for a truncated jet it is `D − 1`,
//! since the partial derivatives are only known modulo `m^D`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::jetsolve::{induce_unfolding, jet_right_equiv, OracleChoice};
use crate::linalg::{rank, Matrix};
use crate::series::{fresh_names, Exponent, Jet, JetRing, JetVector, ModuleMonomial};
use crate::standard_basis::{maximal_ideal_power, product_generators, std_basis, StandardBasis};

/// Degree up to which the jet `f` determines its derivatives.
pub fn working_degree(f: &Jet) -> u32 {
    let d = f.ring().degree();
    if f.is_exact() {
        d
    } else {
        d.saturating_sub(1)
    }
}

/// `∂f/∂x_1, …, ∂f/∂x_n` at the working degree of `f`.
pub fn partials(f: &Jet) -> Vec<Jet> {
    let w = working_degree(f);
    (0..f.ring().nvars()).map(|i| f.derivative(i).truncate(w)).collect()
}

/// Standard basis of the ideal generated by `gens`, ignoring generators that
/// vanish up to the truncation; `None` when nothing is left.
fn ideal_basis(gens: &[Jet]) -> Result<Option<StandardBasis>> {
    let vs: Vec<JetVector> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .cloned()
        .map(JetVector::from_jet)
        .collect();
    if vs.is_empty() {
        return Ok(None);
    }
    std_basis(&vs).map(Some)
}

/// `(dim, level)` for the quotient by a complete standard basis.
fn colength(sb: &Option<StandardBasis>) -> (Option<usize>, Option<u32>) {
    match sb {
        Some(s) if s.is_complete() => (s.quotient_monomials(false).dimension(), s.complete_level()),
        _ => (None, None),
    }
}

fn check_not_unit(f: &Jet) -> Result<()> {
    if f.constant_term().is_zero() {
        Ok(())
    } else {
        Err(Error::UnitInput)
    }
}

/// The Hessian `(∂²f/∂x_i∂x_j)(0)`. In characteristic 2 its diagonal
/// vanishes and it is the matrix of the alternating form of `f_2`.
pub fn hessian(f: &Jet) -> Matrix {
    let n = f.ring().nvars();
    let field = f.field();
    let mut h = vec![vec![field.zero(); n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let e = Exponent::unit(n, i).add(&Exponent::unit(n, j));
            let c = f.coeff(&e);
            *entry = if i == j { c.mul_int(2) } else { c };
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularityProfile {
    pub f: Jet,
    pub characteristic: u64,
    pub working_degree: u32,
    /// `ord(f)`; `None` when `f` vanishes up to the truncation.
    pub order: Option<u32>,
    /// `d(f) = min ord ∂f/∂x_i`; `None` when every partial vanishes.
    pub diff_order: Option<u32>,
    /// `μ = dim K{x}/⟨∂f⟩`; `None` when no power of `m` was detected in the
    /// Jacobian ideal below the working degree.
    pub milnor: Option<usize>,
    /// Least `k` with `m^k ⊆ ⟨∂f⟩`.
    pub milnor_level: Option<u32>,
    /// `τ = dim K{x}/⟨f, ∂f⟩`.
    pub tjurina: Option<usize>,
    pub tjurina_level: Option<u32>,
    pub hessian_rank: usize,
    pub corank: usize,
}

/// Orders, Milnor and Tjurina numbers and the Hessian rank of `f`.
pub fn profile(f: &Jet) -> Result<SingularityProfile> {
    check_not_unit(f)?;
    let w = working_degree(f);
    let fw = f.truncate(w);
    let df = partials(f);
    let diff_order = df.iter().filter_map(Jet::order).min();
    let (milnor, milnor_level) = colength(&ideal_basis(&df)?);
    let mut tj = df.clone();
    tj.push(fw.clone());
    let (tjurina, tjurina_level) = colength(&ideal_basis(&tj)?);
    let hessian_rank = rank(&hessian(f));
    Ok(SingularityProfile {
        f: f.clone(),
        characteristic: f.field().characteristic(),
        working_degree: w,
        order: fw.order(),
        diff_order,
        milnor,
        milnor_level,
        tjurina,
        tjurina_level,
        hessian_rank,
        corank: f.ring().nvars() - hessian_rank,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeterminacyMode {
    Right,
    Contact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterminacyReport {
    pub mode: DeterminacyMode,
    /// Least `k` with `m^{k+2} ⊆ m²⟨∂f⟩` (right) or
    /// `m^{k+2} ⊆ m⟨f⟩ + m²⟨∂f⟩` (contact).
    pub k: u32,
    /// `2k − d(f) + 1` (right) or `2k − ord(f) + 2` (contact).
    pub bound: u32,
    /// Least `k` with `m^{k+1} ⊆ m⟨∂f⟩²`, when detected; `f` is then right
    /// `k`-determined.
    pub squared_jacobian_k: Option<u32>,
    /// The smallest of the applicable bounds.
    pub best: u32,
    pub order: u32,
    pub diff_order: u32,
}

fn least_power(gens: &[Jet], from: u32, to: u32, shift: u32) -> Result<Option<u32>> {
    let Some(sb) = ideal_basis(gens)? else {
        return Ok(None);
    };
    for k in from..=to {
        if sb.contains_power(k + shift)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Finite determinacy degree of `f`, detected below the working degree.
pub fn determinacy_bound(f: &Jet, mode: DeterminacyMode) -> Result<DeterminacyReport> {
    check_not_unit(f)?;
    let w = working_degree(f);
    let ring = f.ring().with_degree(w);
    let fw = f.truncate(w);
    let df = partials(f);
    let d = df
        .iter()
        .filter_map(Jet::order)
        .min()
        .ok_or(Error::NotDetectable(w))?;
    let order = fw.order().ok_or(Error::NotDetectable(w))?;
    if w < 2 {
        return Err(Error::NotDetectable(w));
    }
    let mut gens = product_generators(&maximal_ideal_power(&ring, 2), &df);
    if mode == DeterminacyMode::Contact {
        gens.extend(product_generators(&maximal_ideal_power(&ring, 1), &[fw]));
    }
    let k = least_power(&gens, 0, w - 2, 2)?.ok_or(Error::NotDetectable(w))?;
    let bound = match mode {
        DeterminacyMode::Right => 2 * k + 1 - d,
        DeterminacyMode::Contact => 2 * k + 2 - order,
    };
    let squares = product_generators(&maximal_ideal_power(&ring, 1), &product_generators(&df, &df));
    let squared_jacobian_k = least_power(&squares, 0, w - 1, 1)?;
    let best = squared_jacobian_k.map_or(bound, |s| s.min(bound));
    Ok(DeterminacyReport {
        mode,
        k,
        bound,
        squared_jacobian_k,
        best,
        order,
        diff_order: d,
    })
}

/// Computes square roots and roots of quadratics in the ground field.
pub trait CoefficientHook {
    fn sqrt(&self, a: &Scalar) -> Option<Scalar>;
    /// A root `t` of `a t² + b t + c`.
    fn quadratic_root(&self, a: &Scalar, b: &Scalar, c: &Scalar) -> Option<Scalar>;
}

/// Roots found exactly: perfect rational squares over `Q` and `Q_p`, and
/// exhaustive search over `F_p` for `p ≤ 2^20`.
#[derive(Debug, Clone, Copy)]
pub struct ExactRoots {
    pub field: FieldSpec,
}

const SEARCH_LIMIT: u64 = 1 << 20;

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q < &BigRational::from_integer(BigInt::from(0)) {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

impl CoefficientHook for ExactRoots {
    fn sqrt(&self, a: &Scalar) -> Option<Scalar> {
        match self.field {
            FieldSpec::FiniteField { p } => {
                if p > SEARCH_LIMIT {
                    return None;
                }
                (0..p as i64).map(|t| self.field.from_i64(t)).find(|t| &(t * t) == a)
            }
            _ => {
                let q = rational_sqrt(a.as_rational()?)?;
                self.field.from_ratio(q.numer(), q.denom()).ok()
            }
        }
    }

    fn quadratic_root(&self, a: &Scalar, b: &Scalar, c: &Scalar) -> Option<Scalar> {
        match self.field {
            FieldSpec::FiniteField { p } => {
                if p > SEARCH_LIMIT {
                    return None;
                }
                (0..p as i64)
                    .map(|t| self.field.from_i64(t))
                    .find(|t| (&(&(a * t) + b) * t + c.clone()).is_zero())
            }
            _ => {
                if a.is_zero() {
                    return (-c).checked_div(b).ok();
                }
                let disc = b * b - a.mul_int(4) * c.clone();
                let r = self.sqrt(&disc)?;
                (&r - b).checked_div(&a.mul_int(2)).ok()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Char2Type {
    /// `x_1x_2 + … + x_{2l−1}x_{2l} + x_{2l+1}² + g`.
    A,
    /// `x_1x_2 + … + x_{2l−1}x_{2l} + g` with no square terms in `g`.
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitResult {
    pub f: Jet,
    pub characteristic: u64,
    /// Number of variables carried by the quadratic part (`k`, or `2l` in
    /// characteristic 2).
    pub rank: usize,
    /// `x_i ↦ φ_i(x)` with `f(φ) ≡ quadratic_part + residual mod m^{D+1}`.
    pub transform: Vec<Jet>,
    pub quadratic_part: Jet,
    /// A series in the variables after the first `rank`.
    pub residual: Jet,
    /// Coefficients of `x_i²` in the quadratic part, `i < rank`.
    pub coefficients: Vec<Scalar>,
    /// Characteristic 2: coefficients of `x_i²` in the residual, `i ≥ rank`.
    pub diagonal: Vec<Scalar>,
    pub char2_type: Option<Char2Type>,
    pub normalized: bool,
    pub verified: bool,
}

fn linear_substitution(ring: &JetRing, p: &Matrix) -> Vec<Jet> {
    let n = ring.nvars();
    (0..n)
        .map(|i| {
            let mut j = Jet::zero(ring);
            for (k, c) in p[i].iter().enumerate() {
                j.add_term(Exponent::unit(n, k), c.clone());
            }
            j
        })
        .collect()
}

fn identity_matrix(field: FieldSpec, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect()
}

/// Column operations on `P` mirrored as congruence on `A`.
struct Congruence {
    a: Matrix,
    p: Matrix,
}

impl Congruence {
    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        for row in self.a.iter_mut().chain(self.p.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// Column `i += c · column j`.
    fn add(&mut self, i: usize, j: usize, c: &Scalar) {
        let rj = self.a[j].clone();
        for (x, y) in self.a[i].iter_mut().zip(&rj) {
            *x += &(c * y);
        }
        for row in self.a.iter_mut().chain(self.p.iter_mut()) {
            let t = c * &row[j];
            row[i] += &t;
        }
    }
}

/// `P` with `Pᵀ Q P = diag(a_1, …, a_k, 0, …)` for the symmetric matrix of
/// `f_2` (characteristic ≠ 2).
fn diagonalize(field: FieldSpec, f: &Jet) -> (Matrix, Vec<Scalar>) {
    let n = f.ring().nvars();
    let half = field.one().checked_div(&field.from_i64(2)).expect("characteristic is not 2");
    let h = hessian(f);
    let q: Matrix = h.iter().map(|r| r.iter().map(|c| c * &half).collect()).collect();
    let mut g = Congruence {
        a: q,
        p: identity_matrix(field, n),
    };
    let mut diag = Vec::new();
    for r in 0..n {
        if g.a[r][r].is_zero() {
            if let Some(j) = (r + 1..n).find(|&j| !g.a[j][j].is_zero()) {
                g.swap(r, j);
            } else if let Some((i, j)) = (r..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !g.a[i][j].is_zero())
            {
                g.add(i, j, &field.one());
                g.swap(r, i);
            } else {
                break;
            }
        }
        let inv = g.a[r][r].inv().expect("pivot is nonzero");
        for j in r + 1..n {
            if !g.a[r][j].is_zero() {
                let c = -(&g.a[r][j] * &inv);
                g.add(j, r, &c);
            }
        }
        diag.push(g.a[r][r].clone());
    }
    (g.p, diag)
}

/// Symplectic basis of the alternating form of `f_2` in characteristic 2:
/// hyperbolic pairs first, then a basis of the radical, as columns of `P`.
fn symplectic(field: FieldSpec, f: &Jet) -> (Matrix, usize) {
    let n = f.ring().nvars();
    let b = hessian(f);
    let bil = |u: &[Scalar], v: &[Scalar]| -> Scalar {
        let mut acc = field.zero();
        for i in 0..n {
            for j in 0..n {
                if !b[i][j].is_zero() {
                    acc += &(&(&u[i] * &b[i][j]) * &v[j]);
                }
            }
        }
        acc
    };
    let mut pool = identity_matrix(field, n);
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    loop {
        let found = (0..pool.len())
            .flat_map(|i| (0..pool.len()).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && !bil(&pool[i], &pool[j]).is_zero());
        let Some((i, j)) = found else { break };
        let u = pool[i].clone();
        let inv = bil(&u, &pool[j]).inv().expect("nonzero pairing");
        let v: Vec<Scalar> = pool[j].iter().map(|c| c * &inv).collect();
        pool = pool
            .into_iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, w)| {
                let bv = bil(&w, &v);
                let bu = bil(&w, &u);
                w.iter()
                    .zip(u.iter().zip(&v))
                    .map(|(wk, (uk, vk))| wk - &(&bv * uk) + &bu * vk)
                    .collect()
            })
            .collect();
        cols.push(u);
        cols.push(v);
    }
    let pairs = cols.len();
    cols.extend(pool);
    let p = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    (p, pairs)
}

/// Terms of `f` in the first `k` variables only, moved into `target`.
fn restrict_to_leading(f: &Jet, k: usize, target: &JetRing) -> Jet {
    let pos: Vec<usize> = (0..k).collect();
    let mut out = Jet::zero(target);
    for (a, c) in f.terms() {
        if a.entries()[k..].iter().all(|&x| x == 0) {
            out.add_term(a.select(&pos), c.clone());
        }
    }
    out.with_exact(f.is_exact())
}

/// `x_i ↦ outer_i(inner(x))`.
pub fn compose(outer: &[Jet], inner: &[Jet]) -> Result<Vec<Jet>> {
    let ring = inner[0].ring().clone();
    outer.iter().map(|o| o.substitute(inner, &ring)).collect()
}

fn square_coefficient(f: &Jet, i: usize) -> Scalar {
    let n = f.ring().nvars();
    f.coeff(&Exponent::unit(n, i).add(&Exponent::unit(n, i)))
}

fn classify_char2(coefficients: &[Scalar], diagonal: &[Scalar]) -> Option<Char2Type> {
    if coefficients.iter().any(|c| !c.is_zero()) {
        return None;
    }
    if diagonal.iter().all(Scalar::is_zero) {
        return Some(Char2Type::B);
    }
    let first_is_one = diagonal.first().is_some_and(Scalar::is_one);
    (first_is_one && diagonal[1..].iter().all(Scalar::is_zero) ).then_some(Char2Type::A)
}

impl SplitResult {
    fn assemble(f: &Jet, rank: usize, transform: Vec<Jet>, quadratic: Jet, residual: Jet, normalized: bool) -> Result<Self> {
        let n = f.ring().nvars();
        let image = f.substitute(&transform, f.ring())?;
        let verified = image.same_terms(&(&quadratic + &residual));
        let characteristic = f.field().characteristic();
        let coefficients: Vec<Scalar> = (0..rank).map(|i| square_coefficient(&quadratic, i)).collect();
        let (diagonal, char2_type) = if characteristic == 2 {
            let d: Vec<Scalar> = (rank..n).map(|i| square_coefficient(&residual, i)).collect();
            let t = classify_char2(&coefficients, &d);
            (d, t)
        } else {
            (Vec::new(), None)
        };
        Ok(SplitResult {
            f: f.clone(),
            characteristic,
            rank,
            transform,
            quadratic_part: quadratic,
            residual,
            coefficients,
            diagonal,
            char2_type,
            normalized,
            verified,
        })
    }
}

/// The splitting lemma: a coordinate change taking `f ∈ m²` to a
/// nondegenerate quadratic form in the first `rank` variables plus a residual
/// in the remaining ones.
///
/// The quadratic part is brought into normal form by a linear change
/// (diagonal in characteristic ≠ 2, hyperbolic pairs in characteristic 2).
/// The restriction to the split variables is then moved onto the quadratic
/// form by a right equivalence, and `f` is induced from that form as an
/// unfolding with the remaining variables as parameters; the induced
/// constant term is the residual.
pub fn split(f: &Jet) -> Result<SplitResult> {
    check_not_unit(f)?;
    if f.order().is_some_and(|o| o < 2) {
        return Err(Error::OrderTooLow);
    }
    let ring = f.ring().clone();
    let field = ring.field();
    let n = ring.nvars();
    if ring.degree() < 2 {
        return Err(Error::TruncationTooSmall("splitting needs D ≥ 2".into()));
    }
    let (p, k) = if field.characteristic() == 2 {
        symplectic(field, f)
    } else {
        let (p, diag) = diagonalize(field, f);
        (p, diag.len())
    };
    let lin = linear_substitution(&ring, &p);
    let f1 = f.substitute(&lin, &ring)?;
    if k == 0 {
        return SplitResult::assemble(f, 0, lin, Jet::zero(&ring), f1, false);
    }
    let xr = JetRing::new(field, &ring.vars()[..k], ring.degree())?;
    let f_split = restrict_to_leading(&f1, k, &xr);
    let q = f_split.homogeneous_part(2).with_exact(true);
    let psi = jet_right_equiv(&f_split, &q)?.phi;
    let positions: Vec<usize> = (0..k).collect();
    let mut t2: Vec<Jet> = psi.iter().map(|j| j.embed(&ring, &positions)).collect();
    t2.extend((k..n).map(|i| Jet::variable(&ring, i)));
    let f2 = f1.substitute(&t2, &ring)?;
    let family = VersalFamily::trivial(&q, &xr);
    let ind = induce_unfolding(&f2, &family, &OracleChoice::Lift)?;
    let mut t3 = ind.big_phi.clone();
    t3.extend((k..n).map(|i| Jet::variable(&ring, i)));
    let transform = compose(&lin, &compose(&t2, &t3)?)?;
    let quadratic = q.embed(&ring, &positions);
    SplitResult::assemble(f, k, transform, quadratic, ind.alpha, false)
}

fn scaled_variable(ring: &JetRing, i: usize, c: &Scalar) -> Jet {
    Jet::monomial(ring, Exponent::unit(ring.nvars(), i), c.clone())
}

/// Normalizes the coefficients of a split form using `hook`: `a_i x_i² ↦ x_i²`
/// in characteristic ≠ 2; in characteristic 2 every hyperbolic pair becomes
/// `x_i x_{i+1}` and the squares of the residual are collected into a single
/// `x_{2l+1}²`.
pub fn normalize_coefficients(s: &SplitResult, hook: &dyn CoefficientHook) -> Result<SplitResult> {
    let ring = s.f.ring().clone();
    let n = ring.nvars();
    let field = ring.field();
    let one = field.one();
    let mut sub: Vec<Jet> = (0..n).map(|i| Jet::variable(&ring, i)).collect();
    if s.characteristic != 2 {
        for (i, a) in s.coefficients.iter().enumerate() {
            let r = hook
                .sqrt(a)
                .ok_or_else(|| Error::HookFailure(format!("no square root of {a}")))?;
            sub[i] = scaled_variable(&ring, i, &r.inv()?);
        }
    } else {
        for pair in 0..s.rank / 2 {
            let (i, j) = (2 * pair, 2 * pair + 1);
            let a = &s.coefficients[i];
            let b = &s.coefficients[j];
            if a.is_zero() {
                // x y + b y² = (x + b y) y
                sub[i] = &Jet::variable(&ring, i) + &scaled_variable(&ring, j, b);
            } else {
                let t = hook
                    .quadratic_root(a, &one, b)
                    .ok_or_else(|| Error::HookFailure(format!("{a}·t² + t + {b} has no root")))?;
                // x ↦ x + t y removes y², then y ↦ y + a x removes x²
                sub[i] = &scaled_variable(&ring, i, &(&one + &(a * &t))) + &scaled_variable(&ring, j, &t);
                sub[j] = &Jet::variable(&ring, j) + &scaled_variable(&ring, i, a);
            }
        }
        let l2 = s.rank;
        if let Some(j0) = (0..s.diagonal.len()).find(|&j| !s.diagonal[j].is_zero()) {
            let roots = s
                .diagonal
                .iter()
                .map(|d| hook.sqrt(d).ok_or_else(|| Error::HookFailure(format!("no square root of {d}"))))
                .collect::<Result<Vec<_>>>()?;
            let (j0, target) = (l2 + j0, l2);
            let inv = roots[j0 - l2].inv()?;
            let mut lead = Jet::variable(&ring, target);
            for v in l2..n {
                if v == j0 {
                    continue;
                }
                let coeff = &roots[v - l2];
                let source = if v == target { j0 } else { v };
                lead -= &scaled_variable(&ring, source, coeff);
            }
            sub[j0] = lead.scale(&inv);
            if j0 != target {
                sub[target] = Jet::variable(&ring, j0);
            }
        }
    }
    let transform = compose(&s.transform, &sub)?;
    let quadratic = s.quadratic_part.substitute(&sub, &ring)?;
    let residual = s.residual.substitute(&sub, &ring)?;
    let mut out = SplitResult::assemble(&s.f, s.rank, transform, quadratic, residual, true)?;
    if out.characteristic == 2 {
        out.char2_type = Some(if s.diagonal.iter().all(Scalar::is_zero) {
            Char2Type::B
        } else {
            Char2Type::A
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    RightUnfolding,
    Deformation,
}

/// `F(x, t) = f(x) + Σ_j t_j g_j(x)` with `k` components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersalFamily {
    pub kind: FamilyKind,
    pub x_ring: JetRing,
    /// The ring `(x, t)`.
    pub ring: JetRing,
    pub f: Vec<Jet>,
    pub parameters: Vec<String>,
    /// `g_j` of rank `k` over the ring of `x`.
    pub cofactors: Vec<JetVector>,
    pub family: Vec<Jet>,
    /// The `g_j` form a basis of the quotient they represent.
    pub minimal: bool,
}

impl VersalFamily {
    /// `f` itself as a family with no parameters.
    pub fn trivial(f: &Jet, x_ring: &JetRing) -> VersalFamily {
        VersalFamily {
            kind: FamilyKind::RightUnfolding,
            x_ring: x_ring.clone(),
            ring: x_ring.clone(),
            f: vec![f.clone()],
            parameters: Vec::new(),
            cofactors: Vec::new(),
            family: vec![f.clone()],
            minimal: true,
        }
    }

    fn build(kind: FamilyKind, f: &[Jet], basis: &[ModuleMonomial], prefix: &str) -> Result<VersalFamily> {
        let x_ring = f[0].ring().clone();
        let nx = x_ring.nvars();
        let k = f.len();
        let parameters = fresh_names(prefix, basis.len(), x_ring.vars());
        let names: Vec<String> = x_ring.vars().iter().chain(&parameters).cloned().collect();
        let ring = JetRing::new(x_ring.field(), &names, x_ring.degree())?;
        let x_pos: Vec<usize> = (0..nx).collect();
        let mut family: Vec<Jet> = f.iter().map(|fi| fi.embed(&ring, &x_pos)).collect();
        let mut cofactors = Vec::new();
        for (j, m) in basis.iter().enumerate() {
            cofactors.push(JetVector::term(&x_ring, k, m, x_ring.one()));
            let mut e = m.exponent.entries().to_vec();
            e.extend((0..basis.len()).map(|i| u32::from(i == j)));
            family[m.unit].add_term(Exponent::new(e), ring.one());
        }
        Ok(VersalFamily {
            kind,
            x_ring,
            ring,
            f: f.to_vec(),
            parameters,
            cofactors,
            family,
            minimal: true,
        })
    }

    pub fn cofactor_text(&self) -> Vec<String> {
        self.cofactors.iter().map(|g| g.to_string()).collect()
    }
}

impl Serialize for VersalFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("VersalFamily", 6)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("variables", self.x_ring.vars())?;
        st.serialize_field("parameters", &self.parameters)?;
        st.serialize_field("cofactors", &self.cofactor_text())?;
        st.serialize_field("family", &self.family.iter().map(|j| j.to_string()).collect::<Vec<_>>())?;
        st.serialize_field("minimal", &self.minimal)?;
        st.end()
    }
}

/// `F = f + Σ t_j g_j` with `g_j` the standard monomials of `m/⟨∂f⟩`.
pub fn semiuniversal_unfolding(f: &Jet) -> Result<VersalFamily> {
    check_not_unit(f)?;
    let sb = ideal_basis(&partials(f))?
        .ok_or_else(|| Error::NotIsolated("every partial derivative vanishes".into()))?;
    if !sb.is_complete() {
        return Err(Error::NotIsolated(format!(
            "no power of m lies in the Jacobian ideal below degree {}",
            working_degree(f)
        )));
    }
    let basis = sb.quotient_monomials(true).standard_monomials;
    VersalFamily::build(FamilyKind::RightUnfolding, &[f.clone()], &basis, "s")
}

/// Largest number of variables spanning no leading monomial: the Krull
/// dimension of `K[x]` modulo the monomial ideal.
fn monomial_dimension(n: usize, lms: &[Exponent]) -> usize {
    (0u32..1 << n)
        .filter(|mask| {
            lms.iter().all(|e| {
                e.entries()
                    .iter()
                    .enumerate()
                    .any(|(i, &x)| x > 0 && mask & (1 << i) == 0)
            })
        })
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

/// Semiuniversal deformation of the complete intersection `f_1 = … = f_k = 0`:
/// `F = f + Σ t_j g_j` with `g_j` the standard monomials of
/// `T¹ = K{x}^k / (⟨∂f/∂x_j⟩ + ⟨f_i e_l⟩)`.
///
/// The complete intersection property is checked through the dimension of
/// the leading ideal of `⟨f⟩` at the working degree, which bounds the Krull
/// dimension from above and must equal `n − k`.
pub fn semiuniversal_deformation(f: &[Jet]) -> Result<VersalFamily> {
    let first = f.first().ok_or_else(|| Error::InvalidInput("no equations".into()))?;
    let ring = first.ring().clone();
    for fi in f {
        ring.check_same(fi.ring())?;
        check_not_unit(fi)?;
    }
    let n = ring.nvars();
    let k = f.len();
    if k > n {
        return Err(Error::NotCompleteIntersection(format!("{k} equations in {n} variables")));
    }
    let w = f.iter().map(working_degree).min().unwrap_or(0);
    let fw: Vec<Jet> = f.iter().map(|fi| fi.truncate(w)).collect();
    let ideal = ideal_basis(&fw)?
        .ok_or_else(|| Error::NotCompleteIntersection("every equation vanishes".into()))?;
    let lms: Vec<Exponent> = ideal.leading_module().iter().map(|m| m.exponent.clone()).collect();
    let dim = monomial_dimension(n, &lms);
    if dim != n - k {
        return Err(Error::NotCompleteIntersection(format!(
            "dimension estimate {dim} differs from n − k = {}",
            n - k
        )));
    }
    let mut gens = Vec::new();
    for j in 0..n {
        let col: Vec<Jet> = f.iter().map(|fi| fi.derivative(j).truncate(w)).collect();
        gens.push(JetVector::new(col)?);
    }
    for fi in &fw {
        for l in 0..k {
            let mut comps = vec![Jet::zero(&fi.ring().clone()); k];
            comps[l] = fi.clone();
            gens.push(JetVector::new(comps)?);
        }
    }
    gens.retain(|g| !g.is_zero());
    if gens.is_empty() {
        return Err(Error::NotIsolated("no tangent directions".into()));
    }
    let sb = std_basis(&gens)?;
    if !sb.is_complete() {
        return Err(Error::NotIsolated(format!("T¹ is not finite below degree {w}")));
    }
    let basis = sb.quotient_monomials(false).standard_monomials;
    VersalFamily::build(FamilyKind::Deformation, f, &basis, "t")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_jet;

    fn jet(text: &str, vars: &[&str], field: FieldSpec, d: u32) -> Jet {
        parse_jet(text, &JetRing::new(field, vars, d).unwrap()).unwrap()
    }

    #[test]
    fn a_k_and_e_6_invariants() {
        for k in 1..=5u32 {
            let f = jet(&format!("x^{} + y^2", k + 1), &["x", "y"], FieldSpec::Rational, 8);
            assert_eq!(profile(&f).unwrap().milnor, Some(k as usize));
        }
        let p = profile(&jet("x^3 + y^4", &["x", "y"], FieldSpec::Rational, 8)).unwrap();
        assert_eq!((p.milnor, p.tjurina), (Some(6), Some(6)));
        let p = profile(&jet("x^2 + y^2 + z^2", &["x", "y", "z"], FieldSpec::Rational, 4)).unwrap();
        assert_eq!((p.milnor, p.hessian_rank, p.corank), (Some(1), 3, 0));
    }

    #[test]
    fn char_p_derivative_vanishing() {
        let p = profile(&jet("x^3", &["x"], FieldSpec::finite(3).unwrap(), 6)).unwrap();
        assert_eq!(p.diff_order, None);
        assert_eq!(p.milnor, None);
        assert_eq!(p.tjurina, Some(3));
    }

    #[test]
    fn determinacy_examples() {
        let r = determinacy_bound(&jet("x^3 + y^3", &["x", "y"], FieldSpec::Rational, 8), DeterminacyMode::Right).unwrap();
        assert_eq!((r.k, r.bound, r.best), (2, 3, 3));
        let r = determinacy_bound(&jet("x^2", &["x"], FieldSpec::Rational, 6), DeterminacyMode::Right).unwrap();
        assert_eq!(r.bound, 2);
        let e = determinacy_bound(&jet("x^2", &["x", "y"], FieldSpec::Rational, 6), DeterminacyMode::Right);
        assert!(matches!(e, Err(Error::NotDetectable(_))));
    }

    #[test]
    fn split_in_characteristic_zero() {
        let f = jet("x^2 + x*y + y^2 + z^3", &["x", "y", "z"], FieldSpec::Rational, 6);
        let s = split(&f).unwrap();
        assert!(s.verified);
        assert_eq!(s.rank, 2);
        assert!(s.residual.support_vars().iter().all(|&v| v == 2));
        assert_eq!(s.residual.order(), Some(3));
    }

    #[test]
    fn split_in_characteristic_two() {
        let f = jet("x*y + z^3", &["x", "y", "z"], FieldSpec::finite(2).unwrap(), 6);
        let s = split(&f).unwrap();
        assert!(s.verified);
        assert_eq!(s.rank, 2);
        assert_eq!(s.char2_type, Some(Char2Type::B));
        let g = jet("x*y + x^2 + y^2", &["x", "y"], FieldSpec::finite(2).unwrap(), 4);
        let s = split(&g).unwrap();
        let hook = ExactRoots { field: FieldSpec::finite(2).unwrap() };
        assert!(matches!(normalize_coefficients(&s, &hook), Err(Error::HookFailure(_))));
    }

    #[test]
    fn normalization_over_q() {
        let f = jet("4*x^2 + 9*y^2 + y^3", &["x", "y"], FieldSpec::Rational, 5);
        let s = split(&f).unwrap();
        let hook = ExactRoots { field: FieldSpec::Rational };
        let t = normalize_coefficients(&s, &hook).unwrap();
        assert!(t.verified);
        assert!(t.coefficients.iter().all(Scalar::is_one));
    }

    #[test]
    fn versal_families() {
        let u = semiuniversal_unfolding(&jet("x^3", &["x"], FieldSpec::Rational, 6)).unwrap();
        assert_eq!(u.parameters.len(), 1);
        let d = semiuniversal_deformation(&[jet("x^3 + y^4", &["x", "y"], FieldSpec::Rational, 8)]).unwrap();
        assert_eq!(d.parameters.len(), 6);
        let r = JetRing::new(FieldSpec::Rational, &["x", "y"], 6).unwrap();
        let ci = [parse_jet("x^2", &r).unwrap(), parse_jet("y^2", &r).unwrap()];
        assert_eq!(semiuniversal_deformation(&ci).unwrap().parameters.len(), 4);
        let e = semiuniversal_deformation(&[parse_jet("x*y", &r).unwrap(), parse_jet("x^2", &r).unwrap()]);
        assert!(matches!(e, Err(Error::NotCompleteIntersection(_))));
    }
}
