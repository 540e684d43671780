//! Independent oracles shared by the integration tests.
//!
//! Everything here works directly in the finite-dimensional jet space
//! `K[x]^N / m^{D+1}` with plain Gaussian elimination, so it shares no code
//! path with division or standard bases.

#![allow(dead_code)]

use std::collections::HashMap;

use jetalg::series::exponents_up_to;
use jetalg::{Exponent, FieldSpec, Jet, JetRing, JetVector, ModuleMonomial, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Coordinates on the jet space of rank `N` at truncation `D`.
pub struct JetSpace {
    pub field: FieldSpec,
    pub monomials: Vec<ModuleMonomial>,
    index: HashMap<ModuleMonomial, usize>,
}

impl JetSpace {
    pub fn new(ring: &JetRing, rank: usize) -> Self {
        let mut monomials = Vec::new();
        for e in exponents_up_to(ring.nvars(), ring.degree()) {
            for u in 0..rank {
                monomials.push(ModuleMonomial::new(e.clone(), u));
            }
        }
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        JetSpace {
            field: ring.field(),
            monomials,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn coords(&self, v: &JetVector) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); self.dim()];
        for (m, c) in v.terms() {
            out[self.index[&m]] = c.clone();
        }
        out
    }
}

/// Row-reduced span of vectors, maintained by hand.
pub struct Span {
    field: FieldSpec,
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Span {
    pub fn new(field: FieldSpec) -> Self {
        Span {
            field,
            rows: Vec::new(),
        }
    }

    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let c = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x - &(&c * r);
            }
        }
        v
    }

    pub fn add(&mut self, v: &[Scalar]) {
        let w = self.reduce(v);
        if let Some(p) = w.iter().position(|x| !x.is_zero()) {
            let inv = w[p].inv().unwrap();
            let w: Vec<Scalar> = w.iter().map(|x| x * &inv).collect();
            self.rows.push((p, w));
        }
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
}

/// The image of `I = ⟨gens⟩` in the jet space: spanned by `x^β g_j`.
pub fn ideal_span(space: &JetSpace, ring: &JetRing, gens: &[JetVector]) -> Span {
    let mut span = Span::new(space.field);
    for g in gens {
        for b in exponents_up_to(ring.nvars(), ring.degree()) {
            let shifted = g.mul_term(&b, &ring.one());
            if !shifted.is_zero() {
                span.add(&space.coords(&shifted));
            }
        }
    }
    span
}

/// `f ∈ I + m^{D+1}` by linear algebra.
pub fn oracle_member(gens: &[JetVector], f: &JetVector) -> bool {
    let ring = f.ring();
    let space = JetSpace::new(ring, f.rank());
    ideal_span(&space, ring, gens).contains(&space.coords(f))
}

/// `dim_K (K[x]^N / (I + m^{D+1}))`; equals `dim_K K{x}^N / I` once `I`
/// contains a power `m^k` with `k ≤ D`.
pub fn oracle_quotient_dim(gens: &[JetVector]) -> usize {
    let ring = gens[0].ring();
    let space = JetSpace::new(ring, gens[0].rank());
    space.dim() - ideal_span(&space, ring, gens).rank()
}

pub fn random_scalar(rng: &mut ChaCha8Rng, field: FieldSpec, bound: i64) -> Scalar {
    match field {
        FieldSpec::FiniteField { p } => field.from_i64(rng.gen_range(0..p as i64)),
        _ => {
            let num = rng.gen_range(-bound..=bound);
            let den = rng.gen_range(1..=3);
            field
                .from_ratio(&num.into(), &den.into())
                .expect("nonzero denominator")
        }
    }
}

/// A random polynomial with terms of degree in `lo..=hi`.
pub fn random_jet(
    rng: &mut ChaCha8Rng,
    ring: &JetRing,
    lo: u32,
    hi: u32,
    terms: usize,
) -> Jet {
    let n = ring.nvars();
    let mut f = Jet::zero(ring);
    for _ in 0..terms {
        let d = rng.gen_range(lo..=hi);
        let mut e = vec![0u32; n];
        for _ in 0..d {
            e[rng.gen_range(0..n)] += 1;
        }
        let c = random_scalar(rng, ring.field(), 5);
        f.add_term(Exponent::new(e), c);
    }
    f
}

pub fn random_nonzero_jet(rng: &mut ChaCha8Rng, ring: &JetRing, lo: u32, hi: u32, terms: usize) -> Jet {
    loop {
        let f = random_jet(rng, ring, lo, hi, terms);
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn random_vector(rng: &mut ChaCha8Rng, ring: &JetRing, rank: usize, lo: u32, hi: u32, terms: usize) -> JetVector {
    JetVector::new((0..rank).map(|_| random_jet(rng, ring, lo, hi, terms)).collect()).unwrap()
}

pub fn ring(field: FieldSpec, vars: &[&str], d: u32) -> JetRing {
    JetRing::new(field, vars, d).unwrap()
}

pub fn vars(n: usize) -> Vec<&'static str> {
    ["x", "y", "z", "w"][..n].to_vec()
}

/// `Σ q_i f_i + r`.
pub fn recombine(divisors: &[JetVector], quotients: &[Jet], remainder: &JetVector) -> JetVector {
    let mut acc = remainder.clone();
    for (q, g) in quotients.iter().zip(divisors) {
        acc += &g.mul_jet(q);
    }
    acc
}

/// Naive substitution `f(values)` by expanding every term, for cross-checks.
pub fn substitute_naive(f: &Jet, values: &[Jet], target: &JetRing) -> Jet {
    let mut out = Jet::zero(target);
    for (a, c) in f.terms() {
        let mut t = Jet::constant(target, c.clone());
        for (i, &k) in a.entries().iter().enumerate() {
            for _ in 0..k {
                t = &t * &values[i];
            }
        }
        out += &t;
    }
    out
}

/// Counts monomials `x^α` of degree `≤ D` not divisible by any of `lms`.
pub fn count_standard_monomials(n: usize, d: u32, lms: &[Exponent]) -> usize {
    exponents_up_to(n, d)
        .into_iter()
        .filter(|e| !lms.iter().any(|l| l.divides(e)))
        .count()
}

/// `∂f/∂x_i` term by term.
pub fn partial_by_hand(f: &Jet, i: usize) -> Jet {
    let mut out = Jet::zero(f.ring());
    for (a, c) in f.terms() {
        let k = a.entries()[i];
        if k > 0 {
            let mut e = a.entries().to_vec();
            e[i] -= 1;
            out.add_term(Exponent::new(e), c.mul_int(k as i64));
        }
    }
    out
}

/// `‖f‖_δ = Σ |c_α| δ^α`, computed term by term.
pub fn norm_by_hand(f: &JetVector, delta: &[num_rational::BigRational]) -> num_rational::BigRational {
    let field = f.ring().field();
    let mut acc = num_rational::BigRational::from_integer(0.into());
    for (m, c) in f.terms() {
        let mut t = field.valuation(c).value().clone();
        for (d, &k) in delta.iter().zip(m.exponent.entries()) {
            for _ in 0..k {
                t *= d;
            }
        }
        acc += t;
    }
    acc
}
