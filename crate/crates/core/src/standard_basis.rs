//! Standard bases of submodules of `K{x}^N` for deglex, computed at jet level.
//!
//! The completion works modulo `m^{D+1}`: it runs Buchberger's criterion with
//! Grauert division as the normal form, skipping pairs whose lcm exceeds the
//! truncation. The result is a standard basis of `I + m^{D+1}`, whose leading
//! module agrees with `L(I)` in every degree `≤ D`. Each generator carries a
//! transcript of cofactors expressing it in the original generators.

use serde::Serialize;

use crate::division::divide;
use crate::error::{Error, Result};
use crate::series::{
    exponents_of_degree, exponents_up_to, Jet, JetRing, JetVector, ModuleMonomial,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandardBasis {
    generators: Vec<JetVector>,
    leading: Vec<ModuleMonomial>,
    leading_module: Vec<ModuleMonomial>,
    source: Vec<JetVector>,
    /// `generators[ν] ≡ Σ_i transcript[ν][i]·source[i] mod m^{D+1}`.
    transcript: Vec<Vec<Jet>>,
    complete_level: Option<u32>,
    exact: bool,
}

/// Standard monomials of a standard basis up to the truncation degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientBasis {
    pub standard_monomials: Vec<ModuleMonomial>,
    /// True when some full degree level lies in the leading module, so the
    /// list is a basis of the whole quotient.
    pub complete: bool,
}

impl QuotientBasis {
    /// `dim_K` of the quotient when the list is complete.
    pub fn dimension(&self) -> Option<usize> {
        self.complete.then_some(self.standard_monomials.len())
    }
}

fn unit_transcript(ring: &JetRing, len: usize, i: usize) -> Vec<Jet> {
    (0..len)
        .map(|j| if i == j { Jet::one(ring) } else { Jet::zero(ring) })
        .collect()
}

fn combine(a: &[Jet], b: &[Jet], ca: &Jet, cb: &Jet) -> Vec<Jet> {
    a.iter().zip(b).map(|(x, y)| &(ca * x) + &(cb * y)).collect()
}

/// Computes a standard basis of the submodule generated by `generators`.
///
/// All generators must share one ring and rank. Zero generators are skipped;
/// a truncated generator that vanishes at degree `D` raises
/// `TruncationTooSmall` since its leading monomial lies beyond `D`.
pub fn std_basis(generators: &[JetVector]) -> Result<StandardBasis> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidInput("no generators".into()))?;
    let ring = first.ring().clone();
    let rank = first.rank();
    for g in generators {
        ring.check_same(g.ring())?;
        if g.rank() != rank {
            return Err(Error::VariableMismatch("generators of different rank".into()));
        }
    }
    let d = ring.degree();
    let s = generators.len();
    let mut gens: Vec<JetVector> = Vec::new();
    let mut lms: Vec<ModuleMonomial> = Vec::new();
    let mut trans: Vec<Vec<Jet>> = Vec::new();
    let mut exact = true;
    for (i, g) in generators.iter().enumerate() {
        exact &= g.is_exact();
        if g.is_zero() {
            if !g.is_exact() {
                return Err(Error::TruncationTooSmall(format!(
                    "generator {} vanishes at degree {d}",
                    i + 1
                )));
            }
            continue;
        }
        lms.push(g.leading_monomial().expect("nonzero"));
        gens.push(g.clone());
        trans.push(unit_transcript(&ring, s, i));
    }

    let mut pairs: Vec<(u32, usize, usize)> = Vec::new();
    let push_pairs = |pairs: &mut Vec<(u32, usize, usize)>, lms: &[ModuleMonomial], j: usize| {
        for i in 0..j {
            if lms[i].unit != lms[j].unit {
                continue;
            }
            let l = lms[i].exponent.lcm(&lms[j].exponent);
            if l.degree() <= d {
                pairs.push((l.degree(), i, j));
            }
        }
    };
    for j in 0..gens.len() {
        push_pairs(&mut pairs, &lms, j);
    }

    while !pairs.is_empty() {
        let pos = (0..pairs.len())
            .min_by_key(|&k| (pairs[k].0, pairs[k].2, pairs[k].1))
            .expect("nonempty");
        let (_, i, j) = pairs.swap_remove(pos);
        let lcm = lms[i].exponent.lcm(&lms[j].exponent);
        let ci = gens[i].coeff(&lms[i]).inv()?;
        let cj = gens[j].coeff(&lms[j]).inv()?;
        let mi = Jet::monomial(&ring, lms[i].exponent.quotient(&lcm).expect("lcm"), ci);
        let mj = Jet::monomial(&ring, lms[j].exponent.quotient(&lcm).expect("lcm"), -cj);
        let svec = &gens[i].mul_jet(&mi) + &gens[j].mul_jet(&mj);
        let div = divide(&svec, &gens, false)?;
        if div.remainder.is_zero() {
            continue;
        }
        let mut t = combine(&trans[i], &trans[j], &mi, &mj);
        for (q, h) in div.quotients.iter().zip(&trans) {
            if q.is_zero() {
                continue;
            }
            for (tk, hk) in t.iter_mut().zip(h) {
                *tk -= &(q * hk);
            }
        }
        exact &= div.remainder.is_exact();
        let r = div.remainder;
        lms.push(r.leading_monomial().expect("nonzero"));
        gens.push(r);
        trans.push(t);
        push_pairs(&mut pairs, &lms, gens.len() - 1);
    }

    let mut leading_module: Vec<ModuleMonomial> = Vec::new();
    for (k, m) in lms.iter().enumerate() {
        let redundant = lms
            .iter()
            .enumerate()
            .any(|(l, o)| l != k && o.divides(m) && (o != m || l < k));
        if !redundant {
            leading_module.push(m.clone());
        }
    }
    leading_module.sort_by(|a, b| b.cmp(a));
    let complete_level = find_complete_level(&lms, ring.nvars(), rank, d);
    Ok(StandardBasis {
        generators: gens,
        leading: lms,
        leading_module,
        source: generators.to_vec(),
        transcript: trans,
        complete_level,
        exact,
    })
}

fn in_leading(lms: &[ModuleMonomial], m: &ModuleMonomial) -> bool {
    lms.iter().any(|l| l.divides(m))
}

fn find_complete_level(lms: &[ModuleMonomial], n: usize, rank: usize, d: u32) -> Option<u32> {
    (0..=d).find(|&k| {
        exponents_of_degree(n, k).into_iter().all(|e| {
            (0..rank).all(|u| in_leading(lms, &ModuleMonomial::new(e.clone(), u)))
        })
    })
}

impl StandardBasis {
    pub fn generators(&self) -> &[JetVector] {
        &self.generators
    }

    pub fn leading_monomials(&self) -> &[ModuleMonomial] {
        &self.leading
    }

    /// Minimal generators of the leading module, in decreasing order.
    pub fn leading_module(&self) -> &[ModuleMonomial] {
        &self.leading_module
    }

    pub fn source(&self) -> &[JetVector] {
        &self.source
    }

    pub fn transcript(&self) -> &[Vec<Jet>] {
        &self.transcript
    }

    pub fn ring(&self) -> &JetRing {
        self.source[0].ring()
    }

    pub fn rank(&self) -> usize {
        self.source[0].rank()
    }

    /// Least `k ≤ D` with every degree-`k` module monomial in the leading
    /// module, if any.
    pub fn complete_level(&self) -> Option<u32> {
        self.complete_level
    }

    pub fn is_complete(&self) -> bool {
        self.complete_level.is_some()
    }

    /// True when no truncation affected the computation.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `x^α e_i ∈ L(I)` (meaningful for degrees `≤ D`).
    pub fn in_leading_module(&self, m: &ModuleMonomial) -> bool {
        in_leading(&self.leading, m)
    }

    /// Restriction to truncation degree `D' ≤ D`; generators whose leading
    /// monomial lies above `D'` are dropped.
    pub fn truncate(&self, degree: u32) -> StandardBasis {
        assert!(degree <= self.ring().degree());
        let mut gens = Vec::new();
        let mut lms = Vec::new();
        let mut trans = Vec::new();
        for ((g, m), t) in self.generators.iter().zip(&self.leading).zip(&self.transcript) {
            if m.degree() > degree {
                continue;
            }
            gens.push(g.truncate(degree));
            lms.push(m.clone());
            trans.push(t.iter().map(|h| h.truncate(degree)).collect());
        }
        let leading_module = self
            .leading_module
            .iter()
            .filter(|m| m.degree() <= degree)
            .cloned()
            .collect();
        let complete_level = find_complete_level(&lms, self.ring().nvars(), self.rank(), degree);
        StandardBasis {
            generators: gens,
            leading: lms,
            leading_module,
            source: self.source.iter().map(|g| g.truncate(degree)).collect(),
            transcript: trans,
            complete_level,
            exact: self.exact && self.source.iter().all(|g| g.truncate(degree).is_exact()),
        }
    }

    fn check_operand(&self, f: &JetVector) -> Result<()> {
        self.ring().check_same(f.ring())?;
        if f.rank() != self.rank() {
            return Err(Error::VariableMismatch("rank mismatch".into()));
        }
        Ok(())
    }

    /// `NF(f | I)`: the remainder of division by the standard basis.
    pub fn normal_form(&self, f: &JetVector) -> Result<JetVector> {
        self.check_operand(f)?;
        if self.generators.is_empty() {
            return Ok(f.clone());
        }
        Ok(divide(f, &self.generators, false)?.remainder)
    }

    /// Membership modulo `m^{D+1}`.
    pub fn is_member(&self, f: &JetVector) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Cofactors `c` with `f − NF(f) ≡ Σ_i c_i·source_i mod m^{D+1}`, together
    /// with the normal form.
    pub fn lift(&self, f: &JetVector) -> Result<(Vec<Jet>, JetVector)> {
        self.check_operand(f)?;
        let ring = self.ring().clone();
        let mut c = vec![Jet::zero(&ring); self.source.len()];
        if self.generators.is_empty() {
            return Ok((c, f.clone()));
        }
        let div = divide(f, &self.generators, false)?;
        for (q, h) in div.quotients.iter().zip(&self.transcript) {
            if q.is_zero() {
                continue;
            }
            for (ck, hk) in c.iter_mut().zip(h) {
                *ck += &(q * hk);
            }
        }
        Ok((c, div.remainder))
    }

    /// Monomials of degree `≤ D` outside the leading module, ordered by unit
    /// and then decreasingly; `modulo_maximal_ideal` drops degree 0.
    pub fn quotient_monomials(&self, modulo_maximal_ideal: bool) -> QuotientBasis {
        let n = self.ring().nvars();
        let top = self.complete_level.unwrap_or(self.ring().degree());
        let mut out = Vec::new();
        for unit in 0..self.rank() {
            for e in exponents_up_to(n, top) {
                if modulo_maximal_ideal && e.is_zero() {
                    continue;
                }
                let m = ModuleMonomial::new(e, unit);
                if !self.in_leading_module(&m) {
                    out.push(m);
                }
            }
        }
        QuotientBasis {
            standard_monomials: out,
            complete: self.complete_level.is_some(),
        }
    }

    /// Whether every monomial of degree exactly `power` (on every unit) lies
    /// in the module, which by Nakayama decides `m^power·K{x}^N ⊆ I` once
    /// `power ≤ D`.
    pub fn contains_power(&self, power: u32) -> Result<bool> {
        let d = self.ring().degree();
        if power > d {
            return Err(Error::TruncationTooSmall(format!(
                "power {power} exceeds the truncation degree {d}"
            )));
        }
        Ok(exponents_of_degree(self.ring().nvars(), power)
            .into_iter()
            .all(|e| (0..self.rank()).all(|u| self.in_leading_module(&ModuleMonomial::new(e.clone(), u)))))
    }
}

/// `NF(f | S)` for a computed standard basis.
pub fn nf_ideal(f: &JetVector, s: &StandardBasis) -> Result<JetVector> {
    s.normal_form(f)
}

pub fn is_member(f: &JetVector, s: &StandardBasis) -> Result<bool> {
    s.is_member(f)
}

pub fn quotient_monomials(s: &StandardBasis, modulo_maximal_ideal: bool) -> QuotientBasis {
    s.quotient_monomials(modulo_maximal_ideal)
}

/// Products `{a·b}` of two generator sets of ideals (rank 1).
pub fn product_generators(a: &[Jet], b: &[Jet]) -> Vec<Jet> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let p = x * y;
            if !p.is_zero() || !p.is_exact() {
                out.push(p);
            }
        }
    }
    out
}

/// Monomial generators of `m^k`.
pub fn maximal_ideal_power(ring: &JetRing, k: u32) -> Vec<Jet> {
    exponents_of_degree(ring.nvars(), k)
        .into_iter()
        .map(|e| Jet::monomial(ring, e, ring.one()))
        .collect()
}
