//! Grauert division at jet level, radius shrinking and norm certificates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{NormValue, Scalar};
use crate::series::{exponents_up_to, Jet, JetVector, ModuleMonomial, RadiusVector};

/// The partition `Γ = Γ_1 ∪ … ∪ Γ_m` of the monomials divisible by some
/// leading monomial, realized by assigning each monomial to the first
/// divisor whose leading monomial divides it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaPartition {
    pub leading: Vec<ModuleMonomial>,
}

impl GammaPartition {
    pub fn new(leading: Vec<ModuleMonomial>) -> Self {
        GammaPartition { leading }
    }

    /// Index `i` with `m ∈ Γ_i`, or `None` when `m ∉ Γ`.
    pub fn assign(&self, m: &ModuleMonomial) -> Option<usize> {
        self.leading.iter().position(|l| l.divides(m))
    }
}

/// Norm bounds for a division, checked at the radius `delta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormCertificate {
    pub epsilon: NormValue,
    pub delta: RadiusVector,
    pub norm_f: NormValue,
    pub norm_r: NormValue,
    pub norm_q: Vec<NormValue>,
    /// `‖r‖_δ ≤ bound_r = ‖f‖_δ / (1 − ε)`.
    pub bound_r: NormValue,
    /// `‖q_j‖_δ ≤ bound_q[j] = ‖f‖_δ / ((1 − ε)‖LT(f_j)‖_δ)`.
    pub bound_q: Vec<NormValue>,
    /// Whether the observed norms satisfy the bounds.
    pub bounds_hold: bool,
    /// True only for polynomial inputs whose bounds hold; otherwise the
    /// fields are observed values.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisionResult {
    pub quotients: Vec<Jet>,
    pub remainder: JetVector,
    pub steps: usize,
    pub certificate: Option<NormCertificate>,
    /// Why no certificate was produced when one was requested.
    pub certificate_note: Option<String>,
}

struct Normalized {
    gamma: GammaPartition,
    tails: Vec<JetVector>,
    inv_lc: Vec<Scalar>,
}

fn check_operands(f: &JetVector, divisors: &[JetVector]) -> Result<()> {
    for g in divisors {
        f.ring().check_same(g.ring())?;
        if g.rank() != f.rank() {
            return Err(Error::VariableMismatch(format!(
                "rank {} vs {}",
                f.rank(),
                g.rank()
            )));
        }
    }
    Ok(())
}

fn normalize(divisors: &[JetVector]) -> Result<Normalized> {
    let mut leading = Vec::with_capacity(divisors.len());
    let mut tails = Vec::with_capacity(divisors.len());
    let mut inv_lc = Vec::with_capacity(divisors.len());
    for (i, g) in divisors.iter().enumerate() {
        let ld = g.leading_data().map_err(|_| Error::ZeroDivisor { index: i })?;
        let inv = ld.coeff.inv()?;
        leading.push(ld.monomial);
        tails.push(ld.tail.scale(&inv));
        inv_lc.push(inv);
    }
    Ok(Normalized {
        gamma: GammaPartition::new(leading),
        tails,
        inv_lc,
    })
}

/// Number of module monomials of degree at most `D`.
fn step_cap(v: &JetVector) -> usize {
    let n = v.ring().nvars();
    let d = v.ring().degree();
    exponents_up_to(n, d).len() * v.rank() + 1
}

struct Iteration {
    quotients: Vec<Jet>,
    remainder: JetVector,
    steps: usize,
    sequence: Vec<JetVector>,
    lost: bool,
}

fn iterate(f: &JetVector, norm: &Normalized, record: bool) -> Iteration {
    let ring = f.ring().clone();
    let m = norm.tails.len();
    let mut quotients = vec![Jet::zero(&ring); m];
    let mut remainder = JetVector::zero(&ring, f.rank());
    let mut w = f.clone();
    let mut steps = 0;
    let mut sequence = Vec::new();
    let mut lost = false;
    let cap = step_cap(f);
    while !w.is_zero() {
        if record {
            sequence.push(w.clone());
        }
        steps += 1;
        assert!(steps <= cap, "division failed to terminate within {cap} steps");
        let mut q_w = vec![Jet::zero(&ring); m];
        for (mono, c) in w.terms() {
            match norm.gamma.assign(&mono) {
                Some(i) => {
                    let shift = norm.gamma.leading[i]
                        .exponent
                        .quotient(&mono.exponent)
                        .expect("assigned monomials are divisible");
                    q_w[i].add_term(shift, c.clone());
                }
                None => remainder.add_term(mono, c.clone()),
            }
        }
        let mut next = JetVector::zero(&ring, f.rank());
        for (i, q) in q_w.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            quotients[i] += q;
            let prod = norm.tails[i].mul_jet(q);
            if !prod.is_exact() {
                lost = true;
            }
            next -= &prod;
        }
        w = next.with_exact(true);
    }
    if record {
        sequence.push(w);
    }
    Iteration {
        quotients,
        remainder,
        steps,
        sequence,
        lost,
    }
}

/// Divides `f` by the ordered `divisors` (Grauert division at jet level).
///
/// The identity `f ≡ Σ q_i f_i + r mod m^{D+1}` holds exactly, no monomial of
/// `r` is divisible by a leading monomial, and `LM(f) ≥ LM(q_i f_i)`.
pub fn divide(f: &JetVector, divisors: &[JetVector], want_certificate: bool) -> Result<DivisionResult> {
    divide_with_epsilon(f, divisors, want_certificate.then(half).as_ref())
}

/// [`divide`] with a certificate for the given `ε ∈ (0, 1)` when `Some`.
pub fn divide_with_epsilon(
    f: &JetVector,
    divisors: &[JetVector],
    epsilon: Option<&BigRational>,
) -> Result<DivisionResult> {
    check_operands(f, divisors)?;
    let norm = normalize(divisors)?;
    let it = iterate(f, &norm, false);
    let exact = f.is_exact() && divisors.iter().all(JetVector::is_exact) && !it.lost;
    let quotients: Vec<Jet> = it
        .quotients
        .iter()
        .zip(&norm.inv_lc)
        .map(|(q, inv)| q.scale(inv).with_exact(exact))
        .collect();
    let remainder = it.remainder.with_exact(exact);
    let mut result = DivisionResult {
        quotients,
        remainder,
        steps: it.steps,
        certificate: None,
        certificate_note: None,
    };
    if let Some(eps) = epsilon {
        match certify(f, divisors, &result, eps) {
            Ok(c) => result.certificate = Some(c),
            Err(e) => result.certificate_note = Some(e.to_string()),
        }
    }
    Ok(result)
}

/// The remainder of [`divide`].
pub fn normal_form(f: &JetVector, divisors: &[JetVector]) -> Result<JetVector> {
    Ok(divide(f, divisors, false)?.remainder)
}

/// The sequence `w_0 = f, w_1, …` of the division iteration, ending with 0.
pub fn division_sequence(f: &JetVector, divisors: &[JetVector]) -> Result<Vec<JetVector>> {
    check_operands(f, divisors)?;
    let norm = normalize(divisors)?;
    Ok(iterate(f, &norm, true).sequence)
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Checks the division bounds at the radius produced by [`shrink_radius`]
/// for `epsilon`. Truncated inputs yield observed values with
/// `verified = false`.
pub fn certify(
    f: &JetVector,
    divisors: &[JetVector],
    result: &DivisionResult,
    epsilon: &BigRational,
) -> Result<NormCertificate> {
    let n = f.ring().nvars();
    let rho_bar = RadiusVector::uniform(n, half())?;
    let polynomial = f.is_exact() && divisors.iter().all(JetVector::is_exact);
    let stored: Vec<JetVector> = divisors.iter().map(|g| g.clone().with_exact(true)).collect();
    let delta = shrink_radius(&stored, epsilon, &rho_bar)?;
    Ok(bounds_at(f, divisors, result, epsilon, delta, polynomial))
}

fn bounds_at(
    f: &JetVector,
    divisors: &[JetVector],
    result: &DivisionResult,
    epsilon: &BigRational,
    delta: RadiusVector,
    polynomial: bool,
) -> NormCertificate {
    let factor = NormValue::new(BigRational::one() / (BigRational::one() - epsilon));
    let norm_f = f.norm(&delta);
    let norm_r = result.remainder.norm(&delta);
    let norm_q: Vec<NormValue> = result.quotients.iter().map(|q| q.norm(&delta)).collect();
    let bound_r = &factor * &norm_f;
    let bound_q: Vec<NormValue> = divisors
        .iter()
        .map(|g| {
            let lt = g.leading_data().expect("nonzero divisor").term;
            bound_r.div(&lt.norm(&delta))
        })
        .collect();
    let bounds_hold = norm_r <= bound_r && norm_q.iter().zip(&bound_q).all(|(a, b)| a <= b);
    NormCertificate {
        epsilon: NormValue::new(epsilon.clone()),
        delta,
        norm_f,
        norm_r,
        norm_q,
        bound_r,
        bound_q,
        bounds_hold,
        verified: polynomial && bounds_hold,
    }
}

/// Observed norms at `λ∘δ = (δ_1..δ_s, λδ_{s+1}..λδ_n)` for divisors in the
/// last `n − s` variables only. Always reported with `verified = false`.
pub fn nested_bounds(
    f: &JetVector,
    divisors: &[JetVector],
    result: &DivisionResult,
    epsilon: &BigRational,
    delta: &RadiusVector,
    s: usize,
    lambda: &BigRational,
) -> Result<NormCertificate> {
    if !(BigRational::zero() < *lambda && *lambda < BigRational::one()) {
        return Err(Error::InvalidInput("λ must lie in (0, 1)".into()));
    }
    for g in divisors {
        if g.comps().iter().any(|c| c.support_vars().iter().any(|&v| v < s)) {
            return Err(Error::InvalidInput(format!(
                "divisors must not involve the first {s} variables"
            )));
        }
    }
    let scaled = delta.nested_scaled(s, lambda)?;
    let mut cert = bounds_at(f, divisors, result, epsilon, scaled, false);
    cert.verified = false;
    Ok(cert)
}

/// Returns `δ ≤ ρ̄` with `‖tail(f_i)‖_δ < ε‖LM(f_i)‖_δ` for the LC-normalized
/// divisors, following the descending induction on the first index where an
/// equal-degree tail exponent differs from the leading one, followed by a
/// uniform rescaling that controls the higher-degree tail.
///
/// Tail terms on another unit vector with the leading exponent itself do not
/// shrink relative to the leading monomial; their total size is subtracted
/// from `ε` first and the divisor is rejected when nothing is left.
pub fn shrink_radius(
    divisors: &[JetVector],
    epsilon: &BigRational,
    rho_bar: &RadiusVector,
) -> Result<RadiusVector> {
    if !(BigRational::zero() < *epsilon && *epsilon < BigRational::one()) {
        return Err(Error::InvalidInput("ε must lie in (0, 1)".into()));
    }
    let Some(first) = divisors.first() else {
        return Ok(rho_bar.clone());
    };
    let n = first.ring().nvars();
    if rho_bar.len() != n {
        return Err(Error::InvalidInput("radius dimension mismatch".into()));
    }
    let field = first.ring().field();
    let two = BigRational::from_integer(BigInt::from(2));

    struct Prepared {
        lead: ModuleMonomial,
        eps: BigRational,
        same_degree: Vec<(crate::series::Exponent, BigRational)>,
        higher: JetVector,
    }
    let mut prepared = Vec::new();
    for (i, g) in divisors.iter().enumerate() {
        if !g.is_exact() {
            return Err(Error::NotPolynomial(format!("divisor {i} is a truncation")));
        }
        let ld = g.leading_data().map_err(|_| Error::ZeroDivisor { index: i })?;
        let inv = ld.coeff.inv()?;
        let tail = ld.tail.scale(&inv);
        let lead_deg = ld.monomial.degree();
        let mut c0 = BigRational::zero();
        let mut same_degree = Vec::new();
        let mut higher = JetVector::zero(g.ring(), g.rank());
        for (m, c) in tail.terms() {
            let v = field.valuation(c).value().clone();
            if m.exponent == ld.monomial.exponent {
                c0 += v;
            } else if m.degree() == lead_deg {
                same_degree.push((m.exponent.clone(), v));
            } else {
                higher.add_term(m, c.clone());
            }
        }
        if c0 >= *epsilon {
            return Err(Error::NotCertifiable(format!(
                "divisor {i} has tail terms on other unit vectors at its leading exponent \
                 with total size {} ≥ ε",
                NormValue::new(c0)
            )));
        }
        prepared.push(Prepared {
            lead: ld.monomial,
            eps: epsilon - c0,
            same_degree,
            higher,
        });
    }

    let start = RadiusVector::uniform(n, half())?;
    let mut rho = start.min(rho_bar);

    // equal-degree tail terms, by descending first-difference index
    for s in (0..n).rev() {
        for p in &prepared {
            let count = BigRational::from_integer(BigInt::from(p.same_degree.len().max(1)));
            for (alpha, c) in &p.same_degree {
                let a = alpha.entries();
                let ai = p.lead.exponent.entries();
                let l = (0..n).find(|&j| a[j] != ai[j]).expect("distinct exponents");
                if l != s {
                    continue;
                }
                debug_assert!(a[s] > ai[s]);
                let mut rhs = &p.eps / (&two * &count * c);
                for j in s + 1..n {
                    let e = ai[j] as i64 - a[j] as i64;
                    rhs *= pow_signed(&rho.entries()[j], e);
                }
                let k = (a[s] - ai[s]) as usize;
                let mut r = rho.entries()[s].clone();
                while num_traits::pow(r.clone(), k) >= rhs {
                    r /= &two;
                }
                rho.set(s, r);
            }
        }
    }

    // higher-degree tail terms, via λ∘ρ
    let mut lambda = BigRational::one();
    for p in &prepared {
        if p.higher.is_zero() {
            continue;
        }
        let lead_norm = rho.monomial(&p.lead.exponent).value().clone();
        let high = p.higher.norm(&rho).value().clone();
        let bound = &p.eps * lead_norm / (&two * high);
        while lambda >= bound {
            lambda /= &two;
        }
    }
    let delta = rho.scaled(&lambda)?;
    debug_assert!(tails_are_small(divisors, epsilon, &delta));
    Ok(delta)
}

fn pow_signed(r: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(r.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// `‖tail(f_i)‖_δ < ε‖LT(f_i)‖_δ` for every divisor.
pub fn tails_are_small(divisors: &[JetVector], epsilon: &BigRational, delta: &RadiusVector) -> bool {
    divisors.iter().all(|g| {
        let Ok(ld) = g.leading_data() else {
            return false;
        };
        let lhs = ld.tail.norm(delta);
        let rhs = NormValue::new(epsilon.clone()) * ld.term.norm(delta);
        lhs < rhs
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::parse::parse_vector;
    use crate::series::JetRing;

    fn ring(vars: &[&str], d: u32) -> JetRing {
        JetRing::new(FieldSpec::Rational, vars, d).unwrap()
    }

    fn v(text: &str, r: &JetRing) -> JetVector {
        parse_vector(text, r).unwrap()
    }

    fn reconstruct(divisors: &[JetVector], res: &DivisionResult) -> JetVector {
        let mut acc = res.remainder.clone();
        for (q, g) in res.quotients.iter().zip(divisors) {
            acc += &g.mul_jet(q);
        }
        acc
    }

    #[test]
    fn geometric_series_quotient() {
        let r = ring(&["x"], 4);
        let f = v("x^2", &r);
        let g = vec![v("x^2 + x^3", &r)];
        let res = divide(&f, &g, true).unwrap();
        assert_eq!(res.quotients[0].to_string(), "1 - x + x^2");
        assert!(res.remainder.is_zero());
        assert!(reconstruct(&g, &res).same_terms(&f));
        let cert = res.certificate.unwrap();
        assert!(cert.verified);
    }

    #[test]
    fn trivial_divisions() {
        let r = ring(&["x", "y"], 4);
        let res = divide(&v("y", &r), &[v("x", &r)], false).unwrap();
        assert!(res.quotients[0].is_zero());
        assert_eq!(res.remainder.to_string(), "y");

        let res = divide(&v("x + y", &r), &[v("x", &r), v("y", &r)], false).unwrap();
        assert_eq!(res.quotients[0].to_string(), "1");
        assert_eq!(res.quotients[1].to_string(), "1");
        assert!(res.remainder.is_zero());

        let res = divide(&v("[y, 0]", &r), &[v("[0, y]", &r)], false).unwrap();
        assert_eq!(res.remainder.to_string(), "[y, 0]");
    }

    #[test]
    fn normal_forms() {
        let r = ring(&["x", "y"], 4);
        assert!(normal_form(&v("x^2", &r), &[v("x^2 + x^3", &r)]).unwrap().is_zero());
        assert_eq!(normal_form(&v("y^3", &r), &[v("x", &r)]).unwrap().to_string(), "y^3");
        // y^2 > x^2 in deglex, so y^2 is the leading monomial of the divisor
        assert_eq!(
            normal_form(&v("x^2 + y^2", &r), &[v("x^2 - y^2", &r)]).unwrap().to_string(),
            "2*x^2"
        );
    }

    #[test]
    fn zero_divisor_rejected() {
        let r = ring(&["x"], 3);
        assert_eq!(
            divide(&v("x", &r), &[v("x", &r), v("0", &r)], false),
            Err(Error::ZeroDivisor { index: 1 })
        );
    }

    #[test]
    fn shrink_radius_examples() {
        let r = ring(&["x", "y"], 6);
        let eps = half();
        let bar = RadiusVector::uniform(2, BigRational::one()).unwrap();
        let d = shrink_radius(&[v("x + y^2", &r)], &eps, &bar).unwrap();
        let e = d.entries();
        assert!(&e[1] * &e[1] < &e[0] / BigRational::from_integer(2.into()));

        let d = shrink_radius(&[v("x", &r)], &eps, &bar).unwrap();
        assert!(d.le(&bar));

        let r1 = ring(&["x"], 6);
        let g = [v("x^2 + x^3", &r1)];
        let d = shrink_radius(&g, &eps, &RadiusVector::uniform(1, BigRational::one()).unwrap())
            .unwrap();
        assert!(tails_are_small(&g, &eps, &d));
        let quarter = RadiusVector::from_ratios(&[(1, 4)]).unwrap();
        assert!(tails_are_small(&g, &eps, &quarter));
    }

    #[test]
    fn shrink_radius_equal_degree_tails() {
        let r = ring(&["x", "y", "z"], 6);
        let g = [v("y^2 + 5*x*z + 7*x^2 + y*z^3", &r), v("x*y + 100*x^2", &r)];
        let eps = BigRational::new(1.into(), 3.into());
        let bar = RadiusVector::from_ratios(&[(1, 1), (1, 3), (1, 5)]).unwrap();
        let d = shrink_radius(&g, &eps, &bar).unwrap();
        assert!(d.le(&bar));
        assert!(tails_are_small(&g, &eps, &d));
    }

    #[test]
    fn shrink_radius_module_gap() {
        let r = ring(&["x"], 4);
        let g = [v("[x, x]", &r)];
        assert!(matches!(
            shrink_radius(&g, &half(), &RadiusVector::uniform(1, half()).unwrap()),
            Err(Error::NotCertifiable(_))
        ));
        let g = [v("[x, 1/4*x + x^2]", &r)];
        let d = shrink_radius(&g, &half(), &RadiusVector::uniform(1, half()).unwrap()).unwrap();
        assert!(tails_are_small(&g, &half(), &d));
    }

    #[test]
    fn truncated_divisors_are_not_certified() {
        let r = ring(&["x"], 3);
        let g = [v("x + x^7", &r)];
        assert!(matches!(
            shrink_radius(&g, &half(), &RadiusVector::uniform(1, half()).unwrap()),
            Err(Error::NotPolynomial(_))
        ));
        let res = divide(&v("x", &r), &g, true).unwrap();
        assert!(!res.certificate.unwrap().verified);
    }

    #[test]
    fn contraction_per_step() {
        let r = ring(&["x", "y"], 8);
        let g = [v("x^2 + x*y^2 + y^5", &r), v("y^3 - x^4", &r)];
        let f = v("x^3 + y^4 + x*y", &r);
        let delta = shrink_radius(&g, &half(), &RadiusVector::uniform(2, half()).unwrap()).unwrap();
        let seq = division_sequence(&f, &g).unwrap();
        let h = NormValue::new(half());
        for w in seq.windows(2) {
            assert!(w[1].norm(&delta) <= &h * &w[0].norm(&delta));
        }
    }
}
