mod common;

use common::*;
use jetalg::jetsolve::{
    check_solution, extend_order, induce_deformation, induce_unfolding, jet_right_equiv, norm_trace,
    solve_to, Correction, ExtensionContext, ExtensionOracle, ExtensionTrace, LiftOracle, NestedProblem,
    NestedSolutionState, OracleChoice,
};
use jetalg::parse::parse_jet;
use jetalg::series::RadiusVector;
use jetalg::singularity::{semiuniversal_deformation, semiuniversal_unfolding};
use jetalg::standard_basis::std_basis;
use jetalg::{Error, Exponent, FieldSpec, Jet, JetRing, JetVector, NormValue};
use proptest::prelude::*;

fn q(vars: &[&str], d: u32) -> JetRing {
    ring(FieldSpec::Rational, vars, d)
}

/// A perturbation `f + h` with `h ∈ m^{lo}`, random in degrees `lo..=hi`.
fn perturb(f: &Jet, seed: u64, lo: u32, hi: u32) -> Jet {
    let mut g = rng(seed);
    f + &random_nonzero_jet(&mut g, f.ring(), lo, hi, 3)
}

fn has_identity_linear_part(phi: &[Jet]) -> bool {
    let n = phi.len();
    phi.iter().enumerate().all(|(i, p)| {
        p.coeff(&Exponent::zero(n)).is_zero()
            && (0..n).all(|j| {
                let c = p.coeff(&Exponent::unit(n, j));
                if i == j { c.is_one() } else { c.is_zero() }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn perturbed_cusp_is_right_equivalent(seed in any::<u64>()) {
        let r = q(&["x", "y"], 8);
        let f = parse_jet("x^3 + y^3", &r).unwrap();
        let g = perturb(&f, seed, 4, 6);
        let e = jet_right_equiv(&f, &g).unwrap();
        prop_assert!(e.verified);
        prop_assert!(has_identity_linear_part(&e.phi));
        prop_assert!(substitute_naive(&f, &e.phi, &r).same_terms(&g));
    }

    #[test]
    fn perturbed_a2_is_right_equivalent(seed in any::<u64>(), p in prop_oneof![Just(0u64), Just(5), Just(7)]) {
        let field = if p == 0 { FieldSpec::Rational } else { FieldSpec::finite(p).unwrap() };
        let r = ring(field, &["x", "y"], 8);
        let f = parse_jet("x^2 + y^3", &r).unwrap();
        let e0 = jet_right_equiv(&f, &f).unwrap();
        prop_assert!(e0.verified);
        let g = perturb(&f, seed, 5, 7);
        let e = jet_right_equiv(&f, &g).unwrap();
        prop_assert!(e.verified);
        prop_assert!(has_identity_linear_part(&e.phi));
        prop_assert!(substitute_naive(&f, &e.phi, &r).same_terms(&g));
    }

    #[test]
    fn unfoldings_of_the_cusp_are_induced(seed in any::<u64>()) {
        let xr = q(&["x", "y"], 6);
        let f = parse_jet("x^3 + y^2", &xr).unwrap();
        let fam = semiuniversal_unfolding(&f).unwrap();
        let r = q(&["x", "y", "t1", "t2"], 6);
        let mut g = rng(seed);
        let mut big = f.embed(&r, &[0, 1]);
        for t in 2..4 {
            let c = random_jet(&mut g, &xr, 0, 3, 3).embed(&r, &[0, 1]);
            big = &big + &(&Jet::variable(&r, t) * &c);
        }
        let ind = induce_unfolding(&big, &fam, &OracleChoice::Lift).unwrap();
        prop_assert!(ind.verified);
        let s = &ind.ring;
        let mut args: Vec<Jet> = ind.big_phi.clone();
        args.extend((2..4).map(|i| Jet::variable(s, i)));
        let lhs = substitute_naive(&big, &args, s);
        let mut fargs: Vec<Jet> = (0..2).map(|i| Jet::variable(s, i)).collect();
        fargs.extend(ind.phi.iter().cloned());
        let rhs = &substitute_naive(&fam.family[0], &fargs, s) + &ind.alpha;
        prop_assert!(lhs.same_terms(&rhs));
        prop_assert!(ind.alpha.support_vars().iter().all(|&v| v >= 2));
        prop_assert!(ind.phi.iter().all(|p| p.support_vars().iter().all(|&v| v >= 2)));
    }

    #[test]
    fn deformations_of_the_cusp_are_induced(seed in any::<u64>()) {
        let xr = q(&["x", "y"], 6);
        let f = parse_jet("x^3 + y^2", &xr).unwrap();
        let fam = semiuniversal_deformation(&[f.clone()]).unwrap();
        let r = q(&["x", "y", "s"], 6);
        let mut g = rng(seed);
        let c = random_jet(&mut g, &xr, 0, 3, 3).embed(&r, &[0, 1]);
        let big = &f.embed(&r, &[0, 1]) + &(&Jet::variable(&r, 2) * &c);
        let ind = induce_deformation(&[big.clone()], &fam, None, &OracleChoice::Lift).unwrap();
        prop_assert!(ind.verified);
        let s = &ind.ring;
        let mut args: Vec<Jet> = ind.big_phi.clone();
        args.push(Jet::variable(s, 2));
        let lhs = substitute_naive(&big, &args, s);
        let mut fargs: Vec<Jet> = (0..2).map(|i| Jet::variable(s, i)).collect();
        fargs.extend(ind.phi.iter().cloned());
        let rhs = &ind.m[0][0] * &substitute_naive(&fam.family[0], &fargs, s);
        prop_assert!(lhs.same_terms(&rhs));
    }
}

#[test]
fn constant_unfoldings_only_move_alpha() {
    let xr = q(&["x"], 6);
    let fam = semiuniversal_unfolding(&parse_jet("x^3", &xr).unwrap()).unwrap();
    let g = parse_jet("x^3 + t + t^2", &q(&["x", "t"], 6)).unwrap();
    let ind = induce_unfolding(&g, &fam, &OracleChoice::Lift).unwrap();
    assert!(ind.verified);
    assert!(ind.phi[0].is_zero());
    assert!(ind.alpha.same_terms(&parse_jet("t + t^2", &ind.ring).unwrap()));
    let trivial = parse_jet("x^3", &q(&["x", "t"], 6)).unwrap();
    let ind = induce_unfolding(&trivial, &fam, &OracleChoice::Lift).unwrap();
    assert!(ind.alpha.is_zero() && ind.phi[0].is_zero());
    let wrong = parse_jet("x^3 + x^4", &q(&["x", "t"], 6)).unwrap();
    assert!(matches!(induce_unfolding(&wrong, &fam, &OracleChoice::Lift), Err(Error::NotAnUnfolding(_))));
}

#[test]
fn cartan_oracle_agrees_with_lifting() {
    let xr = q(&["x"], 6);
    let fam = semiuniversal_unfolding(&parse_jet("x^3", &xr).unwrap()).unwrap();
    let g = parse_jet("x^3 + t*x^2", &q(&["x", "t"], 6)).unwrap();
    let rho = RadiusVector::from_ratios(&[(1, 2)]).unwrap();
    let tau = RadiusVector::from_ratios(&[(1, 4)]).unwrap();
    let lift = induce_unfolding(&g, &fam, &OracleChoice::Lift).unwrap();
    let cartan = induce_unfolding(&g, &fam, &OracleChoice::Cartan { rho, tau }).unwrap();
    assert!(cartan.verified);
    assert!(lift.alpha.same_terms(&cartan.alpha));
    assert!(lift.phi[0].same_terms(&cartan.phi[0]));
}

#[test]
fn deformation_with_constant_matrix() {
    let xr = q(&["x"], 6);
    let fam = semiuniversal_deformation(&[parse_jet("x^3", &xr).unwrap()]).unwrap();
    let g = parse_jet("2*x^3 + s*x", &q(&["x", "s"], 6)).unwrap();
    let m0 = vec![vec![FieldSpec::Rational.from_i64(2)]];
    let ind = induce_deformation(&[g], &fam, Some(&m0), &OracleChoice::Lift).unwrap();
    assert!(ind.verified);
    assert!(ind.m[0][0].coeff(&Exponent::zero(2)) == FieldSpec::Rational.from_i64(2));
    let h = parse_jet("x^3 + x^2 + s", &q(&["x", "s"], 6)).unwrap();
    assert!(matches!(
        induce_deformation(&[h], &fam, None, &OracleChoice::Lift),
        Err(Error::NotADeformation(_))
    ));
}

#[test]
fn solutions_modulo_an_ideal_are_reduced() {
    // F = Y − s − s² with I = ⟨s²⟩: the normal form solution is y = s
    let r = q(&["s", "Y"], 4);
    let sr = q(&["s"], 4);
    let ideal = std_basis(&[JetVector::from_jet(parse_jet("s^2", &sr).unwrap())]).unwrap();
    let f = parse_jet("Y - s - s^2", &r).unwrap();
    let p = NestedProblem::new(r, (0, 1, 1, 0), vec![f], Some(ideal)).unwrap();
    let sol = p.solution_ring();
    let s0 = NestedSolutionState { degree: 0, y: vec![Jet::zero(&sol)], z: vec![] };
    let (st, _) = solve_to(&p, s0, &mut LiftOracle::default(), 4).unwrap();
    assert!(st.y[0].same_terms(&parse_jet("s", &sol).unwrap()));
    assert!(check_solution(&p, &st).is_ok());
}

struct Lazy;

impl ExtensionOracle for Lazy {
    fn extend(&mut self, ctx: &ExtensionContext<'_>) -> jetalg::Result<Correction> {
        let sol = ctx.problem.solution_ring();
        Ok(Correction {
            u: vec![Jet::zero(&sol); ctx.problem.p],
            v: vec![Jet::zero(&sol); ctx.problem.q],
        })
    }
}

#[test]
fn a_failing_oracle_is_reported() {
    let r = q(&["s", "Y"], 4);
    let p = NestedProblem::new(r.clone(), (0, 1, 1, 0), vec![parse_jet("Y - s", &r).unwrap()], None).unwrap();
    let sol = p.solution_ring();
    let s0 = NestedSolutionState { degree: 0, y: vec![Jet::zero(&sol)], z: vec![] };
    let mut trace = ExtensionTrace::default();
    assert!(matches!(
        extend_order(&p, &s0, &mut Lazy, &mut trace),
        Err(Error::OracleFailure { degree: 1, .. })
    ));
}

#[test]
fn norm_trace_flags_large_corrections() {
    let xr = q(&["x"], 6);
    let fam = semiuniversal_unfolding(&parse_jet("x^3", &xr).unwrap()).unwrap();
    let g = parse_jet("x^3 + 100*t*x^2", &q(&["x", "t"], 6)).unwrap();
    let ind = induce_unfolding(&g, &fam, &OracleChoice::Lift).unwrap();
    let rho = RadiusVector::from_ratios(&[(1, 1)]).unwrap();
    let tau = RadiusVector::from_ratios(&[(1, 1)]).unwrap();
    let tight = norm_trace(&ind.trace, &rho, &tau, &NormValue::from_ratio(1, 1000)).unwrap();
    assert!(!tight.all_within_bound);
    assert!(tight.first_violation.is_some());
    let loose = norm_trace(&ind.trace, &rho, &tau, &NormValue::from_ratio(1_000_000, 1)).unwrap();
    assert!(loose.all_within_bound && loose.first_violation.is_none());
    let wide = RadiusVector::from_ratios(&[(1, 1), (1, 1)]).unwrap();
    assert!(norm_trace(&ind.trace, &rho, &wide, &NormValue::from_ratio(1, 1)).is_err());
}
