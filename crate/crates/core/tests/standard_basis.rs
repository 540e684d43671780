mod common;

use common::*;
use jetalg::parse::parse_vector;
use jetalg::series::exponents_up_to;
use jetalg::standard_basis::{maximal_ideal_power, std_basis};
use jetalg::{FieldSpec, Jet, JetVector, ModuleMonomial};
use proptest::prelude::*;

fn fields() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::Rational),
        Just(FieldSpec::padic(2).unwrap()),
        Just(FieldSpec::finite(3).unwrap()),
        Just(FieldSpec::finite(7).unwrap()),
    ]
}

fn random_ideal(seed: u64, field: FieldSpec, n: usize, k: usize, rank: usize, d: u32) -> Vec<JetVector> {
    let mut g = rng(seed);
    let r = ring(field, &vars(n), d);
    (0..k)
        .map(|_| loop {
            let v = random_vector(&mut g, &r, rank, 1, 4, 3);
            if !v.is_zero() {
                break v;
            }
        })
        .collect()
}

/// A random element of `I` plus, when `noise` is set, a random extra term.
fn sample_element(seed: u64, gens: &[JetVector], noise: bool) -> JetVector {
    let mut g = rng(seed ^ 0x5eed);
    let r = gens[0].ring().clone();
    let mut f = JetVector::zero(&r, gens[0].rank());
    for gen in gens {
        f += &gen.mul_jet(&random_jet(&mut g, &r, 0, 2, 2));
    }
    if noise {
        f += &random_vector(&mut g, &r, gens[0].rank(), 0, r.degree(), 1);
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn membership_matches_linear_algebra(
        seed in any::<u64>(),
        field in fields(),
        n in 1usize..=3,
        k in 1usize..=3,
        rank in 1usize..=2,
        d in 3u32..=6,
        noise in any::<bool>(),
    ) {
        let gens = random_ideal(seed, field, n, k, rank, d);
        let s = std_basis(&gens).unwrap();
        let f = sample_element(seed, &gens, noise);
        prop_assert_eq!(s.is_member(&f).unwrap(), oracle_member(&gens, &f));
        if !noise {
            prop_assert!(s.is_member(&f).unwrap());
        }
        // NF(f) ≡ f modulo I
        let nf = s.normal_form(&f).unwrap();
        prop_assert!(oracle_member(&gens, &(&f - &nf)));
    }

    #[test]
    fn standard_monomials_count_the_jet_quotient(
        seed in any::<u64>(),
        field in fields(),
        n in 1usize..=3,
        k in 1usize..=3,
        rank in 1usize..=2,
        d in 3u32..=6,
    ) {
        let gens = random_ideal(seed, field, n, k, rank, d);
        let s = std_basis(&gens).unwrap();
        let outside = exponents_up_to(n, d)
            .into_iter()
            .flat_map(|e| (0..rank).map(move |u| ModuleMonomial::new(e.clone(), u)))
            .filter(|m| !s.in_leading_module(m))
            .count();
        prop_assert_eq!(outside, oracle_quotient_dim(&gens));
        if let Some(dim) = s.quotient_monomials(false).dimension() {
            prop_assert_eq!(dim, oracle_quotient_dim(&gens));
        }
    }

    #[test]
    fn generators_and_transcripts_are_consistent(
        seed in any::<u64>(),
        field in fields(),
        n in 1usize..=3,
        k in 1usize..=3,
        d in 3u32..=6,
    ) {
        let gens = random_ideal(seed, field, n, k, 1, d);
        let s = std_basis(&gens).unwrap();
        for (g, h) in s.generators().iter().zip(s.transcript()) {
            let mut acc = JetVector::zero(g.ring(), g.rank());
            for (c, src) in h.iter().zip(s.source()) {
                acc += &src.mul_jet(c);
            }
            prop_assert!(acc.same_terms(g), "generator {} vs {}", g, acc);
        }
        let f = sample_element(seed, &gens, true);
        let (cof, nf) = s.lift(&f).unwrap();
        let mut back = nf.clone();
        for (c, src) in cof.iter().zip(s.source()) {
            back += &src.mul_jet(c);
        }
        prop_assert!(back.same_terms(&f));
    }

    #[test]
    fn normal_form_ignores_generator_order(
        seed in any::<u64>(),
        field in fields(),
        n in 1usize..=3,
        k in 2usize..=3,
        d in 3u32..=6,
    ) {
        let gens = random_ideal(seed, field, n, k, 1, d);
        let mut rev = gens.clone();
        rev.reverse();
        let a = std_basis(&gens).unwrap();
        let b = std_basis(&rev).unwrap();
        prop_assert_eq!(a.leading_module(), b.leading_module());
        let f = sample_element(seed, &gens, true);
        prop_assert!(a.normal_form(&f).unwrap().same_terms(&b.normal_form(&f).unwrap()));
    }
}

#[test]
fn maximal_ideal_powers_have_the_expected_colength() {
    for n in 1..=3 {
        for p in 1..=4u32 {
            let r = ring(FieldSpec::Rational, &vars(n), 5);
            let gens: Vec<JetVector> = maximal_ideal_power(&r, p)
                .into_iter()
                .map(JetVector::from_jet)
                .collect();
            let s = std_basis(&gens).unwrap();
            assert_eq!(s.complete_level(), Some(p));
            assert!(s.contains_power(p).unwrap());
            let dim = s.quotient_monomials(false).dimension().unwrap();
            assert_eq!(dim, count_standard_monomials(n, p - 1, &[]));
        }
    }
}

#[test]
fn jacobian_of_e6_has_milnor_number_six() {
    // ⟨3x², 4y³⟩ has colength 2·3
    let r = ring(FieldSpec::Rational, &["x", "y"], 6);
    let gens = vec![
        parse_vector("3*x^2", &r).unwrap(),
        parse_vector("4*y^3", &r).unwrap(),
    ];
    let s = std_basis(&gens).unwrap();
    assert_eq!(s.quotient_monomials(false).dimension(), Some(6));
    assert_eq!(oracle_quotient_dim(&gens), 6);
}

#[test]
fn truncation_too_small_is_reported() {
    let r = ring(FieldSpec::Rational, &["x"], 3);
    let gens = vec![parse_vector("x^5", &r).unwrap()];
    assert!(std_basis(&gens).is_err());
    let s = std_basis(&[JetVector::from_jet(Jet::variable(&r, 0))]).unwrap();
    assert!(s.contains_power(4).is_err());
}
