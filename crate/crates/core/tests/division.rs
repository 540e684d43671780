mod common;

use common::*;
use jetalg::division::{divide, division_sequence, shrink_radius, tails_are_small};
use jetalg::parse::parse_vector;
use jetalg::{FieldSpec, JetVector, RadiusVector};
use num_rational::BigRational;
use proptest::prelude::*;

fn fields() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::Rational),
        Just(FieldSpec::padic(3).unwrap()),
        Just(FieldSpec::finite(5).unwrap()),
    ]
}

fn random_problem(seed: u64, field: FieldSpec, n: usize, m: usize, rank: usize, d: u32) -> (JetVector, Vec<JetVector>) {
    let mut g = rng(seed);
    let r = ring(field, &vars(n), d);
    let f = random_vector(&mut g, &r, rank, 0, d, 6);
    let divisors = (0..m)
        .map(|_| loop {
            let v = random_vector(&mut g, &r, rank, 1, 3.min(d), 3);
            if !v.is_zero() {
                break v;
            }
        })
        .collect();
    (f, divisors)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn division_identity_and_remainder_condition(
        seed in any::<u64>(),
        field in fields(),
        n in 1usize..=3,
        m in 1usize..=3,
        rank in 1usize..=2,
        d in 2u32..=6,
    ) {
        let (f, divisors) = random_problem(seed, field, n, m, rank, d);
        let res = divide(&f, &divisors, false).unwrap();
        let back = recombine(&divisors, &res.quotients, &res.remainder);
        prop_assert!(back.same_terms(&f), "f = {f}, back = {back}");

        let lms: Vec<_> = divisors.iter().map(|g| g.leading_monomial().unwrap()).collect();
        for (mono, _) in res.remainder.terms() {
            prop_assert!(!lms.iter().any(|l| l.divides(&mono)));
        }
        if let Some(lf) = f.leading_monomial() {
            for (q, g) in res.quotients.iter().zip(&divisors) {
                if let Some(lq) = g.mul_jet(q).leading_monomial() {
                    prop_assert!(lq <= lf);
                }
            }
        }
    }

    #[test]
    fn division_sequence_ends_in_zero_with_rising_order(
        seed in any::<u64>(),
        n in 1usize..=3,
        d in 2u32..=6,
    ) {
        let (f, divisors) = random_problem(seed, FieldSpec::Rational, n, 2, 1, d);
        let seq = division_sequence(&f, &divisors).unwrap();
        prop_assert!(seq.last().unwrap().is_zero());
        for w in seq.windows(2) {
            if let (Some(a), Some(b)) = (w[0].leading_monomial(), w[1].leading_monomial()) {
                prop_assert!(b < a);
            }
        }
    }

    #[test]
    fn certificates_hold_for_polynomial_inputs(
        seed in any::<u64>(),
        field in fields(),
        n in 1usize..=2,
        m in 1usize..=2,
        d in 2u32..=5,
    ) {
        let (f, divisors) = random_problem(seed, field, n, m, 1, d);
        let res = divide(&f, &divisors, true).unwrap();
        let cert = res.certificate.expect("rank one divisors are certifiable");
        prop_assert!(cert.verified);
        prop_assert!(tails_are_small(&divisors, &BigRational::new(1.into(), 2.into()), &cert.delta));
    }

    #[test]
    fn shrink_radius_stays_below_the_start(
        seed in any::<u64>(),
        n in 1usize..=3,
    ) {
        let (_, divisors) = random_problem(seed, FieldSpec::Rational, n, 2, 1, 4);
        let rho_bar = RadiusVector::uniform(n, BigRational::new(3.into(), 4.into())).unwrap();
        let eps = BigRational::new(1.into(), 3.into());
        let delta = shrink_radius(&divisors, &eps, &rho_bar).unwrap();
        prop_assert!(delta.le(&rho_bar));
        prop_assert!(tails_are_small(&divisors, &eps, &delta));
    }
}

#[test]
fn truncated_dividend_keeps_identity_modulo_the_truncation() {
    let r = ring(FieldSpec::Rational, &["x", "y"], 5);
    let f = parse_vector("x^3 + x*y^5 + y^7", &r).unwrap();
    assert!(!f.is_exact());
    let g = vec![parse_vector("x - y^2", &r).unwrap()];
    let res = divide(&f, &g, true).unwrap();
    assert!(!res.remainder.is_exact());
    assert!(recombine(&g, &res.quotients, &res.remainder).same_terms(&f));
    let cert = res.certificate.unwrap();
    assert!(!cert.verified);
}

#[test]
fn remainder_agrees_with_naive_reduction_for_monomial_divisors() {
    // Division by monomials just deletes the divisible terms.
    let mut g = rng(7);
    let r = ring(FieldSpec::Rational, &["x", "y", "z"], 6);
    let divisors = vec![
        parse_vector("x^2", &r).unwrap(),
        parse_vector("y*z", &r).unwrap(),
    ];
    for _ in 0..20 {
        let f = random_vector(&mut g, &r, 1, 0, 6, 10);
        let res = divide(&f, &divisors, false).unwrap();
        let mut expect = f.clone();
        for (mono, c) in f.terms() {
            let e = mono.exponent.entries();
            if e[0] >= 2 || (e[1] >= 1 && e[2] >= 1) {
                expect.add_term(mono, -c.clone());
            }
        }
        assert!(res.remainder.same_terms(&expect));
    }
}
