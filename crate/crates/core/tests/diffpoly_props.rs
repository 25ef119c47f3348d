use kdvgrav::rational::frac;
use kdvgrav::{DiffPoly, Jet};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = DiffPoly> {
    (
        -6i64..=6,
        1i64..=5,
        0u32..=2,
        prop::collection::vec(0u32..=2, 0..=4),
    )
        .prop_map(|(num, den, genus, exps)| {
            DiffPoly::term(frac(num, den), genus, Jet::from_exponents(exps))
        })
}

fn poly() -> impl Strategy<Value = DiffPoly> {
    prop::collection::vec(term(), 0..=5)
        .prop_map(|terms| terms.into_iter().fold(DiffPoly::zero(), |acc, t| acc + t))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn text_round_trip(p in poly()) {
        let back: DiffPoly = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn json_round_trip(p in poly()) {
        prop_assert_eq!(DiffPoly::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &DiffPoly::one(), a);
    }

    #[test]
    fn dx_is_a_derivation(a in poly(), b in poly()) {
        let lhs = (&a * &b).dx();
        let rhs = &(&a.dx() * &b) + &(&a * &b.dx());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn total_derivatives_are_variationally_trivial(a in poly()) {
        prop_assert!(a.dx().var_delta().is_zero());
    }

    #[test]
    fn antiderivative_inverts_dx(a in poly()) {
        let without_constant = a.filter(|m| !m.jet.is_one());
        let q = a.dx().antiderivative().unwrap();
        prop_assert_eq!(q, without_constant);
    }
}

#[test]
fn u0_u2_is_not_exact() {
    let p: DiffPoly = "u0*u2".parse().unwrap();
    assert!(p.antiderivative().is_err());
}
