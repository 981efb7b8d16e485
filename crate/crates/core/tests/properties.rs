//! Property tests over randomized polynomials and fields. The runtime
//! selftest suites cover the full catalog of identities with fixed seeds;
//! these exercise the same core laws through proptest's shrinking machinery.

use martinet::poly::{Mono, Poly};
use martinet::vfield::VecField;
use martinet::Rat;
use num_bigint::BigInt;
use proptest::prelude::*;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
}

fn arb_poly(max_terms: usize, max_deg: i32) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (
            (0..=max_deg, 0..=max_deg, 0..=max_deg)
                .prop_filter("bounded total degree", move |(a, b, c)| a + b + c <= max_deg),
            arb_rat(),
        ),
        0..=max_terms,
    )
    .prop_map(|terms| {
        Poly::from_terms(
            terms.into_iter().map(|((a, b, c), q)| (Mono([a, b, c]), q)),
            None,
        )
    })
}

fn arb_field() -> impl Strategy<Value = VecField> {
    (arb_poly(3, 3), arb_poly(3, 3), arb_poly(3, 3))
        .prop_map(|(a, b, c)| VecField::new([a, b, c]))
}

proptest! {
    #[test]
    fn print_parse_roundtrip(p in arb_poly(6, 5)) {
        let back = Poly::parse(&p.to_string()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn ring_distributivity(p in arb_poly(4, 4), q in arb_poly(4, 4), r in arb_poly(4, 4)) {
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
    }

    #[test]
    fn exact_division_inverts_multiplication(p in arb_poly(4, 4), q in arb_poly(4, 4)) {
        prop_assume!(!q.is_zero());
        let back = (&p * &q).divide_exact(&q).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn diff_is_a_derivation(p in arb_poly(4, 4), q in arb_poly(4, 4), v in 0usize..3) {
        let lhs = (&p * &q).diff(v);
        let rhs = &(&p.diff(v) * &q) + &(&p * &q.diff(v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_antisymmetric(v in arb_field(), w in arb_field()) {
        let lhs = v.lie_bracket(&w);
        let rhs = -&w.lie_bracket(&v);
        prop_assert_eq!(lhs, rhs);
    }
}
