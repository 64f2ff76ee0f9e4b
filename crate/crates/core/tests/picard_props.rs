use proptest::prelude::*;

use burniat_core::bicover::{ixn, CurveX, QDivisorX};
use burniat_core::picard::{h0, is_effective_cone, is_effective_reduction, is_nef, negative_curves, pair, reduce_to_nef, DivClass};
use burniat_core::rational::{fmt_q, parse_q, q, qr};

fn class(r: i64) -> impl Strategy<Value = DivClass> {
    prop::array::uniform5(-r..=r).prop_map(DivClass::from_ints)
}

proptest! {
    #[test]
    fn pairing_is_symmetric_and_bilinear(a in class(6), b in class(6), c in class(6), k in -5i64..=5) {
        prop_assert_eq!(pair(&a, &b), pair(&b, &a));
        prop_assert_eq!(pair(&(&a + &b), &c), pair(&a, &c) + pair(&b, &c));
        prop_assert_eq!(pair(&a.scale(&q(k)), &b), q(k) * pair(&a, &b));
    }

    #[test]
    fn effectivity_procedures_agree(c in class(5)) {
        prop_assert_eq!(is_effective_cone(&c), is_effective_reduction(&c));
    }

    #[test]
    fn sections_imply_effectivity(c in class(5)) {
        if h0(&c).unwrap() > 0 {
            prop_assert!(is_effective_cone(&c));
        }
    }

    #[test]
    fn reduction_ends_in_a_nef_class(c in class(5)) {
        if let Some(nef) = reduce_to_nef(&c) {
            prop_assert!(is_nef(&nef));
            prop_assert!(is_effective_cone(&(&c - &nef)));
        }
    }

    #[test]
    fn sums_of_negative_curves_are_effective(ks in prop::array::uniform10(0i64..4)) {
        let mut c = DivClass::zero();
        for (k, n) in ks.iter().zip(negative_curves()) {
            c = &c + &n.scale(&q(*k));
        }
        prop_assert!(is_effective_cone(&c));
        prop_assert!(is_effective_reduction(&c));
    }

    #[test]
    fn projection_formula(a in class(6), b in class(6)) {
        let pa = QDivisorX::single(CurveX::pull(a.clone(), "a"), q(1));
        let pb = QDivisorX::single(CurveX::pull(b.clone(), "b"), q(1));
        prop_assert_eq!(ixn(&pa, &pb).unwrap(), q(4) * pair(&a, &b));
    }

    #[test]
    fn rationals_round_trip(n in -500i64..500, d in 1i64..60) {
        let x = qr(n, d);
        prop_assert_eq!(parse_q(&fmt_q(&x)), Some(x));
    }
}
