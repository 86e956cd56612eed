use std::collections::BTreeMap;

use proptest::prelude::*;
use translie_core::lab::{check_poisson_compatibility, check_tp_compatibility, Sampling};
use translie_core::tp::{build_example_family, classify_poisson, support_closure_window, tp_product, validate_params};
use translie_core::{
    BasisSymbol, BilinearProduct, BracketDef, Element, FiniteFunctional, PoissonClass, Scalar, TernaryBracket,
};

fn element() -> impl Strategy<Value = Element> {
    prop::collection::vec((any::<bool>(), -5i64..=5, -3i64..=3), 0..5).prop_map(|terms| {
        Element::from_terms(terms.into_iter().map(|(l, r, c)| {
            let s = if l { BasisSymbol::l(r) } else { BasisSymbol::m(r) };
            (s, Scalar::from(c))
        }))
    })
}

fn sparse(lo: i64, hi: i64) -> impl Strategy<Value = BTreeMap<i64, Scalar>> {
    prop::collection::btree_map(lo..=hi, (-3i64..=3).prop_map(Scalar::from), 0..3)
}

fn functional() -> impl Strategy<Value = FiniteFunctional> {
    sparse(-1, 1)
        .prop_filter("nonzero", |m| m.values().any(|v| !v.is_zero()))
        .prop_map(FiniteFunctional::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn brackets_alternate(x in element(), y in element(), z in element(), k in -2i64..=2, f in functional()) {
        for b in [BracketDef::AOmegaDelta, BracketDef::OmegaForm, BracketDef::afk(k, f.clone()).unwrap()] {
            let xyz = b.bracket(&x, &y, &z).unwrap();
            prop_assert_eq!(&b.bracket(&y, &x, &z).unwrap(), &(-&xyz));
            prop_assert_eq!(&b.bracket(&x, &z, &y).unwrap(), &(-&xyz));
            prop_assert!(b.bracket(&x, &x, &z).unwrap().is_zero());
        }
    }

    #[test]
    fn example_family_is_always_valid(f in functional(), d_seq in sparse(-2, 2), c in sparse(-2, 2), k in -2i64..=2) {
        let p = build_example_family(f, &d_seq, c, k);
        prop_assert!(validate_params(&p).is_valid());
        let prod = tp_product(p).unwrap();
        for (x, y) in [(BasisSymbol::m(0), BasisSymbol::m(1)), (BasisSymbol::l(2), BasisSymbol::m(-1))] {
            prop_assert_eq!(prod.product_basis(x, y).unwrap(), prod.product_basis(y, x).unwrap());
        }
    }

    #[test]
    fn poisson_class_matches_the_poisson_check(f in functional(), d_seq in sparse(-1, 1), c in sparse(-1, 1), k in -1i64..=1) {
        let p = build_example_family(f.clone(), &d_seq, c, k);
        let class = classify_poisson(&p).unwrap();
        let w = support_closure_window(&p).unwrap();
        let b = BracketDef::afk(k, f).unwrap();
        let prod = tp_product(p).unwrap();
        let s = Sampling::Randomized { samples: 400, seed: 3 };
        prop_assert!(check_tp_compatibility(&b, &prod, w, s).unwrap().passed());
        let poisson = check_poisson_compatibility(&b, &prod, w, Sampling::exhaustive()).unwrap();
        if class == PoissonClass::PoissonAndTransposed {
            prop_assert!(poisson.passed());
        }
    }
}
