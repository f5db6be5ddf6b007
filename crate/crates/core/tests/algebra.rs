use iterperiod::algebra::{GroupElement, Grading};
use iterperiod::modforms::{mono_multiplier, multiplier_value};
use iterperiod::{Alphabet, Monomial, MultiplierSpec, NcPoly, C64};
use num_integer::Integer;
use proptest::prelude::*;

fn unit_series(coeffs: Vec<(f64, f64)>, letters: usize, degree: usize) -> NcPoly {
    let g = Grading::new(letters, degree);
    NcPoly::from_fn(g, |i| if i == 0 { C64::new(1.0, 0.0) } else { C64::new(coeffs[i].0, coeffs[i].1) })
}

fn series_strategy(letters: usize, degree: usize) -> impl Strategy<Value = NcPoly> {
    let len = Grading::new(letters, degree).len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |c| unit_series(c, letters, degree))
}

fn element_strategy() -> impl Strategy<Value = GroupElement> {
    (-1_000_000i64..=1_000_000, -1_000_000i64..=1_000_000, -3i64..=3).prop_filter_map("coprime", |(c, d, k)| {
        if c == 0 && d == 0 {
            return None;
        }
        let e = c.extended_gcd(&d);
        if e.gcd != 1 {
            return None;
        }
        // a d − b c = 1 with a = x, b = −y from x c + y d = 1 after swapping roles
        let (a, b) = (e.y, -e.x);
        // shift by k·(c, d) to vary the top row
        GroupElement::new(a + k * c, b + k * d, c, d).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inverse_and_associativity(x in series_strategy(2, 4), y in series_strategy(2, 4), z in series_strategy(2, 4)) {
        let one = NcPoly::one(x.grading());
        let xi = x.inv().unwrap();
        prop_assert!(x.mul(&xi).unwrap().sub(&one).unwrap().max_norm() <= 1e-12);
        prop_assert!(xi.mul(&x).unwrap().sub(&one).unwrap().max_norm() <= 1e-12);
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert!(l.sub(&r).unwrap().max_norm() <= 1e-12);
        let d = x.mul(&y.add(&z).unwrap()).unwrap().sub(&x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()).unwrap();
        prop_assert!(d.max_norm() <= 1e-12);
    }

    #[test]
    fn word_decomposition_multiplies_back(g in element_strategy()) {
        let w = g.decompose_word();
        prop_assert_eq!(w.element(), g);
        prop_assert!(w.generators().count() == w.len());
    }

    #[test]
    fn weight_and_multiplier_are_additive(m1 in prop::collection::vec(0usize..3, 0..5), m2 in prop::collection::vec(0usize..3, 0..5), g in element_strategy()) {
        let a: Alphabet = "trivial:10,eta:5,eta:13".parse().unwrap();
        let (p, q) = (Monomial::new(m1), Monomial::new(m2));
        let pq = p.concat(&q);
        prop_assert_eq!(a.weight_of(&pq).unwrap(), a.weight_of(&p).unwrap() + a.weight_of(&q).unwrap());
        prop_assert_eq!(a.eta_count_of(&pq).unwrap(), a.eta_count_of(&p).unwrap() + a.eta_count_of(&q).unwrap());
        let v = mono_multiplier(&a, &pq, &g).unwrap();
        let w = mono_multiplier(&a, &p, &g).unwrap() * mono_multiplier(&a, &q, &g).unwrap();
        prop_assert!((v - w).norm() <= 1e-12);
    }
}

#[test]
fn eta_24_multiplier_is_trivial() {
    let g = GroupElement::new(5, 2, 7, 3).unwrap();
    let v = multiplier_value(MultiplierSpec::from_eta_count(24), &g);
    assert!((v - 1.0).norm() <= 1e-15);
}
