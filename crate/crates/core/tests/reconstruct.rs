use std::collections::BTreeMap;
use std::sync::Arc;

use iterperiod::algebra::{GroupElement, Grading};
use iterperiod::iterint::QuadConfig;
use iterperiod::modforms::delta;
use iterperiod::modforms::exact::dim_cusp;
use iterperiod::reconstruct::{
    build_catalog, collection_from_coordinates, coordinates, deconjugate, injectivity_probe, peel, peel_panel,
    roundtrip, Cocycle, PeelOptions, TabulatedCocycle,
};
use iterperiod::{Alphabet, CuspCollection, Monomial, NcPoly, C64};

fn mono(s: &str) -> Monomial {
    s.parse().unwrap()
}

fn real(c: &[f64]) -> Vec<C64> {
    c.iter().map(|&x| C64::new(x, 0.0)).collect()
}

#[test]
fn catalog_contents() {
    let cfg = QuadConfig::default();
    let a: Alphabet = "trivial:10".parse().unwrap();
    let cat = build_catalog(&a, 2, &[], &cfg).unwrap();
    let keys: Vec<String> = cat.monomials().map(|m| m.to_string()).collect();
    assert_eq!(keys, ["A1", "A1*A1"]);
    assert_eq!(cat.get(&mono("A1*A1")).unwrap().basis.len(), dim_cusp(22));

    let a: Alphabet = "eta:1".parse().unwrap();
    let cat = build_catalog(&a, 5, &[], &cfg).unwrap();
    assert_eq!(cat.monomials().map(|m| m.degree()).collect::<Vec<_>>(), [1]);

    let a: Alphabet = "eta:4".parse().unwrap();
    let cat = build_catalog(&a, 7, &[], &cfg).unwrap();
    assert_eq!(cat.monomials().map(|m| m.degree()).collect::<Vec<_>>(), [1, 7]);

    // dimensions agree with the dimension formula for every trivial monomial
    let a: Alphabet = "trivial:10,trivial:4".parse().unwrap();
    let cat = build_catalog(&a, 3, &[], &cfg).unwrap();
    for m in Grading::new(2, 3).monomials().filter(|m| m.degree() > 0) {
        let k = a.weight_of(&m).unwrap().twice() / 2 + 2;
        let expect = dim_cusp(k as i64);
        assert_eq!(cat.get(&m).map(|e| e.basis.len()).unwrap_or(0), expect, "{m}");
    }
}

#[test]
fn trivial_cocycle_peels_to_zero() {
    let cfg = QuadConfig::default();
    let a: Alphabet = "trivial:10,trivial:4".parse().unwrap();
    let cat = build_catalog(&a, 2, &peel_panel(), &cfg).unwrap();
    let (h, rep) = peel(&Cocycle::trivial(a, 2), &cat, &PeelOptions::default(), &cfg).unwrap();
    assert!(h.is_zero());
    assert_eq!(rep.final_residual.max, 0.0);
}

#[test]
fn single_delta_roundtrip() {
    let cfg = QuadConfig::default();
    let a: Alphabet = "trivial:10".parse().unwrap();
    let cat = build_catalog(&a, 2, &peel_panel(), &cfg).unwrap();
    let coords = BTreeMap::from([(mono("A1"), real(&[1.0]))]);
    let (rec, rep) = roundtrip(&cat, &coords, &PeelOptions::default(), &cfg).unwrap();
    let c = coordinates(rec.get(&mono("A1")).unwrap(), &cat.get(&mono("A1")).unwrap().basis);
    assert!((c[0] - 1.0).norm() <= 1e-6);
    assert!(rep.max_relative_error <= 1e-6);
}

#[test]
fn noncommutative_roundtrip() {
    let cfg = QuadConfig::default();
    let a: Alphabet = "trivial:10,trivial:4".parse().unwrap();
    let cat = build_catalog(&a, 2, &peel_panel(), &cfg).unwrap();
    let coords = BTreeMap::from([
        (mono("A1"), real(&[1.0])),
        (mono("A1*A2"), real(&[0.7])),
        (mono("A2*A1"), real(&[-0.3])),
    ]);
    let (_, rep) = roundtrip(&cat, &coords, &PeelOptions::default(), &cfg).unwrap();
    assert!(rep.max_relative_error <= 1e-5, "{:?}", rep.relative_errors);
    for d in &rep.peel.degrees {
        assert!(d.abelian_check.unwrap() <= 1e-6);
    }
}

#[test]
fn off_catalog_component_is_rejected() {
    let cfg = QuadConfig::default();
    let a: Alphabet = "trivial:10,trivial:4".parse().unwrap();
    let cat = build_catalog(&a, 1, &peel_panel(), &cfg).unwrap();
    // an A2 coefficient that no weight-6 cusp form can produce
    let grading = Grading::new(2, 1);
    let x = Cocycle::from_fn(
        a.clone(),
        1,
        Arc::new(move |g, t| {
            let mut p = NcPoly::one(grading);
            if g.c() != 0 {
                p.set_coeff(&mono("A2"), t * 0.01).unwrap();
            }
            Ok(p)
        }),
    );
    assert!(peel(&x, &cat, &PeelOptions::default(), &cfg).is_err());
}

#[test]
fn twisted_cocycle_after_deconjugation() {
    let cfg = QuadConfig::default();
    let a: Alphabet = "trivial:10".parse().unwrap();
    let cat = build_catalog(&a, 2, &peel_panel(), &cfg).unwrap();
    let coords = BTreeMap::from([(mono("A1"), real(&[1.25])), (mono("A1*A1"), real(&[-0.5]))]);
    let h = collection_from_coordinates(&cat, &coords).unwrap();
    let grading = h.grading();
    let n = Arc::new(move |t: C64| {
        let mut p = NcPoly::one(grading);
        p.set_coeff(&mono("A1"), C64::new(0.3, 0.0) + t * t * 0.1)?;
        Ok(p)
    });
    let x = Cocycle::psi(&h, cfg).twist(n.clone());
    let back = deconjugate(&x, n.clone());
    for t in peel_panel() {
        let lhs = back.eval(&GroupElement::S, t).unwrap();
        let rhs = Cocycle::psi(&h, cfg).eval(&GroupElement::S, t).unwrap();
        let scale = rhs.max_norm();
        assert!(lhs.sub(&rhs).unwrap().max_norm() <= 1e-12 * scale, "{} {}", lhs.sub(&rhs).unwrap().max_norm(), scale);
    }
    let (rec, _) = peel(&back, &cat, &PeelOptions::default(), &cfg).unwrap();
    for (m, c) in &coords {
        let got = coordinates(rec.get(m).unwrap(), &cat.get(m).unwrap().basis);
        assert!((got[0] - c[0]).norm() <= 1e-6 * c[0].norm(), "{m}");
    }
    // without undoing the twist the input is not of the form Ψ(h)
    assert!(peel(&x, &cat, &PeelOptions::default(), &cfg).is_err());
}

#[test]
fn tabulated_cocycle_roundtrip() {
    let cfg = QuadConfig::default();
    let a: Alphabet = "trivial:10,trivial:4".parse().unwrap();
    let cat = build_catalog(&a, 2, &peel_panel(), &cfg).unwrap();
    let coords = BTreeMap::from([(mono("A1"), real(&[-1.5])), (mono("A2*A1"), real(&[0.8]))]);
    let h = collection_from_coordinates(&cat, &coords).unwrap();
    let tab = TabulatedCocycle::from_cocycle(&Cocycle::psi(&h, cfg), &peel_panel()).unwrap();
    let json = serde_json::to_string(&tab).unwrap();
    let back: TabulatedCocycle = serde_json::from_str(&json).unwrap();
    let x = back.into_cocycle().unwrap();
    assert!(x.eval(&GroupElement::S, C64::new(0.0, -3.0)).is_err());
    let (rec, rep) = peel(&x, &cat, &PeelOptions::default(), &cfg).unwrap();
    assert!(rep.degrees.iter().all(|d| d.abelian_check.is_none()));
    let got = coordinates(rec.get(&mono("A2*A1")).unwrap(), &cat.get(&mono("A2*A1")).unwrap().basis);
    assert!((got[0] - 0.8).norm() <= 1e-6);
}

#[test]
fn injectivity_margins() {
    let cfg = QuadConfig::default();
    let panel = peel_panel();
    let a: Alphabet = "trivial:10".parse().unwrap();
    let one = |c: f64| {
        let mut h = CuspCollection::empty(a.clone(), 2);
        h.insert(mono("A1"), delta(200).scale(C64::new(c, 0.0))).unwrap();
        h
    };
    let same = injectivity_probe(&one(1.0), &one(1.0), &panel, &cfg).unwrap();
    assert_eq!(same.first_differing_degree, None);
    assert_eq!(same.margin, 0.0);
    let r = injectivity_probe(&one(1.0), &one(2.0), &panel, &cfg).unwrap();
    assert_eq!(r.first_differing_degree, Some(1));
    assert!(r.margin > 1e-6, "{}", r.margin);

    let cat = build_catalog(&a, 2, &[], &cfg).unwrap();
    let h1 = collection_from_coordinates(&cat, &BTreeMap::from([(mono("A1"), real(&[1.0])), (mono("A1*A1"), real(&[0.5]))]))
        .unwrap();
    let h2 = collection_from_coordinates(&cat, &BTreeMap::from([(mono("A1"), real(&[1.0])), (mono("A1*A1"), real(&[-0.5]))]))
        .unwrap();
    let r = injectivity_probe(&h1, &h2, &panel, &cfg).unwrap();
    assert!(r.margins[&1] <= 1e-10);
    assert_eq!(r.first_differing_degree, Some(2));
    assert!(r.margin > 1e-6);
}
