use std::sync::Arc;

use iterperiod::algebra::GroupElement;
use iterperiod::cocycle::{
    default_panel, eta_collection, eta_example_check, psi, psi_based, psi_series, slash_value, verify_cocycle,
    verify_equivariance, EvalContext, SeriesFn,
};
use iterperiod::iterint::{r_direct_forms, vertical_J, Endpoint, QuadConfig};
use iterperiod::modforms::delta;
use iterperiod::{Alphabet, CuspCollection, Monomial, NcPoly, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn delta_collection(degree: usize) -> CuspCollection {
    let a: Alphabet = "trivial:10".parse().unwrap();
    let mut h = CuspCollection::empty(a, degree);
    h.insert(Monomial::letter(0), delta(200)).unwrap();
    h
}

fn small_element(rng: &mut ChaCha8Rng) -> GroupElement {
    let words = [
        GroupElement::S,
        GroupElement::T,
        GroupElement::T_INV,
        GroupElement::MINUS_IDENTITY,
    ];
    let mut g = GroupElement::IDENTITY;
    for _ in 0..rng.gen_range(1..5) {
        g = g * words[rng.gen_range(0..4)];
    }
    g
}

#[test]
fn slash_basics() {
    let h = delta_collection(2);
    let ctx = EvalContext::for_collection(&h, QuadConfig::default());
    let t = C64::new(0.1, -0.9);
    let one = SeriesFn::One.slash(GroupElement::new(2, 1, 1, 1).unwrap());
    assert_eq!(one.eval(t, &ctx).unwrap(), NcPoly::one(h.grading()));
    let f = SeriesFn::jvert(Arc::new(h.clone()), C64::new(0.0, 1.0));
    assert_eq!(f.clone().slash(GroupElement::IDENTITY).eval(t, &ctx).unwrap(), f.eval(t, &ctx).unwrap());
}

#[test]
fn slash_is_an_antihomomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [1u8, 4, 7, 24] {
        let h = eta_collection(n, 3).unwrap();
        let cfg = QuadConfig::default();
        let ctx = EvalContext::for_collection(&h, cfg);
        // a fixed series with generic coefficients in every degree
        let base = SeriesFn::jvert(Arc::new(h.clone()), C64::new(0.13, 1.1));
        for _ in 0..6 {
            let g = small_element(&mut rng);
            let d = small_element(&mut rng);
            let t = C64::new(rng.gen_range(-0.6..0.6), rng.gen_range(-1.4..-0.6));
            let two = base.clone().slash(g).slash(d).eval(t, &ctx).unwrap();
            let one = base.clone().slash(g * d).eval(t, &ctx).unwrap();
            let r = two.sub(&one).unwrap().max_norm();
            assert!(r <= 1e-10 * one.max_norm().max(1.0), "N={n} g={g} d={d}: {r}");
        }
    }
}

#[test]
fn psi_trivial_values() {
    let h = delta_collection(3);
    let cfg = QuadConfig::default();
    let t = C64::new(0.0, -1.0);
    let z0 = C64::new(0.0, 1.0);
    assert_eq!(psi(&h, &GroupElement::T, z0, t, &cfg).unwrap(), NcPoly::one(h.grading()));
    let zero = CuspCollection::empty(h.alphabet().clone(), 3);
    for g in [GroupElement::S, GroupElement::T * GroupElement::S] {
        assert_eq!(psi(&zero, &g, z0, t, &cfg).unwrap(), NcPoly::one(h.grading()));
        assert_eq!(psi(&h, &g, z0, t, &cfg).unwrap().constant(), C64::new(1.0, 0.0));
    }
}

#[test]
fn psi_degree_one_is_period_integral() {
    let h = delta_collection(3);
    let cfg = QuadConfig::default();
    let d = delta(200);
    for t in default_panel() {
        let p = psi(&h, &GroupElement::S, C64::new(0.0, 1.0), t, &cfg).unwrap();
        let r = r_direct_forms(&[&d], Endpoint::Cusp { num: 0, den: 1 }, Endpoint::Infinity, t, &cfg).unwrap();
        let c = p.coeff(&Monomial::letter(0)).unwrap();
        assert!((c - r).norm() < 1e-7, "t={t}: {c} vs {r}");
    }
}

#[test]
fn cocycle_relation() {
    let h = delta_collection(3);
    let cfg = QuadConfig::default();
    let (s, t) = (GroupElement::S, GroupElement::T);
    for (g, d) in [(t, t), (s, s), (s, t), (t, s), (t * s, s * t)] {
        let rep = verify_cocycle(&h, &g, &d, &default_panel(), &cfg).unwrap();
        assert!(rep.max <= 1e-7, "{g},{d}: {:?}", rep.per_degree_max);
        if g == t && d == t {
            assert_eq!(rep.max, 0.0);
        }
    }
}

#[test]
fn equivariance() {
    let h = delta_collection(2);
    let cfg = QuadConfig::default();
    let ends = (Endpoint::Infinity, Endpoint::point(C64::new(0.0, 1.3)));
    for g in [GroupElement::IDENTITY, GroupElement::T, GroupElement::S] {
        let rep = verify_equivariance(&h, &g, ends, &default_panel(), &cfg).unwrap();
        assert!(rep.max <= 1e-8, "{g}: {:?}", rep.per_degree_max);
    }
    let h = eta_collection(5, 2).unwrap();
    for g in [GroupElement::S, GroupElement::new(2, 1, 1, 1).unwrap(), GroupElement::MINUS_IDENTITY] {
        let rep = verify_equivariance(&h, &g, ends, &default_panel(), &cfg).unwrap();
        assert!(rep.max <= 1e-8, "eta5 {g}: {:?}", rep.per_degree_max);
    }
}

#[test]
fn eta_examples() {
    let cfg = QuadConfig::default();
    for n in [1u8, 4, 12, 24] {
        let rep = eta_example_check(n, 3, &default_panel(), &cfg).unwrap();
        assert!(rep.max() <= 1e-7, "N={n}: {:?} {:?}", rep.inversion.per_degree_max, rep.braid.per_degree_max);
    }
}

#[test]
fn base_point_twist() {
    let h = delta_collection(3);
    let cfg = QuadConfig::default();
    let ctx = EvalContext::for_collection(&h, cfg);
    let (z0, z1) = (C64::new(0.0, 1.0), C64::new(0.3, 1.7));
    let g = GroupElement::S;
    for t in default_panel() {
        // n = J(z1, z0) = J(z1, ∞) J(z0, ∞)^{-1}
        let n_at = |u: C64| -> NcPoly {
            let a = vertical_J(&h, z1, u, &cfg).unwrap();
            let b = vertical_J(&h, z0, u, &cfg).unwrap();
            a.mul(&b.inv().unwrap()).unwrap()
        };
        let n = n_at(t);
        let n_g = slash_value(h.alphabet(), &n_at(g.act(t)), &g, t).unwrap();
        let p0 = psi_based(&h, &g, z0, t, &cfg).unwrap();
        let p1 = psi_based(&h, &g, z1, t, &cfg).unwrap();
        let twisted = n_g.mul(&p0).unwrap().mul(&n.inv().unwrap()).unwrap();
        let r = p1.sub(&twisted).unwrap().max_norm();
        assert!(r <= 1e-8, "t={t}: {r}");
        // the ray-based Ψ does not depend on z0 at all
        let a = psi_series(Arc::new(h.clone()), g, z0).eval(t, &ctx).unwrap();
        let b = psi_series(Arc::new(h.clone()), g, z1).eval(t, &ctx).unwrap();
        assert!(a.sub(&b).unwrap().max_norm() <= 1e-8);
    }
}
