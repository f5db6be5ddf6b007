use iterperiod::iterint::{r_direct_forms, segment_j, vertical_J, Endpoint, QuadConfig, YMaxPolicy};
use iterperiod::modforms::{delta, g16};
use iterperiod::{Alphabet, CuspCollection, Monomial, NcPoly, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn delta_product(y: f64) -> f64 {
    // Δ(iy) from the product, using Δ(iy) = y^{-12} Δ(i/y) below height 1
    let (y, scale) = if y < 1.0 { (1.0 / y, (1.0 / y).powi(12)) } else { (y, 1.0) };
    let q = (-2.0 * std::f64::consts::PI * y).exp();
    let mut p = q;
    let mut qn = q;
    for _ in 0..200 {
        p *= (1.0 - qn).powi(24);
        qn *= q;
        if qn < 1e-300 {
            break;
        }
    }
    p * scale
}

fn pair_collection() -> CuspCollection {
    let a: Alphabet = "trivial:10,trivial:14".parse().unwrap();
    let mut h = CuspCollection::empty(a, 2);
    h.insert(Monomial::letter(0), delta(200)).unwrap();
    h.insert(Monomial::letter(1), g16(200)).unwrap();
    h
}

#[test]
fn trivial_cases() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    let t = C64::new(0.0, -1.0);
    let z = Endpoint::point(C64::new(0.2, 1.3));
    assert_eq!(r_direct_forms(&[], Endpoint::Infinity, z, t, &cfg).unwrap(), C64::new(1.0, 0.0));
    assert_eq!(r_direct_forms(&[&d, &d], z, z, t, &cfg).unwrap(), C64::new(0.0, 0.0));
    assert!(r_direct_forms(&[&d], z, Endpoint::Infinity, C64::new(0.0, 1.0), &cfg).is_err());
}

#[test]
fn delta_period_against_trapezoid() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    for t in [C64::new(0.0, -1.0), C64::new(0.6, -1.1), C64::new(-1.3, -0.5)] {
        let direct = r_direct_forms(&[&d], Endpoint::Infinity, Endpoint::Cusp { num: 0, den: 1 }, t, &cfg).unwrap();
        // i ∫_0^∞ Δ(iy)(iy − t)^10 dy with y = e^u
        let h = 2e-3;
        let mut acc = C64::new(0.0, 0.0);
        let mut u = -7.0;
        while u <= 5.0 {
            let y = f64::exp(u);
            acc += (C64::new(0.0, y) - t).powi(10) * delta_product(y) * y;
            u += h;
        }
        let oracle = C64::new(0.0, 1.0) * acc * h;
        assert!((direct - oracle).norm() < 1e-8, "t={t}: {direct} vs {oracle}");
    }
}

#[test]
fn ode_matches_direct_quadrature() {
    let h = pair_collection();
    let cfg = QuadConfig::default();
    let d = delta(200);
    let g = g16(200);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let z0 = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
        let t = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.4..-0.4));
        let j = vertical_J(&h, z0, t, &cfg).unwrap();
        let pairs: [(&str, Vec<&iterperiod::CuspForm>); 4] = [
            ("A1", vec![&d]),
            ("A2", vec![&g]),
            ("A1*A2", vec![&d, &g]),
            ("A2*A1", vec![&g, &d]),
        ];
        for (m, forms) in pairs {
            let r = r_direct_forms(&forms, Endpoint::point(z0), Endpoint::Infinity, t, &cfg).unwrap();
            let c = j.coeff(&m.parse().unwrap()).unwrap();
            assert!((r - c).norm() < 1e-8, "{m} z0={z0} t={t}: {r} vs {c}");
        }
    }
}

#[test]
fn zero_length_ray_is_one() {
    let h = pair_collection();
    let z0 = C64::new(0.1, 1.5);
    let cfg = QuadConfig { y_max: YMaxPolicy::Explicit(1.5), ..QuadConfig::default() };
    assert_eq!(vertical_J(&h, z0, C64::new(0.0, -1.0), &cfg).unwrap(), NcPoly::one(h.grading()));
}

#[test]
fn composition_and_inverse() {
    let h = pair_collection();
    let cfg = QuadConfig::default();
    let t = C64::new(0.3, -0.9);
    let (z, y, x) = (C64::new(0.2, 2.5), C64::new(0.2, 1.2), C64::new(0.2, 0.6));
    let zx = segment_j(&h, z, x, t, &cfg).unwrap();
    let zy = segment_j(&h, z, y, t, &cfg).unwrap();
    let yx = segment_j(&h, y, x, t, &cfg).unwrap();
    let r = zx.sub(&zy.mul(&yx).unwrap()).unwrap().max_norm();
    assert!(r < 10.0 * 1e-10, "composition residual {r}");
    let xy = segment_j(&h, x, y, t, &cfg).unwrap();
    let r = xy.mul(&yx).unwrap().sub(&NcPoly::one(h.grading())).unwrap().max_norm();
    assert!(r < 10.0 * 1e-10, "inverse residual {r}");
}

#[test]
fn decomposition_relations() {
    use iterperiod::cocycle::default_panel;
    use iterperiod::iterint::{verify_rel2, verify_rel3};
    let cfg = QuadConfig::default();
    let d = delta(200);
    let ends = (Endpoint::Infinity, Endpoint::Cusp { num: 0, den: 1 }, Endpoint::point(C64::new(0.4, 1.1)));
    let r2 = verify_rel2([&d, &d], ends, &default_panel(), &cfg).unwrap();
    assert!(r2.max <= 1e-7, "rel2 {}", r2.max);
    let r3 = verify_rel3([&d, &d, &d], ends, &default_panel(), &cfg).unwrap();
    assert!(r3.max <= 1e-7, "rel3 {}", r3.max);
}
