use iterperiod::cocycle::{default_panel, psi};
use iterperiod::iterint::{r_direct_forms, Endpoint, QuadConfig};
use iterperiod::mlv::{
    double_moments, double_period_polynomial, functional_equation_probe, moment, moments, period_polynomial,
    reextract_coefficients, scaled_taylor, verify_shuffle,
};
use iterperiod::modforms::{delta, g16};
use iterperiod::{Alphabet, CuspCollection, CuspForm, GroupElement, Monomial, C64};

const PI: f64 = std::f64::consts::PI;

/// f(iy) from the stored q-expansion, folding y < 1 with f(iy) = (i/y)^W f(i/y).
fn q_value(f: &CuspForm, y: f64) -> C64 {
    let big_w = f.weight().twice() / 2;
    let (yy, factor) = if y < 1.0 { (1.0 / y, C64::new(0.0, 1.0 / y).powi(big_w)) } else { (y, C64::new(1.0, 0.0)) };
    let q = (-2.0 * PI * yy).exp();
    // integral κ for trivial multipliers: a_n multiplies q^{n+1}
    let mut acc = C64::new(0.0, 0.0);
    let mut qn = q;
    for a in f.expansion().coeffs() {
        acc += a * qn;
        qn *= q;
        if qn < 1e-300 {
            break;
        }
    }
    acc * factor
}

/// i^{k+1}∫_0^∞ f(iy) y^k dy on a fixed grid in log y.
fn moment_oracle(f: &CuspForm, k: i32) -> C64 {
    let (lo, hi, n) = (-4.5f64, 3.6f64, 16000);
    let h = (hi - lo) / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..=n {
        let u = lo + j as f64 * h;
        let y = u.exp();
        let w = if j == 0 || j == n { 0.5 } else { 1.0 };
        acc += q_value(f, y) * (w * y.powi(k + 1));
    }
    acc * h * C64::new(0.0, 1.0).powi(k + 1)
}

#[test]
fn moments_match_fixed_grid_oracle() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    let ms = moments(&d, &cfg).unwrap();
    for k in 0..=10 {
        let o = moment_oracle(&d, k);
        assert!((ms[k as usize] - o).norm() <= 1e-9, "k={k}: {} vs {}", ms[k as usize], o);
    }
    let g = g16(200);
    let ms = moments(&g, &cfg).unwrap();
    for k in [0, 3, 7, 14] {
        let o = moment_oracle(&g, k);
        assert!((ms[k as usize] - o).norm() <= 1e-9, "g16 k={k}");
    }
}

#[test]
fn moments_are_linear() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    let f = delta(200).scale(C64::new(0.5, -1.5));
    let a = C64::new(2.0, 0.5);
    let b = C64::new(-0.75, 1.0);
    let comb = CuspForm::linear_combination(&[(a, &d), (b, &f)]).unwrap();
    for k in [0, 5, 10] {
        let lhs = moment(&comb, k, &cfg).unwrap();
        let rhs = a * moment(&d, k, &cfg).unwrap() + b * moment(&f, k, &cfg).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12, "k={k}");
    }
}

#[test]
fn period_polynomial_of_delta() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    let p = period_polynomial(&d, &cfg).unwrap();
    assert_eq!(p.coeffs.len(), 11);
    let a: Alphabet = "trivial:10".parse().unwrap();
    let mut h = CuspCollection::empty(a, 1);
    h.insert(Monomial::letter(0), d.clone()).unwrap();
    let s = GroupElement::new(0, -1, 1, 0).unwrap();
    for t in default_panel() {
        let direct = r_direct_forms(&[&d], Endpoint::Infinity, Endpoint::Cusp { num: 0, den: 1 }, t, &cfg).unwrap();
        assert!((p.eval(t) - direct).norm() <= 1e-8, "t={t}");
        assert!((p.eval_slash_s(t) + p.eval(t)).norm() <= 1e-8, "odd under S at t={t}");
        let ps = psi(&h, &s, C64::new(0.0, 1.0), t, &cfg).unwrap();
        assert!((p.eval(t) + ps.coeff(&Monomial::letter(0)).unwrap()).norm() <= 1e-8);
    }
    let z = period_polynomial(&d.scale(C64::new(0.0, 0.0)), &cfg).unwrap();
    assert!(z.is_zero());
}

#[test]
fn double_period_polynomial_matches_nested_quadrature() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    let g = g16(200);
    for (f1, f2) in [(&d, &d), (&d, &g), (&g, &d)] {
        let p2 = double_period_polynomial(f1, f2, &cfg).unwrap();
        assert_eq!(p2.coeffs.len() as i32, p2.total_weight() + 1);
        for t in default_panel() {
            let direct =
                r_direct_forms(&[f1, f2], Endpoint::Infinity, Endpoint::Cusp { num: 0, den: 1 }, t, &cfg).unwrap();
            assert!((p2.eval(t) - direct).norm() <= 1e-7, "t={t}: {} vs {}", p2.eval(t), direct);
        }
    }
    let zero = d.scale(C64::new(0.0, 0.0));
    let m = double_moments(&d, &zero, &cfg).unwrap();
    assert!(m.iter().flatten().all(|c| c.norm() == 0.0));
}

#[test]
fn shuffle_relation() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    let g = g16(200);
    let panel = default_panel();
    let r = verify_shuffle(&d, &d, &panel, &cfg).unwrap();
    assert!(r.max <= 1e-7, "(Δ,Δ) {}", r.max);
    let r = verify_shuffle(&d, &g, &panel, &cfg).unwrap();
    assert!(r.max <= 1e-7, "(Δ,g16) {}", r.max);
    let r = verify_shuffle(&d, &d.scale(C64::new(0.0, 0.0)), &panel, &cfg).unwrap();
    assert_eq!(r.max, 0.0);
}

#[test]
fn completed_l_functional_equation() {
    let cfg = QuadConfig::default();
    let probe = functional_equation_probe(&delta(200), &cfg).unwrap();
    assert_eq!(probe.len(), 11);
    for row in probe {
        assert!(row.rel_diff <= 1e-9, "s={} {}", row.s, row.rel_diff);
        assert!(row.moment_rel_diff <= 1e-9, "s={} {}", row.s, row.moment_rel_diff);
        // Λ(Δ,s) is real and positive on the critical integers
        assert!(row.lambda[0] > 0.0 && row.lambda[1].abs() <= 1e-12 * row.lambda[0]);
    }
}

#[test]
fn coefficient_reextraction() {
    let cfg = QuadConfig::default();
    let d = delta(200);
    let p2 = double_period_polynomial(&d, &d, &cfg).unwrap();
    let (c, r) = (C64::new(0.0, -2.0), 1.5);
    let re = reextract_coefficients(20, c, r, |t| {
        r_direct_forms(&[&d, &d], Endpoint::Infinity, Endpoint::Cusp { num: 0, den: 1 }, t, &cfg)
    })
    .unwrap();
    let assembled = scaled_taylor(&p2.coeffs, c, r);
    let scale = assembled.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for (j, (a, b)) in re.iter().zip(&assembled).enumerate() {
        assert!((a - b).norm() <= 1e-6 * scale, "(t-c)^{j}: {a} vs {b}");
    }
}
