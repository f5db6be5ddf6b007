//! The Dedekind eta multiplier ε and the multiplier systems built from it.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{Alphabet, GroupElement, Monomial, MultiplierSpec};
use crate::{Result, C64};

type Q = Ratio<i128>;

/// Dedekind sum s(d, c) for c > 0, via reciprocity.
pub fn dedekind_sum(d: i64, c: i64) -> Ratio<i128> {
    assert!(c > 0);
    let mut a = (d as i128).mod_floor(&(c as i128));
    let mut b = c as i128;
    let mut sign = 1i128;
    let mut acc = Q::zero();
    // s(a,b) = (a/b + b/a + 1/(ab))/12 − 1/4 − s(b mod a, a)
    while a != 0 {
        let term = (Q::new(a, b) + Q::new(b, a) + Q::new(1, a * b)) / Q::from_integer(12) - Q::new(1, 4);
        acc += Q::from_integer(sign) * term;
        sign = -sign;
        let r = b.mod_floor(&a);
        b = a;
        a = r;
    }
    acc
}

/// Dedekind sum by its defining sum; used to cross-check [`dedekind_sum`].
pub fn dedekind_sum_naive(d: i64, c: i64) -> Ratio<i128> {
    let c = c as i128;
    let d = d as i128;
    let mut s = 0i128;
    for k in 1..c {
        let r = (k * d).mod_floor(&c);
        if r != 0 {
            s += (2 * k - c) * (2 * r - c);
        }
    }
    Q::new(s, 4 * c * c)
}

/// arg ε(γ)/π reduced to [0, 2), where η(γτ) = ε(γ)(cτ+d)^{1/2}η(τ) with the
/// principal square root.
pub fn eta_epsilon_angle(g: &GroupElement) -> Ratio<i128> {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let raw = if c > 0 {
        Q::new((a + d) as i128, 12 * c as i128) - dedekind_sum(d, c) - Q::new(1, 4)
    } else if c == 0 {
        let base = Q::new((b * d) as i128, 12);
        if d == -1 {
            base - Q::new(1, 2)
        } else {
            base
        }
    } else {
        eta_epsilon_angle(&g.neg()) + Q::new(1, 2)
    };
    reduce_angle(raw)
}

fn reduce_angle(x: Q) -> Q {
    let two = Q::from_integer(2);
    let k = (x / two).floor();
    x - two * k
}

fn angle_to_unit(x: Q) -> C64 {
    let x = reduce_angle(x);
    let theta = std::f64::consts::PI * x.to_f64().unwrap_or(0.0);
    C64::from_polar(1.0, theta)
}

pub fn eta_epsilon(g: &GroupElement) -> C64 {
    angle_to_unit(eta_epsilon_angle(g))
}

/// Angle (units of π) of the multiplier on γ.
pub fn multiplier_angle(spec: MultiplierSpec, g: &GroupElement) -> Ratio<i128> {
    match spec {
        MultiplierSpec::Trivial => Q::zero(),
        MultiplierSpec::EtaPower { n } => reduce_angle(eta_epsilon_angle(g) * Q::from_integer(n as i128)),
    }
}

pub fn multiplier_value(spec: MultiplierSpec, g: &GroupElement) -> C64 {
    angle_to_unit(multiplier_angle(spec, g))
}

/// Angle (units of π) of ε(γ)^m.
pub fn eta_power_angle(m: u32, g: &GroupElement) -> Ratio<i128> {
    reduce_angle(eta_epsilon_angle(g) * Q::from_integer(m as i128))
}

/// v(m)(γ) = Π v_{m_i}(γ).
pub fn mono_multiplier(alphabet: &Alphabet, m: &Monomial, g: &GroupElement) -> Result<C64> {
    let count = alphabet.eta_count_of(m)?;
    Ok(angle_to_unit(eta_power_angle(count, g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocity_matches_sum() {
        for c in 1..40 {
            for d in -45..45 {
                if d.gcd(&c) == 1 {
                    assert_eq!(dedekind_sum(d, c), dedekind_sum_naive(d, c), "d={d} c={c}");
                }
            }
        }
    }

    #[test]
    fn generator_values() {
        assert_eq!(eta_epsilon_angle(&GroupElement::T), Q::new(1, 12));
        assert_eq!(eta_epsilon_angle(&GroupElement::S), Q::new(7, 4));
        assert_eq!(eta_epsilon_angle(&GroupElement::MINUS_IDENTITY), Q::new(3, 2));
        let s = multiplier_value(MultiplierSpec::eta_power(4), &GroupElement::S);
        assert!((s - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let t = multiplier_value(MultiplierSpec::eta_power(12), &GroupElement::T);
        assert!((t - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let s8 = multiplier_value(MultiplierSpec::eta_power(8), &GroupElement::S);
        assert!((s8 - C64::new(1.0, 0.0)).norm() < 1e-15);
        let t24 = multiplier_value(MultiplierSpec::eta_power(24), &GroupElement::T);
        assert!((t24 - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn twenty_fourth_power_is_trivial() {
        for g in [GroupElement::S, GroupElement::T, GroupElement::new(5, 2, 7, 3).unwrap()] {
            assert_eq!(eta_power_angle(24, &g), Q::zero());
        }
    }
}
