use std::f64::consts::PI;

use num_traits::ToPrimitive;

use crate::algebra::{Alphabet, GroupElement, HalfInteger, NcPoly};
use crate::modforms::eta_power_angle;
use crate::{Result, C64};

/// v(γ)^{-1}(ct+d)^w for a coefficient with η count `eta` and shifted weight `w`.
///
/// The power uses arg(ct+d) ∈ [−π, π): principal except for ct+d = −1
/// (γ = −T^b), where the argument −π is the one compatible with the
/// transformation law of the forms.
pub fn slash_factor(eta: u32, w: HalfInteger, g: &GroupElement, t: C64) -> C64 {
    let angle = eta_power_angle(eta, g).to_f64().unwrap_or(0.0);
    let v_inv = C64::from_polar(1.0, -PI * angle);
    let j = g.j(t);
    let pow = if w.is_integer() {
        j.powi(w.twice() / 2)
    } else {
        let mut log = j.ln();
        if j.im == 0.0 && j.re < 0.0 {
            log.im = -PI;
        }
        (log * w.value()).exp()
    };
    v_inv * pow
}

/// Per-coefficient slash factors for every monomial of the grading.
pub fn slash_factors(alphabet: &Alphabet, grading: crate::algebra::Grading, g: &GroupElement, t: C64) -> Result<Vec<C64>> {
    (0..grading.len())
        .map(|i| {
            let m = grading.monomial(i);
            Ok(slash_factor(alphabet.eta_count_of(&m)?, alphabet.weight_of(&m)?, g, t))
        })
        .collect()
}

/// (F|γ)(t) from the value F(γt).
pub fn slash_value(alphabet: &Alphabet, value_at_gt: &NcPoly, g: &GroupElement, t: C64) -> Result<NcPoly> {
    let f = slash_factors(alphabet, value_at_gt.grading(), g, t)?;
    Ok(value_at_gt.map_indexed(|i, c| c * f[i]))
}
