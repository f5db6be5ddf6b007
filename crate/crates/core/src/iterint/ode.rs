//! The graded linear ODE d_z J = Ω J, integrated with an embedded
//! Dormand–Prince 5(4) pair along straight segments.

use crate::algebra::{Grading, NcPoly};
use crate::collection::CuspCollection;
use crate::modforms::CuspForm;
use crate::{Error, Result, C64};

use super::config::{QuadConfig, YMaxPolicy};
use super::kernel::{auto_height, check_lower, kernel_power};

const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// The terms of Ω(h; z; t) = Σ_B (z − t)^{w(B)} h(B; z) · B, by index.
pub struct Omega<'a> {
    grading: Grading,
    terms: Vec<OmegaTerm<'a>>,
}

struct OmegaTerm<'a> {
    degree: usize,
    pos: usize,
    form: &'a CuspForm,
}

impl<'a> Omega<'a> {
    pub fn new(h: &'a CuspCollection) -> Self {
        let g = h.grading();
        let off_adj = |m: &crate::algebra::Monomial| g.index_of(m).map(|i| i - g.offset(m.degree()));
        let terms = h
            .support()
            .iter()
            .map(|(m, f)| OmegaTerm { degree: m.degree(), pos: off_adj(m).expect("support within grading"), form: f })
            .collect();
        Omega { grading: g, terms }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients (z − t)^{w(B)} h(B; z) for every support monomial.
    pub fn coefficients(&self, z: C64, t: C64) -> Result<Vec<C64>> {
        self.terms.iter().map(|term| Ok(term.form.eval(z)? * kernel_power(z, t, term.form.shifted_weight()))).collect()
    }

    /// out = Σ_B c_B · B · v on raw coefficient vectors.
    fn apply_raw(&self, coeffs: &[C64], v: &[C64], out: &mut [C64]) {
        let g = self.grading;
        let d = g.degree();
        let l = g.letters();
        for o in out.iter_mut() {
            *o = C64::new(0.0, 0.0);
        }
        for (term, c) in self.terms.iter().zip(coeffs) {
            for k2 in 0..=(d - term.degree) {
                let src_off = g.offset(k2);
                let cnt = g.count(k2);
                let dst = g.offset(term.degree + k2) + term.pos * l.pow(k2 as u32);
                for i in 0..cnt {
                    out[dst + i] += c * v[src_off + i];
                }
            }
        }
    }

    pub fn apply(&self, z: C64, t: C64, v: &NcPoly) -> Result<NcPoly> {
        if v.grading() != self.grading {
            return Err(Error::DegreeMismatch { left: v.degree(), right: self.grading.degree() });
        }
        let c = self.coefficients(z, t)?;
        let mut out = vec![C64::new(0.0, 0.0); self.grading.len()];
        self.apply_raw(&c, v.coeffs(), &mut out);
        NcPoly::from_coeffs(self.grading, out)
    }
}

/// Ω(h; z; t) · v.
pub fn omega_apply(h: &CuspCollection, z: C64, t: C64, v: &NcPoly) -> Result<NcPoly> {
    Omega::new(h).apply(z, t, v)
}

/// Solution at `to` of dJ/dz = Ω J along the segment from `from`, with J(from) = 1.
/// This is J(h; to, from; t).
pub fn segment_j(h: &CuspCollection, to: C64, from: C64, t: C64, cfg: &QuadConfig) -> Result<NcPoly> {
    cfg.validate()?;
    check_lower(t)?;
    for z in [to, from] {
        if !(z.im > 0.0) {
            return Err(Error::NotUpperHalfPlane(format!("{z}")));
        }
    }
    let omega = Omega::new(h);
    let g = h.grading();
    let mut y = NcPoly::one(g).coeffs().to_vec();
    let len = (to - from).norm();
    if len == 0.0 || omega.is_empty() {
        return NcPoly::from_coeffs(g, y);
    }
    let dir = (to - from) / len;
    let n = y.len();
    let rhs = |s: f64, y: &[C64], out: &mut [C64]| -> Result<()> {
        let z = from + dir * s;
        let c = omega.coefficients(z, t)?;
        omega.apply_raw(&c, y, out);
        for o in out.iter_mut() {
            *o *= dir;
        }
        Ok(())
    };

    let h_min = len / cfg.max_steps as f64;
    let mut s = 0.0;
    let mut step = (len / 16.0).min(0.25);
    let mut k = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut ynew = vec![C64::new(0.0, 0.0); n];
    rhs(s, &y, &mut k[0])?;
    let mut steps = 0usize;
    while s < len {
        if steps > 4 * cfg.max_steps {
            return Err(Error::ToleranceNotReached(cfg.max_steps));
        }
        steps += 1;
        let last = s + step >= len;
        let hs = if last { len - s } else { step };
        for stage in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = A[stage - 1][j];
                    if a != 0.0 {
                        acc += kj[i] * (a * hs);
                    }
                }
                tmp[i] = acc;
            }
            rhs(s + C[stage] * hs, &tmp, &mut k[stage])?;
        }
        // stage 6 input is the 5th-order solution (FSAL)
        let mut err = 0.0f64;
        for i in 0..n {
            let mut acc = y[i];
            let mut e = C64::new(0.0, 0.0);
            for j in 0..7 {
                acc += k[j][i] * (B[j] * hs);
                e += k[j][i] * (E[j] * hs);
            }
            ynew[i] = acc;
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(acc.norm());
            err = err.max(e.norm() / sc);
        }
        if err <= 1.0 {
            s = if last { len } else { s + hs };
            std::mem::swap(&mut y, &mut ynew);
            let k6 = std::mem::take(&mut k[6]);
            k[0] = k6;
            k[6] = vec![C64::new(0.0, 0.0); n];
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            step = (hs * fac).max(h_min);
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            let next = hs * fac;
            if next < h_min {
                return Err(Error::StepSizeUnderflow { at: s, floor: h_min });
            }
            step = next;
        }
    }
    y[0] = C64::new(1.0, 0.0);
    NcPoly::from_coeffs(g, y)
}

/// Truncation height for the ray above Re z₀.
pub fn ray_height(h: &CuspCollection, z0: C64, t: C64, cfg: &QuadConfig) -> Result<f64> {
    match cfg.y_max {
        YMaxPolicy::Explicit(y) => Ok(y),
        YMaxPolicy::Auto => {
            let forms: Vec<&CuspForm> = h.support().values().collect();
            auto_height(&forms, z0.re, t, z0.im + 1.0, cfg.atol)
        }
    }
}

/// J(h; z₀, ∞; t): the ODE integrated down the vertical ray from Re z₀ + iY_max to z₀.
#[allow(non_snake_case)]
pub fn vertical_J(h: &CuspCollection, z0: C64, t: C64, cfg: &QuadConfig) -> Result<NcPoly> {
    check_lower(t)?;
    if !(z0.im > 0.0) {
        return Err(Error::NotUpperHalfPlane(format!("{z0}")));
    }
    let y_max = ray_height(h, z0, t, cfg)?;
    if y_max <= z0.im {
        return Ok(NcPoly::one(h.grading()));
    }
    segment_j(h, z0, C64::new(z0.re, y_max), t, cfg)
}
