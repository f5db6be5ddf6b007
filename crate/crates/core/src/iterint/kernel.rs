use std::f64::consts::PI;

use crate::algebra::HalfInteger;
use crate::modforms::CuspForm;
use crate::{Error, Result, C64};

/// (τ − t)^w with the principal logarithm; τ − t lies in ℍ along every path used.
pub fn kernel_power(tau: C64, t: C64, w: HalfInteger) -> C64 {
    let d = tau - t;
    if w.is_integer() {
        d.powi(w.twice() / 2)
    } else {
        (d.ln() * w.value()).exp()
    }
}

pub(crate) fn check_lower(t: C64) -> Result<()> {
    if !(t.im < 0.0) {
        return Err(Error::NotLowerHalfPlane(format!("{t}")));
    }
    Ok(())
}

/// τ ↦ f(τ)(τ − t)^w for one form.
#[derive(Clone, Copy)]
pub struct Integrand<'a> {
    pub form: &'a CuspForm,
    pub t: C64,
}

impl<'a> Integrand<'a> {
    pub fn new(form: &'a CuspForm, t: C64) -> Self {
        Integrand { form, t }
    }

    pub fn eval(&self, tau: C64) -> Result<C64> {
        Ok(self.form.eval(tau)? * kernel_power(tau, self.t, self.form.shifted_weight()))
    }
}

/// Bound for ∫_Y^∞ |f(x+iy)(x+iy−t)^w| dy from the decay bound (Y ≥ 1).
pub fn ray_tail_bound(form: &CuspForm, x: f64, y: f64, t: C64) -> f64 {
    let db = form.decay_bound();
    let k = 2.0 * PI * db.kappa_min;
    let w = form.shifted_weight().value();
    let a = x.abs() + t.norm() + 1.0;
    let poly = if w >= 0.0 { (y + a).powf(w) } else { (y - t.im).powf(w) };
    let denom = k - w.max(0.0) / (y + a);
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    db.c * (-k * y).exp() * poly / denom
}

/// Smallest height ≥ `start` at which every ray tail is below `tol`.
pub fn auto_height(forms: &[&CuspForm], x: f64, t: C64, start: f64, tol: f64) -> Result<f64> {
    let mut y = start.max(1.0);
    while y < 1e5 {
        let total: f64 = forms.iter().map(|f| ray_tail_bound(f, x, y, t)).sum();
        if total < tol {
            return Ok(y);
        }
        y += 0.25;
    }
    Err(Error::TailUnreachable(format!("no truncation height below 1e5 meets tolerance {tol}")))
}

/// Bound for ∫_0^y |f(c+iy')(c+iy'−t)^w| dy' at the cusp c = p/q, or None
/// if y is too large for the estimate to apply.
pub fn cusp_tail_bound(form: &CuspForm, c: f64, q: i64, y: f64, t: C64) -> Option<f64> {
    let db = form.decay_bound();
    let q = q as f64;
    let a = 2.0 * PI * db.kappa_min / (q * q);
    let k = form.weight().value();
    // (qy)^{-k} e^{-a/y} increases on (0, a/k); the decay bound needs 1/(q²y) ≥ 1
    if y > 1.0 / (q * q) || y > a / k {
        return None;
    }
    let w = form.shifted_weight().value();
    let dist = (C64::new(c, 0.0) - t).norm() + y;
    let poly = if w >= 0.0 { dist.powf(w) } else { (-t.im).powf(w) };
    Some(y * (q * y).powf(-k) * db.c * (-a / y).exp() * poly)
}
