//! Period polynomials, double period polynomials and the moments
//! M_k = ∫_0^{i∞} f(τ)τ^k dτ of level-one cusp forms.

use std::f64::consts::PI;

use num_integer::binomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::MultiplierSpec;
use crate::iterint::quad::{gk15_values, kronrod_nodes};
use crate::iterint::QuadConfig;
use crate::modforms::CuspForm;
use crate::report::ResidualReport;
use crate::{Error, Result, C64};

fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn binom(n: i32, k: i32) -> f64 {
    binomial(n as u64, k as u64) as f64
}

/// Shifted weight of a form with trivial multiplier and even integral weight.
fn trivial_weight(f: &CuspForm) -> Result<i32> {
    let w = f.shifted_weight();
    if f.multiplier() != MultiplierSpec::Trivial || !w.is_integer() || w.twice() % 4 != 0 || w.twice() < 0 {
        return Err(Error::Unsupported(format!(
            "moments need trivial multiplier and even shifted weight, got {} with {:?}",
            w, f.multiplier()
        )));
    }
    Ok(w.twice() / 2)
}

/// Polynomial of degree ≤ w in t, coefficients by increasing power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodPolynomial {
    pub shifted_weight: i32,
    pub coeffs: Vec<C64>,
}

impl PeriodPolynomial {
    pub fn zero(shifted_weight: i32) -> Self {
        PeriodPolynomial { shifted_weight, coeffs: vec![C64::new(0.0, 0.0); shifted_weight as usize + 1] }
    }

    /// Builds p(t) = Σ_k C(w,k)(−1)^{w−k} M_k t^{w−k} from moments.
    pub fn from_moments(shifted_weight: i32, moments: &[C64]) -> Self {
        let w = shifted_weight;
        let mut coeffs = vec![C64::new(0.0, 0.0); w as usize + 1];
        for (k, m) in moments.iter().enumerate() {
            let k = k as i32;
            let sign = if (w - k) % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[(w - k) as usize] = m * binom(w, k) * sign;
        }
        PeriodPolynomial { shifted_weight, coeffs }
    }

    pub fn eval(&self, t: C64) -> C64 {
        horner(&self.coeffs, t)
    }

    /// (p|S)(t) = t^w p(−1/t).
    pub fn eval_slash_s(&self, t: C64) -> C64 {
        slash_s(&self.coeffs, t)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }
}

/// R₂(f₁,f₂;∞,0;t) as a polynomial of degree ≤ w₁ + w₂, with the double
/// moments it was assembled from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublePeriodPolynomial {
    pub weights: (i32, i32),
    pub coeffs: Vec<C64>,
    /// moments[k₁][k₂] = M_{k₁,k₂}
    pub moments: Vec<Vec<C64>>,
}

impl DoublePeriodPolynomial {
    pub fn total_weight(&self) -> i32 {
        self.weights.0 + self.weights.1
    }

    pub fn eval(&self, t: C64) -> C64 {
        horner(&self.coeffs, t)
    }

    pub fn eval_slash_s(&self, t: C64) -> C64 {
        slash_s(&self.coeffs, t)
    }
}

fn horner(c: &[C64], t: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * t + a)
}

fn slash_s(c: &[C64], t: C64) -> C64 {
    // Σ c_j (−1)^j t^{w−j}
    let rev: Vec<C64> = c.iter().enumerate().map(|(j, a)| if j % 2 == 0 { *a } else { -a }).rev().collect();
    horner(&rev, t)
}

/// Height Y with ∫_Y^∞ |f(iy)| y^p dy below tol.
fn upper_height(forms: &[&CuspForm], p: i32, tol: f64) -> Result<f64> {
    let mut y = 2.0f64;
    while y < 1e4 {
        let total: f64 = forms
            .iter()
            .map(|f| {
                let db = f.decay_bound();
                let k = 2.0 * PI * db.kappa_min;
                let denom = k - p as f64 / y;
                if db.c == 0.0 {
                    0.0
                } else if denom <= 0.0 {
                    f64::INFINITY
                } else {
                    db.c * (-k * y).exp() * y.powi(p) / denom
                }
            })
            .sum();
        if total < tol {
            return Ok(y);
        }
        y += 0.25;
    }
    Err(Error::TailUnreachable(format!("no upper height for power {p} meets {tol:e}")))
}

/// Height a ≤ 1/2 with ∫_0^a |f(iy)| dy below tol, using |f(iy)| ≤ C y^{−k} e^{−2πκ/y}.
fn lower_height(forms: &[&CuspForm], tol: f64) -> Result<f64> {
    let mut a = 0.5f64;
    for _ in 0..60 {
        let total: f64 = forms
            .iter()
            .map(|f| {
                let db = f.decay_bound();
                let k = f.weight().value();
                let kk = 2.0 * PI * db.kappa_min;
                if db.c == 0.0 {
                    0.0
                } else if a > kk / k {
                    f64::INFINITY
                } else {
                    a * db.c * a.powf(-k) * (-kk / a).exp()
                }
            })
            .sum();
        if total < tol {
            return Ok(a);
        }
        a *= 0.8;
    }
    Err(Error::TailUnreachable("no lower height found".into()))
}

/// Adaptive panels on [lo, hi] for the integrands f(iy)·y^p, p ∈ powers.
fn axis_panels(forms: &[&CuspForm], powers: &[i32], lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Vec<(f64, f64)>> {
    let total = hi - lo;
    let n = (total / 0.25).ceil().max(1.0) as usize;
    let mut stack: Vec<(f64, f64)> =
        (0..n).rev().map(|i| (lo + total * i as f64 / n as f64, lo + total * (i + 1) as f64 / n as f64)).collect();
    let mut out = Vec::new();
    let mut budget = cfg.max_steps;
    while let Some((a, b)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut ok = true;
        'check: for f in forms {
            let vals: Vec<C64> = kronrod_nodes()
                .iter()
                .map(|&(s, _)| f.eval(C64::new(0.0, mid + half * s)))
                .collect::<Result<_>>()?;
            for &p in powers {
                let scaled: Vec<C64> =
                    kronrod_nodes().iter().zip(&vals).map(|(&(s, _), v)| v * (mid + half * s).powi(p) * half).collect();
                let r = gk15_values(&scaled);
                let err = (r.kronrod - r.gauss).norm();
                let allowed = (cfg.atol * (b - a) / total).max(cfg.rtol * r.abs).max(64.0 * f64::EPSILON * r.abs);
                if err > allowed {
                    ok = false;
                    break 'check;
                }
            }
        }
        if ok {
            out.push((a, b));
        } else {
            if budget == 0 {
                return Err(Error::ToleranceNotReached(cfg.max_steps));
            }
            budget -= 1;
            stack.push((mid, b));
            stack.push((a, mid));
        }
    }
    Ok(out)
}

/// (y, weight) Kronrod nodes of a panel list.
fn axis_nodes(panels: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let nodes = kronrod_nodes();
    panels
        .iter()
        .flat_map(|&(a, b)| {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            nodes.iter().map(move |&(s, w)| (mid + half * s, w * half))
        })
        .collect()
}

/// All moments M_0 … M_w, splitting the ray at y = 1 and folding the lower
/// piece onto [1, ∞) by the S-transformation.
pub fn moments(f: &CuspForm, cfg: &QuadConfig) -> Result<Vec<C64>> {
    let w = trivial_weight(f)?;
    cfg.validate()?;
    if f.is_zero() {
        return Ok(vec![C64::new(0.0, 0.0); w as usize + 1]);
    }
    let hi = upper_height(&[f], w, 1e-3 * cfg.atol)?;
    let panels = axis_panels(&[f], &[0, w], 1.0, hi, cfg)?;
    let nodes = axis_nodes(&panels);
    let vals: Vec<C64> = nodes.par_iter().map(|&(y, _)| f.eval(C64::new(0.0, y))).collect::<Result<_>>()?;
    // I(m) = ∫_1^∞ f(iy) y^m dy
    let ints: Vec<C64> = (0..=w)
        .map(|m| nodes.iter().zip(&vals).map(|(&(y, wt), v)| v * (wt * y.powi(m))).sum())
        .collect();
    let iw = i_pow(w as i64 + 2);
    Ok((0..=w).map(|k| i_pow(k as i64 + 1) * (ints[k as usize] + iw * ints[(w - k) as usize])).collect())
}

/// M_k(f) = i^{k+1}∫_0^∞ f(iy) y^k dy.
pub fn moment(f: &CuspForm, k: i32, cfg: &QuadConfig) -> Result<C64> {
    let w = trivial_weight(f)?;
    if k < 0 || k > w {
        return Err(Error::Unsupported(format!("moment index {k} outside 0..={w}")));
    }
    Ok(moments(f, cfg)?[k as usize])
}

/// R₁(f;∞,0;t) as a polynomial in t.
pub fn period_polynomial(f: &CuspForm, cfg: &QuadConfig) -> Result<PeriodPolynomial> {
    let w = trivial_weight(f)?;
    Ok(PeriodPolynomial::from_moments(w, &moments(f, cfg)?))
}

/// Double moments M_{k₁,k₂} for 0 ≤ kᵢ ≤ wᵢ, by nested quadrature along the
/// imaginary axis with the inner antiderivative evaluated on the outer nodes.
pub fn double_moments(f1: &CuspForm, f2: &CuspForm, cfg: &QuadConfig) -> Result<Vec<Vec<C64>>> {
    let w1 = trivial_weight(f1)?;
    let w2 = trivial_weight(f2)?;
    cfg.validate()?;
    let zero = vec![vec![C64::new(0.0, 0.0); w2 as usize + 1]; w1 as usize + 1];
    if f1.is_zero() || f2.is_zero() {
        return Ok(zero);
    }
    let tol = 1e-3 * cfg.atol;
    let lo = lower_height(&[f1, f2], tol)?;
    let hi = upper_height(&[f1, f2], w1 + w2, tol)?;
    let panels = axis_panels(&[f1, f2], &[0, w1.max(w2), w1 + w2], lo, hi, cfg)?;
    let nodes = kronrod_nodes();

    // Per panel: outer node values of f1, and for each outer node the inner
    // nodes of [panel start, outer node] with f2 values.
    struct PanelData {
        outer: Vec<(f64, f64, C64)>,
        inner: Vec<Vec<(f64, f64, C64)>>,
        full: Vec<(f64, f64, C64)>,
    }
    let data: Vec<PanelData> = panels
        .par_iter()
        .map(|&(a, b)| {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let mut outer = Vec::with_capacity(15);
            let mut inner = Vec::with_capacity(15);
            let mut full = Vec::with_capacity(15);
            for &(s, w) in &nodes {
                let y = mid + half * s;
                outer.push((y, w * half, f1.eval(C64::new(0.0, y))?));
                full.push((y, w * half, f2.eval(C64::new(0.0, y))?));
                let sub_half = 0.5 * (y - a);
                let mut row = Vec::with_capacity(15);
                for &(u, v) in &nodes {
                    let eta = a + sub_half * (u + 1.0);
                    row.push((eta, v * sub_half, f2.eval(C64::new(0.0, eta))?));
                }
                inner.push(row);
            }
            Ok(PanelData { outer, inner, full })
        })
        .collect::<Result<_>>()?;

    let out: Vec<Vec<C64>> = (0..=w2)
        .into_par_iter()
        .map(|k2| {
            // G(y) = ∫_lo^y f2(iη) η^{k2} dη at every outer node
            let mut prefix = C64::new(0.0, 0.0);
            let mut g_vals: Vec<Vec<C64>> = Vec::with_capacity(data.len());
            for pd in &data {
                let row: Vec<C64> = pd
                    .inner
                    .iter()
                    .map(|r| prefix + r.iter().map(|&(eta, wt, v)| v * (wt * eta.powi(k2))).sum::<C64>())
                    .collect();
                g_vals.push(row);
                prefix += pd.full.iter().map(|&(y, wt, v)| v * (wt * y.powi(k2))).sum::<C64>();
            }
            (0..=w1)
                .map(|k1| {
                    let mut acc = C64::new(0.0, 0.0);
                    for (pd, g) in data.iter().zip(&g_vals) {
                        for (&(y, wt, v), gv) in pd.outer.iter().zip(g) {
                            acc += v * gv * (wt * y.powi(k1));
                        }
                    }
                    acc * i_pow(k1 as i64 + k2 as i64 + 2)
                })
                .collect()
        })
        .collect();
    // transpose to [k1][k2]
    let mut m = zero;
    for (k2, col) in out.iter().enumerate() {
        for (k1, v) in col.iter().enumerate() {
            m[k1][k2] = *v;
        }
    }
    Ok(m)
}

/// R₂(f₁,f₂;∞,0;t) expanded by the binomial theorem in both kernels.
pub fn double_period_polynomial(f1: &CuspForm, f2: &CuspForm, cfg: &QuadConfig) -> Result<DoublePeriodPolynomial> {
    let w1 = trivial_weight(f1)?;
    let w2 = trivial_weight(f2)?;
    let moments = double_moments(f1, f2, cfg)?;
    let w = w1 + w2;
    let mut coeffs = vec![C64::new(0.0, 0.0); w as usize + 1];
    for k1 in 0..=w1 {
        for k2 in 0..=w2 {
            let j = w - k1 - k2;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[j as usize] += moments[k1 as usize][k2 as usize] * (binom(w1, k1) * binom(w2, k2) * sign);
        }
    }
    Ok(DoublePeriodPolynomial { weights: (w1, w2), coeffs, moments })
}

/// Residual of P₂(t) + t^{w₁+w₂}P₂(−1/t) − P₁(t)Q₁(t) over the panel, with
/// P₂ the double period polynomial and P₁, Q₁ the period polynomials of f₁, f₂.
pub fn verify_shuffle(f1: &CuspForm, f2: &CuspForm, panel: &[C64], cfg: &QuadConfig) -> Result<ResidualReport> {
    let p2 = double_period_polynomial(f1, f2, cfg)?;
    let p1 = period_polynomial(f1, cfg)?;
    let q1 = period_polynomial(f2, cfg)?;
    let items: Vec<(usize, String, f64)> = panel
        .iter()
        .map(|&t| {
            let r = p2.eval(t) + p2.eval_slash_s(t) - p1.eval(t) * q1.eval(t);
            (2, "shuffle".to_string(), r.norm())
        })
        .collect();
    Ok(ResidualReport::from_scalars("shuffle", panel, &items))
}

/// Λ(f,s) = ∫_0^∞ f(iy) y^{s−1} dy by direct quadrature over the whole ray
/// (no splitting), for integers 1 ≤ s ≤ w + 1.
pub fn completed_l_direct(f: &CuspForm, s: i32, cfg: &QuadConfig) -> Result<C64> {
    let w = trivial_weight(f)?;
    if s < 1 || s > w + 1 {
        return Err(Error::Unsupported(format!("s = {s} outside 1..={}", w + 1)));
    }
    if f.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let tol = 1e-3 * cfg.atol;
    let lo = lower_height(&[f], tol)?;
    let hi = upper_height(&[f], s - 1, tol)?;
    let panels = axis_panels(&[f], &[s - 1], lo, hi, cfg)?;
    axis_nodes(&panels)
        .par_iter()
        .map(|&(y, wt)| Ok(f.eval(C64::new(0.0, y))? * (wt * y.powi(s - 1))))
        .collect::<Result<Vec<C64>>>()
        .map(|v| v.into_iter().sum())
}

/// One row of the functional-equation probe Λ(f,s) vs (−1)^{(w+2)/2}Λ(f,w+2−s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaProbe {
    pub s: i32,
    pub lambda: [f64; 2],
    pub reflected: [f64; 2],
    pub from_moment: [f64; 2],
    pub rel_diff: f64,
    pub moment_rel_diff: f64,
}

/// Functional-equation probe for s = 1 … w + 1.
pub fn functional_equation_probe(f: &CuspForm, cfg: &QuadConfig) -> Result<Vec<LambdaProbe>> {
    let w = trivial_weight(f)?;
    let big_w = w + 2;
    let direct: Vec<C64> = (1..=w + 1).into_par_iter().map(|s| completed_l_direct(f, s, cfg)).collect::<Result<_>>()?;
    let ms = moments(f, cfg)?;
    let eps = i_pow(big_w as i64);
    Ok((1..=w + 1)
        .map(|s| {
            let l = direct[(s - 1) as usize];
            let r = eps * direct[(big_w - s - 1) as usize];
            let m = ms[(s - 1) as usize] / i_pow(s as i64);
            let scale = l.norm().max(f64::MIN_POSITIVE);
            LambdaProbe {
                s,
                lambda: [l.re, l.im],
                reflected: [r.re, r.im],
                from_moment: [m.re, m.im],
                rel_diff: (l - r).norm() / scale,
                moment_rel_diff: (l - m).norm() / scale,
            }
        })
        .collect())
}

/// Coefficients of a polynomial of the given degree in powers of (t − c)/r,
/// recovered from its values on the circle |t − c| = r by a discrete Fourier
/// transform. The circle must lie in ℍ⁻ when values come from quadrature.
pub fn reextract_coefficients(
    degree: usize,
    center: C64,
    radius: f64,
    mut value: impl FnMut(C64) -> Result<C64>,
) -> Result<Vec<C64>> {
    let n = degree + 1;
    let samples: Vec<C64> = (0..n)
        .map(|j| value(center + C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64)))
        .collect::<Result<_>>()?;
    Ok((0..n)
        .map(|m| {
            let s: C64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -2.0 * PI * ((j * m) % n) as f64 / n as f64))
                .sum();
            s / n as f64
        })
        .collect())
}

/// Coefficients of Σ a_j t^j in powers of (t − c)/r.
pub fn scaled_taylor(coeffs: &[C64], center: C64, radius: f64) -> Vec<C64> {
    (0..coeffs.len())
        .map(|m| {
            let b: C64 = (m..coeffs.len())
                .map(|j| coeffs[j] * binom(j as i32, m as i32) * center.powi((j - m) as i32))
                .sum();
            b * radius.powi(m as i32)
        })
        .collect()
}

/// Tables of moments in the JSON/CSV layout of the `mlv` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub form: String,
    pub k: i32,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleMomentRow {
    pub forms: (String, String),
    pub k1: i32,
    pub k2: i32,
    pub re: f64,
    pub im: f64,
}

pub fn moment_rows(name: &str, ms: &[C64]) -> Vec<MomentRow> {
    ms.iter().enumerate().map(|(k, m)| MomentRow { form: name.to_string(), k: k as i32, re: m.re, im: m.im }).collect()
}

pub fn double_moment_rows(names: (&str, &str), ms: &[Vec<C64>]) -> Vec<DoubleMomentRow> {
    let mut out = Vec::new();
    for (k1, row) in ms.iter().enumerate() {
        for (k2, m) in row.iter().enumerate() {
            out.push(DoubleMomentRow {
                forms: (names.0.to_string(), names.1.to_string()),
                k1: k1 as i32,
                k2: k2 as i32,
                re: m.re,
                im: m.im,
            });
        }
    }
    out
}
