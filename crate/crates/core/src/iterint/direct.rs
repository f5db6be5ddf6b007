//! Iterated integrals by nested adaptive Gauss–Kronrod quadrature along a
//! polyline path. This is the slow reference evaluator.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Cusp, GroupElement};
use crate::modforms::CuspForm;
use crate::{Error, Result, C64};

use super::config::{QuadConfig, YMaxPolicy};
use super::kernel::{auto_height, check_lower, cusp_tail_bound, Integrand};
use super::quad::{gk15, kronrod_nodes, Panel};

/// An endpoint of an iterated integral: a point of ℍ or a cusp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Infinity,
    Cusp { num: i64, den: i64 },
    Point([f64; 2]),
}

impl Endpoint {
    pub fn point(z: C64) -> Self {
        Endpoint::Point([z.re, z.im])
    }

    pub fn from_cusp(c: Cusp) -> Self {
        match c {
            Cusp::Infinity => Endpoint::Infinity,
            Cusp::Rational { num, den } => Endpoint::Cusp { num, den },
        }
    }

    /// The cusp γ·∞.
    pub fn cusp_image(g: &GroupElement) -> Self {
        Endpoint::from_cusp(g.act_cusp(Cusp::Infinity))
    }

    /// γ applied to the endpoint.
    pub fn transform(&self, g: &GroupElement) -> Result<Self> {
        Ok(match *self {
            Endpoint::Infinity => Endpoint::cusp_image(g),
            Endpoint::Cusp { num, den } => Endpoint::from_cusp(g.act_cusp(Cusp::from_fraction(num, den))),
            Endpoint::Point(p) => {
                let z = C64::new(p[0], p[1]);
                if !(z.im > 0.0) {
                    return Err(Error::NotUpperHalfPlane(format!("{z}")));
                }
                Endpoint::point(g.act(z))
            }
        })
    }

    fn as_point(&self) -> Option<C64> {
        match self {
            Endpoint::Point(p) => Some(C64::new(p[0], p[1])),
            _ => None,
        }
    }

    fn real_part(&self) -> Option<f64> {
        match *self {
            Endpoint::Infinity => None,
            Endpoint::Cusp { num, den } => Some(num as f64 / den as f64),
            Endpoint::Point(p) => Some(p[0]),
        }
    }
}

/// Parses "inf", "cusp:p/q" or "re,im".
impl std::str::FromStr for Endpoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad endpoint '{s}'"));
        if s == "inf" {
            return Ok(Endpoint::Infinity);
        }
        if let Some(c) = s.strip_prefix("cusp:") {
            let (p, q) = c.split_once('/').unwrap_or((c, "1"));
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(Endpoint::from_cusp(Cusp::from_fraction(p, q)));
        }
        let (re, im) = s.split_once(',').ok_or_else(bad)?;
        let z = C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?);
        if !(z.im > 0.0) {
            return Err(Error::NotUpperHalfPlane(format!("{z}")));
        }
        Ok(Endpoint::point(z))
    }
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Infinity => write!(f, "inf"),
            Endpoint::Cusp { num, den } => write!(f, "cusp:{num}/{den}"),
            Endpoint::Point(p) => write!(f, "{},{}", p[0], p[1]),
        }
    }
}

/// Forms (f₁,…,f_n) and endpoints of R_n(f₁,…,f_n; y, x; t) = ∫_x^y f₁ ∫_x^{τ₁} f₂ ⋯.
#[derive(Clone, Debug)]
pub struct IterIntSpec {
    pub forms: Vec<CuspForm>,
    pub y: Endpoint,
    pub x: Endpoint,
}

impl IterIntSpec {
    pub fn new(forms: Vec<CuspForm>, y: Endpoint, x: Endpoint) -> Self {
        IterIntSpec { forms, y, x }
    }
}

/// R_n by nested quadrature; n = 0 gives 1.
pub fn r_direct(spec: &IterIntSpec, t: C64, cfg: &QuadConfig) -> Result<C64> {
    let forms: Vec<&CuspForm> = spec.forms.iter().collect();
    r_direct_forms(&forms, spec.y, spec.x, t, cfg)
}

pub fn r_direct_forms(forms: &[&CuspForm], y: Endpoint, x: Endpoint, t: C64, cfg: &QuadConfig) -> Result<C64> {
    cfg.validate()?;
    check_lower(t)?;
    for e in [y, x] {
        if let Some(z) = e.as_point() {
            if !(z.im > 0.0) {
                return Err(Error::NotUpperHalfPlane(format!("{z}")));
            }
        }
    }
    if forms.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    if y == x {
        return Ok(C64::new(0.0, 0.0));
    }
    let path = build_path(forms, y, x, t, cfg)?;
    let integrands: Vec<Integrand> = forms.iter().map(|f| Integrand::new(f, t)).collect();
    let panels = refine(&path, &integrands, cfg)?;
    nested(&panels, &integrands)
}

/// Unrefined panels from x to y, in path order.
fn build_path(forms: &[&CuspForm], y: Endpoint, x: Endpoint, t: C64, cfg: &QuadConfig) -> Result<Vec<Panel>> {
    let h = [y, x].iter().filter_map(|e| e.as_point()).map(|z| z.im).fold(2.0, f64::max);
    let rx = x.real_part().or(y.real_part()).unwrap_or(0.0);
    let ry = y.real_part().or(x.real_part()).unwrap_or(0.0);
    let mut panels = leg(forms, x, rx, h, t, cfg)?;
    let top_x = C64::new(rx, h);
    let top_y = C64::new(ry, h);
    if top_x != top_y {
        let n = ((ry - rx).abs() / 0.5).ceil().max(1.0) as usize;
        for i in 0..n {
            let a = top_x + (top_y - top_x) * (i as f64 / n as f64);
            let b = top_x + (top_y - top_x) * ((i + 1) as f64 / n as f64);
            panels.push(Panel::new(a, b));
        }
    }
    let mut back = leg(forms, y, ry, h, t, cfg)?;
    back.reverse();
    panels.extend(back.into_iter().map(|p| Panel::new(p.b, p.a)));
    Ok(panels)
}

/// Panels from the endpoint up to height h on the line Re τ = re.
fn leg(forms: &[&CuspForm], e: Endpoint, re: f64, h: f64, t: C64, cfg: &QuadConfig) -> Result<Vec<Panel>> {
    let vert = |lo: f64, hi: f64| Panel::new(C64::new(re, lo), C64::new(re, hi));
    let mut out = Vec::new();
    match e {
        Endpoint::Point(p) => {
            let y0 = p[1];
            if y0 < h {
                // geometric toward low interior points, uniform otherwise
                let mut lo = y0;
                while lo < h {
                    let hi = (2.0 * lo).min(lo + 0.5).min(h);
                    out.push(vert(lo, hi));
                    lo = hi;
                }
            }
        }
        Endpoint::Infinity => {
            let top = match cfg.y_max {
                YMaxPolicy::Explicit(y) => y.max(h),
                YMaxPolicy::Auto => auto_height(forms, re, t, h, 1e-3 * cfg.atol)?,
            };
            let n = (top - h).ceil().max(1.0) as usize;
            let step = (top - h) / n as f64;
            for i in 0..n {
                let a = top - i as f64 * step;
                let b = if i + 1 == n { h } else { top - (i + 1) as f64 * step };
                out.push(Panel::new(C64::new(re, a), C64::new(re, b)));
            }
            return Ok(out);
        }
        Endpoint::Cusp { den, .. } => {
            let mut ys = vec![h];
            let tol = 1e-3 * cfg.atol;
            loop {
                let y = *ys.last().unwrap();
                let ok = forms
                    .iter()
                    .all(|f| cusp_tail_bound(f, re, den, y, t).map(|b| b < tol / forms.len() as f64).unwrap_or(false));
                if ok {
                    break;
                }
                if ys.len() > 200 {
                    return Err(Error::TailUnreachable(format!("cusp {re}: no cutoff height found")));
                }
                ys.push(y / 2.0);
            }
            ys.reverse();
            for w in ys.windows(2) {
                out.push(vert(w[0], w[1]));
            }
        }
    }
    Ok(out)
}

fn refine(path: &[Panel], g: &[Integrand], cfg: &QuadConfig) -> Result<Vec<Panel>> {
    let total: f64 = path.iter().map(Panel::len).sum();
    let mut out = Vec::new();
    let mut budget = cfg.max_steps;
    for p in path {
        let mut stack = vec![*p];
        while let Some(q) = stack.pop() {
            if panel_ok(&q, g, cfg, total)? {
                out.push(q);
            } else {
                if budget == 0 {
                    return Err(Error::ToleranceNotReached(cfg.max_steps));
                }
                budget -= 1;
                let (l, r) = q.split();
                // right pushed first so the left half is handled first
                stack.push(r);
                stack.push(l);
            }
        }
    }
    Ok(out)
}

fn panel_ok(p: &Panel, g: &[Integrand], cfg: &QuadConfig, total: f64) -> Result<bool> {
    let half = p.half();
    for gi in g {
        let r = gk15(|s| gi.eval(p.at(s)).map(|v| v * half))?;
        let err = (r.kronrod - r.gauss).norm();
        // r.abs already carries the panel scale; the last term accepts roundoff-level noise
        let allowed = (cfg.atol * p.len() / total).max(cfg.rtol * r.abs).max(64.0 * f64::EPSILON * r.abs);
        if err > allowed {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Nested<'a> {
    panels: &'a [Panel],
    g: &'a [Integrand<'a>],
    prefix: Vec<Vec<C64>>,
    nodes: [(f64, f64); 15],
}

impl Nested<'_> {
    /// ∫ from the panel start to parameter s of g_j · F_{j+1}.
    fn partial(&self, j: usize, p: usize, s: f64) -> Result<C64> {
        let panel = &self.panels[p];
        let scale = (s + 1.0) * 0.5;
        let mut acc = C64::new(0.0, 0.0);
        for &(x, w) in &self.nodes {
            let sigma = -1.0 + scale * (x + 1.0);
            let v = self.g[j].eval(panel.at(sigma))? * self.big_f(j + 1, p, sigma)?;
            acc += v * w;
        }
        Ok(acc * panel.half() * scale)
    }

    fn big_f(&self, j: usize, p: usize, s: f64) -> Result<C64> {
        if j == self.g.len() {
            return Ok(C64::new(1.0, 0.0));
        }
        Ok(self.prefix[j][p] + self.partial(j, p, s)?)
    }
}

fn nested(panels: &[Panel], g: &[Integrand]) -> Result<C64> {
    let n = g.len();
    let mut ev = Nested { panels, g, prefix: vec![Vec::new(); n], nodes: kronrod_nodes() };
    for j in (0..n).rev() {
        let pieces: Vec<C64> =
            (0..panels.len()).into_par_iter().map(|p| ev.partial(j, p, 1.0)).collect::<Result<_>>()?;
        let mut pre = Vec::with_capacity(panels.len() + 1);
        let mut acc = C64::new(0.0, 0.0);
        pre.push(acc);
        for v in pieces {
            acc += v;
            pre.push(acc);
        }
        ev.prefix[j] = pre;
    }
    Ok(*ev.prefix[0].last().unwrap())
}
