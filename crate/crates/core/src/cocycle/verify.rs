use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::ResidualReport;

use crate::algebra::{Alphabet, GroupElement, Letter, Monomial, NcPoly};
use crate::collection::CuspCollection;
use crate::iterint::{r_direct_forms, segment_j, Endpoint, QuadConfig};
use crate::modforms::{eta_power_form, CuspForm};
use crate::{Result, C64};

use super::series::{EvalContext, SeriesFn};
use super::slash::slash_factor;

/// Default evaluation panel in the lower half-plane.
pub fn default_panel() -> Vec<C64> {
    vec![
        C64::new(0.0, -0.8),
        C64::new(0.0, -1.5),
        C64::new(-0.4, -0.9),
        C64::new(0.6, -1.1),
        C64::new(-1.3, -0.5),
    ]
}

/// Ψ(h)_γ as a lazily evaluated series: (J(z₀)|γ)⁻¹·J(γ⁻¹z₀), and exactly 1
/// when γ fixes ∞.
pub fn psi_series(h: Arc<CuspCollection>, g: GroupElement, z0: C64) -> SeriesFn {
    if g.c() == 0 {
        return SeriesFn::One;
    }
    let back = g.inverse().act(z0);
    SeriesFn::jvert(h.clone(), z0).slash(g).inv().mul(SeriesFn::jvert(h, back))
}

/// Ψ(h)_γ(t) with base point z₀ for the two vertical rays.
pub fn psi(h: &CuspCollection, g: &GroupElement, z0: C64, t: C64, cfg: &QuadConfig) -> Result<NcPoly> {
    let ctx = EvalContext::for_collection(h, *cfg);
    psi_series(Arc::new(h.clone()), *g, z0).eval(t, &ctx)
}

/// The cocycle with base point z₀, J(h; γ⁻¹z₀, z₀; t), integrated along the
/// straight segment between the two points.
pub fn psi_based(h: &CuspCollection, g: &GroupElement, z0: C64, t: C64, cfg: &QuadConfig) -> Result<NcPoly> {
    segment_j(h, g.inverse().act(z0), z0, t, cfg)
}

fn on_panel<F>(panel: &[C64], f: F) -> Result<Vec<NcPoly>>
where
    F: Fn(C64) -> Result<NcPoly> + Sync,
{
    panel.par_iter().map(|&t| f(t)).collect()
}

/// Residual of Ψ_{γδ} = (Ψ_γ|δ)·Ψ_δ over the panel.
pub fn verify_cocycle(
    h: &CuspCollection,
    g: &GroupElement,
    d: &GroupElement,
    panel: &[C64],
    cfg: &QuadConfig,
) -> Result<ResidualReport> {
    let z0 = C64::new(0.0, 1.0);
    let ctx = EvalContext::for_collection(h, *cfg);
    let hh = Arc::new(h.clone());
    let lhs = psi_series(hh.clone(), *g * *d, z0);
    let rhs = psi_series(hh.clone(), *g, z0).slash(*d).mul(psi_series(hh, *d, z0));
    let res = on_panel(panel, |t| lhs.eval(t, &ctx)?.sub(&rhs.eval(t, &ctx)?))?;
    Ok(ResidualReport::from_residuals(&format!("cocycle({g}, {d})"), panel, &res))
}

/// Residual of R_n(f; γ⁻¹y, γ⁻¹x; t) = (R_n(f; y, x; ·)|γ)(t) for orders 1 and 2,
/// over all ordered tuples of support forms.
pub fn verify_equivariance(
    h: &CuspCollection,
    g: &GroupElement,
    endpoints: (Endpoint, Endpoint),
    panel: &[C64],
    cfg: &QuadConfig,
) -> Result<ResidualReport> {
    let alphabet = h.alphabet();
    let (y, x) = endpoints;
    let gi = g.inverse();
    let (ty, tx) = (y.transform(&gi)?, x.transform(&gi)?);
    let support: Vec<(&Monomial, &CuspForm)> = h.support().iter().collect();
    let mut tuples: Vec<Vec<usize>> = (0..support.len()).map(|i| vec![i]).collect();
    for i in 0..support.len() {
        for j in 0..support.len() {
            tuples.push(vec![i, j]);
        }
    }
    let jobs: Vec<(Vec<usize>, C64)> =
        tuples.iter().flat_map(|tp| panel.iter().map(move |&t| (tp.clone(), t))).collect();
    let items = jobs
        .par_iter()
        .map(|(tp, t)| {
            let forms: Vec<&CuspForm> = tp.iter().map(|&i| support[i].1).collect();
            let mut eta = 0;
            for &i in tp {
                eta += alphabet.eta_count_of(support[i].0)?;
            }
            let w = forms.iter().map(|f| f.shifted_weight()).sum();
            let lhs = r_direct_forms(&forms, ty, tx, *t, cfg)?;
            let inner = r_direct_forms(&forms, y, x, g.act(*t), cfg)?;
            let rhs = slash_factor(eta, w, g, *t) * inner;
            let label: String = tp.iter().map(|&i| format!("({})", support[i].0)).collect();
            Ok((tp.len(), label, (lhs - rhs).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_scalars(&format!("equivariance({g})"), panel, &items))
}

/// Both relations of the η-power example: (Ψ_S|S)Ψ_S = 1 and Ψ_S = (Ψ_S|T′)(Ψ_S|T), T′ = TST.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaExampleReport {
    pub n: u8,
    pub inversion: ResidualReport,
    pub braid: ResidualReport,
}

impl EtaExampleReport {
    pub fn max(&self) -> f64 {
        self.inversion.max.max(self.braid.max)
    }
}

/// The single-letter collection {A ↦ ηᴺ} and its alphabet.
pub fn eta_collection(n: u8, degree: usize) -> Result<CuspCollection> {
    let alphabet = Alphabet::new(vec![Letter::eta_power(n)?])?;
    let mut h = CuspCollection::empty(alphabet, degree);
    h.insert(Monomial::letter(0), eta_power_form(n, crate::modforms::DEFAULT_LEN)?)?;
    Ok(h)
}

pub fn eta_example_check(n: u8, degree: usize, panel: &[C64], cfg: &QuadConfig) -> Result<EtaExampleReport> {
    let h = eta_collection(n, degree)?;
    eta_relations(&h, panel, cfg).map(|(inversion, braid)| EtaExampleReport { n, inversion, braid })
}

/// The two S-relations for an arbitrary collection.
pub fn eta_relations(h: &CuspCollection, panel: &[C64], cfg: &QuadConfig) -> Result<(ResidualReport, ResidualReport)> {
    let z0 = C64::new(0.0, 1.0);
    let ctx = EvalContext::for_collection(h, *cfg);
    let hh = Arc::new(h.clone());
    let s = GroupElement::S;
    let tp = GroupElement::T * GroupElement::S * GroupElement::T;
    let psi_s = psi_series(hh, s, z0);
    let inv_lhs = psi_s.clone().slash(s).mul(psi_s.clone());
    let braid_rhs = psi_s.clone().slash(tp).mul(psi_s.clone().slash(GroupElement::T));
    let one = NcPoly::one(ctx.grading);
    let r1 = on_panel(panel, |t| inv_lhs.eval(t, &ctx)?.sub(&one))?;
    let r2 = on_panel(panel, |t| psi_s.eval(t, &ctx)?.sub(&braid_rhs.eval(t, &ctx)?))?;
    Ok((
        ResidualReport::from_residuals("(Psi_S|S) Psi_S = 1", panel, &r1),
        ResidualReport::from_residuals("Psi_S = (Psi_S|T') (Psi_S|T)", panel, &r2),
    ))
}
