//! Decomposition relations of orders 2 and 3 and the multiplication
//! property of J, checked on a panel.

use rayon::prelude::*;

use crate::algebra::NcPoly;
use crate::collection::CuspCollection;
use crate::modforms::CuspForm;
use crate::report::ResidualReport;
use crate::{Result, C64};

use super::config::QuadConfig;
use super::direct::{r_direct_forms, Endpoint};
use super::ode::segment_j;

/// Residual of R₂(z,y) + R₂(y,x) − R₂(z,x) + R₁(f₁;z,y)R₁(f₂;y,x).
pub fn rel2_residual(f: [&CuspForm; 2], (z, y, x): (Endpoint, Endpoint, Endpoint), t: C64, cfg: &QuadConfig) -> Result<C64> {
    let r2 = |a, b| r_direct_forms(&f, a, b, t, cfg);
    let r1 = |g: &CuspForm, a, b| r_direct_forms(&[g], a, b, t, cfg);
    Ok(r2(z, y)? + r2(y, x)? - r2(z, x)? + r1(f[0], z, y)? * r1(f[1], y, x)?)
}

/// Residual of R₃(z,y) + R₃(y,x) − R₃(z,x) + R₁(f₁;z,y)R₂(f₂,f₃;y,x) + R₂(f₁,f₂;z,y)R₁(f₃;y,x).
pub fn rel3_residual(f: [&CuspForm; 3], (z, y, x): (Endpoint, Endpoint, Endpoint), t: C64, cfg: &QuadConfig) -> Result<C64> {
    let r = |g: &[&CuspForm], a, b| r_direct_forms(g, a, b, t, cfg);
    let lhs = r(&f, z, y)? + r(&f, y, x)? - r(&f, z, x)?;
    let corr = r(&f[..1], z, y)? * r(&f[1..], y, x)? + r(&f[..2], z, y)? * r(&f[2..], y, x)?;
    Ok(lhs + corr)
}

/// Order-2 decomposition relation over a panel.
pub fn verify_rel2(
    f: [&CuspForm; 2],
    ends: (Endpoint, Endpoint, Endpoint),
    panel: &[C64],
    cfg: &QuadConfig,
) -> Result<ResidualReport> {
    let items = panel
        .par_iter()
        .map(|&t| Ok((2, "A1*A2".to_string(), rel2_residual(f, ends, t, cfg)?.norm())))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_scalars("rel2", panel, &items))
}

/// Order-3 decomposition relation over a panel.
pub fn verify_rel3(
    f: [&CuspForm; 3],
    ends: (Endpoint, Endpoint, Endpoint),
    panel: &[C64],
    cfg: &QuadConfig,
) -> Result<ResidualReport> {
    let items = panel
        .par_iter()
        .map(|&t| Ok((3, "A1*A2*A3".to_string(), rel3_residual(f, ends, t, cfg)?.norm())))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_scalars("rel3", panel, &items))
}

/// J(z,x) = J(z,y)J(y,x) and J(x,y)J(y,x) = 1 for interior points, with all
/// three factors integrated independently along straight segments.
pub fn verify_mult(h: &CuspCollection, (z, y, x): (C64, C64, C64), panel: &[C64], cfg: &QuadConfig) -> Result<ResidualReport> {
    let res = panel
        .par_iter()
        .map(|&t| {
            let zx = segment_j(h, z, x, t, cfg)?;
            let zy = segment_j(h, z, y, t, cfg)?;
            let yx = segment_j(h, y, x, t, cfg)?;
            let xy = segment_j(h, x, y, t, cfg)?;
            let comp = zx.sub(&zy.mul(&yx)?)?;
            let inv = xy.mul(&yx)?.sub(&NcPoly::one(h.grading()))?;
            // report the worse of the two per coefficient
            Ok(comp.map_indexed(|i, c| if c.norm() >= inv.coeffs()[i].norm() { c } else { inv.coeffs()[i] }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_residuals("mult", panel, &res))
}
