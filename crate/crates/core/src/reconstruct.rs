//! Recovering a cusp-form collection from its cocycle, one degree at a time.
//!
//! At degree d the discrepancy between the input cocycle and Ψ of the part
//! recovered so far is, in degree d, an ordinary period cocycle; its value at
//! S is fitted against the S-periods of the basis forms of each catalog
//! monomial.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Alphabet, GroupElement, Monomial, MultiplierSpec, NcPoly};
use crate::cocycle::{psi, slash_factor, slash_value};
use crate::collection::CuspCollection;
use crate::iterint::{r_direct_forms, Endpoint, QuadConfig};
use crate::modforms::{cusp_space_basis, CuspForm, DEFAULT_LEN};
use crate::report::ResidualReport;
use crate::{Error, Result, C64};

fn base_point() -> C64 {
    C64::new(0.0, 1.0)
}

/// Basis of one catalog space with its S-periods on the panel.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub monomial: Monomial,
    pub basis: Vec<CuspForm>,
    /// samples[j][i] = R₁(g_j; 0, ∞; t_i) = −ψ_{g_j,S}(t_i)
    pub samples: Vec<Vec<C64>>,
}

/// Monomials of degree ≤ D with a nonzero cusp space, and their bases.
#[derive(Clone, Debug)]
pub struct BasisCatalog {
    pub alphabet: Alphabet,
    pub degree: usize,
    pub panel: Vec<C64>,
    pub entries: BTreeMap<Monomial, CatalogEntry>,
}

impl BasisCatalog {
    pub fn get(&self, m: &Monomial) -> Option<&CatalogEntry> {
        self.entries.get(m)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.entries.keys()
    }

    /// Summary rows (monomial, weight, dimension) for display.
    pub fn summary(&self) -> Vec<CatalogRow> {
        self.entries
            .values()
            .map(|e| CatalogRow {
                monomial: e.monomial.to_string(),
                weight: self.alphabet.weight_of(&e.monomial).map(|w| w.value() + 2.0).unwrap_or(f64::NAN),
                multiplier: match self.alphabet.multiplier_of(&e.monomial) {
                    Ok(MultiplierSpec::Trivial) => "trivial".to_string(),
                    Ok(MultiplierSpec::EtaPower { n }) => format!("eta^{n}"),
                    Err(_) => "?".to_string(),
                },
                dim: e.basis.len(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub monomial: String,
    pub weight: f64,
    pub multiplier: String,
    pub dim: usize,
}

/// Bases for every monomial of degree 1…D whose cusp space is nonzero; without
/// a panel the period samples are left empty.
pub fn build_catalog(alphabet: &Alphabet, degree: usize, panel: &[C64], cfg: &QuadConfig) -> Result<BasisCatalog> {
    if degree == 0 {
        return Err(Error::Unsupported("truncation degree must be at least 1".into()));
    }
    let grading = crate::algebra::Grading::new(alphabet.len(), degree);
    let monos: Vec<Monomial> = grading.monomials().filter(|m| m.degree() >= 1).collect();
    let entries: Vec<Option<CatalogEntry>> = monos
        .par_iter()
        .map(|m| {
            let w = alphabet.weight_of(m)?;
            let weight = crate::HalfInteger::from_twice(w.twice() + 4);
            let basis = cusp_space_basis(weight, alphabet.multiplier_of(m)?, DEFAULT_LEN);
            if basis.is_empty() {
                return Ok(None);
            }
            let samples = basis
                .iter()
                .map(|g| {
                    panel
                        .iter()
                        .map(|&t| r_direct_forms(&[g], Endpoint::Cusp { num: 0, den: 1 }, Endpoint::Infinity, t, cfg))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Some(CatalogEntry { monomial: m.clone(), basis, samples }))
        })
        .collect::<Result<_>>()?;
    Ok(BasisCatalog {
        alphabet: alphabet.clone(),
        degree,
        panel: panel.to_vec(),
        entries: entries.into_iter().flatten().map(|e| (e.monomial.clone(), e)).collect(),
    })
}

/// Coordinates of a form in a catalog basis. The bases are in reduced
/// echelon form (basis form j starts q^{j+κ} and has no other q^{i+κ}, i < dim),
/// so the coordinates are the leading coefficients.
pub fn coordinates(f: &CuspForm, basis: &[CuspForm]) -> Vec<C64> {
    (0..basis.len()).map(|j| f.expansion().coeffs().get(j).copied().unwrap_or_default()).collect()
}

/// Collection with h(B) = Σ_j c_j g_j over the catalog bases.
pub fn collection_from_coordinates(
    catalog: &BasisCatalog,
    coords: &BTreeMap<Monomial, Vec<C64>>,
) -> Result<CuspCollection> {
    let mut h = CuspCollection::empty(catalog.alphabet.clone(), catalog.degree);
    for (m, c) in coords {
        let e = catalog.get(m).ok_or_else(|| Error::NotInCatalog(m.to_string()))?;
        if c.len() != e.basis.len() {
            return Err(Error::FormMismatch {
                monomial: m.to_string(),
                reason: format!("{} coordinates for a space of dimension {}", c.len(), e.basis.len()),
            });
        }
        let terms: Vec<(C64, &CuspForm)> = c.iter().copied().zip(e.basis.iter()).collect();
        h.insert(m.clone(), CuspForm::linear_combination(&terms)?)?;
    }
    Ok(h)
}

pub type CocycleFn = Arc<dyn Fn(&GroupElement, C64) -> Result<NcPoly> + Send + Sync>;

/// A cocycle γ, t ↦ X_γ(t) given by an evaluator. Tabulated cocycles only
/// answer at their panel points and for S and T.
#[derive(Clone)]
pub struct Cocycle {
    alphabet: Alphabet,
    degree: usize,
    eval: CocycleFn,
    tabulated: bool,
}

impl Cocycle {
    pub fn from_fn(alphabet: Alphabet, degree: usize, eval: CocycleFn) -> Self {
        Cocycle { alphabet, degree, eval, tabulated: false }
    }

    /// γ ↦ Ψ(h)_γ with base point i.
    pub fn psi(h: &CuspCollection, cfg: QuadConfig) -> Self {
        let hh = Arc::new(h.clone());
        Cocycle::from_fn(
            h.alphabet().clone(),
            h.degree(),
            Arc::new(move |g, t| psi(&hh, g, base_point(), t, &cfg)),
        )
    }

    /// The trivial cocycle γ ↦ 1.
    pub fn trivial(alphabet: Alphabet, degree: usize) -> Self {
        let grading = crate::algebra::Grading::new(alphabet.len(), degree);
        Cocycle::from_fn(alphabet, degree, Arc::new(move |_, _| Ok(NcPoly::one(grading))))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_tabulated(&self) -> bool {
        self.tabulated
    }

    pub fn eval(&self, g: &GroupElement, t: C64) -> Result<NcPoly> {
        (self.eval)(g, t)
    }

    /// The twist γ ↦ (n|γ)·X_γ·n⁻¹ by a unit series n.
    pub fn twist(&self, n: Arc<dyn Fn(C64) -> Result<NcPoly> + Send + Sync>) -> Cocycle {
        let inner = self.eval.clone();
        let alphabet = self.alphabet.clone();
        Cocycle {
            alphabet: self.alphabet.clone(),
            degree: self.degree,
            tabulated: self.tabulated,
            eval: Arc::new(move |g, t| {
                let ng = slash_value(&alphabet, &n(g.act(t))?, g, t)?;
                ng.mul(&inner(g, t)?)?.mul(&n(t)?.inv()?)
            }),
        }
    }
}

/// γ, t ↦ (n|γ)(t)⁻¹·X_γ(t)·n(t), undoing the twist by n.
pub fn deconjugate(x: &Cocycle, n: Arc<dyn Fn(C64) -> Result<NcPoly> + Send + Sync>) -> Cocycle {
    let inner = x.eval.clone();
    let alphabet = x.alphabet.clone();
    Cocycle {
        alphabet: x.alphabet.clone(),
        degree: x.degree,
        tabulated: x.tabulated,
        eval: Arc::new(move |g, t| {
            let ng = slash_value(&alphabet, &n(g.act(t))?, g, t)?;
            ng.inv()?.mul(&inner(g, t)?)?.mul(&n(t)?)
        }),
    }
}

/// Panel values of X_S and X_T in the JSON exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCocycle {
    pub alphabet: String,
    pub degree: usize,
    pub panel: Vec<[f64; 2]>,
    #[serde(rename = "S")]
    pub s: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(rename = "T", default)]
    pub t: BTreeMap<String, Vec<[f64; 2]>>,
}

impl TabulatedCocycle {
    /// Tabulates X_S and X_T on the panel.
    pub fn from_cocycle(x: &Cocycle, panel: &[C64]) -> Result<Self> {
        let grading = crate::algebra::Grading::new(x.alphabet.len(), x.degree);
        let mut out = TabulatedCocycle {
            alphabet: x.alphabet.to_string(),
            degree: x.degree,
            panel: panel.iter().map(|t| [t.re, t.im]).collect(),
            s: BTreeMap::new(),
            t: BTreeMap::new(),
        };
        for (g, table) in [(GroupElement::S, &mut out.s), (GroupElement::T, &mut out.t)] {
            let vals: Vec<NcPoly> = panel.par_iter().map(|&t| x.eval(&g, t)).collect::<Result<_>>()?;
            for (i, m) in grading.monomials().enumerate() {
                table.insert(m.to_string(), vals.iter().map(|v| [v.coeffs()[i].re, v.coeffs()[i].im]).collect());
            }
        }
        Ok(out)
    }

    pub fn panel(&self) -> Vec<C64> {
        self.panel.iter().map(|p| C64::new(p[0], p[1])).collect()
    }

    /// Evaluator answering only for S and T at the tabulated points. A
    /// missing T table means X_T = 1.
    pub fn into_cocycle(self) -> Result<Cocycle> {
        let alphabet: Alphabet = self.alphabet.parse()?;
        let grading = crate::algebra::Grading::new(alphabet.len(), self.degree);
        let panel = self.panel();
        let mut tables: Vec<(GroupElement, Vec<NcPoly>)> = Vec::new();
        for (g, table) in [(GroupElement::S, &self.s), (GroupElement::T, &self.t)] {
            if table.is_empty() {
                if g == GroupElement::T {
                    tables.push((g, vec![NcPoly::one(grading); panel.len()]));
                    continue;
                }
                return Err(Error::NotTabulated("S table is empty".into()));
            }
            let mut vals = vec![NcPoly::zero(grading); panel.len()];
            for (key, list) in table {
                let m: Monomial = key.parse()?;
                if list.len() != panel.len() {
                    return Err(Error::Parse(format!("monomial {key}: {} values for {} points", list.len(), panel.len())));
                }
                for (v, c) in vals.iter_mut().zip(list) {
                    v.set_coeff(&m, C64::new(c[0], c[1]))?;
                }
            }
            tables.push((g, vals));
        }
        let degree = self.degree;
        Ok(Cocycle {
            alphabet: alphabet.clone(),
            degree,
            tabulated: true,
            eval: Arc::new(move |g, t| {
                let (_, vals) = tables
                    .iter()
                    .find(|(h, _)| h == g)
                    .ok_or_else(|| Error::NotTabulated(format!("group element {g}")))?;
                let i = panel
                    .iter()
                    .position(|p| (p - t).norm() <= 1e-12 * (1.0 + t.norm()))
                    .ok_or_else(|| Error::NotTabulated(format!("t = {t}")))?;
                Ok(vals[i].clone())
            }),
        })
    }
}

/// Thresholds for peeling. Residuals of a coefficient are measured relative
/// to max(1, size of that coefficient of X_S on the panel), since periods of
/// high-weight forms reach 10^19 on the default panel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelOptions {
    /// Bound on relative fit residuals, off-catalog coefficients and
    /// lower-degree discrepancies.
    pub tol: f64,
    /// The abelian cocycle check at each degree must hold within this
    /// multiple of `tol`.
    pub check_factor: f64,
    /// Fits with a larger condition number are rejected.
    pub max_condition: f64,
}

impl Default for PeelOptions {
    fn default() -> Self {
        PeelOptions { tol: 1e-8, check_factor: 10.0, max_condition: 1e8 }
    }
}

/// Default 8-point panel for peeling.
pub fn peel_panel() -> Vec<C64> {
    vec![
        C64::new(0.0, -0.8),
        C64::new(0.0, -1.5),
        C64::new(-0.4, -0.9),
        C64::new(0.6, -1.1),
        C64::new(-1.3, -0.5),
        C64::new(1.1, -0.7),
        C64::new(0.2, -2.2),
        C64::new(-0.9, -1.6),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialFit {
    pub monomial: String,
    pub coordinates: Vec<[f64; 2]>,
    pub fit_residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub fits: Vec<MonomialFit>,
    /// max |discrepancy| at S over degree-d monomials outside the catalog
    pub off_catalog_max: f64,
    /// max |discrepancy| at S in degrees below d
    pub lower_degree_max: f64,
    /// abelian cocycle residual on (S,T), (T,S), (S,S); None for tabulated input
    pub abelian_check: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelReport {
    pub degrees: Vec<DegreeReport>,
    /// Ψ(h_rec)_S against X_S on the panel
    pub final_residual: ResidualReport,
}

fn degree_part(p: &NcPoly, d: usize) -> NcPoly {
    let g = p.grading();
    p.map_indexed(|i, c| if g.degree_of(i) == d { c } else { C64::new(0.0, 0.0) })
}

/// Degree-d part of X_γ − Ψ(h)_γ at t, with the magnitude of X_γ per coefficient.
fn discrepancy(x: &Cocycle, h: &CuspCollection, g: &GroupElement, t: C64, d: usize, cfg: &QuadConfig) -> Result<(NcPoly, NcPoly)> {
    let xv = x.eval(g, t)?;
    let diff = xv.sub(&psi(h, g, base_point(), t, cfg)?)?;
    Ok((degree_part(&diff, d), xv))
}

/// Max over the panel of Ȳ_{γδ} − Ȳ_γ|δ − Ȳ_δ for the three generator pairs,
/// each coefficient relative to the size of the X values entering it.
fn abelian_check(x: &Cocycle, h: &CuspCollection, d: usize, panel: &[C64], cfg: &QuadConfig) -> Result<f64> {
    let (s, t) = (GroupElement::S, GroupElement::T);
    let pairs = [(s, t), (t, s), (s, s)];
    let vals: Vec<f64> = pairs
        .par_iter()
        .flat_map(|&(g, dl)| panel.par_iter().map(move |&tt| (g, dl, tt)))
        .map(|(g, dl, tt)| {
            let (lhs, x_gd) = discrepancy(x, h, &(g * dl), tt, d, cfg)?;
            let (yg, x_g) = discrepancy(x, h, &g, dl.act(tt), d, cfg)?;
            let yg = slash_value(&x.alphabet, &yg, &dl, tt)?;
            let x_g = slash_value(&x.alphabet, &x_g, &dl, tt)?;
            let (yd, x_d) = discrepancy(x, h, &dl, tt, d, cfg)?;
            let r = lhs.sub(&yg)?.sub(&yd)?;
            Ok(r.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let scale = 1f64.max(x_gd.coeffs()[i].norm()).max(x_g.coeffs()[i].norm()).max(x_d.coeffs()[i].norm());
                    c.norm() / scale
                })
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Complex least squares Σ_j c_j s_j(t_i) ≈ y_i through its real form; returns
/// (c, max residual, condition number).
fn fit(samples: &[Vec<C64>], y: &[C64]) -> (Vec<C64>, f64, f64) {
    let n = y.len();
    let dim = samples.len();
    // columns are scaled to unit norm so the condition number reflects the
    // geometry of the fit rather than the sizes of the periods
    let norms: Vec<f64> = samples
        .iter()
        .map(|s| s.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .map(|v| if v > 0.0 { v } else { 1.0 })
        .collect();
    let a = DMatrix::from_fn(2 * n, 2 * dim, |r, c| {
        let (i, re_row) = (r / 2, r % 2 == 0);
        let (j, re_col) = (c / 2, c % 2 == 0);
        let s = samples[j][i] / norms[j];
        match (re_row, re_col) {
            (true, true) => s.re,
            (true, false) => -s.im,
            (false, true) => s.im,
            (false, false) => s.re,
        }
    });
    let b = DVector::from_fn(2 * n, |r, _| if r % 2 == 0 { y[r / 2].re } else { y[r / 2].im });
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = svd.solve(&b, 0.0).unwrap_or_else(|_| DVector::zeros(2 * dim));
    let c: Vec<C64> = (0..dim).map(|j| C64::new(x[2 * j], x[2 * j + 1]) / norms[j]).collect();
    let res = (0..n)
        .map(|i| {
            let model: C64 = (0..dim).map(|j| c[j] * samples[j][i]).sum();
            (model - y[i]).norm()
        })
        .fold(0.0, f64::max);
    (c, res, cond)
}

/// Recovers h with Ψ(h) = X from the values of X at S on the catalog panel.
pub fn peel(x: &Cocycle, catalog: &BasisCatalog, opts: &PeelOptions, cfg: &QuadConfig) -> Result<(CuspCollection, PeelReport)> {
    if x.alphabet != catalog.alphabet || x.degree != catalog.degree {
        return Err(Error::AlphabetMismatch);
    }
    let panel = &catalog.panel;
    let s = GroupElement::S;
    let mut h = CuspCollection::empty(catalog.alphabet.clone(), catalog.degree);
    let grading = h.grading();
    let xs: Vec<NcPoly> = panel.par_iter().map(|&t| x.eval(&s, t)).collect::<Result<_>>()?;
    // per-coefficient size of X_S over the panel; all residuals are relative to it
    let xscale: Vec<f64> =
        (0..grading.len()).map(|i| xs.iter().map(|p| p.coeffs()[i].norm()).fold(1.0, f64::max)).collect();
    let mut degrees = Vec::new();
    for d in 1..=catalog.degree {
        let delta: Vec<NcPoly> = panel
            .par_iter()
            .zip(&xs)
            .map(|(&t, xv)| xv.sub(&psi(&h, &s, base_point(), t, cfg)?))
            .collect::<Result<_>>()?;
        let lower_degree_max = delta
            .iter()
            .flat_map(|p| p.coeffs().iter().take(grading.offset(d)).enumerate().map(|(i, c)| c.norm() / xscale[i]))
            .fold(0.0, f64::max);
        if lower_degree_max > opts.tol {
            return Err(Error::FitResidual { monomial: format!("degree < {d}"), residual: lower_degree_max, tol: opts.tol });
        }
        let abelian = if x.is_tabulated() {
            None
        } else {
            let r = abelian_check(x, &h, d, panel, cfg)?;
            let bound = opts.check_factor * opts.tol;
            if r > bound {
                return Err(Error::CocycleCheck { degree: d, residual: r, bound });
            }
            Some(r)
        };
        let mut fits = Vec::new();
        let mut off_catalog_max = 0.0f64;
        let mut found = Vec::new();
        for i in grading.offset(d)..grading.offset(d) + grading.count(d) {
            let m = grading.monomial(i);
            let y: Vec<C64> = delta.iter().map(|p| p.coeffs()[i]).collect();
            match catalog.get(&m) {
                None => {
                    let r = y.iter().map(|c| c.norm()).fold(0.0, f64::max) / xscale[i];
                    if r > opts.tol {
                        return Err(Error::NotInCatalog(format!("{m} (coefficient {r:e} at S)")));
                    }
                    off_catalog_max = off_catalog_max.max(r);
                }
                Some(e) => {
                    if panel.len() < 2 * e.basis.len() {
                        return Err(Error::IllConditioned {
                            monomial: m.to_string(),
                            reason: format!("{} panel points for dimension {}", panel.len(), e.basis.len()),
                        });
                    }
                    let (c, res, cond) = fit(&e.samples, &y);
                    let sample_max = e.samples.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
                    let res = res / xscale[i].max(sample_max);
                    if !(cond <= opts.max_condition) {
                        return Err(Error::IllConditioned { monomial: m.to_string(), reason: format!("condition {cond:e}") });
                    }
                    if res > opts.tol {
                        return Err(Error::FitResidual { monomial: m.to_string(), residual: res, tol: opts.tol });
                    }
                    fits.push(MonomialFit {
                        monomial: m.to_string(),
                        coordinates: c.iter().map(|z| [z.re, z.im]).collect(),
                        fit_residual: res,
                        condition: cond,
                    });
                    if c.iter().any(|z| z.norm() > 0.0) {
                        let terms: Vec<(C64, &CuspForm)> = c.iter().copied().zip(e.basis.iter()).collect();
                        found.push((m, CuspForm::linear_combination(&terms)?));
                    }
                }
            }
        }
        for (m, f) in found {
            h.insert(m, f)?;
        }
        degrees.push(DegreeReport { degree: d, fits, off_catalog_max, lower_degree_max, abelian_check: abelian });
    }
    let res: Vec<NcPoly> = panel
        .par_iter()
        .zip(&xs)
        .map(|(&t, xv)| xv.sub(&psi(&h, &s, base_point(), t, cfg)?))
        .collect::<Result<_>>()?;
    let final_residual = ResidualReport::from_residuals("peel", panel, &res);
    Ok((h, PeelReport { degrees, final_residual }))
}

/// Componentwise comparison of recovered and hidden coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub peel: PeelReport,
    /// ‖c_rec − c‖/‖c‖ per monomial (absolute when c = 0)
    pub relative_errors: BTreeMap<String, f64>,
    pub max_relative_error: f64,
}

/// Peels Ψ(h) for h = Σ c_j g_j and compares coordinates.
pub fn roundtrip(
    catalog: &BasisCatalog,
    coords: &BTreeMap<Monomial, Vec<C64>>,
    opts: &PeelOptions,
    cfg: &QuadConfig,
) -> Result<(CuspCollection, RoundtripReport)> {
    let hidden = collection_from_coordinates(catalog, coords)?;
    let x = Cocycle::psi(&hidden, *cfg);
    let (rec, peel_report) = peel(&x, catalog, opts, cfg)?;
    let mut relative_errors = BTreeMap::new();
    for (m, e) in &catalog.entries {
        let truth = coords.get(m).cloned().unwrap_or_else(|| vec![C64::new(0.0, 0.0); e.basis.len()]);
        let got = rec.get(m).map(|f| coordinates(f, &e.basis)).unwrap_or_else(|| vec![C64::new(0.0, 0.0); e.basis.len()]);
        let err: f64 = truth.iter().zip(&got).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let norm: f64 = truth.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        relative_errors.insert(m.to_string(), if norm > 0.0 { err / norm } else { err });
    }
    let max_relative_error = relative_errors.values().cloned().fold(0.0, f64::max);
    Ok((rec, RoundtripReport { peel: peel_report, relative_errors, max_relative_error }))
}

/// Separation of Ψ(h)_S and Ψ(h′)_S per degree, modulo parabolic coboundaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    /// lowest degree where the S-values differ by more than roundoff
    pub first_differing_degree: Option<usize>,
    /// per degree: max over monomials of the panel residual after the coboundary fit
    pub margins: BTreeMap<usize, f64>,
    pub margin: f64,
}

/// Coboundary values (n|S − n)(t) for n = e^{2πiμt}, μ ∈ κ + {−1, 0, 1},
/// κ the fractional part of the monomial's multiplier exponent.
fn coboundary_samples(eta: u32, w: crate::HalfInteger, panel: &[C64]) -> Vec<Vec<C64>> {
    let s = GroupElement::S;
    let kappa = (eta % 24) as f64 / 24.0;
    [-1.0, 0.0, 1.0]
        .iter()
        .map(|&k| {
            let mu = kappa + k;
            let n = |t: C64| (C64::new(0.0, 2.0 * std::f64::consts::PI * mu) * t).exp();
            panel.iter().map(|&t| slash_factor(eta, w, &s, t) * n(s.act(t)) - n(t)).collect()
        })
        .collect()
}

/// Compares Ψ(h)_S and Ψ(h′)_S degree by degree. At each degree the
/// difference of every monomial coefficient is reduced by its best fit in
/// the span of a few parabolic coboundaries; the margin is the largest
/// remaining panel value at the first differing degree.
pub fn injectivity_probe(h: &CuspCollection, h2: &CuspCollection, panel: &[C64], cfg: &QuadConfig) -> Result<InjectivityReport> {
    if h.alphabet() != h2.alphabet() || h.degree() != h2.degree() {
        return Err(Error::AlphabetMismatch);
    }
    let s = GroupElement::S;
    let diffs: Vec<NcPoly> = panel
        .par_iter()
        .map(|&t| psi(h, &s, base_point(), t, cfg)?.sub(&psi(h2, &s, base_point(), t, cfg)?))
        .collect::<Result<_>>()?;
    let grading = h.grading();
    let alphabet = h.alphabet();
    let mut margins = BTreeMap::new();
    for d in 1..=h.degree() {
        let mut worst = 0.0f64;
        for i in grading.offset(d)..grading.offset(d) + grading.count(d) {
            let m = grading.monomial(i);
            let y: Vec<C64> = diffs.iter().map(|p| p.coeffs()[i]).collect();
            if y.iter().all(|c| c.norm() == 0.0) {
                continue;
            }
            let cob = coboundary_samples(alphabet.eta_count_of(&m)?, alphabet.weight_of(&m)?, panel);
            let (_, res, _) = fit(&cob, &y);
            worst = worst.max(res);
        }
        margins.insert(d, worst);
    }
    // differences at roundoff level (identical collections) do not count
    let first = margins.iter().find(|(_, v)| **v > 1e-10).map(|(d, _)| *d);
    let margin = first.map(|d| margins[&d]).unwrap_or(0.0);
    Ok(InjectivityReport { first_differing_degree: first, margins, margin })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_combination() {
        let samples = vec![
            vec![C64::new(1.0, 0.5), C64::new(0.2, -1.0), C64::new(-0.3, 0.7), C64::new(2.0, 0.1)],
            vec![C64::new(0.0, 1.0), C64::new(1.5, 0.3), C64::new(0.4, 0.4), C64::new(-1.0, 0.0)],
        ];
        let c = [C64::new(0.7, -0.2), C64::new(-1.3, 0.9)];
        let y: Vec<C64> = (0..4).map(|i| c[0] * samples[0][i] + c[1] * samples[1][i]).collect();
        let (got, res, cond) = fit(&samples, &y);
        assert!(res < 1e-14 && cond.is_finite());
        assert!((got[0] - c[0]).norm() < 1e-14 && (got[1] - c[1]).norm() < 1e-14);
    }
}
