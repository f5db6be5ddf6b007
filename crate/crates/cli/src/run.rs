use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use iterperiod::cocycle::{eta_example_check, psi as psi_value, verify_cocycle, verify_equivariance, ResidualReport};
use iterperiod::iterint::{verify_mult, verify_rel2, verify_rel3, Endpoint};
use iterperiod::mlv::{double_moment_rows, double_moments, moments, period_polynomial, verify_shuffle, DoubleMomentRow};
use iterperiod::reconstruct::{
    build_catalog, coordinates, peel, peel_panel, roundtrip as run_roundtrip, BasisCatalog, CatalogRow,
    PeelOptions, PeelReport, TabulatedCocycle,
};
use iterperiod::{GroupElement, Monomial, C64};

use crate::config::RunConfig;
use crate::output::Envelope;
use crate::{read_json, Failure, Identity};

fn group(s: &str) -> Result<GroupElement, Failure> {
    s.parse().map_err(Failure::config_err)
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

#[derive(Serialize)]
struct VerifyResult {
    identity: String,
    threshold: f64,
    max: f64,
    reports: Vec<ResidualReport>,
}

fn verdict(cfg: &RunConfig, identity: Identity, reports: Vec<ResidualReport>) -> Result<Envelope, Failure> {
    let max = reports.iter().map(|r| r.max).fold(0.0, f64::max);
    let pass = reports.iter().all(|r| r.passes(cfg.threshold));
    let name = format!("{identity:?}").to_lowercase();
    let result = VerifyResult { identity: name.clone(), threshold: cfg.threshold, max, reports };
    Envelope::new(&format!("verify {name}"), cfg, pass, result)
}

fn endpoints_n<const N: usize>(cfg: &mut RunConfig, default: [&str; N]) -> Result<[Endpoint; N], Failure> {
    let e = cfg.endpoints_or(&default)?;
    e.try_into().map_err(|_| Failure::config(format!("expected {N} endpoints")))
}

fn forms_n<const N: usize>(cfg: &mut RunConfig, default: [&str; N]) -> Result<[iterperiod::CuspForm; N], Failure> {
    let f = cfg.forms_or(&default)?;
    f.try_into().map_err(|_| Failure::config(format!("expected {N} forms")))
}

fn interior(e: Endpoint) -> Result<C64, Failure> {
    match e {
        Endpoint::Point(p) => Ok(C64::new(p[0], p[1])),
        other => Err(Failure::config(format!("endpoint {other} must be a point of the upper half-plane"))),
    }
}

pub fn verify(
    cfg: &mut RunConfig,
    identity: Identity,
    gamma: Option<String>,
    delta: Option<String>,
    n: Option<u8>,
) -> Result<Envelope, Failure> {
    let q = cfg.quad()?;
    let mut reports = Vec::new();
    match identity {
        Identity::Cocycle => {
            let pairs = match (gamma, delta) {
                (Some(g), Some(d)) => vec![(group(&g)?, group(&d)?)],
                (None, None) => {
                    let (s, t) = (GroupElement::S, GroupElement::T);
                    vec![(s, s), (s, t), (t, s), (t * s, s * t)]
                }
                _ => return Err(Failure::config("give both --gamma and --delta or neither")),
            };
            let h = cfg.collection()?;
            let panel = cfg.panel_default();
            for (g, d) in pairs {
                reports.push(verify_cocycle(&h, &g, &d, &panel, &q)?);
            }
        }
        Identity::Equivariance => {
            let gammas = match gamma {
                Some(g) => vec![group(&g)?],
                None => vec![GroupElement::T, GroupElement::S],
            };
            let [y, x] = endpoints_n(cfg, ["inf", "0,1.3"])?;
            let h = cfg.collection()?;
            let panel = cfg.panel_default();
            for g in gammas {
                reports.push(verify_equivariance(&h, &g, (y, x), &panel, &q)?);
            }
        }
        Identity::Mult => {
            let [z, y, x] = endpoints_n(cfg, ["0.2,2.5", "0.2,1.2", "0.2,0.6"])?;
            let pts = (interior(z)?, interior(y)?, interior(x)?);
            let h = cfg.collection()?;
            let panel = cfg.panel_default();
            reports.push(verify_mult(&h, pts, &panel, &q)?);
        }
        Identity::Rel2 => {
            let [f1, f2] = forms_n(cfg, ["delta", "delta"])?;
            let [z, y, x] = endpoints_n(cfg, ["inf", "cusp:0/1", "0.4,1.1"])?;
            let panel = cfg.panel_default();
            reports.push(verify_rel2([&f1, &f2], (z, y, x), &panel, &q)?);
        }
        Identity::Rel3 => {
            let [f1, f2, f3] = forms_n(cfg, ["delta", "delta", "delta"])?;
            let [z, y, x] = endpoints_n(cfg, ["inf", "cusp:0/1", "0.4,1.1"])?;
            let panel = cfg.panel_default();
            reports.push(verify_rel3([&f1, &f2, &f3], (z, y, x), &panel, &q)?);
        }
        Identity::EtaExample => {
            let n = n.unwrap_or(24);
            cfg.alphabet = format!("eta:{n}");
            cfg.alphabet()?;
            let panel = cfg.panel_default();
            let r = eta_example_check(n, cfg.degree, &panel, &q)?;
            reports.push(r.inversion);
            reports.push(r.braid);
        }
        Identity::Shuffle => {
            let [f1, f2] = forms_n(cfg, ["delta", "delta"])?;
            let panel = cfg.panel_default();
            reports.push(verify_shuffle(&f1, &f2, &panel, &q)?);
        }
    }
    verdict(cfg, identity, reports)
}

const NORMALIZATION: &str =
    "M_k = i^(k+1) * integral_0^inf f(iy) y^k dy; Lambda(f, k+1) = M_k / i^(k+1); p(t) = sum_k C(w,k) (-1)^(w-k) M_k t^(w-k)";

#[derive(Serialize)]
struct MomentLine {
    form: String,
    k: usize,
    moment: [f64; 2],
    lambda: [f64; 2],
}

#[derive(Serialize)]
struct FormPeriods {
    form: String,
    period_polynomial: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct PairTable {
    forms: (String, String),
    double_moments: Vec<DoubleMomentRow>,
    shuffle: ResidualReport,
}

#[derive(Serialize)]
struct MlvResult {
    normalization: &'static str,
    max_order: u8,
    moments: Vec<MomentLine>,
    period_polynomials: Vec<FormPeriods>,
    pairs: Vec<PairTable>,
}

pub fn mlv(cfg: &mut RunConfig, max_order: u8) -> Result<Envelope, Failure> {
    let q = cfg.quad()?;
    let forms = cfg.forms_or(&["delta"])?;
    let names = cfg.forms.clone().unwrap_or_default();
    let mut lines = Vec::new();
    let mut polys = Vec::new();
    for (f, name) in forms.iter().zip(&names) {
        let ms = moments(f, &q)?;
        for (k, m) in ms.iter().enumerate() {
            let l = m / C64::i().powi(k as i32 + 1);
            lines.push(MomentLine { form: name.clone(), k, moment: pair(*m), lambda: pair(l) });
        }
        let p = period_polynomial(f, &q)?;
        polys.push(FormPeriods { form: name.clone(), period_polynomial: p.coeffs.iter().map(|c| pair(*c)).collect() });
    }
    let mut pairs = Vec::new();
    if max_order >= 2 {
        let panel = cfg.panel_default();
        let jobs: Vec<(usize, usize)> = (0..forms.len()).flat_map(|i| (0..forms.len()).map(move |j| (i, j))).collect();
        pairs = jobs
            .par_iter()
            .map(|&(i, j)| {
                let dm = double_moments(&forms[i], &forms[j], &q)?;
                let shuffle = verify_shuffle(&forms[i], &forms[j], &panel, &q)?;
                Ok(PairTable {
                    forms: (names[i].clone(), names[j].clone()),
                    double_moments: double_moment_rows((&names[i], &names[j]), &dm),
                    shuffle,
                })
            })
            .collect::<Result<Vec<_>, iterperiod::Error>>()?;
    }
    let pass = pairs.iter().all(|p| p.shuffle.passes(cfg.threshold));
    let result = MlvResult { normalization: NORMALIZATION, max_order, moments: lines, period_polynomials: polys, pairs };
    Envelope::new("mlv", cfg, pass, result)
}

#[derive(Serialize)]
struct RoundtripResult {
    source: String,
    hidden: Option<BTreeMap<String, Vec<[f64; 2]>>>,
    recovered: BTreeMap<String, Vec<[f64; 2]>>,
    relative_errors: Option<BTreeMap<String, f64>>,
    max_relative_error: Option<f64>,
    bound: Option<f64>,
    peel: PeelReport,
}

const ROUNDTRIP_BOUND: f64 = 1e-4;

fn coord_map(coords: &BTreeMap<Monomial, Vec<C64>>) -> BTreeMap<String, Vec<[f64; 2]>> {
    coords.iter().map(|(m, c)| (m.to_string(), c.iter().map(|z| pair(*z)).collect())).collect()
}

fn recovered_coords(h: &iterperiod::CuspCollection, catalog: &BasisCatalog) -> BTreeMap<String, Vec<[f64; 2]>> {
    catalog
        .entries
        .iter()
        .map(|(m, e)| {
            let c = h.get(m).map(|f| coordinates(f, &e.basis)).unwrap_or_else(|| vec![C64::new(0.0, 0.0); e.basis.len()]);
            (m.to_string(), c.iter().map(|z| pair(*z)).collect())
        })
        .collect()
}

pub fn roundtrip(
    cfg: &mut RunConfig,
    input: Option<PathBuf>,
    random: bool,
    tabulated: Option<PathBuf>,
) -> Result<Envelope, Failure> {
    let opts = PeelOptions::default();
    if let Some(p) = tabulated {
        let table: TabulatedCocycle = read_json(&p)?;
        cfg.alphabet = table.alphabet.clone();
        cfg.degree = table.degree;
        cfg.panel = Some(table.panel.clone());
        cfg.validate()?;
        let q = cfg.quad()?;
        let panel = table.panel();
        let catalog = build_catalog(&cfg.alphabet()?, cfg.degree, &panel, &q)?;
        let x = table.into_cocycle().map_err(Failure::config_err)?;
        let (rec, report) = peel(&x, &catalog, &opts, &q).map_err(Failure::from_peel)?;
        let result = RoundtripResult {
            source: format!("tabulated {}", p.display()),
            hidden: None,
            recovered: recovered_coords(&rec, &catalog),
            relative_errors: None,
            max_relative_error: None,
            bound: None,
            peel: report,
        };
        return Envelope::new("roundtrip", cfg, true, result);
    }
    if let Some(p) = &input {
        let j: iterperiod::collection::CollectionJson = read_json(p)?;
        cfg.alphabet = j.alphabet.clone();
        cfg.degree = j.degree;
        cfg.collection = Some(j);
        cfg.validate()?;
    }
    let q = cfg.quad()?;
    let panel = cfg.panel_or(peel_panel());
    let catalog = build_catalog(&cfg.alphabet()?, cfg.degree, &panel, &q)?;
    let (source, coords) = if random {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let coords: BTreeMap<Monomial, Vec<C64>> = catalog
            .entries
            .iter()
            .map(|(m, e)| (m.clone(), (0..e.basis.len()).map(|_| C64::new(rng.gen_range(-2.0..=2.0), 0.0)).collect()))
            .collect();
        (format!("random seed {}", cfg.seed), coords)
    } else {
        if cfg.collection.is_none() {
            return Err(Failure::config("roundtrip needs --input, --random, --tabulated or a collection"));
        }
        let h = cfg.collection()?;
        let mut coords = BTreeMap::new();
        for (m, f) in h.support() {
            let e = catalog
                .get(m)
                .ok_or_else(|| Failure::config(format!("component {m} lies outside the catalog (no cusp forms)")))?;
            coords.insert(m.clone(), coordinates(f, &e.basis));
        }
        let source = input.map(|p| format!("input {}", p.display())).unwrap_or_else(|| "collection".into());
        (source, coords)
    };
    let (rec, report) = run_roundtrip(&catalog, &coords, &opts, &q).map_err(Failure::from_peel)?;
    let pass = report.max_relative_error <= ROUNDTRIP_BOUND;
    let result = RoundtripResult {
        source,
        hidden: Some(coord_map(&coords)),
        recovered: recovered_coords(&rec, &catalog),
        relative_errors: Some(report.relative_errors),
        max_relative_error: Some(report.max_relative_error),
        bound: Some(ROUNDTRIP_BOUND),
        peel: report.peel,
    };
    Envelope::new("roundtrip", cfg, pass, result)
}

#[derive(Serialize)]
struct CatalogResult {
    monomials: Vec<CatalogRow>,
}

pub fn catalog(cfg: &mut RunConfig) -> Result<Envelope, Failure> {
    let q = cfg.quad()?;
    let c = build_catalog(&cfg.alphabet()?, cfg.degree, &[], &q)?;
    Envelope::new("catalog", cfg, true, CatalogResult { monomials: c.summary() })
}

#[derive(Serialize)]
struct PsiPoint {
    t: [f64; 2],
    coeffs: BTreeMap<String, [f64; 2]>,
}

#[derive(Serialize)]
struct PsiResult {
    gamma: String,
    values: Vec<PsiPoint>,
}

pub fn psi(cfg: &mut RunConfig, gamma: &str) -> Result<Envelope, Failure> {
    let q = cfg.quad()?;
    let g = group(gamma)?;
    let h = cfg.collection()?;
    let panel = cfg.panel_default();
    let z0 = C64::new(0.0, 1.0);
    let values = panel
        .par_iter()
        .map(|&t| Ok(PsiPoint { t: pair(t), coeffs: psi_value(&h, &g, z0, t, &q)?.to_map() }))
        .collect::<Result<Vec<_>, iterperiod::Error>>()?;
    Envelope::new("psi", cfg, true, PsiResult { gamma: g.to_string(), values })
}
