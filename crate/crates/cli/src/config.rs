use std::collections::BTreeMap;
use std::path::Path;

use iterperiod::cocycle::default_panel;
use iterperiod::collection::{CollectionJson, FormEntry};
use iterperiod::iterint::{QuadConfig, YMaxPolicy};
use iterperiod::modforms::{named_form, CuspForm, DEFAULT_LEN};
use iterperiod::{Alphabet, CuspCollection, Monomial, MultiplierSpec, C64};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Quadrature {
    pub rtol: f64,
    pub atol: f64,
    pub y_max: YMaxPolicy,
    pub max_steps: usize,
    pub precision: String,
}

impl Default for Quadrature {
    fn default() -> Self {
        let q = QuadConfig::default();
        Quadrature { rtol: q.rtol, atol: q.atol, y_max: q.y_max, max_steps: q.max_steps, precision: "f64".into() }
    }
}

/// Everything a run depends on. Unset optional fields are filled per
/// command before the config is echoed into the report.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub alphabet: String,
    pub degree: usize,
    pub quadrature: Quadrature,
    pub panel: Option<Vec<[f64; 2]>>,
    pub format: Format,
    pub seed: u64,
    /// residual bound for `verify` and the shuffle check of `mlv`
    pub threshold: f64,
    /// form specs "name" or "c*name" for rel2, rel3, shuffle and mlv
    pub forms: Option<Vec<String>>,
    /// endpoints "inf", "cusp:p/q" or "re,im"
    pub endpoints: Option<Vec<String>>,
    /// the collection h; defaults to the first basis form on each letter
    pub collection: Option<CollectionJson>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alphabet: "trivial:10".into(),
            degree: 3,
            quadrature: Quadrature::default(),
            panel: None,
            format: Format::Json,
            seed: 0,
            threshold: 1e-7,
            forms: None,
            endpoints: None,
            collection: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.degree == 0 {
            return Err(Failure::config("degree must be at least 1"));
        }
        if self.quadrature.precision != "f64" {
            return Err(Failure::config(format!(
                "precision '{}' is not supported; only f64 is implemented",
                self.quadrature.precision
            )));
        }
        self.quad()?;
        self.alphabet()?;
        if let Some(p) = &self.panel {
            if p.is_empty() || p.iter().any(|t| !(t[1] < 0.0)) {
                return Err(Failure::config("panel points must lie in the lower half-plane"));
            }
        }
        if !(self.threshold > 0.0) {
            return Err(Failure::config("threshold must be positive"));
        }
        Ok(())
    }

    pub fn quad(&self) -> Result<QuadConfig, Failure> {
        let q = QuadConfig {
            rtol: self.quadrature.rtol,
            atol: self.quadrature.atol,
            y_max: self.quadrature.y_max,
            max_steps: self.quadrature.max_steps,
        };
        q.validate().map_err(Failure::config_err)?;
        Ok(q)
    }

    pub fn alphabet(&self) -> Result<Alphabet, Failure> {
        self.alphabet.parse().map_err(Failure::config_err)
    }

    pub fn panel_or(&mut self, default: Vec<C64>) -> Vec<C64> {
        let p = self.panel.get_or_insert_with(|| default.iter().map(|t| [t.re, t.im]).collect());
        p.iter().map(|t| C64::new(t[0], t[1])).collect()
    }

    pub fn panel_default(&mut self) -> Vec<C64> {
        self.panel_or(default_panel())
    }

    pub fn forms_or(&mut self, default: &[&str]) -> Result<Vec<CuspForm>, Failure> {
        let specs = self.forms.get_or_insert_with(|| default.iter().map(|s| s.to_string()).collect());
        specs.iter().map(|s| parse_form(s)).collect()
    }

    pub fn endpoints_or(&mut self, default: &[&str]) -> Result<Vec<iterperiod::iterint::Endpoint>, Failure> {
        let specs = self.endpoints.get_or_insert_with(|| default.iter().map(|s| s.to_string()).collect());
        specs.iter().map(|s| s.parse().map_err(Failure::config_err)).collect()
    }

    /// The configured collection, or A_i ↦ first basis form of each letter's space.
    pub fn collection(&mut self) -> Result<CuspCollection, Failure> {
        if self.collection.is_none() {
            let a = self.alphabet()?;
            let mut forms = BTreeMap::new();
            for (i, l) in a.letters().iter().enumerate() {
                let name = match l.multiplier() {
                    MultiplierSpec::Trivial => format!("s{}", l.shifted_weight().twice() / 2 + 2),
                    MultiplierSpec::EtaPower { n } => format!("eta{n}"),
                };
                if named_form(&name, 8).is_ok() {
                    forms.insert(Monomial::letter(i).to_string(), FormEntry::Named { name, scale: [1.0, 0.0] });
                }
            }
            self.collection = Some(CollectionJson { alphabet: a.to_string(), degree: self.degree, forms });
        }
        let j = self.collection.as_ref().expect("set above");
        let h = CuspCollection::from_json(j).map_err(Failure::config_err)?;
        if h.alphabet() != &self.alphabet()? || h.degree() != self.degree {
            return Err(Failure::config("collection alphabet/degree differ from the run configuration"));
        }
        Ok(h)
    }
}

/// "name" or "c*name" with a real scale c, e.g. "0*delta".
pub fn parse_form(spec: &str) -> Result<CuspForm, Failure> {
    let (scale, name) = match spec.split_once('*') {
        Some((c, n)) => (c.trim().parse::<f64>().map_err(|_| Failure::config(format!("bad scale in '{spec}'")))?, n.trim()),
        None => (1.0, spec.trim()),
    };
    let f = named_form(name, DEFAULT_LEN).map_err(Failure::config_err)?;
    Ok(if scale == 1.0 { f } else { f.scale(C64::new(scale, 0.0)) })
}

/// "re,im;re,im;…"
pub fn parse_panel(s: &str) -> Result<Vec<[f64; 2]>, Failure> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p.split_once(',').ok_or_else(|| Failure::config(format!("bad panel point '{p}'")))?;
            let re = a.trim().parse::<f64>().map_err(|_| Failure::config(format!("bad panel point '{p}'")))?;
            let im = b.trim().parse::<f64>().map_err(|_| Failure::config(format!("bad panel point '{p}'")))?;
            Ok([re, im])
        })
        .collect()
}

pub fn parse_y_max(s: &str) -> Result<YMaxPolicy, Failure> {
    if s == "auto" {
        return Ok(YMaxPolicy::Auto);
    }
    s.parse::<f64>().map(YMaxPolicy::Explicit).map_err(|_| Failure::config(format!("bad y_max '{s}'")))
}
