//! Residual reports shared by all identity checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::NcPoly;
use crate::C64;

/// Maximum residuals of an identity over a panel, by degree and by monomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: String,
    pub panel: Vec<[f64; 2]>,
    pub per_degree_max: BTreeMap<usize, f64>,
    pub max: f64,
    pub per_monomial: BTreeMap<String, f64>,
}

impl ResidualReport {
    /// Builds a report from residual series, one per panel point.
    pub fn from_residuals(identity: &str, panel: &[C64], residuals: &[NcPoly]) -> Self {
        let mut per_degree_max = BTreeMap::new();
        let mut per_monomial = BTreeMap::new();
        for r in residuals {
            let g = r.grading();
            for (i, c) in r.coeffs().iter().enumerate() {
                let m = g.monomial(i);
                let e = per_degree_max.entry(m.degree()).or_insert(0.0f64);
                *e = e.max(c.norm());
                let e = per_monomial.entry(m.to_string()).or_insert(0.0f64);
                *e = e.max(c.norm());
            }
        }
        Self::assemble(identity, panel, per_degree_max, per_monomial)
    }

    /// Builds a report from labelled scalar residuals with a degree each.
    pub fn from_scalars(identity: &str, panel: &[C64], items: &[(usize, String, f64)]) -> Self {
        let mut per_degree_max = BTreeMap::new();
        let mut per_monomial = BTreeMap::new();
        for (d, label, r) in items {
            let e = per_degree_max.entry(*d).or_insert(0.0f64);
            *e = e.max(*r);
            let e = per_monomial.entry(label.clone()).or_insert(0.0f64);
            *e = e.max(*r);
        }
        Self::assemble(identity, panel, per_degree_max, per_monomial)
    }

    fn assemble(
        identity: &str,
        panel: &[C64],
        per_degree_max: BTreeMap<usize, f64>,
        per_monomial: BTreeMap<String, f64>,
    ) -> Self {
        let max = per_degree_max.values().cloned().fold(0.0, f64::max);
        ResidualReport {
            identity: identity.to_string(),
            panel: panel.iter().map(|t| [t.re, t.im]).collect(),
            per_degree_max,
            max,
            per_monomial,
        }
    }

    pub fn passes(&self, bound: f64) -> bool {
        self.max <= bound
    }
}

