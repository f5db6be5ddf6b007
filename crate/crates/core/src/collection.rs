//! Finitely supported cusp-form collections h: Monomial → CuspForm.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::algebra::{Alphabet, Grading, Monomial};
use crate::modforms::{cusp_space_dim, named_form, CuspForm, FormJson, DEFAULT_LEN};
use crate::{Error, Result, C64};

/// An element of S(𝒜; Γ) truncated at degree D.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspCollection {
    alphabet: Alphabet,
    degree: usize,
    support: BTreeMap<Monomial, CuspForm>,
}

impl CuspCollection {
    pub fn empty(alphabet: Alphabet, degree: usize) -> Self {
        CuspCollection { alphabet, degree, support: BTreeMap::new() }
    }

    pub fn new(alphabet: Alphabet, degree: usize, support: BTreeMap<Monomial, CuspForm>) -> Result<Self> {
        let mut h = Self::empty(alphabet, degree);
        for (m, f) in support {
            h.insert(m, f)?;
        }
        Ok(h)
    }

    /// Checks that `f` may be assigned to `m`: 1 ≤ d(m) ≤ D, weight w(m)+2,
    /// multiplier v(m), and a nonzero cusp space.
    pub fn check_entry(&self, m: &Monomial, f: &CuspForm) -> Result<()> {
        let fail = |reason: String| Error::FormMismatch { monomial: m.to_string(), reason };
        if m.is_empty() {
            return Err(fail("the empty monomial carries no form".into()));
        }
        if m.degree() > self.degree {
            return Err(fail(format!("degree {} exceeds truncation {}", m.degree(), self.degree)));
        }
        let w = self.alphabet.weight_of(m)?;
        let v = self.alphabet.multiplier_of(m)?;
        if f.shifted_weight() != w {
            return Err(fail(format!("form has shifted weight {}, monomial needs {}", f.shifted_weight(), w)));
        }
        if f.multiplier() != v {
            return Err(fail(format!("form multiplier {:?} differs from {:?}", f.multiplier(), v)));
        }
        if cusp_space_dim(f.weight(), v) == 0 {
            return Err(fail("the cusp space of this monomial is zero".into()));
        }
        Ok(())
    }

    pub fn insert(&mut self, m: Monomial, f: CuspForm) -> Result<()> {
        self.check_entry(&m, &f)?;
        self.support.insert(m, f);
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grading(&self) -> Grading {
        Grading::new(self.alphabet.len(), self.degree)
    }

    pub fn support(&self) -> &BTreeMap<Monomial, CuspForm> {
        &self.support
    }

    pub fn get(&self, m: &Monomial) -> Option<&CuspForm> {
        self.support.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.support.values().all(CuspForm::is_zero)
    }

    /// Restriction to monomials of degree < d.
    pub fn below_degree(&self, d: usize) -> CuspCollection {
        CuspCollection {
            alphabet: self.alphabet.clone(),
            degree: self.degree,
            support: self.support.iter().filter(|(m, _)| m.degree() < d).map(|(m, f)| (m.clone(), f.clone())).collect(),
        }
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.alphabet.hash(&mut h);
        self.degree.hash(&mut h);
        for (m, f) in &self.support {
            m.hash(&mut h);
            f.fingerprint().hash(&mut h);
        }
        h.finish()
    }

    pub fn to_json(&self) -> CollectionJson {
        CollectionJson {
            alphabet: self.alphabet.to_string(),
            degree: self.degree,
            forms: self.support.iter().map(|(m, f)| (m.to_string(), FormEntry::Explicit(f.to_json()))).collect(),
        }
    }

    pub fn from_json(j: &CollectionJson) -> Result<CuspCollection> {
        let alphabet: Alphabet = j.alphabet.parse()?;
        let mut h = CuspCollection::empty(alphabet, j.degree);
        for (m, entry) in &j.forms {
            let m: Monomial = m.parse()?;
            let f = entry.resolve()?;
            h.insert(m, f)?;
        }
        Ok(h)
    }
}

/// JSON shape of a collection. Entries are either full forms or a named
/// form with an optional complex scale, e.g. `{"name": "g16", "scale": [0.7, 0]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CollectionJson {
    pub alphabet: String,
    pub degree: usize,
    pub forms: BTreeMap<String, FormEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormEntry {
    Named {
        name: String,
        #[serde(default = "unit_scale")]
        scale: [f64; 2],
    },
    Explicit(FormJson),
}

fn unit_scale() -> [f64; 2] {
    [1.0, 0.0]
}

impl FormEntry {
    pub fn resolve(&self) -> Result<CuspForm> {
        match self {
            FormEntry::Named { name, scale } => {
                let f = named_form(name, DEFAULT_LEN)?;
                Ok(if *scale == unit_scale() { f } else { f.scale(C64::new(scale[0], scale[1])) })
            }
            FormEntry::Explicit(j) => CuspForm::from_json(j),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{delta, g16};

    #[test]
    fn validation() {
        let a: Alphabet = "trivial:10,trivial:4".parse().unwrap();
        let mut h = CuspCollection::empty(a, 2);
        h.insert(Monomial::letter(0), delta(50)).unwrap();
        h.insert("A1*A2".parse().unwrap(), g16(50)).unwrap();
        // wrong weight
        assert!(h.insert(Monomial::letter(1), delta(50)).is_err());
        // beyond truncation
        assert!(h.insert("A1*A1*A2".parse().unwrap(), delta(50)).is_err());
        assert!(h.insert(Monomial::empty(), delta(50)).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let a: Alphabet = "trivial:10".parse().unwrap();
        let mut h = CuspCollection::empty(a, 1);
        h.insert(Monomial::letter(0), delta(30).scale(C64::new(2.0, 0.0))).unwrap();
        let s = serde_json::to_string(&h.to_json()).unwrap();
        let back = CuspCollection::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.fingerprint(), h.fingerprint());
        let named: CollectionJson =
            serde_json::from_str(r#"{"alphabet":"trivial:10","degree":1,"forms":{"A1":{"name":"delta"}}}"#).unwrap();
        assert!(CuspCollection::from_json(&named).is_ok());
    }
}
