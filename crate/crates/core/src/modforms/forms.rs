use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::{GroupElement, HalfInteger, MultiplierSpec};
use crate::{Error, Result, C64};

use super::multiplier::multiplier_value;

/// Σ_{n=0}^{M} a_n q^{n+κ} with q = e^{2πiτ}.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    kappa: Ratio<i64>,
    coeffs: Vec<C64>,
}

impl QSeries {
    pub fn new(kappa: Ratio<i64>, coeffs: Vec<C64>) -> Self {
        QSeries { kappa, coeffs }
    }

    pub fn kappa(&self) -> Ratio<i64> {
        self.kappa
    }

    pub fn kappa_f64(&self) -> f64 {
        self.kappa.to_f64().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// |f(x+iy)| ≤ c·e^{−2π κ_min y} for y ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayBound {
    pub c: f64,
    pub kappa_min: f64,
}

/// A cusp form on SL₂(ℤ) given by a truncated q-expansion.
///
/// The multiplier is stored canonically (η count reduced mod 24), and the
/// space is always of the shape ηʳ·M_j(SL₂(ℤ)) with j = k − r/2 an even
/// integer, so the automorphy factor is ((cτ+d)^{1/2})ʳ (cτ+d)^j.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspForm {
    shifted_weight: HalfInteger,
    multiplier: MultiplierSpec,
    expansion: QSeries,
    decay: DecayBound,
    growth_c: f64,
    growth_p: f64,
    name: Option<String>,
}

/// Relative size below which an evaluation tail is considered negligible.
const TAIL_EPS: f64 = 1e-17;

/// Below this height evaluation first moves τ into the fundamental domain.
const REDUCE_BELOW: f64 = 0.9;

impl CuspForm {
    /// Builds a form; the weight/multiplier pair must be of η-power type
    /// with matching cusp parameter.
    pub fn new(shifted_weight: HalfInteger, multiplier: MultiplierSpec, expansion: QSeries) -> Result<Self> {
        let multiplier = MultiplierSpec::from_eta_count(multiplier.eta_count());
        let r = multiplier.residue() as i64;
        let want_kappa = if r == 0 { Ratio::from_integer(1) } else { Ratio::new(r, 24) };
        if expansion.kappa != want_kappa {
            return Err(Error::FormMismatch {
                monomial: String::new(),
                reason: format!("cusp parameter {} does not match multiplier (expected {})", expansion.kappa, want_kappa),
            });
        }
        let k2 = shifted_weight.twice() + 4;
        if k2 <= 0 || (k2 as i64 - r) % 4 != 0 {
            return Err(Error::Unsupported(format!(
                "weight {} with multiplier eta^{} is not of eta-power type",
                HalfInteger::from_twice(k2),
                r
            )));
        }
        let k = k2 as f64 / 2.0;
        let growth_p = k / 2.0 + 1.0;
        let growth_c = expansion
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a.norm() / ((n + 1) as f64).powf(growth_p))
            .fold(0.0, f64::max);
        let e = (-2.0 * PI).exp();
        let c = expansion.coeffs.iter().enumerate().map(|(n, a)| a.norm() * e.powi(n as i32)).sum();
        let decay = DecayBound { c, kappa_min: expansion.kappa_f64() };
        Ok(CuspForm { shifted_weight, multiplier, expansion, decay, growth_c, growth_p, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn shifted_weight(&self) -> HalfInteger {
        self.shifted_weight
    }

    /// Actual weight w + 2.
    pub fn weight(&self) -> HalfInteger {
        HalfInteger::from_twice(self.shifted_weight.twice() + 4)
    }

    pub fn multiplier(&self) -> MultiplierSpec {
        self.multiplier
    }

    pub fn expansion(&self) -> &QSeries {
        &self.expansion
    }

    pub fn decay_bound(&self) -> DecayBound {
        self.decay
    }

    pub fn kappa(&self) -> f64 {
        self.expansion.kappa_f64()
    }

    /// (C, p) with |a_n| ≤ C (n+1)^p over the stored coefficients.
    pub fn growth(&self) -> (f64, f64) {
        (self.growth_c, self.growth_p)
    }

    pub fn is_zero(&self) -> bool {
        self.expansion.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    fn same_space(&self, other: &CuspForm) -> Result<()> {
        if self.shifted_weight != other.shifted_weight || self.multiplier != other.multiplier {
            return Err(Error::FormMismatch {
                monomial: String::new(),
                reason: "forms live in different spaces".into(),
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> CuspForm {
        let coeffs = self.expansion.coeffs.iter().map(|a| a * s).collect();
        CuspForm::new(self.shifted_weight, self.multiplier, QSeries::new(self.expansion.kappa, coeffs))
            .expect("scaling preserves the space")
    }

    /// Sum of two forms in one space; the shorter expansion sets the length.
    pub fn add(&self, other: &CuspForm) -> Result<CuspForm> {
        self.same_space(other)?;
        let coeffs = self.expansion.coeffs.iter().zip(&other.expansion.coeffs).map(|(a, b)| a + b).collect();
        CuspForm::new(self.shifted_weight, self.multiplier, QSeries::new(self.expansion.kappa, coeffs))
    }

    /// Σ cᵢ fᵢ over forms of one space.
    pub fn linear_combination(terms: &[(C64, &CuspForm)]) -> Result<CuspForm> {
        let (c0, f0) = terms.first().ok_or_else(|| Error::Unsupported("empty linear combination".into()))?;
        let mut acc = f0.scale(*c0);
        for (c, f) in &terms[1..] {
            acc = acc.add(&f.scale(*c))?;
        }
        Ok(acc)
    }

    /// Stable hash of weight, multiplier and coefficient bits.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.shifted_weight.hash(&mut h);
        self.multiplier.hash(&mut h);
        self.expansion.kappa.hash(&mut h);
        for c in &self.expansion.coeffs {
            c.re.to_bits().hash(&mut h);
            c.im.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// Bound on Σ_{n≥start} |a_n| ρⁿ using the growth table (stored part
    /// exactly, unknown part by the polynomial bound).
    fn tail_bound(&self, start: usize, rho: f64) -> f64 {
        let n = start as f64;
        let p = self.growth_p;
        let ratio = rho * ((n + 2.0) / (n + 1.0)).powf(p);
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        self.growth_c * (n + 1.0).powf(p) * rho.powi(start as i32) / (1.0 - ratio)
    }

    /// q-sum at τ; stops once the tail is below `eps_rel` of the absolute
    /// partial sum or `abs_tol` in absolute terms.
    fn qsum(&self, tau: C64, eps_rel: f64, abs_tol: f64) -> Result<C64> {
        let q = (C64::new(0.0, 2.0 * PI) * tau).exp();
        let rho = q.norm();
        let qk = (C64::new(0.0, 2.0 * PI) * tau * self.kappa()).exp();
        let scale = qk.norm();
        let coeffs = &self.expansion.coeffs;
        let mut sum = C64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut qn = C64::new(1.0, 0.0);
        let mut rn = 1.0;
        for (n, a) in coeffs.iter().enumerate() {
            sum += a * qn;
            abs_sum += a.norm() * rn;
            qn *= q;
            rn *= rho;
            let tail = self.tail_bound(n + 1, rho);
            if (abs_sum > 0.0 && tail <= eps_rel * abs_sum) || tail * scale <= abs_tol {
                return Ok(sum * qk);
            }
        }
        Err(Error::InsufficientExpansion { len: coeffs.len(), tol: abs_tol.max(eps_rel), im: tau.im })
    }

    /// Value at any τ ∈ ℍ to near machine precision, moving τ into the
    /// fundamental domain and applying the transformation law when Im τ is small.
    pub fn eval(&self, tau: C64) -> Result<C64> {
        if !(tau.im > 0.0) {
            return Err(Error::NotUpperHalfPlane(format!("{tau}")));
        }
        if tau.im >= REDUCE_BELOW {
            return self.qsum(tau, TAIL_EPS, 0.0);
        }
        let (delta, z) = reduce_to_fundamental_domain(tau);
        let fz = self.qsum(z, TAIL_EPS, 0.0)?;
        Ok(self.automorphy(&delta, z) * fz)
    }

    /// v(γ)·J(γ, τ) with f(γτ) = v(γ) J(γ,τ) f(τ).
    pub fn automorphy(&self, g: &GroupElement, tau: C64) -> C64 {
        let j = g.j(tau);
        let r = self.multiplier.residue() as i32;
        let e = (self.weight().twice() - r) / 2;
        multiplier_value(self.multiplier, g) * j.sqrt().powi(r) * j.powi(e)
    }

    /// Plain q-expansion sum to absolute accuracy `tol`; refuses when the
    /// stored expansion is too short.
    pub fn eval_with_tol(&self, tau: C64, tol: f64) -> Result<C64> {
        if !(tau.im > 0.0) {
            return Err(Error::NotUpperHalfPlane(format!("{tau}")));
        }
        self.qsum(tau, 0.0, tol)
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            weight: self.weight().value(),
            multiplier: self.multiplier,
            kappa: format!("{}/{}", self.expansion.kappa.numer(), self.expansion.kappa.denom()),
            coeffs: self.expansion.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            name: self.name.clone(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<CuspForm> {
        let weight = HalfInteger::from_f64(j.weight)?;
        let (p, q) = j
            .kappa
            .split_once('/')
            .map(|(p, q)| (p.trim().parse::<i64>(), q.trim().parse::<i64>()))
            .map(|(p, q)| (p.ok(), q.ok()))
            .unwrap_or((j.kappa.trim().parse::<i64>().ok(), Some(1)));
        let (p, q) = match (p, q) {
            (Some(p), Some(q)) if q > 0 => (p, q),
            _ => return Err(Error::Parse(format!("bad kappa '{}'", j.kappa))),
        };
        let coeffs = j.coeffs.iter().map(|c| C64::new(c[0], c[1])).collect();
        let f = CuspForm::new(
            HalfInteger::from_twice(weight.twice() - 4),
            j.multiplier,
            QSeries::new(Ratio::new(p, q), coeffs),
        )?;
        Ok(match &j.name {
            Some(n) => f.with_name(n.clone()),
            None => f,
        })
    }
}

/// JSON shape of a form: weight is the actual weight w + 2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormJson {
    pub weight: f64,
    pub multiplier: MultiplierSpec,
    pub kappa: String,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Returns (δ, z) with τ = δz and z in the standard fundamental domain.
pub fn reduce_to_fundamental_domain(tau: C64) -> (GroupElement, C64) {
    let s_inv = GroupElement::S.inverse();
    let mut z = tau;
    let mut delta = GroupElement::IDENTITY;
    for _ in 0..10_000 {
        let n = z.re.round();
        if n != 0.0 {
            z -= n;
            delta = delta * GroupElement::t_power(n as i64);
        }
        if z.norm_sqr() < 1.0 - 1e-14 {
            z = -z.inv();
            delta = delta * s_inv;
        } else {
            break;
        }
    }
    (delta, z)
}

/// Direct q-sum with absolute tolerance.
pub fn eval_form(f: &CuspForm, tau: C64, tol: f64) -> Result<C64> {
    f.eval_with_tol(tau, tol)
}
