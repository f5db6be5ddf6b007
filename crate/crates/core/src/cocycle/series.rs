use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::algebra::{Alphabet, GroupElement, Grading, NcPoly};
use crate::collection::CuspCollection;
use crate::iterint::{vertical_J, QuadConfig};
use crate::{Error, Result, C64};

use super::slash::slash_value;

/// A closed-form series t ↦ n(t).
pub type SeriesClosure = Arc<dyn Fn(C64) -> Result<NcPoly> + Send + Sync>;

/// Lazily evaluated series in t with values in the truncated unit group.
#[derive(Clone)]
pub enum SeriesFn {
    One,
    /// J(h; z₀, ∞; t).
    JVert { h: Arc<CuspCollection>, z0: C64 },
    Mul(Box<SeriesFn>, Box<SeriesFn>),
    Inv(Box<SeriesFn>),
    Slash(Box<SeriesFn>, GroupElement),
    Closure(SeriesClosure),
}

impl fmt::Debug for SeriesFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesFn::One => write!(f, "One"),
            SeriesFn::JVert { z0, .. } => write!(f, "JVert({z0})"),
            SeriesFn::Mul(a, b) => write!(f, "Mul({a:?}, {b:?})"),
            SeriesFn::Inv(a) => write!(f, "Inv({a:?})"),
            SeriesFn::Slash(a, g) => write!(f, "Slash({a:?}, {g})"),
            SeriesFn::Closure(_) => write!(f, "Closure"),
        }
    }
}

impl SeriesFn {
    pub fn jvert(h: Arc<CuspCollection>, z0: C64) -> Self {
        SeriesFn::JVert { h, z0 }
    }

    pub fn mul(self, other: SeriesFn) -> Self {
        SeriesFn::Mul(Box::new(self), Box::new(other))
    }

    pub fn inv(self) -> Self {
        SeriesFn::Inv(Box::new(self))
    }

    pub fn slash(self, g: GroupElement) -> Self {
        SeriesFn::Slash(Box::new(self), g)
    }

    pub fn eval(&self, t: C64, ctx: &EvalContext) -> Result<NcPoly> {
        if !(t.im < 0.0) {
            return Err(Error::NotLowerHalfPlane(format!("{t}")));
        }
        match self {
            SeriesFn::One => Ok(NcPoly::one(ctx.grading)),
            SeriesFn::JVert { h, z0 } => ctx.jvert(h, *z0, t),
            SeriesFn::Mul(a, b) => a.eval(t, ctx)?.mul(&b.eval(t, ctx)?),
            SeriesFn::Inv(a) => a.eval(t, ctx)?.inv(),
            SeriesFn::Slash(a, g) => {
                let inner = a.eval(g.act(t), ctx)?;
                slash_value(&ctx.alphabet, &inner, g, t)
            }
            SeriesFn::Closure(f) => f(t),
        }
    }
}

type CacheKey = (u64, [u64; 2], [u64; 2]);

/// Alphabet, truncation and quadrature settings shared by an evaluation,
/// plus a memo table for vertical-ray integrals.
pub struct EvalContext {
    pub alphabet: Alphabet,
    pub grading: Grading,
    pub cfg: QuadConfig,
    cache: Option<Mutex<HashMap<CacheKey, NcPoly>>>,
}

impl EvalContext {
    pub fn new(alphabet: Alphabet, degree: usize, cfg: QuadConfig) -> Self {
        let grading = Grading::new(alphabet.len(), degree);
        EvalContext { alphabet, grading, cfg, cache: Some(Mutex::new(HashMap::new())) }
    }

    pub fn for_collection(h: &CuspCollection, cfg: QuadConfig) -> Self {
        Self::new(h.alphabet().clone(), h.degree(), cfg)
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    fn jvert(&self, h: &CuspCollection, z0: C64, t: C64) -> Result<NcPoly> {
        if h.grading() != self.grading {
            return Err(Error::DegreeMismatch { left: h.degree(), right: self.grading.degree() });
        }
        let key = (h.fingerprint(), [z0.re.to_bits(), z0.im.to_bits()], [t.re.to_bits(), t.im.to_bits()]);
        if let Some(c) = &self.cache {
            if let Some(v) = c.lock().expect("cache lock").get(&key) {
                return Ok(v.clone());
            }
        }
        let v = vertical_J(h, z0, t, &self.cfg)?;
        if let Some(c) = &self.cache {
            c.lock().expect("cache lock").insert(key, v.clone());
        }
        Ok(v)
    }
}
