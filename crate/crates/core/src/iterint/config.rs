use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How the truncation height of rays to ∞ is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YMaxPolicy {
    /// Smallest height whose neglected tail, bounded through the forms'
    /// decay bounds, is below `atol`.
    Auto,
    Explicit(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rtol: f64,
    pub atol: f64,
    pub y_max: YMaxPolicy,
    pub max_steps: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rtol: 1e-13, atol: 1e-15, y_max: YMaxPolicy::Auto, max_steps: 200_000 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Unsupported(format!(
                "tolerances must be positive (rtol={}, atol={})",
                self.rtol, self.atol
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Unsupported("max_steps must be positive".into()));
        }
        if let YMaxPolicy::Explicit(y) = self.y_max {
            if !(y > 0.0) {
                return Err(Error::Unsupported(format!("explicit y_max must be positive, got {y}")));
            }
        }
        Ok(())
    }
}
