use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible distance of `beta` from 1. Exponents `1/(beta - 1)`
/// overflow at working precision below this.
pub const MIN_BETA_GAP: f64 = 1e-9;

/// Validated shape parameter `beta > 1` together with `alpha = 1/beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambertParams {
    beta: f64,
    alpha: f64,
}

impl LambertParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 1.0 + MIN_BETA_GAP {
            return Err(Error::domain(format!(
                "beta must be finite and exceed 1 + {MIN_BETA_GAP:e}, got {beta}"
            )));
        }
        Ok(LambertParams {
            beta,
            alpha: 1.0 / beta,
        })
    }

    /// Builds the pair from the stability index `alpha = 1/beta`, keeping
    /// `alpha` exactly as given.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let mut p = Self::new(1.0 / alpha)?;
        p.alpha = alpha;
        Ok(p)
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `1 / (beta - 1)`, the exponent of the lower bound and of the
    /// small-x asymptotics.
    #[inline]
    pub fn lower_exponent(&self) -> f64 {
        1.0 / (self.beta - 1.0)
    }

    /// `beta / (beta - 1)`, the exponent of the small-x expansion variable.
    #[inline]
    pub fn expansion_exponent(&self) -> f64 {
        self.beta / (self.beta - 1.0)
    }

    /// `kappa = alpha^2 / (1 - alpha)`, the exponent of the bound ratio.
    #[inline]
    pub fn kappa(&self) -> f64 {
        self.alpha * self.alpha / (1.0 - self.alpha)
    }
}
