//! Auxiliary analytic curves for plots and comparisons. Nothing here feeds a
//! certificate.

use serde::Serialize;

use crate::error::{Error, Result};

/// Zero-free region `sigma > 1 - eta(t)` of Korobov-Vinogradov shape,
/// `eta(t) = c / ((log t)^{2/3} (log log t)^{1/3})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroFreeRegion {
    pub c: f64,
    pub t_min: f64,
}

impl ZeroFreeRegion {
    /// Placeholder constant; only the order of magnitude of published
    /// explicit versions.
    pub const DEFAULT_C: f64 = 1.0 / 60.0;

    pub fn new(c: f64, t_min: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!("c must be positive, got {c}")));
        }
        if !(t_min >= 3.0) {
            return Err(Error::Domain(format!("t_min must be at least 3, got {t_min}")));
        }
        Ok(Self { c, t_min })
    }
}

impl Default for ZeroFreeRegion {
    fn default() -> Self {
        Self {
            c: Self::DEFAULT_C,
            t_min: 3.0,
        }
    }
}

/// `min(1/2, c / ((log t)^{2/3} (log log t)^{1/3}))`.
pub fn eta_kv(region: &ZeroFreeRegion, t: f64) -> Result<f64> {
    let lower = region.t_min.max(3.0);
    if !(t >= lower) || !t.is_finite() {
        return Err(Error::Domain(format!("eta needs t >= {lower}, got {t}")));
    }
    let log_t = t.ln();
    let eta = region.c / (log_t.powf(2.0 / 3.0) * log_t.ln().cbrt());
    Ok(eta.min(0.5))
}

/// `T^{2(1 - sigma)}`, the comparison curve for zero-density counts.
pub fn density_hypothesis_curve(sigma: f64, t: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&sigma) {
        return Err(Error::Domain(format!("sigma must lie in [1/2, 1], got {sigma}")));
    }
    if !(t >= 3.0) || !t.is_finite() {
        return Err(Error::Domain(format!("T must be at least 3, got {t}")));
    }
    Ok(t.powf(2.0 * (1.0 - sigma)))
}
