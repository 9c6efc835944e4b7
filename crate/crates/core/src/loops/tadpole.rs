use std::f64::consts::PI;

use super::CouplingParams;
use crate::error::{Error, Result};
use crate::quad::{integrate_1d, integrate_radial4, Decay, QuadratureConfig, QuadratureResult};

/// Scalar-QED tadpole with a common momentum dispersion `B` on all four axes
/// (`A = 1/(4B)`) and zero mean momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TadpoleParams {
    pub b: f64,
    pub coupling: CouplingParams,
}

impl TadpoleParams {
    pub fn new(b: f64, coupling: CouplingParams) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidInput(format!("dispersion B must be > 0, got {b}")));
        }
        coupling.validate()?;
        Ok(Self { b, coupling })
    }

    /// `c² = m² / (2B)`
    pub fn c_sq(&self) -> f64 {
        self.coupling.mass * self.coupling.mass / (2.0 * self.b)
    }
}

/// Cut-off tadpole `(e²/4π²) [k²/2 + (m²/2) ln(k²/m² + 1)]` at `k = k_max`.
///
/// The bracket is kept with the `+` sign of the logarithm as it is usually
/// quoted; the exact antiderivative of `k³/(k²+m²)` carries a `-`.
pub fn tadpole_divergent_partial(k_max: f64, m: f64, e: f64) -> f64 {
    if k_max == 0.0 {
        return 0.0;
    }
    let k2 = k_max * k_max;
    e * e / (4.0 * PI * PI) * (0.5 * k2 + 0.5 * m * m * (k2 / (m * m)).ln_1p())
}

/// Regularized tadpole coefficient of `g_{μν}`:
///
/// ```text
/// M = 2e²/(2π)⁴ ∫ d⁴k_E exp(-k²/(2B)) / (k² + m²)
///   = e²/(4π²) ∫_0^∞ k³ exp(-k²/(2B)) / (k² + m²) dk
/// ```
///
/// The factor 2 is the seagull vertex `2ie² g_{μν}`. `M` tends to
/// `e² B / (4π²)` as `m² / (2B) → 0`.
pub fn tadpole_regularized(params: &TadpoleParams, cfg: &QuadratureConfig) -> Result<QuadratureResult<f64>> {
    let b = params.b;
    let m_sq = params.coupling.mass * params.coupling.mass;
    let e = params.coupling.e;
    let prefactor = 2.0 * e * e / (2.0 * PI).powi(4);
    let cfg = cfg.decay(Decay::Algebraic, (2.0 * b).sqrt());
    let r = integrate_radial4(
        |k| (-k * k / (2.0 * b)).exp() / (k * k + m_sq),
        &QuadratureConfig {
            abs_tol: cfg.abs_tol / prefactor.max(f64::MIN_POSITIVE),
            ..cfg
        },
    )?;
    Ok(r.scaled(prefactor))
}

/// One-dimensional reduced form `(e² B / 2π²) ∫_0^∞ u³ e^{-u²} / (u² + c²) du`
/// after `u = k / sqrt(2B)`.
pub fn tadpole_reduced(c_sq: f64, b: f64, e: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult<f64>> {
    if !(c_sq >= 0.0) {
        return Err(Error::InvalidInput(format!("c² must be >= 0, got {c_sq}")));
    }
    let r = integrate_1d(
        |u: f64| u.powi(3) * (-u * u).exp() / (u * u + c_sq),
        0.0,
        f64::INFINITY,
        cfg,
    )?;
    Ok(r.scaled(e * e * b / (2.0 * PI * PI)))
}
