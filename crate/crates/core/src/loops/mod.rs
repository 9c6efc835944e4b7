//! One-loop amplitudes regularized by Gaussian test functions.
//!
//! Loop momenta are Wick-rotated: every integral here runs over Euclidean
//! `k_E` with `k_E² = k₀² + |k|²`. Dirac structures are never materialized;
//! the self-energy is carried as its `(γp, 1)` coefficients and the vertex as
//! its `γ^μ` coefficient.

mod anomaly;
mod self_energy;
mod tadpole;
mod vertex;
mod ward;

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub use anomaly::{anomaly_delta_g, anomaly_divergence, anomaly_quadrature, default_shift, AnomalyDivergence};
pub use self_energy::{
    default_cutoff, feynman_mass_sq, self_energy, self_energy_derivative, self_energy_direct, self_energy_kernel,
    DerivativeReport, SelfEnergyDecomposition,
};
pub use tadpole::{tadpole_divergent_partial, tadpole_reduced, tadpole_regularized, TadpoleParams};
pub use vertex::{vertex, vertex_mass_sq};
pub use ward::{least_squares_slope, ward_takahashi_check, WardReport, DEFAULT_LADDER};

/// Fine-structure constant used by the default coupling.
pub const ALPHA_QED: f64 = 1.0 / 137.035_999_084;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub e: f64,
    /// `e² / 4π`
    pub alpha: f64,
    pub mass: f64,
    /// Infrared regulator `μ`.
    pub photon_mass: f64,
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self::from_alpha(ALPHA_QED, 1.0, 0.01)
    }
}

impl CouplingParams {
    pub fn new(e: f64, mass: f64, photon_mass: f64) -> Self {
        Self {
            e,
            alpha: e * e / (4.0 * PI),
            mass,
            photon_mass,
        }
    }

    pub fn from_alpha(alpha: f64, mass: f64, photon_mass: f64) -> Self {
        Self {
            e: (4.0 * PI * alpha).sqrt(),
            alpha,
            mass,
            photon_mass,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.e * self.e / (4.0 * PI);
        if !self.alpha.is_finite() || (self.alpha - expected).abs() > 1e-14 * expected.abs() {
            return Err(Error::InvalidInput(format!(
                "alpha = {} is inconsistent with e²/4π = {expected}",
                self.alpha
            )));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidInput(format!("mass must be > 0, got {}", self.mass)));
        }
        if !(self.photon_mass > 0.0) || !self.photon_mass.is_finite() {
            return Err(Error::InvalidInput(format!(
                "photon mass must be > 0, got {}",
                self.photon_mass
            )));
        }
        Ok(())
    }

    /// `α / 4π`, the unit in which the one-loop logarithms are counted.
    pub fn alpha_over_4pi(&self) -> f64 {
        self.alpha / (4.0 * PI)
    }
}
