use std::cell::Cell;

use super::CouplingParams;
use crate::error::{Error, Result};
use crate::quad::{integrate_1d, QuadratureConfig, QuadratureResult};
use crate::tlr::{extend_distribution, RationalKernel, RunningSupport, TlrConfig};

/// `M²(z) = (1 - z²) m² + z μ²`
pub fn vertex_mass_sq(z: f64, m: f64, mu: f64) -> f64 {
    (1.0 - z * z) * m * m + z * mu * mu
}

/// Coefficient of `γ^μ` in the one-loop vertex correction at zero momentum
/// transfer:
///
/// ```text
/// δΓ = (α/2π) ∫_0^1 dz (1-z) ∫_0^∞ dX X(X-1)/(X+1)³ f²(X M²/Λ²)
/// ```
///
/// The inner integral is replaced by the extension of `X(X-1)/(X+1)³` with
/// running support edge `Λ²/M²(z)`, which evaluates to `ln(η²Λ²/M²) - 2`.
/// The `m²γ^μ` term with an unspecified `z` polynomial is not included.
pub fn vertex(c: &CouplingParams, tlr: &TlrConfig, cfg: &QuadratureConfig) -> Result<QuadratureResult<f64>> {
    c.validate()?;
    tlr.validate()?;
    let pre = c.alpha / (2.0 * std::f64::consts::PI);
    if pre == 0.0 {
        return Ok(QuadratureResult::exact(0.0));
    }
    let (m, mu) = (c.mass, c.photon_mass);
    let lambda_sq = tlr.lambda * tlr.lambda;
    let kernel = RationalKernel::vertex();
    let inner_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol * 0.1,
        rel_tol: cfg.rel_tol * 0.1,
        ..*cfg
    };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner_err = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);
    let outer = integrate_1d(
        |z: f64| {
            if z >= 1.0 {
                return 0.0;
            }
            let edge = lambda_sq / vertex_mass_sq(z, m, mu);
            let v = extend_distribution(&kernel, tlr, RunningSupport::Inverse { edge })
                .and_then(|ext| ext.integrate(None, &inner_cfg));
            match v {
                Ok(r) => {
                    inner_err.set(inner_err.get().max(r.error_estimate));
                    inner_evals.set(inner_evals.get() + r.evals);
                    (1.0 - z) * r.value
                }
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
        cfg,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadratureResult {
        value: pre * outer.value,
        error_estimate: pre * (outer.error_estimate + 0.5 * inner_err.get()),
        evals: outer.evals + inner_evals.get(),
        converged: outer.converged,
    })
}
