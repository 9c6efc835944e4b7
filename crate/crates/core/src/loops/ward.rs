use super::{self_energy_derivative, vertex, CouplingParams};
use crate::error::{Error, Result};
use crate::quad::QuadratureConfig;
use crate::tlr::TlrConfig;

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "slope needs two or more paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("slope needs distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WardReport {
    pub lambdas: Vec<f64>,
    /// `δΓ` per ladder point.
    pub vertex: Vec<f64>,
    /// `∂Σ/∂p` at `γp = m` per ladder point.
    pub sigma_prime: Vec<f64>,
    /// `d δΓ / d ln Λ²`
    pub vertex_slope: f64,
    /// `d Σ' / d ln Λ²`
    pub sigma_slope: f64,
    /// `|vertex_slope + sigma_slope|`
    pub slope_residual: f64,
    /// Mean of `δΓ + Σ'` over the ladder.
    pub constant_offset: f64,
    /// `(max - min) / |mean|` of `δΓ + Σ'`; zero when every value is zero.
    pub offset_variation: f64,
    pub converged: bool,
}

/// Ladder `Λ/m` used when none is given.
pub const DEFAULT_LADDER: [f64; 3] = [1e2, 1e3, 1e4];

/// Evaluates `δΓ` and `Σ' = ∂Σ/∂p` across `Λ = ratio · m` and compares their
/// `ln Λ²` coefficients. `tlr.lambda` is ignored; `k` and `η` are used.
pub fn ward_takahashi_check(
    c: &CouplingParams,
    tlr: &TlrConfig,
    ladder: &[f64],
    cfg: &QuadratureConfig,
) -> Result<WardReport> {
    if ladder.len() < 2 {
        return Err(Error::InvalidInput("the Λ ladder needs two or more points".into()));
    }
    let mut lambdas = Vec::with_capacity(ladder.len());
    let mut vertex_values = Vec::with_capacity(ladder.len());
    let mut sigma_values = Vec::with_capacity(ladder.len());
    let mut converged = true;
    for &ratio in ladder {
        let lambda = ratio * c.mass;
        let point = TlrConfig { lambda, ..*tlr };
        let v = vertex(c, &point, cfg)?;
        let s = self_energy_derivative(c, &point, cfg)?;
        converged &= v.converged && s.converged;
        lambdas.push(lambda);
        vertex_values.push(v.value);
        sigma_values.push(s.value);
    }
    let logs: Vec<f64> = lambdas.iter().map(|l| (l * l).ln()).collect();
    let vertex_slope = least_squares_slope(&logs, &vertex_values)?;
    let sigma_slope = least_squares_slope(&logs, &sigma_values)?;
    let sums: Vec<f64> = vertex_values.iter().zip(&sigma_values).map(|(a, b)| a + b).collect();
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    let spread =
        sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - sums.iter().cloned().fold(f64::INFINITY, f64::min);
    let offset_variation = if spread == 0.0 { 0.0 } else { spread / mean.abs() };
    Ok(WardReport {
        lambdas,
        vertex: vertex_values,
        sigma_prime: sigma_values,
        vertex_slope,
        sigma_slope,
        slope_residual: (vertex_slope + sigma_slope).abs(),
        constant_offset: mean,
        offset_variation,
        converged,
    })
}
