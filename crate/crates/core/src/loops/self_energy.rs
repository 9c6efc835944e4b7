use std::cell::Cell;

use super::CouplingParams;
use crate::error::{Error, Result};
use crate::quad::{derivative_estimate, integrate_1d, integrate_log_axis, QuadratureConfig, QuadratureResult};
use crate::tlr::{partition_of_unity, PartitionOfUnity, TlrConfig};

/// `M²(x, p²) = x(1-x)p² + x m² + (1-x)μ²`
pub fn feynman_mass_sq(x: f64, p_sq: f64, m: f64, mu: f64) -> f64 {
    x * (1.0 - x) * p_sq + x * m * m + (1.0 - x) * mu * mu
}

/// Fails with the offending `x` when `M²` is not strictly positive on `[0, 1]`.
fn check_mass_sq(p_sq: f64, c: &CouplingParams) -> Result<()> {
    let (m, mu) = (c.mass, c.photon_mass);
    let mut candidates = vec![0.0, 1.0];
    if p_sq < 0.0 {
        // convex in x: the minimum sits at the vertex
        let vertex = (p_sq + m * m - mu * mu) / (2.0 * p_sq);
        if (0.0..=1.0).contains(&vertex) {
            candidates.push(vertex);
        }
    }
    for x in candidates {
        let value = feynman_mass_sq(x, p_sq, m, mu);
        if !(value > 0.0) {
            return Err(Error::NonPositiveMass { x, value });
        }
    }
    Ok(())
}

fn check_inputs(p_sq: f64, c: &CouplingParams, tlr: &TlrConfig) -> Result<()> {
    c.validate()?;
    tlr.validate()?;
    if !p_sq.is_finite() {
        return Err(Error::InvalidInput(format!("p² must be finite, got {p_sq}")));
    }
    check_mass_sq(p_sq, c)
}

/// `Σ = a (γp) + b`, both coefficients functions of `p²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergyDecomposition {
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub a_error: f64,
    pub b_error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl SelfEnergyDecomposition {
    fn zero() -> Self {
        Self {
            a_coeff: 0.0,
            b_coeff: 0.0,
            a_error: 0.0,
            b_error: 0.0,
            evals: 0,
            converged: true,
        }
    }

    /// Scalar reduction `a p + b` at `γp → p`.
    pub fn on_shell(&self, p: f64) -> f64 {
        self.a_coeff * p + self.b_coeff
    }
}

/// Assemble `a = -(α/4π) ∫ 2x K(x) dx` and `b = (α/4π) ∫ 4m K(x) dx`.
fn assemble<K>(kernel: K, c: &CouplingParams, cfg: &QuadratureConfig) -> Result<SelfEnergyDecomposition>
where
    K: Fn(f64) -> Result<(f64, f64, usize)>,
{
    let pre = c.alpha_over_4pi();
    if pre == 0.0 {
        return Ok(SelfEnergyDecomposition::zero());
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner_err = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);
    let r = integrate_1d(
        |x: f64| -> crate::quad::VecN<2> {
            match kernel(x) {
                Ok((k, e, n)) => {
                    inner_err.set(inner_err.get().max(e));
                    inner_evals.set(inner_evals.get() + n);
                    crate::quad::VecN([2.0 * x * k, 4.0 * c.mass * k])
                }
                Err(err) => {
                    failure.set(Some(err));
                    crate::quad::VecN([f64::NAN, f64::NAN])
                }
            }
        },
        0.0,
        1.0,
        cfg,
    );
    if let Some(err) = failure.take() {
        return Err(err);
    }
    let r = r?;
    let inner = inner_err.get();
    Ok(SelfEnergyDecomposition {
        a_coeff: -pre * r.value.0[0],
        b_coeff: pre * r.value.0[1],
        a_error: pre * (r.error_estimate + inner),
        b_error: pre * (r.error_estimate + 4.0 * c.mass * inner),
        evals: r.evals + inner_evals.get(),
        converged: r.converged,
    })
}

/// Closed form after the Lagrange formula:
///
/// ```text
/// a = -(α/4π) ∫_0^1 2x ln(η²Λ²/M²) dx
/// b = +(α/4π) ∫_0^1 4m ln(η²Λ²/M²) dx
/// ```
pub fn self_energy(
    p_sq: f64,
    c: &CouplingParams,
    tlr: &TlrConfig,
    cfg: &QuadratureConfig,
) -> Result<SelfEnergyDecomposition> {
    check_inputs(p_sq, c, tlr)?;
    let scale = tlr.eta_sq() * tlr.lambda * tlr.lambda;
    let (m, mu) = (c.mass, c.photon_mass);
    if tlr.lambda * tlr.lambda < 1e2 * m.max(mu).powi(2).max(p_sq.abs()) {
        log::warn!("cutoff Λ = {} is not large against the masses", tlr.lambda);
    }
    assemble(|x| Ok(((scale / feynman_mass_sq(x, p_sq, m, mu)).ln(), 0.0, 0)), c, cfg)
}

/// Partition of unity used by [`self_energy_direct`] by default: flat on
/// `[-1, 1]`, ramp width `1/4`, in the variable `y = X M²/Λ²`.
pub fn default_cutoff() -> PartitionOfUnity {
    partition_of_unity(-1.0, 1.0, 0.25).expect("valid default partition")
}

/// `(I1, I2, I3)` at fixed `ratio = Λ²/M²`:
///
/// ```text
/// I1 =  ∫ f²(X/ratio) / (X+1)   dX
/// I2 = -3 ∫ f²(X/ratio) / (X+1)² dX
/// I3 =  2 ∫ f²(X/ratio) / (X+1)³ dX
/// ```
pub fn self_energy_kernel(
    ratio: f64,
    f: &PartitionOfUnity,
    cfg: &QuadratureConfig,
) -> Result<[QuadratureResult<f64>; 3]> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidInput(format!("Λ²/M² must be > 0, got {ratio}")));
    }
    let upper = f.support().1 * ratio;
    if !(upper > 0.0) {
        return Ok([QuadratureResult::exact(0.0); 3]);
    }
    let breaks = edges(f, ratio);
    let term = |coeff: f64, n: i32| {
        integrate_log_axis(
            |x| {
                let w = f.eval(x / ratio);
                coeff * w * w * (x + 1.0).powi(-n)
            },
            upper,
            &breaks,
            cfg,
        )
    };
    Ok([term(1.0, 1)?, term(-3.0, 2)?, term(2.0, 3)?])
}

fn edges(f: &PartitionOfUnity, ratio: f64) -> Vec<f64> {
    let mut breaks: Vec<f64> = f.breakpoints().iter().map(|b| b * ratio).collect();
    breaks.push(1.0);
    breaks
}

/// Self-energy with the partition of unity kept explicit: the kernel
/// `I1 + I2 + I3 = ∫ X(X-1)/(X+1)³ f²(X M²/Λ²) dX` replaces the logarithm of
/// the closed form. The two differ by a `Λ`-independent constant.
pub fn self_energy_direct(
    p_sq: f64,
    c: &CouplingParams,
    tlr: &TlrConfig,
    f: &PartitionOfUnity,
    cfg: &QuadratureConfig,
) -> Result<SelfEnergyDecomposition> {
    check_inputs(p_sq, c, tlr)?;
    let (m, mu) = (c.mass, c.photon_mass);
    let lambda_sq = tlr.lambda * tlr.lambda;
    let inner_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol * 0.1,
        rel_tol: cfg.rel_tol * 0.1,
        ..*cfg
    };
    assemble(
        |x| {
            let ratio = lambda_sq / feynman_mass_sq(x, p_sq, m, mu);
            let upper = f.support().1 * ratio;
            if !(upper > 0.0) {
                return Ok((0.0, 0.0, 0));
            }
            let r = integrate_log_axis(
                |y| {
                    let w = f.eval(y / ratio);
                    w * w * y * (y - 1.0) / (y + 1.0).powi(3)
                },
                upper,
                &edges(f, ratio),
                &inner_cfg,
            )?;
            Ok((r.value, r.error_estimate, r.evals))
        },
        c,
        cfg,
    )
}

/// Finite-difference derivative with the step that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub value: f64,
    pub error_estimate: f64,
    /// Initial step of the accepted extrapolation.
    pub step: f64,
    /// Number of times the step was shrunk before acceptance.
    pub shrinks: u32,
    pub converged: bool,
}

const MAX_SHRINKS: u32 = 8;

/// `dF/dp` at `p = m` for `F(p) = a(p²) p + b(p²)`, the scalar reduction of
/// `∂Σ/∂p` at `γp = m`. The step starts at `m/10` and is divided by 4 when
/// `M²` turns non-positive inside the stencil or the extrapolation error
/// exceeds the tolerance.
pub fn self_energy_derivative(c: &CouplingParams, tlr: &TlrConfig, cfg: &QuadratureConfig) -> Result<DerivativeReport> {
    let m = c.mass;
    check_inputs(m * m, c, tlr)?;
    if c.alpha == 0.0 {
        return Ok(DerivativeReport {
            value: 0.0,
            error_estimate: 0.0,
            step: 0.0,
            shrinks: 0,
            converged: true,
        });
    }
    let inner = QuadratureConfig {
        abs_tol: cfg.abs_tol.min(1e-15),
        rel_tol: cfg.rel_tol.min(1e-12),
        ..*cfg
    };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let f = |p: f64| match self_energy(p * p, c, tlr, &inner) {
        Ok(s) => s.on_shell(p),
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let mut step = 0.1 * m;
    let mut last_err = None;
    for shrinks in 0..=MAX_SHRINKS {
        match derivative_estimate(f, m, 1, Some(step)) {
            Ok((value, err)) => {
                let target = cfg.target(value.abs()).max(1e-9 * c.alpha_over_4pi());
                if err <= target || shrinks == MAX_SHRINKS {
                    return Ok(DerivativeReport {
                        value,
                        error_estimate: err,
                        step,
                        shrinks,
                        converged: err <= target,
                    });
                }
                log::debug!("derivative error {err:e} above {target:e} at step {step:e}, shrinking");
            }
            Err(e) => {
                let cause = failure.take().unwrap_or(e);
                log::debug!("derivative failed at step {step:e}: {cause}");
                last_err = Some(cause);
            }
        }
        step /= 4.0;
    }
    Err(last_err.unwrap_or_else(|| Error::InvalidInput("derivative step underflow".into())))
}
