use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate_nd, QuadratureConfig, Scheme, VecN};
use crate::testfn::FourMomentum;

/// Ground-state profile `g~(s) = exp(-s/2)`, so that `g~(k²/2B) = exp(-k²/(4B))`
/// is the momentum-space Gaussian with `A = 1/(4B)`.
fn profile(s: f64) -> f64 {
    (-0.5 * s).exp()
}

/// The shift `p1 + p2` used for the third argument of `Δg~` when none is given.
pub fn default_shift(p1: &FourMomentum, p2: &FourMomentum) -> FourMomentum {
    *p1 + *p2
}

/// `(Δg~, Δg~')` at Euclidean loop momentum `k`:
///
/// ```text
/// Δg~  = g~(k²/2B) [g~((k - p2)²/2B) - g~((k + shift)²/2B)]
/// Δg~' = g~(k²/2B) [g~((k + p1)²/2B) - g~((k - p1)²/2B)]
/// ```
pub fn anomaly_delta_g(
    k: &FourMomentum,
    p1: &FourMomentum,
    p2: &FourMomentum,
    shift: &FourMomentum,
    b: f64,
) -> (f64, f64) {
    let s = |v: FourMomentum| profile(v.euclidean_square() / (2.0 * b));
    let base = s(*k);
    let dg = base * (s(*k - *p2) - s(*k + *shift));
    let dg_prime = base * (s(*k + *p1) - s(*k - *p1));
    (dg, dg_prime)
}

/// Contracted divergence `(p1+p2)^μ T_{κλμ}` as a 4×4 table over `(λ, κ)`:
///
/// ```text
/// C[λ][κ] = 4e²/(2π)⁴ ε_{σλδκ} (p1^σ J1^δ - p2^σ J2^δ),
/// J^δ = ∫ d⁴k k^δ/k² Δ
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyDivergence {
    pub components: [[f64; 4]; 4],
    /// `max |C[λ][κ]|`
    pub norm: f64,
    pub j1: [f64; 4],
    pub j2: [f64; 4],
    pub error_estimate: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Fixed 32-point Gauss-Legendre product rule in hyperspherical coordinates.
/// The integrand is smooth there and the contraction cancels the leading
/// orders of `J`, so a fixed high-order rule beats adaptive subdivision.
pub fn anomaly_quadrature() -> QuadratureConfig {
    QuadratureConfig::with_tolerances(1e-18, 1e-7)
        .scheme(Scheme::TensorProduct)
        .points(32)
}

/// `ε_{σλδκ}` with `ε_{0123} = +1`.
pub(crate) fn levi_civita(idx: [usize; 4]) -> f64 {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    let mut p = idx;
    for i in 0..4 {
        while p[i] != i {
            let t = p[i];
            p.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

pub fn anomaly_divergence(
    p1: &FourMomentum,
    p2: &FourMomentum,
    shift: &FourMomentum,
    b: f64,
    e: f64,
    cfg: &QuadratureConfig,
) -> Result<AnomalyDivergence> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidInput(format!("dispersion B must be > 0, got {b}")));
    }
    let reach = [p1, p2, shift]
        .iter()
        .map(|v| v.euclidean_square().sqrt())
        .fold(0.0, f64::max);
    let r_max = 10.0 * b.sqrt() + reach;
    // hyperspherical (r, ψ, θ, φ), d⁴k = r³ sin²ψ sinθ; k^δ/k² r³ = r² n^δ
    let integrand = |x: &[f64]| -> VecN<8> {
        let (r, psi, theta, phi) = (x[0], x[1], x[2], x[3]);
        let (sp, cp) = psi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let (sf, cf) = phi.sin_cos();
        let n = [cp, sp * ct, sp * st * cf, sp * st * sf];
        let k = FourMomentum(n.map(|v| r * v));
        let (dg, dgp) = anomaly_delta_g(&k, p1, p2, shift, b);
        let w = r * r * sp * sp * st;
        let mut out = [0.0; 8];
        for d in 0..4 {
            out[d] = w * n[d] * dg;
            out[4 + d] = w * n[d] * dgp;
        }
        VecN(out)
    };
    let bounds = [(0.0, r_max), (0.0, PI), (0.0, PI), (0.0, 2.0 * PI)];
    let r = integrate_nd(integrand, &bounds, cfg)?;
    let j1: [f64; 4] = std::array::from_fn(|d| r.value.0[d]);
    let j2: [f64; 4] = std::array::from_fn(|d| r.value.0[4 + d]);

    let pre = 4.0 * e * e / (2.0 * PI).powi(4);
    let mut components = [[0.0; 4]; 4];
    let mut norm = 0.0f64;
    for (lambda, row) in components.iter_mut().enumerate() {
        for (kappa, c) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for sigma in 0..4 {
                for delta in 0..4 {
                    let eps = levi_civita([sigma, lambda, delta, kappa]);
                    if eps != 0.0 {
                        acc += eps * (p1.0[sigma] * j1[delta] - p2.0[sigma] * j2[delta]);
                    }
                }
            }
            *c = pre * acc;
            norm = norm.max(c.abs());
        }
    }
    let p_scale = p1.0.iter().chain(&p2.0).fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(AnomalyDivergence {
        components,
        norm,
        j1,
        j2,
        error_estimate: pre * 2.0 * 4.0 * p_scale * r.error_estimate,
        evals: r.evals,
        converged: r.converged,
    })
}
