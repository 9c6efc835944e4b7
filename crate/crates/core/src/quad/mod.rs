//! Numerical integration engine.
//!
//! Every integral in the crate goes through this module and returns a
//! [`QuadratureResult`]. One-dimensional integrals use an adaptive 15-point
//! Gauss-Kronrod rule; semi-infinite ranges are mapped onto a finite interval
//! with one of two substitutions chosen by [`Decay`]. Low-dimensional boxes use
//! either Genz-Malik adaptive cubature, a tensor-product Gauss-Legendre rule or
//! a tensor-product Gauss-Hermite rule (see [`Scheme`]).
//!
//! Integrators never fail silently: when the evaluation budget runs out the
//! result comes back with `converged == false`.

mod cubature;
mod diff;
mod kronrod;
mod rules;

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use diff::{derivative, derivative_estimate};
pub use rules::{gauss_hermite, gauss_legendre};

/// Values that can be integrated: real, complex or small fixed-size real vectors.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    /// Magnitude used for error control (max-norm for vectors).
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Fixed-size real vector, so several moments can share one pass over the nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecN<const N: usize>(pub [f64; N]);

impl<const N: usize> Add for VecN<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for VecN<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for VecN<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl<const N: usize> QuadValue for VecN<N> {
    fn zero() -> Self {
        VecN([0.0; N])
    }
    fn norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Integration rule family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Adaptive Gauss-Kronrod (1-D) or Genz-Malik (n-D) subdivision.
    #[default]
    AdaptiveInterpolatory,
    /// Tensor-product Gauss-Hermite rule. Each axis of the box is read as a
    /// Gaussian truncation window `center ± 8 sigma`; the rule integrates over
    /// the whole real line with the Gaussian weight divided out.
    GaussianWeighted,
    /// Tensor-product Gauss-Legendre rule with `points` nodes per axis; the
    /// error estimate is the difference to the rule with 3/4 as many nodes.
    TensorProduct,
}

/// Decay class of an integrand on a semi-infinite range; selects the map onto `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decay {
    /// `x = a + s t / (1 - t)`
    #[default]
    Algebraic,
    /// `x = a - s ln(1 - t)`
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    pub scheme: Scheme,
    pub decay: Decay,
    /// Length scale `s` used by the semi-infinite maps.
    pub scale: f64,
    /// Nodes per axis for the fixed tensor-product rules.
    pub points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_evals: 10_000_000,
            scheme: Scheme::AdaptiveInterpolatory,
            decay: Decay::Algebraic,
            scale: 1.0,
            points: 32,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn decay(mut self, decay: Decay, scale: f64) -> Self {
        self.decay = decay;
        self.scale = scale;
        self
    }

    pub fn points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "rel_tol must be >= 0, got {}",
                self.rel_tol
            )));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidInput("max_evals must be > 0".into()));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidInput(format!(
                "scale must be finite and > 0, got {}",
                self.scale
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidInput("points must be >= 2".into()));
        }
        Ok(())
    }

    /// Tolerance target for a given value magnitude.
    pub fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evals: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadratureResult<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evals: 0,
            converged: true,
        }
    }

    pub fn map<U, F: FnOnce(T) -> U>(self, f: F) -> QuadratureResult<U> {
        QuadratureResult {
            value: f(self.value),
            error_estimate: self.error_estimate,
            evals: self.evals,
            converged: self.converged,
        }
    }

    /// Multiply value and error by a constant.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }

    /// Sum of two independent estimates; errors add.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evals: self.evals + other.evals,
            converged: self.converged && other.converged,
        }
    }
}

/// Integrate `f` over `[a, b]`. Either bound may be infinite.
pub fn integrate_1d<T, F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    cfg.validate()?;
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidInput("NaN integration bound".into()));
    }
    if a == b {
        return Ok(QuadratureResult::exact(T::zero()));
    }
    if a > b {
        return integrate_1d(f, b, a, cfg).map(|r| r.scaled(-1.0));
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => finite_1d(&f, a, b, cfg),
        (true, false) => half_line(&f, a, 1.0, cfg),
        (false, true) => half_line(&f, b, -1.0, cfg),
        (false, false) => {
            let half = QuadratureConfig {
                abs_tol: cfg.abs_tol * 0.5,
                max_evals: (cfg.max_evals / 2).max(1),
                ..*cfg
            };
            let lo = half_line(&f, 0.0, -1.0, &half)?;
            let hi = half_line(&f, 0.0, 1.0, &half)?;
            Ok(lo.combine(hi))
        }
    }
}

/// `∫_anchor^{±∞} f`, direction `+1` or `-1`; the integral is always returned
/// with the orientation of increasing x.
fn half_line<T, F>(f: &F, anchor: f64, direction: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let g = |t: f64| {
        let (x, jac) = semi_infinite_map(cfg, t);
        f(anchor + direction * x) * jac
    };
    finite_1d(&g, 0.0, 1.0, cfg)
}

fn semi_infinite_map(cfg: &QuadratureConfig, t: f64) -> (f64, f64) {
    let s = cfg.scale;
    match cfg.decay {
        Decay::Algebraic => {
            let d = 1.0 - t;
            (s * t / d, s / (d * d))
        }
        Decay::Exponential => {
            let d = 1.0 - t;
            (-s * (-t).ln_1p(), s / d)
        }
    }
}

fn finite_1d<T, F>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    match cfg.scheme {
        Scheme::AdaptiveInterpolatory => kronrod::adaptive(f, a, b, cfg),
        Scheme::TensorProduct => {
            let g = |x: &[f64]| f(x[0]);
            cubature::tensor_legendre(&g, &[(a, b)], cfg)
        }
        Scheme::GaussianWeighted => {
            let g = |x: &[f64]| f(x[0]);
            cubature::tensor_hermite(&g, &[(a, b)], cfg)
        }
    }
}

/// Four-dimensional Euclidean integral of a radial function:
/// `2 pi^2 ∫_0^∞ k^3 f(k) dk`, the 3-sphere area being applied here.
pub fn integrate_radial4<F>(f_radial: F, cfg: &QuadratureConfig) -> Result<QuadratureResult<f64>>
where
    F: Fn(f64) -> f64,
{
    let solid_angle = 2.0 * PI * PI;
    let inner = integrate_1d(
        |k| k * k * k * f_radial(k),
        0.0,
        f64::INFINITY,
        &QuadratureConfig {
            abs_tol: cfg.abs_tol / solid_angle,
            ..*cfg
        },
    )?;
    Ok(inner.scaled(solid_angle))
}

/// `∫_0^upper f(X) dX` in the log variable `X = e^v`, for integrands spread
/// over many decades. `upper` may be infinite; `breaks` are extra subdivision
/// points in `X` (kinks, edges of a partition of unity). The tails in `v` use
/// the exponential map, so `X f(X)` must vanish like a power at both ends.
pub fn integrate_log_axis<F>(f: F, upper: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<QuadratureResult<f64>>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(upper > 0.0) {
        return Err(Error::InvalidInput(format!(
            "log-axis upper bound must be > 0, got {upper}"
        )));
    }
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > 0.0 && x < upper && x.is_finite())
        .map(f64::ln)
        .collect();
    if cuts.is_empty() {
        cuts.push(if upper.is_finite() { upper.ln() - 1.0 } else { 0.0 });
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let g = |v: f64| {
        let x = v.exp();
        if x == 0.0 {
            0.0
        } else {
            f(x) * x
        }
    };
    let pieces = cuts.len() + 1;
    let sub = QuadratureConfig {
        abs_tol: cfg.abs_tol / pieces as f64,
        max_evals: (cfg.max_evals / pieces).max(1),
        scheme: Scheme::AdaptiveInterpolatory,
        decay: Decay::Exponential,
        scale: 1.0,
        ..*cfg
    };
    let to_x = |e: Error| match e {
        Error::NonFinite { abscissa } => Error::NonFinite {
            abscissa: abscissa.exp(),
        },
        other => other,
    };
    let mut total = half_line(&g, cuts[0], -1.0, &sub).map_err(to_x)?;
    for w in cuts.windows(2) {
        total = total.combine(kronrod::adaptive(&g, w[0], w[1], &sub).map_err(to_x)?);
    }
    let last = *cuts.last().expect("at least one cut");
    let tail = if upper.is_finite() {
        kronrod::adaptive(&g, last, upper.ln(), &sub)
    } else {
        half_line(&g, last, 1.0, &sub)
    };
    total = total.combine(tail.map_err(to_x)?);
    total.converged = total.converged || total.error_estimate <= cfg.target(total.value.abs());
    Ok(total)
}

/// Integrate over a box of dimension 2 to 4. Bounds must be finite.
pub fn integrate_nd<T, F>(f: F, bounds: &[(f64, f64)], cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    cfg.validate()?;
    if !(1..=4).contains(&bounds.len()) {
        return Err(Error::Dimension(bounds.len()));
    }
    for &(lo, hi) in bounds {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput("integrate_nd needs a finite box".into()));
        }
        if lo >= hi {
            return Err(Error::InvalidInput(format!("empty box axis [{lo}, {hi}]")));
        }
    }
    match cfg.scheme {
        Scheme::AdaptiveInterpolatory if bounds.len() == 1 => {
            kronrod::adaptive(&|x: f64| f(&[x]), bounds[0].0, bounds[0].1, cfg)
        }
        Scheme::AdaptiveInterpolatory => cubature::genz_malik(&f, bounds, cfg),
        Scheme::TensorProduct => cubature::tensor_legendre(&f, bounds, cfg),
        Scheme::GaussianWeighted => cubature::tensor_hermite(&f, bounds, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gaussian_moment_semi_infinite() {
        let cfg = QuadratureConfig::default();
        let r = integrate_1d(|u: f64| u * (-u * u).exp(), 0.0, f64::INFINITY, &cfg).unwrap();
        assert!(r.converged);
        assert!(close(r.value, 0.5, 1e-10), "{r:?}");
    }

    #[test]
    fn cancellation_limit_matches_gaussian_moment() {
        let cfg = QuadratureConfig::default();
        let g = |c: f64| {
            integrate_1d(
                move |u: f64| u.powi(3) * (-u * u).exp() / (u * u + c * c),
                0.0,
                f64::INFINITY,
                &cfg,
            )
            .unwrap()
            .value
        };
        assert!(close(g(0.0), 0.5, 1e-10));
        assert!(close(g(1e-6), 0.5, 1e-9));
    }

    #[test]
    fn polynomial_on_unit_interval() {
        let r = integrate_1d(|x: f64| 2.0 * x, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!(close(r.value, 1.0, 1e-14));
        let r = integrate_1d(|x: f64| 2.0 * x, 1.0, 0.0, &QuadratureConfig::default()).unwrap();
        assert!(close(r.value, -1.0, 1e-14));
    }

    #[test]
    fn exponential_map_and_negative_half_line() {
        let cfg = QuadratureConfig::default().decay(Decay::Exponential, 1.0);
        let r = integrate_1d(|x: f64| (-x).exp(), 0.0, f64::INFINITY, &cfg).unwrap();
        assert!(close(r.value, 1.0, 1e-10));
        let r = integrate_1d(|x: f64| x.exp(), f64::NEG_INFINITY, 0.0, &cfg).unwrap();
        assert!(close(r.value, 1.0, 1e-10));
        let r = integrate_1d(|x: f64| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &cfg).unwrap();
        assert!(close(r.value, PI.sqrt(), 1e-10));
    }

    #[test]
    fn radial4_examples() {
        let cfg = QuadratureConfig::default();
        let r = integrate_radial4(|k| (-k * k).exp(), &cfg).unwrap();
        assert!(close(r.value, PI * PI, 1e-9));
        let r = integrate_radial4(|k| if k < 1.0 { k.powi(-3) } else { 0.0 }, &cfg).unwrap();
        assert!(close(r.value, 2.0 * PI * PI, 1e-8), "{r:?}");
        // B = 1, m = 0: 2 pi^2 ∫ k e^{-k^2/2} dk = 2 pi^2
        let r = integrate_radial4(|k| (-k * k / 2.0).exp() / (k * k), &cfg).unwrap();
        assert!(close(r.value, 2.0 * PI * PI, 1e-9));
    }

    #[test]
    fn nd_examples_all_schemes() {
        let unit = integrate_nd(|_: &[f64]| 1.0, &[(0.0, 1.0), (0.0, 1.0)], &QuadratureConfig::default()).unwrap();
        assert!(close(unit.value, 1.0, 1e-13));

        let gauss = |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp();
        let bounds = [(-6.0, 6.0); 4];
        for (scheme, rel) in [(Scheme::AdaptiveInterpolatory, 1e-6), (Scheme::TensorProduct, 1e-8)] {
            let cfg = QuadratureConfig::with_tolerances(1e-10, rel).scheme(scheme).points(40);
            let r = integrate_nd(gauss, &bounds, &cfg).unwrap();
            assert!(close(r.value, PI * PI, 1e-7), "{scheme:?}: {r:?}");
            assert!(r.converged, "{scheme:?}: {r:?}");
        }
        // exp(-x^2) on a ±8 sigma window: sigma = 1/sqrt2
        let window = [(-8.0 / 2f64.sqrt(), 8.0 / 2f64.sqrt()); 4];
        let cfg = QuadratureConfig::default().scheme(Scheme::GaussianWeighted).points(20);
        let r = integrate_nd(gauss, &window, &cfg).unwrap();
        assert!(close(r.value, PI * PI, 1e-12), "{r:?}");
    }

    #[test]
    fn log_axis_examples() {
        let cfg = QuadratureConfig::default();
        let r = integrate_log_axis(|x| 1.0 / ((x + 1.0) * (x + 1.0)), f64::INFINITY, &[], &cfg).unwrap();
        assert!(r.converged && close(r.value, 1.0, 1e-10), "{r:?}");
        let r = integrate_log_axis(|x| x.ln() / ((x + 1.0) * (x + 1.0)), f64::INFINITY, &[1e-3, 1e3], &cfg).unwrap();
        assert!(r.value.abs() < 1e-9, "{r:?}");
        let r = integrate_log_axis(|x| 1.0 / (x + 1.0), 1e12, &[1.0], &cfg).unwrap();
        assert!(close(r.value, (1e12f64 + 1.0).ln(), 1e-10), "{r:?}");
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig::with_tolerances(1e-15, 0.0).max_evals(200);
        let r = integrate_1d(|x: f64| x.sqrt().sin() / x.sqrt(), 0.0, 1000.0, &cfg).unwrap();
        assert!(!r.converged);
        let r = integrate_nd(
            |x: &[f64]| (1.0 / (x[0] * x[0] + x[1] * x[1] + 1e-6)).sqrt(),
            &[(-1.0, 1.0), (-1.0, 1.0)],
            &cfg,
        )
        .unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn converged_results_respect_tolerance() {
        let cfg = QuadratureConfig::with_tolerances(1e-9, 1e-7);
        let r = integrate_1d(|x: f64| (3.0 * x).cos() * (-x).exp(), 0.0, 5.0, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.error_estimate <= cfg.target(r.value.abs()));
    }

    #[test]
    fn deterministic_repeat() {
        let cfg = QuadratureConfig::default();
        let f = |x: &[f64]| (x[0] * x[1]).sin() + x[2];
        let a = integrate_nd(f, &[(0.0, 2.0), (0.0, 1.0), (0.0, 1.0)], &cfg).unwrap();
        let b = integrate_nd(f, &[(0.0, 2.0), (0.0, 1.0), (0.0, 1.0)], &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evals, b.evals);
    }

    #[test]
    fn complex_and_vector_values() {
        let cfg = QuadratureConfig::default();
        let r = integrate_1d(|x: f64| Complex64::new(0.0, x).exp(), 0.0, PI, &cfg).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        let r = integrate_1d(|x: f64| VecN([1.0, x, x * x]), 0.0, 1.0, &cfg).unwrap();
        assert!(close(r.value.0[2], 1.0 / 3.0, 1e-14));
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = QuadratureConfig {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate_1d(|x: f64| x, 0.0, 1.0, &cfg).is_err());
        assert!(integrate_nd(|_: &[f64]| 1.0, &[(0.0, 1.0); 5], &QuadratureConfig::default()).is_err());
    }
}
