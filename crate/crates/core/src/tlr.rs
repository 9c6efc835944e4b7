//! Taylor-Lagrange regularization.
//!
//! A singular one-dimensional distribution `T(X)` on `(0, ∞)` is paired with a
//! partition of unity `f`. Replacing `f` by its Taylor remainder moves the
//! derivatives onto `X T(X)` and yields the finite extension
//!
//! ```text
//! T~>(X) = ((-X)^k / k!) ∂_X^{k+1}(X T(X)) ∫_1^{η² G(X)} dt/t (1-t)^k
//! ```
//!
//! where `G` is the running support. With the constant support the upper
//! bound is `η²` and a logarithmically divergent `T` turns into a convergent
//! one scaled by `ln η²`. With the running support `G(X) = X_e / X` the
//! extension keeps the dependence on the edge `X_e` of the original support,
//! which is how `ln Λ²` survives in the one-loop amplitudes.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quad::{self, integrate_1d, integrate_log_axis, QuadratureConfig, QuadratureResult};
use crate::testfn::hermite;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlrConfig {
    /// Taylor order.
    pub k: u32,
    /// Running-support scale; the `t` integral runs up to `η²`.
    pub eta: f64,
    /// Arbitrary UV scale `Λ`.
    pub lambda: f64,
}

impl Default for TlrConfig {
    fn default() -> Self {
        Self {
            k: 0,
            eta: std::f64::consts::SQRT_2,
            lambda: 1e3,
        }
    }
}

impl TlrConfig {
    pub fn new(k: u32, eta: f64, lambda: f64) -> Result<Self> {
        let cfg = Self { k, eta, lambda };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 1.0) || !self.eta.is_finite() {
            return Err(Error::InvalidInput(format!("eta must be > 1, got {}", self.eta)));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidInput(format!("lambda must be > 0, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn eta_sq(&self) -> f64 {
        self.eta * self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BumpKind {
    /// `N exp(-x²)` cut off at `|x| = 1`; continuous but not smooth at the edge.
    #[default]
    TruncatedGaussian,
    /// `N exp(-1/(1-x²))`, smooth everywhere.
    Smooth,
}

/// Normalized bump on `(-1, 1)` with a cached table of its running integral.
#[derive(Debug)]
pub struct Bump {
    kind: BumpKind,
    norm: f64,
    nodes: Vec<f64>,
    cdf: Vec<f64>,
}

const CDF_PANELS: usize = 256;

impl Bump {
    /// Shared, lazily built instance for each kind.
    pub fn get(kind: BumpKind) -> &'static Bump {
        static GAUSS: OnceLock<Bump> = OnceLock::new();
        static SMOOTH: OnceLock<Bump> = OnceLock::new();
        match kind {
            BumpKind::TruncatedGaussian => GAUSS.get_or_init(|| Bump::build(kind)),
            BumpKind::Smooth => SMOOTH.get_or_init(|| Bump::build(kind)),
        }
    }

    fn build(kind: BumpKind) -> Self {
        let cfg = QuadratureConfig::with_tolerances(1e-15, 1e-14);
        let shape = move |x: f64| raw_bump(kind, x);
        let nodes: Vec<f64> = (0..=CDF_PANELS)
            .map(|j| -1.0 + 2.0 * j as f64 / CDF_PANELS as f64)
            .collect();
        let mut cdf = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in nodes.windows(2) {
            acc += integrate_1d(shape, w[0], w[1], &cfg).expect("bump is finite").value;
            cdf.push(acc);
        }
        let norm = 1.0 / acc;
        for c in cdf.iter_mut() {
            *c *= norm;
        }
        Self { kind, norm, nodes, cdf }
    }

    pub fn kind(&self) -> BumpKind {
        self.kind
    }

    /// Normalization constant `N`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn value(&self, x: f64) -> f64 {
        self.norm * raw_bump(self.kind, x)
    }

    /// `∫_{-1}^{x} bump`, from the cached table plus one local Gauss rule.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let j = (((x + 1.0) * 0.5 * CDF_PANELS as f64) as usize).min(CDF_PANELS - 1);
        let x0 = self.nodes[j];
        if x == x0 {
            return self.cdf[j];
        }
        let (gx, gw) = local_rule();
        let (c, h) = (0.5 * (x0 + x), 0.5 * (x - x0));
        let part: f64 = gx.iter().zip(gw).map(|(t, w)| w * self.value(c + h * t)).sum();
        (self.cdf[j] + h * part).clamp(0.0, 1.0)
    }

    /// `d^n/dx^n bump` inside the support. The truncated Gaussian has closed
    /// forms through Hermite polynomials; the smooth bump uses finite differences.
    pub fn derivative(&self, n: u32, x: f64) -> Result<f64> {
        if n == 0 {
            return Ok(self.value(x));
        }
        if x.abs() >= 1.0 {
            return Ok(0.0);
        }
        match self.kind {
            BumpKind::TruncatedGaussian => {
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                Ok(self.norm * sign * hermite(n, x) * (-x * x).exp())
            }
            BumpKind::Smooth => {
                let step = 0.25 * (1.0 - x.abs());
                quad::derivative(|s| self.value(s), x, n, Some(step))
            }
        }
    }
}

fn raw_bump(kind: BumpKind, x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    match kind {
        BumpKind::TruncatedGaussian => (-x * x).exp(),
        BumpKind::Smooth => (-1.0 / (1.0 - x * x)).exp(),
    }
}

fn local_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| quad::gauss_legendre(12))
}

/// The default bump: `N exp(-x²)` on `|x| < 1`, `N = 1/∫_{-1}^{1} exp(-x²)`.
pub fn bump(x: f64) -> f64 {
    Bump::get(BumpKind::TruncatedGaussian).value(x)
}

/// Indicator of `[a, b]` convolved with `bump(·/w)/w`:
/// `f(x) = B((x-a)/w) - B((x-b)/w)` with `B` the bump's running integral.
#[derive(Debug, Clone, Copy)]
pub struct PartitionOfUnity {
    a: f64,
    b: f64,
    width: f64,
    bump: &'static Bump,
}

pub fn partition_of_unity(a: f64, b: f64, width: f64) -> Result<PartitionOfUnity> {
    PartitionOfUnity::with_bump(a, b, width, BumpKind::default())
}

impl PartitionOfUnity {
    pub fn with_bump(a: f64, b: f64, width: f64, kind: BumpKind) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidInput(format!("partition width must be > 0, got {width}")));
        }
        if !(b - a > 2.0 * width) {
            return Err(Error::InvalidInput(format!(
                "degenerate plateau: b - a = {} must exceed 2 width = {}",
                b - a,
                2.0 * width
            )));
        }
        Ok(Self {
            a,
            b,
            width,
            bump: Bump::get(kind),
        })
    }

    pub fn plateau(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Closed support `[a - w, b + w]`.
    pub fn support(&self) -> (f64, f64) {
        (self.a - self.width, self.b + self.width)
    }

    /// Points where `f` or its derivatives change character.
    pub fn breakpoints(&self) -> [f64; 4] {
        let w = self.width;
        [self.a - w, self.a + w, self.b - w, self.b + w]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return 0.0;
        }
        if x >= self.a + self.width && x <= self.b - self.width {
            return 1.0;
        }
        let up = self.bump.cdf((x - self.a) / self.width);
        let down = self.bump.cdf((x - self.b) / self.width);
        (up - down).clamp(0.0, 1.0)
    }

    /// `f^{(n)}(x) = w^{-n} [bump^{(n-1)}((x-a)/w) - bump^{(n-1)}((x-b)/w)]` for `n ≥ 1`.
    pub fn derivative(&self, n: u32, x: f64) -> Result<f64> {
        if n == 0 {
            return Ok(self.eval(x));
        }
        let w = self.width;
        let up = self.bump.derivative(n - 1, (x - self.a) / w)?;
        let down = self.bump.derivative(n - 1, (x - self.b) / w)?;
        Ok((up - down) / w.powi(n as i32))
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `∫_1^{η²} dt/t (1-t)^k`.
pub fn t_integral(k: u32, eta: f64) -> f64 {
    t_integral_to(k, eta * eta)
}

/// `∫_1^{upper} dt/t (1-t)^k` for any `upper > 0`; closed form for `k ≤ 4`.
pub fn t_integral_to(k: u32, upper: f64) -> f64 {
    if upper == 1.0 {
        return 0.0;
    }
    if k <= 4 {
        let mut acc = upper.ln();
        for j in 1..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(k, j) * (upper.powi(j as i32) - 1.0) / j as f64;
        }
        return acc;
    }
    let cfg = QuadratureConfig::with_tolerances(1e-14, 1e-13);
    integrate_1d(|t: f64| (1.0 - t).powi(k as i32) / t, 1.0, upper, &cfg)
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}

/// A one-dimensional distribution `T(X)` on `(0, ∞)`.
pub trait Distribution: Sync {
    fn value(&self, x: f64) -> f64;

    /// `∂_X^n (X T(X))`. The default uses finite differences.
    fn xt_derivative(&self, n: u32, x: f64) -> Result<f64> {
        let step = 0.1 * x.abs().max(0.5);
        quad::derivative(|y| y * self.value(y), x, n, Some(step))
    }
}

/// `T(X) = Σ_i c_i (X+1)^{-n_i}`, with exact derivatives of `X T(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalKernel {
    terms: Vec<(f64, i32)>,
}

impl RationalKernel {
    pub fn new(terms: Vec<(f64, i32)>) -> Self {
        Self { terms }
    }

    /// `(X+1)^{-n}`
    pub fn inverse_power(n: i32) -> Self {
        Self::new(vec![(1.0, n)])
    }

    /// `X(X-1)/(X+1)³ = 1/(X+1) - 3/(X+1)² + 2/(X+1)³`
    pub fn vertex() -> Self {
        Self::new(vec![(1.0, 1), (-3.0, 2), (2.0, 3)])
    }

    pub fn terms(&self) -> &[(f64, i32)] {
        &self.terms
    }
}

/// `d^n/dX^n (X+1)^p`
fn power_derivative(p: i32, n: u32, x: f64) -> f64 {
    let coeff: f64 = (0..n as i32).map(|j| f64::from(p - j)).product();
    if coeff == 0.0 {
        return 0.0;
    }
    coeff * (x + 1.0).powi(p - n as i32)
}

impl Distribution for RationalKernel {
    fn value(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(c, n)| c * (x + 1.0).powi(-n)).sum()
    }

    fn xt_derivative(&self, n: u32, x: f64) -> Result<f64> {
        // X (X+1)^{-m} = (X+1)^{1-m} - (X+1)^{-m}
        Ok(self
            .terms
            .iter()
            .map(|&(c, m)| c * (power_derivative(1 - m, n, x) - power_derivative(-m, n, x)))
            .sum())
    }
}

/// Wraps a plain closure; derivatives by finite differences.
pub struct FnDistribution<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> Distribution for FnDistribution<F> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Running support `G(X)`, the factor applied to `η²` in the `t` integral.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RunningSupport {
    /// `G ≡ 1`.
    #[default]
    Constant,
    /// `G(X) = edge / X`: the upper bound follows the edge of the original support.
    Inverse { edge: f64 },
}

impl RunningSupport {
    pub fn factor(&self, x: f64) -> f64 {
        match *self {
            RunningSupport::Constant => 1.0,
            RunningSupport::Inverse { edge } => edge / x,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            RunningSupport::Inverse { edge } if !(edge > 0.0) || !edge.is_finite() => Err(Error::InvalidInput(
                format!("running-support edge must be > 0, got {edge}"),
            )),
            _ => Ok(()),
        }
    }
}

/// The extension `X ↦ T~>(X)` of a distribution.
pub struct Extension<'a, D: ?Sized> {
    t: &'a D,
    k: u32,
    eta_sq: f64,
    support: RunningSupport,
}

pub fn extend_distribution<'a, D: Distribution + ?Sized>(
    t: &'a D,
    cfg: &TlrConfig,
    support: RunningSupport,
) -> Result<Extension<'a, D>> {
    cfg.validate()?;
    support.validate()?;
    Ok(Extension {
        t,
        k: cfg.k,
        eta_sq: cfg.eta_sq(),
        support,
    })
}

impl<D: Distribution + ?Sized> Extension<'_, D> {
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let k = self.k;
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let lead = sign * x.powi(k as i32) / factorial(k);
        let d = self.t.xt_derivative(k + 1, x)?;
        Ok(lead * d * t_integral_to(k, self.eta_sq * self.support.factor(x)))
    }

    /// `∫_0^∞ T~>(X) f(X) dX`, or `∫_0^∞ T~>(X) dX` when `f` is `None`.
    pub fn integrate(&self, f: Option<&PartitionOfUnity>, cfg: &QuadratureConfig) -> Result<QuadratureResult<f64>> {
        let mut breaks = vec![1.0];
        if let RunningSupport::Inverse { edge } = self.support {
            breaks.push(edge * self.eta_sq);
        }
        let upper = match f {
            Some(f) => {
                breaks.extend(f.breakpoints());
                f.support().1
            }
            None => f64::INFINITY,
        };
        if !(upper > 0.0) {
            return Ok(QuadratureResult::exact(0.0));
        }
        integrate_log_axis(
            |x| {
                let weight = f.map_or(1.0, |f| f.eval(x));
                if weight == 0.0 {
                    return 0.0;
                }
                self.eval(x).unwrap_or(f64::NAN) * weight
            },
            upper,
            &breaks,
            cfg,
        )
    }
}

/// `g>(X) = -(X/k!) ∫_1^{η² G(X)} dt/t (1-t)^k ∂_X^{k+1}(X^k f(X t))`, the
/// Taylor remainder of the partition of unity.
pub fn taylor_remainder_extension(
    f: &PartitionOfUnity,
    cfg: &TlrConfig,
    support: RunningSupport,
    x: f64,
    quad_cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    support.validate()?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let k = cfg.k;
    let upper = cfg.eta_sq() * support.factor(x.abs());
    // Leibniz: ∂^{k+1}(X^k f(Xt)) = Σ_j C(k+1, j) ∂^j(X^k) t^{k+1-j} f^{(k+1-j)}(Xt)
    let mixed = |t: f64| -> f64 {
        let mut acc = 0.0;
        for j in 0..=k {
            let falling: f64 = (0..j).map(|i| f64::from(k - i)).product();
            let xpow = falling * x.powi((k - j) as i32);
            let order = k + 1 - j;
            match f.derivative(order, x * t) {
                Ok(d) => acc += binomial(k + 1, j) * xpow * t.powi(order as i32) * d,
                Err(_) => return f64::NAN,
            }
        }
        acc
    };
    let integrand = |t: f64| (1.0 - t).powi(k as i32) / t * mixed(t);
    // the bump derivatives jump at the ramp edges; split there
    let mut cuts: Vec<f64> = f
        .breakpoints()
        .iter()
        .map(|&e| e / x)
        .filter(|&t| t > upper.min(1.0) && t < upper.max(1.0))
        .collect();
    cuts.push(1.0);
    cuts.push(upper);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate_1d(integrand, w[0], w[1], quad_cfg)?.value;
    }
    if upper < 1.0 {
        total = -total;
    }
    Ok(-x / factorial(k) * total)
}

/// Direct and extended forms of `A = ∫_0^∞ T f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    /// `∫_0^∞ T~>(X) f(X) dX`, the canonical value.
    pub extended: QuadratureResult<f64>,
    /// `∫_0^∞ T(X) f(X) dX` on the compact support of `f`.
    pub direct: QuadratureResult<f64>,
}

pub fn amplitude<D: Distribution + ?Sized>(
    t: &D,
    f: &PartitionOfUnity,
    cfg: &TlrConfig,
    support: RunningSupport,
    quad_cfg: &QuadratureConfig,
) -> Result<Amplitude> {
    let extended = extend_distribution(t, cfg, support)?.integrate(Some(f), quad_cfg)?;
    let upper = f.support().1;
    let direct = if upper > 0.0 {
        let mut breaks = f.breakpoints().to_vec();
        breaks.push(1.0);
        integrate_log_axis(|x| t.value(x) * f.eval(x), upper, &breaks, quad_cfg)?
    } else {
        QuadratureResult::exact(0.0)
    };
    Ok(Amplitude { extended, direct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Maclaurin series, accurate to rounding for |x| <= 1.
    fn erf(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..40 {
            term *= -x * x / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn bump_examples() {
        assert_eq!(bump(1.5), 0.0);
        assert_eq!(bump(-0.3), bump(0.3));
        let cfg = QuadratureConfig::with_tolerances(1e-13, 1e-12);
        let total = integrate_1d(bump, -1.0, 1.0, &cfg).unwrap().value;
        assert!((total - 1.0).abs() < 1e-10);
        let b = Bump::get(BumpKind::TruncatedGaussian);
        let expected = 1.0 / (std::f64::consts::PI.sqrt() * erf(1.0));
        assert!((b.norm() - expected).abs() < 1e-13, "{} vs {expected}", b.norm());
    }

    #[test]
    fn bump_cdf_matches_erf() {
        let b = Bump::get(BumpKind::TruncatedGaussian);
        for i in 0..=40 {
            let x = -1.0 + 0.05 * i as f64;
            let expected = (erf(x) + erf(1.0)) / (2.0 * erf(1.0));
            assert!((b.cdf(x) - expected).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn smooth_bump_normalized() {
        let b = Bump::get(BumpKind::Smooth);
        assert!((b.cdf(0.0) - 0.5).abs() < 1e-13);
        assert!((b.cdf(0.999_999) - 1.0).abs() < 1e-12);
        let d = b.derivative(1, 0.3).unwrap();
        let fd = (b.value(0.3 + 1e-6) - b.value(0.3 - 1e-6)) / 2e-6;
        assert!((d - fd).abs() < 1e-6);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = Bump::get(BumpKind::TruncatedGaussian);
        for n in 1..=4 {
            let analytic = b.derivative(n, 0.2).unwrap();
            let numeric = quad::derivative(|x| b.value(x), 0.2, n, Some(0.1)).unwrap();
            assert!((analytic - numeric).abs() < 1e-6 * (1.0 + analytic.abs()), "order {n}");
        }
    }

    #[test]
    fn partition_examples() {
        let f = partition_of_unity(-1.0, 3.0, 0.5).unwrap();
        assert!((f.eval(1.0) - 1.0).abs() < 1e-10);
        assert_eq!(f.eval(3.0 + 2.0 * 0.5), 0.0);
        assert_eq!(f.eval(-2.0), 0.0);
        assert!(partition_of_unity(0.0, 1.0, 0.5).is_err());
        assert!(partition_of_unity(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn partition_edge_symmetry() {
        // each ramp is antisymmetric about its edge
        let f = partition_of_unity(0.0, 10.0, 0.75).unwrap();
        for i in 0..=20 {
            let s = 0.05 * i as f64;
            assert!((f.eval(-s) + f.eval(s) - 1.0).abs() < 1e-13);
            assert!((f.eval(10.0 - s) + f.eval(10.0 + s) - 1.0).abs() < 1e-13);
        }
        // adjacent partitions tile the line
        let g = partition_of_unity(10.0, 20.0, 0.75).unwrap();
        for i in 0..=40 {
            let x = 8.0 + 0.1 * i as f64;
            assert!((f.eval(x) + g.eval(x) - 1.0).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn partition_derivative_matches_finite_difference() {
        let f = partition_of_unity(0.0, 4.0, 0.5).unwrap();
        for x in [-0.3, 0.1, 3.8, 4.2] {
            let d = f.derivative(1, x).unwrap();
            let fd = (f.eval(x + 1e-6) - f.eval(x - 1e-6)) / 2e-6;
            assert!((d - fd).abs() < 1e-6, "{x}: {d} vs {fd}");
        }
    }

    proptest! {
        #[test]
        fn partition_bounds(x in -20.0f64..20.0, a in -5.0f64..0.0, len in 2.0f64..10.0, w in 0.1f64..0.9) {
            let f = partition_of_unity(a, a + len, w).unwrap();
            let v = f.eval(x);
            prop_assert!((0.0..=1.0).contains(&v));
            if x >= a + w && x <= a + len - w {
                prop_assert_eq!(v, 1.0);
            }
            if x <= a - w || x >= a + len + w {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn t_integral_closed_form_matches_quadrature(k in 0u32..=4, eta in 1.01f64..4.0) {
            let cfg = QuadratureConfig::with_tolerances(1e-13, 1e-12);
            let q = integrate_1d(|t: f64| (1.0 - t).powi(k as i32) / t, 1.0, eta * eta, &cfg).unwrap().value;
            let c = t_integral(k, eta);
            prop_assert!((q - c).abs() <= 1e-9 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn t_integral_examples() {
        let eta = 1.7f64;
        let l = (eta * eta).ln();
        assert!((t_integral(0, eta) - l).abs() < 1e-15);
        assert!((t_integral(1, eta) - (l - (eta * eta - 1.0))).abs() < 1e-14);
        for k in 0..8 {
            assert!(t_integral(k, 1.0 + 1e-12).abs() < 1e-10);
        }
        // quadrature branch continues the closed form smoothly
        let direct = integrate_1d(
            |t: f64| (1.0 - t).powi(6) / t,
            1.0,
            eta * eta,
            &QuadratureConfig::with_tolerances(1e-13, 1e-12),
        )
        .unwrap()
        .value;
        assert!((t_integral(6, eta) - direct).abs() < 1e-10);
        assert!((t_integral_to(0, 0.5) + LN2).abs() < 1e-15);
    }

    #[test]
    fn rational_kernel_derivatives() {
        let kernel = RationalKernel::vertex();
        let fallback = FnDistribution(|x: f64| x * (x - 1.0) / (x + 1.0).powi(3));
        for x in [0.3, 1.0, 4.0] {
            assert!((kernel.value(x) - fallback.value(x)).abs() < 1e-15);
            for n in 1..=3 {
                let a = kernel.xt_derivative(n, x).unwrap();
                let b = fallback.xt_derivative(n, x).unwrap();
                assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_extension_closed_form() {
        let cfg = TlrConfig::new(0, 1.5, 1.0).unwrap();
        let t = RationalKernel::inverse_power(1);
        let ext = extend_distribution(&t, &cfg, RunningSupport::Constant).unwrap();
        for x in [0.1, 1.0, 7.0] {
            let expected = (cfg.eta_sq()).ln() / ((x + 1.0) * (x + 1.0));
            assert!((ext.eval(x).unwrap() - expected).abs() < 1e-14);
        }
        let r = ext.integrate(None, &QuadratureConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - cfg.eta_sq().ln()).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn running_support_recovers_convergent_integral() {
        let cfg = TlrConfig::new(0, 1.3, 1.0).unwrap();
        let t = RationalKernel::inverse_power(3);
        let support = RunningSupport::Inverse { edge: 1e6 };
        let r = extend_distribution(&t, &cfg, support)
            .unwrap()
            .integrate(None, &QuadratureConfig::default())
            .unwrap();
        // ∫ 1/(X+1)³ = 1/2, up to O(ln X_e / X_e)
        assert!((r.value - 0.5).abs() < 1e-4, "{r:?}");
        let constant = extend_distribution(&t, &cfg, RunningSupport::Constant)
            .unwrap()
            .integrate(None, &QuadratureConfig::default())
            .unwrap();
        // with a fixed upper bound the surface term ∫ ∂(X T) vanishes
        assert!(constant.value.abs() < 1e-10, "{constant:?}");
    }

    #[test]
    fn running_support_captures_log() {
        let cfg = TlrConfig::new(0, 2f64.sqrt(), 1.0).unwrap();
        let t = RationalKernel::inverse_power(1);
        for edge in [1e2, 1e4, 1e6] {
            let r = extend_distribution(&t, &cfg, RunningSupport::Inverse { edge })
                .unwrap()
                .integrate(None, &QuadratureConfig::default())
                .unwrap();
            let expected = (cfg.eta_sq() * edge).ln();
            assert!((r.value - expected).abs() < 1e-8, "{edge}: {r:?}");
        }
    }

    #[test]
    fn vertex_kernel_extension() {
        let cfg = TlrConfig::new(0, 2f64.sqrt(), 1.0).unwrap();
        let t = RationalKernel::vertex();
        let edge = 1e5;
        let r = extend_distribution(&t, &cfg, RunningSupport::Inverse { edge })
            .unwrap()
            .integrate(None, &QuadratureConfig::default())
            .unwrap();
        let expected = (cfg.eta_sq() * edge).ln() - 2.0;
        assert!((r.value - expected).abs() < 1e-8, "{r:?} vs {expected}");
    }

    #[test]
    fn higher_order_extension_is_finite_and_orders_agree() {
        let t = RationalKernel::inverse_power(3);
        let mut prev_gap = f64::INFINITY;
        for b in [10.0, 100.0, 1000.0] {
            let f = partition_of_unity(-1.0, b, 0.5).unwrap();
            let quad_cfg = QuadratureConfig::default();
            let a0 = amplitude(
                &t,
                &f,
                &TlrConfig::new(0, 1.5, 1.0).unwrap(),
                RunningSupport::Constant,
                &quad_cfg,
            )
            .unwrap();
            let a1 = amplitude(
                &t,
                &f,
                &TlrConfig::new(1, 1.5, 1.0).unwrap(),
                RunningSupport::Constant,
                &quad_cfg,
            )
            .unwrap();
            assert!(a0.extended.converged && a1.extended.converged);
            let gap = (a0.extended.value - a1.extended.value).abs();
            assert!(gap < prev_gap, "plateau {b}: gap {gap} did not shrink from {prev_gap}");
            prev_gap = gap;
        }
    }

    #[test]
    fn amplitude_convergent_kernel_direct_vs_extended() {
        let t = RationalKernel::inverse_power(3);
        let b = 1e4;
        let f = partition_of_unity(-1.0, b, 0.5).unwrap();
        let cfg = TlrConfig::new(0, 1.5, 1.0).unwrap();
        let a = amplitude(
            &t,
            &f,
            &cfg,
            RunningSupport::Inverse { edge: b },
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((a.direct.value - 0.5).abs() < 1e-7);
        assert!((a.extended.value - a.direct.value).abs() < 1e-3, "{a:?}");
    }

    #[test]
    fn amplitude_inverse_kernel_constant_support() {
        let t = RationalKernel::inverse_power(1);
        let f = partition_of_unity(-1.0, 50.0, 0.5).unwrap();
        let cfg = TlrConfig::new(0, 1.5, 1.0).unwrap();
        let quad_cfg = QuadratureConfig::default();
        let a = amplitude(&t, &f, &cfg, RunningSupport::Constant, &quad_cfg).unwrap();
        let weighted = integrate_log_axis(
            |x| f.eval(x) / ((x + 1.0) * (x + 1.0)),
            51.0,
            &f.breakpoints(),
            &quad_cfg,
        )
        .unwrap()
        .value;
        assert!((a.extended.value - cfg.eta_sq().ln() * weighted).abs() < 1e-10);
        let zero = amplitude(&FnDistribution(|_| 0.0), &f, &cfg, RunningSupport::Constant, &quad_cfg).unwrap();
        assert_eq!(zero.extended.value, 0.0);
        assert_eq!(zero.direct.value, 0.0);
    }

    #[test]
    fn taylor_remainder_first_order_closed_form() {
        let f = partition_of_unity(-1.0, 5.0, 0.5).unwrap();
        let cfg = TlrConfig::new(0, 1.5, 1.0).unwrap();
        let quad_cfg = QuadratureConfig::default();
        for x in [0.5, 2.0, 3.0, 4.0] {
            let g = taylor_remainder_extension(&f, &cfg, RunningSupport::Constant, x, &quad_cfg).unwrap();
            let expected = f.eval(x) - f.eval(cfg.eta_sq() * x);
            assert!((g - expected).abs() < 1e-9, "{x}: {g} vs {expected}");
        }
        assert_eq!(
            taylor_remainder_extension(&f, &cfg, RunningSupport::Constant, 0.0, &quad_cfg).unwrap(),
            0.0
        );
        let near = TlrConfig::new(0, 1.0 + 1e-12, 1.0).unwrap();
        assert!(
            taylor_remainder_extension(&f, &near, RunningSupport::Constant, 3.0, &quad_cfg)
                .unwrap()
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn taylor_remainder_higher_order_is_finite() {
        let f = partition_of_unity(-1.0, 5.0, 0.5).unwrap();
        let cfg = TlrConfig::new(2, 1.5, 1.0).unwrap();
        let g =
            taylor_remainder_extension(&f, &cfg, RunningSupport::Constant, 3.0, &QuadratureConfig::default()).unwrap();
        assert!(g.is_finite());
        // inside the plateau with the whole t-range on it the remainder vanishes
        let g =
            taylor_remainder_extension(&f, &cfg, RunningSupport::Constant, 1.0, &QuadratureConfig::default()).unwrap();
        assert!(g.abs() < 1e-12);
    }

    #[test]
    fn invalid_config() {
        assert!(TlrConfig::new(0, 1.0, 1.0).is_err());
        assert!(TlrConfig::new(0, 2.0, -1.0).is_err());
        let t = RationalKernel::inverse_power(1);
        assert!(extend_distribution(&t, &TlrConfig::default(), RunningSupport::Inverse { edge: 0.0 }).is_err());
    }
}
