//! Regularized two-point functions of a scalar field smeared with Gaussian
//! (or Hermite-Gaussian) test functions.
//!
//! Every momentum integrand carries the regularizing factor
//!
//! ```text
//! G(p) = R_n(p) exp(-2 A^{mu nu} (p-P)_mu (p-P)_nu) / ((2 pi)^{D/2} prod_mu sqrt(B_mu mu))
//! ```
//!
//! with `D = 4`, or `D = 2` in the reduced 1+1 mode which keeps only axes 0
//! and 1. `R_n` is the product of normalized Hermite polynomials in
//! `(p-P)/sqrt(2B)` and equals 1 for the ground state.

use std::cell::Cell;
use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_1d, integrate_nd, QuadratureConfig, QuadratureResult};
use crate::testfn::{hermite_product, FourMomentum, TestFunctionParams, Vec4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorParams {
    pub mass: f64,
    /// Finite `iε` of the Feynman denominator.
    pub epsilon: f64,
    pub testfn: TestFunctionParams,
    /// Spatial dimensions: 3, or 1 for the reduced 1+1 mode.
    pub reduced_dims: u8,
}

impl PropagatorParams {
    pub fn new(mass: f64, epsilon: f64, testfn: TestFunctionParams, reduced_dims: u8) -> Result<Self> {
        let params = Self {
            mass,
            epsilon,
            testfn,
            reduced_dims,
        };
        params.validate()?;
        Ok(params)
    }

    /// `ε = 1e-6 m²`, full 3+1 dimensions.
    pub fn with_default_epsilon(mass: f64, testfn: TestFunctionParams) -> Result<Self> {
        Self::new(mass, 1e-6 * mass * mass, testfn, 3)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidInput(format!("mass must be > 0, got {}", self.mass)));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !matches!(self.reduced_dims, 1 | 3) {
            return Err(Error::InvalidInput(format!(
                "reduced_dims must be 1 or 3, got {}",
                self.reduced_dims
            )));
        }
        self.testfn.validate()
    }

    /// Number of active momentum axes (time included).
    pub fn axes(&self) -> usize {
        self.reduced_dims as usize + 1
    }

    fn omega(&self, p_spatial_sq: f64) -> f64 {
        (p_spatial_sq + self.mass * self.mass).sqrt()
    }

    /// Half-width of the momentum box, `8 / sqrt(2 λ_min(A))`.
    pub fn momentum_half_width(&self) -> f64 {
        let eig = SymmetricEigen::new(*self.testfn.disp.a());
        let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        8.0 / (2.0 * lmin).sqrt()
    }

    fn momentum_box(&self, axes: std::ops::Range<usize>) -> Vec<(f64, f64)> {
        let half = self.momentum_half_width();
        let p = &self.testfn.mean_p;
        axes.map(|i| (p[i] - half, p[i] + half)).collect()
    }

    fn normalization(&self) -> f64 {
        let d = self.axes();
        let disp = &self.testfn.disp;
        let root = if d == 4 {
            disp.b().determinant().sqrt()
        } else {
            disp.sqrt_b_product(d)
        };
        1.0 / ((2.0 * PI).powi(d as i32 / 2) * root)
    }

    /// Regularizing factor `G(p)`. In reduced mode axes 2 and 3 sit at the mean.
    pub fn regulator(&self, p: &Vec4) -> f64 {
        let tf = &self.testfn;
        let d = self.axes();
        let a = tf.disp.a();
        let diff: Vec4 = std::array::from_fn(|i| if i < d { p[i] - tf.mean_p[i] } else { 0.0 });
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += a[(i, j)] * diff[i] * diff[j];
            }
        }
        let poly = hermite_product(&tf.n, p, &tf.mean_p, tf.disp.b(), d);
        poly * (-2.0 * q).exp() * self.normalization()
    }
}

/// `G(p) / (p̄² - m² + iε)`
pub fn feynman_propagator_p(p: &FourMomentum, params: &PropagatorParams) -> Complex64 {
    let denom = Complex64::new(
        reduced_square(p, params.axes()) - params.mass * params.mass,
        params.epsilon,
    );
    params.regulator(&p.0) / denom
}

fn reduced_square(p: &FourMomentum, axes: usize) -> f64 {
    let c = &p.0;
    c[0] * c[0] - c[1..axes].iter().map(|v| v * v).sum::<f64>()
}

/// `ϑ(x, y) = ∫ d^D p / (2ω (2π)^D) exp(-i(ω t - p·r)) G(ω, p)` with `t = x⁰ - y⁰`,
/// `r = x - y` and `D` spatial dimensions.
pub fn vacuum_fluctuation(
    x: &Vec4,
    y: &Vec4,
    params: &PropagatorParams,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<Complex64>> {
    params.validate()?;
    let dims = params.reduced_dims as usize;
    let t = x[0] - y[0];
    let r: Vec4 = std::array::from_fn(|i| x[i] - y[i]);
    let pinned = params.testfn.mean_p;
    let measure = 1.0 / (2.0 * PI).powi(dims as i32);
    let integrand = |ps: &[f64]| -> Complex64 {
        let mut p = pinned;
        let mut p_sq = 0.0;
        let mut phase = 0.0;
        for (i, &v) in ps.iter().enumerate() {
            p[i + 1] = v;
            p_sq += v * v;
            phase += v * r[i + 1];
        }
        let omega = params.omega(p_sq);
        p[0] = omega;
        let g = params.regulator(&p);
        Complex64::from_polar(g * measure / (2.0 * omega), phase - omega * t)
    };
    let bounds = params.momentum_box(1..dims + 1);
    integrate_nd(integrand, &bounds, cfg)
}

/// `Δ_F(dx) = ∫ d^{D+1} p / (2π)^{D+1} exp(-i p·dx) G(p) / (p̄² - m² + iε)`.
///
/// The energy integral is done first, folding the integrand symmetrically
/// about each pole `±ω` so the principal part cancels; the spatial momenta
/// are integrated outside it.
pub fn feynman_propagator_x(
    dx: &Vec4,
    params: &PropagatorParams,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<Complex64>> {
    params.validate()?;
    let dims = params.reduced_dims as usize;
    let pinned = params.testfn.mean_p;
    let (lo, hi) = params.momentum_box(0..1)[0];
    let measure = 1.0 / (2.0 * PI).powi(dims as i32 + 1);
    let inner_err = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);
    let inner_ok = Cell::new(true);
    let inner_fail = Cell::new(None::<Error>);
    let inner_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol * 0.1,
        rel_tol: cfg.rel_tol * 0.1,
        ..*cfg
    };

    let outer = |ps: &[f64]| -> Complex64 {
        let mut p = pinned;
        let mut p_sq = 0.0;
        let mut phase = 0.0;
        for (i, &v) in ps.iter().enumerate() {
            p[i + 1] = v;
            p_sq += v * v;
            phase += v * dx[i + 1];
        }
        let omega_sq = p_sq + params.mass * params.mass;
        let energy = |p0: f64| -> Complex64 {
            let mut q = p;
            q[0] = p0;
            let denom = Complex64::new(p0 * p0 - omega_sq, params.epsilon);
            Complex64::from_polar(params.regulator(&q), phase - p0 * dx[0]) / denom
        };
        match energy_integral(energy, omega_sq.sqrt(), lo, hi, &inner_cfg) {
            Ok(r) => {
                inner_err.set(inner_err.get().max(r.error_estimate));
                inner_evals.set(inner_evals.get() + r.evals);
                inner_ok.set(inner_ok.get() && r.converged);
                r.value
            }
            Err(e) => {
                inner_fail.set(Some(e));
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };

    let bounds = params.momentum_box(1..dims + 1);
    let volume: f64 = bounds.iter().map(|(a, b)| b - a).product();
    let result = integrate_nd(outer, &bounds, cfg);
    if let Some(e) = inner_fail.take() {
        return Err(e);
    }
    let mut result = result?;
    result.error_estimate += inner_err.get() * volume;
    result.evals += inner_evals.get();
    result.converged = result.converged && inner_ok.get();
    Ok(result.scaled(measure))
}

/// `∫_lo^hi g(p0) dp0` for an integrand with near-poles at `±ω`; the windows
/// `ω ± δ` are folded into `∫_0^δ [g(ω+u) + g(ω-u)] du`.
fn energy_integral<F>(g: F, omega: f64, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    let mut windows: Vec<(f64, f64)> = Vec::new();
    for pole in [-omega, omega] {
        let delta = (0.5 * omega).min(pole - lo).min(hi - pole);
        if delta > 0.0 {
            windows.push((pole, delta));
        }
    }
    let mut cuts = vec![lo, hi];
    for &(pole, delta) in &windows {
        cuts.push(pole - delta);
        cuts.push(pole + delta);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let pieces = cuts.len() - 1 + windows.len();
    let sub = QuadratureConfig {
        abs_tol: cfg.abs_tol / pieces as f64,
        max_evals: (cfg.max_evals / pieces).max(1),
        ..*cfg
    };
    let mut total = QuadratureResult::exact(Complex64::new(0.0, 0.0));
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if windows.iter().any(|&(pole, delta)| (mid - pole).abs() < delta) {
            continue;
        }
        total = total.combine(integrate_1d(&g, w[0], w[1], &sub)?);
    }
    for &(pole, delta) in &windows {
        let folded = |u: f64| g(pole + u) + g(pole - u);
        total = total.combine(integrate_1d(folded, 0.0, delta, &sub)?);
    }
    Ok(total)
}

/// Finite-difference Klein-Gordon residual of the 1+1 vacuum fluctuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KleinGordonReport {
    /// `max |(□ + m²) ϑ|` over the interior of the grid.
    pub max_residual: f64,
    /// `max |ϑ|` over the grid.
    pub max_value: f64,
    pub converged: bool,
}

impl KleinGordonReport {
    pub fn relative(&self) -> f64 {
        self.max_residual / self.max_value
    }
}

/// Evaluate `ϑ(t, x; 0, 0)` on an `n × n` grid of step `h` centred at
/// `(t0, x0)` and apply the fourth-order five-point d'Alembertian at the
/// interior nodes. Requires the reduced 1+1 mode.
pub fn klein_gordon_residual(
    params: &PropagatorParams,
    center: (f64, f64),
    h: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<KleinGordonReport> {
    if params.reduced_dims != 1 {
        return Err(Error::InvalidInput("Klein-Gordon check needs reduced_dims = 1".into()));
    }
    if n < 5 || !(h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "grid needs n >= 5 and h > 0, got n={n}, h={h}"
        )));
    }
    let half = (n / 2) as f64;
    let mut grid = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut converged = true;
    let mut max_value = 0.0f64;
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let t = center.0 + (i as f64 - half) * h;
            let x = center.1 + (j as f64 - half) * h;
            let r = vacuum_fluctuation(&[t, x, 0.0, 0.0], &[0.0; 4], params, cfg)?;
            converged &= r.converged;
            max_value = max_value.max(r.value.norm());
            *cell = r.value;
        }
    }
    let d2 = |f: [Complex64; 5]| (-f[0] + f[1] * 16.0 - f[2] * 30.0 + f[3] * 16.0 - f[4]) / (12.0 * h * h);
    let m_sq = params.mass * params.mass;
    let mut max_residual = 0.0f64;
    for i in 2..n - 2 {
        for j in 2..n - 2 {
            let dtt = d2(std::array::from_fn(|k| grid[i + k - 2][j]));
            let dxx = d2(std::array::from_fn(|k| grid[i][j + k - 2]));
            max_residual = max_residual.max((dtt - dxx + grid[i][j] * m_sq).norm());
        }
    }
    Ok(KleinGordonReport {
        max_residual,
        max_value,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Scheme;
    use crate::testfn::DispersionTensors;
    use proptest::prelude::*;

    fn ground(b: Vec4, mean_p: Vec4) -> TestFunctionParams {
        TestFunctionParams::ground([0.0; 4], mean_p, DispersionTensors::from_momentum_diagonal(b).unwrap())
    }

    fn params(mass: f64, eps: f64, b: Vec4, dims: u8) -> PropagatorParams {
        PropagatorParams::new(mass, eps, ground(b, [0.0; 4]), dims).unwrap()
    }

    #[test]
    fn momentum_space_at_mean() {
        let p = params(1.0, 1e-6, [0.5; 4], 3);
        let v = feynman_propagator_p(&FourMomentum::default(), &p);
        let expected = Complex64::new(-1.0, 1e-6).inv() / (PI * PI);
        assert!((v - expected).norm() < 1e-15 * expected.norm());
    }

    #[test]
    fn momentum_space_gaussian_decay() {
        let p = params(1.0, 1e-6, [0.5; 4], 3);
        let far = feynman_propagator_p(&FourMomentum::new(0.0, 30.0, 0.0, 0.0), &p);
        assert!(far.norm() < 1e-300);
    }

    #[test]
    fn broad_dispersion_limit() {
        // A -> 0: the Gaussian factor tends to 1 over any fixed momentum range
        let q = FourMomentum::new(0.7, 0.2, -0.4, 0.1);
        for b in [1e2, 1e4, 1e6] {
            let p = params(1.0, 1e-6, [b; 4], 3);
            let bare = Complex64::new(q.minkowski_square() - 1.0, 1e-6).inv();
            let ratio = feynman_propagator_p(&q, &p) / bare;
            let norm = p.normalization();
            assert!((ratio.re / norm - 1.0).abs() < 2.0 / b, "{b}: {ratio}");
        }
    }

    #[test]
    fn hermite_ground_order_matches() {
        let disp = DispersionTensors::from_momentum_diagonal([0.5, 0.7, 0.4, 0.9]).unwrap();
        let tf = TestFunctionParams::new([0; 4], [0.0; 4], [0.2, 0.0, 0.1, 0.0], disp).unwrap();
        let p = PropagatorParams::new(1.0, 1e-6, tf, 3).unwrap();
        let q = FourMomentum::new(0.5, 0.1, -0.2, 0.3);
        let plain = params(1.0, 1e-6, [0.5, 0.7, 0.4, 0.9], 3);
        let plain = PropagatorParams {
            testfn: TestFunctionParams {
                mean_p: [0.2, 0.0, 0.1, 0.0],
                ..plain.testfn
            },
            ..plain
        };
        assert_eq!(feynman_propagator_p(&q, &p), feynman_propagator_p(&q, &plain));
    }

    proptest! {
        #[test]
        fn denominator_identity(p in prop::array::uniform4(-3.0f64..3.0), eps in 1e-8f64..1e-2) {
            let pp = params(1.3, eps, [0.6, 0.8, 1.0, 1.2], 3);
            let q = FourMomentum(p);
            let lhs = feynman_propagator_p(&q, &pp) * Complex64::new(q.minkowski_square() - 1.69, eps);
            let rhs = pp.regulator(&p);
            prop_assert!((lhs.re - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
            prop_assert!(lhs.im.abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn translation_invariance(c in prop::array::uniform4(-2.0f64..2.0)) {
            let pp = params(1.0, 1e-6, [0.5; 4], 1);
            let cfg = QuadratureConfig::default().scheme(Scheme::TensorProduct).points(64);
            let x = [0.3, 0.4, 0.0, 0.0];
            let y = [0.1, -0.2, 0.0, 0.0];
            let shift = |v: &Vec4| -> Vec4 { std::array::from_fn(|i| v[i] + c[i]) };
            let a = vacuum_fluctuation(&x, &y, &pp, &cfg).unwrap().value;
            let b = vacuum_fluctuation(&shift(&x), &shift(&y), &pp, &cfg).unwrap().value;
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn vacuum_coincident_points_positive() {
        let cfg = QuadratureConfig::with_tolerances(1e-15, 1e-7);
        for dims in [1u8, 3] {
            let pp = params(1.0, 1e-6, [0.5; 4], dims);
            let r = vacuum_fluctuation(&[0.2; 4], &[0.2; 4], &pp, &cfg).unwrap();
            assert!(r.converged, "{dims}: {r:?}");
            assert!(r.value.re > 0.0 && r.value.im.abs() < 1e-15, "{r:?}");
            let fine = vacuum_fluctuation(
                &[0.0; 4],
                &[0.0; 4],
                &pp,
                &QuadratureConfig::with_tolerances(1e-16, 1e-9),
            )
            .unwrap();
            assert!((fine.value - r.value).norm() < 1e-6 * r.value.norm());
        }
    }

    #[test]
    fn vacuum_decreases_with_mass() {
        let cfg = QuadratureConfig::default();
        let mut prev = f64::INFINITY;
        for m in [0.5, 1.0, 2.0] {
            let pp = params(m, 1e-6, [0.5; 4], 3);
            let v = vacuum_fluctuation(&[0.0; 4], &[0.0; 4], &pp, &cfg)
                .unwrap()
                .value
                .norm();
            assert!(v < prev, "mass {m}: {v} >= {prev}");
            prev = v;
        }
    }

    #[test]
    fn klein_gordon_small_residual() {
        let pp = params(1.0, 1e-6, [0.5; 4], 1);
        let cfg = QuadratureConfig::default().scheme(Scheme::TensorProduct).points(96);
        let report = klein_gordon_residual(&pp, (0.3, -0.2), 0.01, 9, &cfg).unwrap();
        assert!(report.relative() < 1e-3, "{report:?}");
    }

    #[test]
    fn configuration_space_epsilon_stability() {
        let pp = params(1.0, 1e-3, [0.5; 4], 1);
        let cfg = QuadratureConfig::with_tolerances(1e-9, 1e-7);
        let a = feynman_propagator_x(&[0.0; 4], &pp, &cfg).unwrap();
        let half = PropagatorParams { epsilon: 5e-4, ..pp };
        let b = feynman_propagator_x(&[0.0; 4], &half, &cfg).unwrap();
        assert!(a.value.re.is_finite() && a.value.im.is_finite());
        assert!((a.value - b.value).norm() < 0.01 * a.value.norm(), "{a:?} vs {b:?}");
    }

    #[test]
    fn configuration_space_reflection() {
        let pp = params(1.0, 1e-3, [0.5; 4], 1);
        let cfg = QuadratureConfig::with_tolerances(1e-9, 1e-7);
        let dx = [0.4, 0.7, 0.0, 0.0];
        let a = feynman_propagator_x(&dx, &pp, &cfg).unwrap();
        let b = feynman_propagator_x(&dx.map(|v| -v), &pp, &cfg).unwrap();
        assert!((a.value - b.value).norm() < 1e-6 * a.value.norm(), "{a:?} vs {b:?}");
    }

    #[test]
    fn energy_fold_matches_closed_form() {
        // ∫ dp0 / (p0² - ω² + iε) over [-L, L] for small ε: -iπ/ω + ln((L-ω)/(L+ω))/ω
        let omega = 1.5f64;
        let eps = 1e-6;
        let l = 10.0;
        let cfg = QuadratureConfig::with_tolerances(1e-12, 1e-10);
        let r = energy_integral(
            |p0| Complex64::new(p0 * p0 - omega * omega, eps).inv(),
            omega,
            -l,
            l,
            &cfg,
        )
        .unwrap();
        let expected = Complex64::new(((l - omega) / (l + omega)).ln() / omega, -PI / omega);
        assert!((r.value - expected).norm() < 1e-5, "{r:?} vs {expected}");
    }

    #[test]
    fn rejects_bad_params() {
        let tf = ground([0.5; 4], [0.0; 4]);
        assert!(PropagatorParams::new(0.0, 1e-6, tf, 3).is_err());
        assert!(PropagatorParams::new(1.0, 0.0, tf, 3).is_err());
        assert!(PropagatorParams::new(1.0, 1e-6, tf, 2).is_err());
        assert!(PropagatorParams::with_default_epsilon(2.0, tf).unwrap().epsilon == 4e-6);
    }
}
