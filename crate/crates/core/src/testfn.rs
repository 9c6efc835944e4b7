//! Harmonic Hermite-Gaussian test functions in 3+1 dimensions.
//!
//! The ground state is
//!
//! ```text
//! g0(x)  = N_x exp(-B_{mu nu} (x-X)^mu (x-X)^nu - i P_mu x^mu)
//! g~0(p) = N_p exp(-A^{mu nu} (p-P)_mu (p-P)_nu + i X^mu (p-P)_mu)
//! ```
//!
//! with `A B = I/4`, `N_x = 1/sqrt((2 pi)^2 sqrt(det A))` and likewise for `N_p`.
//! Contractions `P_mu x^mu` are plain component sums; the Minkowski metric only
//! enters through [`FourMomentum::minkowski_square`].
//!
//! Excited states (`n != 0`) are defined for diagonal dispersions only: each axis
//! carries a normalized Hermite factor `H_n(z)/sqrt(2^n n!)` with
//! `z = (x-X)/sqrt(2 A)` in position space and `z = (p-P)/sqrt(2 B)` in momentum
//! space.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_nd, QuadratureConfig, QuadratureResult, Scheme, VecN};

pub type Vec4 = [f64; 4];

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite(n: u32, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `H_n(z) / sqrt(2^n n!)`
pub fn hermite_normalized(n: u32, z: f64) -> f64 {
    let mut norm = 1.0;
    for k in 1..=n {
        norm *= 2.0 * k as f64;
    }
    hermite(n, z) / norm.sqrt()
}

/// Position and momentum dispersion tensors with `a b = I/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionTensors {
    a: Matrix4<f64>,
    b: Matrix4<f64>,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Build the dispersion pair from the position dispersion; `b = a^{-1} / 4`.
pub fn dispersion_from_a(a: Matrix4<f64>) -> Result<DispersionTensors> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            let diff = (a[(i, j)] - a[(j, i)]).abs();
            if !(diff <= SYMMETRY_TOL * (1.0 + a[(i, j)].abs())) {
                return Err(Error::NotSymmetric { row: i, col: j, diff });
            }
        }
    }
    let eig = SymmetricEigen::new(a);
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::NotPositiveDefinite { eigenvalue: bad });
    }
    // inverse through the eigendecomposition keeps b exactly symmetric
    let inv_diag = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| 0.25 / l));
    let mut b = eig.eigenvectors * inv_diag * eig.eigenvectors.transpose();
    b = (b + b.transpose()) * 0.5;
    if a.is_diagonal(0.0) {
        b = Matrix4::from_diagonal(&a.diagonal().map(|v| 0.25 / v));
    }
    Ok(DispersionTensors { a, b })
}

trait IsDiagonal {
    fn is_diagonal(&self, tol: f64) -> bool;
}

impl IsDiagonal for Matrix4<f64> {
    fn is_diagonal(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || self[(i, j)].abs() <= tol))
    }
}

impl DispersionTensors {
    pub fn diagonal(a: Vec4) -> Result<Self> {
        dispersion_from_a(Matrix4::from_diagonal(&a.into()))
    }

    /// All four axes share the position dispersion `a`.
    pub fn isotropic(a: f64) -> Result<Self> {
        Self::diagonal([a; 4])
    }

    /// Diagonal pair specified through the momentum dispersion.
    pub fn from_momentum_diagonal(b: Vec4) -> Result<Self> {
        if let Some(&bad) = b.iter().find(|&&v| !(v > 0.0)) {
            return Err(Error::NotPositiveDefinite { eigenvalue: bad });
        }
        let a = Matrix4::from_diagonal(&b.map(|v| 0.25 / v).into());
        let b = Matrix4::from_diagonal(&b.into());
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Matrix4<f64> {
        &self.a
    }

    pub fn b(&self) -> &Matrix4<f64> {
        &self.b
    }

    pub fn is_diagonal(&self) -> bool {
        self.a.is_diagonal(0.0)
    }

    /// Max-norm of `a b - I/4`.
    pub fn uncertainty_residual(&self) -> f64 {
        (self.a * self.b - Matrix4::identity() * 0.25).amax()
    }

    fn sqrt_det_a(&self) -> f64 {
        self.a.determinant().sqrt()
    }

    fn sqrt_det_b(&self) -> f64 {
        self.b.determinant().sqrt()
    }

    /// `prod_mu sqrt(B_mu mu)` restricted to the first `axes` axes.
    pub(crate) fn sqrt_b_product(&self, axes: usize) -> f64 {
        (0..axes).map(|i| self.b[(i, i)].sqrt()).product()
    }
}

/// Minkowski four-vector with signature (+,-,-,-).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourMomentum(pub Vec4);

impl FourMomentum {
    pub fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Self {
        Self([p0, p1, p2, p3])
    }

    pub fn minkowski_square(&self) -> f64 {
        let p = &self.0;
        p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3]
    }

    /// Square of the Wick-rotated vector, all components treated as Euclidean.
    pub fn euclidean_square(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn components(&self) -> &Vec4 {
        &self.0
    }
}

impl std::ops::Add for FourMomentum {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl std::ops::Sub for FourMomentum {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl std::ops::Neg for FourMomentum {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|v| -v))
    }
}

impl std::ops::Mul<f64> for FourMomentum {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|v| v * rhs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionParams {
    pub n: [u32; 4],
    pub mean_x: Vec4,
    pub mean_p: Vec4,
    pub disp: DispersionTensors,
    pub diagonal_only: bool,
}

impl TestFunctionParams {
    pub fn new(n: [u32; 4], mean_x: Vec4, mean_p: Vec4, disp: DispersionTensors) -> Result<Self> {
        let params = Self {
            n,
            mean_x,
            mean_p,
            disp,
            diagonal_only: disp.is_diagonal(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn ground(mean_x: Vec4, mean_p: Vec4, disp: DispersionTensors) -> Self {
        Self {
            n: [0; 4],
            mean_x,
            mean_p,
            disp,
            diagonal_only: disp.is_diagonal(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_excited() && !self.diagonal_only {
            return Err(Error::InvalidInput(
                "Hermite orders n != 0 require uncorrelated (diagonal) dispersions".into(),
            ));
        }
        if self.diagonal_only && !self.disp.is_diagonal() {
            return Err(Error::InvalidInput(
                "diagonal_only set for a correlated dispersion".into(),
            ));
        }
        Ok(())
    }

    pub fn is_excited(&self) -> bool {
        self.n.iter().any(|&k| k > 0)
    }

    pub fn total_order(&self) -> u32 {
        self.n.iter().sum()
    }
}

fn quad_form(m: &Matrix4<f64>, v: &Vec4) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += m[(i, j)] * v[i] * v[j];
        }
    }
    acc
}

fn dot(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn diff(a: &Vec4, b: &Vec4) -> Vec4 {
    std::array::from_fn(|i| a[i] - b[i])
}

/// Ground-state test function in position space.
pub fn eval_g0_x(params: &TestFunctionParams, x: &Vec4) -> Complex64 {
    let d = diff(x, &params.mean_x);
    let norm = 1.0 / (4.0 * PI * PI * params.disp.sqrt_det_a()).sqrt();
    let exponent = Complex64::new(-quad_form(params.disp.b(), &d), -dot(&params.mean_p, x));
    exponent.exp() * norm
}

/// Ground-state test function in momentum space.
pub fn eval_g0_p(params: &TestFunctionParams, p: &Vec4) -> Complex64 {
    let d = diff(p, &params.mean_p);
    let norm = 1.0 / (4.0 * PI * PI * params.disp.sqrt_det_b()).sqrt();
    let exponent = Complex64::new(-quad_form(params.disp.a(), &d), dot(&params.mean_x, &d));
    exponent.exp() * norm
}

/// `prod_mu H_{n^mu}(z_mu)/sqrt(2^n n!)` with `z_mu = (v - mean)/sqrt(2 s_mu mu)`.
pub(crate) fn hermite_product(n: &[u32; 4], v: &Vec4, mean: &Vec4, spread: &Matrix4<f64>, axes: usize) -> f64 {
    (0..axes)
        .filter(|&i| n[i] > 0)
        .map(|i| hermite_normalized(n[i], (v[i] - mean[i]) / (2.0 * spread[(i, i)]).sqrt()))
        .product()
}

pub fn eval_gn_x(params: &TestFunctionParams, x: &Vec4) -> Result<Complex64> {
    params.validate()?;
    let poly = hermite_product(&params.n, x, &params.mean_x, params.disp.a(), 4);
    Ok(eval_g0_x(params, x) * poly)
}

pub fn eval_gn_p(params: &TestFunctionParams, p: &Vec4) -> Result<Complex64> {
    params.validate()?;
    let poly = hermite_product(&params.n, p, &params.mean_p, params.disp.b(), 4);
    Ok(eval_g0_p(params, p) * poly)
}

/// Moments of `|g_n|^2` and `|g~_n|^2` against their expected values.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub norm_x: f64,
    pub norm_p: f64,
    pub mean_x: Vec4,
    pub mean_p: Vec4,
    /// Second central moments in position space (`A^{mu nu}` for the ground state).
    pub disp_x: Matrix4<f64>,
    /// Second central moments in momentum space (`B_{mu nu}` for the ground state).
    pub disp_p: Matrix4<f64>,
    pub norm_residual: f64,
    pub mean_residuals: [f64; 2],
    pub dispersion_residuals: [f64; 2],
    pub error_estimate: f64,
    pub evals: usize,
    pub converged: bool,
}

impl MomentReport {
    pub fn max_residual(&self) -> f64 {
        self.norm_residual
            .max(self.mean_residuals[0])
            .max(self.mean_residuals[1])
            .max(self.dispersion_residuals[0])
            .max(self.dispersion_residuals[1])
    }
}

/// Integrate the normalization, first and second moments of the test function
/// in both spaces on a `mean ± 8 sigma` box. The adaptive scheme is served by
/// a tensor Gauss-Hermite rule.
///
/// Excited states have variance `(2n+1) A` per axis; those are the expected
/// values used for `n != 0`. Quadrature failure is reported, never fatal.
pub fn check_moments(params: &TestFunctionParams, cfg: &QuadratureConfig) -> Result<MomentReport> {
    params.validate()?;
    let x_side = moments_in(params, Space::Position, cfg)?;
    let p_side = moments_in(params, Space::Momentum, cfg)?;

    let expected = |m: &Matrix4<f64>| -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| {
            if i == j {
                (2.0 * params.n[i] as f64 + 1.0) * m[(i, i)]
            } else {
                m[(i, j)]
            }
        })
    };
    let mean_res = |got: &Vec4, want: &Vec4| got.iter().zip(want).fold(0.0f64, |m, (g, w)| m.max((g - w).abs()));
    let exp_a = expected(params.disp.a());
    let exp_b = expected(params.disp.b());

    Ok(MomentReport {
        norm_x: x_side.norm,
        norm_p: p_side.norm,
        mean_x: x_side.mean,
        mean_p: p_side.mean,
        disp_x: x_side.second,
        disp_p: p_side.second,
        norm_residual: (x_side.norm - 1.0).abs().max((p_side.norm - 1.0).abs()),
        mean_residuals: [
            mean_res(&x_side.mean, &params.mean_x),
            mean_res(&p_side.mean, &params.mean_p),
        ],
        dispersion_residuals: [(x_side.second - exp_a).amax(), (p_side.second - exp_b).amax()],
        error_estimate: x_side.result.error_estimate.max(p_side.result.error_estimate),
        evals: x_side.result.evals + p_side.result.evals,
        converged: x_side.result.converged && p_side.result.converged,
    })
}

#[derive(Clone, Copy)]
enum Space {
    Position,
    Momentum,
}

struct Moments {
    norm: f64,
    mean: Vec4,
    second: Matrix4<f64>,
    result: QuadratureResult<VecN<15>>,
}

fn moments_in(params: &TestFunctionParams, space: Space, cfg: &QuadratureConfig) -> Result<Moments> {
    let (center, spread) = match space {
        Space::Position => (params.mean_x, params.disp.a()),
        Space::Momentum => (params.mean_p, params.disp.b()),
    };
    // The Gauss-Hermite rule reads the box as a ±8 sigma window whose weight
    // matches the ground-state density exactly; Legendre boxes are widened for
    // the spread of excited states.
    let cfg = match cfg.scheme {
        Scheme::AdaptiveInterpolatory => QuadratureConfig {
            scheme: Scheme::GaussianWeighted,
            points: 16 + params.n.iter().max().copied().unwrap_or(0) as usize,
            ..*cfg
        },
        _ => *cfg,
    };
    let bounds: Vec<(f64, f64)> = (0..4)
        .map(|i| {
            let widen = match cfg.scheme {
                Scheme::GaussianWeighted => 1.0,
                _ => 2.0 * params.n[i] as f64 + 1.0,
            };
            let half = 8.0 * (widen * spread[(i, i)]).sqrt();
            (center[i] - half, center[i] + half)
        })
        .collect();
    let density = |v: &Vec4| -> f64 {
        let g = match space {
            Space::Position => eval_g0_x(params, v) * hermite_product(&params.n, v, &params.mean_x, params.disp.a(), 4),
            Space::Momentum => eval_g0_p(params, v) * hermite_product(&params.n, v, &params.mean_p, params.disp.b(), 4),
        };
        g.norm_sqr()
    };
    // [norm, v_mu (4), (v-c)_mu (v-c)_nu for mu <= nu (10)]
    let integrand = |v: &[f64]| -> VecN<15> {
        let v4: Vec4 = [v[0], v[1], v[2], v[3]];
        let w = density(&v4);
        let mut out = [0.0; 15];
        out[0] = w;
        for i in 0..4 {
            out[1 + i] = w * v4[i];
        }
        let mut k = 5;
        for i in 0..4 {
            for j in i..4 {
                out[k] = w * (v4[i] - center[i]) * (v4[j] - center[j]);
                k += 1;
            }
        }
        VecN(out)
    };
    let result = integrate_nd(integrand, &bounds, &cfg)?;
    let r = result.value.0;
    let mut second = Matrix4::zeros();
    let mut k = 5;
    for i in 0..4 {
        for j in i..4 {
            second[(i, j)] = r[k];
            second[(j, i)] = r[k];
            k += 1;
        }
    }
    Ok(Moments {
        norm: r[0],
        mean: [r[1], r[2], r[3], r[4]],
        second,
        result,
    })
}

/// Numerical Fourier transform `(2 pi)^{-2} ∫ g(y) exp(+i p_mu y^mu) d^4y` of
/// the ground state over its `mean ± 8 sigma` box.
///
/// With the phase convention of `g0` (`exp(-i P x)`) this kernel sign maps
/// `g0` onto `g~0`.
pub fn fourier_transform_g0(
    params: &TestFunctionParams,
    p: &Vec4,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<Complex64>> {
    let a = params.disp.a();
    let bounds: Vec<(f64, f64)> = (0..4)
        .map(|i| {
            let half = 8.0 * a[(i, i)].sqrt();
            (params.mean_x[i] - half, params.mean_x[i] + half)
        })
        .collect();
    let integrand = |y: &[f64]| {
        let y4 = [y[0], y[1], y[2], y[3]];
        eval_g0_x(params, &y4) * Complex64::new(0.0, dot(p, &y4)).exp()
    };
    let r = integrate_nd(integrand, &bounds, cfg)?;
    Ok(r.scaled(1.0 / (4.0 * PI * PI)))
}
