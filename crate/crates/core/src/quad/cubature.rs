use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::{gauss_hermite, gauss_legendre};
use super::{QuadValue, QuadratureConfig, QuadratureResult};
use crate::error::{Error, Result};

/// Genz-Malik degree-7 rule with an embedded degree-5 rule, adaptive bisection
/// along the axis with the largest fourth divided difference.
pub(super) fn genz_malik<T, F>(f: &F, bounds: &[(f64, f64)], cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    let rule = GenzMalik::new(bounds.len());
    let root = Region {
        center: bounds.iter().map(|(a, b)| 0.5 * (a + b)).collect(),
        half: bounds.iter().map(|(a, b)| 0.5 * (b - a)).collect(),
    };
    let first = rule.apply(f, &root)?;
    let mut evals = rule.points;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut regions = vec![(root, first)];
    let mut heap = BinaryHeap::new();
    heap.push(Key {
        error: total_err,
        index: 0,
    });

    let converged = loop {
        if total_err <= cfg.target(total.norm()) {
            break true;
        }
        if evals + 2 * rule.points > cfg.max_evals {
            break false;
        }
        let Some(Key { index, .. }) = heap.pop() else {
            break false;
        };
        let (region, estimate) = &regions[index];
        let axis = estimate.split_axis;
        if region.half[axis] <= 1e-14 * (1.0 + region.center[axis].abs()) {
            continue;
        }
        let mut left = region.clone();
        left.half[axis] *= 0.5;
        let mut right = left.clone();
        left.center[axis] -= left.half[axis];
        right.center[axis] += right.half[axis];
        let old_value = estimate.value;
        let old_error = estimate.error;

        let el = rule.apply(f, &left)?;
        let er = rule.apply(f, &right)?;
        evals += 2 * rule.points;
        total = total - old_value + el.value + er.value;
        total_err += el.error + er.error - old_error;

        heap.push(Key { error: el.error, index });
        regions[index] = (left, el);
        heap.push(Key {
            error: er.error,
            index: regions.len(),
        });
        regions.push((right, er));
    };

    let mut value = T::zero();
    let mut error = 0.0;
    for (_, e) in &regions {
        value = value + e.value;
        error += e.error;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evals,
        converged: converged && error <= cfg.target(value.norm()),
    })
}

#[derive(Clone)]
struct Region {
    center: Vec<f64>,
    half: Vec<f64>,
}

struct Estimate<T> {
    value: T,
    error: f64,
    split_axis: usize,
}

#[derive(PartialEq)]
struct Key {
    error: f64,
    index: usize,
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

struct GenzMalik {
    dim: usize,
    points: usize,
    w: [f64; 5],
    we: [f64; 4],
}

const LAMBDA2: f64 = 0.358_568_582_800_318_1; // sqrt(9/70)
const LAMBDA4: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const LAMBDA5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)

impl GenzMalik {
    fn new(dim: usize) -> Self {
        let n = dim as f64;
        Self {
            dim,
            points: 1 + 4 * dim + 2 * dim * (dim - 1) + (1 << dim),
            w: [
                (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0,
                980.0 / 6561.0,
                (1820.0 - 400.0 * n) / 19683.0,
                200.0 / 19683.0,
                6859.0 / 19683.0 / (1u32 << dim) as f64,
            ],
            we: [
                (729.0 - 950.0 * n + 50.0 * n * n) / 729.0,
                245.0 / 486.0,
                (265.0 - 100.0 * n) / 1458.0,
                25.0 / 729.0,
            ],
        }
    }

    fn apply<T, F>(&self, f: &F, region: &Region) -> Result<Estimate<T>>
    where
        T: QuadValue,
        F: Fn(&[f64]) -> T,
    {
        let d = self.dim;
        let c = &region.center;
        let h = &region.half;
        let mut x = c.clone();
        let eval = |x: &[f64]| -> Result<T> {
            let v = f(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { abscissa: x[0] })
            }
        };

        let f0 = eval(&x)?;
        let mut s2 = T::zero();
        let mut s3 = T::zero();
        let mut split_axis = 0;
        let mut max_diff = -1.0;
        for i in 0..d {
            x[i] = c[i] - LAMBDA2 * h[i];
            let a = eval(&x)?;
            x[i] = c[i] + LAMBDA2 * h[i];
            let b = eval(&x)?;
            x[i] = c[i] - LAMBDA4 * h[i];
            let p = eval(&x)?;
            x[i] = c[i] + LAMBDA4 * h[i];
            let q = eval(&x)?;
            x[i] = c[i];
            s2 = s2 + a + b;
            s3 = s3 + p + q;
            let ratio = (LAMBDA2 / LAMBDA4) * (LAMBDA2 / LAMBDA4);
            let diff = ((a + b - f0 * 2.0) - (p + q - f0 * 2.0) * ratio).norm();
            // ties go to the widest axis
            if diff > max_diff * (1.0 + 1e-10) || (diff >= max_diff * (1.0 - 1e-10) && h[i] > h[split_axis]) {
                max_diff = diff.max(max_diff);
                split_axis = i;
            }
        }

        let mut s4 = T::zero();
        for i in 0..d {
            for j in (i + 1)..d {
                for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    x[i] = c[i] + si * LAMBDA4 * h[i];
                    x[j] = c[j] + sj * LAMBDA4 * h[j];
                    s4 = s4 + eval(&x)?;
                }
                x[i] = c[i];
                x[j] = c[j];
            }
        }

        let mut s5 = T::zero();
        for corner in 0..(1usize << d) {
            for i in 0..d {
                let sign = if corner >> i & 1 == 1 { 1.0 } else { -1.0 };
                x[i] = c[i] + sign * LAMBDA5 * h[i];
            }
            s5 = s5 + eval(&x)?;
        }

        let volume: f64 = h.iter().map(|v| 2.0 * v).product();
        let deg7 = (f0 * self.w[0] + s2 * self.w[1] + s3 * self.w[2] + s4 * self.w[3] + s5 * self.w[4]) * volume;
        let deg5 = (f0 * self.we[0] + s2 * self.we[1] + s3 * self.we[2] + s4 * self.we[3]) * volume;
        Ok(Estimate {
            value: deg7,
            error: (deg7 - deg5).norm(),
            split_axis,
        })
    }
}

/// Tensor-product Gauss-Legendre rule; error from the rule with 3/4 the nodes.
pub(super) fn tensor_legendre<T, F>(f: &F, bounds: &[(f64, f64)], cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    let axes = |n: usize| -> Vec<Vec<(f64, f64)>> {
        let (x, w) = gauss_legendre(n);
        bounds
            .iter()
            .map(|&(a, b)| {
                let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
                x.iter().zip(&w).map(|(x, w)| (c + h * x, h * w)).collect()
            })
            .collect()
    };
    tensor(f, &axes(cfg.points), &axes(coarse_points(cfg.points)), cfg)
}

/// Tensor-product Gauss-Hermite rule. Each axis is a `center ± 8 sigma` window.
pub(super) fn tensor_hermite<T, F>(f: &F, bounds: &[(f64, f64)], cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    let axes = |n: usize| -> Vec<Vec<(f64, f64)>> {
        let (x, w) = gauss_hermite(n);
        bounds
            .iter()
            .map(|&(a, b)| {
                let c = 0.5 * (a + b);
                let width = std::f64::consts::SQRT_2 * (b - a) / 16.0;
                x.iter()
                    .zip(&w)
                    .map(|(x, w)| (c + width * x, width * w * (x * x).exp()))
                    .collect()
            })
            .collect()
    };
    tensor(f, &axes(cfg.points), &axes(coarse_points(cfg.points)), cfg)
}

fn coarse_points(n: usize) -> usize {
    (3 * n / 4).max(1)
}

fn tensor<T, F>(
    f: &F,
    fine: &[Vec<(f64, f64)>],
    coarse: &[Vec<(f64, f64)>],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    let (value, n_fine) = product_sum(f, fine)?;
    let (rough, n_coarse) = product_sum(f, coarse)?;
    let error = (value - rough).norm();
    let evals = n_fine + n_coarse;
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evals,
        converged: evals <= cfg.max_evals && error <= cfg.target(value.norm()),
    })
}

fn product_sum<T, F>(f: &F, axes: &[Vec<(f64, f64)>]) -> Result<(T, usize)>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T,
{
    let d = axes.len();
    let mut idx = vec![0usize; d];
    let mut x: Vec<f64> = axes.iter().map(|a| a[0].0).collect();
    let mut sum = T::zero();
    let mut count = 0;
    loop {
        let mut w = 1.0;
        for (k, axis) in axes.iter().enumerate() {
            let (xk, wk) = axis[idx[k]];
            x[k] = xk;
            w *= wk;
        }
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::NonFinite { abscissa: x[0] });
        }
        sum = sum + v * w;
        count += 1;

        let mut k = d;
        loop {
            if k == 0 {
                return Ok((sum, count));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}
