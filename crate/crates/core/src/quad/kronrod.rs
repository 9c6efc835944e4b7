use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{QuadValue, QuadratureConfig, QuadratureResult};
use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half) and weights; the 7-point Gauss
// rule uses every other abscissa.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const EVALS_PER_RULE: usize = 15;

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
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

pub(super) fn gk15<T, F>(f: &F, a: f64, b: f64) -> Result<(T, f64)>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<T> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { abscissa: x })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut samples = [(T::zero(), T::zero()); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
        *sample = (f1, f2);
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        res_asc += WGK[j] * ((*f1 - mean).norm() + (*f2 - mean).norm());
    }

    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

/// Globally adaptive bisection driven by the largest local error.
pub(super) fn adaptive<T, F>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let (v0, e0) = gk15(f, a, b)?;
    let mut segments = vec![Segment {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let mut heap = BinaryHeap::new();
    heap.push(Key { error: e0, index: 0 });
    let mut evals = EVALS_PER_RULE;
    let mut total = v0;
    let mut total_err = e0;
    let min_width = (b - a).abs() * 1e-14;

    let converged = loop {
        if total_err <= cfg.target(total.norm()) {
            break true;
        }
        if evals + 2 * EVALS_PER_RULE > cfg.max_evals {
            break false;
        }
        let Some(Key { index, .. }) = heap.pop() else {
            // every remaining segment is at the resolution limit
            break false;
        };
        let (sa, sb) = (segments[index].a, segments[index].b);
        let mid = 0.5 * (sa + sb);
        if (sb - sa) <= min_width || mid <= sa || mid >= sb {
            continue;
        }
        let (vl, el) = gk15(f, sa, mid)?;
        let (vr, er) = gk15(f, mid, sb)?;
        evals += 2 * EVALS_PER_RULE;

        let old = &segments[index];
        total = total - old.value + vl + vr;
        total_err += el + er - old.error;

        segments[index] = Segment {
            a: sa,
            b: mid,
            value: vl,
            error: el,
        };
        heap.push(Key { error: el, index });
        segments.push(Segment {
            a: mid,
            b: sb,
            value: vr,
            error: er,
        });
        heap.push(Key {
            error: er,
            index: segments.len() - 1,
        });
    };

    // re-sum in a fixed order so the result does not depend on update history
    let mut value = T::zero();
    let mut error = 0.0;
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&i, &j| segments[i].a.total_cmp(&segments[j].a));
    for i in order {
        value = value + segments[i].value;
        error += segments[i].error;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evals,
        converged: converged && error <= cfg.target(value.norm()),
    })
}
