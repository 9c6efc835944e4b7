use crate::error::{Error, Result};

const MAX_ORDER: u32 = 5;
const SHRINK: f64 = 1.4;
const TABLE: usize = 12;

/// `order`-th derivative of `f` at `x` by central differences with Richardson
/// (Ridders) extrapolation. `step` is the initial step; `None` picks one from `x`.
pub fn derivative<F>(f: F, x: f64, order: u32, step: Option<f64>) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    derivative_estimate(f, x, order, step).map(|(v, _)| v)
}

/// Like [`derivative`], also returning the extrapolation error estimate.
pub fn derivative_estimate<F>(f: F, x: f64, order: u32, step: Option<f64>) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if order > MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "derivative order {order} exceeds {MAX_ORDER}"
        )));
    }
    if order == 0 {
        let v = f(x);
        return if v.is_finite() {
            Ok((v, 0.0))
        } else {
            Err(Error::NonFinite { abscissa: x })
        };
    }
    let h0 = step.unwrap_or_else(|| 0.2 * x.abs().max(1.0) * (1.0 + 0.2 * order as f64));
    if !(h0 > 0.0) || !h0.is_finite() {
        return Err(Error::InvalidInput(format!(
            "derivative step must be positive, got {h0}"
        )));
    }

    let weights = stencil(order);
    let central = |h: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (j, w) in weights.iter().enumerate() {
            let xj = x + (order as f64 / 2.0 - j as f64) * h;
            let v = f(xj);
            if !v.is_finite() {
                return Err(Error::NonFinite { abscissa: xj });
            }
            acc += w * v;
        }
        Ok(acc / h.powi(order as i32))
    };

    // Neville tableau in h^2
    let mut table = [[0.0f64; TABLE]; TABLE];
    let mut h = h0;
    table[0][0] = central(h)?;
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    let ratio2 = SHRINK * SHRINK;
    for i in 1..TABLE {
        h /= SHRINK;
        table[0][i] = central(h)?;
        let mut fac = ratio2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= ratio2;
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    Ok((best, err))
}

/// Signed binomial weights of the n-th central difference.
fn stencil(order: u32) -> Vec<f64> {
    let n = order as usize;
    let mut w = vec![0.0; n + 1];
    let mut binom = 1.0;
    for (j, wj) in w.iter_mut().enumerate() {
        *wj = if j % 2 == 0 { binom } else { -binom };
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    w
}
