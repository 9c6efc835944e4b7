#![allow(dead_code)]

use std::f64::consts::{E, PI};

use gaussreg::quad::{integrate_1d, integrate_log_axis, integrate_nd, integrate_radial4, QuadratureConfig};

/// Outcome of one known-answer integral.
pub struct KnownAnswer {
    pub name: &'static str,
    pub abs_error: f64,
    pub estimate: f64,
    pub converged: bool,
}

impl KnownAnswer {
    pub fn honest(&self) -> bool {
        self.abs_error <= 3.0 * self.estimate
    }
}

fn case(name: &'static str, r: gaussreg::Result<gaussreg::QuadratureResult<f64>>, truth: f64) -> KnownAnswer {
    match r {
        Ok(r) => KnownAnswer {
            name,
            abs_error: (r.value - truth).abs(),
            estimate: r.error_estimate,
            converged: r.converged,
        },
        Err(_) => KnownAnswer {
            name,
            abs_error: f64::INFINITY,
            estimate: 0.0,
            converged: false,
        },
    }
}

/// Twenty integrals with closed-form values, spread over the 1-D, radial,
/// log-axis and box integrators.
pub fn known_answer_suite() -> Vec<KnownAnswer> {
    let cfg = QuadratureConfig::default();
    let inf = f64::INFINITY;
    vec![
        case(
            "x^5 on [0,1]",
            integrate_1d(|x: f64| x.powi(5), 0.0, 1.0, &cfg),
            1.0 / 6.0,
        ),
        case("sin on [0,pi]", integrate_1d(f64::sin, 0.0, PI, &cfg), 2.0),
        case("sqrt on [0,1]", integrate_1d(f64::sqrt, 0.0, 1.0, &cfg), 2.0 / 3.0),
        case("ln on [0,1]", integrate_1d(f64::ln, 0.0, 1.0, &cfg), -1.0),
        case(
            "x^-1/2 on [0,1]",
            integrate_1d(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &cfg),
            2.0,
        ),
        case(
            "gaussian on R",
            integrate_1d(|x: f64| (-x * x).exp(), -inf, inf, &cfg),
            PI.sqrt(),
        ),
        case(
            "exp(-x) on [0,inf)",
            integrate_1d(|x: f64| (-x).exp(), 0.0, inf, &cfg),
            1.0,
        ),
        case(
            "lorentzian on [0,inf)",
            integrate_1d(|x: f64| 1.0 / (1.0 + x * x), 0.0, inf, &cfg),
            PI / 2.0,
        ),
        case(
            "x^2 gaussian on [0,inf)",
            integrate_1d(|x: f64| x * x * (-x * x).exp(), 0.0, inf, &cfg),
            PI.sqrt() / 4.0,
        ),
        case(
            "4/(1+x^2) on [0,1]",
            integrate_1d(|x: f64| 4.0 / (1.0 + x * x), 0.0, 1.0, &cfg),
            PI,
        ),
        case(
            "cos^2(5x) on [0,2pi]",
            integrate_1d(|x: f64| (5.0 * x).cos().powi(2), 0.0, 2.0 * PI, &cfg),
            PI,
        ),
        case("|x| on [-1,1]", integrate_1d(|x: f64| x.abs(), -1.0, 1.0, &cfg), 1.0),
        case(
            "damped sine on [0,10]",
            integrate_1d(|x: f64| (-x).exp() * (3.0 * x).sin(), 0.0, 10.0, &cfg),
            (3.0 - (-10.0f64).exp() * (30.0f64.sin() + 3.0 * 30.0f64.cos())) / 10.0,
        ),
        case("radial gaussian", integrate_radial4(|k| (-k * k).exp(), &cfg), PI * PI),
        case(
            "radial (1+k^2)^-4",
            integrate_radial4(|k| (1.0 + k * k).powi(-4), &cfg),
            PI * PI / 6.0,
        ),
        case(
            "exp(x+y) on unit square",
            integrate_nd(|x: &[f64]| (x[0] + x[1]).exp(), &[(0.0, 1.0); 2], &cfg),
            (E - 1.0).powi(2),
        ),
        case(
            "x^2+y^2+z^2 on unit cube",
            integrate_nd(|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>(), &[(0.0, 1.0); 3], &cfg),
            1.0,
        ),
        case(
            "4-D gaussian on [-5,5]^4",
            integrate_nd(
                |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp(),
                &[(-5.0, 5.0); 4],
                &QuadratureConfig::with_tolerances(1e-10, 1e-6),
            ),
            // erfc(5) = 1.5374597944280349e-12
            PI * PI * (1.0 - 1.537_459_794_428_035e-12f64).powi(4),
        ),
        case(
            "(1+X)^-2 on log axis",
            integrate_log_axis(|x| (1.0 + x).powi(-2), inf, &[1.0], &cfg),
            1.0,
        ),
        case(
            "(1+X)^-1 to 100 on log axis",
            integrate_log_axis(|x| 1.0 / (1.0 + x), 100.0, &[1.0], &cfg),
            101f64.ln(),
        ),
    ]
}
