//! One struct per command. Each holds the `[params]` table of that command,
//! with defaults for every key, and evaluates a single point into rows.

use std::f64::consts::{PI, SQRT_2};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use gaussreg::loops::{
    anomaly_delta_g, anomaly_divergence, anomaly_quadrature, default_cutoff, self_energy, self_energy_derivative,
    self_energy_direct, tadpole_divergent_partial, tadpole_regularized, vertex, ward_takahashi_check, ALPHA_QED,
    DEFAULT_LADDER,
};
use gaussreg::propagator::{feynman_propagator_p, feynman_propagator_x, klein_gordon_residual};
use gaussreg::quad::{QuadratureResult, Scheme};
use gaussreg::testfn::{check_moments, eval_g0_p, fourier_transform_g0};
use gaussreg::tlr::{amplitude, extend_distribution, partition_of_unity, t_integral, RationalKernel, RunningSupport};
use gaussreg::{
    CouplingParams, DispersionTensors, Error, FourMomentum, PropagatorParams, QuadratureConfig, TadpoleParams,
    TestFunctionParams, TlrConfig,
};

use crate::config::{self, CliError, Command};

/// One output line of a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub quantity: String,
    pub abscissa: Option<f64>,
    pub value_re: f64,
    pub value_im: f64,
    pub error_estimate: f64,
    pub evals: usize,
    pub converged: bool,
}

impl Row {
    fn new(quantity: &str, r: &QuadratureResult<f64>) -> Self {
        Self {
            quantity: quantity.to_string(),
            abscissa: None,
            value_re: r.value,
            value_im: 0.0,
            error_estimate: r.error_estimate,
            evals: r.evals,
            converged: r.converged,
        }
    }

    fn exact(quantity: &str, value: f64) -> Self {
        Self::new(quantity, &QuadratureResult::exact(value))
    }

    fn complex(quantity: &str, r: &QuadratureResult<gaussreg::Complex64>) -> Self {
        Self {
            quantity: quantity.to_string(),
            abscissa: None,
            value_re: r.value.re,
            value_im: r.value.im,
            error_estimate: r.error_estimate,
            evals: r.evals,
            converged: r.converged,
        }
    }

    fn at(mut self, abscissa: f64) -> Self {
        self.abscissa = Some(abscissa);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointError {
    /// Parameters rejected before or during evaluation.
    Invalid(String),
    /// Evaluation broke down (non-finite integrand and the like).
    Failed(String),
}

impl From<Error> for PointError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } => PointError::Failed(e.to_string()),
            _ => PointError::Invalid(e.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> PointError {
    PointError::Invalid(msg.into())
}

type Outcome = Result<Vec<Row>, PointError>;

/// Result of one point: the parameters it actually ran with and its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub params: toml::Table,
    pub result: Outcome,
}

trait Scenario: DeserializeOwned + Serialize + Default {
    fn validate(&self) -> Result<(), PointError>;
    fn run(&self) -> Outcome;
}

fn deserialize<S: Scenario>(table: &toml::Table) -> Result<S, String> {
    toml::Value::Table(table.clone())
        .try_into::<S>()
        .map_err(|e| e.to_string().trim_end().to_string())
}

fn resolved<S: Scenario>(p: &S) -> toml::Table {
    toml::Table::try_from(p).expect("parameter structs serialize to a table")
}

fn run_typed<S: Scenario>(table: &toml::Table) -> PointOutcome {
    match deserialize::<S>(table) {
        Ok(p) => PointOutcome {
            params: resolved(&p),
            result: p.validate().and_then(|()| p.run()),
        },
        Err(msg) => PointOutcome {
            params: table.clone(),
            result: Err(PointError::Invalid(msg)),
        },
    }
}

fn resolve_typed<S: Scenario>(table: &toml::Table) -> Result<toml::Table, CliError> {
    let p = deserialize::<S>(table).map_err(CliError::Config)?;
    match p.validate() {
        Ok(()) => Ok(resolved(&p)),
        Err(PointError::Invalid(msg) | PointError::Failed(msg)) => Err(CliError::Config(format!("[params]: {msg}"))),
    }
}

fn knows_key<S: Scenario>(key: &str, value: &toml::Value) -> bool {
    let mut t = toml::Table::new();
    t.insert(key.to_string(), value.clone());
    !matches!(deserialize::<S>(&t), Err(msg) if msg.contains("unknown field"))
}

macro_rules! dispatch {
    ($cmd:expr, $f:ident($($arg:expr),*)) => {
        match $cmd {
            Command::TestfnCheck => $f::<TestfnCheck>($($arg),*),
            Command::PropagatorGrid => $f::<PropagatorGrid>($($arg),*),
            Command::Tadpole => $f::<Tadpole>($($arg),*),
            Command::Anomaly => $f::<Anomaly>($($arg),*),
            Command::SelfEnergy => $f::<SelfEnergy>($($arg),*),
            Command::Vertex => $f::<Vertex>($($arg),*),
            Command::WtCheck => $f::<WtCheck>($($arg),*),
            Command::TlrDemo => $f::<TlrDemo>($($arg),*),
        }
    };
}

/// Type-check the whole document against the command's parameter struct.
pub fn check_document(cmd: Command, text: &str) -> Result<(), CliError> {
    dispatch!(cmd, check_typed_doc(text))
}

fn check_typed_doc<S: Scenario>(text: &str) -> Result<(), CliError> {
    config::check_typed::<S>(text)
}

/// Fill in defaults and range-check; the returned table is the full parameter set.
pub fn resolve(cmd: Command, params: &toml::Table) -> Result<toml::Table, CliError> {
    dispatch!(cmd, resolve_typed(params))
}

/// Whether `key` names a parameter of `cmd`.
pub fn has_param(cmd: Command, key: &str, sample: &toml::Value) -> bool {
    dispatch!(cmd, knows_key(key, sample))
}

pub fn run_point(cmd: Command, params: &toml::Table) -> PointOutcome {
    dispatch!(cmd, run_typed(params))
}

fn quad_cfg(
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    base: QuadratureConfig,
) -> Result<QuadratureConfig, PointError> {
    let cfg = QuadratureConfig {
        abs_tol: abs_tol.unwrap_or(base.abs_tol),
        rel_tol: rel_tol.unwrap_or(base.rel_tol),
        ..base
    };
    cfg.validate()?;
    Ok(cfg)
}

fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        1 => vec![from],
        n => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn finite(name: &str, v: f64) -> Result<(), PointError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

fn finite4(name: &str, v: &[f64; 4]) -> Result<(), PointError> {
    v.iter().try_for_each(|&x| finite(name, x))
}

// ---------------------------------------------------------------- testfn-check

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestfnCheck {
    /// Hermite orders per axis.
    pub n: [u32; 4],
    pub mean_x: [f64; 4],
    pub mean_p: [f64; 4],
    /// Diagonal of the position dispersion `A`.
    pub a: [f64; 4],
    /// Points of the Fourier check along the energy axis, 0 to skip.
    pub fourier_points: usize,
    pub fourier_quad_points: usize,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl Default for TestfnCheck {
    fn default() -> Self {
        Self {
            n: [0; 4],
            mean_x: [0.0; 4],
            mean_p: [0.0; 4],
            a: [1.0; 4],
            fourier_points: 0,
            fourier_quad_points: 32,
            abs_tol: None,
            rel_tol: None,
        }
    }
}

impl TestfnCheck {
    fn params(&self) -> Result<TestFunctionParams, PointError> {
        finite4("mean_x", &self.mean_x)?;
        finite4("mean_p", &self.mean_p)?;
        let disp = DispersionTensors::diagonal(self.a)?;
        Ok(TestFunctionParams::new(self.n, self.mean_x, self.mean_p, disp)?)
    }
}

impl Scenario for TestfnCheck {
    fn validate(&self) -> Result<(), PointError> {
        let params = self.params()?;
        if self.fourier_points > 0 && params.is_excited() {
            return Err(invalid("the Fourier check needs the ground state (n = [0, 0, 0, 0])"));
        }
        if self.fourier_points > 0 && self.fourier_quad_points < 2 {
            return Err(invalid("fourier_quad_points must be >= 2"));
        }
        quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?;
        Ok(())
    }

    fn run(&self) -> Outcome {
        let params = self.params()?;
        let cfg = quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?;
        let report = check_moments(&params, &cfg)?;
        let with_report = |name: &str, value: f64| Row {
            error_estimate: report.error_estimate,
            evals: report.evals,
            converged: report.converged,
            ..Row::exact(name, value)
        };
        let mut rows = vec![
            with_report("norm_x", report.norm_x),
            with_report("norm_p", report.norm_p),
            with_report("norm_residual", report.norm_residual),
            with_report("mean_x_residual", report.mean_residuals[0]),
            with_report("mean_p_residual", report.mean_residuals[1]),
            with_report("dispersion_x_residual", report.dispersion_residuals[0]),
            with_report("dispersion_p_residual", report.dispersion_residuals[1]),
            Row::exact("uncertainty_residual", params.disp.uncertainty_residual()),
        ];
        if self.fourier_points > 0 {
            let ft_cfg = cfg.scheme(Scheme::TensorProduct).points(self.fourier_quad_points);
            let sigma = params.disp.b()[(0, 0)].sqrt();
            for t in grid(-2.0, 2.0, self.fourier_points) {
                let mut p = self.mean_p;
                p[0] += t * sigma;
                let r = fourier_transform_g0(&params, &p, &ft_cfg)?;
                let diff = (r.value - eval_g0_p(&params, &p)).norm();
                rows.push(Row::new("fourier_residual", &r.map(|_| diff)).at(p[0]));
            }
        }
        Ok(rows)
    }
}

// ------------------------------------------------------------- propagator-grid

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    Momentum,
    Position,
    KleinGordon,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagatorGrid {
    pub mass: f64,
    /// Defaults to `1e-6 mass²`.
    pub epsilon: Option<f64>,
    /// Isotropic momentum dispersion `B`.
    pub b: f64,
    pub mean_p: [f64; 4],
    pub n: [u32; 4],
    pub reduced_dims: u8,
    pub space: Space,
    pub axis: usize,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    /// Fixed tensor rule for the position-space integrals; adaptive when unset.
    pub quad_points: Option<usize>,
    pub kg_h: f64,
    pub kg_n: usize,
    pub kg_center: [f64; 2],
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl Default for PropagatorGrid {
    fn default() -> Self {
        Self {
            mass: 1.0,
            epsilon: None,
            b: 0.5,
            mean_p: [0.0; 4],
            n: [0; 4],
            reduced_dims: 3,
            space: Space::Momentum,
            axis: 0,
            from: -2.0,
            to: 2.0,
            points: 11,
            quad_points: None,
            kg_h: 0.01,
            kg_n: 21,
            kg_center: [0.3, -0.2],
            abs_tol: None,
            rel_tol: None,
        }
    }
}

impl PropagatorGrid {
    fn params(&self) -> Result<PropagatorParams, PointError> {
        finite4("mean_p", &self.mean_p)?;
        let disp = DispersionTensors::from_momentum_diagonal([self.b; 4])?;
        let tf = TestFunctionParams::new(self.n, [0.0; 4], self.mean_p, disp)?;
        let eps = self.epsilon.unwrap_or(1e-6 * self.mass * self.mass);
        Ok(PropagatorParams::new(self.mass, eps, tf, self.reduced_dims)?)
    }

    fn cfg(&self) -> Result<QuadratureConfig, PointError> {
        let base = match (self.quad_points, self.space) {
            (Some(n), _) => QuadratureConfig::default().scheme(Scheme::TensorProduct).points(n),
            (None, Space::KleinGordon) => QuadratureConfig::with_tolerances(1e-8, 1e-6)
                .scheme(Scheme::TensorProduct)
                .points(96),
            (None, _) => QuadratureConfig::default(),
        };
        quad_cfg(self.abs_tol, self.rel_tol, base)
    }
}

impl Scenario for PropagatorGrid {
    fn validate(&self) -> Result<(), PointError> {
        let params = self.params()?;
        self.cfg()?;
        match self.space {
            Space::Momentum | Space::Position => {
                if self.axis > params.reduced_dims as usize {
                    return Err(invalid(format!(
                        "axis must be <= {} for reduced_dims = {}, got {}",
                        params.reduced_dims, params.reduced_dims, self.axis
                    )));
                }
                if self.points == 0 {
                    return Err(invalid("points must be >= 1"));
                }
                finite("from", self.from)?;
                finite("to", self.to)?;
            }
            Space::KleinGordon => {
                if params.reduced_dims != 1 {
                    return Err(invalid("space = \"klein-gordon\" needs reduced_dims = 1"));
                }
                if self.kg_n < 5 || !(self.kg_h > 0.0) || !self.kg_h.is_finite() {
                    return Err(invalid(format!(
                        "kg_n must be >= 5 and kg_h > 0, got {} and {}",
                        self.kg_n, self.kg_h
                    )));
                }
            }
        }
        Ok(())
    }

    fn run(&self) -> Outcome {
        let params = self.params()?;
        let cfg = self.cfg()?;
        match self.space {
            Space::Momentum => Ok(grid(self.from, self.to, self.points)
                .into_iter()
                .map(|t| {
                    let mut p = self.mean_p;
                    p[self.axis] += t;
                    let g = feynman_propagator_p(&FourMomentum(p), &params);
                    Row::complex("propagator_p", &QuadratureResult::exact(g)).at(t)
                })
                .collect()),
            Space::Position => grid(self.from, self.to, self.points)
                .into_iter()
                .map(|t| {
                    let mut dx = [0.0; 4];
                    dx[self.axis] = t;
                    let r = feynman_propagator_x(&dx, &params, &cfg)?;
                    Ok(Row::complex("propagator_x", &r).at(t))
                })
                .collect(),
            Space::KleinGordon => {
                let center = (self.kg_center[0], self.kg_center[1]);
                let r = klein_gordon_residual(&params, center, self.kg_h, self.kg_n, &cfg)?;
                let row = |name: &str, v: f64| Row {
                    converged: r.converged,
                    ..Row::exact(name, v)
                };
                Ok(vec![
                    row("kg_max_residual", r.max_residual),
                    row("kg_max_value", r.max_value),
                    row("kg_relative_residual", r.relative()),
                ])
            }
        }
    }
}

// --------------------------------------------------------------------- tadpole

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tadpole {
    pub e: f64,
    pub b: f64,
    pub m: f64,
    /// Also report the sharp-cutoff bracket at this momentum.
    pub k_max: Option<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl Default for Tadpole {
    fn default() -> Self {
        Self {
            e: 1.0,
            b: 1.0,
            m: 1.0,
            k_max: None,
            abs_tol: None,
            rel_tol: None,
        }
    }
}

impl Tadpole {
    fn params(&self) -> Result<TadpoleParams, PointError> {
        finite("e", self.e)?;
        if let Some(k) = self.k_max {
            if !(k > 0.0) || !k.is_finite() {
                return Err(invalid(format!("k_max must be finite and > 0, got {k}")));
            }
        }
        // the photon mass plays no part here
        let c = CouplingParams::new(self.e, self.m, 1e-2);
        Ok(TadpoleParams::new(self.b, c)?)
    }
}

impl Scenario for Tadpole {
    fn validate(&self) -> Result<(), PointError> {
        self.params()?;
        quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?;
        Ok(())
    }

    fn run(&self) -> Outcome {
        let params = self.params()?;
        let cfg = quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?;
        let r = tadpole_regularized(&params, &cfg)?;
        let mut rows = vec![
            Row::new("tadpole", &r),
            Row::exact("massless_limit", self.e * self.e * self.b / (4.0 * PI * PI)),
        ];
        if let Some(k) = self.k_max {
            rows.push(Row::exact(
                "divergent_partial",
                tadpole_divergent_partial(k, self.m, self.e),
            ));
        }
        Ok(rows)
    }
}

// --------------------------------------------------------------------- anomaly

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Anomaly {
    pub b: f64,
    pub e: f64,
    /// `p̄²/(2B)`; sets the scale of both external momenta.
    pub x: f64,
    pub dir1: [f64; 4],
    pub dir2: [f64; 4],
    /// Direction of `p̄`, in the units of `dir1`/`dir2`; `dir1 + dir2` when unset.
    pub shift: Option<[f64; 4]>,
    /// Also report `Δg~` at this loop momentum.
    pub k: Option<[f64; 4]>,
    /// Gauss-Legendre nodes per hyperspherical axis.
    pub points: usize,
}

impl Default for Anomaly {
    fn default() -> Self {
        Self {
            b: 1.0,
            e: 1.0,
            x: 1e-2,
            dir1: [1.0, 0.0, 0.0, 0.0],
            dir2: [0.0, 1.0, 0.0, 0.0],
            shift: None,
            k: None,
            points: 32,
        }
    }
}

impl Anomaly {
    /// `(p1, p2, p̄)` scaled so that `p̄² = 2 B x`.
    fn momenta(&self) -> Result<(FourMomentum, FourMomentum, FourMomentum), PointError> {
        finite4("dir1", &self.dir1)?;
        finite4("dir2", &self.dir2)?;
        finite("e", self.e)?;
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(invalid(format!("b must be finite and > 0, got {}", self.b)));
        }
        if !(self.x >= 0.0) || !self.x.is_finite() {
            return Err(invalid(format!("x must be finite and >= 0, got {}", self.x)));
        }
        let dir: [f64; 4] = self
            .shift
            .unwrap_or(std::array::from_fn(|i| self.dir1[i] + self.dir2[i]));
        finite4("shift", &dir)?;
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = if self.x == 0.0 {
            0.0
        } else if len > 0.0 {
            (2.0 * self.b * self.x).sqrt() / len
        } else {
            return Err(invalid("the shift direction is zero; p̄² cannot be set from x"));
        };
        let scale = |v: &[f64; 4]| FourMomentum(v.map(|c| s * c));
        Ok((scale(&self.dir1), scale(&self.dir2), scale(&dir)))
    }
}

impl Scenario for Anomaly {
    fn validate(&self) -> Result<(), PointError> {
        self.momenta()?;
        if let Some(k) = &self.k {
            finite4("k", k)?;
        }
        if self.points < 2 {
            return Err(invalid("points must be >= 2"));
        }
        Ok(())
    }

    fn run(&self) -> Outcome {
        let (p1, p2, shift) = self.momenta()?;
        let cfg = anomaly_quadrature().points(self.points);
        let d = anomaly_divergence(&p1, &p2, &shift, self.b, self.e, &cfg)?;
        let exact = |name: &str, i: usize, v: f64| Row {
            converged: d.converged,
            ..Row::exact(name, v).at(i as f64)
        };
        let mut rows = vec![Row {
            quantity: "divergence_norm".into(),
            abscissa: None,
            value_re: d.norm,
            value_im: 0.0,
            error_estimate: d.error_estimate,
            evals: d.evals,
            converged: d.converged,
        }];
        rows.extend(d.j1.iter().enumerate().map(|(i, &v)| exact("j1", i, v)));
        rows.extend(d.j2.iter().enumerate().map(|(i, &v)| exact("j2", i, v)));
        if let Some(k) = self.k {
            let (dg, dg_prime) = anomaly_delta_g(&FourMomentum(k), &p1, &p2, &shift, self.b);
            rows.push(Row::exact("delta_g", dg));
            rows.push(Row::exact("delta_g_prime", dg_prime));
        }
        Ok(rows)
    }
}

// ----------------------------------------------------------------- self-energy

fn coupling(alpha: f64, m: f64, mu: f64) -> Result<CouplingParams, PointError> {
    let c = CouplingParams::from_alpha(alpha, m, mu);
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelfEnergy {
    pub alpha: f64,
    pub m: f64,
    pub mu: f64,
    pub lambda: f64,
    pub eta: f64,
    pub k: u32,
    /// Defaults to `m²`.
    pub p_sq: Option<f64>,
    /// Also evaluate with the explicit partition of unity.
    pub direct: bool,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl Default for SelfEnergy {
    fn default() -> Self {
        Self {
            alpha: ALPHA_QED,
            m: 1.0,
            mu: 0.01,
            lambda: 1e3,
            eta: SQRT_2,
            k: 0,
            p_sq: None,
            direct: false,
            abs_tol: None,
            rel_tol: None,
        }
    }
}

impl SelfEnergy {
    fn setup(&self) -> Result<(CouplingParams, TlrConfig, QuadratureConfig, f64), PointError> {
        let c = coupling(self.alpha, self.m, self.mu)?;
        let tlr = TlrConfig::new(self.k, self.eta, self.lambda)?;
        let cfg = quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?;
        let p_sq = self.p_sq.unwrap_or(self.m * self.m);
        finite("p_sq", p_sq)?;
        Ok((c, tlr, cfg, p_sq))
    }
}

impl Scenario for SelfEnergy {
    fn validate(&self) -> Result<(), PointError> {
        self.setup().map(|_| ())
    }

    fn run(&self) -> Outcome {
        let (c, tlr, cfg, p_sq) = self.setup()?;
        let s = self_energy(p_sq, &c, &tlr, &cfg)?;
        let coeff = |name: &str, value: f64, err: f64| Row {
            error_estimate: err,
            evals: s.evals,
            converged: s.converged,
            ..Row::exact(name, value)
        };
        let mut rows = vec![
            coeff("a_coeff", s.a_coeff, s.a_error),
            coeff("b_coeff", s.b_coeff, s.b_error),
        ];
        if p_sq > 0.0 {
            let p = p_sq.sqrt();
            rows.push(coeff("on_shell", s.on_shell(p), s.a_error * p + s.b_error));
        }
        if self.direct {
            let d = self_energy_direct(p_sq, &c, &tlr, &default_cutoff(), &cfg)?;
            rows.push(Row {
                evals: d.evals,
                converged: d.converged,
                error_estimate: d.a_error,
                ..Row::exact("a_coeff_direct", d.a_coeff)
            });
            rows.push(Row {
                evals: d.evals,
                converged: d.converged,
                error_estimate: d.b_error,
                ..Row::exact("b_coeff_direct", d.b_coeff)
            });
        }
        let der = self_energy_derivative(&c, &tlr, &cfg)?;
        rows.push(Row {
            error_estimate: der.error_estimate,
            converged: der.converged,
            ..Row::exact("derivative", der.value)
        });
        Ok(rows)
    }
}

// ---------------------------------------------------------------------- vertex

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Vertex {
    pub alpha: f64,
    pub m: f64,
    pub mu: f64,
    pub lambda: f64,
    pub eta: f64,
    pub k: u32,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl Default for Vertex {
    fn default() -> Self {
        Self {
            alpha: ALPHA_QED,
            m: 1.0,
            mu: 0.01,
            lambda: 1e3,
            eta: SQRT_2,
            k: 0,
            abs_tol: None,
            rel_tol: None,
        }
    }
}

impl Vertex {
    fn setup(&self) -> Result<(CouplingParams, TlrConfig, QuadratureConfig), PointError> {
        Ok((
            coupling(self.alpha, self.m, self.mu)?,
            TlrConfig::new(self.k, self.eta, self.lambda)?,
            quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?,
        ))
    }
}

impl Scenario for Vertex {
    fn validate(&self) -> Result<(), PointError> {
        self.setup().map(|_| ())
    }

    fn run(&self) -> Outcome {
        let (c, tlr, cfg) = self.setup()?;
        Ok(vec![Row::new("vertex", &vertex(&c, &tlr, &cfg)?)])
    }
}

// -------------------------------------------------------------------- wt-check

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WtCheck {
    pub alpha: f64,
    pub m: f64,
    pub mu: f64,
    pub eta: f64,
    pub k: u32,
    /// `Λ/m` values.
    pub ladder: Vec<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl Default for WtCheck {
    fn default() -> Self {
        Self {
            alpha: ALPHA_QED,
            m: 1.0,
            mu: 0.01,
            eta: SQRT_2,
            k: 0,
            ladder: DEFAULT_LADDER.to_vec(),
            abs_tol: None,
            rel_tol: None,
        }
    }
}

impl WtCheck {
    fn setup(&self) -> Result<(CouplingParams, TlrConfig, QuadratureConfig), PointError> {
        if self.ladder.len() < 2 {
            return Err(invalid("ladder needs two or more values"));
        }
        if let Some(r) = self.ladder.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(invalid(format!("ladder values must be finite and > 0, got {r}")));
        }
        Ok((
            coupling(self.alpha, self.m, self.mu)?,
            TlrConfig::new(self.k, self.eta, self.m)?,
            quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?,
        ))
    }
}

impl Scenario for WtCheck {
    fn validate(&self) -> Result<(), PointError> {
        self.setup().map(|_| ())
    }

    fn run(&self) -> Outcome {
        let (c, tlr, cfg) = self.setup()?;
        let w = ward_takahashi_check(&c, &tlr, &self.ladder, &cfg)?;
        let row = |name: &str, v: f64| Row {
            converged: w.converged,
            ..Row::exact(name, v)
        };
        let mut rows = Vec::with_capacity(3 * w.lambdas.len() + 5);
        for (i, &l) in w.lambdas.iter().enumerate() {
            rows.push(row("vertex", w.vertex[i]).at(l));
            rows.push(row("sigma_prime", w.sigma_prime[i]).at(l));
            rows.push(row("sum", w.vertex[i] + w.sigma_prime[i]).at(l));
        }
        rows.push(row("vertex_slope", w.vertex_slope));
        rows.push(row("sigma_slope", w.sigma_slope));
        rows.push(row("slope_residual", w.slope_residual));
        rows.push(row("constant_offset", w.constant_offset));
        rows.push(row("offset_variation", w.offset_variation));
        Ok(rows)
    }
}

// -------------------------------------------------------------------- tlr-demo

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// `(X+1)^-power`
    Inverse,
    /// `X(X-1)/(X+1)³`
    Vertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportKind {
    Constant,
    Running,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TlrDemo {
    pub k: u32,
    pub eta: f64,
    pub kernel: KernelKind,
    pub power: i32,
    pub support: SupportKind,
    /// Edge of the running support.
    pub edge: f64,
    /// `[a, b, width]` of a partition of unity for the amplitude.
    pub partition: Option<[f64; 3]>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl Default for TlrDemo {
    fn default() -> Self {
        Self {
            k: 0,
            eta: SQRT_2,
            kernel: KernelKind::Inverse,
            power: 1,
            support: SupportKind::Constant,
            edge: 1e3,
            partition: None,
            abs_tol: None,
            rel_tol: None,
        }
    }
}

impl TlrDemo {
    fn kernel(&self) -> RationalKernel {
        match self.kernel {
            KernelKind::Inverse => RationalKernel::inverse_power(self.power),
            KernelKind::Vertex => RationalKernel::vertex(),
        }
    }

    fn support(&self) -> RunningSupport {
        match self.support {
            SupportKind::Constant => RunningSupport::Constant,
            SupportKind::Running => RunningSupport::Inverse { edge: self.edge },
        }
    }

    fn setup(&self) -> Result<(TlrConfig, QuadratureConfig), PointError> {
        let tlr = TlrConfig::new(self.k, self.eta, 1.0)?;
        let cfg = quad_cfg(self.abs_tol, self.rel_tol, QuadratureConfig::default())?;
        if self.support == SupportKind::Running && (!(self.edge > 0.0) || !self.edge.is_finite()) {
            return Err(invalid(format!("edge must be finite and > 0, got {}", self.edge)));
        }
        if let Some([a, b, w]) = self.partition {
            partition_of_unity(a, b, w)?;
        }
        Ok((tlr, cfg))
    }
}

impl Scenario for TlrDemo {
    fn validate(&self) -> Result<(), PointError> {
        self.setup().map(|_| ())
    }

    fn run(&self) -> Outcome {
        let (tlr, cfg) = self.setup()?;
        let kernel = self.kernel();
        let support = self.support();
        let mut rows = vec![Row::exact("t_integral", t_integral(self.k, self.eta))];
        let ext = extend_distribution(&kernel, &tlr, support)?.integrate(None, &cfg)?;
        rows.push(Row::new("extended_integral", &ext));
        if let Some([a, b, w]) = self.partition {
            let f = partition_of_unity(a, b, w)?;
            let amp = amplitude(&kernel, &f, &tlr, support, &cfg)?;
            rows.push(Row::new("amplitude_extended", &amp.extended));
            rows.push(Row::new("amplitude_direct", &amp.direct));
        }
        Ok(rows)
    }
}
