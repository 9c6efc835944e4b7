//! CSV and JSON emitters.
//!
//! CSV layout: `#` comment lines carrying the tool version, the sweep and the
//! resolved config (as commented TOML), a header row, one row per result and
//! trailing `#` summary lines. Floats are written with 17 significant digits.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value as Json};

use gaussreg::loops::least_squares_slope;

use crate::config::{CliError, Command, Sweep};
use crate::scenarios::{PointError, PointOutcome, Row};

pub const TOOL: &str = "gaussreg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything a run produced, in ladder order.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Command,
    pub sweep: Option<Sweep>,
    /// Base parameters with defaults filled in.
    pub resolved: toml::Table,
    pub points: Vec<PointOutcome>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub points: usize,
    pub rows: usize,
    pub invalid: usize,
    pub failed: usize,
    pub unconverged: usize,
    pub fits: Vec<SweepFit>,
}

/// Fit of one per-point quantity against the swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFit {
    pub quantity: String,
    /// `d ln|y| / d ln x`
    pub loglog_slope: Option<f64>,
    /// `d y / d ln x`
    pub slope_vs_ln: Option<f64>,
    /// `y[i+1] / y[i]`
    pub ratios: Vec<f64>,
}

impl Report {
    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            points: self.points.len(),
            ..Summary::default()
        };
        for p in &self.points {
            match &p.result {
                Ok(rows) => {
                    s.rows += rows.len();
                    s.unconverged += rows.iter().filter(|r| !r.converged).count();
                }
                Err(PointError::Invalid(_)) => s.invalid += 1,
                Err(PointError::Failed(_)) => s.failed += 1,
            }
        }
        s.fits = self.fits();
        s
    }

    /// 0 when every row converged, 2 if any point was invalid, else 3.
    pub fn exit_code(&self) -> u8 {
        let s = self.summary();
        if s.invalid > 0 {
            2
        } else if s.failed > 0 || s.unconverged > 0 {
            3
        } else {
            0
        }
    }

    fn sweep_abscissae(&self) -> Option<Vec<f64>> {
        let sweep = self.sweep.as_ref()?;
        sweep
            .values
            .iter()
            .map(|v| match v {
                toml::Value::Float(f) => Some(*f),
                toml::Value::Integer(i) => Some(*i as f64),
                _ => None,
            })
            .collect()
    }

    fn fits(&self) -> Vec<SweepFit> {
        let Some(xs) = self.sweep_abscissae() else {
            return Vec::new();
        };
        if xs.len() < 2 || self.points.iter().any(|p| p.result.is_err()) {
            return Vec::new();
        }
        // quantities reported once per point, in first-seen order
        let mut names: Vec<&str> = Vec::new();
        for r in self.points[0].result.as_ref().unwrap() {
            if r.abscissa.is_none() && !names.contains(&r.quantity.as_str()) {
                names.push(&r.quantity);
            }
        }
        names
            .into_iter()
            .filter_map(|name| {
                let ys: Vec<f64> = self
                    .points
                    .iter()
                    .map(|p| {
                        let rows = p.result.as_ref().unwrap();
                        rows.iter()
                            .find(|r| r.quantity == name && r.abscissa.is_none())
                            .map(|r| r.value_re)
                    })
                    .collect::<Option<_>>()?;
                let positive_x = xs.iter().all(|&x| x > 0.0);
                let ln_x: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
                let loglog_slope = (positive_x && ys.iter().all(|&y| y != 0.0))
                    .then(|| {
                        let ln_y: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
                        least_squares_slope(&ln_x, &ln_y).ok()
                    })
                    .flatten();
                let slope_vs_ln = positive_x.then(|| least_squares_slope(&ln_x, &ys).ok()).flatten();
                let ratios = ys.windows(2).map(|w| w[1] / w[0]).collect();
                Some(SweepFit {
                    quantity: name.to_string(),
                    loglog_slope,
                    slope_vs_ln,
                    ratios,
                })
            })
            .collect()
    }

    /// Union of the scalar parameter names over all points, sorted.
    fn param_columns(&self) -> Vec<String> {
        let mut keys = BTreeSet::new();
        for p in &self.points {
            for (k, v) in &p.params {
                if scalar(v).is_some() {
                    keys.insert(k.clone());
                }
            }
        }
        keys.into_iter().collect()
    }
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn scalar(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::Float(f) => Some(float(*f)),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Boolean(b) => Some(b.to_string()),
        toml::Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("; ")
}

fn status(row: &Row) -> &'static str {
    if row.converged {
        "ok"
    } else {
        "unconverged"
    }
}

fn error_status(e: &PointError) -> String {
    match e {
        PointError::Invalid(m) => format!("invalid: {}", one_line(m)),
        PointError::Failed(m) => format!("failed: {}", one_line(m)),
    }
}

fn config_toml(report: &Report) -> String {
    let mut doc = toml::Table::new();
    doc.insert("command".into(), toml::Value::String(report.command.name().into()));
    doc.insert("params".into(), toml::Value::Table(report.resolved.clone()));
    toml::to_string(&doc).expect("config serializes")
}

pub fn to_csv(report: &Report) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&format!("# {TOOL} {VERSION}\n"));
    if let Some(s) = &report.sweep {
        out.push_str(&format!("# sweep: {}={}\n", s.param, s.raw));
    }
    for line in config_toml(report).lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str(&format!("# {line}\n"));
        }
    }

    let columns = report.param_columns();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["point".to_string()];
    header.extend(columns.iter().cloned());
    header.extend(
        [
            "quantity",
            "abscissa",
            "value_re",
            "value_im",
            "error_estimate",
            "evals",
            "converged",
            "status",
        ]
        .map(String::from),
    );
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for (i, p) in report.points.iter().enumerate() {
        let mut lead = vec![i.to_string()];
        lead.extend(
            columns
                .iter()
                .map(|c| p.params.get(c).and_then(scalar).unwrap_or_default()),
        );
        match &p.result {
            Ok(rows) => {
                for r in rows {
                    let mut rec = lead.clone();
                    rec.extend([
                        r.quantity.clone(),
                        r.abscissa.map(float).unwrap_or_default(),
                        float(r.value_re),
                        float(r.value_im),
                        float(r.error_estimate),
                        r.evals.to_string(),
                        r.converged.to_string(),
                        status(r).to_string(),
                    ]);
                    w.write_record(&rec).map_err(csv_err)?;
                }
            }
            Err(e) => {
                let mut rec = lead.clone();
                rec.extend(["", "", "", "", "", "", "false"].map(String::from));
                rec.push(error_status(e));
                w.write_record(&rec).map_err(csv_err)?;
            }
        }
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));

    let s = report.summary();
    out.push_str(&format!(
        "# summary: points={} rows={} invalid={} failed={} unconverged={}\n",
        s.points, s.rows, s.invalid, s.failed, s.unconverged
    ));
    let opt = |v: Option<f64>| v.map(float).unwrap_or_else(|| "-".into());
    for f in &s.fits {
        let ratios: Vec<String> = f.ratios.iter().map(|r| float(*r)).collect();
        out.push_str(&format!(
            "# fit {}: loglog_slope={} slope_vs_ln={} ratios={}\n",
            f.quantity,
            opt(f.loglog_slope),
            opt(f.slope_vs_ln),
            ratios.join(",")
        ));
    }
    Ok(out)
}

fn toml_to_json(v: &toml::Value) -> Json {
    match v {
        toml::Value::String(s) => Json::String(s.clone()),
        toml::Value::Integer(i) => json!(i),
        toml::Value::Float(f) => json!(f),
        toml::Value::Boolean(b) => Json::Bool(*b),
        toml::Value::Datetime(d) => Json::String(d.to_string()),
        toml::Value::Array(a) => Json::Array(a.iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => table_to_json(t),
    }
}

fn table_to_json(t: &toml::Table) -> Json {
    Json::Object(
        t.iter()
            .map(|(k, v)| (k.clone(), toml_to_json(v)))
            .collect::<Map<_, _>>(),
    )
}

fn row_json(i: usize, params: &Json, r: &Row) -> Json {
    json!({
        "point": i,
        "params": params,
        "quantity": r.quantity,
        "abscissa": r.abscissa,
        "value_re": r.value_re,
        "value_im": r.value_im,
        "error_estimate": r.error_estimate,
        "evals": r.evals,
        "converged": r.converged,
        "status": status(r),
    })
}

pub fn to_json(report: &Report) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for (i, p) in report.points.iter().enumerate() {
        let params = table_to_json(&p.params);
        match &p.result {
            Ok(rs) => rows.extend(rs.iter().map(|r| row_json(i, &params, r))),
            Err(e) => rows.push(json!({
                "point": i,
                "params": params,
                "converged": false,
                "status": error_status(e),
            })),
        }
    }
    let s = report.summary();
    let fits: Vec<Json> = s
        .fits
        .iter()
        .map(|f| {
            json!({
                "quantity": f.quantity,
                "loglog_slope": f.loglog_slope,
                "slope_vs_ln": f.slope_vs_ln,
                "ratios": f.ratios,
            })
        })
        .collect();
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": report.command.name(),
        "sweep": report.sweep.as_ref().map(|s| json!({
            "param": s.param,
            "values": s.values.iter().map(toml_to_json).collect::<Vec<_>>(),
        })),
        "config": table_to_json(&report.resolved),
        "rows": rows,
        "summary": {
            "points": s.points,
            "rows": s.rows,
            "invalid": s.invalid,
            "failed": s.failed,
            "unconverged": s.unconverged,
            "fits": fits,
        },
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
