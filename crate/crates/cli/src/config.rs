//! Run configuration.
//!
//! A config file is TOML with three optional top-level keys and one table:
//!
//! ```toml
//! command = "tadpole"      # required
//! format = "csv"           # csv | json, default csv
//! output = "tadpole.csv"   # default stdout
//!
//! [params]                 # scenario parameters; unknown keys are errors
//! e = 1.0
//! b = 1.0
//! m = 1e-3
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::scenarios;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    TestfnCheck,
    PropagatorGrid,
    Tadpole,
    Anomaly,
    SelfEnergy,
    Vertex,
    WtCheck,
    TlrDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TestfnCheck => "testfn-check",
            Command::PropagatorGrid => "propagator-grid",
            Command::Tadpole => "tadpole",
            Command::Anomaly => "anomaly",
            Command::SelfEnergy => "self-energy",
            Command::Vertex => "vertex",
            Command::WtCheck => "wt-check",
            Command::TlrDemo => "tlr-demo",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    format: Option<Format>,
    output: Option<PathBuf>,
    #[serde(default)]
    params: toml::Table,
}

/// Same layout with typed parameters, parsed only for its diagnostics.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct TypedConfig<P> {
    command: Command,
    format: Option<Format>,
    output: Option<PathBuf>,
    #[serde(default)]
    params: P,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub params: toml::Table,
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    // a second pass against the scenario's own struct reports bad or unknown
    // parameters with their line
    scenarios::check_document(raw.command, text)?;
    Ok(RunConfig {
        command: raw.command,
        format: raw.format,
        output: raw.output,
        params: raw.params,
    })
}

/// Parse the whole document with `P` as the `[params]` type.
pub(crate) fn check_typed<P: DeserializeOwned + Default>(text: &str) -> Result<(), CliError> {
    toml::from_str::<TypedConfig<P>>(text)
        .map(|_| ())
        .map_err(|e| CliError::Config(e.to_string()))
}

/// `--sweep name=v1,v2,...`
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<toml::Value>,
    /// The value list as given, for the provenance header.
    pub raw: String,
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, list) = s
            .split_once('=')
            .ok_or_else(|| format!("sweep `{s}` is not of the form name=v1,v2,..."))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("invalid sweep parameter name `{name}`"));
        }
        let values = list
            .split(',')
            .map(|tok| parse_value(tok.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("sweep needs at least one value".into());
        }
        Ok(Sweep {
            param: name.to_string(),
            values,
            raw: list.trim().to_string(),
        })
    }
}

/// A single TOML value written inline, e.g. `1e-3`, `true`, `"running"`.
/// Bare words are taken as strings.
fn parse_value(tok: &str) -> Result<toml::Value, String> {
    if tok.is_empty() {
        return Err("empty sweep value".into());
    }
    let doc = format!("v = {tok}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => Ok(t.remove("v").expect("parsed key")),
        Err(_) if tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') => {
            Ok(toml::Value::String(tok.to_string()))
        }
        Err(e) => Err(format!("invalid sweep value `{tok}`: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn sweep_values_survive_parsing(vals in prop::collection::vec(prop::num::f64::NORMAL, 1..6)) {
            let list: Vec<String> = vals.iter().map(|v| format!("{v:e}")).collect();
            let s: Sweep = format!("x={}", list.join(",")).parse().unwrap();
            prop_assert_eq!(s.values.len(), vals.len());
            for (parsed, v) in s.values.iter().zip(&vals) {
                prop_assert_eq!(parsed.as_float().unwrap().to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn minimal_config() {
        let c = parse_config("command = \"tadpole\"\n").unwrap();
        assert_eq!(c.command, Command::Tadpole);
        assert!(c.params.is_empty());
        assert_eq!(c.format, None);
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let err = parse_config("command = \"tadpole\"\n[params]\nb = 1.0\nbogus = 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("line 4"), "{msg}");
        assert!(parse_config("command = \"tadpole\"\ncolour = 1\n").is_err());
    }

    #[test]
    fn wrong_types_are_rejected() {
        let err = parse_config("command = \"tadpole\"\n[params]\nb = \"one\"\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn empty_and_unknown_commands() {
        assert!(parse_config("").is_err());
        assert!(parse_config("command = \"two-loop\"").is_err());
    }

    #[test]
    fn sweep_parsing() {
        let s: Sweep = "k_max=10,20,40".parse().unwrap();
        assert_eq!(s.param, "k_max");
        assert_eq!(s.values.len(), 3);
        assert_eq!(s.values[0], toml::Value::Integer(10));
        let s: Sweep = "support=constant,running".parse().unwrap();
        assert_eq!(s.values[1], toml::Value::String("running".into()));
        let s: Sweep = "x=1e-2, 1e-3".parse().unwrap();
        assert_eq!(s.values[1], toml::Value::Float(1e-3));
        assert!("novalue".parse::<Sweep>().is_err());
        assert!("=1,2".parse::<Sweep>().is_err());
        assert!("x=1,,2".parse::<Sweep>().is_err());
    }
}
