use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use minent_core::classify::ClassifyError;
use minent_core::collapse::CollapseError;
use minent_core::entropy::EntropyError;
use minent_core::geodesic::GeodesicError;
use minent_core::GeometryError;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::{Common, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::QuadratureTooCoarse { .. } | GeometryError::LeftAtlas { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<GeodesicError> for CliError {
    fn from(e: GeodesicError) -> Self {
        match e {
            GeodesicError::Geometry(g) => g.into(),
            GeodesicError::ResolutionTooCoarse { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        match e {
            EntropyError::Geometry(g) => g.into(),
            EntropyError::Geodesic(g) => g.into(),
            EntropyError::InvalidInput(_) | EntropyError::UnsupportedCatalog(_) => CliError::Validation(e.to_string()),
            EntropyError::NonStabilizedCounts(_) | EntropyError::InsufficientT { .. } | EntropyError::SampleStarvation(_) => {
                CliError::NonConvergence(e.to_string())
            }
        }
    }
}

impl From<CollapseError> for CliError {
    fn from(e: CollapseError) -> Self {
        match e {
            CollapseError::Geometry(g) => g.into(),
            CollapseError::OrbitIntegration(_) => CliError::NonConvergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// A finished report: JSON fields, an optional CSV rendering and warnings.
pub struct Output {
    pub command: &'static str,
    pub fields: Value,
    pub csv: Option<Vec<u8>>,
    pub default_format: Format,
    pub warnings: Vec<String>,
}

impl Output {
    pub fn json(command: &'static str, fields: Value) -> Self {
        Self { command, fields, csv: None, default_format: Format::Json, warnings: Vec::new() }
    }

    pub fn with_csv(mut self, csv: Vec<u8>, default_format: Format) -> Self {
        self.csv = Some(csv);
        self.default_format = default_format;
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    /// `{command, timestamp, ..fields, warnings}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("command".into(), self.command.into());
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        map.insert("timestamp".into(), secs.into());
        match &self.fields {
            Value::Object(m) => map.extend(m.clone()),
            other => {
                map.insert("result".into(), other.clone());
            }
        }
        map.insert("warnings".into(), self.warnings.clone().into());
        Value::Object(map)
    }
}

pub fn emit(common: &Common, out: &Output) -> Result<(), CliError> {
    let bytes = match common.format.unwrap_or(out.default_format) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => out
            .csv
            .clone()
            .ok_or_else(|| CliError::Validation(format!("{} has no CSV form; use --format json", out.command)))?,
    };
    match &common.output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
