//! Run configuration: a TOML file with per-flag overrides.

use std::path::Path;
use std::sync::Arc;

use qfchub_core::dispersion::{SellmeierModel, BUNDLED_MODELS, DEFAULT_TEMPERATURE_C};
use qfchub_core::dwdm::{DwdmGrid, LaserSpec, DEFAULT_SIGNAL_THZ};
use qfchub_core::tunability::{ConstraintMode, TuningConstraints};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub cutoff_nm: Option<f64>,
    pub separation_nm: Option<f64>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub anchor_thz: f64,
    pub spacing_ghz: f64,
    pub ports: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub min_nm: f64,
    pub max_nm: f64,
}

/// On-disk layout; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub material: Option<String>,
    pub temperature_c: Option<f64>,
    pub length_mm: Option<f64>,
    pub signal_thz: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<String>,
    pub workers: Option<usize>,
    pub constraint: Option<ConstraintSection>,
    pub grid: Option<GridSection>,
    pub laser: Option<LaserSection>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {}", path.display(), e.message())))
    }
}

/// Fully resolved settings shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub material: Arc<SellmeierModel>,
    pub temperature_c: f64,
    pub length_mm: f64,
    pub signal_thz: f64,
    pub constraints: TuningConstraints,
    pub grid: DwdmGrid,
    pub laser: LaserSpec,
    pub format: Format,
    pub output: Option<String>,
    pub workers: usize,
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub material: Option<String>,
    pub temperature_c: Option<f64>,
    pub length_mm: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<String>,
    pub workers: Option<usize>,
}

pub fn load_material(spec: &str) -> Result<SellmeierModel, CliError> {
    if BUNDLED_MODELS.contains(&spec) {
        Ok(SellmeierModel::builtin(spec)?)
    } else if Path::new(spec).exists() {
        Ok(SellmeierModel::from_path(spec)?)
    } else {
        Err(CliError::Usage(format!(
            "unknown material '{spec}': not a bundled model ({}) or an existing file",
            BUNDLED_MODELS.join(", ")
        )))
    }
}

fn positive(what: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{what} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Self, CliError> {
        let material = load_material(flags.material.as_deref().or(file.material.as_deref()).unwrap_or("jundt1997"))?;
        let temperature_c = flags.temperature_c.or(file.temperature_c).unwrap_or(DEFAULT_TEMPERATURE_C);
        if !temperature_c.is_finite() {
            return Err(CliError::Usage("temperature must be finite".into()));
        }
        let length_mm = positive("length", flags.length_mm.or(file.length_mm).unwrap_or(40.0))?;
        let signal_thz = positive("signal frequency", file.signal_thz.unwrap_or(DEFAULT_SIGNAL_THZ))?;

        let mut constraints = TuningConstraints::default();
        if let Some(c) = &file.constraint {
            constraints.mode = match (c.cutoff_nm, c.separation_nm) {
                (Some(v), None) => ConstraintMode::MaxConvertedWavelength(v),
                (None, Some(v)) => ConstraintMode::MinPumpConvertedSeparation(v),
                (None, None) => constraints.mode,
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage(
                        "config [constraint] may set cutoff_nm or separation_nm, not both".into(),
                    ))
                }
            };
            if let Some(t) = c.threshold {
                constraints.efficiency_threshold = t;
            }
        }
        constraints.validate()?;

        let grid = file
            .grid
            .map(|g| DwdmGrid {
                anchor_thz: g.anchor_thz,
                spacing_ghz: g.spacing_ghz,
                port_count: g.ports,
            })
            .unwrap_or_default();
        grid.validate()?;
        let laser = match file.laser {
            Some(l) => LaserSpec::new(l.min_nm, l.max_nm)?,
            None => LaserSpec::default(),
        };

        Ok(Self {
            material: Arc::new(material),
            temperature_c,
            length_mm,
            signal_thz,
            constraints,
            grid,
            laser,
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            output: flags.output.or(file.output),
            workers: flags.workers.or(file.workers).unwrap_or(0),
        })
    }
}
