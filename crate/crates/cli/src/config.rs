//! Run configuration: documented defaults, optional JSON config file, the
//! TVOR_SEED environment fallback and per-flag overrides, resolved in that
//! order. The full effective configuration is echoed into every report.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::Value;
use tvor_core::{FitMode, WhippleWindow};

use crate::report::{jnum, jobj};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => bail!("unknown output format `{other}` (expected json or csv)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub fit_mode: FitMode,
    pub min_size_filter: u64,
    pub iqr_multiplier: f64,
    pub whipple_window: WhippleWindow,
    pub reference_year: i64,
    pub rng_seed: u64,
    pub output_format: OutputFormat,
    pub debias_tol: f64,
    pub debias_max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fit_mode: FitMode::RawOls,
            min_size_filter: 100,
            iqr_multiplier: 1.5,
            whipple_window: WhippleWindow::DEFAULT,
            reference_year: 1945,
            rng_seed: 0,
            output_format: OutputFormat::Json,
            debias_tol: 1e-9,
            debias_max_iter: 10,
        }
    }
}

/// Optional JSON config file; absent fields keep their defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    fit_mode: Option<String>,
    min_size_filter: Option<u64>,
    iqr_multiplier: Option<f64>,
    whipple_window: Option<[i64; 2]>,
    reference_year: Option<i64>,
    rng_seed: Option<u64>,
    output_format: Option<String>,
    debias_tol: Option<f64>,
    debias_max_iter: Option<usize>,
}

impl RunConfig {
    /// defaults <- config file <- TVOR_SEED <- command line flags
    pub fn resolve(
        config_path: Option<&Path>,
        seed_flag: Option<u64>,
        format_flag: Option<OutputFormat>,
    ) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let file: ConfigFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            if let Some(m) = file.fit_mode {
                cfg.fit_mode = m.parse()?;
            }
            if let Some(v) = file.min_size_filter {
                cfg.min_size_filter = v;
            }
            if let Some(v) = file.iqr_multiplier {
                cfg.iqr_multiplier = v;
            }
            if let Some([lo, hi]) = file.whipple_window {
                cfg.whipple_window = WhippleWindow { lo, hi };
            }
            if let Some(v) = file.reference_year {
                cfg.reference_year = v;
            }
            if let Some(v) = file.rng_seed {
                cfg.rng_seed = v;
            }
            if let Some(f) = file.output_format {
                cfg.output_format = f.parse()?;
            }
            if let Some(v) = file.debias_tol {
                cfg.debias_tol = v;
            }
            if let Some(v) = file.debias_max_iter {
                cfg.debias_max_iter = v;
            }
        }
        if let Ok(env_seed) = std::env::var("TVOR_SEED") {
            cfg.rng_seed = env_seed
                .parse()
                .context("TVOR_SEED must be an unsigned integer")?;
        }
        if let Some(seed) = seed_flag {
            cfg.rng_seed = seed;
        }
        if let Some(format) = format_flag {
            cfg.output_format = format;
        }
        Ok(cfg)
    }

    /// Ordered object echoed into every report.
    pub fn echo(&self) -> Value {
        jobj(vec![
            ("fit_mode", Value::String(self.fit_mode.as_str().to_owned())),
            ("min_size_filter", Value::from(self.min_size_filter)),
            ("iqr_multiplier", jnum(self.iqr_multiplier)),
            (
                "whipple_window",
                Value::Array(vec![
                    Value::from(self.whipple_window.lo),
                    Value::from(self.whipple_window.hi),
                ]),
            ),
            ("reference_year", Value::from(self.reference_year)),
            ("rng_seed", Value::from(self.rng_seed)),
            (
                "output_format",
                Value::String(self.output_format.as_str().to_owned()),
            ),
            ("debias_tol", jnum(self.debias_tol)),
            ("debias_max_iter", Value::from(self.debias_max_iter as u64)),
        ])
    }
}
