//! Run configuration: defaults, an optional `key = value` file, then flags.
//!
//! Recognised keys (file and flags share names, with `-` or `_`):
//!
//! ```text
//! n, theta, m, data, t0, t1, count, quad_mode, rel_tol, out, t_max,
//! expect_exponent
//! ```
//!
//! `data` is `gaussian[:scale]`, `fourier-bump[:radius]` or
//! `mean-zero-gaussian-difference`. Lines starting with `#` are ignored.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use dampwave_core::{DataSpec, FourierData, GridSpec, ModelParams, QuadMode, QuadratureConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "invalid value for `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuadModeArg {
    Resolved,
    Averaged,
}

impl From<QuadModeArg> for QuadMode {
    fn from(m: QuadModeArg) -> Self {
        match m {
            QuadModeArg::Resolved => QuadMode::Resolved,
            QuadModeArg::Averaged => QuadMode::Averaged,
        }
    }
}

/// Flags shared by every subcommand; unset flags fall back to the config
/// file and then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Spatial dimension.
    #[arg(long)]
    pub n: Option<u32>,
    /// Order of the logarithmic operator, in (0, 1].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Mass coefficient.
    #[arg(long)]
    pub m: Option<f64>,
    /// Initial velocity: gaussian[:scale], fourier-bump[:radius] or
    /// mean-zero-gaussian-difference.
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    /// Number of geometric grid points.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub quad_mode: Option<QuadModeArg>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub out: Option<OutFormat>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    /// Accepted for scripts; every run is deterministic.
    #[arg(long)]
    pub seedless: bool,
    /// Drop grid times above this value.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Replace the predicted solution exponent.
    #[arg(long, allow_negative_numbers = true)]
    pub expect_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: ModelParams,
    pub data: DataSpec,
    pub grid: GridSpec,
    pub quad: QuadratureConfig,
    pub out: Option<OutFormat>,
    pub t_max: Option<f64>,
    pub expect_exponent: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams {
                n: 3,
                theta: 1.0,
                m: 1.0,
            },
            data: DataSpec::Gaussian { scale: 1.0 },
            grid: GridSpec::default(),
            quad: QuadratureConfig::default(),
            out: None,
            t_max: None,
            expect_exponent: None,
        }
    }
}

pub fn parse_data(s: &str) -> Result<DataSpec, ConfigError> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (s.trim(), None),
    };
    let number = |default: f64| -> Result<f64, ConfigError> {
        arg.map_or(Ok(default), |a| {
            a.parse()
                .map_err(|_| bad("data", format!("`{a}` is not a number")))
        })
    };
    match name {
        "gaussian" => Ok(DataSpec::Gaussian {
            scale: number(1.0)?,
        }),
        "fourier-bump" => Ok(DataSpec::FourierBump {
            radius: number(1.0)?,
        }),
        "mean-zero-gaussian-difference" if arg.is_none() => {
            Ok(DataSpec::MeanZeroGaussianDifference)
        }
        "mean-zero-gaussian-difference" => Err(bad("data", "takes no parameter")),
        other => Err(bad("data", format!("unknown data `{other}`"))),
    }
}

fn parse_value<T: FromStr>(field: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| bad(field, format!("cannot parse `{v}`")))
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "n" => self.params.n = parse_value("n", value)?,
            "theta" => self.params.theta = parse_value("theta", value)?,
            "m" => self.params.m = parse_value("m", value)?,
            "data" => self.data = parse_data(value)?,
            "t0" => self.grid.t0 = parse_value("t0", value)?,
            "t1" => self.grid.t1 = parse_value("t1", value)?,
            "count" => self.grid.count = parse_value("count", value)?,
            "quad_mode" => {
                self.quad.mode = QuadModeArg::from_str(value, true)
                    .map_err(|_| {
                        bad(
                            "quad_mode",
                            format!("expected resolved or averaged, got `{value}`"),
                        )
                    })?
                    .into();
            }
            "rel_tol" => self.quad.rel_tol = parse_value("rel_tol", value)?,
            "out" => {
                self.out = Some(
                    OutFormat::from_str(value, true)
                        .map_err(|_| bad("out", format!("expected csv or json, got `{value}`")))?,
                );
            }
            "t_max" => self.t_max = Some(parse_value("t_max", value)?),
            "expect_exponent" => {
                self.expect_exponent = Some(parse_value("expect_exponent", value)?)
            }
            other => return Err(bad(other, "unknown key")),
        }
        Ok(())
    }

    /// Apply the body of a config file.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let located = |mut e: ConfigError| {
                e.line = Some(i + 1);
                e
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| located(bad(line, "expected `key = value`")))?;
            self.set(key.trim(), value.trim()).map_err(located)?;
        }
        Ok(())
    }

    pub fn from_args(args: &CommonArgs) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(path) = &args.config {
            cfg.apply_file_text(&read_config(path)?)?;
        }
        if let Some(v) = args.n {
            cfg.params.n = v;
        }
        if let Some(v) = args.theta {
            cfg.params.theta = v;
        }
        if let Some(v) = args.m {
            cfg.params.m = v;
        }
        if let Some(v) = &args.data {
            cfg.data = parse_data(v)?;
        }
        if let Some(v) = args.t0 {
            cfg.grid.t0 = v;
        }
        if let Some(v) = args.t1 {
            cfg.grid.t1 = v;
        }
        if let Some(v) = args.count {
            cfg.grid.count = v;
        }
        if let Some(v) = args.quad_mode {
            cfg.quad.mode = v.into();
        }
        if let Some(v) = args.rel_tol {
            cfg.quad.rel_tol = v;
        }
        if args.out.is_some() {
            cfg.out = args.out;
        }
        if args.t_max.is_some() {
            cfg.t_max = args.t_max;
        }
        if args.expect_exponent.is_some() {
            cfg.expect_exponent = args.expect_exponent;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let core = |e: dampwave_core::Error| match e {
            dampwave_core::Error::InvalidParameter { field, reason } => bad(field, reason),
            other => bad("config", other.to_string()),
        };
        self.params.validate().map_err(core)?;
        self.quad.validate().map_err(core)?;
        let g = &self.grid;
        if !(g.t0 > 0.0 && g.t0.is_finite()) {
            return Err(bad("t0", format!("must be positive, got {}", g.t0)));
        }
        if !(g.t1 > g.t0 && g.t1.is_finite()) {
            return Err(bad(
                "t1",
                format!("must exceed t0 = {}, got {}", g.t0, g.t1),
            ));
        }
        if g.count < 2 {
            return Err(bad("count", format!("must be at least 2, got {}", g.count)));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(bad("t_max", format!("must be positive, got {t}")));
            }
        }
        if let Some(e) = self.expect_exponent {
            if !e.is_finite() {
                return Err(bad("expect_exponent", "must be finite"));
            }
        }
        self.build_data()?;
        Ok(())
    }

    pub fn build_data(&self) -> Result<FourierData, ConfigError> {
        self.data
            .build(self.params.n, self.params.theta)
            .map_err(|e| match e {
                dampwave_core::Error::InvalidParameter { reason, .. } => bad("data", reason),
                other => bad("data", other.to_string()),
            })
    }

    /// Grid times, without those above `t_max`.
    pub fn times(&self) -> Vec<f64> {
        let mut times = self.grid.times().unwrap_or_default();
        if let Some(t_max) = self.t_max {
            times.retain(|&t| t <= t_max * (1.0 + 1e-12));
        }
        times
    }
}

fn read_config(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| bad("config", format!("{}: {e}", path.display())))
}
