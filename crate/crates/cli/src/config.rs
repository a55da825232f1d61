//! Experiment configuration: an optional JSON file overlaid by flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ctxprob::StabilizationCriterion;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Smallest ensemble that still has one dyadic checkpoint.
pub const MIN_SAMPLES: u64 = 64;
pub const DEFAULT_SAMPLES: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// An angle given as a number or a π expression such as "3pi/4".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Number(f64),
    Expr(String),
}

impl AngleValue {
    pub fn resolve(&self) -> CliResult<f64> {
        match self {
            AngleValue::Number(x) if x.is_finite() => Ok(*x),
            AngleValue::Number(x) => Err(CliError::Usage(format!("angle {x} is not finite"))),
            AngleValue::Expr(s) => parse_angle(s),
        }
    }
}

/// Four CHSH angles, or a keyword / comma list as on the command line.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AnglesValue {
    List(Vec<AngleValue>),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub grid: Option<String>,
    pub epsilon: Option<f64>,
    pub window: Option<usize>,
    /// Base analyzer angle γ for epr-sweep.
    pub gamma: Option<AngleValue>,
    pub angles: Option<AnglesValue>,
    /// Q_A/Q_B pair document for fluctuation-demo.
    pub pair: Option<PathBuf>,
    pub quadruple: Option<String>,
    /// Model document for validate and simulate.
    pub model: Option<PathBuf>,
    /// Ensemble CSV destination for simulate.
    pub ensemble: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Debug, Default, Clone, Args)]
pub struct GlobalFlags {
    /// JSON experiment configuration
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every random stream of the run
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Ensemble size M_max (at least 64)
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<u64>,
    /// Output file (stdout when absent)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Sweep grid, e.g. 0:pi:9 (both ends included)
    #[arg(long, global = true, value_name = "START:STOP:STEPS", allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Stabilization tolerance on successive checkpoint differences
    #[arg(long, global = true, value_name = "X")]
    pub epsilon: Option<f64>,
    /// Number of trailing checkpoint differences judged
    #[arg(long, global = true, value_name = "N")]
    pub window: Option<usize>,
}

/// Flags merged over the config file, with defaults applied.
#[derive(Debug)]
pub struct Settings {
    seed: Option<u64>,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub grid: Option<String>,
    pub criterion: StabilizationCriterion,
    pub file: ExperimentConfig,
}

impl Settings {
    pub fn resolve(flags: &GlobalFlags) -> CliResult<Self> {
        let file = match &flags.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let samples = flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples < MIN_SAMPLES {
            return Err(CliError::Usage(format!("--samples must be at least {MIN_SAMPLES}, got {samples}")));
        }
        let samples = usize::try_from(samples).map_err(|_| CliError::Usage(format!("--samples {samples} too large")))?;
        let defaults = StabilizationCriterion::default();
        let criterion = StabilizationCriterion {
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(defaults.epsilon),
            window: flags.window.or(file.window).unwrap_or(defaults.window),
        };
        if !(criterion.epsilon > 0.0 && criterion.epsilon.is_finite()) {
            return Err(CliError::Usage(format!("--epsilon must be positive, got {}", criterion.epsilon)));
        }
        if criterion.window == 0 {
            return Err(CliError::Usage("--window must be at least 1".into()));
        }
        Ok(Settings {
            seed: flags.seed.or(file.seed),
            samples,
            out: flags.out.clone().or_else(|| file.out.clone()),
            format: flags.format.or(file.format),
            grid: flags.grid.clone().or_else(|| file.grid.clone()),
            criterion,
            file,
        })
    }

    /// Sampling commands refuse to run without an explicit seed.
    pub fn seed(&self) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Usage("a seed is required: pass --seed N or set \"seed\" in the config".into()))
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn grid_or(&self, default: &str) -> CliResult<Vec<f64>> {
        parse_grid(self.grid.as_deref().unwrap_or(default))
    }
}

/// Parses a number or π expression: "0.5", "pi", "-pi/2", "3pi/4",
/// "3*pi/4", "2π".
pub fn parse_angle(text: &str) -> CliResult<f64> {
    let bad = || CliError::Usage(format!("malformed angle '{text}'"));
    let s = text.trim().to_lowercase().replace('π', "pi");
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s.as_str(), None),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match den {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            value / d
        }
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// "START:STOP:STEPS" → STEPS evenly spaced points with both ends included.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::Usage(format!("malformed grid '{text}': {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(bad("expected START:STOP:STEPS"));
    };
    let (start, stop) = (parse_angle(start)?, parse_angle(stop)?);
    let steps: usize = steps.trim().parse().map_err(|_| bad("STEPS must be a positive integer"))?;
    match steps {
        0 => Err(bad("STEPS must be a positive integer")),
        1 => Ok(vec![start]),
        n => Ok((0..n)
            .map(|k| if k == n - 1 { stop } else { start + (stop - start) * k as f64 / (n - 1) as f64 })
            .collect()),
    }
}

/// "a,b,c,d" or "optimal".
pub fn parse_angle_list(text: &str) -> CliResult<[f64; 4]> {
    if text.trim().eq_ignore_ascii_case("optimal") {
        return Ok(OPTIMAL_ANGLES);
    }
    let values = text.split(',').map(parse_angle).collect::<CliResult<Vec<f64>>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| CliError::Usage(format!("expected four angles, got {}", v.len())))
}

/// γ₁, γ₂, γ′₁, γ′₂ maximizing |S|.
pub const OPTIMAL_ANGLES: [f64; 4] = [0.0, PI / 2.0, PI / 4.0, 3.0 * PI / 4.0];

impl AnglesValue {
    pub fn resolve(&self) -> CliResult<[f64; 4]> {
        match self {
            AnglesValue::Text(s) => parse_angle_list(s),
            AnglesValue::List(items) => {
                let values = items.iter().map(AngleValue::resolve).collect::<CliResult<Vec<f64>>>()?;
                values
                    .try_into()
                    .map_err(|v: Vec<f64>| CliError::Usage(format!("expected four angles, got {}", v.len())))
            }
        }
    }
}
