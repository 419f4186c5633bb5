//! Config-driven experiments and their result files.
//!
//! | command          | varies                 | output                          |
//! |------------------|------------------------|---------------------------------|
//! | `region`         | power-control grid     | rate region and hull per scheme |
//! | `sweep-m`        | antennas `M`           | constrained sum rate            |
//! | `sweep-pathloss` | center gain `beta_g`   | constrained sum rate            |
//! | `sweep-users`    | users `K`              | constrained sum rate            |
//! | `validate`       | nothing                | oracle vs closed-form checks    |

mod config;
mod output;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{Config, ExperimentConfig, GridConfig, GridPreset, OneOrMany, PowerConfig, ScenarioConfig};
pub use output::{emit_outputs, Format, REGION_HEADER, SWEEP_HEADER, VALIDATE_HEADER};

use crate::estimation::estimation_quality;
use crate::rates::{hardening_oracle_moments, no_csir_terms};
use crate::region::{constrained_sum_rate, sweep_rate_region, GridSpec, RateRegion, RegionError};
use crate::scenario::{validate_power, validate_scenario, PrelogMode, Regime, Scenario, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Region,
    SweepM,
    SweepPathloss,
    SweepUsers,
    Validate,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Region => "region",
            Command::SweepM => "sweep-m",
            Command::SweepPathloss => "sweep-pathloss",
            Command::SweepUsers => "sweep-users",
            Command::Validate => "validate",
        }
    }

    /// File stem of the result files.
    pub fn stem(self) -> String {
        self.label().replace('-', "_")
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Evaluation { context: String, source: RegionError },
    #[error("{0} sweep point(s) infeasible")]
    Infeasible(usize),
    #[error("{failed} of {total} validation checks failed")]
    Validation { failed: usize, total: usize },
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Infeasible(_) => 3,
            ExperimentError::Validation { .. } => 4,
            ExperimentError::Io { .. } | ExperimentError::Evaluation { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentError::Config(_) => "config",
            ExperimentError::Io { .. } => "io",
            ExperimentError::Evaluation { .. } => "evaluation",
            ExperimentError::Infeasible(_) => "infeasible",
            ExperimentError::Validation { .. } => "validation",
        }
    }

    /// Machine-readable report.
    pub fn report(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() })
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config: Config,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub prelog: Option<PrelogMode>,
}

impl ExperimentSpec {
    pub fn load(path: &Path, out: PathBuf, formats: Vec<Format>, ov: &Overrides) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config = Config::from_toml(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::from_config(config, out, formats, ov)
    }

    pub fn from_config(
        mut config: Config,
        out: PathBuf,
        formats: Vec<Format>,
        ov: &Overrides,
    ) -> Result<Self, ExperimentError> {
        if let Some(seed) = ov.seed {
            config.mc.base_seed = seed;
        }
        if let Some(trials) = ov.trials {
            config.mc.trials = trials;
        }
        if let Some(prelog) = ov.prelog {
            config.scenario.prelog_mode = prelog;
        }
        let command = ov
            .command
            .or(config.experiment.command)
            .ok_or_else(|| ExperimentError::Config("no command given on the command line or in [experiment]".into()))?;
        config.experiment.command = Some(command);
        validate_scenario(config.scenario.scenario()).map_err(|e| ExperimentError::Config(e.to_string()))?;
        config.mc.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
        let formats = if formats.is_empty() { vec![Format::Csv, Format::Json] } else { formats };
        Ok(Self { command, config, out, formats })
    }

    pub fn grid(&self) -> Option<GridSpec> {
        match self.command {
            Command::Region => Some(self.config.grid.spec(GridPreset::Default)),
            Command::Validate => None,
            _ => Some(self.config.grid.spec(GridPreset::SumRate)),
        }
    }

    fn sweep_values(&self) -> Vec<f64> {
        if let Some(v) = &self.config.experiment.values {
            return v.clone();
        }
        match self.command {
            Command::SweepM => vec![20.0, 50.0, 100.0],
            Command::SweepPathloss => vec![10.0, 20.0, 50.0, 100.0, 200.0],
            Command::SweepUsers => vec![2.0, 4.0, 8.0],
            Command::Region | Command::Validate => Vec::new(),
        }
    }
}

/// One row of a sum-rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x_value: f64,
    pub scheme: Scheme,
    pub sum_rate: Option<f64>,
    pub target_edge_rate: f64,
    pub feasible: bool,
}

/// One oracle-versus-closed-form comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub check: String,
    pub scheme: Scheme,
    pub user: usize,
    pub oracle: f64,
    pub expected: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ValidationCheck {
    fn new(check: &str, scheme: Scheme, user: usize, oracle: f64, expected: f64, tolerance: f64) -> Self {
        let rel_error = ((oracle - expected) / expected).abs();
        Self { check: check.into(), scheme, user, oracle, expected, rel_error, tolerance, pass: rel_error <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentResult {
    Region(Vec<RateRegion>),
    Sweep(Vec<SweepRow>),
    Validate(Vec<ValidationCheck>),
}

fn evaluation(context: String) -> impl FnOnce(RegionError) -> ExperimentError {
    move |source| ExperimentError::Evaluation { context, source }
}

fn run_region(spec: &ExperimentSpec, grid: &GridSpec) -> Result<Vec<RateRegion>, ExperimentError> {
    let sc = spec.config.scenario.scenario();
    let exp = &spec.config.experiment;
    let regimes = exp.regimes.clone().unwrap_or_else(|| Regime::ALL.to_vec());
    let schemes = exp.schemes.clone().unwrap_or_else(|| vec![Scheme::Noma, Scheme::Orthogonal]);
    let mut out: Vec<RateRegion> = Vec::new();
    for &regime in &regimes {
        for &scheme in &schemes {
            let effective = if scheme == Scheme::Baseline { Regime::NoCsir } else { regime };
            if out.iter().any(|r| r.scheme == scheme && r.regime == effective) {
                continue;
            }
            let region = sweep_rate_region(&sc, effective, scheme, grid, &spec.config.mc)
                .map_err(evaluation(format!("region {} {}", effective.label(), scheme)))?;
            out.push(region);
        }
    }
    Ok(out)
}

fn run_sweep(spec: &ExperimentSpec, grid: &GridSpec) -> Result<Vec<SweepRow>, ExperimentError> {
    let cfg = &spec.config.scenario;
    let regime = spec.config.experiment.regime.unwrap_or(Regime::DlPilot);
    let mut rows = Vec::new();
    for x in spec.sweep_values() {
        let as_count = |what: &str| -> Result<usize, ExperimentError> {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(ExperimentError::Config(format!("{what} sweep value {x} is not a positive integer")))
            }
        };
        let sc = match spec.command {
            Command::SweepM => cfg.variant(as_count("antenna")?, cfg.k, cfg.beta_g_first()),
            Command::SweepPathloss => cfg.variant(cfg.m, cfg.k, x),
            _ => cfg.variant(cfg.m, as_count("user")?, cfg.beta_g_first()),
        };
        validate_scenario(sc.clone()).map_err(|e| ExperimentError::Config(format!("sweep value {x}: {e}")))?;
        let res = constrained_sum_rate(&sc, regime, grid, &spec.config.mc)
            .map_err(evaluation(format!("{} at {x}", spec.command.label())))?;
        let target = res.target_edge_rate();
        for o in &res.optima {
            rows.push(SweepRow {
                x_value: x,
                scheme: o.scheme,
                sum_rate: o.sum_rate(),
                target_edge_rate: target,
                feasible: o.feasible(),
            });
        }
    }
    Ok(rows)
}

/// Relative tolerance of the SINR-term checks.
pub const TERM_TOLERANCE: f64 = 0.01;
/// Relative tolerance of the gain-variance check.
pub const VARIANCE_TOLERANCE: f64 = 0.02;

/// Compares the simulated hardening moments with the closed forms at the
/// configured operating point. Antithetic sampling is always used here.
pub fn validation_checks(config: &Config) -> Result<Vec<ValidationCheck>, ExperimentError> {
    let sc: Scenario = config.scenario.scenario();
    let mc = config.mc.with_antithetic(true);
    let mut checks = Vec::new();
    for scheme in [Scheme::Noma, Scheme::Orthogonal, Scheme::Baseline] {
        let pc = validate_power(config.power.power(&sc, scheme), &sc, scheme)
            .map_err(|e| ExperimentError::Config(format!("[power] for scheme {scheme}: {e}")))?;
        let oracle = hardening_oracle_moments(&sc, &pc, scheme, &mc).map_err(|source| ExperimentError::Evaluation {
            context: format!("oracle for scheme {scheme}"),
            source: RegionError::Evaluator { index: 0, source },
        })?;
        let closed = no_csir_terms(&sc, &pc, scheme);
        let lambda = estimation_quality(&sc, &pc, scheme);
        for (u, (o, c)) in oracle.iter().zip(&closed).enumerate() {
            if c.signal > 0.0 {
                checks.push(ValidationCheck::new("signal", scheme, u, o.signal_power, c.signal, TERM_TOLERANCE));
            }
            if c.coherent > 0.0 {
                checks.push(ValidationCheck::new(
                    "coherent_interference",
                    scheme,
                    u,
                    o.coherent_self_interference,
                    c.coherent,
                    TERM_TOLERANCE,
                ));
            }
            checks.push(ValidationCheck::new("noncoherent", scheme, u, o.noncoherent(), c.noncoherent, TERM_TOLERANCE));
            checks.push(ValidationCheck::new("sinr", scheme, u, o.sinr(), c.sinr(), TERM_TOLERANCE));
            let mean = (sc.m as f64 * lambda.user(u)).sqrt();
            if mean > 0.0 {
                checks.push(ValidationCheck::new("gain_mean", scheme, u, o.mean_gain.re, mean, TERM_TOLERANCE));
                checks.push(ValidationCheck::new("gain_variance", scheme, u, o.gain_var, 1.0, VARIANCE_TOLERANCE));
            }
        }
    }
    Ok(checks)
}

/// Runs the experiment and writes its result files. Infeasible sweep points
/// and failed checks are reported as errors after the files are written.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<(ExperimentResult, Vec<PathBuf>), ExperimentError> {
    let grid = spec.grid();
    let result = match (spec.command, &grid) {
        (Command::Region, Some(g)) => ExperimentResult::Region(run_region(spec, g)?),
        (Command::Validate, _) => ExperimentResult::Validate(validation_checks(&spec.config)?),
        (_, Some(g)) => ExperimentResult::Sweep(run_sweep(spec, g)?),
        (_, None) => unreachable!("every sweep has a grid"),
    };
    let files = emit_outputs(spec, &result)?;
    match &result {
        ExperimentResult::Sweep(rows) => {
            let infeasible = rows.iter().filter(|r| !r.feasible).count();
            if infeasible > 0 {
                return Err(ExperimentError::Infeasible(infeasible));
            }
        }
        ExperimentResult::Validate(checks) => {
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(ExperimentError::Validation { failed, total: checks.len() });
            }
        }
        ExperimentResult::Region(_) => {}
    }
    Ok((result, files))
}
