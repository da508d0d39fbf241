//! Command-line flags, the optional TOML config file, and the validated
//! configuration they resolve to. Flags win over file values, file values
//! win over defaults.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "spinmzi",
    version,
    about = "QFI and phase-sensitivity sweeps for a spin-coherent Mach-Zehnder interferometer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// QFIs and Cramér-Rao bounds over a grid of first-splitter transmissivities.
    QfiSweep,
    /// Detection-scheme sensitivities over a grid of phases.
    SensitivitySweep,
    /// Closed forms against brute-force oracles at seeded random points.
    Verify,
    /// Amplitudes, photon distribution and moments of the input state.
    StateInfo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::QfiSweep => "qfi-sweep",
            Command::SensitivitySweep => "sensitivity-sweep",
            Command::Verify => "verify",
            Command::StateInfo => "state-info",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Smi,
    Di,
    Bh,
}

impl From<SchemeArg> for spinmzi::Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Smi => spinmzi::Scheme::Smi,
            SchemeArg::Di => spinmzi::Scheme::Di,
            SchemeArg::Bh => spinmzi::Scheme::Bh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioArg {
    A,
    B,
    C,
}

impl From<ScenarioArg> for spinmzi::Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::A => spinmzi::Scenario::SingleArm,
            ScenarioArg::B => spinmzi::Scenario::Symmetric,
            ScenarioArg::C => spinmzi::Scenario::TwoParam,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Flat TOML file with any of the keys below (snake_case).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Spin j (positive half-integer).
    #[arg(long, global = true)]
    pub j: Option<f64>,
    /// |λ| of the spin-coherent parameter.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda_mag: Option<f64>,
    /// arg λ in radians.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda_phase: Option<f64>,
    /// First-splitter transmissivity τ² (sensitivity sweeps, state-independent settings).
    #[arg(long, global = true)]
    pub tau_sq: Option<f64>,
    /// Second-splitter transmissivity τ′².
    #[arg(long, global = true)]
    pub tau_p_sq: Option<f64>,
    /// First point of the τ² grid (qfi-sweep).
    #[arg(long, global = true)]
    pub tau_sq_start: Option<f64>,
    /// Last point of the τ² grid (qfi-sweep).
    #[arg(long, global = true)]
    pub tau_sq_stop: Option<f64>,
    /// Number of τ² grid points (qfi-sweep).
    #[arg(long, global = true)]
    pub tau_sq_count: Option<usize>,
    /// First point of the φ grid (sensitivity-sweep).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub phi_start: Option<f64>,
    /// Last point of the φ grid.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub phi_stop: Option<f64>,
    /// Number of φ grid points.
    #[arg(long, global = true)]
    pub phi_count: Option<usize>,
    /// Detection scheme; all three when omitted.
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Phase placement: a single arm, b symmetric, c two-parameter.
    #[arg(long, global = true, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Fixed local-oscillator phase for homodyne; tracks φ when omitted.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub phi_l: Option<f64>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed of the random points drawn by `verify`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Add brute-force oracle columns to sweeps.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Replace every verification tolerance with this value.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Finite-difference step of the oracles.
    #[arg(long, global = true)]
    pub step: Option<f64>,
}

/// Contents of the `--config` file.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub j: Option<f64>,
    pub lambda_mag: Option<f64>,
    pub lambda_phase: Option<f64>,
    pub tau_sq: Option<f64>,
    pub tau_p_sq: Option<f64>,
    pub tau_sq_start: Option<f64>,
    pub tau_sq_stop: Option<f64>,
    pub tau_sq_count: Option<usize>,
    pub phi_start: Option<f64>,
    pub phi_stop: Option<f64>,
    pub phi_count: Option<usize>,
    pub scheme: Option<SchemeArg>,
    pub scenario: Option<ScenarioArg>,
    pub phi_l: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub oracle: Option<bool>,
    pub tolerance: Option<f64>,
    pub step: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

pub const MAX_TWO_J: usize = 2000;

/// Fully resolved and validated configuration. Serialized into the
/// metadata of every output (the output path excepted, so that reports
/// written to different files stay byte-identical).
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub j: f64,
    pub lambda_mag: f64,
    pub lambda_phase: f64,
    pub tau_sq: f64,
    pub tau_p_sq: f64,
    pub tau_sq_start: f64,
    pub tau_sq_stop: f64,
    pub tau_sq_count: usize,
    pub phi_start: f64,
    pub phi_stop: f64,
    pub phi_count: usize,
    pub scheme: Option<SchemeArg>,
    pub scenario: ScenarioArg,
    pub phi_l: Option<f64>,
    pub format: Format,
    pub seed: u64,
    pub oracle: bool,
    pub tolerance: Option<f64>,
    pub step: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(command: Command, flags: &Flags, file: &FileConfig) -> Result<Self, CliError> {
        let cfg = RunConfig {
            command,
            j: flags.j.or(file.j).unwrap_or(1.0),
            lambda_mag: flags.lambda_mag.or(file.lambda_mag).unwrap_or(1.0),
            lambda_phase: flags.lambda_phase.or(file.lambda_phase).unwrap_or(0.0),
            tau_sq: flags.tau_sq.or(file.tau_sq).unwrap_or(0.5),
            tau_p_sq: flags.tau_p_sq.or(file.tau_p_sq).unwrap_or(0.5),
            tau_sq_start: flags.tau_sq_start.or(file.tau_sq_start).unwrap_or(0.0),
            tau_sq_stop: flags.tau_sq_stop.or(file.tau_sq_stop).unwrap_or(1.0),
            tau_sq_count: flags.tau_sq_count.or(file.tau_sq_count).unwrap_or(101),
            phi_start: flags.phi_start.or(file.phi_start).unwrap_or(0.0),
            phi_stop: flags.phi_stop.or(file.phi_stop).unwrap_or(TAU),
            phi_count: flags.phi_count.or(file.phi_count).unwrap_or(201),
            scheme: flags.scheme.or(file.scheme),
            scenario: flags.scenario.or(file.scenario).unwrap_or(ScenarioArg::A),
            phi_l: flags.phi_l.or(file.phi_l),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            seed: flags.seed.or(file.seed).unwrap_or(42),
            oracle: flags.oracle || file.oracle.unwrap_or(false),
            tolerance: flags.tolerance.or(file.tolerance),
            step: flags
                .step
                .or(file.step)
                .unwrap_or(spinmzi::qfi::DEFAULT_STEP),
            out: flags.out.clone().or_else(|| file.out.clone()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let two_j = self.j * 2.0;
        if !(two_j.is_finite() && two_j >= 1.0 && two_j.fract() == 0.0 && two_j <= MAX_TWO_J as f64)
        {
            return bad(format!(
                "j must be a positive half-integer up to {}, got {}",
                MAX_TWO_J / 2,
                self.j
            ));
        }
        if !(self.lambda_mag.is_finite() && self.lambda_mag >= 0.0) {
            return bad(format!(
                "lambda-mag must be finite and non-negative, got {}",
                self.lambda_mag
            ));
        }
        for (name, v) in [
            ("lambda-phase", self.lambda_phase),
            ("phi-start", self.phi_start),
            ("phi-stop", self.phi_stop),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if let Some(v) = self.phi_l.filter(|v| !v.is_finite()) {
            return bad(format!("phi-l must be finite, got {v}"));
        }
        for (name, v) in [
            ("tau-sq", self.tau_sq),
            ("tau-p-sq", self.tau_p_sq),
            ("tau-sq-start", self.tau_sq_start),
            ("tau-sq-stop", self.tau_sq_stop),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        for (name, start, stop, count) in [
            (
                "tau-sq",
                self.tau_sq_start,
                self.tau_sq_stop,
                self.tau_sq_count,
            ),
            ("phi", self.phi_start, self.phi_stop, self.phi_count),
        ] {
            if count < 2 {
                return bad(format!("{name}-count must be at least 2, got {count}"));
            }
            if start >= stop {
                return bad(format!(
                    "{name} range must be ordered, got start {start} >= stop {stop}"
                ));
            }
        }
        if let Some(t) = self.tolerance.filter(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad(format!(
                "tolerance must be finite and non-negative, got {t}"
            ));
        }
        if !(1e-8..=1e-2).contains(&self.step) {
            return bad(format!("step must lie in [1e-8, 1e-2], got {}", self.step));
        }
        if self.command == Command::SensitivitySweep
            && self.scenario == ScenarioArg::C
            && self.scheme.is_none_or(|s| s == SchemeArg::Bh)
        {
            return bad("homodyne sensitivity needs scenario a or b".into());
        }
        Ok(())
    }

    pub fn params(&self) -> spinmzi::Su2CoherentParamsF64 {
        spinmzi::Su2CoherentParamsF64::from_two_j(
            (self.j * 2.0) as usize,
            num_complex::Complex64::from_polar(self.lambda_mag, self.lambda_phase),
        )
        .expect("validated spin")
    }

    pub fn bs1(&self) -> spinmzi::BeamSplitterF64 {
        spinmzi::BeamSplitterF64::from_transmissivity(self.tau_sq)
            .expect("validated transmissivity")
    }

    pub fn bs2(&self) -> spinmzi::BeamSplitterF64 {
        spinmzi::BeamSplitterF64::from_transmissivity(self.tau_p_sq)
            .expect("validated transmissivity")
    }

    pub fn schemes(&self) -> Vec<spinmzi::Scheme> {
        match self.scheme {
            Some(s) => vec![s.into()],
            None => spinmzi::Scheme::ALL.to_vec(),
        }
    }
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    let step = (stop - start) / (count - 1) as f64;
    (0..count)
        .map(|k| {
            if k + 1 == count {
                stop
            } else {
                start + step * k as f64
            }
        })
        .collect()
}
