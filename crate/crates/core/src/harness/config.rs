use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsParams;
use crate::error::{Error, Result};
use crate::estimator::EstimatorConfig;
use crate::linalg::{ComplexMatrix, C64};
use crate::measurement::{JitterModel, Polarization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    QubitMixed,
    QubitPure,
    QubitOrthogonalPairs,
    Entangled,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::QubitMixed => "qubit-mixed",
            Mode::QubitPure => "qubit-pure",
            Mode::QubitOrthogonalPairs => "qubit-orthogonal-pairs",
            Mode::Entangled => "entangled",
        }
    }
}

/// Optional sample-size overrides. Anything left unset falls back to the
/// desk or paper-scale profile.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSizes {
    /// (n_r, n_theta, n_phi)
    pub mixed_grid: Option<[usize; 3]>,
    /// (n_theta, n_phi); orthogonal pairs split this grid in two.
    pub pure_grid: Option<[usize; 2]>,
    pub bell_count: Option<usize>,
}

/// Fully resolved sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResolvedSamples {
    pub mixed_grid: [usize; 3],
    pub pure_grid: [usize; 2],
    pub bell_count: usize,
}

impl ResolvedSamples {
    pub const DESK: Self = Self {
        mixed_grid: [8, 8, 8],
        pure_grid: [8, 8],
        bell_count: 50,
    };
    pub const PAPER: Self = Self {
        mixed_grid: [21, 21, 20],
        pure_grid: [21, 20],
        bell_count: 200,
    };
}

/// Jitter quadrature settings shared by every sigma in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub window_sigmas: f64,
    pub step_fraction: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let j = JitterModel::ideal();
        Self {
            window_sigmas: j.window_sigmas,
            step_fraction: j.step_fraction,
        }
    }
}

impl QuadratureConfig {
    pub fn jitter(&self, sigma: f64) -> Result<JitterModel> {
        let j = JitterModel {
            sigma,
            window_sigmas: self.window_sigmas,
            step_fraction: self.step_fraction,
        };
        j.validate()?;
        Ok(j)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Jitter values in units of T.
    pub sigma_list: Vec<f64>,
    /// Mean photon (pair) numbers per setting.
    pub photon_list: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub poisson: bool,
    /// Draw Pois(N·p) per setting instead of scaling p by a Pois(N) draw.
    #[serde(default)]
    pub sample_counts: bool,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub paper_scale: bool,
    /// Write one JSON line per reconstructed state.
    #[serde(default)]
    pub state_log: bool,
    /// Write the simulated count sets as CSV.
    #[serde(default)]
    pub dump_counts: bool,
    #[serde(default)]
    pub samples: SampleSizes,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub dynamics: DynamicsParams,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    /// Built-in sweep for each mode.
    pub fn preset(mode: Mode) -> Self {
        let sigma_list = match mode {
            Mode::QubitMixed | Mode::QubitPure => vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            Mode::QubitOrthogonalPairs => (0..=15).map(|i| i as f64 * 0.05).collect(),
            Mode::Entangled => (0..=10).map(|i| i as f64 * 0.025).collect(),
        };
        Self {
            mode,
            sigma_list,
            photon_list: vec![10.0, 100.0, 1000.0],
            seed: 0,
            output_dir: default_output_dir(),
            poisson: true,
            sample_counts: false,
            threads: 0,
            paper_scale: false,
            state_log: false,
            dump_counts: false,
            samples: SampleSizes::default(),
            estimator: EstimatorConfig::default(),
            dynamics: DynamicsParams::default(),
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_list.is_empty() || self.photon_list.is_empty() {
            return Err(Error::Config(
                "sigma_list and photon_list must be non-empty".into(),
            ));
        }
        if let Some(s) = self
            .sigma_list
            .iter()
            .find(|s| !(s.is_finite() && **s >= 0.0))
        {
            return Err(Error::Config(format!("sigma values must be >= 0, got {s}")));
        }
        if let Some(n) = self
            .photon_list
            .iter()
            .find(|n| !(n.is_finite() && **n > 0.0))
        {
            return Err(Error::Config(format!(
                "photon numbers must be > 0, got {n}"
            )));
        }
        let s = self.resolved_samples();
        let empty = match self.mode {
            Mode::QubitMixed => s.mixed_grid.contains(&0),
            Mode::QubitPure => s.pure_grid.contains(&0),
            Mode::QubitOrthogonalPairs => {
                s.pure_grid.contains(&0) || !s.pure_grid[1].is_multiple_of(2)
            }
            Mode::Entangled => s.bell_count == 0,
        };
        if empty {
            return Err(Error::Config(format!(
                "sample sizes {s:?} give no usable states for mode {}",
                self.mode.as_str()
            )));
        }
        self.estimator.validate()?;
        self.dynamics.validate()?;
        self.quadrature.jitter(0.0)?;
        Ok(())
    }

    pub fn resolved_samples(&self) -> ResolvedSamples {
        let base = if self.paper_scale {
            ResolvedSamples::PAPER
        } else {
            ResolvedSamples::DESK
        };
        ResolvedSamples {
            mixed_grid: self.samples.mixed_grid.unwrap_or(base.mixed_grid),
            pure_grid: self.samples.pure_grid.unwrap_or(base.pure_grid),
            bell_count: self.samples.bell_count.unwrap_or(base.bell_count),
        }
    }
}

/// Reference operator for a trajectory: a named polarization projector or
/// an explicit 2×2 matrix given row-major as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Named(String),
    Matrix([[f64; 2]; 4]),
}

impl OperatorSpec {
    pub fn label(&self) -> String {
        match self {
            OperatorSpec::Named(n) => n.clone(),
            OperatorSpec::Matrix(_) => "custom".into(),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            OperatorSpec::Named(name) => Polarization::parse(name)
                .map(Polarization::projector)
                .ok_or_else(|| Error::Config(format!("unknown polarization '{name}'"))),
            OperatorSpec::Matrix(entries) => {
                let data: Vec<C64> = entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                ComplexMatrix::from_row_major(2, &data)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    #[serde(default = "default_operator")]
    pub operator: OperatorSpec,
    #[serde(default = "default_trajectory_sigmas")]
    pub sigma_list: Vec<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub t_start: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub dynamics: DynamicsParams,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

fn default_operator() -> OperatorSpec {
    OperatorSpec::Named("H".into())
}

fn default_trajectory_sigmas() -> Vec<f64> {
    vec![0.0]
}

fn default_points() -> usize {
    500
}

fn default_t_end() -> f64 {
    2.0
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            operator: default_operator(),
            sigma_list: default_trajectory_sigmas(),
            points: default_points(),
            t_start: 0.0,
            t_end: default_t_end(),
            output_dir: default_output_dir(),
            dynamics: DynamicsParams::default(),
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl TrajectoryConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config("a trajectory needs at least 2 points".into()));
        }
        if self.t_end.partial_cmp(&self.t_start) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Config("t_end must exceed t_start".into()));
        }
        if self.sigma_list.is_empty() {
            return Err(Error::Config("sigma_list must be non-empty".into()));
        }
        for &s in &self.sigma_list {
            self.quadrature.jitter(s)?;
        }
        self.dynamics.validate()?;
        self.operator.matrix()?;
        Ok(())
    }

    /// Evenly spaced grid including both endpoints.
    pub fn time_grid(&self) -> Vec<f64> {
        let step = (self.t_end - self.t_start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k == self.points - 1 {
                    self.t_end
                } else {
                    self.t_start + step * k as f64
                }
            })
            .collect()
    }
}
