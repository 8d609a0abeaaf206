//! JSON experiment configs for the `plmc-lab` binary.
//!
//! One config file describes a sampling problem (body, potential, start) plus
//! the knobs of whichever study is run against it. Fields irrelevant to a
//! study are ignored by that study; missing required fields produce
//! validation errors naming the field. Parse errors carry serde_json's
//! line/column messages.

use crate::chains::{ChainConfig, ChainError, DEFAULT_REFINEMENT};
use crate::geometry::{ConvexBody, GeometryError};
use crate::potentials::{Potential, PotentialError};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("could not read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config field {field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("missing config field {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

/// Convex body description.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    WholeSpace { dim: usize },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Halfspaces { normals: Vec<Vec<f64>>, offsets: Vec<f64>, interior: Vec<f64> },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody, ConfigError> {
        Ok(match self {
            BodySpec::WholeSpace { dim } => ConvexBody::whole_space(*dim)?,
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius)?,
            BodySpec::Box { lower, upper } => ConvexBody::axis_box(lower.clone(), upper.clone())?,
            BodySpec::Halfspaces { normals, offsets, interior } => {
                ConvexBody::halfspace_intersection(
                    normals.clone(),
                    offsets.clone(),
                    interior.clone(),
                )?
            }
        })
    }
}

/// One affine piece `a . x + b`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKindSpec {
    Zero { dim: usize },
    Linear { c: Vec<f64> },
    AffineMax { pieces: Vec<PieceSpec> },
    ScaledNorm { center: Vec<f64>, slope: f64 },
    Quadratic { dim: usize, alpha: f64 },
}

/// Potential description; `known_infimum` pins the infimum over the body
/// when the caller knows it (skips the numerical estimate).
#[derive(Debug, Clone, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKindSpec,
    #[serde(default)]
    pub known_infimum: Option<f64>,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential, ConfigError> {
        let potential = match &self.kind {
            PotentialKindSpec::Zero { dim } => Potential::zero(*dim)?,
            PotentialKindSpec::Linear { c } => Potential::linear(c.clone())?,
            PotentialKindSpec::AffineMax { pieces } => Potential::affine_max(
                pieces.iter().map(|p| (p.a.clone(), p.b)).collect(),
            )?,
            PotentialKindSpec::ScaledNorm { center, slope } => {
                Potential::scaled_norm(center.clone(), *slope)?
            }
            PotentialKindSpec::Quadratic { dim, alpha } => Potential::quadratic(*dim, *alpha)?,
        };
        Ok(match self.known_infimum {
            Some(v) => potential.with_known_infimum(v),
            None => potential,
        })
    }
}

/// Problem constants a study may need. Omitted values are computed from the
/// problem where possible (`r0`, `sigma0`) or required (`c_ls`, `c_p`).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub r0: Option<f64>,
    pub sigma0: Option<f64>,
    pub c_ls: Option<f64>,
    pub c_p: Option<f64>,
    /// Chi-square divergence of the start distribution from the target,
    /// for the weaker-functional-inequality bound.
    pub chi2_0: Option<f64>,
}

/// Step-size schedule request: accuracy target and the largest admissible
/// iteration count.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub eps: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    /// Optional sweep; when present the schedule study emits one row per
    /// value in addition to `eps`.
    #[serde(default)]
    pub eps_grid: Vec<f64>,
}

fn default_max_steps() -> u64 {
    1_000_000_000_000
}

/// Reference sampler for distribution comparisons.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    UniformBall { radius: f64 },
    TruncatedExponential { rate: f64, length: f64 },
    Rejection {
        #[serde(default = "default_max_tries")]
        max_tries: u64,
    },
}

fn default_max_tries() -> u64 {
    100_000
}

/// Wasserstein comparison knobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct W2Spec {
    pub oracle: OracleSpec,
    #[serde(default = "default_w2_samples")]
    pub samples: usize,
    /// Random projections for the sliced distance in dimension > 1.
    #[serde(default = "default_projections")]
    pub projections: usize,
}

fn default_w2_samples() -> usize {
    512
}

fn default_projections() -> usize {
    64
}

fn default_replicas() -> u64 {
    16
}

fn default_refinement() -> usize {
    DEFAULT_REFINEMENT
}

fn default_oracle_samples() -> usize {
    4096
}

/// Top-level experiment description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub body: BodySpec,
    pub potential: PotentialSpec,
    /// Start point; defaults to the body's canonical interior point.
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub steps: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    /// Iterate recording stride; 0 picks one that keeps about 256 points.
    #[serde(default)]
    pub record_stride: u64,
    /// Step sizes for the coupled-error sweep (falls back to `eta`).
    #[serde(default)]
    pub eta_grid: Vec<f64>,
    /// Physical time horizon; studies derive step counts from it when
    /// `steps` is absent.
    #[serde(default)]
    pub horizon: Option<f64>,
    /// Observation times for the local-time study.
    #[serde(default)]
    pub times: Vec<f64>,
    /// Second start for coupled-diffusion contraction runs.
    #[serde(default)]
    pub x0_alt: Option<Vec<f64>>,
    #[serde(default)]
    pub constants: ConstantsSpec,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub w2: Option<W2Spec>,
    /// Monte Carlo sample count for warm-start and infimum estimates.
    #[serde(default = "default_oracle_samples")]
    pub oracle_samples: usize,
    /// Rayon worker threads; 0 keeps the library default.
    #[serde(default)]
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        Self::from_str(&std::fs::read_to_string(path)?)
    }

    pub fn build_body(&self) -> Result<ConvexBody, ConfigError> {
        self.body.build()
    }

    pub fn build_potential(&self) -> Result<Potential, ConfigError> {
        self.potential.build()
    }

    /// The start point: explicit `x0` or the body's interior point.
    pub fn start_point(&self, body: &ConvexBody) -> Result<Vec<f64>, ConfigError> {
        match &self.x0 {
            Some(x0) => {
                if x0.len() != body.dim() {
                    return Err(invalid(
                        "x0",
                        format!("has dimension {}, body has {}", x0.len(), body.dim()),
                    ));
                }
                Ok(x0.clone())
            }
            None => Ok(body.interior_point()),
        }
    }

    pub fn require_eta(&self) -> Result<f64, ConfigError> {
        match self.eta {
            Some(eta) if eta > 0.0 && eta.is_finite() => Ok(eta),
            Some(eta) => Err(invalid("eta", format!("{eta} must be positive and finite"))),
            None => Err(ConfigError::Missing("eta")),
        }
    }

    /// Step count: explicit `steps`, or derived from `horizon / eta`.
    pub fn resolve_steps(&self, eta: f64) -> Result<u64, ConfigError> {
        if let Some(steps) = self.steps {
            if steps == 0 {
                return Err(invalid("steps", "must be positive"));
            }
            return Ok(steps);
        }
        if let Some(horizon) = self.horizon {
            if !(horizon > 0.0 && horizon.is_finite()) {
                return Err(invalid("horizon", format!("{horizon} must be positive and finite")));
            }
            return Ok((horizon / eta).ceil().max(1.0) as u64);
        }
        Err(ConfigError::Missing("steps (or horizon)"))
    }

    /// Recording stride that keeps roughly 256 points when unset.
    pub fn resolve_record_stride(&self, steps: u64) -> u64 {
        if self.record_stride > 0 {
            self.record_stride
        } else {
            (steps / 256).max(1)
        }
    }

    /// Builds the chain config for direct sampling runs (explicit `eta`).
    pub fn build_chain(&self) -> Result<ChainConfig, ConfigError> {
        let body = self.build_body()?;
        let potential = self.build_potential()?;
        let x0 = self.start_point(&body)?;
        let eta = self.require_eta()?;
        let steps = self.resolve_steps(eta)?;
        Ok(ChainConfig::new(body, potential, x0, eta, steps, self.seed, 0)?)
    }

    pub fn require_schedule(&self) -> Result<&ScheduleSpec, ConfigError> {
        self.schedule.as_ref().ok_or(ConfigError::Missing("schedule"))
    }

    pub fn require_w2(&self) -> Result<&W2Spec, ConfigError> {
        self.w2.as_ref().ok_or(ConfigError::Missing("w2"))
    }

    pub fn require_c_ls(&self) -> Result<f64, ConfigError> {
        match self.constants.c_ls {
            Some(v) if v > 0.0 && v.is_finite() => Ok(v),
            Some(v) => Err(invalid("constants.c_ls", format!("{v} must be positive"))),
            None => Err(ConfigError::Missing("constants.c_ls")),
        }
    }

    pub fn require_c_p(&self) -> Result<f64, ConfigError> {
        match self.constants.c_p {
            Some(v) if v > 0.0 && v.is_finite() => Ok(v),
            Some(v) => Err(invalid("constants.c_p", format!("{v} must be positive"))),
            None => Err(ConfigError::Missing("constants.c_p")),
        }
    }
}
