//! The projected sampler, its reflected reference diffusion, and exact
//! couplings between them.
//!
//! One coarse step of the sampler is
//!
//! ```text
//! x_{k+1} = P_K( x_k + xi_{k+1} - (eta/2) g(x_k) )
//! ```
//!
//! The reference diffusion is simulated by the same scheme at step
//! `delta = eta / m` (`m` = refinement); its projection displacements
//! accumulate into a boundary local-time ledger: each fine step's
//! `|y - P_K(y)|` is the local-time increment and `y - P_K(y)` the reflection
//! vector increment.
//!
//! Coupled runs drive both chains from one Brownian path: the sampler
//! consumes the exact sums of the fine increments the reference consumes
//! (see [`crate::rng::BrownianSource`]), so the per-step distance
//! `|X_{k eta} - x_k|` estimates the transport error of the scheme with no
//! extra coupling slack.

use crate::geometry::{ConvexBody, GeometryError, DEFAULT_PROJECTION_TOL};
use crate::potentials::{Potential, PotentialError};
use crate::rng::BrownianSource;
use crate::vecmath::{dist_sq, norm, standard_error};
use rayon::prelude::*;
use thiserror::Error;

/// Default refinement of the reference diffusion (fine steps per coarse step).
pub const DEFAULT_REFINEMENT: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("config dimensions disagree: body {body}, potential {potential}, start {start}")]
    DimensionMismatch { body: usize, potential: usize, start: usize },
    #[error("start point lies outside the body")]
    StartOutsideBody,
    #[error("time step too large: eta = {eta} must be below n / L^2 = {limit}")]
    StepTooLarge { eta: f64, limit: f64 },
    #[error("invalid chain config: {0}")]
    InvalidConfig(String),
    #[error("gradient growth violated at |x| = {at_norm:.6}: |g| = {gradient_norm:.6} > beta (|x| + 1) = {allowed:.6}")]
    GrowthViolation { at_norm: f64, gradient_norm: f64, allowed: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Everything one chain run depends on. Construction validates the start and
/// the step-size hypothesis `eta < n / L^2` (for `L > 0`); the stored
/// Lipschitz constant is the one the validation used.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub body: ConvexBody,
    pub potential: Potential,
    pub x0: Vec<f64>,
    pub eta: f64,
    pub steps: u64,
    pub seed: u64,
    pub replica_id: u64,
    lipschitz: f64,
}

impl ChainConfig {
    pub fn new(
        body: ConvexBody,
        potential: Potential,
        x0: Vec<f64>,
        eta: f64,
        steps: u64,
        seed: u64,
        replica_id: u64,
    ) -> Result<Self, ChainError> {
        let lipschitz = potential.lipschitz_constant(&body)?;
        Self::with_lipschitz(body, potential, x0, eta, steps, seed, replica_id, lipschitz)
    }

    /// Like [`ChainConfig::new`] but with a caller-pinned Lipschitz constant
    /// for the step-size check (used when a growth bound, not the exact
    /// supremum, defines `L`).
    #[allow(clippy::too_many_arguments)]
    pub fn with_lipschitz(
        body: ConvexBody,
        potential: Potential,
        x0: Vec<f64>,
        eta: f64,
        steps: u64,
        seed: u64,
        replica_id: u64,
        lipschitz: f64,
    ) -> Result<Self, ChainError> {
        let n = body.dim();
        if n != potential.dim() || n != x0.len() {
            return Err(ChainError::DimensionMismatch {
                body: n,
                potential: potential.dim(),
                start: x0.len(),
            });
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(ChainError::InvalidConfig(format!("eta = {eta} must be positive")));
        }
        if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
            return Err(ChainError::InvalidConfig(format!(
                "lipschitz constant {lipschitz} must be finite and nonnegative"
            )));
        }
        if !body.contains(&x0, DEFAULT_PROJECTION_TOL)? {
            return Err(ChainError::StartOutsideBody);
        }
        if lipschitz > 0.0 {
            let limit = n as f64 / (lipschitz * lipschitz);
            if eta >= limit {
                return Err(ChainError::StepTooLarge { eta, limit });
            }
        }
        Ok(ChainConfig { body, potential, x0, eta, steps, seed, replica_id, lipschitz })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// The Lipschitz constant used for validation and bounds.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn with_replica(&self, replica_id: u64) -> ChainConfig {
        let mut cfg = self.clone();
        cfg.replica_id = replica_id;
        cfg
    }
}

/// Boundary bookkeeping of a reference run: cumulative local time `ell`,
/// cumulative reflection vector `phi_total`, and their per-coarse-step
/// increments. Within one fine step the vector increment's norm equals the
/// local-time increment by construction; coarse sums only obey `<=`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeLedger {
    pub ell: f64,
    pub phi_total: Vec<f64>,
    pub ell_steps: Vec<f64>,
    pub phi_steps: Vec<Vec<f64>>,
}

impl LocalTimeLedger {
    fn new(dim: usize, steps: usize) -> Self {
        LocalTimeLedger {
            ell: 0.0,
            phi_total: vec![0.0; dim],
            ell_steps: Vec::with_capacity(steps),
            phi_steps: Vec::with_capacity(steps),
        }
    }

    /// Cumulative local time after each coarse step (index 0 = after step 1).
    pub fn cumulative_ell(&self) -> Vec<f64> {
        let mut total = 0.0;
        self.ell_steps
            .iter()
            .map(|d| {
                total += d;
                total
            })
            .collect()
    }
}

/// A chain run: points recorded at stride multiples (plus start and final),
/// the final point, and the boundary ledger for reference runs.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub recorded: Vec<(u64, Vec<f64>)>,
    pub final_point: Vec<f64>,
    pub ledger: Option<LocalTimeLedger>,
}

/// One projected step from `x` under increment `xi`.
pub fn plmc_step(
    body: &ConvexBody,
    potential: &Potential,
    x: &[f64],
    xi: &[f64],
    eta: f64,
) -> Result<Vec<f64>, ChainError> {
    let g = potential.min_norm_subgradient(x)?;
    let y: Vec<f64> = x
        .iter()
        .zip(xi)
        .zip(&g)
        .map(|((xj, xij), gj)| xj + xij - 0.5 * eta * gj)
        .collect();
    Ok(body.project(&y, DEFAULT_PROJECTION_TOL)?)
}

struct Recorder {
    stride: u64,
    recorded: Vec<(u64, Vec<f64>)>,
}

impl Recorder {
    fn new(stride: u64, x0: &[f64]) -> Self {
        Recorder { stride, recorded: vec![(0, x0.to_vec())] }
    }

    fn record(&mut self, step: u64, x: &[f64]) {
        if self.stride > 0 && step % self.stride == 0 {
            self.recorded.push((step, x.to_vec()));
        }
    }

    fn finish(mut self, steps: u64, x: &[f64]) -> Vec<(u64, Vec<f64>)> {
        if self.recorded.last().map(|(s, _)| *s) != Some(steps) {
            self.recorded.push((steps, x.to_vec()));
        }
        self.recorded
    }
}

/// Runs the sampler for `cfg.steps` coarse steps. `record_stride = s` keeps
/// every s-th iterate (0 keeps only start and final); the start and final
/// points are always present. Deterministic in `(seed, replica_id, config)`.
pub fn run_plmc(cfg: &ChainConfig, record_stride: u64) -> Result<Trajectory, ChainError> {
    let n = cfg.dim();
    let mut source = BrownianSource::new(cfg.seed, cfg.replica_id, n, cfg.eta, 1);
    let mut x = cfg.x0.clone();
    let mut xi = vec![0.0; n];
    let mut fine = vec![0.0; n];
    let mut recorder = Recorder::new(record_stride, &x);
    for step in 1..=cfg.steps {
        source.next_step(&mut fine, &mut xi);
        x = plmc_step(&cfg.body, &cfg.potential, &x, &xi, cfg.eta)?;
        recorder.record(step, &x);
    }
    Ok(Trajectory {
        recorded: recorder.finish(cfg.steps, &x),
        final_point: x,
        ledger: None,
    })
}

/// Advances the reference chain through the `refinement` fine steps of one
/// coarse step, accumulating boundary displacements into the ledger.
fn reference_coarse_step(
    cfg: &ChainConfig,
    x: &mut Vec<f64>,
    fine: &[f64],
    refinement: usize,
    delta: f64,
    ledger: Option<&mut LocalTimeLedger>,
) -> Result<(), ChainError> {
    let n = x.len();
    let mut ell_step = 0.0;
    let mut phi_step = vec![0.0; n];
    for row in 0..refinement {
        let zeta = &fine[row * n..(row + 1) * n];
        let g = cfg.potential.min_norm_subgradient(x)?;
        let y: Vec<f64> = x
            .iter()
            .zip(zeta)
            .zip(&g)
            .map(|((xj, zj), gj)| xj + zj - 0.5 * delta * gj)
            .collect();
        let projected = cfg.body.project(&y, DEFAULT_PROJECTION_TOL)?;
        let mut disp_sq = 0.0;
        for ((pj, yj), dj) in projected.iter().zip(&y).zip(phi_step.iter_mut()) {
            let d = yj - pj;
            disp_sq += d * d;
            *dj += d;
        }
        ell_step += disp_sq.sqrt();
        *x = projected;
    }
    if let Some(ledger) = ledger {
        ledger.ell += ell_step;
        for (t, d) in ledger.phi_total.iter_mut().zip(&phi_step) {
            *t += d;
        }
        ledger.ell_steps.push(ell_step);
        ledger.phi_steps.push(phi_step);
    }
    Ok(())
}

/// Simulates the reflected reference diffusion at fine step
/// `eta / refinement`, recording states at coarse multiples and the boundary
/// ledger per coarse step.
pub fn run_reflected_reference(
    cfg: &ChainConfig,
    refinement: usize,
    record_stride: u64,
) -> Result<Trajectory, ChainError> {
    let n = cfg.dim();
    let delta = cfg.eta / refinement as f64;
    let mut source = BrownianSource::new(cfg.seed, cfg.replica_id, n, cfg.eta, refinement);
    let mut x = cfg.x0.clone();
    let mut fine = vec![0.0; refinement * n];
    let mut coarse = vec![0.0; n];
    let mut ledger = LocalTimeLedger::new(n, cfg.steps as usize);
    let mut recorder = Recorder::new(record_stride, &x);
    for step in 1..=cfg.steps {
        source.next_step(&mut fine, &mut coarse);
        reference_coarse_step(cfg, &mut x, &fine, refinement, delta, Some(&mut ledger))?;
        recorder.record(step, &x);
    }
    Ok(Trajectory {
        recorded: recorder.finish(cfg.steps, &x),
        final_point: x,
        ledger: Some(ledger),
    })
}

/// Mean and standard error over replicas, per coarse step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStat {
    pub mean: f64,
    pub se: f64,
}

/// Coupled-run output: squared sampler-vs-reference distance per coarse step
/// (index 0 corresponds to step 1), aggregated over replicas.
#[derive(Debug, Clone)]
pub struct CouplingCurve {
    pub sq_distance: Vec<StepStat>,
    pub replicas: u64,
}

/// Runs sampler and reference on the same Brownian path for each of
/// `replicas` replicas (ids `cfg.replica_id .. +replicas`), returning the
/// per-step squared distance statistics. Replicas run in parallel;
/// aggregation is in replica order, so results do not depend on thread
/// scheduling.
pub fn run_coupled(
    cfg: &ChainConfig,
    refinement: usize,
    replicas: u64,
) -> Result<CouplingCurve, ChainError> {
    if replicas == 0 {
        return Err(ChainError::InvalidConfig("need at least one replica".into()));
    }
    let per_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let cfg_r = cfg.with_replica(cfg.replica_id + r);
            coupled_distances(&cfg_r, refinement)
        })
        .collect::<Result<_, _>>()?;
    let steps = cfg.steps as usize;
    let mut sq_distance = Vec::with_capacity(steps);
    let mut column = vec![0.0; per_replica.len()];
    for j in 0..steps {
        for (c, row) in column.iter_mut().zip(&per_replica) {
            *c = row[j];
        }
        sq_distance.push(StepStat {
            mean: column.iter().sum::<f64>() / column.len() as f64,
            se: standard_error(&column),
        });
    }
    Ok(CouplingCurve { sq_distance, replicas })
}

fn coupled_distances(cfg: &ChainConfig, refinement: usize) -> Result<Vec<f64>, ChainError> {
    let n = cfg.dim();
    let delta = cfg.eta / refinement as f64;
    let mut source = BrownianSource::new(cfg.seed, cfg.replica_id, n, cfg.eta, refinement);
    let mut fine = vec![0.0; refinement * n];
    let mut coarse = vec![0.0; n];
    let mut x = cfg.x0.clone(); // sampler
    let mut big_x = cfg.x0.clone(); // reference
    let mut out = Vec::with_capacity(cfg.steps as usize);
    for _ in 1..=cfg.steps {
        source.next_step(&mut fine, &mut coarse);
        x = plmc_step(&cfg.body, &cfg.potential, &x, &coarse, cfg.eta)?;
        reference_coarse_step(cfg, &mut big_x, &fine, refinement, delta, None)?;
        out.push(dist_sq(&big_x, &x));
    }
    Ok(out)
}

/// Runs the reference diffusion for each replica and returns the ledgers
/// (replica order), for local-time studies.
pub fn run_reference_ensemble(
    cfg: &ChainConfig,
    refinement: usize,
    replicas: u64,
) -> Result<Vec<LocalTimeLedger>, ChainError> {
    if replicas == 0 {
        return Err(ChainError::InvalidConfig("need at least one replica".into()));
    }
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let cfg_r = cfg.with_replica(cfg.replica_id + r);
            run_reflected_reference(&cfg_r, refinement, 0).map(|t| t.ledger.unwrap())
        })
        .collect()
}

/// Runs the sampler for each replica (parallel, replica order preserved).
pub fn run_plmc_ensemble(
    cfg: &ChainConfig,
    record_stride: u64,
    replicas: u64,
) -> Result<Vec<Trajectory>, ChainError> {
    if replicas == 0 {
        return Err(ChainError::InvalidConfig("need at least one replica".into()));
    }
    (0..replicas)
        .into_par_iter()
        .map(|r| run_plmc(&cfg.with_replica(cfg.replica_id + r), record_stride))
        .collect()
}

/// Two reference diffusions from different starts on the same Brownian path.
/// Returns `|X_t - X~_t|` at coarse times `0..=steps`. Projection makes the
/// pair nonexpansive and subgradient monotonicity makes the drift
/// contractive, so the sequence decreases up to O(delta) wobble from
/// straddling a kink of the potential.
pub fn run_parallel_coupled_diffusions(
    cfg: &ChainConfig,
    x0_alt: &[f64],
    refinement: usize,
) -> Result<Vec<f64>, ChainError> {
    let n = cfg.dim();
    if x0_alt.len() != n {
        return Err(ChainError::DimensionMismatch {
            body: n,
            potential: n,
            start: x0_alt.len(),
        });
    }
    if !cfg.body.contains(x0_alt, DEFAULT_PROJECTION_TOL)? {
        return Err(ChainError::StartOutsideBody);
    }
    let delta = cfg.eta / refinement as f64;
    let mut source = BrownianSource::new(cfg.seed, cfg.replica_id, n, cfg.eta, refinement);
    let mut fine = vec![0.0; refinement * n];
    let mut coarse = vec![0.0; n];
    let mut a = cfg.x0.clone();
    let mut b = x0_alt.to_vec();
    let mut distances = Vec::with_capacity(cfg.steps as usize + 1);
    distances.push(dist_sq(&a, &b).sqrt());
    for _ in 1..=cfg.steps {
        source.next_step(&mut fine, &mut coarse);
        reference_coarse_step(cfg, &mut a, &fine, refinement, delta, None)?;
        reference_coarse_step(cfg, &mut b, &fine, refinement, delta, None)?;
        distances.push(dist_sq(&a, &b).sqrt());
    }
    Ok(distances)
}

/// Sampler on `Ball(0, radius)` for potentials with gradient growth
/// `|g(x)| <= beta (|x| + 1)`, which need not be Lipschitz on the whole
/// space. The growth condition is spot-checked on `growth_check_samples`
/// uniform draws from the ball (a sampled check, not a proof); the step-size
/// rule and bounds use `L = beta (radius + 1)`.
///
/// `radius = +inf` degenerates to the unconstrained sampler and requires a
/// potential that is Lipschitz on the whole space.
#[allow(clippy::too_many_arguments)]
pub fn run_ball_restricted(
    potential: Potential,
    beta: f64,
    radius: f64,
    eta: f64,
    steps: u64,
    seed: u64,
    replica_id: u64,
    growth_check_samples: usize,
    record_stride: u64,
) -> Result<(ChainConfig, Trajectory), ChainError> {
    let n = potential.dim();
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(ChainError::InvalidConfig(format!("beta = {beta} must be positive")));
    }
    if radius.is_infinite() {
        let body = ConvexBody::whole_space(n)?;
        let cfg =
            ChainConfig::new(body, potential, vec![0.0; n], eta, steps, seed, replica_id)?;
        let traj = run_plmc(&cfg, record_stride)?;
        return Ok((cfg, traj));
    }
    let body = ConvexBody::ball(vec![0.0; n], radius)?;
    let check = crate::oracles::sample_uniform_ball(n, radius, growth_check_samples.max(1), seed)
        .map_err(|e| ChainError::InvalidConfig(format!("growth check sampling failed: {e}")))?;
    for point in check.points().iter().chain(std::iter::once(&vec![0.0; n])) {
        let g = potential.min_norm_subgradient(point)?;
        let allowed = beta * (norm(point) + 1.0);
        let gn = norm(&g);
        if gn > allowed + 1e-12 {
            return Err(ChainError::GrowthViolation {
                at_norm: norm(point),
                gradient_norm: gn,
                allowed,
            });
        }
    }
    let l = beta * (radius + 1.0);
    let cfg = ChainConfig::with_lipschitz(
        body,
        potential,
        vec![0.0; n],
        eta,
        steps,
        seed,
        replica_id,
        l,
    )?;
    let traj = run_plmc(&cfg, record_stride)?;
    Ok((cfg, traj))
}
