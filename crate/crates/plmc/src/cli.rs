//! Study implementations behind the `plmc-lab` binary.
//!
//! Each study reads one [`ExperimentConfig`], runs its simulation, writes CSV
//! tables, an SVG plot where a curve helps, and a `summary.json` into the
//! output directory, and prints a short report. Verdict lines compare an
//! empirical quantity plus twice its standard error against the matching
//! closed-form bound.

use crate::chains::{
    run_coupled, run_plmc_ensemble, run_reference_ensemble, ChainConfig, ChainError,
};
use crate::config::{ConfigError, ExperimentConfig, OracleSpec};
use crate::geometry::{ConvexBody, GeometryError, DEFAULT_PROJECTION_TOL};
use crate::metrics::{
    moments, w2_1d, w2_exact, w2_sliced, MetricsError, Provenance, SampleSet,
    W2_EXACT_MAX_POINTS,
};
use crate::oracles::{
    rejection_sample, sample_gaussian_warmstart, sample_truncated_exponential,
    sample_uniform_ball, OracleError,
};
use crate::potentials::{Potential, PotentialError};
use crate::report::{fmt_f64, summary_base, OutputDir};
use crate::svg::{line_plot, Series};
use crate::theory::{
    aux_bound, chi2_warmstart_log_bound, discretization_bound, schedule_logsob, sigma0_r0,
    AuxBound, TheoryError,
};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("validation error: {0}")]
    Validation(String),
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Sample,
    CoupledError,
    LocalTime,
    WarmStart,
    W2,
    Schedule,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Sample => "sample",
            StudyKind::CoupledError => "coupled-error",
            StudyKind::LocalTime => "localtime",
            StudyKind::WarmStart => "warmstart",
            StudyKind::W2 => "w2",
            StudyKind::Schedule => "schedule",
        }
    }
}

/// Loads the config, applies CLI overrides, runs the study, writes
/// `summary.json`, and returns its path.
pub fn run_study(
    kind: StudyKind,
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
    threads_override: Option<usize>,
) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| validation(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config = ExperimentConfig::from_str(&text)?;
    let config_echo: Value = serde_json::from_str(&text).map_err(ConfigError::from)?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    let threads = threads_override.unwrap_or(config.threads);
    if threads > 0 {
        // Ignore the error: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let out = OutputDir::new(out_dir)?;
    let started = Instant::now();
    let results = match kind {
        StudyKind::Sample => cmd_sample(&config, &out)?,
        StudyKind::CoupledError => cmd_coupled_error(&config, &out)?,
        StudyKind::LocalTime => cmd_localtime(&config, &out)?,
        StudyKind::WarmStart => cmd_warmstart(&config, &out)?,
        StudyKind::W2 => cmd_w2(&config, &out)?,
        StudyKind::Schedule => cmd_schedule(&config, &out)?,
    };
    let mut summary = summary_base(kind.name(), config.seed, config_echo);
    summary["results"] = results;
    summary["runtime_seconds"] = json!(started.elapsed().as_secs_f64());
    out.write_summary(&summary)?;
    let path = out.path("summary.json");
    println!("summary: {}", path.display());
    Ok(path)
}

/// Start constants `(sigma0, r0)`: config overrides win, anything missing is
/// computed from the problem (`r0` as the boundary distance of the start,
/// `sigma0` from the potential's infimum over the body).
fn resolve_sigma0_r0(
    config: &ExperimentConfig,
    body: &ConvexBody,
    potential: &Potential,
    x0: &[f64],
) -> Result<(f64, f64), CliError> {
    let overrides = &config.constants;
    if let (Some(sigma0), Some(r0)) = (overrides.sigma0, overrides.r0) {
        if sigma0 < 0.0 {
            return Err(validation("constants.sigma0 must be nonnegative"));
        }
        if !(r0 > 0.0) {
            return Err(validation("constants.r0 must be positive"));
        }
        return Ok((sigma0, r0));
    }
    let (sigma0, r0) = sigma0_r0(x0, potential, body, config.oracle_samples)?;
    Ok((overrides.sigma0.unwrap_or(sigma0), overrides.r0.unwrap_or(r0)))
}

fn verdict_line(name: &str, empirical: f64, se: f64, bound: f64) -> (bool, String) {
    let satisfied = empirical + 2.0 * se <= bound;
    let line = format!(
        "bound {name}: empirical={empirical:.6e} se={se:.6e} bound={bound:.6e} satisfied={satisfied}"
    );
    (satisfied, line)
}

fn cmd_sample(config: &ExperimentConfig, out: &OutputDir) -> Result<Value, CliError> {
    let chain = config.build_chain()?;
    let n = chain.dim();
    let stride = config.resolve_record_stride(chain.steps);
    let trajectories = run_plmc_ensemble(&chain, stride, config.replicas)?;

    let mut csv = out.csv("samples.csv", config.seed)?;
    csv.comment(&format!("eta={} steps={} replicas={}", chain.eta, chain.steps, config.replicas))?;
    let mut header = vec!["step".to_string(), "time".to_string(), "replica".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    csv.header(&header)?;
    for (replica, trajectory) in trajectories.iter().enumerate() {
        for (step, point) in &trajectory.recorded {
            let mut row = vec![
                step.to_string(),
                fmt_f64(*step as f64 * chain.eta),
                replica.to_string(),
            ];
            row.extend(point.iter().map(|v| fmt_f64(*v)));
            csv.row(&row)?;
        }
    }
    csv.finish()?;

    let finals: Vec<Vec<f64>> =
        trajectories.iter().map(|t| t.final_point.clone()).collect();
    let final_set = SampleSet::new(finals, Provenance::Chain)?;
    let m = moments(&final_set)?;

    let norm_series: Vec<Series> = trajectories
        .iter()
        .take(4)
        .enumerate()
        .map(|(i, t)| {
            let pts = t
                .recorded
                .iter()
                .map(|(s, p)| {
                    (*s as f64 * chain.eta, p.iter().map(|v| v * v).sum::<f64>().sqrt())
                })
                .collect();
            Series::new(format!("replica {i}"), pts)
        })
        .collect();
    out.write_text(
        "sample_norms.svg",
        &line_plot("iterate norm", "time", "|x|", &norm_series, false),
    )?;

    println!(
        "sample: {} replicas x {} steps, eta={}, recorded every {} steps",
        config.replicas, chain.steps, chain.eta, stride
    );
    println!(
        "final-point moments: mean|x|^2={:.6e} (se {:.1e}), cov trace={:.6e}",
        m.second_moment, m.second_moment_se, m.cov_trace
    );
    Ok(json!({
        "eta": chain.eta,
        "steps": chain.steps,
        "replicas": config.replicas,
        "record_stride": stride,
        "final_moments": {
            "mean": m.mean,
            "mean_se": m.mean_se,
            "second_moment": m.second_moment,
            "second_moment_se": m.second_moment_se,
            "cov_trace": m.cov_trace,
            "cov_trace_se": m.cov_trace_se,
        },
    }))
}

fn cmd_coupled_error(config: &ExperimentConfig, out: &OutputDir) -> Result<Value, CliError> {
    let body = config.build_body()?;
    let potential = config.build_potential()?;
    let x0 = config.start_point(&body)?;
    let n = body.dim();
    let nf = n as f64;
    let etas: Vec<f64> = if config.eta_grid.is_empty() {
        vec![config.require_eta()?]
    } else {
        config.eta_grid.clone()
    };
    let (sigma0, r0) = resolve_sigma0_r0(config, &body, &potential, &x0)?;

    let mut csv = out.csv("coupled_error.csv", config.seed)?;
    csv.comment(&format!(
        "replicas={} refinement={} sigma0={} r0={}",
        config.replicas, config.refinement, sigma0, r0
    ))?;
    csv.header(&["eta", "k", "step", "time", "mean_sq_norm", "se", "bound", "satisfied"])?;

    let mut series = Vec::new();
    let mut per_eta = Vec::new();
    let mut all_satisfied = true;
    for &eta in &etas {
        let steps = config.resolve_steps(eta)?;
        let chain = ChainConfig::new(
            body.clone(),
            potential.clone(),
            x0.clone(),
            eta,
            steps,
            config.seed,
            0,
        )?;
        let l = chain.lipschitz();
        let curve = run_coupled(&chain, config.refinement, config.replicas)?;
        let row_stride = (steps / 1024).max(1);
        let mut eta_satisfied = true;
        let mut worst_ratio = 0.0f64;
        let mut empirical_pts = Vec::new();
        let mut bound_pts = Vec::new();
        for (idx, stat) in curve.sq_distance.iter().enumerate() {
            let step = idx as u64 + 1;
            let mean = stat.mean / nf;
            let se = stat.se / nf;
            let bound = discretization_bound(n, step, eta, l, sigma0, r0)?.rhs;
            let satisfied = mean + 2.0 * se <= bound;
            eta_satisfied &= satisfied;
            worst_ratio = worst_ratio.max((mean + 2.0 * se) / bound);
            if step % row_stride == 0 || step == steps {
                csv.row(&[
                    fmt_f64(eta),
                    steps.to_string(),
                    step.to_string(),
                    fmt_f64(step as f64 * eta),
                    fmt_f64(mean),
                    fmt_f64(se),
                    fmt_f64(bound),
                    satisfied.to_string(),
                ])?;
                empirical_pts.push((step as f64 * eta, mean));
                bound_pts.push((step as f64 * eta, bound));
            }
        }
        all_satisfied &= eta_satisfied;
        series.push(Series::new(format!("eta={eta}"), empirical_pts));
        series.push(Series::new(format!("bound eta={eta}"), bound_pts));
        println!(
            "coupled-error eta={eta}: k={steps}, worst (mean+2se)/bound = {worst_ratio:.4}, satisfied={eta_satisfied}"
        );
        per_eta.push(json!({
            "eta": eta,
            "steps": steps,
            "lipschitz": l,
            "worst_ratio": worst_ratio,
            "satisfied": eta_satisfied,
        }));
    }
    csv.finish()?;
    out.write_text(
        "coupled_error.svg",
        &line_plot(
            "coupled squared error vs bound",
            "time",
            "mean |X - x|^2 / n",
            &series,
            true,
        ),
    )?;
    println!("coupled-error: all bounds satisfied={all_satisfied}");
    Ok(json!({
        "sigma0": sigma0,
        "r0": r0,
        "replicas": config.replicas,
        "refinement": config.refinement,
        "per_eta": per_eta,
        "satisfied": all_satisfied,
    }))
}

fn cmd_localtime(config: &ExperimentConfig, out: &OutputDir) -> Result<Value, CliError> {
    let body = config.build_body()?;
    let potential = config.build_potential()?;
    let x0 = config.start_point(&body)?;
    let n = body.dim();
    let eta = config.require_eta()?;
    let times: Vec<f64> = if !config.times.is_empty() {
        config.times.clone()
    } else if let Some(h) = config.horizon {
        vec![h]
    } else {
        return Err(ConfigError::Missing("times (or horizon)").into());
    };
    if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(validation("times must be positive and finite"));
    }
    let max_time = times.iter().cloned().fold(0.0, f64::max);
    let steps = (max_time / eta).ceil().max(1.0) as u64;
    let chain = ChainConfig::new(body, potential, x0.clone(), eta, steps, config.seed, 0)?;
    let (sigma0, r0) = resolve_sigma0_r0(config, &chain.body, &chain.potential, &x0)?;
    let ledgers = run_reference_ensemble(&chain, config.refinement, config.replicas)?;
    let cumulative: Vec<Vec<f64>> = ledgers.iter().map(|l| l.cumulative_ell()).collect();

    let mut csv = out.csv("localtime.csv", config.seed)?;
    csv.comment(&format!(
        "eta={eta} refinement={} replicas={} sigma0={sigma0} r0={r0}",
        config.refinement, config.replicas
    ))?;
    csv.header(&["time", "step", "sqrt_mean_ell_sq", "se", "bound", "satisfied"])?;
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    let mut bound_curve = vec![(0.0, 0.0)];
    let mut all_satisfied = true;
    for &t in &times {
        let step = ((t / eta).round() as u64).clamp(1, steps);
        let t_actual = step as f64 * eta;
        let sq: Vec<f64> =
            cumulative.iter().map(|c| c[step as usize - 1].powi(2)).collect();
        let mean_sq = sq.iter().sum::<f64>() / sq.len() as f64;
        let se_sq = crate::vecmath::standard_error(&sq);
        let empirical = mean_sq.sqrt();
        let se = if empirical > 0.0 { se_sq / (2.0 * empirical) } else { se_sq.sqrt() };
        let bound =
            aux_bound(AuxBound::LocalTime { n, sigma0, r0, t: t_actual })?;
        let (satisfied, line) = verdict_line(
            &format!("local-time t={t_actual}"),
            empirical,
            se,
            bound,
        );
        println!("{line}");
        all_satisfied &= satisfied;
        csv.row(&[
            fmt_f64(t_actual),
            step.to_string(),
            fmt_f64(empirical),
            fmt_f64(se),
            fmt_f64(bound),
            satisfied.to_string(),
        ])?;
        curve.push((t_actual, empirical));
        bound_curve.push((t_actual, bound));
        rows.push(json!({
            "time": t_actual,
            "step": step,
            "sqrt_mean_ell_sq": empirical,
            "se": se,
            "bound": bound,
            "satisfied": satisfied,
        }));
    }
    csv.finish()?;
    out.write_text(
        "localtime.svg",
        &line_plot(
            "boundary local time",
            "time",
            "sqrt E[ell^2]",
            &[Series::new("empirical", curve), Series::new("bound", bound_curve)],
            false,
        ),
    )?;
    println!("localtime: all bounds satisfied={all_satisfied}");
    Ok(json!({
        "sigma0": sigma0,
        "r0": r0,
        "eta": eta,
        "refinement": config.refinement,
        "replicas": config.replicas,
        "rows": rows,
        "satisfied": all_satisfied,
    }))
}

fn cmd_warmstart(config: &ExperimentConfig, out: &OutputDir) -> Result<Value, CliError> {
    let body = config.build_body()?;
    let potential = config.build_potential()?;
    let x0 = config.start_point(&body)?;
    let n = body.dim();
    let l = potential.lipschitz_constant(&body)?;
    if !(l > 0.0) {
        return Err(validation(
            "the warm-start covariance n/L^2 needs a positive Lipschitz constant",
        ));
    }
    let c_p = config.require_c_p()?;
    let infimum = potential.infimum_over(&body, config.oracle_samples)?;
    let sigma0 = match config.constants.sigma0 {
        Some(s) if s >= 0.0 => s,
        Some(_) => return Err(validation("constants.sigma0 must be nonnegative")),
        None => ((potential.value(&x0)? - infimum.value) / n as f64).max(0.0),
    };
    let bound = chi2_warmstart_log_bound(n, l, c_p, sigma0)?;

    // Monte Carlo estimate of E[(1 + sigma0(Y)) / r0(Y)] over warm-start
    // draws conditioned to land in the body: the start-quality functional
    // the mixing bounds depend on. An estimate, not a bound.
    let draws = sample_gaussian_warmstart(&x0, l, config.oracle_samples, config.seed)?;
    let mut ratios = Vec::new();
    let mut inside = 0usize;
    let mut csv = out.csv("warmstart.csv", config.seed)?;
    csv.comment(&format!("covariance_scale={} sigma0={sigma0}", bound.covariance_scale))?;
    csv.header(&["sample", "sigma0", "r0", "ratio"])?;
    for (i, y) in draws.points().iter().enumerate() {
        if !body.contains(y, DEFAULT_PROJECTION_TOL)? {
            continue;
        }
        inside += 1;
        let r0_y = body.boundary_distance(y)?;
        if !(r0_y > 0.0) {
            continue;
        }
        let sigma0_y = ((potential.value(y)? - infimum.value) / n as f64).max(0.0);
        let ratio = (1.0 + sigma0_y) / r0_y;
        csv.row(&[i.to_string(), fmt_f64(sigma0_y), fmt_f64(r0_y), fmt_f64(ratio)])?;
        ratios.push(ratio);
    }
    csv.finish()?;
    if ratios.len() < 2 {
        return Err(validation(format!(
            "only {} of {} warm-start draws landed inside the body; the estimate needs 2+",
            ratios.len(),
            config.oracle_samples
        )));
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let se_ratio = crate::vecmath::standard_error(&ratios);
    let inside_fraction = inside as f64 / config.oracle_samples as f64;

    println!(
        "warmstart: ln chi^2 <= {:.6e}, covariance scale n/L^2 = {:.6e}",
        bound.log_chi2, bound.covariance_scale
    );
    println!(
        "start-quality estimate E[(1+sigma0)/r0 | inside] = {mean_ratio:.6e} (se {se_ratio:.1e}, {} of {} draws inside)",
        inside, config.oracle_samples
    );
    Ok(json!({
        "lipschitz": l,
        "c_p": c_p,
        "sigma0": sigma0,
        "infimum": {"value": infimum.value, "exact": infimum.exact},
        "log_chi2_bound": bound.log_chi2,
        "covariance_scale": bound.covariance_scale,
        "start_quality": {
            "mean": mean_ratio,
            "se": se_ratio,
            "estimated": true,
            "inside_fraction": inside_fraction,
            "samples_kept": ratios.len(),
        },
    }))
}

/// Chain tail points across replicas: recorded iterates past `steps/2`,
/// strided so roughly `target` points survive, truncated to `target`.
fn chain_tail_samples(
    chain: &ChainConfig,
    replicas: u64,
    target: usize,
) -> Result<SampleSet, CliError> {
    let steps = chain.steps;
    let tail_start = steps / 2;
    let per_replica = (target as u64).div_ceil(replicas).max(1);
    let stride = ((steps - tail_start) / per_replica).max(1);
    let trajectories = run_plmc_ensemble(chain, stride, replicas)?;
    let mut points = Vec::with_capacity(target);
    'outer: for pass in 0.. {
        let mut took_any = false;
        for trajectory in &trajectories {
            let tail: Vec<&Vec<f64>> = trajectory
                .recorded
                .iter()
                .filter(|(s, _)| *s > tail_start)
                .map(|(_, p)| p)
                .collect();
            if let Some(p) = tail.get(pass) {
                points.push((*p).clone());
                took_any = true;
                if points.len() == target {
                    break 'outer;
                }
            }
        }
        if !took_any {
            break;
        }
    }
    if points.len() < 2 {
        return Err(validation("chain tail produced fewer than 2 sample points"));
    }
    Ok(SampleSet::new(points, Provenance::Chain)?)
}

fn draw_oracle(
    spec: &OracleSpec,
    body: &ConvexBody,
    potential: &Potential,
    m: usize,
    seed: u64,
) -> Result<(SampleSet, Option<f64>), CliError> {
    Ok(match spec {
        OracleSpec::UniformBall { radius } => {
            (sample_uniform_ball(body.dim(), *radius, m, seed)?, None)
        }
        OracleSpec::TruncatedExponential { rate, length } => {
            if body.dim() != 1 {
                return Err(validation(
                    "the truncated exponential oracle is one-dimensional",
                ));
            }
            (sample_truncated_exponential(*rate, *length, m, seed)?, None)
        }
        OracleSpec::Rejection { max_tries } => {
            let r = rejection_sample(potential, body, m, seed, *max_tries)?;
            (r.samples, Some(r.acceptance_rate))
        }
    })
}

fn cmd_w2(config: &ExperimentConfig, out: &OutputDir) -> Result<Value, CliError> {
    let spec = config.require_w2()?.clone();
    let chain = config.build_chain()?;
    let n = chain.dim();
    if spec.samples < 2 {
        return Err(validation("w2.samples must be at least 2"));
    }
    let chain_set = chain_tail_samples(&chain, config.replicas, spec.samples)?;
    let (oracle_a, acceptance) =
        draw_oracle(&spec.oracle, &chain.body, &chain.potential, spec.samples, config.seed)?;
    let (oracle_b, _) = draw_oracle(
        &spec.oracle,
        &chain.body,
        &chain.potential,
        spec.samples,
        config.seed.wrapping_add(1),
    )?;

    let (metric, distance): (&str, Box<dyn Fn(&SampleSet, &SampleSet) -> Result<f64, MetricsError>>) =
        if n == 1 {
            ("1d_exact", Box::new(w2_1d))
        } else if spec.projections == 0 {
            if spec.samples > W2_EXACT_MAX_POINTS {
                return Err(validation(format!(
                    "exact transport handles at most {W2_EXACT_MAX_POINTS} points; \
                     set w2.projections > 0 for the sliced distance"
                )));
            }
            ("exact", Box::new(w2_exact))
        } else {
            let projections = spec.projections;
            let seed = config.seed;
            ("sliced", Box::new(move |a: &SampleSet, b: &SampleSet| {
                w2_sliced(a, b, projections, seed)
            }))
        };

    let floor = distance(&oracle_a, &oracle_b)?;
    let value = distance(&chain_set, &oracle_a)?;
    let threshold = 2.0 * floor + 0.05;
    let satisfied = value <= threshold;

    let chain_moments = moments(&chain_set)?;
    let oracle_moments = moments(&oracle_a)?;

    let mut csv = out.csv("w2.csv", config.seed)?;
    csv.comment(&format!("metric={metric} samples={}", spec.samples))?;
    csv.header(&["quantity", "value"])?;
    csv.row(&["w2sq_chain_oracle".into(), fmt_f64(value)])?;
    csv.row(&["w2sq_oracle_floor".into(), fmt_f64(floor)])?;
    csv.row(&["threshold".into(), fmt_f64(threshold)])?;
    csv.row(&["satisfied".into(), (satisfied as u8).to_string()])?;
    csv.finish()?;

    println!(
        "w2 ({metric}): chain-vs-oracle={value:.6e}, oracle floor={floor:.6e}, \
         threshold=2*floor+0.05={threshold:.6e}, satisfied={satisfied}"
    );
    Ok(json!({
        "metric": metric,
        "samples": spec.samples,
        "chain_samples": chain_set.len(),
        "w2sq_chain_oracle": value,
        "w2sq_oracle_floor": floor,
        "threshold": threshold,
        "satisfied": satisfied,
        "acceptance_rate": acceptance,
        "chain_moments": {
            "second_moment": chain_moments.second_moment,
            "second_moment_se": chain_moments.second_moment_se,
        },
        "oracle_moments": {
            "second_moment": oracle_moments.second_moment,
            "second_moment_se": oracle_moments.second_moment_se,
        },
    }))
}

fn cmd_schedule(config: &ExperimentConfig, out: &OutputDir) -> Result<Value, CliError> {
    let spec = config.require_schedule()?.clone();
    let body = config.build_body()?;
    let potential = config.build_potential()?;
    let x0 = config.start_point(&body)?;
    let n = body.dim();
    let l = potential.lipschitz_constant(&body)?;
    let c_ls = config.require_c_ls()?;
    let (sigma0, r0) = resolve_sigma0_r0(config, &body, &potential, &x0)?;

    let mut targets = vec![spec.eps];
    targets.extend(spec.eps_grid.iter().copied());
    let mut csv = out.csv("schedule.csv", config.seed)?;
    csv.comment(&format!("n={n} l={l} r0={r0} sigma0={sigma0} c_ls={c_ls}"))?;
    csv.header(&["eps", "eta", "k", "horizon", "a", "b", "rhs", "asymptotic_k"])?;
    let mut rows = Vec::new();
    for eps in targets {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(validation(format!("schedule eps = {eps} must be positive")));
        }
        let s = schedule_logsob(n, l, r0, sigma0, c_ls, eps, spec.max_steps)?;
        csv.row(&[
            fmt_f64(eps),
            fmt_f64(s.eta),
            s.k.to_string(),
            fmt_f64(s.horizon),
            fmt_f64(s.a),
            fmt_f64(s.b),
            fmt_f64(s.rhs),
            fmt_f64(s.asymptotic_k),
        ])?;
        println!(
            "schedule eps={eps}: eta={:.6e}, k={}, horizon={:.4}, achieved rhs={:.6e}",
            s.eta, s.k, s.horizon, s.rhs
        );
        rows.push(json!({
            "eps": eps,
            "eta": s.eta,
            "k": s.k,
            "horizon": s.horizon,
            "a": s.a,
            "b": s.b,
            "rhs": s.rhs,
            "round_trip_ok": s.rhs <= eps,
            "asymptotic_k": s.asymptotic_k,
        }));
    }
    csv.finish()?;
    let all_ok = rows.iter().all(|r| r["round_trip_ok"] == json!(true));
    println!("schedule: round trip satisfied={all_ok}");
    Ok(json!({
        "n": n,
        "lipschitz": l,
        "sigma0": sigma0,
        "r0": r0,
        "c_ls": c_ls,
        "rows": rows,
        "satisfied": all_ok,
    }))
}
