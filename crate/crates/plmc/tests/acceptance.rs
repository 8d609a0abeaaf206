//! Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each.
//!
//! Run `cargo test --test acceptance -- --nocapture` to stream the lines.
//! Every tolerance is pinned here; statistical verdicts use
//! `empirical + 2 se <= bound` unless a criterion states otherwise.

mod common;

use common::{max_abs_diff, project_oracle, random_halfspaces, SplitMix64};
use plmc::chains::{
    run_coupled, run_parallel_coupled_diffusions, run_plmc_ensemble, run_reference_ensemble,
    ChainConfig,
};
use plmc::geometry::ConvexBody;
use plmc::metrics::{w2_1d, w2_sliced, Provenance, SampleSet};
use plmc::oracles::{sample_truncated_exponential, sample_uniform_ball};
use plmc::potentials::Potential;
use plmc::rng::{GaussianStream, StreamRole};
use plmc::theory::{
    aux_bound, chi2_warmstart_log_bound, choose_restriction_radius, discretization_bound,
    logsob_b_constant, schedule_logsob, AuxBound,
};
use plmc::vecmath::{dot, norm, standard_error, sub};
use std::panic::{catch_unwind, AssertUnwindSafe};

// Pinned tolerances.
const FORMULA_REL_TOL: f64 = 1e-9;
const W2_FLOOR_FACTOR: f64 = 2.0;
const W2_SLACK: f64 = 0.05;
const MOMENT_SIGMAS: f64 = 3.0;
const CONTRACTION_SLACK_FACTOR: f64 = 5.0; // allowed expansion: 5 L delta per step
const CONTRACTION_QUANTILE: f64 = 0.99;
const PROJECTION_TOL: f64 = 1e-6;
const PROPERTY_TOL: f64 = 1e-9;

type Verdict = Result<String, String>;

fn check(pass: bool, detail: String) -> Verdict {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 1. On an eta grid with k eta = 1, the per-step coupled squared distance
// between sampler and reflected diffusion stays below the discretization
// bound, uniformly in the step index.
fn coupled_error_dominated() -> Verdict {
    let n = 2;
    let body = ConvexBody::ball(vec![0.0; n], 1.0).unwrap();
    let potential = Potential::affine_max(vec![
        (vec![1.0, 0.0], 0.0),
        (vec![-1.0, 0.0], 0.0),
    ])
    .unwrap()
    .with_known_infimum(0.0);
    let (sigma0, r0) = (0.0, 1.0); // start at the center, potential minimum
    let replicas = 200;
    let refinement = 32;
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for eta in [1e-3f64, 4e-3, 1.6e-2] {
        let steps = (1.0 / eta).ceil() as u64;
        let cfg = ChainConfig::new(
            body.clone(),
            potential.clone(),
            vec![0.0; n],
            eta,
            steps,
            101,
            0,
        )
        .unwrap();
        let curve = run_coupled(&cfg, refinement, replicas).unwrap();
        for (idx, stat) in curve.sq_distance.iter().enumerate() {
            let step = idx as u64 + 1;
            let empirical = (stat.mean + 2.0 * stat.se) / n as f64;
            let bound = discretization_bound(n, step, eta, cfg.lipschitz(), sigma0, r0)
                .unwrap()
                .rhs;
            let ratio = empirical / bound;
            if ratio > worst {
                worst = ratio;
                worst_at = format!("eta={eta} step={step}");
            }
        }
    }
    check(
        worst <= 1.0,
        format!("worst (mean+2se)/bound = {worst:.4} at {worst_at}"),
    )
}

// 2. Boundary local time of the reflected diffusion obeys
// sqrt(E[ell_t^2]) <= n (1 + sigma0) t / r0 at several times.
fn local_time_bounded() -> Verdict {
    let n = 4;
    let body = ConvexBody::ball(vec![0.0; n], 1.0).unwrap();
    let potential = Potential::zero(n).unwrap();
    let eta = 0.01;
    let steps = 100;
    let cfg = ChainConfig::new(body, potential, vec![0.0; n], eta, steps, 57, 0).unwrap();
    let ledgers = run_reference_ensemble(&cfg, 32, 200).unwrap();
    let cumulative: Vec<Vec<f64>> = ledgers.iter().map(|l| l.cumulative_ell()).collect();
    let mut details = Vec::new();
    let mut pass = true;
    for t in [0.25, 0.5, 1.0] {
        let step = (t / eta).round() as usize;
        let sq: Vec<f64> = cumulative.iter().map(|c| c[step - 1].powi(2)).collect();
        let mean_sq = sq.iter().sum::<f64>() / sq.len() as f64;
        let empirical = mean_sq.sqrt();
        let se_sq = standard_error(&sq);
        let se = if empirical > 0.0 { se_sq / (2.0 * empirical) } else { se_sq.sqrt() };
        let bound = aux_bound(AuxBound::LocalTime { n, sigma0: 0.0, r0: 1.0, t }).unwrap();
        pass &= empirical + 2.0 * se <= bound;
        details.push(format!("t={t}: {:.3}+2*{:.3e} vs {bound}", empirical, se));
    }
    check(pass, details.join("; "))
}

// 3. E[max_{i<=k} |G_i|^2] <= e (n + 2 ln k) for iid standard Gaussian
// vectors, across a (n, k) grid.
fn gaussian_maxima_bounded() -> Verdict {
    let trials = 10_000;
    let mut stream = GaussianStream::new(7, 0, StreamRole::Oracle);
    let mut pass = true;
    let mut worst = 0.0f64;
    for n in [1usize, 4, 16] {
        for k in [1u64, 10, 100] {
            let mut maxima = Vec::with_capacity(trials);
            for _ in 0..trials {
                let mut best = 0.0f64;
                for _ in 0..k {
                    let mut sq = 0.0;
                    for _ in 0..n {
                        let g = stream.next_normal();
                        sq += g * g;
                    }
                    best = best.max(sq);
                }
                maxima.push(best);
            }
            let mean = maxima.iter().sum::<f64>() / trials as f64;
            let se = standard_error(&maxima);
            let bound = aux_bound(AuxBound::GaussianMax { n, k }).unwrap();
            let ratio = (mean + 2.0 * se) / bound;
            worst = worst.max(ratio);
            pass &= ratio <= 1.0;
        }
    }
    check(pass, format!("worst (mean+2se)/bound = {worst:.4} over 9 grid points"))
}

// 4. A schedule computed for the 1D truncated-exponential target is run to
// completion; the chain tail matches exact oracle draws in squared 1D
// transport distance, within twice the oracle-vs-oracle floor plus slack.
fn scheduled_1d_chain_matches_target() -> Verdict {
    let (n, l, r0, sigma0, c_ls, eps) = (1, 1.0, 2.5, 2.5, 25.0, 100.0);
    let schedule = schedule_logsob(n, l, r0, sigma0, c_ls, eps, 100_000_000_000).unwrap();
    assert!(schedule.rhs <= eps);
    let body = ConvexBody::axis_box(vec![0.0], vec![5.0]).unwrap();
    let potential = Potential::linear(vec![1.0]).unwrap().with_known_infimum(0.0);
    let cfg = ChainConfig::new(
        body,
        potential,
        vec![2.5],
        schedule.eta,
        schedule.k,
        2024,
        0,
    )
    .unwrap();
    let replicas = 16;
    let tail_start = schedule.k / 2;
    let stride = ((schedule.k - tail_start) / 125).max(1);
    let trajectories = run_plmc_ensemble(&cfg, stride, replicas).unwrap();
    let tail: Vec<Vec<f64>> = trajectories
        .iter()
        .flat_map(|t| {
            t.recorded
                .iter()
                .filter(|(s, _)| *s > tail_start)
                .map(|(_, p)| p.clone())
        })
        .collect();
    let m = tail.len();
    let chain = SampleSet::new(tail, Provenance::Chain).unwrap();
    let oracle_a = sample_truncated_exponential(1.0, 5.0, m, 2024).unwrap();
    let oracle_b = sample_truncated_exponential(1.0, 5.0, m, 2025).unwrap();
    let floor = w2_1d(&oracle_a, &oracle_b).unwrap();
    let value = w2_1d(&chain, &oracle_a).unwrap();
    let threshold = W2_FLOOR_FACTOR * floor + W2_SLACK;
    check(
        value <= threshold,
        format!(
            "k={}, eta={:.3e}, W2^2 chain-vs-oracle {value:.4e} vs threshold {threshold:.4e} \
             (floor {floor:.4e}, {m} samples)",
            schedule.k, schedule.eta
        ),
    )
}

// 5. A schedule for the uniform ball target in dimension 8: the chain tail
// reproduces E|x|^2 = n/(n+2) within 3 replica-batched standard errors and
// stays within the sliced-transport floor rule against exact uniform draws.
fn scheduled_ball_chain_matches_target() -> Verdict {
    let n = 8;
    let eps = 1.0;
    let schedule = schedule_logsob(n, 0.0, 1.0, 0.0, 1.0, eps, 100_000_000_000).unwrap();
    assert!(schedule.rhs <= eps);
    let body = ConvexBody::ball(vec![0.0; n], 1.0).unwrap();
    let potential = Potential::zero(n).unwrap();
    let cfg = ChainConfig::new(
        body,
        potential,
        vec![0.0; n],
        schedule.eta,
        schedule.k,
        31,
        0,
    )
    .unwrap();
    let replicas = 16;
    let tail_start = schedule.k / 2;
    let stride = ((schedule.k - tail_start) / 125).max(1);
    let trajectories = run_plmc_ensemble(&cfg, stride, replicas).unwrap();

    // Replica-batched second moment: tail iterates within one replica are
    // autocorrelated, so the standard error comes from replica means.
    let replica_means: Vec<f64> = trajectories
        .iter()
        .map(|t| {
            let sq: Vec<f64> = t
                .recorded
                .iter()
                .filter(|(s, _)| *s > tail_start)
                .map(|(_, p)| dot(p, p))
                .collect();
            sq.iter().sum::<f64>() / sq.len() as f64
        })
        .collect();
    let mean = replica_means.iter().sum::<f64>() / replica_means.len() as f64;
    let se = standard_error(&replica_means);
    let target = n as f64 / (n as f64 + 2.0);
    let moment_ok = (mean - target).abs() <= MOMENT_SIGMAS * se;

    let tail: Vec<Vec<f64>> = trajectories
        .iter()
        .flat_map(|t| {
            t.recorded
                .iter()
                .filter(|(s, _)| *s > tail_start)
                .map(|(_, p)| p.clone())
        })
        .collect();
    let m = tail.len();
    let chain = SampleSet::new(tail, Provenance::Chain).unwrap();
    let oracle_a = sample_uniform_ball(n, 1.0, m, 31).unwrap();
    let oracle_b = sample_uniform_ball(n, 1.0, m, 32).unwrap();
    let floor = w2_sliced(&oracle_a, &oracle_b, 64, 31).unwrap();
    let value = w2_sliced(&chain, &oracle_a, 64, 31).unwrap();
    let threshold = W2_FLOOR_FACTOR * floor + W2_SLACK;
    let w2_ok = value <= threshold;
    check(
        moment_ok && w2_ok,
        format!(
            "k={}, E|x|^2 = {mean:.4} vs {target:.4} (se {se:.4}); sliced W2^2 {value:.3e} \
             vs threshold {threshold:.3e}",
            schedule.k
        ),
    )
}

// 6. Subgradient inequality and monotonicity hold on 10^4 random pairs for
// every potential variant, with violations beyond 1e-9 counted as failures.
fn potential_properties_hold() -> Verdict {
    let dim = 3;
    let mut rng = SplitMix64(0xACCE97);
    let affine_pieces: Vec<(Vec<f64>, f64)> = (0..5)
        .map(|_| (rng.point(dim, -2.0, 2.0), rng.range(-1.0, 1.0)))
        .collect();
    let variants: Vec<(&str, Potential)> = vec![
        ("linear", Potential::linear(vec![0.3, -1.2, 0.7]).unwrap()),
        ("affine_max", Potential::affine_max(affine_pieces).unwrap()),
        ("scaled_norm", Potential::scaled_norm(vec![0.2, -0.1, 0.0], 1.7).unwrap()),
        ("quadratic", Potential::quadratic(dim, 1.5).unwrap()),
        ("zero", Potential::zero(dim).unwrap()),
    ];
    let mut violations = 0usize;
    let mut checked = 0usize;
    for (_, p) in &variants {
        for _ in 0..10_000 {
            let x = rng.point(dim, -2.0, 2.0);
            let y = rng.point(dim, -2.0, 2.0);
            let gx = p.min_norm_subgradient(&x).unwrap();
            let gy = p.min_norm_subgradient(&y).unwrap();
            let support =
                p.value(&y).unwrap() - p.value(&x).unwrap() - dot(&gx, &sub(&y, &x));
            let monotone = dot(&sub(&gx, &gy), &sub(&x, &y));
            if support < -PROPERTY_TOL || monotone < -PROPERTY_TOL {
                violations += 1;
            }
            checked += 1;
        }
    }
    check(
        violations == 0,
        format!("{violations} violations in {checked} pairs across {} variants", variants.len()),
    )
}

// 7. The iterative halfspace projection agrees with exact
// optimality-condition enumeration on random systems, and stays
// nonexpansive and idempotent.
fn projection_matches_oracle() -> Verdict {
    let mut rng = SplitMix64(0x51AB17);
    let mut worst = 0.0f64;
    let mut invariant_ok = true;
    for _ in 0..100 {
        let dim = 1 + (rng.next_u64() % 4) as usize;
        let count = 1 + (rng.next_u64() % 6) as usize;
        let (normals, offsets, interior) = random_halfspaces(&mut rng, dim, count);
        let body =
            ConvexBody::halfspace_intersection(normals.clone(), offsets.clone(), interior)
                .unwrap();
        let x = rng.point(dim, -3.0, 3.0);
        let y = rng.point(dim, -3.0, 3.0);
        let px = body.project(&x, 1e-10).unwrap();
        let py = body.project(&y, 1e-10).unwrap();
        let ox = project_oracle(&normals, &offsets, &x).unwrap();
        worst = worst.max(max_abs_diff(&px, &ox));
        invariant_ok &= norm(&sub(&px, &py)) <= norm(&sub(&x, &y)) + 1e-8;
        let ppx = body.project(&px, 1e-10).unwrap();
        invariant_ok &= max_abs_diff(&ppx, &px) <= 1e-8;
    }
    check(
        worst <= PROJECTION_TOL && invariant_ok,
        format!("worst coordinate gap {worst:.2e} over 100 random systems; invariants {invariant_ok}"),
    )
}

// 8. Two reflected diffusions from different starts on one Brownian path:
// the distance never grows by more than 5 L delta per coarse step in at
// least 99% of replica-steps, and contracts overall.
fn coupled_diffusions_contract() -> Verdict {
    let n = 4;
    let body = ConvexBody::ball(vec![0.0; n], 1.0).unwrap();
    let potential = Potential::affine_max(vec![
        (vec![1.0, 0.0, 0.0, 0.0], 0.0),
        (vec![-1.0, 0.0, 0.0, 0.0], 0.0),
    ])
    .unwrap();
    let eta = 0.005;
    let steps = 400;
    let refinement = 16;
    let x0_alt = [0.5, 0.0, 0.0, 0.0];
    let mut ok_steps = 0usize;
    let mut total_steps = 0usize;
    let mut final_sum = 0.0;
    let mut initial = 0.0;
    for replica in 0..50 {
        let cfg = ChainConfig::new(
            body.clone(),
            potential.clone(),
            vec![0.0; n],
            eta,
            steps,
            88,
            replica,
        )
        .unwrap();
        let slack = CONTRACTION_SLACK_FACTOR * cfg.lipschitz() * (eta / refinement as f64);
        let d = run_parallel_coupled_diffusions(&cfg, &x0_alt, refinement).unwrap();
        initial = d[0];
        for w in d.windows(2) {
            total_steps += 1;
            if w[1] <= w[0] + slack {
                ok_steps += 1;
            }
        }
        final_sum += *d.last().unwrap();
    }
    let fraction = ok_steps as f64 / total_steps as f64;
    let mean_final = final_sum / 50.0;
    check(
        fraction >= CONTRACTION_QUANTILE && mean_final < initial,
        format!(
            "{:.2}% non-expanding steps; mean final distance {mean_final:.4} from {initial:.4}",
            100.0 * fraction
        ),
    )
}

// 9. Closed-form constants reproduce frozen high-precision evaluations.
fn formulas_match_frozen_values() -> Verdict {
    let rel = |got: f64, want: f64| (got - want).abs() <= FORMULA_REL_TOL * want.abs().max(1.0);
    let mut failures = Vec::new();
    let mut assert_rel = |name: &str, got: f64, want: f64| {
        if !rel(got, want) {
            failures.push(format!("{name}: {got} != {want}"));
        }
    };
    assert_rel(
        "discretization rate",
        discretization_bound(4, 100, 0.001, 2.0, 0.0, 1.0).unwrap().a,
        16.786165050207872,
    );
    assert_rel(
        "boundary coefficient",
        discretization_bound(1, 1, 0.5, 0.0, 0.0, 1.0).unwrap().a,
        4.297442541400256,
    );
    assert_rel("burn-in constant", logsob_b_constant(2.0, 4, 0.5, 1.0, 4.0), 46.180709777918250);
    let w = chi2_warmstart_log_bound(2, 1.0, 2.0, 0.0).unwrap();
    assert_rel("warm-start log divergence", w.log_chi2, 2.0);
    assert_rel("warm-start covariance scale", w.covariance_scale, 2.0);
    assert_rel(
        "local-time bound",
        aux_bound(AuxBound::LocalTime { n: 2, sigma0: 0.0, r0: 0.5, t: 1.0 }).unwrap(),
        4.0,
    );
    assert_rel(
        "gaussian-max bound",
        aux_bound(AuxBound::GaussianMax { n: 1, k: 1 }).unwrap(),
        std::f64::consts::E,
    );
    assert_rel(
        "restriction tail at validity floor",
        aux_bound(AuxBound::Restriction { second_moment: 4.0, r: 32.0, c: 16.0 }).unwrap(),
        23.544284234972308,
    );
    assert_rel(
        "restriction radius",
        choose_restriction_radius(4, 4.0, 0.1, 16.0).unwrap(),
        236.08828506329192,
    );
    let count = 9 - failures.len();
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{count} constants within {FORMULA_REL_TOL} relative")
        } else {
            failures.join("; ")
        },
    )
}

// 10. The step-size schedule round-trips: plugging its (eta, k) back into
// the mixing bound meets the accuracy target on a constants grid, with
// iteration counts monotone in the target.
fn schedule_round_trips() -> Verdict {
    let (n, l, r0, sigma0) = (2, 1.0, 1.0, 0.5);
    let mut pass = true;
    let mut worst = 0.0f64;
    for c_ls in [1.0, 5.0, 25.0] {
        let mut last_k = u64::MAX;
        for eps in [0.5, 1.0, 2.0] {
            let s = schedule_logsob(n, l, r0, sigma0, c_ls, eps, 10_000_000_000_000_000)
                .unwrap();
            pass &= s.rhs <= eps;
            pass &= s.k <= last_k;
            worst = worst.max(s.rhs / eps);
            last_k = s.k;
        }
    }
    check(pass, format!("9 grid points; worst rhs/eps = {worst:.4}; k monotone in eps"))
}

#[test]
fn acceptance_gate() {
    let criteria: Vec<(&str, fn() -> Verdict)> = vec![
        ("coupled error below discretization bound on an eta grid", coupled_error_dominated),
        ("boundary local time below its closed-form bound", local_time_bounded),
        ("running Gaussian maxima below e(n + 2 ln k)", gaussian_maxima_bounded),
        ("scheduled 1D chain matches truncated-exponential target", scheduled_1d_chain_matches_target),
        ("scheduled ball chain matches uniform target", scheduled_ball_chain_matches_target),
        ("subgradient inequality and monotonicity on random pairs", potential_properties_hold),
        ("iterative projection agrees with exact optimality conditions", projection_matches_oracle),
        ("coupled reflected diffusions contract from distinct starts", coupled_diffusions_contract),
        ("closed-form constants match frozen high-precision values", formulas_match_frozen_values),
        ("schedule round trip achieves its accuracy target", schedule_round_trips),
    ];
    let mut failures = Vec::new();
    for (idx, (name, f)) in criteria.iter().enumerate() {
        let id = idx + 1;
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("ACCEPTANCE {id:02} {name}: PASS ({detail})"),
            Err(detail) => {
                println!("ACCEPTANCE {id:02} {name}: FAIL ({detail})");
                failures.push(format!("{id:02} {name}: {detail}"));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance criteria failed:\n{}",
        failures.join("\n")
    );
}
