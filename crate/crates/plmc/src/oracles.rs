//! Exact samplers for benchmark targets.
//!
//! These produce iid draws from laws the chain is supposed to approach, so
//! transport diagnostics have a trusted side. Every sampler is deterministic
//! in its seed; samplers that need two independent sets should use two seeds
//! (or distinct replica ids via the underlying stream layout).

use crate::geometry::ConvexBody;
use crate::metrics::{MetricsError, Provenance, SampleSet};
use crate::potentials::{Potential, PotentialError};
use crate::rng::{GaussianStream, StreamRole};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid oracle request: {0}")]
    InvalidRequest(String),
    #[error("acceptance rate {rate:.3e} fell below 1/{max_tries}: target too peaked for rejection")]
    LowAcceptance { rate: f64, max_tries: u64 },
    #[error("rejection sampling needs a ball or box proposal, got an unbounded body")]
    UnsupportedBody,
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Samples(#[from] MetricsError),
}

/// Uniform draws from Ball(0, radius) in dimension `n`: Gaussian direction
/// times `radius * u^{1/n}`.
pub fn sample_uniform_ball(
    n: usize,
    radius: f64,
    m: usize,
    seed: u64,
) -> Result<SampleSet, OracleError> {
    if n == 0 || m == 0 || !(radius > 0.0 && radius.is_finite()) {
        return Err(OracleError::InvalidRequest(
            "uniform ball needs n >= 1, m >= 1, finite radius > 0".into(),
        ));
    }
    let mut stream = GaussianStream::new(seed, 0, StreamRole::Oracle);
    let mut points = Vec::with_capacity(m);
    let mut z = vec![0.0; n];
    for _ in 0..m {
        loop {
            stream.fill_normal(1.0, &mut z);
            let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nz > 0.0 {
                let r = radius * stream.next_uniform().powf(1.0 / n as f64);
                points.push(z.iter().map(|v| v * r / nz).collect());
                break;
            }
        }
    }
    Ok(SampleSet::new(points, Provenance::Oracle)?)
}

/// Draws from the density proportional to `e^{-l x}` on `[0, r]` (1D) by
/// inverse CDF; `r = +inf` gives the plain exponential.
pub fn sample_truncated_exponential(
    l: f64,
    r: f64,
    m: usize,
    seed: u64,
) -> Result<SampleSet, OracleError> {
    if !(l > 0.0 && l.is_finite()) || !(r > 0.0) || m == 0 {
        return Err(OracleError::InvalidRequest(
            "truncated exponential needs l > 0, r > 0, m >= 1".into(),
        ));
    }
    let mut stream = GaussianStream::new(seed, 0, StreamRole::Oracle);
    let tail = if r.is_finite() { 1.0 - (-l * r).exp() } else { 1.0 };
    let points = (0..m)
        .map(|_| {
            let u = stream.next_uniform(); // in [0,1), so 1 - u * tail > 0
            vec![-(1.0 - u * tail).ln() / l]
        })
        .collect();
    Ok(SampleSet::new(points, Provenance::Oracle)?)
}

/// Rejection sampler output: the accepted points plus the acceptance
/// accounting that tests check against quadrature.
#[derive(Debug)]
pub struct RejectionSample {
    pub samples: SampleSet,
    pub proposals: u64,
    pub acceptance_rate: f64,
}

/// Samples the density proportional to `e^{-phi}` on a ball or box by uniform
/// proposals accepted with probability `e^{-(phi(x) - inf phi)}`.
///
/// The normalization uses the potential's infimum over the body; when only a
/// descent estimate is available the acceptance probability is clamped at 1,
/// which skews the law near the minimizer by the estimate's gap. Callers who
/// need exactness should set `known_infimum`. Aborts with
/// [`OracleError::LowAcceptance`] once any single draw has consumed
/// `max_tries` proposals.
pub fn rejection_sample(
    potential: &Potential,
    body: &ConvexBody,
    m: usize,
    seed: u64,
    max_tries: u64,
) -> Result<RejectionSample, OracleError> {
    if m == 0 || max_tries == 0 {
        return Err(OracleError::InvalidRequest("need m >= 1 and max_tries >= 1".into()));
    }
    let inf = potential.infimum_over(body, crate::potentials::DEFAULT_INFIMUM_BUDGET)?;
    let mut stream = GaussianStream::new(seed, 0, StreamRole::Oracle);
    let dim = body.dim();
    let mut points = Vec::with_capacity(m);
    let mut proposals: u64 = 0;
    let mut z = vec![0.0; dim];
    while points.len() < m {
        let mut tries: u64 = 0;
        loop {
            tries += 1;
            proposals += 1;
            if tries > max_tries {
                return Err(OracleError::LowAcceptance {
                    rate: points.len() as f64 / proposals as f64,
                    max_tries,
                });
            }
            let x: Vec<f64> = match body {
                ConvexBody::Box { lower, upper } => lower
                    .iter()
                    .zip(upper)
                    .map(|(lo, up)| lo + stream.next_uniform() * (up - lo))
                    .collect(),
                ConvexBody::Ball { center, radius } => {
                    loop {
                        stream.fill_normal(1.0, &mut z);
                        let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if nz > 0.0 {
                            let r = radius * stream.next_uniform().powf(1.0 / dim as f64);
                            break z
                                .iter()
                                .zip(center)
                                .map(|(v, c)| c + v * r / nz)
                                .collect();
                        }
                    }
                }
                _ => return Err(OracleError::UnsupportedBody),
            };
            let gap = potential.value(&x)? - inf.value;
            if stream.next_uniform() < (-gap).exp() {
                points.push(x);
                break;
            }
        }
    }
    Ok(RejectionSample {
        samples: SampleSet::new(points, Provenance::Oracle)?,
        proposals,
        acceptance_rate: m as f64 / proposals as f64,
    })
}

/// Gaussian warm start `N(x0, (n / l^2) Id)`.
pub fn sample_gaussian_warmstart(
    x0: &[f64],
    l: f64,
    m: usize,
    seed: u64,
) -> Result<SampleSet, OracleError> {
    let n = x0.len();
    if n == 0 || m == 0 || !(l > 0.0 && l.is_finite()) {
        return Err(OracleError::InvalidRequest(
            "warm start needs dim >= 1, m >= 1, finite l > 0".into(),
        ));
    }
    let sd = (n as f64).sqrt() / l;
    let mut stream = GaussianStream::new(seed, 0, StreamRole::WarmStart);
    let points = (0..m)
        .map(|_| x0.iter().map(|c| c + sd * stream.next_normal()).collect())
        .collect();
    Ok(SampleSet::new(points, Provenance::Oracle)?)
}
