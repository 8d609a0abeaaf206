//! Wasserstein-2 diagnostics between equal-weight sample sets.
//!
//! Three estimators of `W2^2` between empirical measures:
//!
//! - [`w2_exact`]: optimal assignment over the squared-distance matrix. Exact
//!   for equal-size sets (uniform weights make the transport problem an
//!   assignment problem); capped at [`W2_EXACT_MAX_POINTS`] points since the
//!   solve is cubic.
//! - [`w2_1d`]: closed form in one dimension, sorted quantile matching.
//! - [`w2_sliced`]: mean of `w2_1d` over seeded random unit directions; a
//!   lower bound on `w2_exact` in expectation and per direction.
//!
//! Sample moments with jackknife standard errors are in [`moments`]. Note the
//! finite-sample floor: two independent draws from the *same* law have
//! strictly positive `W2^2`, so chain-vs-oracle values are judged against an
//! oracle-vs-oracle baseline, never against zero.

use crate::assignment::min_cost_assignment;
use crate::rng::{GaussianStream, StreamRole};
use crate::vecmath::{dist_sq, dot, norm_sq};
use serde::Serialize;
use thiserror::Error;

/// Largest set size `w2_exact` accepts; the assignment solve is O(m^3).
pub const W2_EXACT_MAX_POINTS: usize = 512;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("sample sets must have equal sizes, got {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("sample sets must share a dimension, got {0} and {1}")]
    DimMismatch(usize, usize),
    #[error("exact transport accepts at most {max} points, got {got}")]
    TooManyPoints { max: usize, got: usize },
    #[error("operation needs dimension 1, got {0}")]
    NotOneDimensional(usize),
    #[error("invalid sample set: {0}")]
    InvalidSamples(String),
}

/// Where a sample set came from; carried through reports so chain and oracle
/// samples cannot be confused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Chain,
    Oracle,
}

/// Equal-weight points of one dimension.
#[derive(Debug, Clone)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl SampleSet {
    pub fn new(points: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self, MetricsError> {
        if points.is_empty() {
            return Err(MetricsError::InvalidSamples("no points".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(MetricsError::InvalidSamples("points must have dimension >= 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(MetricsError::InvalidSamples(
                    "points must share one dimension".into(),
                ));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(MetricsError::InvalidSamples("points must be finite".into()));
            }
        }
        Ok(SampleSet { points, provenance })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

fn check_pair(a: &SampleSet, b: &SampleSet) -> Result<(), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::SizeMismatch(a.len(), b.len()));
    }
    if a.dim() != b.dim() {
        return Err(MetricsError::DimMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

/// Exact `W2^2` between two equal-size sets: the optimal assignment under
/// squared Euclidean cost, divided by the number of points.
pub fn w2_exact(a: &SampleSet, b: &SampleSet) -> Result<f64, MetricsError> {
    check_pair(a, b)?;
    let m = a.len();
    if m > W2_EXACT_MAX_POINTS {
        return Err(MetricsError::TooManyPoints { max: W2_EXACT_MAX_POINTS, got: m });
    }
    let cost: Vec<Vec<f64>> = a
        .points()
        .iter()
        .map(|p| b.points().iter().map(|q| dist_sq(p, q)).collect())
        .collect();
    let (_, total) = min_cost_assignment(&cost);
    Ok(total / m as f64)
}

/// `W2^2` in one dimension: sort both sets and match quantiles.
pub fn w2_1d(a: &SampleSet, b: &SampleSet) -> Result<f64, MetricsError> {
    check_pair(a, b)?;
    if a.dim() != 1 {
        return Err(MetricsError::NotOneDimensional(a.dim()));
    }
    let mut xs: Vec<f64> = a.points().iter().map(|p| p[0]).collect();
    let mut ys: Vec<f64> = b.points().iter().map(|p| p[0]).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    Ok(xs.iter().zip(&ys).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / xs.len() as f64)
}

/// Sliced `W2^2`: average the 1D value over `n_projections` random unit
/// directions drawn from the seeded slicing stream. Deterministic in
/// `(seed, n_projections)`.
pub fn w2_sliced(
    a: &SampleSet,
    b: &SampleSet,
    n_projections: usize,
    seed: u64,
) -> Result<f64, MetricsError> {
    check_pair(a, b)?;
    if n_projections == 0 {
        return Err(MetricsError::InvalidSamples("need at least one projection".into()));
    }
    let dim = a.dim();
    let mut stream = GaussianStream::new(seed, 0, StreamRole::Slice);
    let mut total = 0.0;
    let mut dir = vec![0.0; dim];
    for _ in 0..n_projections {
        loop {
            stream.fill_normal(1.0, &mut dir);
            let n = norm_sq(&dir).sqrt();
            if n > 0.0 {
                dir.iter_mut().for_each(|v| *v /= n);
                break;
            }
        }
        let pa: Vec<Vec<f64>> = a.points().iter().map(|p| vec![dot(p, &dir)]).collect();
        let pb: Vec<Vec<f64>> = b.points().iter().map(|p| vec![dot(p, &dir)]).collect();
        total += w2_1d(
            &SampleSet::new(pa, a.provenance())?,
            &SampleSet::new(pb, b.provenance())?,
        )?;
    }
    Ok(total / n_projections as f64)
}

/// Sample moments with jackknife standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub mean_se: Vec<f64>,
    /// Mean of `|x|^2`.
    pub second_moment: f64,
    pub second_moment_se: f64,
    /// Trace of the unbiased sample covariance.
    pub cov_trace: f64,
    /// Jackknife SE; zero when the leave-one-out statistic is undefined
    /// (fewer than three points).
    pub cov_trace_se: f64,
}

pub fn moments(s: &SampleSet) -> Result<Moments, MetricsError> {
    let m = s.len();
    if m < 2 {
        return Err(MetricsError::InvalidSamples("moments need at least two points".into()));
    }
    let mf = m as f64;
    let dim = s.dim();

    let mut mean = vec![0.0; dim];
    for p in s.points() {
        for (mu, x) in mean.iter_mut().zip(p) {
            *mu += x;
        }
    }
    mean.iter_mut().for_each(|mu| *mu /= mf);

    let mut mean_se = vec![0.0; dim];
    for p in s.points() {
        for ((se, x), mu) in mean_se.iter_mut().zip(p).zip(&mean) {
            *se += (x - mu) * (x - mu);
        }
    }
    // Jackknife of a sample mean collapses to the classical s / sqrt(m).
    mean_se.iter_mut().for_each(|se| *se = (*se / (mf - 1.0) / mf).sqrt());

    let sq: Vec<f64> = s.points().iter().map(|p| norm_sq(p)).collect();
    let second_moment = sq.iter().sum::<f64>() / mf;
    let second_moment_se = crate::vecmath::standard_error(&sq);

    // Covariance trace from running sums, then a leave-one-out pass.
    let s2: f64 = sq.iter().sum();
    let trace_from = |s1: &[f64], s2: f64, count: f64| -> f64 {
        (s2 - norm_sq(s1) / count) / (count - 1.0)
    };
    let s1: Vec<f64> = mean.iter().map(|mu| mu * mf).collect();
    let cov_trace = trace_from(&s1, s2, mf);
    let cov_trace_se = if m >= 3 {
        let mut loo = Vec::with_capacity(m);
        let mut s1_loo = vec![0.0; dim];
        for (p, psq) in s.points().iter().zip(&sq) {
            for ((v, total), x) in s1_loo.iter_mut().zip(&s1).zip(p) {
                *v = total - x;
            }
            loo.push(trace_from(&s1_loo, s2 - psq, mf - 1.0));
        }
        let loo_mean = loo.iter().sum::<f64>() / mf;
        let ss: f64 = loo.iter().map(|t| (t - loo_mean) * (t - loo_mean)).sum();
        ((mf - 1.0) / mf * ss).sqrt()
    } else {
        0.0
    };

    Ok(Moments { mean, mean_se, second_moment, second_moment_se, cov_trace, cov_trace_se })
}
