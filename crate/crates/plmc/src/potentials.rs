//! Convex potentials and their minimum-norm subgradients.
//!
//! The drift of every sampler in this crate is `-(1/2) g(x)` where `g` is the
//! subgradient selection made here: at points with several active pieces we
//! take the least-norm element of the subdifferential, which keeps the map
//! single-valued and monotone (`<x - y, g(x) - g(y)> >= 0`).
//!
//! Variants:
//! - `Zero`: constant zero (uniform target on the body),
//! - `Linear`: `<c, x>`,
//! - `AffineMax`: `max_i <a_i, x> + b_i`,
//! - `ScaledNorm`: `slope * |x - center|`,
//! - `Quadratic`: `(alpha/2) |x|^2`, admitted only on bounded bodies where it
//!   is Lipschitz.

use crate::geometry::{ConvexBody, GeometryError, DEFAULT_PROJECTION_TOL};
use crate::minnorm::min_norm_point;
use crate::vecmath::{axpy, dot, norm, sub};
use thiserror::Error;

/// Active-piece detection tolerance for `AffineMax`: a piece is active when
/// its value is within this of the max.
pub const TIE_TOL: f64 = 1e-9;

/// Certificate tolerance for the least-norm subgradient solve.
pub const MIN_NORM_TOL: f64 = 1e-10;

/// Default iteration budget for `infimum_over` when no value is known.
pub const DEFAULT_INFIMUM_BUDGET: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("dimension mismatch: potential has dimension {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("quadratic potential has no Lipschitz constant on an unbounded body")]
    UnboundedQuadratic,
    #[error("infimum unavailable: unbounded body and no known infimum")]
    InfimumUnavailable,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero { dim: usize },
    Linear { c: Vec<f64> },
    AffineMax { pieces: Vec<(Vec<f64>, f64)> },
    ScaledNorm { center: Vec<f64>, slope: f64 },
    Quadratic { dim: usize, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    /// Infimum over the body of interest, when the caller knows it exactly.
    pub known_infimum: Option<f64>,
}

/// Infimum of a potential over a body; `exact` distinguishes a known value
/// from a projected-subgradient upper estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfimumEstimate {
    pub value: f64,
    pub exact: bool,
}

impl Potential {
    /// Constant zero. Its infimum over any body is zero, so it is recorded.
    pub fn zero(dim: usize) -> Result<Self, PotentialError> {
        check_dim_positive(dim)?;
        Ok(Potential { kind: PotentialKind::Zero { dim }, known_infimum: Some(0.0) })
    }

    pub fn linear(c: Vec<f64>) -> Result<Self, PotentialError> {
        check_dim_positive(c.len())?;
        check_finite(&c, "linear coefficient")?;
        Ok(Potential { kind: PotentialKind::Linear { c }, known_infimum: None })
    }

    pub fn affine_max(pieces: Vec<(Vec<f64>, f64)>) -> Result<Self, PotentialError> {
        if pieces.is_empty() {
            return Err(PotentialError::InvalidPotential("affine max needs pieces".into()));
        }
        let dim = pieces[0].0.len();
        check_dim_positive(dim)?;
        for (a, b) in &pieces {
            if a.len() != dim {
                return Err(PotentialError::InvalidPotential(
                    "affine max pieces must share one dimension".into(),
                ));
            }
            check_finite(a, "affine max gradient")?;
            if !b.is_finite() {
                return Err(PotentialError::InvalidPotential("offsets must be finite".into()));
            }
        }
        Ok(Potential { kind: PotentialKind::AffineMax { pieces }, known_infimum: None })
    }

    pub fn scaled_norm(center: Vec<f64>, slope: f64) -> Result<Self, PotentialError> {
        check_dim_positive(center.len())?;
        check_finite(&center, "norm center")?;
        if !(slope.is_finite() && slope > 0.0) {
            return Err(PotentialError::InvalidPotential(format!(
                "norm slope must be positive and finite, got {slope}"
            )));
        }
        Ok(Potential { kind: PotentialKind::ScaledNorm { center, slope }, known_infimum: None })
    }

    pub fn quadratic(dim: usize, alpha: f64) -> Result<Self, PotentialError> {
        check_dim_positive(dim)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(PotentialError::InvalidPotential(format!(
                "quadratic coefficient must be positive and finite, got {alpha}"
            )));
        }
        Ok(Potential { kind: PotentialKind::Quadratic { dim, alpha }, known_infimum: None })
    }

    pub fn with_known_infimum(mut self, value: f64) -> Self {
        self.known_infimum = Some(value);
        self
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            PotentialKind::Zero { dim } | PotentialKind::Quadratic { dim, .. } => *dim,
            PotentialKind::Linear { c } => c.len(),
            PotentialKind::AffineMax { pieces } => pieces[0].0.len(),
            PotentialKind::ScaledNorm { center, .. } => center.len(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), PotentialError> {
        if x.len() != self.dim() {
            return Err(PotentialError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, PotentialError> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            PotentialKind::Zero { .. } => 0.0,
            PotentialKind::Linear { c } => dot(c, x),
            PotentialKind::AffineMax { pieces } => pieces
                .iter()
                .map(|(a, b)| dot(a, x) + b)
                .fold(f64::NEG_INFINITY, f64::max),
            PotentialKind::ScaledNorm { center, slope } => slope * norm(&sub(x, center)),
            PotentialKind::Quadratic { alpha, .. } => {
                0.5 * alpha * x.iter().map(|v| v * v).sum::<f64>()
            }
        })
    }

    /// The least-norm element of the subdifferential at `x`.
    ///
    /// Smooth pieces return their gradient. `ScaledNorm` returns zero at its
    /// center (the subdifferential is the slope-ball, whose least-norm point
    /// is the origin). `AffineMax` gathers the pieces active within
    /// [`TIE_TOL`] of the max and, if there are several, solves the least-norm
    /// convex-combination problem; a unique active piece is returned exactly.
    pub fn min_norm_subgradient(&self, x: &[f64]) -> Result<Vec<f64>, PotentialError> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            PotentialKind::Zero { dim } => vec![0.0; *dim],
            PotentialKind::Linear { c } => c.clone(),
            PotentialKind::AffineMax { pieces } => {
                let vals: Vec<f64> = pieces.iter().map(|(a, b)| dot(a, x) + b).collect();
                let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let active: Vec<Vec<f64>> = pieces
                    .iter()
                    .zip(&vals)
                    .filter(|(_, v)| top - **v <= TIE_TOL)
                    .map(|((a, _), _)| a.clone())
                    .collect();
                if active.len() == 1 {
                    active.into_iter().next().unwrap()
                } else {
                    min_norm_point(&active, MIN_NORM_TOL)
                }
            }
            PotentialKind::ScaledNorm { center, slope } => {
                let mut d = sub(x, center);
                let nd = norm(&d);
                if nd == 0.0 {
                    d.fill(0.0);
                } else {
                    for v in d.iter_mut() {
                        *v *= slope / nd;
                    }
                }
                d
            }
            PotentialKind::Quadratic { alpha, .. } => x.iter().map(|v| alpha * v).collect(),
        })
    }

    /// Lipschitz constant of the potential over the body: the supremum of
    /// subgradient norms. Quadratic potentials only have one on bounded
    /// bodies (ball: `alpha (|center| + radius)`; box: `alpha` times the norm
    /// of the farthest corner).
    pub fn lipschitz_constant(&self, body: &ConvexBody) -> Result<f64, PotentialError> {
        if body.dim() != self.dim() {
            return Err(PotentialError::DimensionMismatch {
                expected: self.dim(),
                got: body.dim(),
            });
        }
        Ok(match &self.kind {
            PotentialKind::Zero { .. } => 0.0,
            PotentialKind::Linear { c } => norm(c),
            PotentialKind::AffineMax { pieces } => {
                pieces.iter().map(|(a, _)| norm(a)).fold(0.0, f64::max)
            }
            PotentialKind::ScaledNorm { slope, .. } => *slope,
            PotentialKind::Quadratic { alpha, .. } => match body {
                ConvexBody::Ball { center, radius } => alpha * (norm(center) + radius),
                ConvexBody::Box { lower, upper } => {
                    let far_sq: f64 = lower
                        .iter()
                        .zip(upper)
                        .map(|(lo, up)| lo.abs().max(up.abs()).powi(2))
                        .sum();
                    alpha * far_sq.sqrt()
                }
                _ => return Err(PotentialError::UnboundedQuadratic),
            },
        })
    }

    /// Infimum of the potential over the body. A known value is returned
    /// exactly; otherwise projected subgradient descent (step `s/sqrt(t)`
    /// from the body's interior point, `budget` iterations) returns the best
    /// value seen, flagged as an upper estimate. Unbounded bodies without a
    /// known infimum are refused: descent cannot certify anything there.
    pub fn infimum_over(
        &self,
        body: &ConvexBody,
        budget: usize,
    ) -> Result<InfimumEstimate, PotentialError> {
        if let Some(v) = self.known_infimum {
            return Ok(InfimumEstimate { value: v, exact: true });
        }
        if !body.is_bounded() {
            return Err(PotentialError::InfimumUnavailable);
        }
        // Step scale tied to the body's size so the first iterations can
        // cross it.
        let scale = match body {
            ConvexBody::Ball { radius, .. } => *radius,
            ConvexBody::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(lo, up)| up - lo)
                .fold(0.0, f64::max),
            _ => 1.0,
        };
        let mut x = body.interior_point();
        let mut best = self.value(&x)?;
        for t in 1..=budget.max(1) {
            let g = self.min_norm_subgradient(&x)?;
            axpy(-scale / (t as f64).sqrt(), &g, &mut x);
            x = body.project(&x, DEFAULT_PROJECTION_TOL)?;
            best = best.min(self.value(&x)?);
        }
        Ok(InfimumEstimate { value: best, exact: false })
    }
}

fn check_dim_positive(dim: usize) -> Result<(), PotentialError> {
    if dim == 0 {
        return Err(PotentialError::InvalidPotential("dimension must be positive".into()));
    }
    Ok(())
}

fn check_finite(xs: &[f64], what: &str) -> Result<(), PotentialError> {
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(PotentialError::InvalidPotential(format!("{what} must be finite")));
    }
    Ok(())
}
