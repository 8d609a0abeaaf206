//! Convex bodies and Euclidean projection onto them.
//!
//! A [`ConvexBody`] is one of: the whole space, a ball, an axis-aligned box,
//! or a finite intersection of halfspaces `<a_i, x> <= b_i` carrying a
//! certified interior point. Projections are closed-form wherever possible;
//! a halfspace intersection with two or more constraints runs Dykstra's
//! alternating-projection scheme, which converges to the exact projection for
//! convex sets.
//!
//! ```
//! use plmc::geometry::ConvexBody;
//!
//! let ball = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
//! let p = ball.project(&[3.0, 4.0], 1e-10).unwrap();
//! assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
//! ```

use crate::vecmath::{axpy, dist, dot, norm, norm_sq};
use thiserror::Error;

/// Default tolerance for iterative projections (Dykstra stopping rule).
pub const DEFAULT_PROJECTION_TOL: f64 = 1e-10;

/// Sweep cap for Dykstra before reporting non-convergence.
pub const DYKSTRA_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: body has dimension {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("projection did not converge within {sweeps} Dykstra sweeps (residual {residual:.3e})")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("point lies outside the body (margin {margin:.3e})")]
    OutsideBody { margin: f64 },
    #[error("invalid body: {0}")]
    InvalidBody(String),
}

/// A closed convex set with nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    WholeSpace {
        dim: usize,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Intersection of `<normals[i], x> <= offsets[i]`. `interior` strictly
    /// satisfies every constraint; constructors certify this.
    HalfspaceIntersection {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        interior: Vec<f64>,
    },
}

impl ConvexBody {
    pub fn whole_space(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::InvalidBody("dimension must be positive".into()));
        }
        Ok(ConvexBody::WholeSpace { dim })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        if center.is_empty() {
            return Err(GeometryError::InvalidBody("dimension must be positive".into()));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(GeometryError::InvalidBody(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::InvalidBody("ball center must be finite".into()));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn axis_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GeometryError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(GeometryError::InvalidBody(
                "box bounds must be nonempty and of equal length".into(),
            ));
        }
        for (lo, up) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && up.is_finite() && lo < up) {
                return Err(GeometryError::InvalidBody(format!(
                    "box needs finite lower < upper per coordinate, got [{lo}, {up}]"
                )));
            }
        }
        Ok(ConvexBody::Box { lower, upper })
    }

    /// `interior` must strictly satisfy every constraint; that certificate is
    /// what guarantees a nonempty interior (and a positive boundary distance
    /// for chain starts).
    pub fn halfspace_intersection(
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        interior: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        if normals.is_empty() || normals.len() != offsets.len() {
            return Err(GeometryError::InvalidBody(
                "need at least one constraint, with one offset per normal".into(),
            ));
        }
        let dim = interior.len();
        if dim == 0 {
            return Err(GeometryError::InvalidBody("dimension must be positive".into()));
        }
        for (i, a) in normals.iter().enumerate() {
            if a.len() != dim {
                return Err(GeometryError::InvalidBody(format!(
                    "constraint {i} has dimension {}, expected {dim}",
                    a.len()
                )));
            }
            let na = norm(a);
            if !na.is_finite() || na == 0.0 {
                return Err(GeometryError::InvalidBody(format!(
                    "constraint {i} has zero or non-finite normal"
                )));
            }
            let slack = (offsets[i] - dot(a, &interior)) / na;
            if !(slack > 0.0) {
                return Err(GeometryError::InvalidBody(format!(
                    "interior point violates constraint {i} (signed slack {slack:.3e})"
                )));
            }
        }
        Ok(ConvexBody::HalfspaceIntersection { normals, offsets, interior })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::WholeSpace { dim } => *dim,
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Box { lower, .. } => lower.len(),
            ConvexBody::HalfspaceIntersection { interior, .. } => interior.len(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), GeometryError> {
        if x.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Euclidean projection of `x` onto the body. Closed form except for
    /// multi-constraint halfspace intersections, which use Dykstra with the
    /// given stopping tolerance.
    pub fn project(&self, x: &[f64], tol: f64) -> Result<Vec<f64>, GeometryError> {
        self.check_dim(x)?;
        match self {
            ConvexBody::WholeSpace { .. } => Ok(x.to_vec()),
            ConvexBody::Ball { center, radius } => {
                let mut d = x.to_vec();
                axpy(-1.0, center, &mut d);
                let nd = norm(&d);
                if nd <= *radius {
                    return Ok(x.to_vec());
                }
                let mut p = center.clone();
                axpy(radius / nd, &d, &mut p);
                Ok(p)
            }
            ConvexBody::Box { lower, upper } => Ok(x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(xi, (lo, up))| xi.clamp(*lo, *up))
                .collect()),
            ConvexBody::HalfspaceIntersection { normals, offsets, .. } => {
                if normals.len() == 1 {
                    let mut p = x.to_vec();
                    project_halfspace(&normals[0], offsets[0], &mut p);
                    return Ok(p);
                }
                dykstra(normals, offsets, x, tol)
            }
        }
    }

    /// Membership up to `tol`, measured as Euclidean distance where that is
    /// meaningful (halfspace slacks are normalized by the constraint norm).
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool, GeometryError> {
        self.check_dim(x)?;
        Ok(self.signed_margin(x) >= -tol)
    }

    /// Distance from an interior point to the boundary; the whole space
    /// reports `+inf`. Errors when `x` lies outside the body.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64, GeometryError> {
        self.check_dim(x)?;
        let margin = self.signed_margin(x);
        if margin < -1e-9 {
            return Err(GeometryError::OutsideBody { margin });
        }
        Ok(margin.max(0.0))
    }

    /// Signed distance-like margin to the boundary: positive inside, negative
    /// outside, `+inf` for the whole space.
    fn signed_margin(&self, x: &[f64]) -> f64 {
        match self {
            ConvexBody::WholeSpace { .. } => f64::INFINITY,
            ConvexBody::Ball { center, radius } => radius - dist(x, center),
            ConvexBody::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(xi, (lo, up))| (xi - lo).min(up - xi))
                .fold(f64::INFINITY, f64::min),
            ConvexBody::HalfspaceIntersection { normals, offsets, .. } => normals
                .iter()
                .zip(offsets)
                .map(|(a, b)| (b - dot(a, x)) / norm(a))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// A point in the interior: ball center, box midpoint, the halfspace
    /// certificate, or the origin for the whole space.
    pub fn interior_point(&self) -> Vec<f64> {
        match self {
            ConvexBody::WholeSpace { dim } => vec![0.0; *dim],
            ConvexBody::Ball { center, .. } => center.clone(),
            ConvexBody::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(lo, up)| 0.5 * (lo + up)).collect()
            }
            ConvexBody::HalfspaceIntersection { interior, .. } => interior.clone(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexBody::WholeSpace { .. } => false,
            ConvexBody::Ball { .. } | ConvexBody::Box { .. } => true,
            // Conservative: detecting boundedness of a halfspace intersection
            // is a linear-programming question we do not need answered here.
            ConvexBody::HalfspaceIntersection { .. } => false,
        }
    }
}

/// In-place projection onto `<a, x> <= b`.
fn project_halfspace(a: &[f64], b: f64, x: &mut [f64]) {
    let excess = dot(a, x) - b;
    if excess > 0.0 {
        axpy(-excess / norm_sq(a), a, x);
    }
}

/// Dykstra's scheme for an intersection of halfspaces. Each constraint keeps
/// a correction vector; a sweep applies every constraint once. Stops when a
/// sweep moves the iterate less than `tol` and all normalized slacks are
/// within `tol`.
fn dykstra(
    normals: &[Vec<f64>],
    offsets: &[f64],
    x: &[f64],
    tol: f64,
) -> Result<Vec<f64>, GeometryError> {
    let dim = x.len();
    let k = normals.len();
    let mut cur = x.to_vec();
    let mut corrections = vec![vec![0.0; dim]; k];
    let mut prev = vec![0.0; dim];
    let mut residual = f64::INFINITY;
    for _sweep in 0..DYKSTRA_MAX_SWEEPS {
        prev.copy_from_slice(&cur);
        for (a, (b, corr)) in normals.iter().zip(offsets.iter().zip(&mut corrections)) {
            axpy(1.0, corr, &mut cur);
            let before = cur.clone();
            project_halfspace(a, *b, &mut cur);
            for ((c, y), p) in corr.iter_mut().zip(&before).zip(&cur) {
                *c = y - p;
            }
        }
        let moved = dist(&cur, &prev);
        let violation = normals
            .iter()
            .zip(offsets)
            .map(|(a, b)| ((dot(a, &cur) - b) / norm(a)).max(0.0))
            .fold(0.0, f64::max);
        residual = moved.max(violation);
        if residual <= tol {
            return Ok(cur);
        }
    }
    Err(GeometryError::NonConvergence { sweeps: DYKSTRA_MAX_SWEEPS, residual })
}
