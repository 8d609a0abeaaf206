//! Minimum-norm point of a convex hull.
//!
//! Given points `p_1, ..., p_k`, computes `argmin { |x|^2 : x in conv{p_i} }`
//! by Wolfe's active-set iteration: grow a corral of points, project the
//! origin onto its affine hull (a bordered Gram solve), and shrink the corral
//! whenever a barycentric weight turns nonpositive.
//!
//! Termination uses Wolfe's certificate: if `min_j <x, p_j> >= |x|^2 - eps`
//! then for every hull point `y`, `|y|^2 >= |x|^2 - 2 eps`, so `x` is optimal
//! to within `2 eps`.

use crate::vecmath::{dot, norm_sq, solve_dense};

/// Weights below this are treated as zero when shrinking the corral.
const WEIGHT_FLOOR: f64 = 1e-13;

/// Min-norm point of `conv(points)`, solved to certificate tolerance `tol`
/// (scaled by `1 + |x|^2`). Points must be nonempty and of equal dimension.
pub fn min_norm_point(points: &[Vec<f64>], tol: f64) -> Vec<f64> {
    assert!(!points.is_empty(), "need at least one point");
    let dim = points[0].len();
    debug_assert!(points.iter().all(|p| p.len() == dim));
    if points.len() == 1 {
        return points[0].clone();
    }

    // Corral: indices into `points` with strictly positive weights.
    let start = (0..points.len())
        .min_by(|&i, &j| norm_sq(&points[i]).total_cmp(&norm_sq(&points[j])))
        .unwrap();
    let mut corral = vec![start];
    let mut weights = vec![1.0];
    let mut x = points[start].clone();

    let max_major = 16 * points.len() + 64;
    for _ in 0..max_major {
        // Most improving vertex under the current iterate.
        let j = (0..points.len())
            .min_by(|&a, &b| dot(&x, &points[a]).total_cmp(&dot(&x, &points[b])))
            .unwrap();
        let gap = norm_sq(&x) - dot(&x, &points[j]);
        if gap <= tol * (1.0 + norm_sq(&x)) {
            return x;
        }
        if corral.contains(&j) {
            // Numerically stalled: the certificate gap cannot close further.
            return x;
        }
        corral.push(j);
        weights.push(0.0);

        // Minor cycle: project origin onto the affine hull of the corral,
        // walking back toward the previous convex combination when weights
        // leave the simplex.
        let max_minor = 2 * points.len() + 16;
        for _ in 0..max_minor {
            match affine_min_norm(points, &corral) {
                Some(v) if v.iter().all(|&vi| vi > WEIGHT_FLOOR) => {
                    weights = v;
                    break;
                }
                Some(v) => {
                    // Largest step toward v keeping all weights nonnegative.
                    let mut theta = 1.0f64;
                    for (w, vi) in weights.iter().zip(&v) {
                        if *vi < WEIGHT_FLOOR {
                            theta = theta.min(w / (w - vi));
                        }
                    }
                    for (w, vi) in weights.iter_mut().zip(&v) {
                        *w += theta * (vi - *w);
                    }
                    // Drop vanished points.
                    let mut idx = 0;
                    while idx < corral.len() {
                        if weights[idx] <= WEIGHT_FLOOR {
                            corral.swap_remove(idx);
                            weights.swap_remove(idx);
                        } else {
                            idx += 1;
                        }
                    }
                    if corral.len() <= 1 {
                        break;
                    }
                }
                None => {
                    // Affinely dependent corral: discard the lightest point
                    // and retry; the projection is unchanged by the removal.
                    let lightest = weights
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.total_cmp(b.1))
                        .map(|(i, _)| i)
                        .unwrap();
                    corral.swap_remove(lightest);
                    weights.swap_remove(lightest);
                    if corral.len() <= 1 {
                        break;
                    }
                }
            }
        }

        // Renormalize (guards slow drift of the weight sum) and rebuild x.
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        x = combine(points, &corral, &weights, dim);
    }
    x
}

fn combine(points: &[Vec<f64>], corral: &[usize], weights: &[f64], dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    for (&i, &w) in corral.iter().zip(weights) {
        for (xj, pj) in x.iter_mut().zip(&points[i]) {
            *xj += w * pj;
        }
    }
    x
}

/// Minimizes `|sum v_i p_i|^2` subject to `sum v_i = 1` (signs free) over the
/// corral, via the bordered Gram system. `None` when the system is singular.
fn affine_min_norm(points: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let s = corral.len();
    let mut a = vec![vec![0.0; s + 1]; s + 1];
    let mut b = vec![0.0; s + 1];
    for (r, &i) in corral.iter().enumerate() {
        for (c, &j) in corral.iter().enumerate() {
            a[r][c] = dot(&points[i], &points[j]);
        }
        a[r][s] = 1.0;
        a[s][r] = 1.0;
    }
    b[s] = 1.0;
    let sol = solve_dense(&mut a, &mut b, 1e-13)?;
    Some(sol[..s].to_vec())
}
