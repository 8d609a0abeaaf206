//! Helpers shared by the integration test targets: a deterministic instance
//! generator and a brute-force projection oracle.

// Each test target compiles its own copy and uses its own subset.
#![allow(dead_code)]

use plmc::vecmath::{dist_sq, dot, solve_dense};

/// SplitMix64: tiny deterministic generator for test instances, independent
/// of the library's own streams.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn point(&mut self, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..dim).map(|_| self.range(lo, hi)).collect()
    }
}

/// A random bounded-slack halfspace system `n_i . x <= b_i` with the origin
/// strictly feasible: unit normals, offsets `0.1 .. 1.1`.
pub fn random_halfspaces(
    rng: &mut SplitMix64,
    dim: usize,
    count: usize,
) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let mut normals = Vec::with_capacity(count);
    let mut offsets = Vec::with_capacity(count);
    for _ in 0..count {
        let mut n;
        loop {
            n = rng.point(dim, -1.0, 1.0);
            let len = dot(&n, &n).sqrt();
            if len > 1e-3 {
                for v in &mut n {
                    *v /= len;
                }
                break;
            }
        }
        normals.push(n);
        offsets.push(rng.range(0.1, 1.1));
    }
    (normals, offsets, vec![0.0; dim])
}

/// Exact Euclidean projection onto `{x : normals[i] . x <= offsets[i]}` by
/// enumerating candidate active sets and checking the optimality conditions:
/// `x = y - sum lambda_i n_i` with `lambda >= 0`, equality on the active
/// constraints, and feasibility everywhere. The convex problem has a unique
/// solution, so the feasible candidate closest to `y` is the projection.
/// Exponential in the constraint count; test sizes only.
pub fn project_oracle(normals: &[Vec<f64>], offsets: &[f64], y: &[f64]) -> Option<Vec<f64>> {
    let m = normals.len();
    assert!(m <= 16, "oracle enumerates 2^m active sets");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let candidate = if active.is_empty() {
            y.to_vec()
        } else {
            let s = active.len();
            let mut gram = vec![vec![0.0; s]; s];
            let mut rhs = vec![0.0; s];
            for (p, &i) in active.iter().enumerate() {
                rhs[p] = dot(&normals[i], y) - offsets[i];
                for (q, &j) in active.iter().enumerate() {
                    gram[p][q] = dot(&normals[i], &normals[j]);
                }
            }
            let lambda = match solve_dense(&mut gram, &mut rhs, 1e-12) {
                Some(l) => l,
                None => continue,
            };
            if lambda.iter().any(|l| *l < -1e-9) {
                continue;
            }
            let mut x = y.to_vec();
            for (p, &i) in active.iter().enumerate() {
                for (xj, nj) in x.iter_mut().zip(&normals[i]) {
                    *xj -= lambda[p] * nj;
                }
            }
            x
        };
        let feasible = normals
            .iter()
            .zip(offsets)
            .all(|(n, b)| dot(n, &candidate) <= b + 1e-8);
        if !feasible {
            continue;
        }
        let d = dist_sq(y, &candidate);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, candidate));
        }
    }
    best.map(|(_, x)| x)
}

#[allow(dead_code)]
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
