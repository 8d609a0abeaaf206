//! Exact minimum-cost assignment (Hungarian method with potentials).
//!
//! Shortest-augmenting-path formulation, O(n^3), dense float costs. One row
//! is inserted per outer iteration; dual potentials keep reduced costs
//! nonnegative, so each augmentation is a Dijkstra pass over columns.

/// Returns `(assignment, total)` where `assignment[row] = column` minimizes
/// the summed cost over all perfect matchings. `cost` must be square.
pub(crate) fn min_cost_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    debug_assert!(cost.iter().all(|row| row.len() == n));
    // 1-indexed; column 0 is the virtual source.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1]; // owner[j]: row matched to column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut min_cols = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_cols[j] {
                    min_cols[j] = reduced;
                    way[j] = j0;
                }
                if min_cols[j] < delta {
                    delta = min_cols[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_cols[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        // Unwind the augmenting path.
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    let mut total = 0.0;
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
        total += cost[owner[j] - 1][j - 1];
    }
    (assignment, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        let n = cost.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, cost, &mut best);
        best
    }

    fn permute(perm: &mut Vec<usize>, k: usize, cost: &[Vec<f64>], best: &mut f64) {
        if k == perm.len() {
            let total: f64 = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            *best = best.min(total);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute(perm, k + 1, cost, best);
            perm.swap(k, i);
        }
    }

    #[test]
    fn trivial_sizes() {
        let (a, t) = min_cost_assignment(&[vec![3.5]]);
        assert_eq!(a, vec![0]);
        assert_eq!(t, 3.5);

        let (a, t) = min_cost_assignment(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(a, vec![0, 1]);
        assert_eq!(t, 2.0);
    }

    #[test]
    fn antidiagonal_is_forced() {
        let big = 100.0;
        let (a, t) = min_cost_assignment(&[
            vec![big, big, 1.0],
            vec![big, 2.0, big],
            vec![3.0, big, big],
        ]);
        assert_eq!(a, vec![2, 1, 0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for case in 0..300 {
            let n = 1 + case % 7;
            let cost: Vec<Vec<f64>> =
                (0..n).map(|_| (0..n).map(|_| next() * 10.0).collect()).collect();
            let (assignment, total) = min_cost_assignment(&cost);
            // Perfect matching.
            let mut seen = vec![false; n];
            for &j in &assignment {
                assert!(!seen[j]);
                seen[j] = true;
            }
            let recomputed: f64 =
                assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            assert!((recomputed - total).abs() < 1e-9);
            assert!(
                (total - brute_force(&cost)).abs() < 1e-9,
                "case {case}: {total} vs {}",
                brute_force(&cost)
            );
        }
    }
}
