//! Convexity properties every potential variant must satisfy: the
//! subgradient inequality, monotonicity of the subgradient map, and the
//! Lipschitz bound on subgradient norms over a bounded body.

mod common;

use common::SplitMix64;
use plmc::geometry::ConvexBody;
use plmc::potentials::Potential;
use plmc::vecmath::{dot, norm, sub};
use proptest::prelude::*;

const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
enum PotentialCase {
    Linear { c: Vec<f64> },
    AffineMax { seed: u64, pieces: usize, dim: usize },
    ScaledNorm { center: Vec<f64>, slope: f64 },
    Quadratic { dim: usize, alpha: f64 },
    Zero { dim: usize },
}

impl PotentialCase {
    fn build(&self) -> Potential {
        match self {
            PotentialCase::Linear { c } => Potential::linear(c.clone()).unwrap(),
            PotentialCase::AffineMax { seed, pieces, dim } => {
                let mut rng = SplitMix64(*seed);
                let rows = (0..*pieces)
                    .map(|_| (rng.point(*dim, -2.0, 2.0), rng.range(-1.0, 1.0)))
                    .collect();
                Potential::affine_max(rows).unwrap()
            }
            PotentialCase::ScaledNorm { center, slope } => {
                Potential::scaled_norm(center.clone(), *slope).unwrap()
            }
            PotentialCase::Quadratic { dim, alpha } => {
                Potential::quadratic(*dim, *alpha).unwrap()
            }
            PotentialCase::Zero { dim } => Potential::zero(*dim).unwrap(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            PotentialCase::Linear { c } => c.len(),
            PotentialCase::AffineMax { dim, .. } => *dim,
            PotentialCase::ScaledNorm { center, .. } => center.len(),
            PotentialCase::Quadratic { dim, .. } => *dim,
            PotentialCase::Zero { dim } => *dim,
        }
    }
}

fn potential_case() -> impl Strategy<Value = PotentialCase> {
    (1..=4usize).prop_flat_map(|d| {
        prop_oneof![
            prop::collection::vec(-2.0..2.0f64, d)
                .prop_map(|c| PotentialCase::Linear { c }),
            (any::<u64>(), 1..=5usize)
                .prop_map(move |(seed, pieces)| PotentialCase::AffineMax { seed, pieces, dim: d }),
            (prop::collection::vec(-1.0..1.0f64, d), 0.1..3.0f64)
                .prop_map(|(center, slope)| PotentialCase::ScaledNorm { center, slope }),
            (0.1..2.0f64).prop_map(move |alpha| PotentialCase::Quadratic { dim: d, alpha }),
            Just(PotentialCase::Zero { dim: d }),
        ]
    })
}

fn case_with_pair() -> impl Strategy<Value = (PotentialCase, Vec<f64>, Vec<f64>)> {
    potential_case().prop_flat_map(|case| {
        let d = case.dim();
        (
            Just(case),
            prop::collection::vec(-2.0..2.0f64, d),
            prop::collection::vec(-2.0..2.0f64, d),
        )
    })
}

proptest! {
    // phi(y) >= phi(x) + g(x).(y - x): g(x) supports the graph from below.
    #[test]
    fn subgradient_inequality((case, x, y) in case_with_pair()) {
        let p = case.build();
        let gx = p.min_norm_subgradient(&x).unwrap();
        let lhs = p.value(&y).unwrap();
        let rhs = p.value(&x).unwrap() + dot(&gx, &sub(&y, &x));
        prop_assert!(lhs >= rhs - VIOLATION_TOL, "gap {}", rhs - lhs);
    }

    // (g(x) - g(y)).(x - y) >= 0: the subgradient map is monotone.
    #[test]
    fn subgradient_map_is_monotone((case, x, y) in case_with_pair()) {
        let p = case.build();
        let gx = p.min_norm_subgradient(&x).unwrap();
        let gy = p.min_norm_subgradient(&y).unwrap();
        let inner = dot(&sub(&gx, &gy), &sub(&x, &y));
        prop_assert!(inner >= -VIOLATION_TOL, "monotonicity gap {inner}");
    }

    // |g(x)| <= L over a body containing the sample box.
    #[test]
    fn subgradient_norms_respect_the_lipschitz_constant(
        (case, x, _) in case_with_pair()
    ) {
        let p = case.build();
        let body = ConvexBody::ball(vec![0.0; case.dim()], 4.0).unwrap();
        let l = p.lipschitz_constant(&body).unwrap();
        let g = p.min_norm_subgradient(&x).unwrap();
        prop_assert!(norm(&g) <= l + 1e-12, "|g| = {} > L = {l}", norm(&g));
    }
}

// The min-norm selection at a kink: its norm never exceeds that of any
// active piece's gradient (spot check on a deterministic sweep; the
// randomized inequality tests above cover correctness).
#[test]
fn min_norm_selection_is_minimal_along_a_kink() {
    let p = Potential::affine_max(vec![
        (vec![1.0, 0.5], 0.0),
        (vec![-1.0, 0.5], 0.0),
    ])
    .unwrap();
    // On x1 = 0 both pieces are active; the least-norm combination is
    // (0, 0.5), shorter than either gradient.
    for x2 in [-1.0, 0.0, 2.0] {
        let g = p.min_norm_subgradient(&[0.0, x2]).unwrap();
        assert!((g[0]).abs() < 1e-9);
        assert!((g[1] - 0.5).abs() < 1e-9);
        assert!(norm(&g) < norm(&[1.0, 0.5]));
    }
}
