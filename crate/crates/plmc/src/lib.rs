//! Projected Langevin Monte Carlo on convex bodies.
//!
//! The sampler is the projected Euler scheme
//!
//! ```text
//! x_{k+1} = P_K( x_k + xi_{k+1} - (eta/2) g(x_k) )
//! ```
//!
//! with `P_K` the Euclidean projection onto a convex body, `g` the
//! minimum-norm subgradient of a convex Lipschitz potential, and `xi_k`
//! Gaussian increments of covariance `eta * Id`. Alongside it live:
//!
//! - the reflected diffusion it discretizes, simulated at a finer step and
//!   coupled to the sampler through the exact same Brownian path
//!   ([`chains`]),
//! - closed-form accuracy and mixing bounds plus a step-size/step-count
//!   scheduler ([`theory`]),
//! - Wasserstein-2 diagnostics (exact assignment, 1D, sliced) and exact
//!   reference samplers for benchmark targets ([`metrics`], [`oracles`]).
//!
//! The `plmc-lab` binary drives the experiment workflows from JSON configs;
//! everything it does is reachable through the library API.
//!
//! ```
//! use plmc::chains::{run_plmc, ChainConfig};
//! use plmc::geometry::ConvexBody;
//! use plmc::potentials::Potential;
//!
//! let body = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
//! let potential = Potential::zero(2).unwrap();
//! let cfg = ChainConfig::new(body, potential, vec![0.0, 0.0], 0.01, 100, 7, 0).unwrap();
//! let traj = run_plmc(&cfg, 10).unwrap();
//! assert_eq!(traj.final_point.len(), 2);
//! ```

pub mod chains;
pub mod cli;
pub mod config;
pub mod geometry;
pub mod metrics;
pub mod minnorm;
pub mod oracles;
pub mod potentials;
pub mod report;
pub mod rng;
pub mod svg;
pub mod theory;
pub mod vecmath;

mod assignment;
