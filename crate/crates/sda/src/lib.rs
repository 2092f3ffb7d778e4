//! Randomized projection solvers for consistent linear systems.
//!
//! The library finds the projection, in a user-chosen SPD norm, of a point
//! onto the solution set of `Ax = b`. Each iteration is driven by a random
//! sketching matrix `S` drawn from a configurable distribution; well-known
//! methods such as randomized Kaczmarz, randomized coordinate ascent,
//! block Kaczmarz / randomized Newton and randomized gossip all arise from
//! specific distribution choices.
//!
//! Main entry points:
//! - [`solver::ProjectionProblem`] describes the constrained projection,
//! - [`sketch::SamplerSpec`] picks the sketching distribution,
//! - [`solver::solve`] runs the iteration (dual- or primal-started),
//! - [`rates`] computes the exact expected convergence rate and its
//!   rank-based lower bound,
//! - [`gossip`] specializes the machinery to average consensus on graphs.
//!
//! The `examples/` directory contains one runnable example per capability;
//! a thin `sda` binary exposes problem generation, benchmarking, rate
//! analysis and gossip simulation from the command line.

pub mod bench;
pub mod cli;
pub mod error;
pub mod gossip;
pub mod io;
pub mod linalg;
pub mod rates;
pub mod sketch;
pub mod solver;

pub use error::{Error, Result};
