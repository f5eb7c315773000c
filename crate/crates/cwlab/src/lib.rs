//! Exact finite-size numerics for the multi-group Curie-Weiss model.
//!
//! `d` groups of plus/minus spins with sizes `n_1, ..., n_d` interact
//! through a symmetric coupling matrix `J` via the Hamiltonian
//! `H(s) = -(1/2n) sum_{a,b} J_ab S_a S_b`, where `S_a` is the spin sum of
//! group `a`. The Gibbs weight depends on a configuration only through the
//! vector `(S_1, ..., S_d)`, so the entire distribution is computable
//! exactly on a grid of `prod_a (n_a + 1)` points. Everything in this crate
//! builds on that exact core.
//!
//! Module map, in dependency order:
//!
//! - [`model`]: group sizes, couplings, Hamiltonian, magnetization states
//!   and their enumeration, log weights.
//! - [`regime`]: the high-temperature criterion (`beta < 1`, or positive
//!   definiteness of `H = J^{-1} - diag(alpha)`), group weights, and the
//!   limiting Gaussian covariance `C = I + D H^{-1} D`.
//! - [`exactdist`]: exact pmf tables, brute-force oracle, moments,
//!   characteristic function, Fourier inversion, and the sup-norm
//!   local-limit error against the Gaussian density.
//! - [`definetti`]: the mixing density whose binomial mixture reproduces
//!   the exact pmf, its quadrature, concentration (tail mass), and a
//!   two-stage sampler.
//! - [`bounds`]: Rademacher characteristic-function facts used by Fourier
//!   arguments - the Gaussian-type envelope on its documented window, the
//!   closed-form off-origin sup `theta`, lattice periodicity, and the
//!   peripheral integral diagnostic.
//! - [`mcmc`]: a count-level Metropolis chain with O(d) energy increments,
//!   plus total-variation comparison against exact tables.
//! - [`numeric`] / [`linalg`]: stable special functions, compensated and
//!   deterministic log-space reductions, small dense Cholesky/LU.
//! - [`export`] / [`config`] / [`cli`]: plot-ready CSV artifacts with
//!   pinned schemas, the experiment config file, and the command-line
//!   front end (see `FORMATS.md` at the repository root).
//!
//! The `examples/` directory holds a runnable tour of each capability and
//! is the recommended entry point. Determinism is a crate-wide contract:
//! all randomness is seeded [`rng::SeededRng`] with a documented draw
//! order, and parallel reductions merge fixed-size chunks in order, so
//! results are independent of thread count.

// Guards written as `!(x > 0.0)` are deliberate: unlike `x <= 0.0` they
// also reject NaN, which is exactly what these validations are for.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod config;
pub mod definetti;
pub mod error;
pub mod exactdist;
pub mod export;
pub mod linalg;
pub mod mcmc;
pub mod model;
pub mod numeric;
pub mod regime;
pub mod rng;

pub use error::{CwError, Result};
