//! Propagating preference uncertainty through scalarized multi-objective
//! optimization.
//!
//! A decision maker's preference over `m` competing objectives is expressed as
//! a weight vector `beta`; a draw of `beta` selects one optimal design through
//! the scalarized problem `min beta' f(x)`. When `beta` is random, the argmin
//! becomes a random design, and this crate computes that induced distribution
//! together with the summaries used to interpret it:
//!
//! - [`problem`]: multi-objective problem model, the two built-in ground
//!   vehicle case studies, and scalarization into LP/QP instances.
//! - [`dist`]: preference distributions (truncated multivariate normal,
//!   Dirichlet, multivariate normal, fixed) with reproducible seeded streams.
//! - [`solver`]: embedded exact solvers — a bounded-variable revised simplex
//!   and a primal active-set convex QP — with KKT certification.
//! - [`propagate`]: the Monte Carlo engine mapping preference draws to
//!   recorded optimal designs, plus discrete-support detection, correlation
//!   matrices and marginal histograms.
//! - [`sensitivity`]: Sobol' indices and Shapley effects of each objective
//!   outcome with respect to the induced design variables.
//! - [`frechet`]: Fréchet mean/variance of the design distribution in
//!   normalized coordinates and multi-scenario sweeps.
//! - [`pareto`]: the preference-free baseline (Latin hypercube sampling with
//!   non-dominated sorting) and the overlay comparison.
//! - [`demos`]: closed-form one-dimensional examples used as analytic
//!   cross-checks of the full pipeline.
//!
//! All sampling is addressed by `(master_seed, stream_index)` so results are
//! bitwise reproducible and independent of the number of worker threads. The
//! `parallel` feature (default) maps Monte Carlo batches over a rayon pool; a
//! sequential fallback is always compiled.

pub mod demos;
pub mod dist;
pub mod error;
pub mod frechet;
pub mod output;
pub mod pareto;
pub mod problem;
pub mod propagate;
pub mod rng;
pub mod sensitivity;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
