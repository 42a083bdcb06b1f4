//! Computational information geometry for exponential families.
//!
//! Given an exponential family through its potential function in natural
//! coordinates, this crate computes Fisher metrics, α-connections and
//! curvature tensors exactly (Taylor-jet differentiation, no finite
//! differencing on the main path), runs geometric property checks
//! (Einstein, constant curvature, flatness, reducibility), and estimates
//! the Riemannian holonomy group numerically: curvature operators spanned
//! and closed under commutators give a lower bound for the holonomy
//! algebra, which is combined with the classical holonomy decision table.
//!
//! For the d-dimensional normal families (d = 1, 2, 3) the pipeline
//! certifies holonomy SO(d(d+3)/2).
//!
//! Module map:
//! - [`expr`]: scalar fields as operation graphs with declared domains
//! - [`taylor`] / [`deriv`]: exact derivative stacks up to order 4, plus
//!   the central-difference oracle used only by tests
//! - [`models`]: the model zoo (normal-1/2/3, flat-toy, bernoulli,
//!   poisson, gamma2) with charts and seeded samplers
//! - [`curvature`] / [`mc`]: the per-point tensor pipeline and its
//!   Monte-Carlo cross-check
//! - [`checks`]: Einstein / constant-curvature / flatness / sign-profile /
//!   block-structure verdicts over sampled points
//! - [`holonomy`]: decision table, curvature-span algebra bound, loop
//!   transport, classification
//! - [`report`]: run configuration, task orchestration, verification
//!   suite, structured + text reports

pub mod checks;
pub mod curvature;
pub mod deriv;
pub mod error;
pub mod expr;
pub mod holonomy;
pub mod linalg;
pub mod mc;
pub mod models;
pub mod reference;
pub mod report;
pub mod taylor;
pub mod tensors;

pub use error::{Error, Result};
