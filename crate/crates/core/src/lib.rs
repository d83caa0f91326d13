//! Entropic chaos degree analysis for discrete dynamical systems.
//!
//! The chaos degree of a map under a finite observation is the conditional
//! entropy of the next partition cell given the current one, estimated from
//! orbit statistics:
//!
//! ```text
//! D = sum_ij p_ij log(p_i / p_ij) = S(p_out) - I(p; channel)
//! ```
//!
//! `D > 0` declares the dynamics chaotic under that observation; `D = 0`
//! stable. The crate provides:
//!
//! - [`dynamics`]: built-in maps (logistic, circle, tent, Henon, baker,
//!   Tinkerbell), custom maps, orbit generation, Jacobians;
//! - [`partition`]: equi-partitions, symbolization, empirical one-step
//!   models and channels;
//! - [`infodyn`]: entropies, the chaos degree in both forms, composable
//!   observations, infimum over observation families, the complexity-axiom
//!   suite;
//! - [`lyapunov`]: 1-D and m-dimensional Lyapunov exponents for
//!   cross-validation;
//! - [`circlemap`]: continued fractions, the rotation map's closed-form
//!   chaos degree, and the convergent-denominator decay study;
//! - [`quantum`]: density matrices, Kraus channels, von Neumann entropy,
//!   Schatten decompositions, the quantum chaos degree, and observable
//!   orbits;
//! - [`sweep`], [`report`]: parameter sweeps and deterministic CSV/JSON
//!   emission.

pub mod circlemap;
pub mod dynamics;
pub mod error;
pub mod infodyn;
pub mod lyapunov;
pub mod partition;
pub mod quantum;
pub mod report;
pub mod sweep;

pub use error::{Error, Result};
