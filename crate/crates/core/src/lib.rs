//! Localized marginal inference for sparse Ising models.
//!
//! A query node's marginal is approximated on a small region grown around it
//! by greedy expansion. Each region carries a certificate derived from the
//! Dobrushin comparison theorem that bounds the gap between the localized
//! marginal and the marginal under the full model, so the full graph never has
//! to be traversed.
//!
//! Module map:
//!
//! - [`model`]: sparse Ising models, regions, and localized models.
//! - [`exact`]: brute-force enumeration and bucket elimination oracles.
//! - [`meanfield`]: naive mean-field inference, global and on the boundary.
//! - [`dobrushin`]: interaction matrices, perturbation vectors and bounds.
//! - [`expansion`]: greedy region growth and the two baseline strategies.
//! - [`experiments`]: seeded generators and the grid / citation studies.
//! - [`cli`]: the `localmrf` command-line surface.

pub mod cli;
pub mod dobrushin;
pub mod error;
pub mod exact;
pub mod expansion;
pub mod experiments;
pub mod meanfield;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
pub use model::{BoundaryMethod, IsingModel, LocalizedModel, Region};
