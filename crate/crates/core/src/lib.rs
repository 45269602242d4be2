//! Heavy-tailed Wigner and sample-covariance ensembles, and Monte Carlo checks
//! that their largest eigenvalues behave like their largest entries: after
//! normalization by `b_n` (resp. `b_np^2`) the top of the spectrum is close
//! to a Poisson point process with a Fréchet-distributed maximum.

pub mod eigen;
pub mod ensemble;
pub mod error;
pub mod extremes;
pub mod harness;
pub mod matrix;
pub mod points;
mod quad;
pub mod rng;
pub mod tail;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Wigner,
    Covariance,
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnsembleKind::Wigner => "wigner",
            EnsembleKind::Covariance => "covariance",
        })
    }
}
