//! Symmetric eigensolvers.
//!
//! [`full_spectrum`] is the dense reference path (Householder reduction to
//! tridiagonal form followed by implicit-shift QL). [`top_k`] is a Lanczos
//! iteration with full reorthogonalization for the few largest eigenvalues of
//! a matrix-free operator.

mod checks;
mod dense;
mod lanczos;
mod operator;

use serde::{Deserialize, Serialize};

pub use checks::{interlacing_check, principal_minor, weyl_check, InterlacingReport, WeylReport};
pub use dense::{full_spectrum, tridiagonal_eigen, TridiagonalEigen};
pub use lanczos::{top_k, LanczosOptions};
pub use operator::{FnOperator, GramOperator, SymmetricOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Dense,
    Iterative,
}

/// Eigenvalues sorted in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub solver: SolverKind,
    /// A-priori backward error bound (dense) or largest Ritz residual (iterative).
    pub residual_bound: f64,
    /// QL iterations (dense) or Lanczos steps (iterative).
    pub iterations: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Largest absolute eigenvalue.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub(crate) fn sort_descending(values: &mut [f64]) {
    values.sort_by(|a, b| b.total_cmp(a));
}
