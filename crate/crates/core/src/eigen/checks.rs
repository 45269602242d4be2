use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// `m` with row and column `index` removed.
pub fn principal_minor(m: &DenseMatrix, index: usize) -> Result<DenseMatrix> {
    let n = m.rows();
    if !m.is_square() || index >= n {
        return Err(Error::InvalidArgument(format!(
            "cannot remove index {index} from a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let keep = |k: usize| if k < index { k } else { k + 1 };
    Ok(DenseMatrix::from_fn(n - 1, n - 1, |i, j| m[(keep(i), keep(j))]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterlacingReport {
    pub holds: bool,
    /// Largest amount by which an inequality fails (0 when none does).
    pub worst_violation: f64,
    /// 1-based index `i` of the minor eigenvalue `mu_i` in the worst violation.
    pub position: Option<usize>,
}

/// Checks `lambda_i >= mu_i >= lambda_{i+1}` for every `i`, allowing an
/// additive slack of `tol * scale`, where `scale` is the largest absolute
/// eigenvalue of either spectrum.
pub fn interlacing_check(parent: &Spectrum, minor: &Spectrum, tol: f64) -> Result<InterlacingReport> {
    if parent.len() != minor.len() + 1 {
        return Err(Error::DimensionMismatch {
            expected: parent.len().saturating_sub(1),
            got: minor.len(),
        });
    }
    let scale = parent.max_abs().max(minor.max_abs());
    let lambda = &parent.values;
    let mut worst = 0.0;
    let mut position = None;
    for (i, &mu) in minor.values.iter().enumerate() {
        let violation = (mu - lambda[i]).max(lambda[i + 1] - mu);
        if violation > worst {
            worst = violation;
            position = Some(i + 1);
        }
    }
    Ok(InterlacingReport {
        holds: worst <= tol * scale,
        worst_violation: worst,
        position,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub holds: bool,
    pub worst_violation: f64,
}

/// Checks `lambda_l(B) + lambda_min(C) <= lambda_l(B + C) <= lambda_l(B) + lambda_max(C)`
/// for every `l`, with additive slack `tol * scale`.
pub fn weyl_check(b: &Spectrum, c: &Spectrum, sum: &Spectrum, tol: f64) -> Result<WeylReport> {
    if b.len() != c.len() || b.len() != sum.len() || b.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            got: sum.len(),
        });
    }
    let (c_max, c_min) = (c.values[0], c.values[c.len() - 1]);
    let scale = b.max_abs() + c.max_abs();
    let worst = b
        .values
        .iter()
        .zip(&sum.values)
        .map(|(&lb, &ls)| (lb + c_min - ls).max(ls - lb - c_max))
        .fold(0.0f64, f64::max);
    Ok(WeylReport {
        holds: worst <= tol * scale,
        worst_violation: worst,
    })
}
