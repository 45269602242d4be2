//! Order statistics of matrix entries and the entry-level predictions and
//! bounds for the top eigenvalues.
//!
//! Positions are 0-based `(row, col)` throughout.

mod lemmas;
mod truncation;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::EnsembleKind;

pub use lemmas::{lemma_diagnostics, LemmaEvent, LemmaEventKind, LemmaOptions, LemmaReport, RowSumExponent, Witness};
pub use truncation::{
    epsilon_cap, truncated_mean, truncated_moment, truncated_top_scaling, truncated_top_statistic, ScalingPoint,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryScope {
    /// `i <= j` of a square matrix.
    UpperTriangleWithDiagonal,
    FullRectangle,
}

impl EntryScope {
    pub fn for_ensemble(kind: EnsembleKind) -> Self {
        match kind {
            EnsembleKind::Wigner => EntryScope::UpperTriangleWithDiagonal,
            EnsembleKind::Covariance => EntryScope::FullRectangle,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub abs_value: f64,
    pub value: f64,
    pub row: usize,
    pub col: usize,
}

/// Largest entries by absolute value; ties broken by `(row, col)` ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryOrderStatistics {
    pub top: Vec<EntryRecord>,
    pub scope: EntryScope,
}

fn entry_order(a: &EntryRecord, b: &EntryRecord) -> Ordering {
    b.abs_value
        .total_cmp(&a.abs_value)
        .then(a.row.cmp(&b.row))
        .then(a.col.cmp(&b.col))
}

pub fn top_entries(m: &DenseMatrix, scope: EntryScope, count: usize) -> Result<EntryOrderStatistics> {
    let mut all: Vec<EntryRecord> = match scope {
        EntryScope::UpperTriangleWithDiagonal => {
            if !m.is_square() {
                return Err(Error::InvalidArgument("upper-triangle scope needs a square matrix".into()));
            }
            let n = m.rows();
            let mut v = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in i..n {
                    let value = m[(i, j)];
                    v.push(EntryRecord {
                        abs_value: value.abs(),
                        value,
                        row: i,
                        col: j,
                    });
                }
            }
            v
        }
        EntryScope::FullRectangle => (0..m.rows())
            .flat_map(|i| {
                m.row(i).iter().enumerate().map(move |(j, &value)| EntryRecord {
                    abs_value: value.abs(),
                    value,
                    row: i,
                    col: j,
                })
            })
            .collect(),
    };
    if count > all.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {count} entries but the scope holds {}",
            all.len()
        )));
    }
    if count > 0 && count < all.len() {
        all.select_nth_unstable_by(count - 1, entry_order);
    }
    all.truncate(count);
    all.sort_by(entry_order);
    Ok(EntryOrderStatistics { top: all, scope })
}

/// Entry-level prediction of the `k` largest eigenvalues: `|a_(l)|` for a
/// Wigner matrix, `a_(l)^2` for the Gram matrix of a rectangular one.
pub fn predicted_top_eigenvalues(stats: &EntryOrderStatistics, kind: EnsembleKind, k: usize) -> Result<Vec<f64>> {
    if k > stats.top.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the {} stored entries",
            stats.top.len()
        )));
    }
    Ok(stats.top[..k]
        .iter()
        .map(|e| match kind {
            EnsembleKind::Wigner => e.abs_value,
            EnsembleKind::Covariance => e.value * e.value,
        })
        .collect())
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DenseMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `<M v, v>` for `v = (e_i + s e_j) / sqrt 2` at the top entry `(i, j)`,
/// with `s` the sign of that entry (`v = e_i` on the diagonal).
pub fn rayleigh_lower_bound(m: &DenseMatrix, stats: &EntryOrderStatistics) -> Result<f64> {
    let top = stats
        .top
        .first()
        .ok_or_else(|| Error::InvalidArgument("no entries recorded".into()))?;
    if !m.is_square() || top.row >= m.rows() || top.col >= m.cols() {
        return Err(Error::InvalidArgument("top entry does not index a square matrix".into()));
    }
    let (i, j) = (top.row, top.col);
    if i == j {
        return Ok(m[(i, i)]);
    }
    let s = if m[(i, j)] >= 0.0 { 1.0 } else { -1.0 };
    Ok(0.5 * (m[(i, i)] + m[(j, j)] + s * (m[(i, j)] + m[(j, i)])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_entries_example() {
        let m = DenseMatrix::from_rows(&[vec![1.0, -5.0], vec![-5.0, 2.0]]);
        let s = top_entries(&m, EntryScope::UpperTriangleWithDiagonal, 2).unwrap();
        let got: Vec<_> = s.top.iter().map(|e| (e.abs_value, e.value, (e.row + 1, e.col + 1))).collect();
        assert_eq!(got, vec![(5.0, -5.0, (1, 2)), (2.0, 2.0, (2, 2))]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let m = DenseMatrix::from_rows(&[vec![7.0; 3], vec![7.0; 3]]);
        let s = top_entries(&m, EntryScope::FullRectangle, 6).unwrap();
        let pos: Vec<_> = s.top.iter().map(|e| (e.row, e.col)).collect();
        assert_eq!(pos, vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]);
        let s = top_entries(&m, EntryScope::FullRectangle, 2).unwrap();
        assert_eq!(s.top.iter().map(|e| (e.row, e.col)).collect::<Vec<_>>(), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn top_entries_errors() {
        let m = DenseMatrix::zeros(2, 2);
        assert!(top_entries(&m, EntryScope::UpperTriangleWithDiagonal, 4).is_err());
        assert!(top_entries(&DenseMatrix::zeros(2, 3), EntryScope::UpperTriangleWithDiagonal, 1).is_err());
        assert!(top_entries(&m, EntryScope::UpperTriangleWithDiagonal, 0).unwrap().top.is_empty());
    }

    #[test]
    fn predictions() {
        let m = DenseMatrix::from_rows(&[vec![0.0, -7.0], vec![-7.0, 0.0]]);
        let s = top_entries(&m, EntryScope::UpperTriangleWithDiagonal, 1).unwrap();
        assert_eq!(predicted_top_eigenvalues(&s, EnsembleKind::Wigner, 1).unwrap(), vec![7.0]);
        assert_eq!(predicted_top_eigenvalues(&s, EnsembleKind::Wigner, 0).unwrap(), Vec::<f64>::new());
        assert!(predicted_top_eigenvalues(&s, EnsembleKind::Wigner, 2).is_err());

        let r = DenseMatrix::from_rows(&[vec![3.0, 1.0]]);
        let s = top_entries(&r, EntryScope::FullRectangle, 1).unwrap();
        assert_eq!(predicted_top_eigenvalues(&s, EnsembleKind::Covariance, 1).unwrap(), vec![9.0]);
    }

    #[test]
    fn inf_norm_examples() {
        assert_eq!(inf_norm(&DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![3.0, 0.0]])), 3.0);
        assert_eq!(inf_norm(&DenseMatrix::identity(4)), 1.0);
    }

    #[test]
    fn rayleigh_examples() {
        let cases = [
            (DenseMatrix::from_rows(&[vec![0.0, 5.0], vec![5.0, 0.0]]), 5.0),
            (DenseMatrix::from_rows(&[vec![0.0, -5.0], vec![-5.0, 0.0]]), 5.0),
            (DenseMatrix::from_diagonal(&[4.0, 1.0]), 4.0),
        ];
        for (m, want) in cases {
            let s = top_entries(&m, EntryScope::UpperTriangleWithDiagonal, 1).unwrap();
            assert!((rayleigh_lower_bound(&m, &s).unwrap() - want).abs() < 1e-15);
        }
    }
}
