use crate::matrix::{dot, DenseMatrix};

/// A symmetric linear map applied matrix-free.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;

    /// `y = Op x`; `y` has length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }
}

/// `v -> A (A^T v)` for a rectangular `A`.
#[derive(Clone, Copy, Debug)]
pub struct GramOperator<'a> {
    a: &'a DenseMatrix,
}

impl<'a> GramOperator<'a> {
    pub fn new(a: &'a DenseMatrix) -> Self {
        GramOperator { a }
    }
}

impl SymmetricOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut w = vec![0.0; self.a.cols()];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                for (wj, aij) in w.iter_mut().zip(self.a.row(i)) {
                    *wj += aij * xi;
                }
            }
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.a.row(i), &w);
        }
    }
}

/// Wraps a closure as an operator.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> SymmetricOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}
