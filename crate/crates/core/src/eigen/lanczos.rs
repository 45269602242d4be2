use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::tridiagonal_eigen;
use super::{SolverKind, Spectrum, SymmetricOperator};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm2};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Ritz residuals must fall below `tol * max|theta|`.
    pub tol: f64,
    /// Cap on Lanczos steps (also capped by the operator dimension).
    pub max_iter: usize,
    /// Seeds the perturbation of the all-ones start vector and any restarts.
    pub start_seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-10,
            max_iter: 500,
            start_seed: 0,
        }
    }
}

/// The `k` largest eigenvalues of `op`, nonincreasing.
pub fn top_k<O: SymmetricOperator + ?Sized>(op: &O, k: usize, opts: &LanczosOptions) -> Result<Spectrum> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= {dim}, got k = {k}")));
    }
    let max_steps = opts.max_iter.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.start_seed);

    let mut start: Vec<f64> = (0..dim).map(|_| 1.0 + 0.1 * (rng.random::<f64>() - 0.5)).collect();
    let nrm = norm2(&start);
    start.iter_mut().for_each(|x| *x /= nrm);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_steps);
    let mut alphas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut betas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut q = start;
    let mut w = vec![0.0; dim];

    for step in 0..max_steps {
        op.apply(&q, &mut w);
        let a = dot(&w, &q);
        alphas.push(a);
        basis.push(q);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            orthogonalize(&mut w, &basis);
        }
        let b = norm2(&w);
        let m = step + 1;

        if m >= k {
            let t = tridiagonal_eigen(&alphas, &betas, true)?;
            let last = t.last_components.as_deref().unwrap_or_default();
            let scale = t.values.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            let residual = last[..k].iter().fold(0.0f64, |r, z| r.max((b * z).abs()));
            if residual <= opts.tol * scale.max(f64::MIN_POSITIVE) || m == dim {
                return Ok(Spectrum {
                    values: t.values[..k].to_vec(),
                    solver: SolverKind::Iterative,
                    residual_bound: residual,
                    iterations: m,
                });
            }
        }
        if m == max_steps {
            break;
        }

        let scale = alphas.iter().chain(&betas).fold(0.0f64, |s, x| s.max(x.abs()));
        if b <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            // Invariant subspace: continue from a fresh direction orthogonal to it.
            q = fresh_direction(&mut rng, &basis, dim)?;
            betas.push(0.0);
        } else {
            q = w.iter().map(|x| x / b).collect();
            betas.push(b);
        }
    }
    Err(Error::NoConvergence {
        solver: "Lanczos",
        iterations: max_steps,
    })
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for v in basis {
        let c = dot(w, v);
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi -= c * vi;
        }
    }
}

fn fresh_direction(rng: &mut ChaCha8Rng, basis: &[Vec<f64>], dim: usize) -> Result<Vec<f64>> {
    for _ in 0..16 {
        let mut r: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let before = norm2(&r);
        orthogonalize(&mut r, basis);
        orthogonalize(&mut r, basis);
        let after = norm2(&r);
        if after > 1e-8 * before {
            r.iter_mut().for_each(|x| *x /= after);
            return Ok(r);
        }
    }
    Err(Error::NoConvergence {
        solver: "Lanczos restart",
        iterations: basis.len(),
    })
}
