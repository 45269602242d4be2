use super::{sort_descending, SolverKind, Spectrum};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Eigenvalues of a symmetric tridiagonal matrix, sorted nonincreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    /// Last component of each unit eigenvector, aligned with `values`.
    pub last_components: Option<Vec<f64>>,
    pub iterations: usize,
}

/// All eigenvalues of a real symmetric matrix, nonincreasing.
pub fn full_spectrum(m: &DenseMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    if !m.is_symmetric_within(1e-12) {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            solver: SolverKind::Dense,
            residual_bound: 0.0,
            iterations: 0,
        });
    }
    let (diag, off) = householder_tridiagonalize(m);
    let eig = tridiagonal_eigen(&diag, &off[1..], false)?;
    Ok(Spectrum {
        values: eig.values,
        solver: SolverKind::Dense,
        residual_bound: f64::EPSILON * n as f64 * m.frobenius_sq().sqrt(),
        iterations: eig.iterations,
    })
}

/// Reduces `m` to tridiagonal form by Householder reflections.
///
/// Returns the diagonal and the subdiagonal, with `off[i]` coupling rows
/// `i - 1` and `i` (`off[0] = 0`). Only the lower triangle of `m` is read.
fn householder_tridiagonalize(m: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let mut a: Vec<f64> = m.as_slice().to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                // p = A u over the stored lower triangle, walking rows only.
                let u = a[idx(i, 0)..=idx(i, l)].to_vec();
                let p = &mut e[..=l];
                p.iter_mut().for_each(|x| *x = 0.0);
                for j in 0..=l {
                    let row = &a[idx(j, 0)..=idx(j, j)];
                    let uj = u[j];
                    let mut g = row[j] * uj;
                    for ((pk, &ajk), &uk) in p[..j].iter_mut().zip(&row[..j]).zip(&u[..j]) {
                        g += ajk * uk;
                        *pk += ajk * uj;
                    }
                    p[j] += g;
                }
                let mut f = 0.0;
                for (pj, &uj) in p.iter_mut().zip(&u) {
                    *pj /= h;
                    f += *pj * uj;
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = u[j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    let row = &mut a[idx(j, 0)..=idx(j, j)];
                    for ((ajk, &ek), &uk) in row.iter_mut().zip(&e[..=j]).zip(&u[..=j]) {
                        *ajk -= f * ek + g * uk;
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }
    (d, e)
}

/// Implicit-shift QL on the tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() + 1 == diag.len()`).
///
/// Fails after `30 n` QL iterations in total. With `track_last`, the last
/// row of the accumulated rotations is kept, which yields the last component
/// of every eigenvector.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64], track_last: bool) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagonalEigen {
            values: Vec::new(),
            last_components: track_last.then(Vec::new),
            iterations: 0,
        });
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = if track_last {
        let mut z = vec![0.0; n];
        z[n - 1] = 1.0;
        Some(z)
    } else {
        None
    };

    let max_iterations = 30 * n;
    let mut iterations = 0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::NoConvergence {
                    solver: "QL",
                    iterations: max_iterations,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    let f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    match z {
        None => {
            sort_descending(&mut d);
            Ok(TridiagonalEigen {
                values: d,
                last_components: None,
                iterations,
            })
        }
        Some(z) => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
            Ok(TridiagonalEigen {
                values: order.iter().map(|&i| d[i]).collect(),
                last_components: Some(order.iter().map(|&i| z[i]).collect()),
                iterations,
            })
        }
    }
}
