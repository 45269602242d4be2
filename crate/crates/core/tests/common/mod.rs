//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use heavy_rmt::matrix::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with i.i.d. uniform(-1, 1) entries on and above the diagonal.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Symmetric matrix with Pareto(1.2) magnitudes and random signs.
pub fn random_heavy_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let u: f64 = 1.0 - rng.random::<f64>();
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            m[(i, j)] = s * u.powf(-1.0 / 1.2);
            m[(j, i)] = m[(i, j)];
        }
    }
    m
}

/// Coefficients `c[0..=n]` of `det(x I - M) = sum c[k] x^{n-k}` by the
/// Faddeev-LeVerrier recursion.
pub fn char_poly(m: &DenseMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    let mut mk = DenseMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = M (M_{k-1} + c_{k-1} I)
        let shifted = mk.add(&DenseMatrix::identity(n).scaled(c[k - 1])).unwrap();
        mk = m.matmul(&shifted).unwrap();
        c[k] = -mk.trace() / k as f64;
    }
    c
}

fn horner(c: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut ddp) = (c[0], 0.0, 0.0);
    for &ck in &c[1..] {
        ddp = ddp * x + 2.0 * dp;
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp, ddp)
}

/// Real roots of a real-rooted monic polynomial, nonincreasing, by
/// Laguerre iteration with deflation followed by Newton polishing on the
/// undeflated polynomial.
pub fn real_roots(c: &[f64]) -> Vec<f64> {
    let n = c.len() - 1;
    let bound = 1.0 + c[1..].iter().fold(0.0f64, |b, x| b.max(x.abs()));
    let mut poly = c.to_vec();
    let mut roots = Vec::with_capacity(n);
    while poly.len() > 1 {
        let deg = (poly.len() - 1) as f64;
        let mut x = bound;
        for _ in 0..200 {
            let (p, dp, ddp) = horner(&poly, x);
            if p == 0.0 {
                break;
            }
            let g = dp / p;
            let h = g * g - ddp / p;
            let disc = ((deg - 1.0) * (deg * h - g * g)).max(0.0).sqrt();
            let denom = if g >= 0.0 { g + disc } else { g - disc };
            let step = deg / denom;
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1e-300) {
                break;
            }
        }
        for _ in 0..3 {
            let (p, dp, _) = horner(c, x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.abs() > 1e-6 * bound {
                break;
            }
            x -= step;
        }
        roots.push(x);
        // Synthetic division by (t - x).
        let mut q = Vec::with_capacity(poly.len() - 1);
        let mut acc = 0.0;
        for &a in &poly[..poly.len() - 1] {
            acc = acc * x + a;
            q.push(acc);
        }
        poly = q;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

pub fn eigen_oracle(m: &DenseMatrix) -> Vec<f64> {
    real_roots(&char_poly(m))
}

/// Two-sided KS distance of a sample from a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

#[test]
fn oracle_on_known_spectrum() {
    // Companion of (x-3)(x-1)(x+2) = x^3 - 2x^2 - 5x + 6.
    let roots = real_roots(&[1.0, -2.0, -5.0, 6.0]);
    for (r, want) in roots.iter().zip([3.0, 1.0, -2.0]) {
        assert!((r - want).abs() < 1e-12, "{roots:?}");
    }
    let m = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
    let e = eigen_oracle(&m);
    assert!((e[0] - 3.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
}
