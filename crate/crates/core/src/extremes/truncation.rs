//! Truncated moments of the entry law and the growth of the top eigenvalue
//! of the truncated part `A1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{full_spectrum, top_k, LanczosOptions};
use crate::ensemble::{beta_range, generate_wigner, truncation_split};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{derive_stream_id, mix64, Stream};
use crate::tail::{SlowlyVarying, Symmetry, TailLaw, X0};

/// `int_lo^hi x^k alpha x^{-alpha-1} dx`; `hi` may be infinite when `k < alpha`.
fn pareto_power_integral(alpha: f64, k: f64, lo: f64, hi: f64) -> f64 {
    let e = k - alpha;
    if e == 0.0 {
        alpha * (hi / lo).ln()
    } else if hi.is_infinite() {
        -alpha * lo.powf(e) / e
    } else {
        alpha * (hi.powf(e) - lo.powf(e)) / e
    }
}

/// `E[|a|^k 1{|a| <= t}]` for any law with `S(x0) = 1`, by parts:
/// `1 - t^k S(t) + k int_1^t x^{k-1} S(x) dx`.
fn magnitude_moment_by_parts(law: &TailLaw, t: f64, k: i32) -> f64 {
    let kf = k as f64;
    let integrand = |u: f64| {
        let x = u.exp();
        kf * x.powi(k) * law.survival_unchecked(x)
    };
    let integral = crate::quad::simpson(&integrand, 0.0, t.ln(), 1e-12);
    1.0 - t.powi(k) * law.survival_unchecked(t) + integral
}

/// `E[a^order 1{|a| <= threshold}]` for even `order` in `{2, 4, 6, 8}`.
pub fn truncated_moment(law: &TailLaw, threshold: f64, order: u32) -> Result<f64> {
    if !matches!(order, 2 | 4 | 6 | 8) {
        return Err(Error::InvalidArgument(format!("unsupported moment order {order}")));
    }
    if !(threshold >= X0) {
        return Err(Error::BelowSupport { x: threshold, x0: X0 });
    }
    let k = order as f64;
    match (law.symmetry, law.slowly_varying) {
        (Symmetry::Symmetric | Symmetry::OneSided, SlowlyVarying::Unit) => {
            Ok(pareto_power_integral(law.alpha, k, X0, threshold))
        }
        (Symmetry::Symmetric | Symmetry::OneSided, SlowlyVarying::LogPower { .. }) => {
            Ok(magnitude_moment_by_parts(law, threshold, order as i32))
        }
        (Symmetry::OneSidedCentered, SlowlyVarying::Unit) => {
            let mu = law.magnitude_mean()?;
            let (lo, hi) = ((mu - threshold).max(X0), mu + threshold);
            if lo >= hi {
                return Ok(0.0);
            }
            // (x - mu)^k expanded binomially.
            let mut total = 0.0;
            let mut binom = 1.0;
            for j in 0..=order {
                total += binom * (-mu).powi((order - j) as i32) * pareto_power_integral(law.alpha, j as f64, lo, hi);
                binom = binom * (order - j) as f64 / (j + 1) as f64;
            }
            Ok(total)
        }
        (Symmetry::OneSidedCentered, SlowlyVarying::LogPower { .. }) => Err(Error::InvalidArgument(
            "truncated moments of centered log-power laws are not supported".into(),
        )),
    }
}

/// First truncated moment `E[a 1{|a| <= threshold}]`.
pub fn truncated_mean(law: &TailLaw, threshold: f64) -> Result<f64> {
    if !(threshold >= X0) {
        return Err(Error::BelowSupport { x: threshold, x0: X0 });
    }
    match (law.symmetry, law.slowly_varying) {
        (Symmetry::Symmetric, _) => Ok(0.0),
        (Symmetry::OneSided, SlowlyVarying::Unit) => Ok(pareto_power_integral(law.alpha, 1.0, X0, threshold)),
        (Symmetry::OneSided, SlowlyVarying::LogPower { .. }) => Ok(magnitude_moment_by_parts(law, threshold, 1)),
        (Symmetry::OneSidedCentered, SlowlyVarying::Unit) => {
            let mu = law.magnitude_mean()?;
            let (lo, hi) = ((mu - threshold).max(X0), mu + threshold);
            if lo >= hi {
                return Ok(0.0);
            }
            let p = |k: f64| pareto_power_integral(law.alpha, k, lo, hi);
            Ok(p(1.0) - mu * p(0.0))
        }
        (Symmetry::OneSidedCentered, SlowlyVarying::LogPower { .. }) => Err(Error::InvalidArgument(
            "truncated moments of centered log-power laws are not supported".into(),
        )),
    }
}

/// Upper bound on `epsilon` for the scaling `n^{2/alpha - epsilon}`:
/// `min{1/alpha - 1/4, 1/alpha - beta/2, (8/alpha - 1 - beta (5 - alpha/2)) / 16}`.
pub fn epsilon_cap(alpha: f64, beta: f64) -> f64 {
    (1.0 / alpha - 0.25)
        .min(1.0 / alpha - beta / 2.0)
        .min((8.0 / alpha - 1.0 - beta * (5.0 - alpha / 2.0)) / 16.0)
}

/// `lambda_max(A1) / n^{2/alpha - epsilon}` for the truncation of `m` at `n^beta`.
pub fn truncated_top_statistic(m: &DenseMatrix, alpha: f64, beta: f64, epsilon: f64) -> Result<f64> {
    let n = m.rows();
    let split = truncation_split(m, beta, n);
    let top = if n <= 256 {
        full_spectrum(&split.low_part)?.values[0]
    } else {
        let opts = LanczosOptions {
            tol: 1e-10,
            max_iter: n,
            start_seed: 0,
        };
        match top_k(&split.low_part, 1, &opts) {
            Ok(s) => s.values[0],
            Err(Error::NoConvergence { .. }) => full_spectrum(&split.low_part)?.values[0],
            Err(e) => return Err(e),
        }
    };
    Ok(top / (n as f64).powf(2.0 / alpha - epsilon))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub median: f64,
    pub samples: Vec<f64>,
}

/// For each size, the median over `replicates` Wigner samples of
/// [`truncated_top_statistic`]. Replicate `r` at size `n` draws from the
/// stream `derive_stream_id(mix64(master_seed ^ n), r)`.
pub fn truncated_top_scaling(
    law: &TailLaw,
    beta: f64,
    epsilon: f64,
    sizes: &[usize],
    replicates: usize,
    master_seed: u64,
) -> Result<Vec<ScalingPoint>> {
    let alpha = law.alpha;
    if !(2.0..4.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("needs 2 <= alpha < 4, got {alpha}")));
    }
    let window = beta_range(alpha)?;
    if !window.contains(beta) {
        return Err(Error::InvalidArgument(format!(
            "beta = {beta} outside ({}, {})",
            window.lo, window.hi
        )));
    }
    let cap = epsilon_cap(alpha, beta);
    if !(epsilon > 0.0 && epsilon < cap) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} outside (0, {cap})")));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be positive".into()));
    }
    sizes
        .iter()
        .map(|&n| {
            let seed = mix64(master_seed ^ n as u64);
            let samples = (0..replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let mut stream = Stream::new(seed, derive_stream_id(seed, r));
                    let w = generate_wigner(law, n, &mut stream)?;
                    truncated_top_statistic(&w.entries, alpha, beta, epsilon)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(ScalingPoint {
                n,
                median: crate::points::median(&samples),
                samples,
            })
        })
        .collect()
}
