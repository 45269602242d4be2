//! Normalized point processes of the top eigenvalues and the statistics used
//! to compare them with their Poisson / Fréchet limits.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Discrete, Poisson};

use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::tail::{frechet_cdf, Normalizer};
use crate::EnsembleKind;

/// Asymptotic Kolmogorov-Smirnov constant at level 0.05.
pub const KS_C_005: f64 = 1.358;

/// Relative round-off guard below which covariance eigenvalues are dropped.
pub const CLAMP_RTOL: f64 = 1e-10;

/// Positive atoms of one replicate, nonincreasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub atoms: Vec<f64>,
    pub normalizer_used: f64,
    pub kind: EnsembleKind,
}

impl PointSample {
    pub fn max(&self) -> Option<f64> {
        self.atoms.first().copied()
    }
}

/// Wigner: `lambda_i / b_n` for `lambda_i > 0`. Covariance: `lambda_i / b_np^2`
/// for `lambda_i > 1e-10 max|lambda|`.
pub fn extract_points(spectrum: &Spectrum, normalizer: &Normalizer, kind: EnsembleKind) -> Result<PointSample> {
    if normalizer.ensemble() != kind {
        return Err(Error::KindMismatch {
            normalizer: normalizer.kind,
            ensemble: kind,
        });
    }
    let scale = normalizer.eigen_scale();
    let floor = match kind {
        EnsembleKind::Wigner => 0.0,
        EnsembleKind::Covariance => CLAMP_RTOL * spectrum.max_abs(),
    };
    let mut atoms: Vec<f64> = spectrum.values.iter().filter(|&&l| l > floor).map(|l| l / scale).collect();
    atoms.sort_by(|a, b| b.total_cmp(a));
    Ok(PointSample {
        atoms,
        normalizer_used: normalizer.value,
        kind,
    })
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > a) {
        return Err(Error::InvalidInterval { a, b });
    }
    Ok(())
}

/// Mean number of limit atoms in `(a, b]`: `a^{-e} - b^{-e}` with `e = alpha`
/// (Wigner) or `alpha / 2` (covariance). `b` may be infinite.
pub fn expected_count(kind: EnsembleKind, alpha: f64, a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    let e = alpha_eff(kind, alpha);
    let upper = if b.is_infinite() { 0.0 } else { b.powf(-e) };
    Ok(a.powf(-e) - upper)
}

/// Fréchet exponent of the normalized maximum.
pub fn alpha_eff(kind: EnsembleKind, alpha: f64) -> f64 {
    match kind {
        EnsembleKind::Wigner => alpha,
        EnsembleKind::Covariance => alpha / 2.0,
    }
}

/// Number of atoms in `(a, b]`.
pub fn count_in(sample: &PointSample, a: f64, b: f64) -> Result<usize> {
    check_interval(a, b)?;
    Ok(sample.atoms.iter().filter(|&&x| x > a && x <= b).count())
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of
/// `maxima` and the Fréchet CDF with exponent `alpha_eff`.
pub fn ks_frechet(maxima: &[f64], alpha_eff: f64) -> Result<f64> {
    if maxima.is_empty() {
        return Err(Error::Degenerate("KS statistic of an empty sample".into()));
    }
    let mut sorted = maxima.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = frechet_cdf(alpha_eff, x);
        let above = (i + 1) as f64 / m - f;
        let below = f - i as f64 / m;
        d.max(above).max(below)
    });
    Ok(d)
}

/// KS acceptance threshold `c / sqrt(m)` at level 0.05.
pub fn ks_threshold(sample_size: usize) -> f64 {
    KS_C_005 / (sample_size as f64).sqrt()
}

/// Poisson goodness of fit of interval counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonFit {
    pub sample_mean: f64,
    /// Unbiased sample variance over the sample mean.
    pub dispersion_index: f64,
    pub chi_square: f64,
    /// Pooled bins minus one.
    pub dof: usize,
    /// Pooled bins as `(first count, last count or None for the open tail, observed, expected)`.
    pub bins: Vec<PoissonBin>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonBin {
    pub lo: u64,
    pub hi: Option<u64>,
    pub observed: u64,
    pub expected: f64,
}

/// Dispersion index and a chi-square statistic against `Poisson(theoretical_mean)`.
///
/// Bins start at zero and are pooled left to right until each expected count
/// reaches 5; the last bin is the open upper tail and is merged into its
/// neighbour when short. With fewer than two bins the chi-square is 0 with 0
/// degrees of freedom.
pub fn poisson_fit(counts: &[u64], theoretical_mean: f64) -> Result<PoissonFit> {
    if counts.is_empty() {
        return Err(Error::Degenerate("no counts".into()));
    }
    if !(theoretical_mean > 0.0 && theoretical_mean.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Poisson mean must be positive, got {theoretical_mean}"
        )));
    }
    let m = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / m;
    if mean == 0.0 {
        return Err(Error::Degenerate(format!(
            "all {} counts are zero; the dispersion index is undefined (theoretical mean {theoretical_mean})",
            counts.len()
        )));
    }
    let var = if counts.len() > 1 {
        counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let bins = pool_bins(counts, theoretical_mean)?;
    let chi_square = if bins.len() < 2 {
        0.0
    } else {
        bins.iter().map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected).sum()
    };
    Ok(PoissonFit {
        sample_mean: mean,
        dispersion_index: var / mean,
        chi_square,
        dof: bins.len().saturating_sub(1),
        bins,
    })
}

fn pool_bins(counts: &[u64], lambda: f64) -> Result<Vec<PoissonBin>> {
    let pois = Poisson::new(lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let m = counts.len() as f64;
    let observed_at = |k: u64| counts.iter().filter(|&&c| c == k).count() as u64;

    let mut bins: Vec<PoissonBin> = Vec::new();
    let mut lo = 0u64;
    let mut expected = 0.0;
    let mut observed = 0u64;
    let mut cdf = 0.0;
    let mut k = 0u64;
    loop {
        let p = pois.pmf(k);
        cdf += p;
        expected += m * p;
        observed += observed_at(k);
        let tail = (1.0 - cdf).max(0.0) * m;
        if expected >= 5.0 && tail >= 5.0 {
            bins.push(PoissonBin {
                lo,
                hi: Some(k),
                observed,
                expected,
            });
            lo = k + 1;
            expected = 0.0;
            observed = 0;
        } else if tail < 5.0 {
            break;
        }
        k += 1;
    }
    // Open tail from `lo` upward holds everything not yet binned.
    let tail_observed = counts.iter().filter(|&&c| c >= lo).count() as u64;
    let tail_expected = m - bins.iter().map(|b| b.expected).sum::<f64>();
    let tail = PoissonBin {
        lo,
        hi: None,
        observed: tail_observed,
        expected: tail_expected,
    };
    match bins.last_mut() {
        Some(prev) if tail.expected < 5.0 => {
            prev.hi = None;
            prev.observed += tail.observed;
            prev.expected += tail.expected;
        }
        _ => bins.push(tail),
    }
    debug_assert_eq!(bins.iter().map(|b| b.observed).sum::<u64>(), counts.len() as u64);
    Ok(bins)
}

/// Interval `(a, b]`; `b = None` is the open upper tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: Option<f64>,
}

impl Interval {
    pub fn new(a: f64, b: Option<f64>) -> Result<Self> {
        check_interval(a, b.unwrap_or(f64::INFINITY))?;
        Ok(Interval { a, b })
    }

    pub fn upper(&self) -> f64 {
        self.b.unwrap_or(f64::INFINITY)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.b {
            Some(b) => write!(f, "({}, {}]", self.a, b),
            None => write!(f, "({}, inf)", self.a),
        }
    }
}

/// KS distance of the maxima together with the Poisson fit of the counts in
/// one interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub ks_statistic: f64,
    pub sample_size: usize,
    pub dispersion_index: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub interval: Interval,
    pub expected_count: f64,
}

impl FitReport {
    pub fn new(maxima: &[f64], counts: &[u64], kind: EnsembleKind, alpha: f64, interval: Interval) -> Result<Self> {
        if maxima.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: maxima.len(),
                got: counts.len(),
            });
        }
        let expected_count = expected_count(kind, alpha, interval.a, interval.upper())?;
        let fit = poisson_fit(counts, expected_count)?;
        Ok(FitReport {
            ks_statistic: ks_frechet(maxima, alpha_eff(kind, alpha))?,
            sample_size: maxima.len(),
            dispersion_index: fit.dispersion_index,
            chi_square: fit.chi_square,
            dof: fit.dof,
            interval,
            expected_count,
        })
    }
}

/// Semicircle density of variance `sigma_sq`, zero outside `|x| <= 2 sigma`.
pub fn semicircle_density(sigma_sq: f64, x: f64) -> f64 {
    let r2 = 4.0 * sigma_sq - x * x;
    if r2 <= 0.0 {
        0.0
    } else {
        r2.sqrt() / (2.0 * std::f64::consts::PI * sigma_sq)
    }
}

/// Median with linear interpolation; NaN for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Type-7 sample quantile.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::SolverKind;
    use crate::tail::{frechet_quantile, NormalizerKind};

    fn spectrum(values: &[f64]) -> Spectrum {
        Spectrum {
            values: values.to_vec(),
            solver: SolverKind::Dense,
            residual_bound: 0.0,
            iterations: 0,
        }
    }

    fn norm(kind: NormalizerKind, value: f64) -> Normalizer {
        Normalizer {
            value,
            kind,
            n: 3,
            p: Some(3),
            alpha: 1.0,
        }
    }

    #[test]
    fn extract_examples() {
        let s = extract_points(&spectrum(&[6.0, 3.0, -2.0]), &norm(NormalizerKind::WignerBn, 2.0), EnsembleKind::Wigner).unwrap();
        assert_eq!(s.atoms, vec![3.0, 1.5]);
        let s = extract_points(&spectrum(&[-1.0, -2.0]), &norm(NormalizerKind::WignerBn, 2.0), EnsembleKind::Wigner).unwrap();
        assert!(s.atoms.is_empty());
        let s = extract_points(&spectrum(&[16.0, 4.0, -1e-14]), &norm(NormalizerKind::CovarianceBnp, 2.0), EnsembleKind::Covariance)
            .unwrap();
        assert_eq!(s.atoms, vec![4.0, 1.0]);
        assert!(extract_points(&spectrum(&[1.0]), &norm(NormalizerKind::WignerBn, 1.0), EnsembleKind::Covariance).is_err());
    }

    #[test]
    fn covariance_round_off_is_clamped() {
        let s = extract_points(&spectrum(&[1e6, 1e-7, 0.0]), &norm(NormalizerKind::CovarianceBnp, 1.0), EnsembleKind::Covariance)
            .unwrap();
        assert_eq!(s.atoms, vec![1e6]);
    }

    #[test]
    fn expected_count_examples() {
        assert_eq!(expected_count(EnsembleKind::Wigner, 1.0, 1.0, f64::INFINITY).unwrap(), 1.0);
        assert!((expected_count(EnsembleKind::Wigner, 2.0, 2.0, 4.0).unwrap() - 0.1875).abs() < 1e-15);
        assert_eq!(expected_count(EnsembleKind::Covariance, 2.0, 1.0, f64::INFINITY).unwrap(), 1.0);
        assert!(expected_count(EnsembleKind::Wigner, 1.0, 0.0, 1.0).is_err());
        assert!(expected_count(EnsembleKind::Wigner, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn expected_count_matches_frechet_log() {
        for alpha in [0.5, 1.0, 2.5] {
            for a in [0.3, 1.0, 4.0] {
                let c = expected_count(EnsembleKind::Wigner, alpha, a, f64::INFINITY).unwrap();
                let l = -frechet_cdf(alpha, a).ln();
                assert!((c - l).abs() <= 1e-12 * c);
            }
        }
    }

    #[test]
    fn count_examples() {
        let s = PointSample {
            atoms: vec![3.0, 1.5],
            normalizer_used: 1.0,
            kind: EnsembleKind::Wigner,
        };
        assert_eq!(count_in(&s, 1.0, f64::INFINITY).unwrap(), 2);
        assert_eq!(count_in(&s, 2.0, 3.0).unwrap(), 1);
        let empty = PointSample { atoms: vec![], ..s.clone() };
        assert_eq!(count_in(&empty, 1.0, 2.0).unwrap(), 0);
        assert!(count_in(&s, -1.0, 2.0).is_err());
    }

    #[test]
    fn ks_single_point() {
        let c = frechet_cdf(1.0, 2.0);
        assert!((ks_frechet(&[2.0], 1.0).unwrap() - c.max(1.0 - c)).abs() < 1e-15);
        assert!(ks_frechet(&[], 1.0).is_err());
    }

    #[test]
    fn ks_at_theoretical_quantiles() {
        for m in [1usize, 7, 100, 1000] {
            let xs: Vec<f64> = (1..=m).map(|i| frechet_quantile(1.3, (i as f64 - 0.5) / m as f64)).collect();
            let d = ks_frechet(&xs, 1.3).unwrap();
            assert!((d - 0.5 / m as f64).abs() < 1e-12, "m {m}: {d}");
        }
    }

    #[test]
    fn poisson_fit_examples() {
        let f = poisson_fit(&[3; 50], 3.0).unwrap();
        assert_eq!(f.dispersion_index, 0.0);
        let f = poisson_fit(&[0, 2], 1.0).unwrap();
        assert_eq!(f.dispersion_index, 2.0);
        assert_eq!(f.dof, 0);
        assert!(matches!(poisson_fit(&[0; 100], 20.0), Err(Error::Degenerate(_))));
        assert!(poisson_fit(&[], 1.0).is_err());
        assert!(poisson_fit(&[1], 0.0).is_err());
    }

    #[test]
    fn pooled_bins_are_large_enough() {
        let counts: Vec<u64> = (0..400).map(|i| (i % 4) as u64).collect();
        let f = poisson_fit(&counts, 1.0).unwrap();
        assert!(f.bins.iter().all(|b| b.expected >= 5.0));
        assert_eq!(f.bins.iter().map(|b| b.observed).sum::<u64>(), 400);
        assert!((f.bins.iter().map(|b| b.expected).sum::<f64>() - 400.0).abs() < 1e-9);
        assert_eq!(f.bins.last().unwrap().hi, None);
        assert_eq!(f.dof, f.bins.len() - 1);
    }

    #[test]
    fn semicircle_examples() {
        assert!((semicircle_density(1.0, 0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(semicircle_density(1.0, 2.0), 0.0);
        assert_eq!(semicircle_density(1.0, 3.0), 0.0);
    }

    #[test]
    fn semicircle_normalization() {
        for sigma_sq in [0.5, 1.0, 5.0] {
            let s = f64::sqrt(sigma_sq);
            let steps = 200_000;
            let h = 4.0 * s / steps as f64;
            let total: f64 = (0..steps).map(|i| semicircle_density(sigma_sq, -2.0 * s + (i as f64 + 0.5) * h) * h).sum();
            assert!((total - 1.0).abs() < 1e-6, "{total}");
        }
    }

    #[test]
    fn quantiles() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
    }
}
