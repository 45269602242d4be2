//! Regularly varying entry laws `P(|a| > x) = L(x) x^{-alpha}` on `x >= 1`,
//! the normalizing sequences built from their tail quantiles, and the
//! Fréchet reference law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::UniformStream;

/// Lower support bound of the magnitude.
pub const X0: f64 = 1.0;

/// Relative tolerance of numeric tail inversion.
pub const INVERSION_RTOL: f64 = 1e-12;

const MAX_DOUBLINGS: usize = 200;

/// Slowly varying factor `L` of the tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SlowlyVarying {
    /// `L == 1`: a pure Pareto magnitude.
    Unit,
    /// `L(x) = (1 + ln x)^kappa`, with the survival capped at 1.
    LogPower { kappa: f64 },
}

/// How a sign is attached to the magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// Independent fair sign; exactly mean zero.
    Symmetric,
    /// Magnitude minus its analytic mean `alpha / (alpha - 1)`; needs `alpha > 1`.
    OneSidedCentered,
    /// Raw positive magnitude, not centered.
    OneSided,
}

impl Symmetry {
    /// Whether draws have mean zero (when the mean exists).
    pub fn is_centered(self) -> bool {
        !matches!(self, Symmetry::OneSided)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailLaw {
    pub alpha: f64,
    pub slowly_varying: SlowlyVarying,
    pub symmetry: Symmetry,
}

impl TailLaw {
    pub fn new(alpha: f64, slowly_varying: SlowlyVarying, symmetry: Symmetry) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tail exponent must be positive, got {alpha}"
            )));
        }
        if let SlowlyVarying::LogPower { kappa } = slowly_varying {
            if !(kappa.is_finite() && kappa >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "log-power exponent must be nonnegative, got {kappa}"
                )));
            }
        }
        Ok(TailLaw {
            alpha,
            slowly_varying,
            symmetry,
        })
    }

    /// Symmetric pure Pareto law.
    pub fn symmetric_pareto(alpha: f64) -> Result<Self> {
        Self::new(alpha, SlowlyVarying::Unit, Symmetry::Symmetric)
    }

    pub fn x0(&self) -> f64 {
        X0
    }

    /// `P(|a| > x)` for `x >= 1`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        if !(x >= X0) {
            return Err(Error::BelowSupport { x, x0: X0 });
        }
        Ok(self.survival_unchecked(x))
    }

    pub(crate) fn survival_unchecked(&self, x: f64) -> f64 {
        let power = x.powf(-self.alpha);
        match self.slowly_varying {
            SlowlyVarying::Unit => power,
            SlowlyVarying::LogPower { kappa } => ((1.0 + x.ln()).powf(kappa) * power).min(1.0),
        }
    }

    /// Smallest `x >= 1` with `survival(x) <= q`.
    pub fn quantile_tail(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail probability must lie in (0, 1], got {q}"
            )));
        }
        match self.slowly_varying {
            SlowlyVarying::Unit => {
                let mut x = q.powf(-1.0 / self.alpha).max(X0);
                // Round-off can leave survival(x) one ulp above q.
                while self.survival_unchecked(x) > q {
                    x = x.next_up();
                }
                Ok(x)
            }
            SlowlyVarying::LogPower { .. } => self.invert_by_bisection(q),
        }
    }

    fn invert_by_bisection(&self, q: f64) -> Result<f64> {
        if self.survival_unchecked(X0) <= q {
            return Ok(X0);
        }
        let mut lo = X0;
        let mut hi = 2.0 * X0;
        let mut doublings = 0;
        while self.survival_unchecked(hi) > q {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings >= MAX_DOUBLINGS || !hi.is_finite() {
                return Err(Error::Bracketing { q, doublings });
            }
        }
        // Invariant: survival(lo) > q >= survival(hi).
        while hi - lo > INVERSION_RTOL * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.survival_unchecked(mid) > q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// Mean of the magnitude, `alpha / (alpha - 1)` for the pure Pareto law.
    pub fn magnitude_mean(&self) -> Result<f64> {
        if self.alpha <= 1.0 {
            return Err(Error::UndefinedMean(self.alpha));
        }
        match self.slowly_varying {
            SlowlyVarying::Unit => Ok(self.alpha / (self.alpha - 1.0)),
            SlowlyVarying::LogPower { .. } => {
                // E|a| = 1 + int_1^inf S(x) dx, integrated in log coordinates.
                Ok(1.0 + crate::quad::integrate_log_tail(|x| x * self.survival_unchecked(x), X0))
            }
        }
    }

    /// `count` i.i.d. draws in stream order.
    pub fn sample_iid<S: UniformStream + ?Sized>(&self, stream: &mut S, count: usize) -> Result<Vec<f64>> {
        let mut sampler = self.sampler()?;
        (0..count).map(|_| sampler.draw(stream)).collect()
    }

    /// A sampler with the law's constants resolved once.
    pub fn sampler(&self) -> Result<Sampler> {
        let shift = match self.symmetry {
            Symmetry::OneSidedCentered => self.magnitude_mean()?,
            _ => 0.0,
        };
        Ok(Sampler { law: *self, shift })
    }
}

/// Draws from a [`TailLaw`] with precomputed centering.
#[derive(Clone, Copy, Debug)]
pub struct Sampler {
    law: TailLaw,
    shift: f64,
}

impl Sampler {
    pub fn draw<S: UniformStream + ?Sized>(&mut self, stream: &mut S) -> Result<f64> {
        let magnitude = self.law.quantile_tail(stream.next_unit())?;
        Ok(match self.law.symmetry {
            Symmetry::Symmetric => {
                if stream.next_bit() {
                    magnitude
                } else {
                    -magnitude
                }
            }
            Symmetry::OneSidedCentered => magnitude - self.shift,
            Symmetry::OneSided => magnitude,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerKind {
    /// `b_n`, tail quantile at level `2 / (n (n + 1))`.
    WignerBn,
    /// `b_np`, tail quantile at level `1 / (n p)`.
    CovarianceBnp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub value: f64,
    pub kind: NormalizerKind,
    pub n: usize,
    pub p: Option<usize>,
    /// Tail exponent of the law the normalizer was computed for.
    pub alpha: f64,
}

impl Normalizer {
    /// Tail level the normalizer inverts.
    pub fn level(&self) -> f64 {
        match self.kind {
            NormalizerKind::WignerBn => wigner_level(self.n),
            NormalizerKind::CovarianceBnp => 1.0 / (self.n as f64 * self.p.unwrap_or(1) as f64),
        }
    }

    pub fn ensemble(&self) -> crate::EnsembleKind {
        match self.kind {
            NormalizerKind::WignerBn => crate::EnsembleKind::Wigner,
            NormalizerKind::CovarianceBnp => crate::EnsembleKind::Covariance,
        }
    }

    /// Eigenvalue scale: `b_n` for Wigner, `b_np^2` for covariance.
    pub fn eigen_scale(&self) -> f64 {
        match self.kind {
            NormalizerKind::WignerBn => self.value,
            NormalizerKind::CovarianceBnp => self.value * self.value,
        }
    }
}

fn wigner_level(n: usize) -> f64 {
    let n = n as f64;
    2.0 / (n * (n + 1.0))
}

/// `b_n` or `b_np` for `law`.
pub fn normalizer(law: &TailLaw, kind: NormalizerKind, n: usize, p: Option<usize>) -> Result<Normalizer> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let (level, count, p) = match kind {
        NormalizerKind::WignerBn => {
            let nf = n as f64;
            (wigner_level(n), nf * (nf + 1.0) / 2.0, None)
        }
        NormalizerKind::CovarianceBnp => {
            let p = match p {
                Some(p) if p >= 1 => p,
                _ => return Err(Error::InvalidArgument("covariance normalizer needs p >= 1".into())),
            };
            (1.0 / (n as f64 * p as f64), n as f64 * p as f64, Some(p))
        }
    };
    let value = match law.slowly_varying {
        SlowlyVarying::Unit => {
            let mut x = count.powf(1.0 / law.alpha);
            while law.survival_unchecked(x) > level {
                x = x.next_up();
            }
            x
        }
        SlowlyVarying::LogPower { .. } => law.quantile_tail(level)?,
    };
    Ok(Normalizer {
        value,
        kind,
        n,
        p,
        alpha: law.alpha,
    })
}

/// Fréchet CDF `exp(-x^{-alpha_eff})` for `x > 0`, zero otherwise.
pub fn frechet_cdf(alpha_eff: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-x.powf(-alpha_eff)).exp()
    }
}

/// Inverse of [`frechet_cdf`] on `(0, 1)`.
pub fn frechet_quantile(alpha_eff: f64, u: f64) -> f64 {
    (-u.ln()).powf(-1.0 / alpha_eff)
}
