//! Experiment configuration and its flat `key = value` file format.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::beta_range;
use crate::error::{Error, Result};
use crate::extremes::{epsilon_cap, LemmaOptions};
use crate::points::Interval;
use crate::tail::{NormalizerKind, SlowlyVarying, Symmetry, TailLaw};
use crate::EnsembleKind;

/// Keys accepted in a config file, in the order they are written back.
pub const CONFIG_KEYS: [&str; 14] = [
    "ensemble",
    "alpha",
    "sv",
    "symmetry",
    "n",
    "gamma",
    "replicates",
    "top_k",
    "intervals",
    "seed",
    "dense_threshold",
    "tol",
    "beta",
    "epsilon",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub beta: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleKind,
    pub alpha: f64,
    pub slowly_varying: SlowlyVarying,
    pub symmetry: Symmetry,
    pub n: usize,
    /// Aspect ratio; the covariance matrix is `n x floor(gamma n)`.
    pub gamma: f64,
    pub replicates: usize,
    pub top_k: usize,
    /// Number of largest entries recorded per replicate.
    pub top_m: usize,
    pub intervals: Vec<Interval>,
    pub master_seed: u64,
    /// Largest dimension solved densely; above it the top eigenvalues come from Lanczos.
    pub dense_threshold: usize,
    pub tol: f64,
    pub truncation: Option<Truncation>,
    pub lemma: LemmaOptions,
    /// Wall-clock timing per replicate. Off by default so that records are
    /// reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ensemble: EnsembleKind::Wigner,
            alpha: 1.0,
            slowly_varying: SlowlyVarying::Unit,
            symmetry: Symmetry::Symmetric,
            n: 100,
            gamma: 1.0,
            replicates: 100,
            top_k: 5,
            top_m: 10,
            intervals: default_intervals(),
            master_seed: 0,
            dense_threshold: 2048,
            tol: 1e-10,
            truncation: None,
            lemma: LemmaOptions::default(),
            record_timing: false,
        }
    }
}

pub fn default_intervals() -> Vec<Interval> {
    vec![
        Interval { a: 1.0, b: None },
        Interval { a: 0.5, b: Some(1.0) },
        Interval { a: 1.0, b: Some(2.0) },
        Interval { a: 2.0, b: None },
    ]
}

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("{key} = {value:?}: {what}"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value, "not a number"))
}

pub fn parse_ensemble(value: &str) -> Result<EnsembleKind> {
    match value.to_ascii_lowercase().as_str() {
        "wigner" => Ok(EnsembleKind::Wigner),
        "covariance" => Ok(EnsembleKind::Covariance),
        _ => Err(bad("ensemble", value, "expected wigner or covariance")),
    }
}

/// `unit` or `logpower:KAPPA`.
pub fn parse_slowly_varying(value: &str) -> Result<SlowlyVarying> {
    let v = value.to_ascii_lowercase();
    if v == "unit" {
        return Ok(SlowlyVarying::Unit);
    }
    match v.strip_prefix("logpower:") {
        Some(k) => Ok(SlowlyVarying::LogPower {
            kappa: parse_num("sv", k)?,
        }),
        None => Err(bad("sv", value, "expected unit or logpower:KAPPA")),
    }
}

pub fn parse_symmetry(value: &str) -> Result<Symmetry> {
    match value.to_ascii_lowercase().replace('-', "_").as_str() {
        "symmetric" => Ok(Symmetry::Symmetric),
        "one_sided_centered" => Ok(Symmetry::OneSidedCentered),
        "one_sided" => Ok(Symmetry::OneSided),
        _ => Err(bad("symmetry", value, "expected symmetric, one_sided_centered or one_sided")),
    }
}

/// `a:b,a:b,...` with `inf` for an open upper end.
pub fn parse_intervals(value: &str) -> Result<Vec<Interval>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| bad("intervals", value, "each interval is a:b"))?;
            let a: f64 = parse_num("intervals", a.trim())?;
            let b = match b.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => None,
                s => Some(parse_num::<f64>("intervals", s)?),
            };
            Interval::new(a, b).map_err(|_| bad("intervals", item, "need 0 < a < b"))
        })
        .collect()
}

fn format_slowly_varying(sv: SlowlyVarying) -> String {
    match sv {
        SlowlyVarying::Unit => "unit".into(),
        SlowlyVarying::LogPower { kappa } => format!("logpower:{kappa}"),
    }
}

fn format_symmetry(s: Symmetry) -> &'static str {
    match s {
        Symmetry::Symmetric => "symmetric",
        Symmetry::OneSidedCentered => "one_sided_centered",
        Symmetry::OneSided => "one_sided",
    }
}

fn format_intervals(intervals: &[Interval]) -> String {
    intervals
        .iter()
        .map(|i| match i.b {
            Some(b) => format!("{}:{}", i.a, b),
            None => format!("{}:inf", i.a),
        })
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    /// Sets one key from its text form. `beta` and `epsilon` must both be
    /// given before [`ExperimentConfig::validate`] accepts a truncation.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "ensemble" => self.ensemble = parse_ensemble(value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "sv" => self.slowly_varying = parse_slowly_varying(value)?,
            "symmetry" => self.symmetry = parse_symmetry(value)?,
            "n" => self.n = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "replicates" => self.replicates = parse_num(key, value)?,
            "top_k" => self.top_k = parse_num(key, value)?,
            "intervals" => self.intervals = parse_intervals(value)?,
            "seed" => self.master_seed = parse_num(key, value)?,
            "dense_threshold" => self.dense_threshold = parse_num(key, value)?,
            "tol" => self.tol = parse_num(key, value)?,
            "beta" => {
                let beta = parse_num(key, value)?;
                let epsilon = self.truncation.map_or(f64::NAN, |t| t.epsilon);
                self.truncation = Some(Truncation { beta, epsilon });
            }
            "epsilon" => {
                let epsilon = parse_num(key, value)?;
                let beta = self.truncation.map_or(f64::NAN, |t| t.beta);
                self.truncation = Some(Truncation { beta, epsilon });
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses a config file body on top of the defaults. Blank lines and
    /// lines starting with `#` are skipped; repeated keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
            seen.push(key);
            cfg.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The flat file form; parses back to the same config (apart from
    /// fields without a key).
    pub fn to_flat_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "ensemble = {}", self.ensemble);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "sv = {}", format_slowly_varying(self.slowly_varying));
        let _ = writeln!(s, "symmetry = {}", format_symmetry(self.symmetry));
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let _ = writeln!(s, "replicates = {}", self.replicates);
        let _ = writeln!(s, "top_k = {}", self.top_k);
        let _ = writeln!(s, "intervals = {}", format_intervals(&self.intervals));
        let _ = writeln!(s, "seed = {}", self.master_seed);
        let _ = writeln!(s, "dense_threshold = {}", self.dense_threshold);
        let _ = writeln!(s, "tol = {}", self.tol);
        if let Some(t) = self.truncation {
            let _ = writeln!(s, "beta = {}", t.beta);
            let _ = writeln!(s, "epsilon = {}", t.epsilon);
        }
        s
    }

    pub fn law(&self) -> Result<TailLaw> {
        TailLaw::new(self.alpha, self.slowly_varying, self.symmetry)
    }

    /// Column count of the rectangular matrix, `floor(gamma n)`.
    pub fn p(&self) -> usize {
        (self.gamma * self.n as f64).floor() as usize
    }

    pub fn normalizer_kind(&self) -> NormalizerKind {
        match self.ensemble {
            EnsembleKind::Wigner => NormalizerKind::WignerBn,
            EnsembleKind::Covariance => NormalizerKind::CovarianceBnp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha < 4.0) {
            return fail(format!("alpha must lie in (0, 4), got {}", self.alpha));
        }
        self.law()?;
        if self.alpha >= 2.0 && !self.symmetry.is_centered() {
            return fail(format!("alpha = {} >= 2 requires centered entries", self.alpha));
        }
        if self.symmetry == Symmetry::OneSidedCentered {
            if self.alpha <= 1.0 {
                return fail("one_sided_centered needs alpha > 1 for the mean to exist".into());
            }
            if self.slowly_varying != SlowlyVarying::Unit && self.truncation.is_some() {
                return fail("truncation with a centered log-power law is not supported".into());
            }
        }
        if self.n < 1 {
            return fail("n must be at least 1".into());
        }
        if self.ensemble == EnsembleKind::Covariance && !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be >= 1, got {}", self.gamma));
        }
        if self.replicates < 1 {
            return fail("replicates must be at least 1".into());
        }
        if self.top_k < 1 || self.top_k > self.n {
            return fail(format!("top_k must lie in 1..={}, got {}", self.n, self.top_k));
        }
        let entries = match self.ensemble {
            EnsembleKind::Wigner => self.n * (self.n + 1) / 2,
            EnsembleKind::Covariance => self.n * self.p(),
        };
        if self.top_m < self.top_k || self.top_m > entries {
            return fail(format!("top_m must lie in {}..={entries}, got {}", self.top_k, self.top_m));
        }
        for i in &self.intervals {
            Interval::new(i.a, i.b).map_err(|_| Error::Config(format!("invalid interval {i}")))?;
        }
        if !(self.tol > 0.0) {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if let Some(t) = self.truncation {
            if t.beta.is_nan() || t.epsilon.is_nan() {
                return fail("truncation needs both beta and epsilon".into());
            }
            if self.ensemble != EnsembleKind::Wigner || self.alpha < 2.0 {
                return fail("truncation applies to Wigner experiments with 2 <= alpha < 4".into());
            }
            let window = beta_range(self.alpha)?;
            if !window.contains(t.beta) {
                return fail(format!("beta = {} outside ({}, {})", t.beta, window.lo, window.hi));
            }
            let cap = epsilon_cap(self.alpha, t.beta);
            if !(t.epsilon > 0.0 && t.epsilon < cap) {
                return fail(format!("epsilon = {} outside (0, {cap})", t.epsilon));
            }
        }
        Ok(())
    }
}
