//! Replicate generation and per-replicate observables.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::eigen::{full_spectrum, top_k, GramOperator, LanczosOptions, SolverKind, Spectrum};
use crate::ensemble::{generate_covariance, generate_wigner, gram};
use crate::error::{Error, Result};
use crate::extremes::{
    lemma_diagnostics, predicted_top_eigenvalues, top_entries, truncated_top_statistic, EntryRecord, EntryScope,
    LemmaEvent,
};
use crate::matrix::DenseMatrix;
use crate::points::{count_in, extract_points};
use crate::rng::{SeedInfo, Stream};
use crate::tail::{normalizer, Normalizer};
use crate::EnsembleKind;

/// Upper bound on the eigenvalues requested from Lanczos while trying to
/// reach the smallest interval endpoint.
const MAX_ITERATIVE_K: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub kind: SolverKind,
    pub iterations: usize,
    pub residual_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate_index: u64,
    pub seed: SeedInfo,
    /// `b_n` or `b_np`.
    pub normalizer: f64,
    pub solver: Option<SolverInfo>,
    /// Solver failure for this replicate; the spectral fields are then empty.
    pub error: Option<String>,
    /// Raw top eigenvalues, nonincreasing.
    pub top_eigenvalues: Vec<f64>,
    /// Normalized positive atoms among the top eigenvalues.
    pub atoms: Vec<f64>,
    pub top_entries: Vec<EntryRecord>,
    /// `|a_(k)|` (Wigner) or `a_(k)^2` (covariance).
    pub predicted: Vec<f64>,
    /// `lambda_k / predicted_k`.
    pub ratios: Vec<f64>,
    /// Atom counts, one per configured interval.
    pub interval_counts: Vec<u64>,
    /// True when the computed part of the spectrum did not reach below every
    /// interval's lower end, so counts may be too small.
    pub counts_truncated: bool,
    pub lemma_events: Vec<LemmaEvent>,
    /// `lambda_max(A1) / n^{2/alpha - epsilon}` when truncation is configured.
    pub truncated_statistic: Option<f64>,
    pub elapsed_ms: Option<f64>,
}

impl ReplicateRecord {
    /// Largest normalized atom, 0 when none is positive.
    pub fn max_atom(&self) -> f64 {
        self.atoms.first().copied().unwrap_or(0.0)
    }
}

/// Entry matrix of replicate `r`: the symmetric Wigner matrix or the
/// rectangular `n x p` matrix.
pub fn replicate_matrix(config: &ExperimentConfig, r: u64) -> Result<(DenseMatrix, SeedInfo)> {
    let law = config.law()?;
    let mut stream = Stream::for_replicate(config.master_seed, r);
    let seed = SeedInfo {
        master_seed: stream.master_seed(),
        stream_id: stream.stream_id(),
    };
    let m = match config.ensemble {
        EnsembleKind::Wigner => generate_wigner(&law, config.n, &mut stream)?.entries,
        EnsembleKind::Covariance => generate_covariance(&law, config.n, config.p(), &mut stream)?.entries,
    };
    Ok((m, seed))
}

/// Runs every replicate, in parallel on `threads` workers (all cores when
/// `None`). Records come back ordered by index and do not depend on the
/// number of workers.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<ReplicateRecord>> {
    config.validate()?;
    let law = config.law()?;
    let p = (config.ensemble == EnsembleKind::Covariance).then(|| config.p());
    let norm = normalizer(&law, config.normalizer_kind(), config.n, p)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..config.replicates as u64)
            .into_par_iter()
            .map(|r| run_replicate(config, &norm, r))
            .collect()
    })
}

/// One replicate, reproducible from `(config, r)` alone.
pub fn run_replicate(config: &ExperimentConfig, norm: &Normalizer, r: u64) -> Result<ReplicateRecord> {
    let start = config.record_timing.then(Instant::now);
    let (m, seed) = replicate_matrix(config, r)?;
    let kind = config.ensemble;

    let stats = top_entries(&m, EntryScope::for_ensemble(kind), config.top_m)?;
    let lemma_events = lemma_diagnostics(&m, norm, kind, &config.lemma)?.events;
    let predicted = predicted_top_eigenvalues(&stats, kind, config.top_k)?;
    let truncated_statistic = match config.truncation {
        Some(t) => Some(truncated_top_statistic(&m, config.alpha, t.beta, t.epsilon)?),
        None => None,
    };

    let mut record = ReplicateRecord {
        replicate_index: r,
        seed,
        normalizer: norm.value,
        solver: None,
        error: None,
        top_eigenvalues: Vec::new(),
        atoms: Vec::new(),
        top_entries: stats.top,
        predicted,
        ratios: Vec::new(),
        interval_counts: Vec::new(),
        counts_truncated: false,
        lemma_events,
        truncated_statistic,
        elapsed_ms: None,
    };

    match solve(config, &m, norm, seed.stream_id) {
        Ok((spectrum, counts_truncated)) => {
            let points = extract_points(&spectrum, norm, kind)?;
            record.interval_counts = config
                .intervals
                .iter()
                .map(|i| count_in(&points, i.a, i.upper()).map(|c| c as u64))
                .collect::<Result<_>>()?;
            record.top_eigenvalues = spectrum.values[..config.top_k].to_vec();
            record.atoms = points.atoms.into_iter().take(config.top_k).collect();
            record.ratios = record
                .top_eigenvalues
                .iter()
                .zip(&record.predicted)
                .map(|(l, p)| l / p)
                .collect();
            record.counts_truncated = counts_truncated;
            record.solver = Some(SolverInfo {
                kind: spectrum.solver,
                iterations: spectrum.iterations,
                residual_bound: spectrum.residual_bound,
            });
        }
        Err(e @ Error::NoConvergence { .. }) => record.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    record.elapsed_ms = start.map(|t| t.elapsed().as_secs_f64() * 1e3);
    Ok(record)
}

/// Spectrum used for the point process, plus whether it may miss atoms
/// inside the configured intervals.
fn solve(config: &ExperimentConfig, m: &DenseMatrix, norm: &Normalizer, start_seed: u64) -> Result<(Spectrum, bool)> {
    if config.n <= config.dense_threshold {
        let spectrum = match config.ensemble {
            EnsembleKind::Wigner => full_spectrum(m)?,
            EnsembleKind::Covariance => full_spectrum(&gram(m))?,
        };
        return Ok((spectrum, false));
    }
    let floor = config.intervals.iter().map(|i| i.a).fold(f64::INFINITY, f64::min) * norm.eigen_scale();
    let cap = MAX_ITERATIVE_K.max(config.top_k).min(config.n);
    let opts = LanczosOptions {
        tol: config.tol,
        max_iter: config.n,
        start_seed,
    };
    let mut k = config.top_k;
    loop {
        let spectrum = match config.ensemble {
            EnsembleKind::Wigner => top_k(m, k, &opts)?,
            EnsembleKind::Covariance => top_k(&GramOperator::new(m), k, &opts)?,
        };
        let reached = spectrum.values.last().is_some_and(|&l| l <= floor);
        if reached || k == config.n {
            return Ok((spectrum, false));
        }
        if k == cap {
            return Ok((spectrum, true));
        }
        k = (2 * k).min(cap);
    }
}
