//! Aggregation of replicate records into test statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::ReplicateRecord;
use crate::error::{Error, Result};
use crate::extremes::LemmaEventKind;
use crate::points::{alpha_eff, expected_count, ks_frechet, ks_threshold, median, quantile, FitReport, Interval};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSummary {
    pub interval: Interval,
    pub expected_count: f64,
    pub sample_mean: f64,
    /// `histogram[c]` replicates had `c` atoms in the interval.
    pub histogram: Vec<u64>,
    /// Replicates whose counts may be incomplete.
    pub truncated_replicates: usize,
    pub fit: Option<FitReport>,
    /// Why `fit` is missing.
    pub fit_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    /// 1-based rank.
    pub k: usize,
    pub samples: usize,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    /// Median of `|ratio - 1|`.
    pub median_abs_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaFrequency {
    pub kind: LemmaEventKind,
    pub occurred: usize,
    pub total: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub config: ExperimentConfig,
    pub replicates: usize,
    pub failed_replicates: usize,
    pub alpha_eff: f64,
    /// Largest normalized atom per successful replicate, by replicate index.
    pub maxima: Vec<f64>,
    pub ks_statistic: f64,
    pub ks_threshold: f64,
    pub intervals: Vec<IntervalSummary>,
    pub ratios: Vec<RatioSummary>,
    pub lemma_frequencies: Vec<LemmaFrequency>,
    pub truncated_statistic_median: Option<f64>,
}

/// Aggregates `records`; the result does not depend on their order.
/// Replicates that recorded a solver error are counted but excluded from the
/// statistics.
pub fn summarize(records: &[ReplicateRecord], config: &ExperimentConfig) -> Result<SummaryReport> {
    if records.is_empty() {
        return Err(Error::Degenerate("no replicate records to summarize".into()));
    }
    let mut sorted: Vec<&ReplicateRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.replicate_index);
    let ok: Vec<&ReplicateRecord> = sorted.iter().copied().filter(|r| r.error.is_none()).collect();
    if ok.is_empty() {
        return Err(Error::Degenerate("every replicate failed".into()));
    }
    let kind = config.ensemble;
    let a_eff = alpha_eff(kind, config.alpha);
    let maxima: Vec<f64> = ok.iter().map(|r| r.max_atom()).collect();
    let ks_statistic = ks_frechet(&maxima, a_eff)?;

    let mut intervals = Vec::with_capacity(config.intervals.len());
    for (idx, &interval) in config.intervals.iter().enumerate() {
        let counts = ok
            .iter()
            .map(|r| {
                r.interval_counts.get(idx).copied().ok_or_else(|| Error::DimensionMismatch {
                    expected: config.intervals.len(),
                    got: r.interval_counts.len(),
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        let max = counts.iter().copied().max().unwrap_or(0) as usize;
        let mut histogram = vec![0u64; max + 1];
        for &c in &counts {
            histogram[c as usize] += 1;
        }
        let (fit, fit_error) = match FitReport::new(&maxima, &counts, kind, config.alpha, interval) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        intervals.push(IntervalSummary {
            interval,
            expected_count: expected_count(kind, config.alpha, interval.a, interval.upper())?,
            sample_mean: counts.iter().sum::<u64>() as f64 / counts.len() as f64,
            histogram,
            truncated_replicates: ok.iter().filter(|r| r.counts_truncated).count(),
            fit,
            fit_error,
        });
    }

    let ratios = (0..config.top_k)
        .map(|k| {
            let v: Vec<f64> = ok.iter().filter_map(|r| r.ratios.get(k).copied()).collect();
            let dev: Vec<f64> = v.iter().map(|x| (x - 1.0).abs()).collect();
            RatioSummary {
                k: k + 1,
                samples: v.len(),
                q05: quantile(&v, 0.05),
                q25: quantile(&v, 0.25),
                median: median(&v),
                q75: quantile(&v, 0.75),
                q95: quantile(&v, 0.95),
                median_abs_deviation: median(&dev),
            }
        })
        .collect();

    let mut lemma: BTreeMap<LemmaEventKind, (usize, usize)> = BTreeMap::new();
    for r in &sorted {
        for e in &r.lemma_events {
            let slot = lemma.entry(e.kind).or_default();
            slot.0 += e.occurred as usize;
            slot.1 += 1;
        }
    }
    let lemma_frequencies = lemma
        .into_iter()
        .map(|(kind, (occurred, total))| LemmaFrequency {
            kind,
            occurred,
            total,
            frequency: occurred as f64 / total as f64,
        })
        .collect();

    let truncated: Vec<f64> = ok.iter().filter_map(|r| r.truncated_statistic).collect();
    Ok(SummaryReport {
        config: config.clone(),
        replicates: records.len(),
        failed_replicates: records.len() - ok.len(),
        alpha_eff: a_eff,
        ks_threshold: ks_threshold(maxima.len()),
        maxima,
        ks_statistic,
        intervals,
        ratios,
        lemma_frequencies,
        truncated_statistic_median: (!truncated.is_empty()).then(|| median(&truncated)),
    })
}
