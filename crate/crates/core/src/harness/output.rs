//! Writing and reading experiment outputs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::ReplicateRecord;
use super::summary::SummaryReport;
use crate::error::{Error, Result};
use crate::tail::frechet_cdf;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const SUMMARY_JSON_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.txt";
pub const REPLICATES_CSV_FILE: &str = "replicates.csv";
pub const SUMMARY_CSV_FILE: &str = "summary.csv";
pub const PLOTDATA_FILE: &str = "maxima.tsv";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Jsonl,
    Csv,
    Plotdata,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(OutputFormat::Jsonl),
            "csv" => Ok(OutputFormat::Csv),
            "plotdata" => Ok(OutputFormat::Plotdata),
            _ => Err(Error::Config(format!("unknown format {s:?}; expected jsonl, csv or plotdata"))),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes the report in `format` under the directory `dir` (created when
/// missing) and returns the files written.
///
/// - `jsonl`: `records.jsonl` (one record per line), `summary.json` and `config.txt`.
/// - `csv`: `replicates.csv` (one row per record, header only when there are
///   none) and `summary.csv` (`section,label,statistic,value` rows).
/// - `plotdata`: `maxima.tsv` with columns `x`, empirical CDF and Fréchet CDF.
pub fn emit_report(
    report: &SummaryReport,
    records: &[ReplicateRecord],
    format: OutputFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        OutputFormat::Jsonl => {
            let rec_path = dir.join(RECORDS_FILE);
            write_jsonl(&rec_path, records)?;
            let sum_path = dir.join(SUMMARY_JSON_FILE);
            let mut w = create(&sum_path)?;
            serde_json::to_writer_pretty(&mut w, report).map_err(|e| Error::Format {
                path: sum_path.clone(),
                message: e.to_string(),
            })?;
            writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(&sum_path, e))?;
            let cfg_path = dir.join(CONFIG_FILE);
            std::fs::write(&cfg_path, report.config.to_flat_string()).map_err(|e| Error::io(&cfg_path, e))?;
            Ok(vec![rec_path, sum_path, cfg_path])
        }
        OutputFormat::Csv => {
            let rep_path = dir.join(REPLICATES_CSV_FILE);
            write_replicates_csv(&rep_path, report, records)?;
            let sum_path = dir.join(SUMMARY_CSV_FILE);
            write_summary_csv(&sum_path, report)?;
            Ok(vec![rep_path, sum_path])
        }
        OutputFormat::Plotdata => {
            let path = dir.join(PLOTDATA_FILE);
            write_plotdata(&path, &report.maxima, report.alpha_eff)?;
            Ok(vec![path])
        }
    }
}

pub fn write_jsonl(path: &Path, records: &[ReplicateRecord]) -> Result<()> {
    let mut w = create(path)?;
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        writeln!(w).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ReplicateRecord>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", i + 1),
        })?);
    }
    Ok(out)
}

fn write_replicates_csv(path: &Path, report: &SummaryReport, records: &[ReplicateRecord]) -> Result<()> {
    let k = report.config.top_k;
    let mut header = vec![
        "replicate_index".to_string(),
        "stream_id".into(),
        "normalizer".into(),
        "solver".into(),
        "error".into(),
    ];
    for l in 1..=k {
        header.extend([format!("lambda_{l}"), format!("atom_{l}"), format!("predicted_{l}"), format!("ratio_{l}")]);
    }
    header.extend(report.config.intervals.iter().map(|i| format!("count {i}")));
    header.push("counts_truncated".into());
    header.extend(report.lemma_frequencies.iter().map(|f| f.kind.name().to_string()));

    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    let cell = |v: Option<&f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let mut row = vec![
            r.replicate_index.to_string(),
            r.seed.stream_id.to_string(),
            r.normalizer.to_string(),
            r.solver.as_ref().map(|s| format!("{:?}", s.kind).to_lowercase()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ];
        for l in 0..k {
            row.extend([
                cell(r.top_eigenvalues.get(l)),
                cell(r.atoms.get(l)),
                cell(r.predicted.get(l)),
                cell(r.ratios.get(l)),
            ]);
        }
        row.extend((0..report.config.intervals.len()).map(|i| {
            r.interval_counts.get(i).map(|c| c.to_string()).unwrap_or_default()
        }));
        row.push(r.counts_truncated.to_string());
        for f in &report.lemma_frequencies {
            let occurred = r.lemma_events.iter().find(|e| e.kind == f.kind).map(|e| e.occurred);
            row.push(occurred.map(|o| o.to_string()).unwrap_or_default());
        }
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_summary_csv(path: &Path, report: &SummaryReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut put = |section: &str, label: &str, stat: &str, value: String| {
        w.write_record([section, label, stat, value.as_str()]).map_err(|e| csv_error(path, e))
    };
    put("section", "label", "statistic", "value".into())?;
    put("run", "", "replicates", report.replicates.to_string())?;
    put("run", "", "failed_replicates", report.failed_replicates.to_string())?;
    put("maxima", "", "ks_statistic", report.ks_statistic.to_string())?;
    put("maxima", "", "ks_threshold", report.ks_threshold.to_string())?;
    put("maxima", "", "alpha_eff", report.alpha_eff.to_string())?;
    for i in &report.intervals {
        let label = i.interval.to_string();
        put("interval", &label, "expected_count", i.expected_count.to_string())?;
        put("interval", &label, "sample_mean", i.sample_mean.to_string())?;
        if let Some(f) = &i.fit {
            put("interval", &label, "dispersion_index", f.dispersion_index.to_string())?;
            put("interval", &label, "chi_square", f.chi_square.to_string())?;
            put("interval", &label, "dof", f.dof.to_string())?;
        }
        for (c, h) in i.histogram.iter().enumerate() {
            put("histogram", &label, &c.to_string(), h.to_string())?;
        }
    }
    for r in &report.ratios {
        let label = format!("k={}", r.k);
        put("ratio", &label, "q05", r.q05.to_string())?;
        put("ratio", &label, "q25", r.q25.to_string())?;
        put("ratio", &label, "median", r.median.to_string())?;
        put("ratio", &label, "q75", r.q75.to_string())?;
        put("ratio", &label, "q95", r.q95.to_string())?;
        put("ratio", &label, "median_abs_deviation", r.median_abs_deviation.to_string())?;
    }
    for f in &report.lemma_frequencies {
        put("lemma", f.kind.name(), "frequency", f.frequency.to_string())?;
    }
    if let Some(m) = report.truncated_statistic_median {
        put("truncation", "", "median", m.to_string())?;
    }
    drop(put);
    w.flush().map_err(|e| Error::io(path, e))
}

/// Sorted maxima with their empirical CDF `i / m` and the Fréchet CDF.
pub fn write_plotdata(path: &Path, maxima: &[f64], alpha_eff: f64) -> Result<()> {
    let mut sorted = maxima.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut w = create(path)?;
    let mut body = String::from("x\tempirical_cdf\tfrechet_cdf\n");
    for (i, x) in sorted.iter().enumerate() {
        body.push_str(&format!("{x}\t{}\t{}\n", (i + 1) as f64 / m, frechet_cdf(alpha_eff, *x)));
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
