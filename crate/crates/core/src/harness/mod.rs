//! Reproducible Monte Carlo experiments: configuration, parallel replicates,
//! aggregation and output.
//!
//! Replicate `r` draws from the stream `derive_stream_id(master_seed, r)`, so
//! records depend only on the config and their index.

mod config;
mod output;
mod run;
mod summary;

pub use config::{
    default_intervals, parse_ensemble, parse_intervals, parse_slowly_varying, parse_symmetry, ExperimentConfig,
    Truncation, CONFIG_KEYS,
};
pub use output::{
    emit_report, read_jsonl, write_jsonl, write_plotdata, OutputFormat, CONFIG_FILE, PLOTDATA_FILE, RECORDS_FILE,
    REPLICATES_CSV_FILE, SUMMARY_CSV_FILE, SUMMARY_JSON_FILE,
};
pub use run::{replicate_matrix, run_experiment, run_replicate, ReplicateRecord, SolverInfo};
pub use summary::{summarize, IntervalSummary, LemmaFrequency, RatioSummary, SummaryReport};
