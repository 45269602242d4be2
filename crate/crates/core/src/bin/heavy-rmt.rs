use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heavy_rmt::harness::{
    emit_report, read_jsonl, run_experiment, summarize, ExperimentConfig, OutputFormat, SummaryReport, CONFIG_FILE,
    RECORDS_FILE,
};
use heavy_rmt::harness::{parse_slowly_varying, parse_symmetry};
use heavy_rmt::rng::Stream;
use heavy_rmt::tail::TailLaw;
use heavy_rmt::Error;

#[derive(Parser)]
#[command(name = "heavy-rmt", version, about = "Extreme eigenvalues of heavy-tailed random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its records and summary.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Output formats; repeat for several. jsonl is always written.
        #[arg(long = "format", default_value = "jsonl")]
        formats: Vec<OutputFormat>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare empirical tail frequencies of the entry law with its survival function.
    SampleTail {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "unit")]
        sv: String,
        #[arg(long, default_value = "symmetric")]
        symmetry: String,
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recompute the statistics from an existing run directory.
    Gof {
        /// Directory holding records.jsonl and config.txt.
        #[arg(long)]
        input: PathBuf,
        /// Write summary.json here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit csv or plotdata files from an existing run directory.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        /// Defaults to the input directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// `unit` or `logpower:KAPPA`.
    #[arg(long)]
    sv: Option<String>,
    #[arg(long)]
    symmetry: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    top_k: Option<String>,
    /// `a:b,a:b` with `inf` for an open end.
    #[arg(long)]
    intervals: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    dense_threshold: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Record wall-clock time per replicate (records are then not reproducible).
    #[arg(long)]
    timing: bool,
}

impl ConfigArgs {
    fn resolve(&self) -> heavy_rmt::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("ensemble", &self.ensemble),
            ("alpha", &self.alpha),
            ("sv", &self.sv),
            ("symmetry", &self.symmetry),
            ("n", &self.n),
            ("gamma", &self.gamma),
            ("replicates", &self.replicates),
            ("top_k", &self.top_k),
            ("intervals", &self.intervals),
            ("seed", &self.seed),
            ("dense_threshold", &self.dense_threshold),
            ("tol", &self.tol),
            ("beta", &self.beta),
            ("epsilon", &self.epsilon),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.record_timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_summary(s: &SummaryReport) {
    println!(
        "replicates {} (failed {}), KS {:.4} (threshold {:.4})",
        s.replicates, s.failed_replicates, s.ks_statistic, s.ks_threshold
    );
    for i in &s.intervals {
        match &i.fit {
            Some(f) => println!(
                "interval {}: mean {:.4} (expected {:.4}), dispersion {:.4}, chi-square {:.3} on {} dof",
                i.interval, i.sample_mean, i.expected_count, f.dispersion_index, f.chi_square, f.dof
            ),
            None => println!(
                "interval {}: mean {:.4} (expected {:.4}), {}",
                i.interval,
                i.sample_mean,
                i.expected_count,
                i.fit_error.as_deref().unwrap_or("no fit")
            ),
        }
    }
    for r in &s.ratios {
        println!("ratio k={}: median {:.4}, median |r-1| {:.4}", r.k, r.median, r.median_abs_deviation);
    }
    for f in &s.lemma_frequencies {
        println!("event {}: {}/{} = {:.3}", f.kind.name(), f.occurred, f.total, f.frequency);
    }
    if let Some(m) = s.truncated_statistic_median {
        println!("truncated top statistic median {m:.4}");
    }
}

fn load_run(dir: &Path) -> heavy_rmt::Result<(ExperimentConfig, Vec<heavy_rmt::harness::ReplicateRecord>)> {
    let config = ExperimentConfig::from_file(&dir.join(CONFIG_FILE))?;
    let records = read_jsonl(&dir.join(RECORDS_FILE))?;
    Ok((config, records))
}

fn sample_tail(alpha: f64, sv: &str, symmetry: &str, count: usize, seed: u64) -> heavy_rmt::Result<()> {
    let law = TailLaw::new(alpha, parse_slowly_varying(sv)?, parse_symmetry(symmetry)?)?;
    let mut stream = Stream::new(seed, 0);
    let draws = law.sample_iid(&mut stream, count)?;
    let shift = match law.symmetry {
        heavy_rmt::tail::Symmetry::OneSidedCentered => law.magnitude_mean()?,
        _ => 0.0,
    };
    let mut mags: Vec<f64> = draws.iter().map(|d| (d + shift).abs()).collect();
    mags.sort_by(f64::total_cmp);
    println!("level\tx\tempirical\tsurvival");
    for level in [1e-1, 1e-2, 1e-3, 1e-4] {
        let x = law.quantile_tail(level)?;
        let above = mags.len() - mags.partition_point(|&m| m <= x);
        println!("{level}\t{x}\t{}\t{}", above as f64 / count as f64, law.survival(x)?);
    }
    Ok(())
}

fn execute(cli: Cli) -> heavy_rmt::Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            formats,
            threads,
        } => {
            let cfg = config.resolve()?;
            let records = run_experiment(&cfg, threads)?;
            let summary = summarize(&records, &cfg)?;
            let mut formats = formats;
            if !formats.contains(&OutputFormat::Jsonl) {
                formats.insert(0, OutputFormat::Jsonl);
            }
            for f in formats {
                for path in emit_report(&summary, &records, f, &out)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            print_summary(&summary);
        }
        Command::SampleTail {
            alpha,
            sv,
            symmetry,
            count,
            seed,
        } => sample_tail(alpha, &sv, &symmetry, count, seed)?,
        Command::Gof { input, out } => {
            let (cfg, records) = load_run(&input)?;
            let summary = summarize(&records, &cfg)?;
            match out {
                Some(dir) => {
                    for path in emit_report(&summary, &records, OutputFormat::Jsonl, &dir)? {
                        eprintln!("wrote {}", path.display());
                    }
                }
                None => {
                    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Format {
                        path: input.join(RECORDS_FILE),
                        message: e.to_string(),
                    })?;
                    println!("{text}");
                }
            }
            print_summary(&summary);
        }
        Command::Report { input, format, out } => {
            let (cfg, records) = load_run(&input)?;
            let summary = summarize(&records, &cfg)?;
            for path in emit_report(&summary, &records, format, out.as_deref().unwrap_or(&input))? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidInterval { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
