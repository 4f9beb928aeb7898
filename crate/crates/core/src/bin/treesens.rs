//! `treesens count | gen | bench`. Stdout carries only JSON or CSV; prose
//! goes to stderr.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use treesens::bench::{par2, run_matrix, write_csv, write_par2, BenchMatrix};
use treesens::gen::{generate, GenParams};
use treesens::model::to_json;
use treesens::run::{cmd_count, process_peak_rss_kb, Mode, RunConfig};

#[derive(Parser)]
#[command(name = "treesens", version, about = "Count sensitive regions of tree ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count sensitive regions of one model; prints one JSON report line.
    Count {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated sensitive feature indices.
        #[arg(long, value_delimiter = ',', required = true)]
        sensitive: Vec<usize>,
        /// Gap in model units; scaled by 10^precision internally.
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        gap: f64,
        #[arg(long, default_value_t = 1)]
        distance: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        precision: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "xcount-pepin")]
        mode: String,
        /// Seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// MiB; the TREESENS_MEM_CAP_MB environment variable overrides it.
        #[arg(long)]
        memory_cap_mb: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Generate a random ensemble as JSON.
    Gen {
        #[arg(long, default_value_t = 5)]
        trees: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        features: usize,
        #[arg(long, default_value_t = 2)]
        guards_per_feature: usize,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        leaf_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        leaf_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark matrix; prints CSV rows, then PAR-2 per mode on stderr.
    Bench {
        #[arg(long)]
        matrix: PathBuf,
        /// Also write the PAR-2 table as CSV here.
        #[arg(long)]
        par2_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Count {
            model,
            sensitive,
            gap,
            distance,
            epsilon,
            delta,
            precision,
            seed,
            mode,
            timeout,
            memory_cap_mb,
            jobs,
        } => {
            let mode: Mode = mode.parse()?;
            let cfg = RunConfig {
                model,
                sensitive,
                gap,
                distance,
                epsilon,
                delta,
                precision,
                seed,
                mode,
                timeout_secs: timeout,
                memory_cap_mb,
                jobs,
            };
            let mut report = cmd_count(&cfg);
            report.peak_rss_kb = process_peak_rss_kb();
            println!("{}", report.to_json_line());
            eprintln!("{}", report.summary());
            Ok(report.exit_code() as u8)
        }
        Command::Gen {
            trees,
            depth,
            features,
            guards_per_feature,
            leaf_min,
            leaf_max,
            seed,
            out,
        } => {
            let e = generate(&GenParams {
                trees,
                depth,
                features,
                guards_per_feature,
                leaf_range: (leaf_min, leaf_max),
                seed,
                ..GenParams::default()
            })?;
            let doc = to_json(&e);
            match out {
                Some(p) => std::fs::write(&p, doc + "\n").with_context(|| format!("writing {}", p.display()))?,
                None => println!("{doc}"),
            }
            Ok(0)
        }
        Command::Bench { matrix, par2_out } => {
            let m = BenchMatrix::load(&matrix)?;
            let rows = run_matrix(&m);
            let stdout = std::io::stdout();
            write_csv(&rows, stdout.lock())?;
            let scores = par2(&rows, m.timeout_secs);
            let mut err = std::io::stderr().lock();
            for (mode, s) in &scores {
                writeln!(err, "PAR-2 {mode}: {s:.3} s")?;
            }
            if let Some(p) = par2_out {
                write_par2(&scores, std::fs::File::create(&p)?)?;
            }
            Ok(0)
        }
    }
}
