use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use micropolar::diagnostics::CheckRecord;
use micropolar::harness::{
    load_config, parse_hypothesis, run_experiment, series_check, CheckName, Report, RunContext,
};
use micropolar::NormSeries;

/// Exit status when the command ran but a required check failed.
const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for unreadable inputs and invalid configurations.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "micropolar", version, about = "Run and check micropolar decay experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and evaluate its checks.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding `out_dir` from the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-evaluate a check on a recorded series.
    Report {
        #[arg(long)]
        series: PathBuf,
        #[arg(long = "check", required = true)]
        checks: Vec<String>,
        /// Decay hypothesis as `α=… C0=… c0=…` tokens.
        #[arg(long, num_args = 1..)]
        hypothesis: Vec<String>,
        /// Configuration describing the run; defaults to the `report.json` next to the series.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run every configuration matching a glob; each writes to `<out_dir>/<id>`.
    Sweep {
        #[arg(long)]
        configs: String,
        /// Parallel workers.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn print_records(records: &[CheckRecord]) {
    for r in records {
        println!(
            "{:<5} {:<24} measured {:>+.6e}  predicted {:>+.6e}  tol {:.1e}{}",
            if r.pass { "pass" } else { "FAIL" },
            r.check,
            r.measured,
            r.predicted,
            r.tol,
            if r.required { "" } else { "  (informational)" }
        );
    }
}

fn print_report(report: &Report) {
    if let Some(w) = report.environment.validity_window {
        println!("{}: validity window [{:.4}, {:.4}]", report.id, w.t_min, w.t_max);
    }
    print_records(&report.records);
    if let Some(e) = &report.error {
        println!("error: {e}");
    }
    println!("{}: {}", report.id, if report.pass { "PASS" } else { "FAIL" });
}

fn run(config: &Path, out: Option<&Path>) -> Result<bool> {
    let spec = load_config(config)?;
    let report = run_experiment(&spec, out)?;
    print_report(&report);
    Ok(report.pass)
}

fn report(series: &Path, checks: &[String], hypothesis: &[String], config: Option<&Path>) -> Result<bool> {
    let data = NormSeries::read_csv(series)?;
    let mut ctx: RunContext = match config {
        Some(path) => RunContext::from_spec(&load_config(path)?),
        None => {
            let stamp = series.with_file_name("report.json");
            Report::read(&stamp)
                .with_context(|| format!("no --config given and {} is unusable", stamp.display()))?
                .environment
                .context
        }
    };
    if !hypothesis.is_empty() {
        ctx.hypothesis = Some(parse_hypothesis(hypothesis)?);
        ctx.sandwich = hypothesis.iter().flat_map(|t| t.split_whitespace()).any(|t| t.starts_with("c0="));
    }
    let mut records = Vec::new();
    for name in checks {
        let check: CheckName = name.parse()?;
        records.extend(series_check(check, &data, &ctx)?);
    }
    print_records(&records);
    let pass = Report::compute_pass(&records, None);
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

fn sweep(pattern: &str, jobs: usize) -> Result<bool> {
    let paths: Vec<PathBuf> = glob::glob(pattern)
        .with_context(|| format!("bad glob `{pattern}`"))?
        .collect::<Result<_, _>>()?;
    if paths.is_empty() {
        bail!("no configuration matches `{pattern}`");
    }
    let specs = paths
        .iter()
        .map(|p| load_config(p).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Report>>>> = Mutex::new((0..specs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, specs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(spec) = specs.get(i) else { break };
                let dir = spec.out_dir.join(&spec.id);
                let r = run_experiment(spec, Some(&dir)).map_err(anyhow::Error::from);
                results.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    let mut all = true;
    for (path, result) in paths.iter().zip(results.into_inner().expect("no worker panicked")) {
        match result.expect("every spec was run") {
            Ok(report) => {
                print_report(&report);
                all &= report.pass;
            }
            Err(e) => {
                println!("{}: error: {e:#}", path.display());
                all = false;
            }
        }
    }
    println!("sweep: {}", if all { "PASS" } else { "FAIL" });
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, out } => run(config, out.as_deref()),
        Command::Report {
            series,
            checks,
            hypothesis,
            config,
        } => report(series, checks, hypothesis, config.as_deref()),
        Command::Sweep { configs, jobs } => sweep(configs, *jobs),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
