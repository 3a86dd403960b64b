//! Command-line front end. Exit codes: 0 success, 1 usage, 2 configuration,
//! 3 runtime.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{run_matrix_with, MatrixOptions, MatrixResult, MatrixSelection, Pairing, SpeedRegime};
use crate::io::{
    emit_curves, emit_stats_report, emit_summary, parse_document, read_archive, write_archive, Experiment,
    ExperimentFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gridpursuit", version, about = "Tabular IQL/CQL predator-prey pursuit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the selected conditions and write a results archive.
    Run(RunArgs),
    /// Print summary tables and paired statistics from an archive.
    Report(ArchiveArgs),
    /// Write learning-curve CSVs from an archive.
    Curves(CurvesArgs),
    /// Parse and validate a configuration without running it.
    Validate(PlanArgs),
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Experiment document (TOML). Defaults reproduce the reference setup.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Episodes per run.
    #[arg(long)]
    episodes: Option<u64>,
    /// Number of seeds; runs use seeds 0..N.
    #[arg(long)]
    seeds: Option<u64>,
    /// base, pred-fast, prey-fast or all.
    #[arg(long, value_parser = parse_regime)]
    regime: Option<Selection<SpeedRegime>>,
    /// iql-iql, iql-cql, cql-iql, cql-cql or all.
    #[arg(long, value_parser = parse_pairing)]
    pairing: Option<Selection<Pairing>>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    plan: PlanArgs,
    /// Suppress per-run progress lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct ArchiveArgs {
    /// Archive directory written by `run`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Locate the archive through this document's `output_dir`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict to one regime (or all).
    #[arg(long, value_parser = parse_regime)]
    regime: Option<Selection<SpeedRegime>>,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[command(flatten)]
    archive: ArchiveArgs,
    /// Emit every N-th episode (default: the archive's `curve_stride`).
    #[arg(long)]
    stride: Option<u64>,
    /// Rolling-mean window (default: the archive's `curve_window`).
    #[arg(long)]
    window: Option<u64>,
}

#[derive(Debug, Clone)]
enum Selection<T> {
    All,
    One(T),
}

fn parse_regime(s: &str) -> std::result::Result<Selection<SpeedRegime>, String> {
    if s == "all" {
        return Ok(Selection::All);
    }
    s.parse().map(Selection::One)
}

fn parse_pairing(s: &str) -> std::result::Result<Selection<Pairing>, String> {
    if s == "all" {
        return Ok(Selection::All);
    }
    s.parse().map(Selection::One)
}

/// Writes to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn load_document(path: Option<&Path>) -> Result<ExperimentFile> {
    match path {
        None => Ok(ExperimentFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", p.display())))?;
            parse_document(&text)
        }
    }
}

fn build_experiment(args: &PlanArgs) -> Result<Experiment> {
    let mut doc = load_document(args.config.as_deref())?;
    if let Some(n) = args.episodes {
        doc.episodes = n;
    }
    if let Some(n) = args.seeds {
        doc.seeds = (0..n).collect();
    }
    match &args.regime {
        Some(Selection::One(r)) => doc.regimes = vec![*r],
        Some(Selection::All) => doc.regimes = SpeedRegime::ALL.to_vec(),
        None => {}
    }
    match &args.pairing {
        Some(Selection::One(p)) => doc.pairings = vec![*p],
        Some(Selection::All) => doc.pairings = Pairing::ALL.to_vec(),
        None => {}
    }
    if let Some(w) = args.workers {
        doc.workers = w;
    }
    if let Some(out) = &args.out {
        doc.output_dir = out.clone();
    }
    doc.into_experiment()
}

fn archive_dir(args: &ArchiveArgs) -> Result<PathBuf> {
    match (&args.out, &args.config) {
        (Some(out), _) => Ok(out.clone()),
        (None, Some(_)) => Ok(load_document(args.config.as_deref())?.output_dir),
        (None, None) => Ok(ExperimentFile::default().output_dir),
    }
}

fn filter_regime(results: MatrixResult, regime: &Option<Selection<SpeedRegime>>) -> MatrixResult {
    match regime {
        Some(Selection::One(r)) => MatrixResult {
            runs: results.runs.into_iter().filter(|(k, _)| k.1 == *r).collect(),
        },
        _ => results,
    }
}

fn print_reports(results: &MatrixResult, dir: &Path) -> Result<()> {
    say(&emit_summary(results, dir)?);
    match emit_stats_report(results, dir) {
        Ok((text, _)) => say(&format!("{text}\n")),
        Err(Error::Incomplete(what)) => eprintln!("statistics skipped, incomplete matrix: missing {what}"),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let experiment = build_experiment(&args.plan)?;
    let options = MatrixOptions {
        selection: MatrixSelection {
            pairings: experiment.selection.pairings.clone(),
            regimes: experiment.selection.regimes.clone(),
        },
        workers: experiment.workers,
        progress: !args.quiet,
    };
    let results = run_matrix_with(&experiment.plan, &options)?;
    let dir = &experiment.output_dir;
    write_archive(dir, &experiment, &results)?;
    print_reports(&results, dir)?;
    eprintln!("archive written to {}", dir.display());
    Ok(())
}

fn cmd_report(args: &ArchiveArgs) -> Result<()> {
    let dir = archive_dir(args)?;
    let archive = read_archive(&dir)?;
    print_reports(&filter_regime(archive.results, &args.regime), &dir)
}

fn cmd_curves(args: &CurvesArgs) -> Result<()> {
    let dir = archive_dir(&args.archive)?;
    let archive = read_archive(&dir)?;
    let stride = args.stride.unwrap_or(archive.manifest.config.curve_stride);
    let window = args.window.unwrap_or(archive.manifest.config.curve_window);
    if stride == 0 {
        return Err(Error::config("stride", "must be >= 1"));
    }
    if window == 0 {
        return Err(Error::config("window", "must be >= 1"));
    }
    let results = filter_regime(archive.results, &args.archive.regime);
    for path in emit_curves(&results, stride as usize, window as usize, &dir.join("curves"))? {
        say(&format!("{}\n", path.display()));
    }
    Ok(())
}

fn cmd_validate(args: &PlanArgs) -> Result<()> {
    let e = build_experiment(args)?;
    say(&format!(
        "ok: {} episodes x {} seeds, {} pairing(s) x {} regime(s), window {}\n",
        e.plan.episodes,
        e.plan.seeds.len(),
        e.selection.pairings.len(),
        e.selection.regimes.len(),
        e.plan.window_size
    ));
    Ok(())
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config { .. } | Error::Parse(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Report(a) => cmd_report(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(main(["gridpursuit", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main(["gridpursuit", "validate", "--bogus"]), EXIT_USAGE);
        assert_eq!(main(["gridpursuit", "run", "--regime", "sideways"]), EXIT_USAGE);
    }

    #[test]
    fn validate_default_is_ok() {
        assert_eq!(main(["gridpursuit", "validate"]), EXIT_OK);
    }

    #[test]
    fn invalid_values_exit_2() {
        assert_eq!(main(["gridpursuit", "validate", "--episodes", "0"]), EXIT_CONFIG);
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.toml");
        fs::write(&cfg, "gamma = 1.5\n").unwrap();
        assert_eq!(main(["gridpursuit".as_ref(), "validate".as_ref(), "--config".as_ref(), cfg.as_os_str()]), EXIT_CONFIG);
    }

    #[test]
    fn missing_archive_exit_3() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nothing");
        assert_eq!(main(["gridpursuit".as_ref(), "report".as_ref(), "--out".as_ref(), out.as_os_str()]), EXIT_RUNTIME);
    }
}
