use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{serialize_config, Experiment, ExperimentFile};
use crate::error::{Error, Result};
use crate::harness::{
    Condition, EpisodeMetrics, FinalWindow, MatrixResult, Pairing, SeedResult, SpeedRegime,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const MANIFEST: &str = "manifest.json";
const RUNS_DIR: &str = "runs";
/// Everything an earlier `run` or `curves` may have left in an archive directory.
const DERIVED: [&str; 6] = [RUNS_DIR, "curves", "summary.txt", "summary.csv", "stats.txt", "stats.csv"];
const RUN_HEADER: &str = "episode,length,predator_reward,prey_reward";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub pairing: Pairing,
    pub regime: SpeedRegime,
    pub seed: u64,
    /// Path relative to the archive root.
    pub file: String,
    pub episodes: u64,
    pub final_window: FinalWindow,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub tool_version: String,
    /// SHA-256 of the result-affecting configuration.
    pub config_digest: String,
    /// Seconds since the Unix epoch at write time.
    pub created_unix: u64,
    pub config: ExperimentFile,
    pub runs: Vec<RunEntry>,
}

/// A loaded archive.
#[derive(Debug, Clone)]
pub struct Archive {
    pub root: PathBuf,
    pub manifest: Manifest,
    pub results: MatrixResult,
}

pub fn run_file_name(pairing: Pairing, regime: SpeedRegime, seed: u64) -> String {
    format!("{}__{}__seed{}.csv", pairing.name(), regime.name(), seed)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Digest over the configuration with output location and worker count
/// cleared, since neither affects results.
pub(crate) fn config_digest(experiment: &Experiment) -> Result<String> {
    let mut normalized = experiment.clone();
    normalized.output_dir = PathBuf::new();
    normalized.workers = 0;
    Ok(hex(&Sha256::digest(serialize_config(&normalized)?.as_bytes())))
}

fn run_csv(per_episode: &[EpisodeMetrics]) -> String {
    let mut out = String::with_capacity(per_episode.len() * 32);
    out.push_str(RUN_HEADER);
    out.push('\n');
    for (i, m) in per_episode.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", i + 1, m.length, m.predator_reward, m.prey_reward);
    }
    out
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes every run of `results` plus a manifest under `dir`.
/// Writes the run CSVs and manifest. If `dir` already holds an archive, its
/// runs and derived reports are removed first so nothing stale survives.
pub fn write_archive(dir: &Path, experiment: &Experiment, results: &MatrixResult) -> Result<Manifest> {
    if dir.join(MANIFEST).is_file() {
        clear_previous(dir)?;
    }
    let runs_dir = dir.join(RUNS_DIR);
    fs::create_dir_all(&runs_dir).map_err(|e| Error::io(&runs_dir, e))?;
    let mut runs = Vec::with_capacity(results.len());
    for (&(pairing, regime, seed), run) in &results.runs {
        let name = run_file_name(pairing, regime, seed);
        let body = run_csv(&run.per_episode);
        write_file(&runs_dir.join(&name), body.as_bytes())?;
        runs.push(RunEntry {
            pairing,
            regime,
            seed,
            file: format!("{RUNS_DIR}/{name}"),
            episodes: run.per_episode.len() as u64,
            final_window: run.final_window,
            sha256: hex(&Sha256::digest(body.as_bytes())),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: TOOL_VERSION.to_string(),
        config_digest: config_digest(experiment)?,
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        config: ExperimentFile::from_experiment(experiment),
        runs,
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Archive { path: dir.join(MANIFEST), reason: e.to_string() })?;
    write_file(&dir.join(MANIFEST), format!("{json}\n").as_bytes())?;
    Ok(manifest)
}

fn clear_previous(dir: &Path) -> Result<()> {
    for name in [MANIFEST].iter().chain(&DERIVED) {
        let path = dir.join(name);
        let removed = if path.is_dir() { fs::remove_dir_all(&path) } else { fs::remove_file(&path) };
        match removed {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(Error::io(path, e)),
            _ => {}
        }
    }
    Ok(())
}

fn parse_run_csv(path: &Path, text: &str) -> Result<Vec<EpisodeMetrics>> {
    let bad = |line: usize, why: &str| Error::Archive {
        path: path.to_path_buf(),
        reason: format!("line {line}: {why}"),
    };
    let mut lines = text.lines();
    if lines.next() != Some(RUN_HEADER) {
        return Err(bad(1, "unexpected header"));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(n, "expected 4 fields"));
        }
        if f[0].parse::<usize>().ok() != Some(i + 1) {
            return Err(bad(n, "episodes out of sequence"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(n, "malformed number"));
        out.push(EpisodeMetrics {
            length: f[1].parse().map_err(|_| bad(n, "malformed length"))?,
            predator_reward: num(f[2])?,
            prey_reward: num(f[3])?,
        });
    }
    Ok(out)
}

/// Loads the archive rooted at `dir`.
pub fn read_archive(dir: &Path) -> Result<Archive> {
    let path = dir.join(MANIFEST);
    if !path.is_file() {
        return Err(Error::MissingArchive(path));
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Archive {
        path: path.clone(),
        reason: e.to_string(),
    })?;
    let window = manifest.config.window_size.unwrap_or(manifest.config.episodes).max(1) as usize;
    let mut results = MatrixResult::default();
    for entry in &manifest.runs {
        let run_path = dir.join(&entry.file);
        let body = fs::read_to_string(&run_path).map_err(|e| Error::io(&run_path, e))?;
        let per_episode = parse_run_csv(&run_path, &body)?;
        if per_episode.len() as u64 != entry.episodes {
            return Err(Error::Archive {
                path: run_path,
                reason: format!("expected {} episodes, found {}", entry.episodes, per_episode.len()),
            });
        }
        let final_window = FinalWindow::compute(&per_episode, window)?;
        results.insert(SeedResult {
            condition: Condition::new(entry.pairing, entry.regime, entry.seed),
            per_episode,
            final_window,
        });
    }
    Ok(Archive {
        root: dir.to_path_buf(),
        manifest,
        results,
    })
}
