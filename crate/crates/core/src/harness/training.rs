use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::condition::{Condition, Pairing, SpeedRegime};
use super::episode::{run_episode, EpisodeContext, EpisodeMetrics, Learners, Metric};
use super::plan::{PlacementMode, RunPlan};
use crate::error::{Error, Result};

const PLACEMENT_STREAM: u64 = 0x706c_6163_656d_656e;
const EXPLORE_STREAM: u64 = 0x6578_706c_6f72_6521;

/// splitmix64 finalizer applied to `a` combined with `b`.
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(a << 6).wrapping_add(a >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Initial-placement stream for `episode` of runs using `seed`. It depends on
/// the seed only, so paired conditions see identical start states.
pub fn placement_rng(seed: u64, episode: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(seed, PLACEMENT_STREAM), episode))
}

/// Exploration and tie-breaking stream of one condition.
pub fn exploration_rng(condition: &Condition) -> ChaCha8Rng {
    let base = mix(condition.seed, EXPLORE_STREAM);
    ChaCha8Rng::seed_from_u64(mix(mix(base, condition.pairing().id()), condition.speed_regime.id()))
}

/// Mean of the last `min(window, len)` entries.
pub fn final_window_mean(series: &[f64], window: usize) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::contract("final-window mean of an empty series"));
    }
    let tail = &series[series.len() - window.clamp(1, series.len())..];
    Ok(tail.iter().sum::<f64>() / tail.len() as f64)
}

/// Final-window means of the three metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalWindow {
    pub length: f64,
    pub predator_reward: f64,
    pub prey_reward: f64,
}

impl FinalWindow {
    pub fn compute(per_episode: &[EpisodeMetrics], window: usize) -> Result<Self> {
        let series = |m: Metric| per_episode.iter().map(|e| m.of(e)).collect::<Vec<_>>();
        Ok(FinalWindow {
            length: final_window_mean(&series(Metric::EpisodeLength), window)?,
            predator_reward: final_window_mean(&series(Metric::PredatorReward), window)?,
            prey_reward: final_window_mean(&series(Metric::PreyReward), window)?,
        })
    }

    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::EpisodeLength => self.length,
            Metric::PredatorReward => self.predator_reward,
            Metric::PreyReward => self.prey_reward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub condition: Condition,
    pub per_episode: Vec<EpisodeMetrics>,
    pub final_window: FinalWindow,
}

impl SeedResult {
    pub fn series(&self, metric: Metric) -> Vec<f64> {
        self.per_episode.iter().map(|e| metric.of(e)).collect()
    }
}

/// Trains fresh learners for `plan.episodes` episodes under `condition`.
pub fn run_training(condition: &Condition, plan: &RunPlan) -> Result<SeedResult> {
    let resolved = plan.resolve(condition.pairing(), condition.speed_regime);
    let ctx = EpisodeContext::new(condition.grid(&resolved.grid), resolved.learner)?
        .with_metric_shaping(plan.metric_includes_shaping);
    let mut learners = Learners::new(condition.predator_paradigm, condition.prey_paradigm, &ctx.grid)?;
    let mut explore = exploration_rng(condition);
    let mut per_episode = Vec::with_capacity(plan.episodes as usize);
    for episode in 0..plan.episodes {
        let epsilon = resolved.schedule.epsilon_at(episode);
        let mut placement = match plan.placement {
            PlacementMode::PerEpisode => placement_rng(condition.seed, episode),
            PlacementMode::PerSeed => placement_rng(condition.seed, 0),
        };
        per_episode.push(run_episode(&ctx, &mut learners, epsilon, &mut placement, &mut explore)?);
    }
    let final_window = FinalWindow::compute(&per_episode, plan.window_size as usize)?;
    Ok(SeedResult {
        condition: *condition,
        per_episode,
        final_window,
    })
}

/// Subset of the experiment matrix to execute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSelection {
    pub pairings: Vec<Pairing>,
    pub regimes: Vec<SpeedRegime>,
}

impl Default for MatrixSelection {
    fn default() -> Self {
        MatrixSelection {
            pairings: Pairing::ALL.to_vec(),
            regimes: SpeedRegime::ALL.to_vec(),
        }
    }
}

/// Execution knobs for [`run_matrix_with`].
#[derive(Debug, Clone, Default)]
pub struct MatrixOptions {
    pub selection: MatrixSelection,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Print one line per finished run on stderr.
    pub progress: bool,
}

pub type CellKey = (Pairing, SpeedRegime, u64);

/// Seed results keyed by `(pairing, regime, seed)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatrixResult {
    pub runs: BTreeMap<CellKey, SeedResult>,
}

impl MatrixResult {
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn insert(&mut self, result: SeedResult) {
        let c = result.condition;
        self.runs.insert((c.pairing(), c.speed_regime, c.seed), result);
    }

    pub fn get(&self, pairing: Pairing, regime: SpeedRegime, seed: u64) -> Option<&SeedResult> {
        self.runs.get(&(pairing, regime, seed))
    }

    /// Seed results of one cell, ascending by seed.
    pub fn cell(&self, pairing: Pairing, regime: SpeedRegime) -> Vec<&SeedResult> {
        self.runs
            .range((pairing, regime, 0)..=(pairing, regime, u64::MAX))
            .map(|(_, r)| r)
            .collect()
    }

    pub fn regimes(&self) -> Vec<SpeedRegime> {
        let mut r: Vec<_> = self.runs.keys().map(|k| k.1).collect();
        r.sort();
        r.dedup();
        r
    }

    /// Seed-level final-window values of `metric`, ascending by seed.
    pub fn seed_values(&self, pairing: Pairing, regime: SpeedRegime, metric: Metric) -> Vec<(u64, f64)> {
        self.cell(pairing, regime)
            .into_iter()
            .map(|r| (r.condition.seed, r.final_window.get(metric)))
            .collect()
    }
}

/// Runs every selected condition for every seed of `plan` on all cores.
pub fn run_matrix(plan: &RunPlan) -> Result<MatrixResult> {
    run_matrix_with(plan, &MatrixOptions::default())
}

pub fn run_matrix_with(plan: &RunPlan, options: &MatrixOptions) -> Result<MatrixResult> {
    plan.validate()?;
    let jobs: Vec<Condition> = options
        .selection
        .pairings
        .iter()
        .flat_map(|&p| {
            options
                .selection
                .regimes
                .iter()
                .flat_map(move |&r| plan.seeds.iter().map(move |&s| Condition::new(p, r, s)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::contract(format!("worker pool: {e}")))?;
    let results: Vec<Result<SeedResult>> = pool.install(|| {
        jobs.par_iter()
            .map(|c| {
                let r = run_training(c, plan)?;
                if options.progress {
                    let w = r.final_window;
                    eprintln!(
                        "done {} {} seed={} length={:.2} predator={:.2} prey={:.2}",
                        c.pairing(),
                        c.speed_regime,
                        c.seed,
                        w.length,
                        w.predator_reward,
                        w.prey_reward
                    );
                }
                Ok(r)
            })
            .collect()
    });
    let mut out = MatrixResult::default();
    for r in results {
        out.insert(r?);
    }
    Ok(out)
}
