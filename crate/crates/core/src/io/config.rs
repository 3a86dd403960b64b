use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::env::{Cell, GridConfig, PotentialForm, TeamRewardMode};
use crate::error::{Error, Result};
use crate::harness::{ConditionOverride, MatrixSelection, Pairing, PlacementMode, RunPlan, SpeedRegime};
use crate::learners::{EpsilonSchedule, LearnerParams};

/// Window used when a document leaves `window_size` unset and has at least
/// this many episodes.
pub const DEFAULT_WINDOW: u64 = 10_000;

/// Flat, declarative experiment document. Every key is optional; an empty
/// document describes the reference configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentFile {
    pub episodes: u64,
    pub seeds: Vec<u64>,
    /// Defaults to `min(10000, episodes)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_size: Option<u64>,

    pub width: u16,
    pub height: u16,
    /// `[x, y]` pairs.
    pub obstacles: Vec<[u16; 2]>,
    pub n_predators: usize,
    pub n_prey: usize,
    pub max_timesteps: u32,
    pub stamina_max: u32,
    pub regen_on_stay: u32,
    pub stamina_limited: bool,
    pub capture_reward: f64,
    pub prey_capture_penalty: f64,
    pub predator_step_cost: f64,
    pub shaping_factor: f64,
    pub potential_form: PotentialForm,
    pub shape_prey: bool,
    pub team_reward_mode: TeamRewardMode,

    pub gamma: f64,
    pub alpha: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_episodes: u64,

    pub placement: PlacementMode,
    pub metric_includes_shaping: bool,
    pub pairings: Vec<Pairing>,
    pub regimes: Vec<SpeedRegime>,
    /// 0 uses every core.
    pub workers: usize,

    pub output_dir: PathBuf,
    pub curve_stride: u64,
    pub curve_window: u64,

    #[serde(rename = "override", skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<ConditionOverride>,
}

impl Default for ExperimentFile {
    fn default() -> Self {
        ExperimentFile {
            window_size: None,
            ..ExperimentFile::from_experiment(&Experiment::default())
        }
    }
}

/// Output and execution settings that sit beside the [`RunPlan`].
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub plan: RunPlan,
    pub selection: MatrixSelection,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub curve_stride: u64,
    pub curve_window: u64,
}

impl Default for Experiment {
    fn default() -> Self {
        Experiment {
            plan: RunPlan::default(),
            selection: MatrixSelection::default(),
            workers: 0,
            output_dir: PathBuf::from("results"),
            curve_stride: 100,
            curve_window: 500,
        }
    }
}

impl ExperimentFile {
    pub fn from_experiment(e: &Experiment) -> Self {
        let p = &e.plan;
        let g = &p.grid;
        ExperimentFile {
            episodes: p.episodes,
            seeds: p.seeds.clone(),
            window_size: Some(p.window_size),
            width: g.width,
            height: g.height,
            obstacles: g.obstacles.iter().map(|c| [c.x, c.y]).collect(),
            n_predators: g.n_predators,
            n_prey: g.n_prey,
            max_timesteps: g.max_timesteps,
            stamina_max: g.stamina_max,
            regen_on_stay: g.regen_on_stay,
            stamina_limited: g.stamina_limited,
            capture_reward: g.capture_reward,
            prey_capture_penalty: g.prey_capture_penalty,
            predator_step_cost: g.predator_step_cost,
            shaping_factor: g.shaping_factor,
            potential_form: g.potential_form,
            shape_prey: g.shape_prey,
            team_reward_mode: g.team_reward_mode,
            gamma: p.learner.gamma,
            alpha: p.learner.alpha,
            epsilon_start: p.schedule.start,
            epsilon_end: p.schedule.end,
            epsilon_decay_episodes: p.schedule.decay_horizon,
            placement: p.placement,
            metric_includes_shaping: p.metric_includes_shaping,
            pairings: e.selection.pairings.clone(),
            regimes: e.selection.regimes.clone(),
            workers: e.workers,
            output_dir: e.output_dir.clone(),
            curve_stride: e.curve_stride,
            curve_window: e.curve_window,
            overrides: p.overrides.clone(),
        }
    }

    /// Builds and validates the experiment this document describes.
    pub fn into_experiment(self) -> Result<Experiment> {
        let window_size = self.window_size.unwrap_or(DEFAULT_WINDOW.min(self.episodes));
        let grid = GridConfig {
            width: self.width,
            height: self.height,
            obstacles: self.obstacles.iter().map(|&[x, y]| Cell { x, y }).collect(),
            n_predators: self.n_predators,
            n_prey: self.n_prey,
            max_timesteps: self.max_timesteps,
            stamina_max: self.stamina_max,
            regen_on_stay: self.regen_on_stay,
            stamina_limited: self.stamina_limited,
            capture_reward: self.capture_reward,
            prey_capture_penalty: self.prey_capture_penalty,
            predator_step_cost: self.predator_step_cost,
            shaping_factor: self.shaping_factor,
            potential_form: self.potential_form,
            shape_prey: self.shape_prey,
            gamma: self.gamma,
            team_reward_mode: self.team_reward_mode,
            ..GridConfig::default()
        };
        if self.obstacles.len() != grid.obstacles.len() {
            return Err(Error::config("obstacles", "must not repeat a cell"));
        }
        let plan = RunPlan {
            episodes: self.episodes,
            seeds: self.seeds,
            window_size,
            grid,
            learner: LearnerParams {
                alpha: self.alpha,
                gamma: self.gamma,
            },
            schedule: EpsilonSchedule {
                start: self.epsilon_start,
                end: self.epsilon_end,
                decay_horizon: self.epsilon_decay_episodes,
            },
            placement: self.placement,
            metric_includes_shaping: self.metric_includes_shaping,
            overrides: self.overrides,
        };
        plan.validate()?;
        if self.pairings.is_empty() {
            return Err(Error::config("pairings", "must list at least one pairing"));
        }
        if self.regimes.is_empty() {
            return Err(Error::config("regimes", "must list at least one regime"));
        }
        if self.curve_stride < 1 {
            return Err(Error::config("curve_stride", "must be >= 1"));
        }
        if self.curve_window < 1 {
            return Err(Error::config("curve_window", "must be >= 1"));
        }
        Ok(Experiment {
            plan,
            selection: MatrixSelection {
                pairings: dedup(self.pairings),
                regimes: dedup(self.regimes),
            },
            workers: self.workers,
            output_dir: self.output_dir,
            curve_stride: self.curve_stride,
            curve_window: self.curve_window,
        })
    }
}

fn dedup<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

/// Parses a TOML document into an [`ExperimentFile`] without validating it.
pub fn parse_document(text: &str) -> Result<ExperimentFile> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))
}

/// Parses and validates an experiment document.
pub fn parse_config(text: &str) -> Result<Experiment> {
    parse_document(text)?.into_experiment()
}

/// Renders `experiment` as a document that [`parse_config`] maps back to it.
pub fn serialize_config(experiment: &Experiment) -> Result<String> {
    toml::to_string(&ExperimentFile::from_experiment(experiment))
        .map_err(|e| Error::Parse(format!("cannot serialize configuration: {e}")))
}
