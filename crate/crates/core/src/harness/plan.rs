use serde::{Deserialize, Serialize};

use super::condition::{Pairing, SpeedRegime};
use crate::env::GridConfig;
use crate::error::{Error, Result};
use crate::learners::{EpsilonSchedule, LearnerParams};

/// Per-condition parameter overrides. `None` selectors match every value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionOverride {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Pairing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<SpeedRegime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shaping_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_decay_episodes: Option<u64>,
}

impl ConditionOverride {
    fn matches(&self, pairing: Pairing, regime: SpeedRegime) -> bool {
        self.pairing.is_none_or(|p| p == pairing) && self.regime.is_none_or(|r| r == regime)
    }
}

/// How episode start states are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementMode {
    /// A fresh uniform placement every episode.
    #[default]
    PerEpisode,
    /// One uniform placement per seed, reused by every episode of the run.
    PerSeed,
}

fn yes() -> bool {
    true
}

/// Everything a training run needs besides its condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub episodes: u64,
    pub seeds: Vec<u64>,
    pub window_size: u64,
    pub grid: GridConfig,
    pub learner: LearnerParams,
    pub schedule: EpsilonSchedule,
    #[serde(default)]
    pub placement: PlacementMode,
    /// Whether reported team rewards include shaping terms.
    #[serde(default = "yes")]
    pub metric_includes_shaping: bool,
    #[serde(default)]
    pub overrides: Vec<ConditionOverride>,
}

impl Default for RunPlan {
    fn default() -> Self {
        RunPlan {
            episodes: 40_000,
            seeds: (0..10).collect(),
            window_size: 10_000,
            grid: GridConfig::default(),
            learner: LearnerParams::default(),
            schedule: EpsilonSchedule::default(),
            placement: PlacementMode::default(),
            metric_includes_shaping: true,
            overrides: Vec::new(),
        }
    }
}

/// Parameters of one condition after overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedParams {
    pub grid: GridConfig,
    pub learner: LearnerParams,
    pub schedule: EpsilonSchedule,
}

impl RunPlan {
    pub fn validate(&self) -> Result<()> {
        if self.episodes < 1 {
            return Err(Error::config("episodes", "must be >= 1"));
        }
        if self.window_size < 1 || self.window_size > self.episodes {
            return Err(Error::config(
                "window_size",
                format!("must satisfy 1 <= window_size <= episodes ({}), got {}", self.episodes, self.window_size),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must list at least one seed"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("seeds", "must be pairwise distinct"));
        }
        if self.grid.gamma != self.learner.gamma {
            return Err(Error::config("gamma", "environment and learner discount must agree"));
        }
        self.grid.validate()?;
        self.learner.validate()?;
        self.schedule.validate()?;
        for pairing in Pairing::ALL {
            for regime in SpeedRegime::ALL {
                if !self.overrides.is_empty() {
                    let r = self.resolve(pairing, regime);
                    r.grid.validate()?;
                    r.learner.validate()?;
                    r.schedule.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Applies matching overrides in declaration order.
    pub fn resolve(&self, pairing: Pairing, regime: SpeedRegime) -> ResolvedParams {
        let mut out = ResolvedParams {
            grid: self.grid.clone(),
            learner: self.learner,
            schedule: self.schedule,
        };
        for o in self.overrides.iter().filter(|o| o.matches(pairing, regime)) {
            if let Some(v) = o.alpha {
                out.learner.alpha = v;
            }
            if let Some(v) = o.gamma {
                out.learner.gamma = v;
                out.grid.gamma = v;
            }
            if let Some(v) = o.shaping_factor {
                out.grid.shaping_factor = v;
            }
            if let Some(v) = o.epsilon_start {
                out.schedule.start = v;
            }
            if let Some(v) = o.epsilon_end {
                out.schedule.end = v;
            }
            if let Some(v) = o.epsilon_decay_episodes {
                out.schedule.decay_horizon = v;
            }
        }
        out
    }
}
