use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential exploration decay from `start` to `end` over `decay_horizon`
/// episodes, constant afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_horizon: u64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            start: 1.0,
            end: 0.1,
            decay_horizon: 23_000,
        }
    }
}

impl EpsilonSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.end > 0.0 && self.end <= 1.0) {
            return Err(Error::config("epsilon_end", format!("must satisfy 0 < epsilon_end <= 1, got {}", self.end)));
        }
        if !(self.start >= self.end && self.start <= 1.0) {
            return Err(Error::config(
                "epsilon_start",
                format!("must satisfy epsilon_end <= epsilon_start <= 1, got {}", self.start),
            ));
        }
        Ok(())
    }

    /// `max(end, start * r^t)` with `r = (end/start)^(1/decay_horizon)`.
    pub fn epsilon_at(&self, episode: u64) -> f64 {
        if episode >= self.decay_horizon {
            return self.end;
        }
        let rate = (self.end / self.start).powf(1.0 / self.decay_horizon as f64);
        (self.start * rate.powf(episode as f64)).max(self.end)
    }
}

/// Free-function form of [`EpsilonSchedule::epsilon_at`].
pub fn epsilon_at(schedule: &EpsilonSchedule, episode: u64) -> f64 {
    schedule.epsilon_at(episode)
}

/// Step size and discount of the tabular update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams { alpha: 0.25, gamma: 0.90 }
    }
}

impl LearnerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config("alpha", format!("must satisfy 0 < alpha <= 1, got {}", self.alpha)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config("gamma", format!("must satisfy 0 < gamma < 1, got {}", self.gamma)));
        }
        Ok(())
    }
}
