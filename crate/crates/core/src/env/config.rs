use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::state::Cell;
use crate::error::{Error, Result};

/// How per-agent episode returns are folded into a team metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TeamRewardMode {
    TeamSum,
    #[default]
    TeamMean,
}

/// Which opponents enter an agent's distance potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialForm {
    /// Distance to the nearest alive opponent.
    #[default]
    NearestOpponent,
    /// Summed distance to every alive opponent.
    SumOverOpponents,
}

/// Static description of the gridworld and its reward constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub width: u16,
    pub height: u16,
    pub obstacles: BTreeSet<Cell>,
    pub n_predators: usize,
    pub n_prey: usize,
    pub max_timesteps: u32,
    pub stamina_max: u32,
    /// Stamina regained by an alive agent choosing STAY, capped at `stamina_max`.
    pub regen_on_stay: u32,
    /// When false, movement is free and stamina stays pinned at `stamina_max`.
    pub stamina_limited: bool,
    pub predator_speed: u8,
    pub prey_speed: u8,
    pub capture_reward: f64,
    pub prey_capture_penalty: f64,
    pub predator_step_cost: f64,
    pub shaping_factor: f64,
    pub potential_form: PotentialForm,
    /// When false, prey receive no shaping term.
    pub shape_prey: bool,
    pub gamma: f64,
    pub team_reward_mode: TeamRewardMode,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            width: 8,
            height: 8,
            obstacles: BTreeSet::new(),
            n_predators: 2,
            n_prey: 2,
            max_timesteps: 200,
            stamina_max: 5,
            regen_on_stay: 1,
            stamina_limited: true,
            predator_speed: 1,
            prey_speed: 1,
            capture_reward: 100.0,
            prey_capture_penalty: -100.0,
            predator_step_cost: -5.0,
            shaping_factor: 1.0,
            potential_form: PotentialForm::NearestOpponent,
            shape_prey: true,
            gamma: 0.90,
            team_reward_mode: TeamRewardMode::TeamMean,
        }
    }
}

impl GridConfig {
    pub fn n_agents(&self) -> usize {
        self.n_predators + self.n_prey
    }

    pub fn n_cells(&self) -> usize {
        usize::from(self.width) * usize::from(self.height)
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    pub fn is_obstacle(&self, cell: Cell) -> bool {
        !self.obstacles.is_empty() && self.obstacles.contains(&cell)
    }

    pub fn free_cells(&self) -> Vec<Cell> {
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| Cell::new(x, y)))
            .filter(|c| !self.is_obstacle(*c))
            .collect()
    }

    /// Checks every structural invariant. Errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.width < 2 {
            return Err(Error::config("width", format!("must be >= 2, got {}", self.width)));
        }
        if self.height < 2 {
            return Err(Error::config("height", format!("must be >= 2, got {}", self.height)));
        }
        if let Some(c) = self.obstacles.iter().find(|c| !self.in_bounds(**c)) {
            return Err(Error::config("obstacles", format!("cell {c} lies outside the grid")));
        }
        if self.obstacles.len() >= self.n_cells() {
            return Err(Error::config("obstacles", "must leave at least one free cell"));
        }
        if self.n_predators < 1 {
            return Err(Error::config("n_predators", "must be >= 1"));
        }
        if self.n_prey < 1 {
            return Err(Error::config("n_prey", "must be >= 1"));
        }
        if self.max_timesteps < 1 {
            return Err(Error::config("max_timesteps", "must be >= 1"));
        }
        if self.stamina_max < 1 {
            return Err(Error::config("stamina_max", "must be >= 1"));
        }
        for (key, speed) in [("predator_speed", self.predator_speed), ("prey_speed", self.prey_speed)] {
            if !(1..=2).contains(&speed) {
                return Err(Error::config(key, format!("must be 1 or 2, got {speed}")));
            }
        }
        for (key, v) in [
            ("capture_reward", self.capture_reward),
            ("prey_capture_penalty", self.prey_capture_penalty),
            ("predator_step_cost", self.predator_step_cost),
        ] {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        if !(self.shaping_factor.is_finite() && self.shaping_factor >= 0.0) {
            return Err(Error::config("shaping_factor", "must be finite and >= 0"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config("gamma", format!("must satisfy 0 < gamma < 1, got {}", self.gamma)));
        }
        if super::key::StateCodec::radix_product(self).is_none() {
            return Err(Error::config(
                "n_predators",
                "joint state space too large to index with a 64-bit key",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let c = GridConfig::default();
        assert_eq!((c.width, c.height), (8, 8));
        assert_eq!((c.n_predators, c.n_prey), (2, 2));
        assert_eq!(c.stamina_max, 5);
        assert_eq!(c.max_timesteps, 200);
        assert_eq!(c.capture_reward, 100.0);
        assert_eq!(c.prey_capture_penalty, -100.0);
        assert_eq!(c.predator_step_cost, -5.0);
        assert_eq!(c.shaping_factor, 1.0);
        assert_eq!(c.gamma, 0.9);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |f: fn(&mut GridConfig)| {
            let mut c = GridConfig::default();
            f(&mut c);
            c.validate().unwrap_err()
        };
        assert!(bad(|c| c.width = 1).to_string().contains("width"));
        assert!(bad(|c| c.gamma = 1.5).to_string().contains("0 < gamma < 1"));
        assert!(bad(|c| c.shaping_factor = -1.0).to_string().contains("shaping_factor"));
        assert!(bad(|c| c.n_prey = 0).to_string().contains("n_prey"));
        assert!(bad(|c| c.prey_speed = 3).to_string().contains("prey_speed"));
        assert!(bad(|c| {
            c.width = 2;
            c.height = 2;
            c.obstacles = [(0, 0), (0, 1), (1, 0), (1, 1)]
                .into_iter()
                .map(|(x, y)| Cell::new(x, y))
                .collect();
        })
        .to_string()
        .contains("obstacles"));
    }
}
