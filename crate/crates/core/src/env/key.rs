use serde::{Deserialize, Serialize};

use super::config::GridConfig;
use super::state::{Cell, WorldState};

/// Opaque tabular index of a joint state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateKey(pub u64);

/// The per-agent fields a key carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentKeyFields {
    pub position: Cell,
    pub stamina: u32,
    pub alive: bool,
}

/// Mixed-radix packing of every agent's (position, stamina, alive).
///
/// Agent `i` occupies digit `i` with radix `cells * (stamina_max + 1) * 2`.
/// Timestep, team and speed are not part of the key: team and speed are fixed
/// per condition and timestep is excluded so states recur across steps.
#[derive(Debug, Clone)]
pub struct StateCodec {
    width: u64,
    stamina_levels: u64,
    agent_radix: u64,
    n_agents: usize,
}

impl StateCodec {
    pub fn new(config: &GridConfig) -> Self {
        let stamina_levels = u64::from(config.stamina_max) + 1;
        StateCodec {
            width: u64::from(config.width),
            stamina_levels,
            agent_radix: config.n_cells() as u64 * stamina_levels * 2,
            n_agents: config.n_agents(),
        }
    }

    /// Size of the key space, or `None` when it overflows `u64`.
    pub fn radix_product(config: &GridConfig) -> Option<u64> {
        let per_agent = (config.n_cells() as u64)
            .checked_mul(u64::from(config.stamina_max) + 1)?
            .checked_mul(2)?;
        (0..config.n_agents()).try_fold(1u64, |acc, _| acc.checked_mul(per_agent))
    }

    #[inline]
    pub fn encode(&self, state: &WorldState) -> StateKey {
        let mut key = 0u64;
        for agent in state.agents.iter().rev() {
            let pos = u64::from(agent.position.y) * self.width + u64::from(agent.position.x);
            let digit = (pos * self.stamina_levels + u64::from(agent.stamina)) * 2 + u64::from(agent.alive);
            key = key * self.agent_radix + digit;
        }
        StateKey(key)
    }

    pub fn decode(&self, key: StateKey) -> Vec<AgentKeyFields> {
        let mut rest = key.0;
        (0..self.n_agents)
            .map(|_| {
                let digit = rest % self.agent_radix;
                rest /= self.agent_radix;
                let alive = digit % 2 == 1;
                let stamina = (digit / 2) % self.stamina_levels;
                let pos = digit / 2 / self.stamina_levels;
                AgentKeyFields {
                    position: Cell::new((pos % self.width) as u16, (pos / self.width) as u16),
                    stamina: stamina as u32,
                    alive,
                }
            })
            .collect()
    }

    /// Alive flag of agent `index` without decoding the whole key.
    #[inline]
    pub fn is_alive(&self, key: StateKey, index: usize) -> bool {
        let digit = (key.0 / self.agent_radix.pow(index as u32)) % self.agent_radix;
        digit % 2 == 1
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::env::state::{AgentState, Team};

    fn tiny_config() -> GridConfig {
        GridConfig {
            width: 3,
            height: 3,
            n_predators: 1,
            n_prey: 1,
            stamina_max: 2,
            ..GridConfig::default()
        }
    }

    fn state(fields: &[(Cell, u32, bool)]) -> WorldState {
        WorldState {
            agents: fields
                .iter()
                .enumerate()
                .map(|(id, &(position, stamina, alive))| AgentState {
                    id,
                    team: if id == 0 { Team::Predator } else { Team::Prey },
                    position,
                    stamina,
                    speed: 1,
                    alive,
                })
                .collect(),
            timestep: 0,
        }
    }

    #[test]
    fn exhaustive_injectivity_on_3x3_two_agents() {
        let cfg = tiny_config();
        let codec = StateCodec::new(&cfg);
        let cells = cfg.free_cells();
        let mut seen = HashSet::new();
        let mut count = 0;
        for &p0 in &cells {
            for &p1 in &cells {
                for s0 in 0..=cfg.stamina_max {
                    for s1 in 0..=cfg.stamina_max {
                        for a0 in [false, true] {
                            for a1 in [false, true] {
                                let st = state(&[(p0, s0, a0), (p1, s1, a1)]);
                                let key = codec.encode(&st);
                                assert!(seen.insert(key), "collision for {st:?}");
                                let dec = codec.decode(key);
                                assert_eq!(dec[0].position, p0);
                                assert_eq!(dec[1].position, p1);
                                assert_eq!((dec[0].stamina, dec[1].stamina), (s0, s1));
                                assert_eq!((dec[0].alive, dec[1].alive), (a0, a1));
                                assert_eq!(codec.is_alive(key, 0), a0);
                                assert_eq!(codec.is_alive(key, 1), a1);
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(count, 9 * 9 * 3 * 3 * 4);
        assert_eq!(StateCodec::radix_product(&cfg), Some(54 * 54));
    }

    #[test]
    fn stamina_differs_timestep_does_not() {
        let codec = StateCodec::new(&tiny_config());
        let a = state(&[(Cell::new(0, 0), 2, true), (Cell::new(2, 2), 2, true)]);
        let mut b = a.clone();
        b.agents[1].stamina = 1;
        assert_ne!(codec.encode(&a), codec.encode(&b));
        let mut c = a.clone();
        c.timestep = 17;
        assert_eq!(codec.encode(&a), codec.encode(&c));
        assert_eq!(codec.encode(&a), codec.encode(&a.clone()));
    }

    #[test]
    fn default_grid_fits_in_u64() {
        assert!(StateCodec::radix_product(&GridConfig::default()).is_some());
    }
}
