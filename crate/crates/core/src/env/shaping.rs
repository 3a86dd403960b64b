//! Distance potentials and the potential-based shaping term.

use super::config::{GridConfig, PotentialForm};
use super::state::{manhattan_distance, Team, WorldState};

/// Distance potential of `agent_id` in `state`.
///
/// Predators carry `-factor * d`, prey `+factor * d`, where `d` is the distance
/// to the nearest alive opponent (or the summed distance under
/// [`PotentialForm::SumOverOpponents`]). Dead agents and agents without an
/// alive opponent have potential 0, so shaping vanishes once pursuit is over.
pub fn potential(state: &WorldState, agent_id: usize, config: &GridConfig) -> f64 {
    let agent = &state.agents[agent_id];
    if !agent.alive || config.shaping_factor == 0.0 {
        return 0.0;
    }
    let opponents = state
        .agents
        .iter()
        .filter(|o| o.alive && o.team != agent.team)
        .map(|o| manhattan_distance(agent.position, o.position));
    let distance = match config.potential_form {
        PotentialForm::NearestOpponent => match opponents.min() {
            Some(d) => d,
            None => return 0.0,
        },
        PotentialForm::SumOverOpponents => opponents.sum(),
    };
    let sign = match agent.team {
        Team::Predator => -1.0,
        Team::Prey => 1.0,
    };
    sign * config.shaping_factor * f64::from(distance)
}

/// `gamma * phi_next - phi_prev`.
#[inline]
pub fn shaping_reward(phi_prev: f64, phi_next: f64, gamma: f64) -> f64 {
    gamma * phi_next - phi_prev
}
