use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::GridConfig;
use super::shaping::{potential, shaping_reward};
use super::state::{Action, AgentState, Team, WorldState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminalReason {
    None,
    AllPreyCaptured,
    Timeout,
}

/// Result of one joint transition.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next_state: WorldState,
    pub per_agent_base_reward: Vec<f64>,
    pub per_agent_shaping: Vec<f64>,
    /// `(predator id, prey id)` in the order the captures happened.
    pub captures_this_step: Vec<(usize, usize)>,
    pub terminal: bool,
    pub terminal_reason: TerminalReason,
}

/// Reusable per-step buffers for [`step_in_place`].
#[derive(Debug, Clone, Default)]
pub struct Transition {
    pub base_rewards: Vec<f64>,
    pub shaping: Vec<f64>,
    pub captures: Vec<(usize, usize)>,
    /// Which agents were alive when the step began.
    pub alive_before: Vec<bool>,
    pub terminal_reason: Option<TerminalReason>,
    phi_before: Vec<f64>,
}

impl Transition {
    pub fn terminal(&self) -> bool {
        matches!(
            self.terminal_reason,
            Some(TerminalReason::AllPreyCaptured | TerminalReason::Timeout)
        )
    }

    pub fn reason(&self) -> TerminalReason {
        self.terminal_reason.unwrap_or(TerminalReason::None)
    }
}

pub fn is_terminal(state: &WorldState, config: &GridConfig) -> (bool, TerminalReason) {
    if state.alive_count(Team::Prey) == 0 {
        (true, TerminalReason::AllPreyCaptured)
    } else if state.timestep >= config.max_timesteps {
        (true, TerminalReason::Timeout)
    } else {
        (false, TerminalReason::None)
    }
}

/// Places every agent on a distinct free cell drawn uniformly from `rng`.
///
/// Predators take ids `0..n_predators`, prey the remaining ids. Speeds come
/// from the config; stamina starts full.
pub fn reset<R: Rng + ?Sized>(config: &GridConfig, rng: &mut R) -> Result<WorldState> {
    let mut free = config.free_cells();
    let n = config.n_agents();
    if free.len() < n {
        return Err(Error::config(
            "obstacles",
            format!("grid has {} free cells but {} agents need placing", free.len(), n),
        ));
    }
    // partial Fisher-Yates
    for i in 0..n {
        let j = rng.gen_range(i..free.len());
        free.swap(i, j);
    }
    let agents = free[..n]
        .iter()
        .enumerate()
        .map(|(id, &position)| {
            let team = if id < config.n_predators { Team::Predator } else { Team::Prey };
            AgentState {
                id,
                team,
                position,
                stamina: config.stamina_max,
                speed: match team {
                    Team::Predator => config.predator_speed,
                    Team::Prey => config.prey_speed,
                },
                alive: true,
            }
        })
        .collect();
    Ok(WorldState { agents, timestep: 0 })
}

/// Per-agent base rewards for a transition that started in `before`.
///
/// Alive predators pay the step cost and earn the capture reward per prey they
/// caught; captured prey take the capture penalty; everyone else gets 0.
pub fn base_rewards(before: &WorldState, captures: &[(usize, usize)], config: &GridConfig) -> Result<Vec<f64>> {
    let alive: Vec<bool> = before.agents.iter().map(|a| a.alive).collect();
    let mut out = vec![0.0; alive.len()];
    fill_base_rewards(&before.agents, &alive, captures, config, &mut out)?;
    Ok(out)
}

fn fill_base_rewards(
    agents: &[AgentState],
    alive_before: &[bool],
    captures: &[(usize, usize)],
    config: &GridConfig,
    out: &mut [f64],
) -> Result<()> {
    let any_prey = agents
        .iter()
        .zip(alive_before)
        .any(|(a, &alive)| a.team == Team::Prey && alive);
    if !any_prey {
        return Err(Error::contract("base rewards requested after every prey was captured"));
    }
    for ((r, a), &alive) in out.iter_mut().zip(agents).zip(alive_before) {
        *r = if a.team == Team::Predator && alive {
            config.predator_step_cost
        } else {
            0.0
        };
    }
    for &(pred, prey) in captures {
        out[pred] += config.capture_reward;
        out[prey] += config.prey_capture_penalty;
    }
    Ok(())
}

/// Pure form of [`step_in_place`].
pub fn apply_joint_action(state: &WorldState, actions: &[Action], config: &GridConfig) -> Result<StepOutcome> {
    let mut next = state.clone();
    let mut tr = Transition::default();
    step_in_place(&mut next, actions, config, &mut tr)?;
    let reason = tr.reason();
    Ok(StepOutcome {
        next_state: next,
        per_agent_base_reward: tr.base_rewards,
        per_agent_shaping: tr.shaping,
        captures_this_step: tr.captures,
        terminal: reason != TerminalReason::None,
        terminal_reason: reason,
    })
}

/// Advances `state` by one timestep under `actions` (one per agent, indexed by
/// id; entries for dead agents are ignored).
///
/// Movement is resolved in rounds: every agent's first micro-step in id order,
/// then every second micro-step. A micro-step costs one stamina and is
/// cancelled when stamina is exhausted or the target is off-grid, an obstacle,
/// or held by an alive teammate. A predator stepping onto an alive prey
/// captures it; a prey stepping onto a predator is cancelled. STAY moves
/// nothing and regenerates stamina.
pub fn step_in_place(
    state: &mut WorldState,
    actions: &[Action],
    config: &GridConfig,
    out: &mut Transition,
) -> Result<()> {
    let n = state.agents.len();
    if actions.len() != n {
        return Err(Error::contract(format!(
            "expected {n} actions (one per agent), got {}",
            actions.len()
        )));
    }
    if is_terminal(state, config).0 {
        return Err(Error::contract("cannot act on a terminal state"));
    }

    out.captures.clear();
    out.alive_before.clear();
    out.alive_before.extend(state.agents.iter().map(|a| a.alive));
    out.phi_before.clear();
    for i in 0..n {
        out.phi_before.push(potential(state, i, config));
    }

    for (agent, &action) in state.agents.iter_mut().zip(actions) {
        if agent.alive && action == Action::Stay && config.stamina_limited {
            agent.stamina = (agent.stamina + config.regen_on_stay).min(config.stamina_max);
        }
    }

    let rounds = state.agents.iter().map(|a| a.speed).max().unwrap_or(0);
    for round in 0..rounds {
        for i in 0..n {
            let action = actions[i];
            let agent = &state.agents[i];
            if !agent.alive || action == Action::Stay || round >= agent.speed {
                continue;
            }
            if config.stamina_limited && agent.stamina == 0 {
                continue;
            }
            let Some(target) = agent.position.offset(action, config.width, config.height) else {
                continue;
            };
            if config.is_obstacle(target) {
                continue;
            }
            let team = agent.team;
            match state.occupant(target) {
                Some(j) if state.agents[j].team == team => continue,
                Some(j) => {
                    if team == Team::Prey {
                        continue;
                    }
                    state.agents[j].alive = false;
                    out.captures.push((i, j));
                }
                None => {}
            }
            let agent = &mut state.agents[i];
            agent.position = target;
            if config.stamina_limited {
                agent.stamina -= 1;
            }
        }
    }
    state.timestep += 1;

    out.base_rewards.resize(n, 0.0);
    fill_base_rewards(&state.agents, &out.alive_before, &out.captures, config, &mut out.base_rewards)?;

    out.shaping.clear();
    for i in 0..n {
        let agent = &state.agents[i];
        let shaped = out.alive_before[i] && (agent.team == Team::Predator || config.shape_prey);
        out.shaping.push(if shaped {
            shaping_reward(out.phi_before[i], potential(state, i, config), config.gamma)
        } else {
            0.0
        });
    }

    let (_, reason) = is_terminal(state, config);
    out.terminal_reason = Some(reason);
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::env::state::Cell;

    fn agent(id: usize, team: Team, x: u16, y: u16, speed: u8) -> AgentState {
        AgentState { id, team, position: Cell::new(x, y), stamina: 5, speed, alive: true }
    }

    fn world(agents: Vec<AgentState>) -> WorldState {
        WorldState { agents, timestep: 0 }
    }

    fn four_agents() -> WorldState {
        world(vec![
            agent(0, Team::Predator, 0, 0, 1),
            agent(1, Team::Predator, 7, 7, 1),
            agent(2, Team::Prey, 3, 3, 1),
            agent(3, Team::Prey, 5, 1, 1),
        ])
    }

    #[test]
    fn all_stay_is_a_position_fixed_point() {
        let cfg = GridConfig::default();
        let mut s = four_agents();
        s.agents[0].stamina = 2;
        s.agents[3].stamina = 5;
        let out = apply_joint_action(&s, &[Action::Stay; 4], &cfg).unwrap();
        for (a, b) in s.agents.iter().zip(&out.next_state.agents) {
            assert_eq!(a.position, b.position);
            assert_eq!(b.stamina, (a.stamina + cfg.regen_on_stay).min(cfg.stamina_max));
        }
        assert_eq!(out.next_state.timestep, 1);
        assert!(!out.terminal);
        assert_eq!(out.terminal_reason, TerminalReason::None);
    }

    #[test]
    fn double_speed_moves_two_cells_for_two_stamina() {
        let cfg = GridConfig::default();
        let mut s = four_agents();
        s.agents[0].speed = 2;
        let acts = [Action::Right, Action::Stay, Action::Stay, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        assert_eq!(out.next_state.agents[0].position, Cell::new(2, 0));
        assert_eq!(out.next_state.agents[0].stamina, 3);
    }

    #[test]
    fn low_stamina_degrades_gracefully() {
        let cfg = GridConfig::default();
        let mut s = four_agents();
        s.agents[0].speed = 2;
        s.agents[0].stamina = 1;
        let acts = [Action::Right, Action::Stay, Action::Stay, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        assert_eq!(out.next_state.agents[0].position, Cell::new(1, 0));
        assert_eq!(out.next_state.agents[0].stamina, 0);
        let again = apply_joint_action(&out.next_state, &acts, &cfg).unwrap();
        assert_eq!(again.next_state.agents[0].position, Cell::new(1, 0));
    }

    #[test]
    fn capture_by_predator_move() {
        let cfg = GridConfig::default();
        let s = world(vec![
            agent(0, Team::Predator, 2, 3, 1),
            agent(1, Team::Predator, 7, 7, 1),
            agent(2, Team::Prey, 3, 3, 1),
            agent(3, Team::Prey, 0, 7, 1),
        ]);
        let acts = [Action::Right, Action::Stay, Action::Stay, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        assert_eq!(out.captures_this_step, vec![(0, 2)]);
        assert!(!out.next_state.agents[2].alive);
        assert_eq!(out.next_state.agents[0].position, Cell::new(3, 3));
        assert_eq!(out.per_agent_base_reward, vec![95.0, -5.0, -100.0, 0.0]);
        assert!(!out.terminal);
    }

    #[test]
    fn last_capture_terminates() {
        let cfg = GridConfig::default();
        let mut s = world(vec![
            agent(0, Team::Predator, 2, 3, 1),
            agent(1, Team::Predator, 7, 7, 1),
            agent(2, Team::Prey, 3, 3, 1),
            agent(3, Team::Prey, 0, 7, 1),
        ]);
        s.agents[3].alive = false;
        let out = apply_joint_action(&s, &[Action::Right, Action::Stay, Action::Stay, Action::Stay], &cfg).unwrap();
        assert!(out.terminal);
        assert_eq!(out.terminal_reason, TerminalReason::AllPreyCaptured);
        // dead prey earns nothing, predator shaping ends at potential 0
        assert_eq!(out.per_agent_base_reward[3], 0.0);
        assert_eq!(out.per_agent_shaping[3], 0.0);
        assert!((out.per_agent_shaping[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prey_cannot_enter_predator_cell() {
        let cfg = GridConfig::default();
        let s = world(vec![
            agent(0, Team::Predator, 2, 3, 1),
            agent(1, Team::Predator, 7, 7, 1),
            agent(2, Team::Prey, 3, 3, 1),
            agent(3, Team::Prey, 0, 7, 1),
        ]);
        let acts = [Action::Stay, Action::Stay, Action::Left, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        assert!(out.captures_this_step.is_empty());
        assert_eq!(out.next_state.agents[2].position, Cell::new(3, 3));
        assert_eq!(out.next_state.agents[2].stamina, 5);
    }

    #[test]
    fn teammates_block_and_round_robin_order_matters() {
        let cfg = GridConfig::default();
        // predator 0 wants predator 1's cell; 1 moves away first only in round order
        let s = world(vec![
            agent(0, Team::Predator, 0, 0, 1),
            agent(1, Team::Predator, 1, 0, 1),
            agent(2, Team::Prey, 7, 7, 1),
            agent(3, Team::Prey, 0, 7, 1),
        ]);
        let acts = [Action::Right, Action::Right, Action::Stay, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        // agent 0 resolves first and is blocked, then agent 1 moves
        assert_eq!(out.next_state.agents[0].position, Cell::new(0, 0));
        assert_eq!(out.next_state.agents[0].stamina, 5);
        assert_eq!(out.next_state.agents[1].position, Cell::new(2, 0));
    }

    #[test]
    fn fast_predator_captures_on_second_micro_step() {
        let cfg = GridConfig::default();
        let mut s = world(vec![
            agent(0, Team::Predator, 0, 0, 2),
            agent(1, Team::Predator, 7, 7, 2),
            agent(2, Team::Prey, 2, 0, 1),
            agent(3, Team::Prey, 0, 7, 1),
        ]);
        s.agents[2].speed = 1;
        let acts = [Action::Right, Action::Stay, Action::Stay, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        assert_eq!(out.captures_this_step, vec![(0, 2)]);
        assert_eq!(out.next_state.agents[0].position, Cell::new(2, 0));
    }

    #[test]
    fn walls_and_obstacles_cancel_without_cost() {
        let mut cfg = GridConfig::default();
        cfg.obstacles.insert(Cell::new(1, 0));
        let s = four_agents();
        let acts = [Action::Right, Action::Stay, Action::Stay, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        assert_eq!(out.next_state.agents[0].position, Cell::new(0, 0));
        assert_eq!(out.next_state.agents[0].stamina, 5);
        let acts = [Action::Up, Action::Stay, Action::Stay, Action::Stay];
        let out = apply_joint_action(&s, &acts, &cfg).unwrap();
        assert_eq!(out.next_state.agents[0].position, Cell::new(0, 0));
    }

    #[test]
    fn contract_violations() {
        let cfg = GridConfig::default();
        let s = four_agents();
        assert!(matches!(apply_joint_action(&s, &[Action::Stay; 3], &cfg), Err(Error::Contract(_))));
        let mut done = s.clone();
        done.timestep = cfg.max_timesteps;
        assert!(matches!(apply_joint_action(&done, &[Action::Stay; 4], &cfg), Err(Error::Contract(_))));
        let mut dead = s.clone();
        dead.agents[2].alive = false;
        dead.agents[3].alive = false;
        assert!(matches!(base_rewards(&dead, &[], &cfg), Err(Error::Contract(_))));
    }

    #[test]
    fn base_reward_examples() {
        let cfg = GridConfig::default();
        let s = four_agents();
        assert_eq!(base_rewards(&s, &[], &cfg).unwrap(), vec![-5.0, -5.0, 0.0, 0.0]);
        assert_eq!(base_rewards(&s, &[(0, 2)], &cfg).unwrap(), vec![95.0, -5.0, -100.0, 0.0]);
    }

    #[test]
    fn terminal_examples() {
        let cfg = GridConfig::default();
        let mut s = four_agents();
        assert_eq!(is_terminal(&s, &cfg), (false, TerminalReason::None));
        s.agents[2].alive = false;
        s.timestep = 200;
        assert_eq!(is_terminal(&s, &cfg), (true, TerminalReason::Timeout));
        s.agents[3].alive = false;
        s.timestep = 12;
        assert_eq!(is_terminal(&s, &cfg), (true, TerminalReason::AllPreyCaptured));
    }

    #[test]
    fn reset_examples() {
        let cfg = GridConfig::default();
        let a = reset(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = reset(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.agents.len(), 4);
        let mut cells: Vec<_> = a.agents.iter().map(|x| x.position).collect();
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 4);
        assert!(a.agents.iter().all(|x| x.stamina == 5 && x.alive));
        assert_eq!(a.timestep, 0);

        let tiny = GridConfig { width: 2, height: 2, ..GridConfig::default() };
        let full = reset(&tiny, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(full.agents.len(), 4);
        let mut blocked = tiny.clone();
        blocked.obstacles.insert(Cell::new(0, 0));
        assert!(matches!(reset(&blocked, &mut ChaCha8Rng::seed_from_u64(1)), Err(Error::Config { .. })));
    }

    #[test]
    fn zero_shaping_factor_zeroes_every_shaping_entry() {
        let cfg = GridConfig { shaping_factor: 0.0, ..GridConfig::default() };
        let s = four_agents();
        let out = apply_joint_action(&s, &[Action::Right, Action::Up, Action::Left, Action::Down], &cfg).unwrap();
        assert!(out.per_agent_shaping.iter().all(|&f| f == 0.0));
    }
}
