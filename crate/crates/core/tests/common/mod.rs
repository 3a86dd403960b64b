//! Reference implementations used as oracles by the integration and
//! acceptance tests. Written from the definitions, sharing no code with the
//! library routines they check.
#![allow(dead_code)]

use gridpursuit::env::{
    step_in_place, Action, AgentState, Cell, GridConfig, StateCodec, StateKey, Team, Transition, WorldState,
};
use rand::Rng;

/// Exact two-sided signed-rank p by walking all 2^m sign vectors.
pub fn brute_force_wilcoxon(x: &[f64], y: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let m = d.len();
    if m == 0 {
        return 1.0;
    }
    // rank_i = #{|d_j| < |d_i|} + (#{|d_j| == |d_i|} + 1) / 2
    let ranks: Vec<f64> = d
        .iter()
        .map(|di| {
            let below = d.iter().filter(|dj| dj.abs() < di.abs()).count() as f64;
            let equal = d.iter().filter(|dj| dj.abs() == di.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let total: f64 = ranks.iter().sum();
    let w_obs = w_plus.min(total - w_plus);
    let mut at_most = 0u64;
    for mask in 0u64..(1 << m) {
        let w: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= w_obs + 1e-9 {
            at_most += 1;
        }
    }
    (2.0 * at_most as f64 / (1u64 << m) as f64).min(1.0)
}

/// Uniformly random action for every agent.
pub fn random_actions<R: Rng>(n: usize, rng: &mut R) -> Vec<Action> {
    (0..n).map(|_| Action::ALL[rng.gen_range(0..Action::COUNT)]).collect()
}

/// Plays one random-policy episode from `state`, handing every transition to
/// `visit` with the pre-step state.
pub fn random_episode<R: Rng>(
    mut state: WorldState,
    config: &GridConfig,
    rng: &mut R,
    mut visit: impl FnMut(&WorldState, &[Action], &Transition, &WorldState),
) -> WorldState {
    let mut tr = Transition::default();
    loop {
        let before = state.clone();
        let actions = random_actions(state.agents.len(), rng);
        step_in_place(&mut state, &actions, config, &mut tr).unwrap();
        visit(&before, &actions, &tr, &state);
        if tr.terminal() {
            return state;
        }
    }
}

/// Optimal action values of a lone speed-1 predator (id 0) chasing a prey
/// (id 1) that never moves, with free movement and no shaping. Returned per
/// `(predator cell, prey cell)` state as its key and five action values.
pub fn static_prey_q_star(config: &GridConfig) -> Vec<(StateKey, [f64; 5])> {
    assert_eq!((config.n_predators, config.n_prey), (1, 1));
    assert!(!config.stamina_limited && config.shaping_factor == 0.0);
    let (w, h) = (i32::from(config.width), i32::from(config.height));
    let cells: Vec<(i32, i32)> = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).collect();
    let states: Vec<((i32, i32), (i32, i32))> = cells
        .iter()
        .flat_map(|&p| cells.iter().filter(move |&&q| q != p).map(move |&q| (p, q)))
        .collect();
    let index = |s: ((i32, i32), (i32, i32))| states.iter().position(|&t| t == s).unwrap();
    let deltas = [(0, -1), (0, 1), (-1, 0), (1, 0), (0, 0)];
    let step = config.predator_step_cost;
    let mut v = vec![0.0f64; states.len()];
    let mut q = vec![[0.0f64; 5]; states.len()];
    for _ in 0..10_000 {
        let mut delta = 0.0f64;
        for (i, &(p, prey)) in states.iter().enumerate() {
            for (a, (dx, dy)) in deltas.iter().enumerate() {
                let t = (p.0 + dx, p.1 + dy);
                let inside = t.0 >= 0 && t.0 < w && t.1 >= 0 && t.1 < h;
                let next = if inside { t } else { p };
                q[i][a] = if next == prey {
                    step + config.capture_reward
                } else {
                    step + config.gamma * v[index((next, prey))]
                };
            }
            let best = q[i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max((best - v[i]).abs());
            v[i] = best;
        }
        if delta < 1e-13 {
            break;
        }
    }
    let codec = StateCodec::new(config);
    states
        .iter()
        .zip(q)
        .map(|(&(p, prey), row)| {
            let agent = |id, team, (x, y): (i32, i32)| AgentState {
                id,
                team,
                position: Cell { x: x as u16, y: y as u16 },
                stamina: config.stamina_max,
                speed: 1,
                alive: true,
            };
            let world = WorldState {
                agents: vec![agent(0, Team::Predator, p), agent(1, Team::Prey, prey)],
                timestep: 0,
            };
            (codec.encode(&world), row)
        })
        .collect()
}
