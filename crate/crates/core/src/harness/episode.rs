use rand::Rng;
use serde::{Deserialize, Serialize};

use super::condition::Paradigm;
use crate::env::{
    reset, step_in_place, Action, GridConfig, StateCodec, StateKey, Team, TeamRewardMode, Transition,
};
use crate::error::Result;
use crate::learners::{encode_joint, CentralizedLearner, IndependentLearner, LearnerParams};

/// Per-episode measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub length: u32,
    /// Team aggregate of (base + shaping) returns.
    pub predator_reward: f64,
    pub prey_reward: f64,
}

/// The three reported metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    EpisodeLength,
    PredatorReward,
    PreyReward,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::EpisodeLength, Metric::PredatorReward, Metric::PreyReward];

    pub fn of(self, m: &EpisodeMetrics) -> f64 {
        match self {
            Metric::EpisodeLength => f64::from(m.length),
            Metric::PredatorReward => m.predator_reward,
            Metric::PreyReward => m.prey_reward,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::EpisodeLength => "episode_length",
            Metric::PredatorReward => "predator_reward",
            Metric::PreyReward => "prey_reward",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::EpisodeLength => "Episode Length",
            Metric::PredatorReward => "Predator Reward",
            Metric::PreyReward => "Prey Reward",
        }
    }
}

/// Learner(s) driving one team.
#[derive(Debug, Clone)]
pub enum TeamLearner {
    Independent(IndependentLearner),
    Centralized(CentralizedLearner),
}

impl TeamLearner {
    pub fn new(paradigm: Paradigm, members: usize) -> Result<Self> {
        Ok(match paradigm {
            Paradigm::Iql => TeamLearner::Independent(IndependentLearner::new(members)),
            Paradigm::Cql => TeamLearner::Centralized(CentralizedLearner::new(members)?),
        })
    }

    pub fn paradigm(&self) -> Paradigm {
        match self {
            TeamLearner::Independent(_) => Paradigm::Iql,
            TeamLearner::Centralized(_) => Paradigm::Cql,
        }
    }

    /// Total explicitly stored entries across this team's tables.
    pub fn entry_count(&self) -> usize {
        match self {
            TeamLearner::Independent(l) => l.tables().iter().map(|t| t.len()).sum(),
            TeamLearner::Centralized(l) => l.table().len(),
        }
    }

    fn act<R: Rng + ?Sized>(&self, key: StateKey, alive: &[bool], epsilon: f64, rng: &mut R, out: &mut [Action]) {
        self.act_with(key, alive, epsilon, CqlExecution::Joint, rng, out)
    }

    fn act_with<R: Rng + ?Sized>(
        &self,
        key: StateKey,
        alive: &[bool],
        epsilon: f64,
        execution: CqlExecution,
        rng: &mut R,
        out: &mut [Action],
    ) {
        match self {
            TeamLearner::Independent(l) => {
                for (m, slot) in out.iter_mut().enumerate() {
                    *slot = if alive[m] { l.select(m, key, epsilon, rng) } else { Action::Stay };
                }
            }
            TeamLearner::Centralized(l) => match execution {
                CqlExecution::Joint => {
                    l.select(key, dead_mask(alive), epsilon, rng, out);
                }
                CqlExecution::Marginalized => {
                    let mask = dead_mask(alive);
                    for (m, slot) in out.iter_mut().enumerate() {
                        *slot = if alive[m] { l.marginal_greedy(key, m, mask, rng) } else { Action::Stay };
                    }
                }
            },
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn learn<O: EpisodeObserver + ?Sized>(
        &mut self,
        team: Team,
        first_id: usize,
        tr: &TeamTransition<'_>,
        params: &LearnerParams,
        observer: &mut O,
    ) -> Result<()> {
        match self {
            TeamLearner::Independent(l) => {
                for m in 0..tr.actions.len() {
                    if !tr.alive_before[m] {
                        continue;
                    }
                    let done = tr.terminal || !tr.alive_after[m];
                    let reward = tr.rewards[m];
                    l.update(m, tr.key, tr.actions[m], reward, tr.next_key, done, params)?;
                    observer.independent_update(first_id + m, reward);
                }
            }
            TeamLearner::Centralized(l) => {
                if !tr.alive_before.iter().any(|&a| a) {
                    return Ok(());
                }
                let reward: f64 = tr
                    .rewards
                    .iter()
                    .zip(tr.alive_before)
                    .filter(|(_, &alive)| alive)
                    .map(|(r, _)| r)
                    .sum();
                let joint = encode_joint(tr.actions);
                l.update(tr.key, joint, reward, tr.next_key, dead_mask(tr.alive_after), tr.terminal, params)?;
                observer.centralized_update(team, reward);
            }
        }
        Ok(())
    }
}

struct TeamTransition<'a> {
    key: StateKey,
    next_key: StateKey,
    actions: &'a [Action],
    rewards: &'a [f64],
    alive_before: &'a [bool],
    alive_after: &'a [bool],
    terminal: bool,
}

fn dead_mask(alive: &[bool]) -> u32 {
    alive
        .iter()
        .enumerate()
        .filter(|(_, &a)| !a)
        .fold(0, |mask, (m, _)| mask | (1 << m))
}

/// Both teams' learners for one run.
#[derive(Debug, Clone)]
pub struct Learners {
    pub predators: TeamLearner,
    pub prey: TeamLearner,
}

impl Learners {
    pub fn new(predator: Paradigm, prey: Paradigm, config: &GridConfig) -> Result<Self> {
        Ok(Learners {
            predators: TeamLearner::new(predator, config.n_predators)?,
            prey: TeamLearner::new(prey, config.n_prey)?,
        })
    }
}

/// Hooks into an episode's learning updates; all methods default to no-ops.
pub trait EpisodeObserver {
    /// Called after each environment transition with per-agent base rewards
    /// and shaping terms.
    fn transition(&mut self, _base: &[f64], _shaping: &[f64], _alive_before: &[bool]) {}
    /// Reward fed to agent `agent`'s independent update.
    fn independent_update(&mut self, _agent: usize, _reward: f64) {}
    /// Scalar reward fed to `team`'s centralized update.
    fn centralized_update(&mut self, _team: Team, _reward: f64) {}
}

impl EpisodeObserver for () {}

/// How a centralized team picks actions outside training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CqlExecution {
    /// Greedy joint argmax, as in training.
    #[default]
    Joint,
    /// Each member acts on its own marginalized Q-values.
    Marginalized,
}

/// Fixed inputs of an episode loop.
#[derive(Debug, Clone)]
pub struct EpisodeContext {
    pub grid: GridConfig,
    pub params: LearnerParams,
    /// Whether reported team rewards include the shaping terms.
    pub metric_includes_shaping: bool,
    codec: StateCodec,
}

impl EpisodeContext {
    pub fn new(grid: GridConfig, params: LearnerParams) -> Result<Self> {
        grid.validate()?;
        params.validate()?;
        let codec = StateCodec::new(&grid);
        Ok(EpisodeContext {
            grid,
            params,
            metric_includes_shaping: true,
            codec,
        })
    }

    pub fn with_metric_shaping(mut self, include: bool) -> Self {
        self.metric_includes_shaping = include;
        self
    }

    pub fn codec(&self) -> &StateCodec {
        &self.codec
    }
}

/// Plays one training episode: reset from `placement`, then select, step,
/// compose shaped rewards and update every learner until termination.
/// Exploration and tie-breaking draw from `explore`.
pub fn run_episode<P: Rng + ?Sized, E: Rng + ?Sized>(
    ctx: &EpisodeContext,
    learners: &mut Learners,
    epsilon: f64,
    placement: &mut P,
    explore: &mut E,
) -> Result<EpisodeMetrics> {
    run_episode_observed(ctx, learners, epsilon, placement, explore, &mut ())
}

pub fn run_episode_observed<P: Rng + ?Sized, E: Rng + ?Sized, O: EpisodeObserver + ?Sized>(
    ctx: &EpisodeContext,
    learners: &mut Learners,
    epsilon: f64,
    placement: &mut P,
    explore: &mut E,
    observer: &mut O,
) -> Result<EpisodeMetrics> {
    let grid = &ctx.grid;
    let np = grid.n_predators;
    let n = grid.n_agents();
    let mut state = reset(grid, placement)?;
    let mut key = ctx.codec.encode(&state);
    let mut actions = vec![Action::Stay; n];
    let mut rewards = vec![0.0; n];
    let mut returns = vec![0.0; n];
    let mut alive = vec![true; n];
    let mut alive_after = vec![true; n];
    let mut tr = Transition::default();

    loop {
        for (slot, a) in alive.iter_mut().zip(&state.agents) {
            *slot = a.alive;
        }
        learners.predators.act(key, &alive[..np], epsilon, explore, &mut actions[..np]);
        learners.prey.act(key, &alive[np..], epsilon, explore, &mut actions[np..]);

        step_in_place(&mut state, &actions, grid, &mut tr)?;
        let next_key = ctx.codec.encode(&state);
        let terminal = tr.terminal();
        observer.transition(&tr.base_rewards, &tr.shaping, &tr.alive_before);
        for i in 0..n {
            rewards[i] = tr.base_rewards[i] + tr.shaping[i];
            returns[i] += if ctx.metric_includes_shaping { rewards[i] } else { tr.base_rewards[i] };
            alive_after[i] = state.agents[i].alive;
        }

        let predators = TeamTransition {
            key,
            next_key,
            actions: &actions[..np],
            rewards: &rewards[..np],
            alive_before: &tr.alive_before[..np],
            alive_after: &alive_after[..np],
            terminal,
        };
        learners.predators.learn(Team::Predator, 0, &predators, &ctx.params, observer)?;
        let prey = TeamTransition {
            key,
            next_key,
            actions: &actions[np..],
            rewards: &rewards[np..],
            alive_before: &tr.alive_before[np..],
            alive_after: &alive_after[np..],
            terminal,
        };
        learners.prey.learn(Team::Prey, np, &prey, &ctx.params, observer)?;

        key = next_key;
        if terminal {
            break;
        }
    }

    Ok(metrics(grid, state.timestep, &returns))
}

fn metrics(grid: &GridConfig, length: u32, returns: &[f64]) -> EpisodeMetrics {
    let np = grid.n_predators;
    let aggregate = |slice: &[f64]| match grid.team_reward_mode {
        TeamRewardMode::TeamSum => slice.iter().sum::<f64>(),
        TeamRewardMode::TeamMean => slice.iter().sum::<f64>() / slice.len() as f64,
    };
    EpisodeMetrics {
        length,
        predator_reward: aggregate(&returns[..np]),
        prey_reward: aggregate(&returns[np..]),
    }
}

/// Plays one greedy episode without learning. Centralized teams act per
/// `execution`; ties break on `rng`.
pub fn run_evaluation_episode<P: Rng + ?Sized, R: Rng + ?Sized>(
    ctx: &EpisodeContext,
    learners: &Learners,
    execution: CqlExecution,
    placement: &mut P,
    rng: &mut R,
) -> Result<EpisodeMetrics> {
    let grid = &ctx.grid;
    let np = grid.n_predators;
    let n = grid.n_agents();
    let mut state = reset(grid, placement)?;
    let mut actions = vec![Action::Stay; n];
    let mut returns = vec![0.0; n];
    let mut alive = vec![true; n];
    let mut tr = Transition::default();
    loop {
        let key = ctx.codec.encode(&state);
        for (slot, a) in alive.iter_mut().zip(&state.agents) {
            *slot = a.alive;
        }
        learners.predators.act_with(key, &alive[..np], 0.0, execution, rng, &mut actions[..np]);
        learners.prey.act_with(key, &alive[np..], 0.0, execution, rng, &mut actions[np..]);
        step_in_place(&mut state, &actions, grid, &mut tr)?;
        for i in 0..n {
            returns[i] += tr.base_rewards[i];
            if ctx.metric_includes_shaping {
                returns[i] += tr.shaping[i];
            }
        }
        if tr.terminal() {
            break;
        }
    }
    Ok(metrics(grid, state.timestep, &returns))
}
