use rand::Rng;

use super::qtable::QTable;
use super::schedule::LearnerParams;
use super::select::epsilon_greedy;
use crate::env::{Action, StateKey};
use crate::error::{Error, Result};

const ALL_ACTIONS: [u32; Action::COUNT] = [0, 1, 2, 3, 4];

/// Epsilon-greedy choice over the five per-agent actions; greedy ties are
/// broken uniformly at random.
pub fn iql_select<R: Rng + ?Sized>(q: &QTable, s: StateKey, epsilon: f64, rng: &mut R) -> Action {
    let a = epsilon_greedy(q.row(s), &ALL_ACTIONS, epsilon, rng);
    Action::ALL[a as usize]
}

/// One tabular Q-learning step. `reward` must already include shaping. The
/// bootstrap term is zero when `terminal` is set.
pub fn iql_update(
    q: &mut QTable,
    s: StateKey,
    a: Action,
    reward: f64,
    s_next: StateKey,
    terminal: bool,
    params: &LearnerParams,
) -> Result<()> {
    if !reward.is_finite() {
        return Err(Error::contract(format!("non-finite reward {reward}")));
    }
    let bootstrap = if terminal { 0.0 } else { q.max(s_next) };
    let target = reward + params.gamma * bootstrap;
    let entry = &mut q.row_mut(s)[a.index()];
    *entry += params.alpha * (target - *entry);
    Ok(())
}

/// One Q-table per agent, each over that agent's own five actions.
#[derive(Debug, Clone)]
pub struct IndependentLearner {
    tables: Vec<QTable>,
}

impl IndependentLearner {
    pub fn new(members: usize) -> Self {
        IndependentLearner {
            tables: (0..members).map(|_| QTable::new(Action::COUNT)).collect(),
        }
    }

    pub fn members(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&self, member: usize) -> &QTable {
        &self.tables[member]
    }

    pub fn tables(&self) -> &[QTable] {
        &self.tables
    }

    pub fn select<R: Rng + ?Sized>(&self, member: usize, s: StateKey, epsilon: f64, rng: &mut R) -> Action {
        iql_select(&self.tables[member], s, epsilon, rng)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        member: usize,
        s: StateKey,
        a: Action,
        reward: f64,
        s_next: StateKey,
        terminal: bool,
        params: &LearnerParams,
    ) -> Result<()> {
        iql_update(&mut self.tables[member], s, a, reward, s_next, terminal, params)
    }
}
