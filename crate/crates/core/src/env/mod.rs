//! Predator-prey gridworld with micro-stepped movement, stamina and
//! distance-potential shaping.

mod config;
mod dynamics;
mod key;
mod shaping;
mod state;

pub use config::{GridConfig, PotentialForm, TeamRewardMode};
pub use dynamics::{
    apply_joint_action, base_rewards, is_terminal, reset, step_in_place, StepOutcome, TerminalReason, Transition,
};
pub use key::{AgentKeyFields, StateCodec, StateKey};
pub use shaping::{potential, shaping_reward};
pub use state::{manhattan_distance, Action, AgentState, Cell, Team, WorldState};
