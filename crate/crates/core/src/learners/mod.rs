//! Sparse tabular value storage and the independent / centralized learners.

mod cql;
mod iql;
mod qtable;
mod schedule;
mod select;

pub use cql::{
    cql_select_joint, cql_update, decode_joint, decode_joint_into, encode_joint, marginalize,
    marginalize_with_support, CentralizedLearner, JointSpace,
};
pub use iql::{iql_select, iql_update, IndependentLearner};
pub use qtable::QTable;
pub use schedule::{epsilon_at, EpsilonSchedule, LearnerParams};
