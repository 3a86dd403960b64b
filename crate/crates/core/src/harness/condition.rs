use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::env::GridConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Paradigm {
    /// One learner per agent over its own actions.
    Iql,
    /// One learner per team over the team's joint actions.
    Cql,
}

impl Paradigm {
    pub fn label(self) -> &'static str {
        match self {
            Paradigm::Iql => "IQL",
            Paradigm::Cql => "CQL",
        }
    }
}

/// Assignment of a paradigm to each role, predator first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    IqlIql,
    IqlCql,
    CqlIql,
    CqlCql,
}

impl Pairing {
    /// Canonical report order.
    pub const ALL: [Pairing; 4] = [Pairing::IqlIql, Pairing::IqlCql, Pairing::CqlIql, Pairing::CqlCql];

    pub fn new(predator: Paradigm, prey: Paradigm) -> Self {
        match (predator, prey) {
            (Paradigm::Iql, Paradigm::Iql) => Pairing::IqlIql,
            (Paradigm::Iql, Paradigm::Cql) => Pairing::IqlCql,
            (Paradigm::Cql, Paradigm::Iql) => Pairing::CqlIql,
            (Paradigm::Cql, Paradigm::Cql) => Pairing::CqlCql,
        }
    }

    pub fn predator(self) -> Paradigm {
        match self {
            Pairing::IqlIql | Pairing::IqlCql => Paradigm::Iql,
            Pairing::CqlIql | Pairing::CqlCql => Paradigm::Cql,
        }
    }

    pub fn prey(self) -> Paradigm {
        match self {
            Pairing::IqlIql | Pairing::CqlIql => Paradigm::Iql,
            Pairing::IqlCql | Pairing::CqlCql => Paradigm::Cql,
        }
    }

    /// Stable numeric id used when deriving random streams.
    pub fn id(self) -> u64 {
        self as u64
    }

    /// Machine name, e.g. `iql-cql`.
    pub fn name(self) -> &'static str {
        match self {
            Pairing::IqlIql => "iql-iql",
            Pairing::IqlCql => "iql-cql",
            Pairing::CqlIql => "cql-iql",
            Pairing::CqlCql => "cql-cql",
        }
    }

    /// Display label, e.g. `IQL-CQL`.
    pub fn label(self) -> String {
        format!("{}-{}", self.predator().label(), self.prey().label())
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pairing::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown pairing `{s}` (expected iql-iql, iql-cql, cql-iql or cql-cql)"))
    }
}

/// Kinematic condition: which role moves two cells per timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpeedRegime {
    #[serde(rename = "base")]
    EqualBase,
    #[serde(rename = "pred-fast")]
    PredatorFast,
    #[serde(rename = "prey-fast")]
    PreyFast,
}

impl SpeedRegime {
    pub const ALL: [SpeedRegime; 3] = [SpeedRegime::EqualBase, SpeedRegime::PredatorFast, SpeedRegime::PreyFast];

    /// `(predator speed, prey speed)`.
    pub fn speeds(self) -> (u8, u8) {
        match self {
            SpeedRegime::EqualBase => (1, 1),
            SpeedRegime::PredatorFast => (2, 1),
            SpeedRegime::PreyFast => (1, 2),
        }
    }

    pub fn id(self) -> u64 {
        self as u64
    }

    pub fn name(self) -> &'static str {
        match self {
            SpeedRegime::EqualBase => "base",
            SpeedRegime::PredatorFast => "pred-fast",
            SpeedRegime::PreyFast => "prey-fast",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            SpeedRegime::EqualBase => "Equal base speed",
            SpeedRegime::PredatorFast => "Predator speed advantage",
            SpeedRegime::PreyFast => "Prey speed advantage",
        }
    }
}

impl fmt::Display for SpeedRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpeedRegime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpeedRegime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown regime `{s}` (expected base, pred-fast or prey-fast)"))
    }
}

/// One experiment cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub predator_paradigm: Paradigm,
    pub prey_paradigm: Paradigm,
    pub speed_regime: SpeedRegime,
    pub seed: u64,
}

impl Condition {
    pub fn new(pairing: Pairing, speed_regime: SpeedRegime, seed: u64) -> Self {
        Condition {
            predator_paradigm: pairing.predator(),
            prey_paradigm: pairing.prey(),
            speed_regime,
            seed,
        }
    }

    pub fn pairing(&self) -> Pairing {
        Pairing::new(self.predator_paradigm, self.prey_paradigm)
    }

    /// `grid` with the regime's speeds applied.
    pub fn grid(&self, grid: &GridConfig) -> GridConfig {
        let (predator_speed, prey_speed) = self.speed_regime.speeds();
        GridConfig {
            predator_speed,
            prey_speed,
            ..grid.clone()
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/seed{}", self.pairing(), self.speed_regime, self.seed)
    }
}
