use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cliff's delta: `(#{x_i > y_j} - #{x_i < y_j}) / (n m)`.
pub fn cliffs_delta(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::contract("cliffs_delta needs two nonempty samples"));
    }
    let mut score: i64 = 0;
    for a in x {
        for b in y {
            match a.partial_cmp(b) {
                Some(Ordering::Greater) => score += 1,
                Some(Ordering::Less) => score -= 1,
                Some(Ordering::Equal) => {}
                None => return Err(Error::contract("cliffs_delta got a NaN")),
            }
        }
    }
    Ok(score as f64 / (x.len() * y.len()) as f64)
}

/// Conventional magnitude labels for |delta| (cutoffs 0.147, 0.33, 0.474).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectMagnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl EffectMagnitude {
    pub fn of(delta: f64) -> Self {
        let d = delta.abs();
        if d < 0.147 {
            EffectMagnitude::Negligible
        } else if d < 0.33 {
            EffectMagnitude::Small
        } else if d < 0.474 {
            EffectMagnitude::Medium
        } else {
            EffectMagnitude::Large
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EffectMagnitude::Negligible => "negligible",
            EffectMagnitude::Small => "small",
            EffectMagnitude::Medium => "medium",
            EffectMagnitude::Large => "large",
        }
    }
}

impl fmt::Display for EffectMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
