use serde::{Deserialize, Serialize};

use super::cliff::{cliffs_delta, EffectMagnitude};
use super::holm::holm_bonferroni;
use super::wilcoxon::{wilcoxon_signed_rank_exact, PairedSample};
use crate::error::{Error, Result};
use crate::harness::{MatrixResult, Metric, Pairing, SpeedRegime};

/// One pairwise comparison within a regime x metric family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    pub config_a: Pairing,
    pub config_b: Pairing,
    pub regime: SpeedRegime,
    pub metric: Metric,
    /// Number of paired seeds.
    pub n: usize,
    pub p_raw: f64,
    pub p_adjusted: f64,
    /// Cliff's delta of A over B.
    pub delta: f64,
    pub magnitude: EffectMagnitude,
    pub reject_at_005: bool,
    /// Every paired difference was zero.
    pub degenerate: bool,
}

/// The six unordered pairings of the four configurations, in row order.
pub fn comparison_pairs() -> [(Pairing, Pairing); 6] {
    let p = Pairing::ALL;
    [(p[0], p[1]), (p[0], p[2]), (p[0], p[3]), (p[1], p[2]), (p[1], p[3]), (p[2], p[3])]
}

/// Seed-aligned final-window values of all four pairings for one regime.
fn aligned_values(results: &MatrixResult, regime: SpeedRegime, metric: Metric) -> Result<Vec<Vec<f64>>> {
    let mut seeds: Option<Vec<u64>> = None;
    let mut out = Vec::with_capacity(4);
    for pairing in Pairing::ALL {
        let cell = results.seed_values(pairing, regime, metric);
        if cell.is_empty() {
            return Err(Error::Incomplete(format!("{}/{}", pairing.name(), regime.name())));
        }
        let these: Vec<u64> = cell.iter().map(|(s, _)| *s).collect();
        match &seeds {
            None => seeds = Some(these),
            Some(expected) if *expected != these => {
                return Err(Error::contract(format!(
                    "seed sets differ within regime {}: {:?} vs {:?} for {}",
                    regime.name(),
                    expected,
                    these,
                    pairing.name()
                )));
            }
            Some(_) => {}
        }
        out.push(cell.into_iter().map(|(_, v)| v).collect());
    }
    Ok(out)
}

/// All six paired tests of one regime x metric family, Holm-corrected
/// within the family.
pub fn compare_configs(results: &MatrixResult, regime: SpeedRegime, metric: Metric) -> Result<Vec<PairedTest>> {
    let values = aligned_values(results, regime, metric)?;
    let index = |p: Pairing| Pairing::ALL.iter().position(|&q| q == p).expect("pairing listed");
    let mut tests = Vec::with_capacity(6);
    for (a, b) in comparison_pairs() {
        let (x, y) = (&values[index(a)], &values[index(b)]);
        let w = wilcoxon_signed_rank_exact(&PairedSample::new(x.clone(), y.clone())?)?;
        let delta = cliffs_delta(x, y)?;
        tests.push(PairedTest {
            config_a: a,
            config_b: b,
            regime,
            metric,
            n: x.len(),
            p_raw: w.p_two_sided,
            p_adjusted: w.p_two_sided,
            delta,
            magnitude: EffectMagnitude::of(delta),
            reject_at_005: false,
            degenerate: w.degenerate,
        });
    }
    let raw: Vec<f64> = tests.iter().map(|t| t.p_raw).collect();
    let holm = holm_bonferroni(&raw)?;
    for (t, (adj, rej)) in tests.iter_mut().zip(holm.adjusted.into_iter().zip(holm.reject)) {
        t.p_adjusted = adj;
        t.reject_at_005 = rej;
    }
    Ok(tests)
}

/// Every family for `regimes`: regime-major, then metric in reporting order.
pub fn compare_all(results: &MatrixResult, regimes: &[SpeedRegime]) -> Result<Vec<PairedTest>> {
    let mut out = Vec::with_capacity(regimes.len() * 18);
    for &regime in regimes {
        for metric in Metric::ALL {
            out.extend(compare_configs(results, regime, metric)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Condition, FinalWindow, SeedResult};

    fn synthetic(seeds: u64, value: impl Fn(Pairing, u64) -> f64) -> MatrixResult {
        let mut m = MatrixResult::default();
        for p in Pairing::ALL {
            for s in 0..seeds {
                let v = value(p, s);
                m.insert(SeedResult {
                    condition: Condition::new(p, SpeedRegime::EqualBase, s),
                    per_episode: Vec::new(),
                    final_window: FinalWindow {
                        length: v,
                        predator_reward: -v,
                        prey_reward: v,
                    },
                });
            }
        }
        m
    }

    #[test]
    fn six_tests_per_family() {
        let m = synthetic(10, |p, s| p.id() as f64 + s as f64 * 0.1);
        let t = compare_configs(&m, SpeedRegime::EqualBase, Metric::EpisodeLength).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(compare_all(&m, &[SpeedRegime::EqualBase]).unwrap().len(), 18);
    }

    #[test]
    fn dominant_config_hits_floor() {
        let m = synthetic(10, |p, s| if p == Pairing::IqlIql { 100.0 + s as f64 } else { s as f64 * (p.id() as f64 + 1.0) / 5.0 });
        let t = compare_configs(&m, SpeedRegime::EqualBase, Metric::EpisodeLength).unwrap();
        for test in t.iter().filter(|t| t.config_a == Pairing::IqlIql) {
            assert_eq!(test.p_raw, 0.001953125);
            assert_eq!(test.delta, 1.0);
            assert!(test.p_adjusted >= test.p_raw);
        }
    }

    #[test]
    fn mismatched_seeds_rejected() {
        let mut m = synthetic(3, |_, s| s as f64);
        m.runs.remove(&(Pairing::CqlCql, SpeedRegime::EqualBase, 2));
        assert!(matches!(
            compare_configs(&m, SpeedRegime::EqualBase, Metric::PreyReward),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn missing_regime_is_incomplete() {
        let m = synthetic(3, |_, s| s as f64);
        assert!(matches!(
            compare_configs(&m, SpeedRegime::PreyFast, Metric::PreyReward),
            Err(Error::Incomplete(_))
        ));
    }
}
