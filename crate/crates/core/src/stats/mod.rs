//! Seed-level paired statistics: exact Wilcoxon, Cliff's delta, Holm.

mod cliff;
mod compare;
mod holm;
mod wilcoxon;

pub use cliff::{cliffs_delta, EffectMagnitude};
pub use compare::{compare_all, compare_configs, comparison_pairs, PairedTest};
pub use holm::{holm_bonferroni, holm_bonferroni_at, HolmResult, ALPHA};
pub use wilcoxon::{wilcoxon_signed_rank_exact, PairedSample, WilcoxonResult, MAX_EXACT_N};
