use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of nonzero differences handled by exact enumeration.
pub const MAX_EXACT_N: usize = 25;

/// Index-aligned paired observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PairedSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::contract("paired sample must be nonempty"));
        }
        if x.len() != y.len() {
            return Err(Error::contract(format!(
                "paired sample lengths differ ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::contract("paired sample contains non-finite values"));
        }
        Ok(PairedSample { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Swaps the roles of `x` and `y`.
    pub fn swapped(&self) -> Self {
        PairedSample {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub p_two_sided: f64,
    /// Rank sum of positive differences.
    pub w_plus: f64,
    /// Rank sum of negative differences.
    pub w_minus: f64,
    /// Differences left after dropping zeros.
    pub n_nonzero: usize,
    /// Every difference was zero; `p_two_sided` is 1 by convention.
    pub degenerate: bool,
}

/// Exact two-sided Wilcoxon signed-rank test.
///
/// Zero differences are dropped and tied magnitudes get midranks. The null
/// distribution of W+ is counted exactly over all `2^m` sign assignments of
/// the observed (mid)ranks; `p = min(1, 2 * P(W+ <= min(W+, W-)))`.
pub fn wilcoxon_signed_rank_exact(sample: &PairedSample) -> Result<WilcoxonResult> {
    let mut diffs: Vec<f64> = sample
        .x
        .iter()
        .zip(&sample.y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let m = diffs.len();
    if m == 0 {
        return Ok(WilcoxonResult {
            p_two_sided: 1.0,
            w_plus: 0.0,
            w_minus: 0.0,
            n_nonzero: 0,
            degenerate: true,
        });
    }
    if m > MAX_EXACT_N {
        return Err(Error::contract(format!(
            "exact Wilcoxon enumeration supports at most {MAX_EXACT_N} nonzero differences, got {m}"
        )));
    }
    diffs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));

    // doubled midranks keep every rank sum integral
    let mut ranks2 = vec![0u32; m];
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        let r2 = (i + 1 + j + 1) as u32;
        ranks2[i..=j].iter_mut().for_each(|r| *r = r2);
        i = j + 1;
    }
    let w_plus2: u32 = diffs.iter().zip(&ranks2).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total2: u32 = ranks2.iter().sum();
    let w_minus2 = total2 - w_plus2;
    let w_obs2 = w_plus2.min(w_minus2) as usize;

    // counts[s]: sign assignments whose doubled W+ equals s
    let mut counts = vec![0u64; total2 as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in &ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    let tail: u64 = counts[..=w_obs2].iter().sum();
    let p = (2.0 * tail as f64 / (1u64 << m) as f64).min(1.0);
    Ok(WilcoxonResult {
        p_two_sided: p,
        w_plus: f64::from(w_plus2) / 2.0,
        w_minus: f64::from(w_minus2) / 2.0,
        n_nonzero: m,
        degenerate: false,
    })
}
