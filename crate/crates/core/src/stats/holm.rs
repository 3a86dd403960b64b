use crate::error::{Error, Result};

/// Family-wise level used for reject flags.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct HolmResult {
    /// Adjusted p-values in the input order.
    pub adjusted: Vec<f64>,
    pub reject: Vec<bool>,
}

/// Holm step-down adjustment with reject flags at [`ALPHA`].
pub fn holm_bonferroni(p_values: &[f64]) -> Result<HolmResult> {
    holm_bonferroni_at(p_values, ALPHA)
}

pub fn holm_bonferroni_at(p_values: &[f64], alpha: f64) -> Result<HolmResult> {
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::contract(format!("p-value {p} outside [0, 1]")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));

    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        let scaled = ((m - rank) as f64 * p_values[i]).min(1.0);
        running = running.max(scaled);
        adjusted[i] = running;
    }
    // step-down: stop at the first sorted p that misses its threshold
    let mut reject = vec![false; m];
    for (rank, &i) in order.iter().enumerate() {
        if p_values[i] <= alpha / (m - rank) as f64 {
            reject[i] = true;
        } else {
            break;
        }
    }
    Ok(HolmResult { adjusted, reject })
}
