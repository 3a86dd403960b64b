use rand::Rng;

/// Uniformly picks one of the maximizing candidates of `row` (all candidates
/// tie when the row is absent). Consumes randomness only on ties.
#[inline]
pub(crate) fn argmax_uniform<R: Rng + ?Sized>(row: Option<&[f64]>, candidates: &[u32], rng: &mut R) -> u32 {
    debug_assert!(!candidates.is_empty());
    let Some(row) = row else {
        return pick(candidates, rng);
    };
    let mut best = f64::NEG_INFINITY;
    let mut ties = 0u32;
    for &c in candidates {
        let v = row[c as usize];
        if v > best {
            best = v;
            ties = 1;
        } else if v == best {
            ties += 1;
        }
    }
    if ties == 1 {
        return candidates
            .iter()
            .copied()
            .find(|&c| row[c as usize] == best)
            .expect("maximizer exists");
    }
    let mut nth = rng.gen_range(0..ties);
    for &c in candidates {
        if row[c as usize] == best {
            if nth == 0 {
                return c;
            }
            nth -= 1;
        }
    }
    unreachable!("tie index within tie count")
}

#[inline]
pub(crate) fn pick<R: Rng + ?Sized>(candidates: &[u32], rng: &mut R) -> u32 {
    if candidates.len() == 1 {
        candidates[0]
    } else {
        candidates[rng.gen_range(0..candidates.len())]
    }
}

/// Epsilon-greedy over `candidates`.
#[inline]
pub(crate) fn epsilon_greedy<R: Rng + ?Sized>(
    row: Option<&[f64]>,
    candidates: &[u32],
    epsilon: f64,
    rng: &mut R,
) -> u32 {
    if rng.gen::<f64>() < epsilon {
        pick(candidates, rng)
    } else {
        argmax_uniform(row, candidates, rng)
    }
}
