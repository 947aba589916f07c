//! Synthetic trust networks for experiments that need a matrix of a given
//! size and density.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::TrustRecord;

fn check_capacity(m: usize, edges: usize) -> Result<()> {
    let cells = m.saturating_mul(m.saturating_sub(1));
    if edges > cells / 2 {
        return Err(Error::InvalidParameter(format!(
            "{edges} edges is too dense for {m} entities"
        )));
    }
    Ok(())
}

/// Rating on a 1..=5 scale divided by 5.
fn rating(rng: &mut ChaCha8Rng, bias: i32) -> f64 {
    (rng.gen_range(1..=5) + bias).clamp(1, 5) as f64 / 5.0
}

/// `edges` distinct off-diagonal pairs drawn uniformly, with five-level values.
pub fn uniform_trust(m: usize, edges: usize, seed: u64) -> Result<Vec<TrustRecord>> {
    check_capacity(m, edges)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(edges);
    let mut out = Vec::with_capacity(edges);
    while out.len() < edges {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        if i != j && seen.insert((i, j)) {
            out.push(TrustRecord::new(i, j, rating(&mut rng, 0)));
        }
    }
    Ok(out)
}

/// Heavy-tailed directed network: trustors and trustees are drawn with
/// Zipf-like popularity, and each trustor shifts its ratings by a personal
/// bias (some rate high, some low).
pub fn scale_free_trust(m: usize, edges: usize, exponent: f64, seed: u64) -> Result<Vec<TrustRecord>> {
    check_capacity(m, edges)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (1..=m).map(|k| (k as f64).powf(-exponent)).collect();
    let mut out_rank: Vec<usize> = (0..m).collect();
    let mut in_rank: Vec<usize> = (0..m).collect();
    out_rank.shuffle(&mut rng);
    in_rank.shuffle(&mut rng);
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let bias: Vec<i32> = (0..m).map(|_| rng.gen_range(-1..=1)).collect();

    let mut seen = HashSet::with_capacity(edges);
    let mut out = Vec::with_capacity(edges);
    let mut attempts = 0usize;
    while out.len() < edges {
        attempts += 1;
        if attempts > edges.saturating_mul(200) {
            return Err(Error::InvalidParameter(format!(
                "could not place {edges} distinct edges among {m} entities"
            )));
        }
        // half the trustors uniform so the tail of light users is populated
        let i = if rng.gen_bool(0.5) {
            rng.gen_range(0..m)
        } else {
            out_rank[pick.sample(&mut rng)]
        };
        let j = in_rank[pick.sample(&mut rng)];
        if i != j && seen.insert((i, j)) {
            out.push(TrustRecord::new(i, j, rating(&mut rng, bias[i])));
        }
    }
    Ok(out)
}
