use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{SparseTrustMatrix, TrustRecord};

/// Predict/test halves of a trust dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub predict_set: Vec<TrustRecord>,
    pub test_set: Vec<TrustRecord>,
    pub seed: u64,
}

/// Shuffles under `seed` and cuts in half; the predict half takes the extra
/// record when the count is odd. Keys must be unique.
pub fn split_half(records: &[TrustRecord], seed: u64) -> Result<SplitPair> {
    if records.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "cannot split {} record(s) into two halves",
            records.len()
        )));
    }
    let mut keys = BTreeSet::new();
    for r in records {
        if !keys.insert((r.trustor, r.trustee)) {
            return Err(Error::DuplicateKey(r.trustor, r.trustee));
        }
    }
    let mut shuffled = records.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test_set = shuffled.split_off(records.len().div_ceil(2));
    Ok(SplitPair {
        predict_set: shuffled,
        test_set,
        seed,
    })
}

/// Entities with at most `threshold` trust statements, not counting the
/// diagonal.
pub fn cold_start_users(matrix: &SparseTrustMatrix, threshold: usize) -> BTreeSet<usize> {
    (0..matrix.dim()).filter(|&i| matrix.out_degree(i) <= threshold).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(n: usize) -> Vec<TrustRecord> {
        (0..n).map(|k| TrustRecord::new(k / 10, k % 10, 0.5)).collect()
    }

    #[test]
    fn even_and_odd_sizes() {
        let s = split_half(&records(100), 7).unwrap();
        assert_eq!((s.predict_set.len(), s.test_set.len()), (50, 50));
        let s = split_half(&records(101), 7).unwrap();
        assert_eq!((s.predict_set.len(), s.test_set.len()), (51, 50));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(split_half(&records(40), 3).unwrap(), split_half(&records(40), 3).unwrap());
        assert_ne!(split_half(&records(40), 3).unwrap(), split_half(&records(40), 4).unwrap());
    }

    #[test]
    fn rejects_tiny_and_duplicate_inputs() {
        assert!(split_half(&records(1), 0).is_err());
        let dup = [TrustRecord::new(0, 1, 0.5), TrustRecord::new(0, 1, 0.7)];
        assert!(matches!(split_half(&dup, 0), Err(Error::DuplicateKey(0, 1))));
    }

    #[test]
    fn cold_start_boundaries() {
        let mut recs: Vec<(usize, usize, f64)> = (1..4).map(|j| (0, j, 1.0)).collect();
        recs.extend((2..8).map(|j| (1, j, 1.0)));
        recs.push((2, 2, 1.0));
        let s = SparseTrustMatrix::from_records(&recs, 8).unwrap();
        let cs = cold_start_users(&s, 5);
        assert!(cs.contains(&0));
        assert!(!cs.contains(&1));
        let none = cold_start_users(&s, 0);
        assert_eq!(none, (2..8).collect());
    }
}
