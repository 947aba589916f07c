#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rga_core::{SparseTrustMatrix, TrustRecord};
use rga_oracle::Dense;

/// Each off-diagonal cell present with probability `density`, values in (0, 1].
pub fn random_records(m: usize, density: f64, seed: u64) -> Vec<TrustRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j && rng.gen_bool(density) {
                out.push(TrustRecord::new(i, j, rng.gen_range(0.05..=1.0)));
            }
        }
    }
    out
}

pub fn random_matrix(m: usize, density: f64, seed: u64) -> SparseTrustMatrix {
    SparseTrustMatrix::from_records(&random_records(m, density, seed), m).unwrap()
}

pub fn to_dense(s: &SparseTrustMatrix) -> Dense {
    let mut d = rga_oracle::zeros(s.dim());
    for r in s.records() {
        d[r.trustor][r.trustee] = r.value;
    }
    d
}

pub fn triplets(records: &[TrustRecord]) -> Vec<(usize, usize, f64)> {
    records.iter().map(|r| (r.trustor, r.trustee, r.value)).collect()
}
