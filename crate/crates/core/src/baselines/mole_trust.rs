use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::SparseTrustMatrix;

/// MoleTrust from `source`, walking breadth-first up to `mpd` hops.
///
/// A node first reached at distance `d` gets the trust-weighted mean of the
/// edges from its distance `d - 1` predecessors, counting only predecessors
/// whose own trust is at least `trust_threshold`. The source always counts.
/// Nodes whose predecessors all fail the threshold get no value and do not
/// propagate further.
pub fn mole_trust(
    s: &SparseTrustMatrix,
    source: usize,
    mpd: usize,
    trust_threshold: f64,
) -> Result<BTreeMap<usize, f64>> {
    let m = s.dim();
    if source >= m {
        return Err(Error::EntityOutOfRange { id: source, m });
    }
    let mut dist = vec![usize::MAX; m];
    let mut trust: Vec<Option<f64>> = vec![None; m];
    dist[source] = 0;
    trust[source] = Some(1.0);

    let mut out = BTreeMap::new();
    let mut frontier = vec![source];
    for d in 1..=mpd {
        let mut level = Vec::new();
        for &p in &frontier {
            for (n, _) in s.row_iter(p) {
                if dist[n] == usize::MAX {
                    dist[n] = d;
                    level.push(n);
                }
            }
        }
        if level.is_empty() {
            break;
        }
        let mut num = BTreeMap::<usize, f64>::new();
        let mut den = BTreeMap::<usize, f64>::new();
        for &p in &frontier {
            let Some(tp) = trust[p] else { continue };
            if p != source && tp < trust_threshold {
                continue;
            }
            for (n, w) in s.row_iter(p) {
                if dist[n] == d {
                    *num.entry(n).or_default() += tp * w;
                    *den.entry(n).or_default() += tp;
                }
            }
        }
        for (n, total) in num {
            let v = total / den[&n];
            trust[n] = Some(v);
            out.insert(n, v);
        }
        level.sort_unstable();
        frontier = level;
    }
    Ok(out)
}
