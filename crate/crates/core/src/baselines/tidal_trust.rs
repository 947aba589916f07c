use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::SparseTrustMatrix;

/// Breadth-first layering from one source, reusable across many sinks.
pub struct TidalSearch<'a> {
    s: &'a SparseTrustMatrix,
    reverse: &'a SparseTrustMatrix,
    source: usize,
    dist: Vec<usize>,
}

impl<'a> TidalSearch<'a> {
    /// `reverse` must be `s.transpose()`.
    pub fn new(s: &'a SparseTrustMatrix, reverse: &'a SparseTrustMatrix, source: usize) -> Result<Self> {
        let m = s.dim();
        if source >= m {
            return Err(Error::EntityOutOfRange { id: source, m });
        }
        let mut dist = vec![usize::MAX; m];
        dist[source] = 0;
        let mut frontier = vec![source];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for (v, _) in s.row_iter(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = d;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        Ok(Self {
            s,
            reverse,
            source,
            dist,
        })
    }

    /// Inferred trust from the source in `sink`, or `None` without a path.
    ///
    /// Only shortest paths are used. Working back from the sink, each node's
    /// rating is the mean of its children's ratings weighted by its trust in
    /// them, over children it trusts at least `cutoff`.
    pub fn rate(&self, sink: usize, cutoff: f64) -> Option<f64> {
        if sink >= self.dist.len() || sink == self.source {
            return None;
        }
        let depth = self.dist[sink];
        if depth == usize::MAX {
            return None;
        }
        if depth == 1 {
            return Some(self.s.get(self.source, sink));
        }

        // nodes on a shortest path into the sink, by layer, with their rating
        let mut rated: HashMap<usize, f64> = HashMap::new();
        let mut layer: Vec<usize> = self
            .reverse
            .row_iter(sink)
            .map(|(n, _)| n)
            .filter(|&n| self.dist[n] == depth - 1)
            .collect();
        for &n in &layer {
            rated.insert(n, self.s.get(n, sink));
        }

        for k in (0..depth - 1).rev() {
            let mut parents: Vec<usize> = layer
                .iter()
                .flat_map(|&c| self.reverse.row_iter(c).map(|(p, _)| p))
                .filter(|&p| self.dist[p] == k)
                .collect();
            parents.sort_unstable();
            parents.dedup();

            let mut next_rated = HashMap::new();
            for &p in &parents {
                let mut num = 0.0;
                let mut den = 0.0;
                for (c, w) in self.s.row_iter(p) {
                    if w < cutoff {
                        continue;
                    }
                    if let Some(&r) = rated.get(&c).filter(|_| self.dist[c] == k + 1) {
                        num += w * r;
                        den += w;
                    }
                }
                if den > 0.0 {
                    next_rated.insert(p, num / den);
                }
            }
            layer = parents;
            rated = next_rated;
        }
        rated.get(&self.source).copied()
    }
}

/// TidalTrust inference of `source`'s trust in `sink`.
pub fn tidal_trust(s: &SparseTrustMatrix, source: usize, sink: usize, max_threshold: f64) -> Result<Option<f64>> {
    let m = s.dim();
    if sink >= m {
        return Err(Error::EntityOutOfRange { id: sink, m });
    }
    let reverse = s.transpose();
    Ok(TidalSearch::new(s, &reverse, source)?.rate(sink, max_threshold))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_path() {
        let s = SparseTrustMatrix::from_records(&[(0, 1, 0.8), (1, 2, 0.9)], 3).unwrap();
        let t = tidal_trust(&s, 0, 2, 0.008).unwrap().unwrap();
        assert!((t - 0.9).abs() < 1e-15);
    }

    #[test]
    fn no_path() {
        let s = SparseTrustMatrix::from_records(&[(0, 1, 0.8)], 3).unwrap();
        assert_eq!(tidal_trust(&s, 0, 2, 0.008).unwrap(), None);
        assert_eq!(tidal_trust(&s, 1, 0, 0.008).unwrap(), None);
    }

    #[test]
    fn direct_edge_shortcut() {
        let s = SparseTrustMatrix::from_records(&[(0, 2, 0.35), (0, 1, 1.0), (1, 2, 1.0)], 3).unwrap();
        assert_eq!(tidal_trust(&s, 0, 2, 0.008).unwrap(), Some(0.35));
    }

    #[test]
    fn two_routes_weighted() {
        // 0 -> {1, 2} -> 3 ; longer route 0 -> 4 -> 5 -> 3 ignored
        let s = SparseTrustMatrix::from_records(
            &[(0, 1, 0.5), (0, 2, 1.0), (1, 3, 0.2), (2, 3, 0.8), (0, 4, 1.0), (4, 5, 1.0), (5, 3, 0.0)],
            6,
        )
        .unwrap();
        let t = tidal_trust(&s, 0, 3, 0.008).unwrap().unwrap();
        assert!((t - (0.5 * 0.2 + 1.0 * 0.8) / 1.5).abs() < 1e-15);
        // cutoff above 0.5 drops the first route
        let t = tidal_trust(&s, 0, 3, 0.6).unwrap().unwrap();
        assert!((t - 0.8).abs() < 1e-15);
    }

    #[test]
    fn out_of_range() {
        let s = SparseTrustMatrix::empty(2);
        assert!(tidal_trust(&s, 0, 2, 0.1).is_err());
        assert!(tidal_trust(&s, 2, 0, 0.1).is_err());
    }
}
