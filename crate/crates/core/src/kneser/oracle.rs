use std::collections::HashSet;

use super::KneserParams;
use crate::combinatorics::{colex_rank, KSubset};
use crate::error::{contract, Result};

/// Kneser adjacency.
#[inline]
pub fn is_disjoint(a: KSubset, b: KSubset) -> bool {
    a.is_disjoint(b)
}

/// A spanning subgraph of `K(n,k)`, addressed by the colex ranks of the two
/// endpoints of a Kneser edge.
pub trait EdgeSource: Sync {
    fn params(&self) -> &KneserParams;

    /// Presence of the Kneser edge between vertices of rank `lo < hi`. Only
    /// called for disjoint pairs.
    fn present_ranked(&self, lo: u64, hi: u64) -> bool;

    /// Presence of the edge `{a, b}`; non-edges of `K(n,k)` are rejected.
    fn edge_present(&self, a: KSubset, b: KSubset) -> Result<bool> {
        let p = self.params();
        for s in [a, b] {
            if s.len() != p.k || s.max_element() > p.n {
                return Err(contract!("{s} is not a vertex of K({},{})", p.n, p.k));
            }
        }
        if !a.is_disjoint(b) {
            return Err(contract!("{a} and {b} intersect; not a Kneser edge"));
        }
        Ok(self.present_unchecked(a, b))
    }

    /// As [`edge_present`](Self::edge_present) without validation.
    #[inline]
    fn present_unchecked(&self, a: KSubset, b: KSubset) -> bool {
        let (ra, rb) = (colex_rank(a), colex_rank(b));
        self.present_ranked(ra.min(rb), ra.max(rb))
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The keyed uniform attached to an unordered vertex pair: a fixed 64-bit
/// mix of `(seed, lo, hi)`, top 53 bits scaled into `[0, 1)`.
#[inline]
pub fn edge_uniform(seed: u64, lo: u64, hi: u64) -> f64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    h = mix64(h ^ lo.wrapping_mul(GOLDEN));
    h = mix64(h ^ hi.rotate_left(29));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The random subgraph `K_p(n,k)`: an edge is present iff its keyed uniform
/// is below `p`. Oracles sharing a seed are coupled monotonically in `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeOracle {
    params: KneserParams,
    p: f64,
    seed: u64,
}

impl EdgeOracle {
    pub fn new(params: KneserParams, p: f64, seed: u64) -> Self {
        EdgeOracle {
            params,
            p: p.clamp(0.0, 1.0),
            seed,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same seed, different `p`.
    pub fn with_p(&self, p: f64) -> Self {
        EdgeOracle::new(self.params.clone(), p, self.seed)
    }
}

impl EdgeSource for EdgeOracle {
    fn params(&self) -> &KneserParams {
        &self.params
    }

    #[inline]
    fn present_ranked(&self, lo: u64, hi: u64) -> bool {
        edge_uniform(self.seed, lo, hi) < self.p
    }
}

/// An explicitly listed edge set, for hand-built graphs and oracle tests.
#[derive(Clone, Debug)]
pub struct EdgeSet {
    params: KneserParams,
    edges: HashSet<(u64, u64)>,
}

impl EdgeSet {
    pub fn empty(params: KneserParams) -> Self {
        EdgeSet {
            params,
            edges: HashSet::new(),
        }
    }

    /// Every edge of `K(n,k)`.
    pub fn full(params: KneserParams) -> Self {
        let verts = params.vertices();
        let mut edges = HashSet::new();
        for (i, a) in verts.iter().enumerate() {
            for (j, b) in verts.iter().enumerate().skip(i + 1) {
                if a.is_disjoint(*b) {
                    edges.insert((i as u64, j as u64));
                }
            }
        }
        EdgeSet { params, edges }
    }

    /// Snapshot of any edge source.
    pub fn from_source(source: &dyn EdgeSource) -> Self {
        let params = source.params().clone();
        let verts = params.vertices();
        let mut edges = HashSet::new();
        for (i, a) in verts.iter().enumerate() {
            for (j, b) in verts.iter().enumerate().skip(i + 1) {
                if a.is_disjoint(*b) && source.present_ranked(i as u64, j as u64) {
                    edges.insert((i as u64, j as u64));
                }
            }
        }
        EdgeSet { params, edges }
    }

    pub fn insert(&mut self, a: KSubset, b: KSubset) -> Result<()> {
        self.edge_present(a, b)?;
        self.edges.insert(ranked(a, b));
        Ok(())
    }

    pub fn remove(&mut self, a: KSubset, b: KSubset) -> Result<()> {
        self.edge_present(a, b)?;
        self.edges.remove(&ranked(a, b));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn ranked(a: KSubset, b: KSubset) -> (u64, u64) {
    let (ra, rb) = (colex_rank(a), colex_rank(b));
    (ra.min(rb), ra.max(rb))
}

impl EdgeSource for EdgeSet {
    fn params(&self) -> &KneserParams {
        &self.params
    }

    fn present_ranked(&self, lo: u64, hi: u64) -> bool {
        self.edges.contains(&(lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> KSubset {
        KSubset::parse(s).unwrap()
    }

    #[test]
    fn disjointness() {
        assert!(is_disjoint(set("12"), set("34")));
        assert!(!is_disjoint(set("12"), set("23")));
        assert!(!is_disjoint(set("12"), set("12")));
    }

    #[test]
    fn extreme_probabilities() {
        let params = KneserParams::new(5, 2).unwrap();
        let zero = EdgeOracle::new(params.clone(), 0.0, 7);
        let one = EdgeOracle::new(params, 1.0, 7);
        let (a, b) = (set("12"), set("34"));
        assert!(!zero.edge_present(a, b).unwrap());
        assert!(one.edge_present(a, b).unwrap());
        assert_eq!(
            one.edge_present(a, b).unwrap(),
            one.edge_present(b, a).unwrap()
        );
    }

    #[test]
    fn non_edges_rejected() {
        let params = KneserParams::new(5, 2).unwrap();
        let o = EdgeOracle::new(params, 0.5, 1);
        assert!(o.edge_present(set("12"), set("23")).is_err());
        assert!(o.edge_present(set("12"), set("345")).is_err());
        assert!(o.edge_present(set("12"), set("36")).is_err());
    }

    #[test]
    fn uniform_is_roughly_uniform() {
        let n = 200_000u64;
        let mean = (0..n).map(|i| edge_uniform(3, i, i + 17)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
        let below = (0..n)
            .filter(|&i| edge_uniform(11, i / 7, i).lt(&0.3))
            .count();
        assert!((below as f64 / n as f64 - 0.3).abs() < 0.005);
    }

    #[test]
    fn full_edge_set_counts() {
        let params = KneserParams::new(5, 2).unwrap();
        // Petersen graph
        assert_eq!(EdgeSet::full(params.clone()).len(), 15);
        let o = EdgeOracle::new(params, 1.0, 0);
        assert_eq!(EdgeSet::from_source(&o).len(), 15);
    }
}
