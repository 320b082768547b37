//! The Kneser graph `K(n,k)`, its random subgraph `K_p(n,k)` and the EKR
//! property checker.

mod family;
pub(crate) mod oracle;
mod search;

pub use family::{family_stats, split_at_apex, ApexSplit, Family};
pub use oracle::{edge_uniform, is_disjoint, EdgeOracle, EdgeSet, EdgeSource};
pub use search::{
    is_ekr, near_star_candidate_count, near_star_scan, near_star_verdict,
    near_star_violation_exists, EkrStatus, EkrVerdict, SearchBudget, SearchMethod,
};

use serde::Serialize;

use crate::combinatorics::{binomial, enumerate_k_subsets, ExactInt, KSubset, MAX_GROUND};
use crate::error::{domain, Result};

/// Derived constants of `K(n,k)` in the regime `0 < k < n/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KneserParams {
    pub n: usize,
    pub k: usize,
    /// `n - 2k`
    pub c: usize,
    /// `n - 1`, the ground set left after deleting an apex.
    pub m: usize,
    /// `M = C(n-1, k-1)`, the size of a star.
    #[serde(rename = "M")]
    pub star_size: ExactInt,
    /// `N = C(n-1, k)`, the number of vertices avoiding a fixed element.
    #[serde(rename = "N")]
    pub co_star_size: ExactInt,
    pub vertex_count: ExactInt,
    /// Heuristic threshold: `3/4` when `c = 1`, otherwise
    /// `ln(n C(n-1,k)) / C(n-k-1,k-1)`.
    #[serde(rename = "p0")]
    pub p_zero: f64,
}

impl KneserParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(domain!("n = {n} exceeds the {MAX_GROUND}-element word"));
        }
        if k == 0 || 2 * k >= n {
            return Err(domain!("need 0 < k < n/2, got n = {n}, k = {k}"));
        }
        let (nn, kk) = (n as u64, k as u64);
        let c = n - 2 * k;
        let star_size = binomial(nn - 1, kk - 1);
        let co_star_size = binomial(nn - 1, kk);
        let p_zero = if c == 1 {
            0.75
        } else {
            (n as f64 * co_star_size as f64).ln() / binomial(nn - kk - 1, kk - 1) as f64
        };
        Ok(KneserParams {
            n,
            k,
            c,
            m: n - 1,
            star_size,
            co_star_size,
            vertex_count: binomial(nn, kk),
            p_zero,
        })
    }

    /// Kneser degree `C(n-k, k)`.
    pub fn kneser_degree(&self) -> ExactInt {
        binomial((self.n - self.k) as u64, self.k as u64)
    }

    /// `C(n-k-1, k-1)`: neighbours a vertex outside a star has inside it.
    pub fn cross_degree(&self) -> ExactInt {
        binomial((self.n - self.k - 1) as u64, self.k as u64 - 1)
    }

    /// All vertices in colex order; the position of a vertex is its rank.
    pub fn vertices(&self) -> Vec<KSubset> {
        enumerate_k_subsets(self.n, self.k).collect()
    }

    /// The star `K_x`.
    pub fn star(&self, x: usize) -> Vec<KSubset> {
        enumerate_k_subsets(self.n, self.k)
            .filter(|a| a.contains(x))
            .collect()
    }

    /// Vertices not containing `x`.
    pub fn co_star(&self, x: usize) -> Vec<KSubset> {
        enumerate_k_subsets(self.n, self.k)
            .filter(|a| !a.contains(x))
            .collect()
    }
}
