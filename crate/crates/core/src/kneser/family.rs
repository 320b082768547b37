use serde::Serialize;

use super::KneserParams;
use crate::combinatorics::{ExactInt, KSubset};
use crate::error::{contract, Result};

/// A family of k-subsets with its degree statistics and Kneser edge count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    members: Vec<KSubset>,
    n: usize,
    k: usize,
    star_size: ExactInt,
    /// `degrees[x - 1] = |F_x|`
    degrees: Vec<u64>,
    max_degree: u64,
    apexes: Vec<usize>,
    a_f: ExactInt,
    internal_edges: ExactInt,
    star_witness: Option<usize>,
}

/// Computes all cached statistics of a family by exhaustive pair scan.
/// Members are deduplicated and stored in colex order.
pub fn family_stats<I>(members: I, params: &KneserParams) -> Result<Family>
where
    I: IntoIterator<Item = KSubset>,
{
    let mut members: Vec<KSubset> = members.into_iter().collect();
    members.sort_unstable();
    members.dedup();
    for a in &members {
        if a.len() != params.k {
            return Err(contract!("member {a} is not a {}-subset", params.k));
        }
        if a.max_element() > params.n {
            return Err(contract!("member {a} is not a subset of [{}]", params.n));
        }
    }

    let mut degrees = vec![0u64; params.n];
    for a in &members {
        for x in a.elements() {
            degrees[x - 1] += 1;
        }
    }
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let apexes = (1..=params.n)
        .filter(|&x| degrees[x - 1] == max_degree)
        .collect();

    let mut internal_edges: ExactInt = 0;
    for (i, a) in members.iter().enumerate() {
        internal_edges += members[i + 1..]
            .iter()
            .filter(|b| a.is_disjoint(**b))
            .count() as ExactInt;
    }

    let star_witness = if members.len() as ExactInt == params.star_size {
        let common = members.iter().fold(!0u64, |acc, a| acc & a.bits());
        (common != 0).then(|| common.trailing_zeros() as usize + 1)
    } else {
        None
    };

    Ok(Family {
        members,
        n: params.n,
        k: params.k,
        star_size: params.star_size,
        a_f: params.star_size.saturating_sub(max_degree as ExactInt),
        degrees,
        max_degree,
        apexes,
        internal_edges,
        star_witness,
    })
}

impl Family {
    pub fn members(&self) -> &[KSubset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: KSubset) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    /// `|F_x|`
    pub fn degree(&self, x: usize) -> u64 {
        self.degrees[x - 1]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// `Δ_F`
    pub fn max_degree(&self) -> u64 {
        self.max_degree
    }

    /// Elements attaining `Δ_F`, ascending.
    pub fn apexes(&self) -> &[usize] {
        &self.apexes
    }

    /// `a_F = M - Δ_F`; only meaningful when `|F| = M`.
    pub fn a_f(&self) -> ExactInt {
        self.a_f
    }

    /// `e(F)`, the number of disjoint pairs inside the family.
    pub fn internal_edges(&self) -> ExactInt {
        self.internal_edges
    }

    pub fn star_witness(&self) -> Option<usize> {
        self.star_witness
    }

    pub fn is_star(&self) -> bool {
        self.star_witness.is_some()
    }

    /// True for M-families that are not stars.
    pub fn is_non_star_m_family(&self) -> bool {
        self.members.len() as ExactInt == self.star_size && self.star_witness.is_none()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// The two sides of the split of an M-family at an apex `x`, kept in the
/// original labels of `[n]` (neither side contains `x`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApexSplit {
    pub x: usize,
    /// `F \ F_x`, k-subsets of `[n] \ {x}`.
    pub a: Vec<KSubset>,
    /// `{V \ T : T in K_x \ F}`, (k+c)-subsets of `[n] \ {x}`.
    pub b: Vec<KSubset>,
}

/// Splits an M-family at a maximum-degree element `x`.
pub fn split_at_apex(family: &Family, x: usize, params: &KneserParams) -> Result<ApexSplit> {
    if family.len() as ExactInt != params.star_size {
        return Err(contract!(
            "apex split needs |F| = M = {}, got {}",
            params.star_size,
            family.len()
        ));
    }
    if x == 0 || x > params.n || !family.apexes().contains(&x) {
        return Err(contract!("{x} is not a maximum-degree element of F"));
    }
    let a = family
        .members()
        .iter()
        .copied()
        .filter(|s| !s.contains(x))
        .collect();
    let b = params
        .star(x)
        .into_iter()
        .filter(|t| !family.contains(*t))
        .map(|t| t.complement_in(params.n))
        .collect();
    Ok(ApexSplit { x, a, b })
}
