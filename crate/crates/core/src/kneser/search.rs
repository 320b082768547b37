//! EKR verdicts for a sampled subgraph of `K(n,k)`.
//!
//! The exhaustive search fixes one element `x` and looks at every non-star
//! family through its split `F = S ∪ T`, `S ⊆ K_x`, `∅ ≠ T ⊆ V \ K_x`. An
//! independent `F` forces `S ⊆ K_x \ N(T)`, so a non-star independent family
//! of size at least `M` exists iff some nonempty independent `T` outside the
//! star has surplus `|T| - |N(T) ∩ K_x| >= 0` whose completion is not itself
//! a star (surplus 0 can reproduce another star `K_y`). The search is a
//! branch and bound over independent `T`, pruned by the Hall deficiency of
//! the remaining candidates against the still-uncovered part of `K_x`.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::{family_stats, EdgeSource, Family, KneserParams};
use crate::combinatorics::{colex_rank, ExactInt, KSubset};
use crate::error::{resource, Result};

/// Widest star / co-star handled by the bitset search.
const WIDTH: usize = 128;
type Bits = u128;

/// Limits for a single exhaustive search. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes: Some(max_nodes),
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EkrStatus {
    Ekr,
    Violation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    ExhaustiveSearch,
    NearStarOnly,
    TimedOut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EkrVerdict {
    pub status: EkrStatus,
    /// A non-star independent M-family, or an independent family larger
    /// than `M` when no non-star M-subfamily of it exists (only for `k = 1`).
    pub witness: Option<Family>,
    pub method: SearchMethod,
    pub nodes: u64,
}

impl EkrVerdict {
    pub fn is_ekr(&self) -> bool {
        self.status == EkrStatus::Ekr
    }

    /// A timed-out search that found nothing proves nothing.
    pub fn is_conclusive(&self) -> bool {
        self.method != SearchMethod::TimedOut || self.status == EkrStatus::Violation
    }
}

/// Decides whether every largest independent set of the sampled graph is a
/// star.
pub fn is_ekr<S: EdgeSource + ?Sized>(oracle: &S, budget: SearchBudget) -> Result<EkrVerdict> {
    let params = oracle.params();
    if params.star_size > WIDTH as ExactInt || params.co_star_size > WIDTH as ExactInt {
        return Err(resource!(
            "exact EKR search supports M, N <= {WIDTH}; K({},{}) has M = {}, N = {}",
            params.n,
            params.k,
            params.star_size,
            params.co_star_size
        ));
    }
    let inst = Instance::build(oracle, params.n);
    let mut search = Search {
        inst: &inst,
        budget,
        started: Instant::now(),
        nodes: 0,
        timed_out: false,
        found: None,
    };
    let all = if inst.outer.len() == WIDTH {
        Bits::MAX
    } else {
        (1 << inst.outer.len()) - 1
    };
    search.visit(0, 0, all);

    let nodes = search.nodes;
    Ok(match search.found {
        Some(members) => EkrVerdict {
            status: EkrStatus::Violation,
            witness: Some(family_stats(members, params)?),
            method: SearchMethod::ExhaustiveSearch,
            nodes,
        },
        None => EkrVerdict {
            status: EkrStatus::Ekr,
            witness: None,
            method: if search.timed_out {
                SearchMethod::TimedOut
            } else {
                SearchMethod::ExhaustiveSearch
            },
            nodes,
        },
    })
}

struct Instance {
    star: Vec<KSubset>,
    outer: Vec<KSubset>,
    /// per outer vertex: sampled neighbours inside the star
    cross: Vec<Bits>,
    /// per outer vertex: sampled neighbours among outer vertices
    adj: Vec<Bits>,
}

impl Instance {
    fn build<S: EdgeSource + ?Sized>(oracle: &S, x: usize) -> Self {
        let params = oracle.params();
        let star = params.star(x);
        let outer = params.co_star(x);
        let star_ranks: Vec<u64> = star.iter().map(|s| colex_rank(*s)).collect();
        let outer_ranks: Vec<u64> = outer.iter().map(|s| colex_rank(*s)).collect();
        let edge = |ra: u64, rb: u64| oracle.present_ranked(ra.min(rb), ra.max(rb));

        let cross = outer
            .iter()
            .zip(&outer_ranks)
            .map(|(w, &rw)| {
                star.iter()
                    .zip(&star_ranks)
                    .enumerate()
                    .filter(|(_, (t, &rt))| w.is_disjoint(**t) && edge(rw, rt))
                    .fold(0, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let mut adj = vec![0 as Bits; outer.len()];
        for i in 0..outer.len() {
            for j in i + 1..outer.len() {
                if outer[i].is_disjoint(outer[j]) && edge(outer_ranks[i], outer_ranks[j]) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        Instance {
            star,
            outer,
            cross,
            adj,
        }
    }

    /// `|P| - ν`, the Hall deficiency of `P` against the free star vertices:
    /// the largest `|U| - |N(U) ∩ free|` over `U ⊆ P`.
    fn deficiency(&self, p: Bits, free: Bits) -> i64 {
        let mut owner = [u8::MAX; WIDTH];
        let mut matched = 0i64;
        let mut rest = p;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut seen: Bits = 0;
            if self.augment(u, free, &mut owner, &mut seen) {
                matched += 1;
            }
        }
        p.count_ones() as i64 - matched
    }

    fn augment(&self, u: usize, free: Bits, owner: &mut [u8; WIDTH], seen: &mut Bits) -> bool {
        let mut opts = self.cross[u] & free & !*seen;
        while opts != 0 {
            let r = opts.trailing_zeros() as usize;
            opts &= opts - 1;
            *seen |= 1 << r;
            if owner[r] == u8::MAX || self.augment(owner[r] as usize, free, owner, seen) {
                owner[r] = u as u8;
                return true;
            }
        }
        false
    }
}

struct Search<'a> {
    inst: &'a Instance,
    budget: SearchBudget,
    started: Instant,
    nodes: u64,
    timed_out: bool,
    found: Option<Vec<KSubset>>,
}

impl Search<'_> {
    /// Returns true when the search must stop (witness found or budget spent).
    fn visit(&mut self, t: Bits, covered: Bits, mut cand: Bits) -> bool {
        self.nodes += 1;
        if self.over_budget() {
            self.timed_out = true;
            return true;
        }
        let surplus = t.count_ones() as i64 - covered.count_ones() as i64;
        if t != 0 && surplus >= 0 {
            if let Some(w) = self.witness(t, covered, surplus) {
                self.found = Some(w);
                return true;
            }
        }
        while cand != 0 {
            if surplus + self.inst.deficiency(cand, !covered) < 0 {
                return false;
            }
            // cheapest extension first
            let mut best = usize::MAX;
            let mut best_cost = u32::MAX;
            let mut rest = cand;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let cost = (self.inst.cross[v] & !covered).count_ones();
                if cost < best_cost {
                    best = v;
                    best_cost = cost;
                }
            }
            cand &= !(1 << best);
            if self.visit(
                t | 1 << best,
                covered | self.inst.cross[best],
                cand & !self.inst.adj[best],
            ) {
                return true;
            }
        }
        false
    }

    fn over_budget(&self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.nodes > max {
                return true;
            }
        }
        if let Some(limit) = self.budget.time_limit {
            if self.nodes.is_multiple_of(256) && self.started.elapsed() > limit {
                return true;
            }
        }
        false
    }

    /// Completes `T` with every uncovered star vertex; returns an
    /// independent family that witnesses a violation, if this completion is
    /// one.
    fn witness(&self, t: Bits, covered: Bits, surplus: i64) -> Option<Vec<KSubset>> {
        let mut members: Vec<KSubset> = bit_indices(!covered & star_mask(self.inst.star.len()))
            .map(|j| self.inst.star[j])
            .chain(bit_indices(t).map(|i| self.inst.outer[i]))
            .collect();
        if surplus == 0 {
            return (!is_star_shaped(&members)).then_some(members);
        }
        // at most one member of an (M+1)-family leaves a star when removed
        members.drain(..surplus as usize - 1);
        for i in 0..members.len() {
            let mut sub = members.clone();
            sub.remove(i);
            if !is_star_shaped(&sub) {
                return Some(sub);
            }
        }
        Some(members)
    }
}

fn star_mask(len: usize) -> Bits {
    if len == WIDTH {
        Bits::MAX
    } else {
        (1 << len) - 1
    }
}

fn bit_indices(mut b: Bits) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (b != 0).then(|| {
            let i = b.trailing_zeros() as usize;
            b &= b - 1;
            i
        })
    })
}

/// An M-family is a star iff its members share an element.
fn is_star_shaped(members: &[KSubset]) -> bool {
    members.iter().fold(!0u64, |acc, a| acc & a.bits()) != 0
}

/// `n · M · N`: the number of `(x, B, A)` choices with `B ∈ K_x`, `A ∉ K_x`.
pub fn near_star_candidate_count(params: &KneserParams) -> ExactInt {
    params.n as ExactInt * params.star_size * params.co_star_size
}

/// Walks every independent near-star family `(K_x \ {B}) ∪ {A}`. The callback
/// receives `(x, A, B)`.
fn for_each_near_star<S, F>(oracle: &S, mut f: F)
where
    S: EdgeSource + ?Sized,
    F: FnMut(usize, KSubset, KSubset) -> ControlFlow<()>,
{
    let params = oracle.params();
    // for k = 1 every such family is a single vertex, i.e. a star
    if params.k < 2 {
        return;
    }
    let verts = params.vertices();
    for x in 1..=params.n {
        let star: Vec<(u64, KSubset)> = verts
            .iter()
            .enumerate()
            .filter(|(_, v)| v.contains(x))
            .map(|(r, v)| (r as u64, *v))
            .collect();
        for (ra, &a) in verts.iter().enumerate().filter(|(_, v)| !v.contains(x)) {
            let ra = ra as u64;
            let mut hits = star
                .iter()
                .filter(|(_, t)| a.is_disjoint(*t))
                .filter(|(rt, _)| oracle.present_ranked(ra.min(*rt), ra.max(*rt)));
            let first = hits.next();
            let flow = match (first, hits.next()) {
                (None, _) => star.iter().try_for_each(|&(_, b)| f(x, a, b)),
                (Some(&(_, b)), None) => f(x, a, b),
                _ => ControlFlow::Continue(()),
            };
            if flow.is_break() {
                return;
            }
        }
    }
}

/// All independent families at distance one from a star.
pub fn near_star_scan<S: EdgeSource + ?Sized>(oracle: &S) -> Result<Vec<Family>> {
    let params = oracle.params();
    let mut keys = std::collections::BTreeSet::new();
    for_each_near_star(oracle, |x, a, b| {
        let mut members: Vec<KSubset> = params
            .star(x)
            .into_iter()
            .filter(|t| *t != b)
            .chain(std::iter::once(a))
            .collect();
        members.sort_unstable();
        keys.insert(members);
        ControlFlow::Continue(())
    });
    keys.into_iter()
        .map(|members| family_stats(members, params))
        .filter(|f| f.as_ref().map_or(true, |f| !f.is_star()))
        .collect()
}

pub fn near_star_violation_exists<S: EdgeSource + ?Sized>(oracle: &S) -> bool {
    let mut hit = false;
    for_each_near_star(oracle, |_, _, _| {
        hit = true;
        ControlFlow::Break(())
    });
    hit
}

/// Verdict from the near-star scan alone: a violation is conclusive, an
/// "EKR" answer only means no near-star family is independent.
pub fn near_star_verdict<S: EdgeSource + ?Sized>(oracle: &S) -> Result<EkrVerdict> {
    let params = oracle.params();
    let mut first = None;
    for_each_near_star(oracle, |x, a, b| {
        first = Some((x, a, b));
        ControlFlow::Break(())
    });
    let witness = match first {
        Some((x, a, b)) => Some(family_stats(
            params
                .star(x)
                .into_iter()
                .filter(|t| *t != b)
                .chain(std::iter::once(a)),
            params,
        )?),
        None => None,
    };
    Ok(EkrVerdict {
        status: if witness.is_some() {
            EkrStatus::Violation
        } else {
            EkrStatus::Ekr
        },
        witness,
        method: SearchMethod::NearStarOnly,
        nodes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::{EdgeOracle, EdgeSet};

    fn set(s: &str) -> KSubset {
        KSubset::parse(s).unwrap()
    }

    #[test]
    fn full_graph_is_ekr() {
        let params = KneserParams::new(5, 2).unwrap();
        let v = is_ekr(&EdgeOracle::new(params, 1.0, 9), SearchBudget::unlimited()).unwrap();
        assert!(v.is_ekr());
        assert_eq!(v.method, SearchMethod::ExhaustiveSearch);
        assert!(v.witness.is_none());
    }

    #[test]
    fn empty_graph_violates() {
        let params = KneserParams::new(5, 2).unwrap();
        let v = is_ekr(&EdgeOracle::new(params, 0.0, 9), SearchBudget::unlimited()).unwrap();
        assert_eq!(v.status, EkrStatus::Violation);
        let w = v.witness.unwrap();
        assert!(w.is_non_star_m_family());
    }

    #[test]
    fn one_missing_edge_exposes_its_family() {
        let params = KneserParams::new(5, 2).unwrap();
        let mut g = EdgeSet::full(params.clone());
        g.remove(set("14"), set("23")).unwrap();
        let v = is_ekr(&g, SearchBudget::unlimited()).unwrap();
        assert_eq!(v.status, EkrStatus::Violation);
        let w = v.witness.unwrap();
        let mut want: Vec<_> = ["12", "13", "14", "23"].iter().map(|s| set(s)).collect();
        want.sort();
        assert_eq!(w.members(), want.as_slice());

        let hits = near_star_scan(&g).unwrap();
        assert!(hits.iter().any(|f| f.members() == want.as_slice()));
    }

    #[test]
    fn near_star_candidates_by_enumeration() {
        let params = KneserParams::new(5, 2).unwrap();
        let verts = params.vertices();
        let mut count = 0u128;
        for x in 1..=5 {
            for b in verts.iter().filter(|v| v.contains(x)) {
                for a in verts.iter().filter(|v| !v.contains(x)) {
                    assert_ne!(a, b);
                    count += 1;
                }
            }
        }
        assert_eq!(count, 120);
        assert_eq!(near_star_candidate_count(&params), 120);
        // p = 0: every candidate is independent, and all are distinct
        let hits = near_star_scan(&EdgeSet::empty(params)).unwrap();
        assert_eq!(hits.len(), 120);
    }

    #[test]
    fn no_near_star_hits_in_full_graph() {
        for (n, k) in [(5, 2), (7, 3), (7, 2), (9, 4), (8, 3)] {
            let params = KneserParams::new(n, k).unwrap();
            let o = EdgeOracle::new(params, 1.0, 0);
            assert!(near_star_scan(&o).unwrap().is_empty());
            assert!(!near_star_violation_exists(&o));
        }
    }

    #[test]
    fn k_equals_one() {
        // M = 1; any independent pair beats the stars
        let params = KneserParams::new(4, 1).unwrap();
        let full = EdgeSet::full(params.clone());
        assert!(is_ekr(&full, SearchBudget::unlimited()).unwrap().is_ekr());
        let mut g = full.clone();
        g.remove(set("1"), set("3")).unwrap();
        let v = is_ekr(&g, SearchBudget::unlimited()).unwrap();
        assert_eq!(v.status, EkrStatus::Violation);
        assert_eq!(v.witness.unwrap().len(), 2);
        assert!(near_star_scan(&g).unwrap().is_empty());
    }

    #[test]
    fn node_budget_times_out() {
        let params = KneserParams::new(9, 4).unwrap();
        let o = EdgeOracle::new(params, 1.0, 3);
        let v = is_ekr(&o, SearchBudget::nodes(5)).unwrap();
        assert_eq!(v.method, SearchMethod::TimedOut);
        assert!(!v.is_conclusive());
    }

    #[test]
    fn oversized_instances_are_rejected() {
        let params = KneserParams::new(11, 5).unwrap();
        let o = EdgeOracle::new(params, 1.0, 3);
        assert!(is_ekr(&o, SearchBudget::unlimited()).is_err());
    }
}
