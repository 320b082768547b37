use ekr_core::combinatorics::KSubset;
use ekr_core::kneser::{
    is_ekr, near_star_scan, EdgeOracle, EdgeSet, EdgeSource, KneserParams, SearchBudget,
};
use ekr_core::montecarlo::sub_seed;
use proptest::prelude::*;

/// Every independent set of a graph on at most 20 vertices, by bitmask.
fn independent_sets<S: EdgeSource>(oracle: &S) -> Vec<Vec<KSubset>> {
    let verts = oracle.params().vertices();
    let v = verts.len();
    assert!(v <= 20);
    let mut adj = vec![0u32; v];
    for i in 0..v {
        for j in i + 1..v {
            if verts[i].is_disjoint(verts[j]) && oracle.present_unchecked(verts[i], verts[j]) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    (0u32..1 << v)
        .filter(|&mask| (0..v).all(|i| mask >> i & 1 == 0 || adj[i] & mask == 0))
        .map(|mask| {
            (0..v)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| verts[i])
                .collect()
        })
        .collect()
}

fn is_star(family: &[KSubset]) -> bool {
    family.iter().fold(!0u64, |acc, a| acc & a.bits()) != 0
}

/// EKR by definition: every largest independent set is a star.
fn brute_force_ekr<S: EdgeSource>(oracle: &S) -> bool {
    let sets = independent_sets(oracle);
    let alpha = sets.iter().map(Vec::len).max().unwrap();
    alpha as u128 == oracle.params().star_size
        && sets.iter().filter(|s| s.len() == alpha).all(|s| is_star(s))
}

#[test]
fn exact_search_matches_brute_force() {
    let params = KneserParams::new(5, 2).unwrap();
    let mut seen = [0usize; 2];
    for t in 0..100 {
        let p = [0.3, 0.5, 0.6, 0.7, 0.8, 0.9][t as usize % 6];
        let oracle = EdgeOracle::new(params.clone(), p, sub_seed(2024, t));
        let verdict = is_ekr(&oracle, SearchBudget::unlimited()).unwrap();
        let truth = brute_force_ekr(&oracle);
        assert_eq!(verdict.is_ekr(), truth, "trial {t} at p = {p}");
        seen[truth as usize] += 1;
        if let Some(w) = verdict.witness {
            let members = w.members();
            assert!(members.len() as u128 >= params.star_size);
            assert!(!is_star(members));
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    assert!(!a.is_disjoint(*b) || !oracle.present_unchecked(*a, *b));
                }
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn full_and_empty_graphs() {
    for (n, k) in [(5, 2), (6, 2), (7, 3), (7, 2)] {
        let params = KneserParams::new(n, k).unwrap();
        let full = EdgeSet::full(params.clone());
        assert!(is_ekr(&full, SearchBudget::unlimited()).unwrap().is_ekr());
        let empty = EdgeSet::empty(params);
        assert!(!is_ekr(&empty, SearchBudget::unlimited()).unwrap().is_ekr());
    }
    let params = KneserParams::new(5, 2).unwrap();
    assert!(brute_force_ekr(&EdgeSet::full(params.clone())));
    assert!(!brute_force_ekr(&EdgeSet::empty(params)));
}

#[test]
fn near_star_hits_are_violations() {
    for (n, k) in [(5, 2), (7, 3)] {
        let params = KneserParams::new(n, k).unwrap();
        for t in 0..1000 {
            let p = 0.5 + 0.45 * (t % 10) as f64 / 10.0;
            let oracle = EdgeOracle::new(params.clone(), p, sub_seed(99, t));
            let hits = near_star_scan(&oracle).unwrap();
            if !hits.is_empty() {
                let v = is_ekr(&oracle, SearchBudget::unlimited()).unwrap();
                assert!(!v.is_ekr(), "({n},{k}) trial {t}");
            }
            for f in hits {
                assert!(f.is_non_star_m_family());
                assert_eq!(f.a_f(), 1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edges_are_monotone_in_p(seed: u64, lo in 0u64..35, hi in 0u64..35) {
        let params = KneserParams::new(7, 3).unwrap();
        let verts = params.vertices();
        let (a, b) = (verts[lo as usize], verts[hi as usize]);
        prop_assume!(a.is_disjoint(b));
        let mut last = false;
        for step in 0..=10 {
            let oracle = EdgeOracle::new(params.clone(), step as f64 / 10.0, seed);
            let here = oracle.edge_present(a, b).unwrap();
            prop_assert_eq!(here, oracle.edge_present(b, a).unwrap());
            prop_assert!(!last || here);
            last = here;
        }
        prop_assert!(last);
    }

    #[test]
    fn ekr_indicator_is_monotone_in_p(seed: u64) {
        let params = KneserParams::new(5, 2).unwrap();
        let mut last = false;
        for step in 0..=20 {
            let oracle = EdgeOracle::new(params.clone(), step as f64 / 20.0, seed);
            let here = is_ekr(&oracle, SearchBudget::unlimited()).unwrap().is_ekr();
            prop_assert!(!last || here, "EKR lost at p = {}", step as f64 / 20.0);
            last = here;
        }
        prop_assert!(last);
    }
}
