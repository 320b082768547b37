//! Random families and vertex subsets for the sampled verification sweeps.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{enumerate_k_subsets, KSubset};
use crate::error::Result;
use crate::kneser::{family_stats, Family, KneserParams};

/// Generator behind every seeded sweep.
pub type SweepRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SweepRng {
    SweepRng::seed_from_u64(seed)
}

/// How to draw a non-star M-family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySampling {
    /// Uniform M-subset of the vertex set, stars rejected.
    Uniform,
    /// A star with a uniformly chosen number `1..=⌊kN/n⌋` of members swapped
    /// for outside vertices; concentrates on small `a_F`.
    PerturbedStar,
    /// Even split between the two.
    Mixed,
}

/// Draws a family `F ∈ 𝒞` (non-star, size `M`).
pub fn sample_family<R: Rng + ?Sized>(
    params: &KneserParams,
    rng: &mut R,
    mode: FamilySampling,
) -> Result<Family> {
    let verts = params.vertices();
    let m = params.star_size as usize;
    let mode = match mode {
        FamilySampling::Mixed if rng.gen_bool(0.5) => FamilySampling::Uniform,
        FamilySampling::Mixed => FamilySampling::PerturbedStar,
        other => other,
    };
    loop {
        let members: Vec<KSubset> = match mode {
            FamilySampling::Uniform => index::sample(rng, verts.len(), m)
                .into_iter()
                .map(|i| verts[i])
                .collect(),
            _ => {
                let x = rng.gen_range(1..=params.n);
                let star = params.star(x);
                let outer = params.co_star(x);
                let a_max =
                    (params.k as u128 * params.co_star_size / params.n as u128).max(1) as usize;
                let a = rng.gen_range(1..=a_max.min(outer.len()).min(star.len()));
                let mut keep = vec![true; star.len()];
                for i in index::sample(rng, star.len(), a) {
                    keep[i] = false;
                }
                star.iter()
                    .zip(&keep)
                    .filter(|(_, &k)| k)
                    .map(|(s, _)| *s)
                    .chain(
                        index::sample(rng, outer.len(), a)
                            .into_iter()
                            .map(|i| outer[i]),
                    )
                    .collect()
            }
        };
        let family = family_stats(members, params)?;
        if !family.is_star() {
            return Ok(family);
        }
    }
}

/// Uniformly random subset of `C([m], k)` of uniformly random size in
/// `0..=C(m,k)`.
pub fn random_level_subset<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Vec<KSubset> {
    let level: Vec<KSubset> = enumerate_k_subsets(m, k).collect();
    let size = rng.gen_range(0..=level.len());
    index::sample(rng, level.len(), size)
        .into_iter()
        .map(|i| level[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_families_are_in_cee() {
        let params = KneserParams::new(7, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for mode in [
            FamilySampling::Uniform,
            FamilySampling::PerturbedStar,
            FamilySampling::Mixed,
        ] {
            for _ in 0..200 {
                let f = sample_family(&params, &mut rng, mode).unwrap();
                assert!(f.is_non_star_m_family());
                assert!(f.a_f() >= 1);
            }
        }
    }

    #[test]
    fn level_subsets_are_on_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = random_level_subset(6, 3, &mut rng);
            assert!(s.len() <= 20);
            assert!(s.iter().all(|a| a.len() == 3 && a.max_element() <= 6));
        }
    }
}
