//! Exact binomials, fixed-width k-subsets of a ground set `[n]`, and colex
//! ranking/enumeration.
//!
//! Ground-set elements are 1-based: element `i` lives in bit `i - 1`. Under
//! that layout colex order on k-subsets coincides with numeric order of the
//! bit masks, which is what makes ranking a closed-form sum and enumeration a
//! bit trick.

use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{contract, Error, Result};

/// Exact integer counts. Every binomial with top argument at most 64 fits,
/// as do all the pair/triple counts computed at desk scale.
pub type ExactInt = u128;

/// Largest supported ground set.
pub const MAX_GROUND: usize = 64;

/// `C(a, b)`, zero when `b > a`.
///
/// Exact for every `a <= 64`; panics if the value overflows `u128`, which
/// only happens far outside that range.
pub fn binomial(a: u64, b: u64) -> ExactInt {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 1..=b as u128 {
        // acc * (a - b + i) is divisible by i at every step
        acc = acc
            .checked_mul(a as u128 - b as u128 + i)
            .expect("binomial overflowed u128")
            / i;
    }
    acc
}

/// `C(a, b)` for a top argument that may itself be a large count (e.g. the
/// star size `M`), computed in arbitrary precision.
pub fn binomial_big(a: u128, b: u128) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b);
    let mut acc = BigUint::from(1u32);
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

/// A subset of `[64]` stored as one machine word.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSubset {
    bits: u64,
}

impl KSubset {
    pub const EMPTY: KSubset = KSubset { bits: 0 };

    /// Builds a subset from 1-based elements. Duplicates and elements outside
    /// `1..=64` are rejected.
    pub fn from_elements(elements: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > MAX_GROUND {
                return Err(contract!("element {e} outside 1..={MAX_GROUND}"));
            }
            let b = 1u64 << (e - 1);
            if bits & b != 0 {
                return Err(contract!("duplicate element {e}"));
            }
            bits |= b;
        }
        Ok(KSubset { bits })
    }

    /// Parses compact digit notation such as `"134"` (only for ground sets
    /// of at most 9 elements) or comma separated `"1,3,4"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let elements: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| contract!("bad subset {s:?}: {e}"))?
        } else {
            s.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| contract!("bad subset {s:?}"))
                })
                .collect::<Result<_>>()?
        };
        Self::from_elements(&elements)
    }

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        KSubset { bits }
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(self, element: usize) -> bool {
        (1..=MAX_GROUND).contains(&element) && self.bits >> (element - 1) & 1 == 1
    }

    /// Largest element, 0 for the empty set.
    #[inline]
    pub fn max_element(self) -> usize {
        64 - self.bits.leading_zeros() as usize
    }

    #[inline]
    pub fn is_disjoint(self, other: KSubset) -> bool {
        self.bits & other.bits == 0
    }

    #[inline]
    pub fn is_subset(self, other: KSubset) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn union(self, other: KSubset) -> KSubset {
        KSubset::from_bits(self.bits | other.bits)
    }

    #[inline]
    pub fn intersection(self, other: KSubset) -> KSubset {
        KSubset::from_bits(self.bits & other.bits)
    }

    /// `[n] \ self`.
    #[inline]
    pub fn complement_in(self, n: usize) -> KSubset {
        KSubset::from_bits(!self.bits & ground_mask(n))
    }

    /// Elements in ascending order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        BitIter(self.bits).map(|b| b + 1)
    }

    /// Deletes element `x` from the ground set: elements above `x` shift down
    /// by one. The set must not contain `x`.
    pub fn remove_ground_element(self, x: usize) -> KSubset {
        debug_assert!(!self.contains(x));
        let low = self.bits & ground_mask(x - 1);
        let high = if x >= 64 {
            0
        } else {
            (self.bits >> x) << (x - 1)
        };
        KSubset::from_bits(low | high)
    }

    /// Inverse of [`remove_ground_element`](Self::remove_ground_element).
    pub fn insert_ground_element(self, x: usize) -> KSubset {
        let low = self.bits & ground_mask(x - 1);
        let high = (self.bits >> (x - 1)) << x;
        KSubset::from_bits(low | high)
    }
}

impl fmt::Debug for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for KSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

/// Mask with the low `n` bits set.
#[inline]
pub fn ground_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the positions (0-based) of set bits.
#[derive(Clone, Copy)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let t = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(t)
    }
}

/// Colex rank `sum_i C(s_i - 1, i)` over the ascending elements `s_1 < .. < s_k`.
/// The empty set has rank 0.
pub fn colex_rank(s: KSubset) -> u64 {
    s.elements()
        .enumerate()
        .map(|(i, e)| binomial(e as u64 - 1, i as u64 + 1) as u64)
        .sum()
}

/// Inverse of [`colex_rank`] for subsets of size `k` drawn from `[64]`.
pub fn colex_unrank(rank: u64, k: usize) -> Result<KSubset> {
    if k > MAX_GROUND {
        return Err(Error::Range(format!("k = {k} exceeds {MAX_GROUND}")));
    }
    if rank as u128 >= binomial(MAX_GROUND as u64, k as u64) {
        return Err(Error::Range(format!(
            "rank {rank} out of range for {k}-subsets of [{MAX_GROUND}]"
        )));
    }
    let mut r = rank as u128;
    let mut bits = 0u64;
    // the i-th element s satisfies C(s-1, i) <= r < C(s, i)
    let mut hi = MAX_GROUND as u64;
    for i in (1..=k as u64).rev() {
        let mut s = i;
        while s < hi && binomial(s, i) <= r {
            s += 1;
        }
        r -= binomial(s - 1, i);
        bits |= 1 << (s - 1);
        hi = s - 1;
    }
    Ok(KSubset::from_bits(bits))
}

/// Rank-bounded unranking: fails unless `rank < C(n, k)`.
pub fn colex_unrank_in(rank: u64, n: usize, k: usize) -> Result<KSubset> {
    if rank as u128 >= binomial(n as u64, k as u64) {
        return Err(Error::Range(format!(
            "rank {rank} out of range for {k}-subsets of [{n}]"
        )));
    }
    colex_unrank(rank, k)
}

/// All `k`-subsets of `[n]` in colex order (Gosper's hack on the bit mask).
#[derive(Clone, Debug)]
pub struct KSubsets {
    next: Option<u64>,
    limit: u128,
}

pub fn enumerate_k_subsets(n: usize, k: usize) -> KSubsets {
    assert!(n <= MAX_GROUND, "ground set larger than {MAX_GROUND}");
    let next = (k <= n).then(|| ground_mask(k));
    KSubsets {
        next,
        limit: 1u128 << n,
    }
}

impl Iterator for KSubsets {
    type Item = KSubset;

    fn next(&mut self) -> Option<KSubset> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let (r, overflow) = cur.overflowing_add(c);
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (!overflow && (nxt as u128) < self.limit).then_some(nxt)
        };
        Some(KSubset::from_bits(cur))
    }
}

/// All `size`-subsets of the elements of `mask`, in colex order.
pub fn subsets_of(mask: KSubset, size: usize) -> impl Iterator<Item = KSubset> {
    let positions: Vec<usize> = BitIter(mask.bits()).collect();
    enumerate_k_subsets(positions.len(), size).map(move |compact| {
        let mut bits = 0u64;
        for b in BitIter(compact.bits()) {
            bits |= 1 << positions[b];
        }
        KSubset::from_bits(bits)
    })
}

/// `|A Δ B| / 2` for equal-size sets, i.e. the Johnson distance.
pub fn sym_diff_half(a: KSubset, b: KSubset) -> Result<usize> {
    if a.len() != b.len() {
        return Err(contract!(
            "sym_diff_half needs equal sizes, got {} and {}",
            a.len(),
            b.len()
        ));
    }
    Ok((a.bits() ^ b.bits()).count_ones() as usize / 2)
}
