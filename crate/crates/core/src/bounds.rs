//! The counting identities and inequality chain that lower-bound `e(F)` for a
//! non-star M-family, plus the union-bound sum they feed.
//!
//! Everything is evaluated on concrete families: integer identities must hold
//! with residual exactly zero, theorem-backed inequalities up to
//! [`SLACK`], and statements depending on the unspecified log-Sobolev
//! constant `γ` are reported rather than asserted.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{binomial, enumerate_k_subsets, subsets_of, ExactInt, KSubset};
use crate::error::{contract, domain, resource, Result};
use crate::johnson::{
    complement_level, edge_boundary, log_sobolev_ratio, spectral_gap, GapSource, JohnsonGraph,
    SpectralGap,
};
use crate::kneser::{family_stats, split_at_apex, Family, KneserParams};
use crate::sampling::{random_level_subset, sample_family, FamilySampling};

/// Allowance for rounding on real-valued, theorem-backed inequalities.
pub const SLACK: f64 = 1e-9;

/// Constants the bounds are evaluated with. None of them is pinned down
/// numerically by the underlying argument; all are exposed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundConfig {
    /// `ϑ`, the constant in the per-family edge lower bound.
    pub theta: f64,
    /// `γ`, the log-Sobolev constant of `J_1(m,k)`.
    pub gamma: f64,
    /// `ε`, for `p > 1 - ε` when `c = 1`.
    pub epsilon: f64,
    /// `C`, for `p > C p_0` when `c >= 2`.
    #[serde(rename = "bigC")]
    pub big_c: f64,
    /// `K >= 1` of the large-`a_F` theorem.
    #[serde(rename = "bigK")]
    pub big_k: f64,
    /// `ζ`; `None` means its admissible maximum `c / ((10K)^2 n)`.
    pub zeta: Option<f64>,
    /// Overrides `ξ` in the union bound (otherwise `ln(1/ε)` for `c = 1`,
    /// `p` for `c >= 2`).
    pub xi: Option<f64>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            theta: 0.05,
            gamma: 0.3,
            epsilon: 0.01,
            big_c: 100.0,
            big_k: 1.0,
            zeta: None,
            xi: None,
        }
    }
}

impl BoundConfig {
    pub fn zeta_for(&self, params: &KneserParams) -> f64 {
        self.zeta.unwrap_or_else(|| zeta_max(params, self.big_k))
    }

    pub fn xi_for(&self, params: &KneserParams, p: f64) -> f64 {
        match self.xi {
            Some(xi) => xi,
            None if params.c == 1 => (1.0 / self.epsilon).ln(),
            None => p,
        }
    }

    /// `ϑ < γ/5`, the condition under which the case analysis closes.
    pub fn theta_admissible(&self) -> bool {
        self.theta < self.gamma / 5.0
    }

    /// Smallest `p` the union bound is meant for: `1 - ε` or `C p_0`.
    pub fn p_floor(&self, params: &KneserParams) -> f64 {
        if params.c == 1 {
            1.0 - self.epsilon
        } else {
            self.big_c * params.p_zero
        }
    }
}

/// `c / ((10K)^2 n)`.
pub fn zeta_max(params: &KneserParams, big_k: f64) -> f64 {
    params.c as f64 / ((10.0 * big_k).powi(2) * params.n as f64)
}

/// The `(ε, C)` the argument accepts for a given `ϑ`: any `ε < e^{-5/ϑ}`,
/// any `C > 4/ϑ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SufficientConstants {
    pub epsilon_below: f64,
    #[serde(rename = "bigC_above")]
    pub big_c_above: f64,
}

pub fn sufficient_constants(theta: f64) -> Result<SufficientConstants> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(domain!("theta must be positive, got {theta}"));
    }
    Ok(SufficientConstants {
        epsilon_below: (-5.0 / theta).exp(),
        big_c_above: 4.0 / theta,
    })
}

/// An M-family split at an apex `x`, relabelled onto the ground set `[m]`
/// (`m = n - 1`) by deleting `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApexContext {
    pub params: KneserParams,
    pub family: Family,
    pub x: usize,
    /// `F \ F_x` as k-subsets of `[m]`.
    pub a: Vec<KSubset>,
    /// Complements of the missing star members, (k+c)-subsets of `[m]`.
    pub b: Vec<KSubset>,
    pub a_bar: Vec<KSubset>,
    pub b_bar: Vec<KSubset>,
    /// `μ_k(A) = |A| / N`
    pub mu: f64,
    /// Laplacian gap of `J_c(m,k)` used for the expansion bound.
    pub gap: SpectralGap,
}

/// Gap used when `c > k`: `J_c(m,k)` has no edges.
const EDGELESS_GAP: SpectralGap = SpectralGap {
    value: 0.0,
    source: GapSource::Formula,
};

/// The gap an [`ApexContext`] at these parameters needs; compute once and
/// reuse with [`ApexContext::with_gap`] across many families.
pub fn context_gap(params: &KneserParams) -> Result<SpectralGap> {
    if params.c > params.k {
        Ok(EDGELESS_GAP)
    } else {
        spectral_gap(params.m, params.k, params.c)
    }
}

impl ApexContext {
    pub fn new(params: &KneserParams, family: &Family, x: usize) -> Result<Self> {
        Self::with_gap(params, family, x, context_gap(params)?)
    }

    pub fn with_gap(
        params: &KneserParams,
        family: &Family,
        x: usize,
        gap: SpectralGap,
    ) -> Result<Self> {
        let split = split_at_apex(family, x, params)?;
        let a: Vec<KSubset> = split.a.iter().map(|s| s.remove_ground_element(x)).collect();
        let b: Vec<KSubset> = split.b.iter().map(|s| s.remove_ground_element(x)).collect();
        let (m, k, c) = (params.m, params.k, params.c);
        Ok(ApexContext {
            a_bar: complement_level(m, k, &a),
            b_bar: complement_level(m, k + c, &b),
            mu: a.len() as f64 / params.co_star_size as f64,
            a,
            b,
            params: params.clone(),
            family: family.clone(),
            x,
            gap,
        })
    }

    /// Context at the smallest apex of `family`.
    pub fn at_first_apex(params: &KneserParams, family: &Family, gap: SpectralGap) -> Result<Self> {
        Self::with_gap(params, family, family.apexes()[0], gap)
    }

    pub fn a_f(&self) -> ExactInt {
        self.a.len() as ExactInt
    }
}

/// `Λ(S, T)`: pairs `(A, B) ∈ S × T` with `A ⊆ B`.
pub fn lambda_count(s: &[KSubset], t: &[KSubset]) -> Result<ExactInt> {
    let level = |xs: &[KSubset], what: &str| -> Result<Option<usize>> {
        let mut it = xs.iter().map(|a| a.len());
        let first = it.next();
        if let Some(l) = first {
            if it.any(|x| x != l) {
                return Err(contract!("{what} mixes levels"));
            }
        }
        Ok(first)
    };
    if let (Some(ls), Some(lt)) = (level(s, "S")?, level(t, "T")?) {
        if ls > lt {
            return Err(contract!("S level {ls} above T level {lt}"));
        }
    }
    let mut count: ExactInt = 0;
    for a in s {
        count += t.iter().filter(|b| a.is_subset(**b)).count() as ExactInt;
    }
    Ok(count)
}

/// `Λ(Ā,B) - Λ(A,B̄) - C(k+c-1,c-1)|A|`; identically zero.
pub fn verify_mo1(ctx: &ApexContext) -> Result<i128> {
    let (k, c) = (ctx.params.k as u64, ctx.params.c as u64);
    let lhs = lambda_count(&ctx.a_bar, &ctx.b)? as i128;
    let rhs = lambda_count(&ctx.a, &ctx.b_bar)? as i128
        + (binomial(k + c - 1, c - 1) * ctx.a_f()) as i128;
    Ok(lhs - rhs)
}

/// Disjoint pairs inside a set of subsets.
fn disjoint_pairs(s: &[KSubset]) -> ExactInt {
    let mut n = 0;
    for (i, a) in s.iter().enumerate() {
        n += s[i + 1..].iter().filter(|b| a.is_disjoint(**b)).count() as ExactInt;
    }
    n
}

/// `e(F) - Λ(A,B̄) - e(A)`; identically zero.
pub fn verify_gle(ctx: &ApexContext) -> Result<i128> {
    let e_f = ctx.family.internal_edges() as i128;
    let lam = lambda_count(&ctx.a, &ctx.b_bar)? as i128;
    Ok(e_f - lam - disjoint_pairs(&ctx.a) as i128)
}

/// Counts the triples `(A', B, A'')` with `A' ∈ A`, `A'' ∉ A`, `A' ~_1 A''`
/// and `A' ∪ A'' ⊆ B ∈ C([m], k+c)` by enumeration, and returns
/// `Φ - β_1(A) C(m-k-1, c-1)`. On the apex ground set `m = 2k+c-1` the
/// multiplier is `C(k+c-2, c-1)`.
pub fn verify_mo2(m: usize, k: usize, c: usize, set: &[KSubset]) -> Result<i128> {
    let graph = JohnsonGraph::new(m, k, 1)?;
    if k + c > m {
        return Err(domain!("level k + c = {} exceeds m = {m}", k + c));
    }
    let members: HashSet<KSubset> = set.iter().copied().collect();
    if let Some(bad) = members.iter().find(|a| !graph.is_vertex(**a)) {
        return Err(contract!("{bad} is not a {k}-subset of [{m}]"));
    }
    let mut phi: ExactInt = 0;
    for &a in &members {
        for a2 in graph.neighbors(a).filter(|w| !members.contains(w)) {
            let union = a.union(a2);
            phi += subsets_of(union.complement_in(m), c - 1).count() as ExactInt;
        }
    }
    let beta1 = edge_boundary(m, k, 1, set)?;
    Ok(phi as i128 - (beta1 * binomial((m - k - 1) as u64, (c - 1) as u64)) as i128)
}

/// Both sides of the Λ lower bound from edge boundaries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaPropReport {
    pub beta_c: ExactInt,
    pub beta_1: ExactInt,
    /// `max{β_c/(2C(k,c)), C(k+c-2,c-1) β_1/(2ck)} - C(k+c-1,c-1)|A|/2`
    pub bound: f64,
    #[serde(skip)]
    pub bound_exact: Ratio<i128>,
    /// `Λ(A, B̄)`
    pub lambda: ExactInt,
    pub holds: bool,
}

pub fn betaprop_bound(ctx: &ApexContext) -> Result<BetaPropReport> {
    if ctx.a.is_empty() {
        return Err(domain!("the Λ bound needs a_F >= 1 (F is a star)"));
    }
    let (m, k, c) = (ctx.params.m, ctx.params.k, ctx.params.c);
    let (ku, cu) = (k as u64, c as u64);
    let beta_c = if c <= k {
        edge_boundary(m, k, c, &ctx.a)?
    } else {
        0
    };
    let beta_1 = edge_boundary(m, k, 1, &ctx.a)?;
    let first = if c <= k {
        Ratio::new(beta_c as i128, 2 * binomial(ku, cu) as i128)
    } else {
        Ratio::from_integer(0)
    };
    let second = Ratio::new(
        (binomial(ku + cu - 2, cu - 1) * beta_1) as i128,
        (2 * c * k) as i128,
    );
    let bound_exact =
        first.max(second) - Ratio::new((binomial(ku + cu - 1, cu - 1) * ctx.a_f()) as i128, 2);
    let lambda = lambda_count(&ctx.a, &ctx.b_bar)?;
    Ok(BetaPropReport {
        beta_c,
        beta_1,
        bound: ratio_f64(bound_exact),
        bound_exact,
        lambda,
        holds: Ratio::from_integer(lambda as i128) >= bound_exact,
    })
}

fn ratio_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The two arguments of the combined lower bound on `e(F)`, each scaled by
/// `(|A|/2) C(k+c-2, c-1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mainobs2Report {
    /// Expansion term from the context's gap:
    /// `λ|A|(1-μ)/(2C(k,c)) - C(k+c-1,c-1)|A|/2`.
    pub term1: f64,
    /// The same term in closed form with the formula gap:
    /// `(|A|/2) C(k+c-2,c-1) (1 - (m/k) μ)`.
    pub term1_closed_form: f64,
    /// `(|A|/2) C(k+c-2,c-1) ((γm/(ck)) ln(1/μ) - (k+c-1)/k)`
    pub term2: f64,
    pub edges: ExactInt,
    /// `e(F) >= term1` (theorem-backed).
    pub term1_holds: bool,
    /// `e(F) >= term2`; only meaningful for a calibrated `γ`.
    pub term2_holds: bool,
}

pub fn mainobs2_bound(ctx: &ApexContext, cfg: &BoundConfig) -> Result<Mainobs2Report> {
    if ctx.a.is_empty() || ctx.mu <= 0.0 {
        return Err(domain!("μ_k(A) = 0: the combined bound needs a_F >= 1"));
    }
    let (m, k, c) = (
        ctx.params.m as f64,
        ctx.params.k as f64,
        ctx.params.c as f64,
    );
    let (ku, cu) = (ctx.params.k as u64, ctx.params.c as u64);
    let size = ctx.a.len() as f64;
    let scale = size / 2.0 * binomial(ku + cu - 2, cu - 1) as f64;
    let star_pairs = binomial(ku + cu - 1, cu - 1) as f64 * size / 2.0;

    let term1 = if ctx.params.c <= ctx.params.k {
        ctx.gap.value * size * (1.0 - ctx.mu) / (2.0 * binomial(ku, cu) as f64) - star_pairs
    } else {
        -star_pairs
    };
    let term1_closed_form = scale * (1.0 - m / k * ctx.mu);
    let term2 = scale * (cfg.gamma * m / (c * k) * (1.0 / ctx.mu).ln() - (k + c - 1.0) / k);
    let edges = ctx.family.internal_edges();
    Ok(Mainobs2Report {
        term1,
        term1_closed_form,
        term2,
        edges,
        term1_holds: edges as f64 >= term1 - SLACK,
        term2_holds: edges as f64 >= term2 - SLACK,
    })
}

/// `e(F) k / (C(n-k-1,k-1) a_F ln(N/a_F))`: the largest `ϑ` for which the
/// per-family edge bound holds at `F`.
pub fn lemma_ml_ratio(family: &Family, params: &KneserParams) -> Result<f64> {
    if !family.is_non_star_m_family() {
        return Err(domain!(
            "the edge bound applies to non-star families of size M = {}",
            params.star_size
        ));
    }
    let a = family.a_f() as f64;
    let denom = params.cross_degree() as f64 * a * (params.co_star_size as f64 / a).ln();
    Ok(family.internal_edges() as f64 * params.k as f64 / denom)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaScan {
    /// Minimum of [`lemma_ml_ratio`] over the scanned families.
    pub theta_star: f64,
    pub argmin: Family,
    pub families: u64,
    pub min_edges: ExactInt,
    /// True when every family in `𝒞` was visited.
    pub exhaustive: bool,
}

impl ThetaScan {
    fn observe(&mut self, family: Family, params: &KneserParams) -> Result<()> {
        let r = lemma_ml_ratio(&family, params)?;
        self.families += 1;
        self.min_edges = self.min_edges.min(family.internal_edges());
        if r < self.theta_star {
            self.theta_star = r;
            self.argmin = family;
        }
        Ok(())
    }
}

/// Families scanned exhaustively at most.
pub const EXHAUSTIVE_FAMILY_BUDGET: ExactInt = 5_000_000;

/// Every non-star M-family, for parameter sets small enough to enumerate.
pub fn all_non_star_families(params: &KneserParams) -> Result<Vec<Family>> {
    let verts = params.vertices();
    let total = if verts.len() <= 64 {
        binomial(verts.len() as u64, params.star_size as u64)
    } else {
        ExactInt::MAX
    };
    if total > EXHAUSTIVE_FAMILY_BUDGET {
        return Err(resource!(
            "C({}, {}) families exceed the exhaustive budget of {EXHAUSTIVE_FAMILY_BUDGET}",
            params.vertex_count,
            params.star_size
        ));
    }
    let mut out = Vec::new();
    for pick in enumerate_k_subsets(verts.len(), params.star_size as usize) {
        let family = family_stats(pick.elements().map(|i| verts[i - 1]), params)?;
        if !family.is_star() {
            out.push(family);
        }
    }
    Ok(out)
}

/// Minimum Lemma ratio over every non-star M-family.
pub fn exhaustive_theta(params: &KneserParams) -> Result<ThetaScan> {
    let mut scan: Option<ThetaScan> = None;
    for family in all_non_star_families(params)? {
        observe(&mut scan, family, params)?;
    }
    let mut scan = scan.ok_or_else(|| domain!("no non-star families"))?;
    scan.exhaustive = true;
    Ok(scan)
}

fn observe(scan: &mut Option<ThetaScan>, family: Family, params: &KneserParams) -> Result<()> {
    match scan {
        Some(s) => s.observe(family, params),
        None => {
            *scan = Some(ThetaScan {
                theta_star: lemma_ml_ratio(&family, params)?,
                min_edges: family.internal_edges(),
                argmin: family,
                families: 1,
                exhaustive: false,
            });
            Ok(())
        }
    }
}

/// Every near-star family of the full graph, `(K_x \ {B}) ∪ {A}`.
pub fn all_near_star_families(params: &KneserParams) -> Result<Vec<Family>> {
    let mut out = Vec::new();
    for x in 1..=params.n {
        let star = params.star(x);
        for a in params.co_star(x) {
            for b in &star {
                let members = star
                    .iter()
                    .copied()
                    .filter(|t| t != b)
                    .chain(std::iter::once(a));
                let f = family_stats(members, params)?;
                if !f.is_star() {
                    out.push(f);
                }
            }
        }
    }
    Ok(out)
}

/// Minimum Lemma ratio over `samples` random non-star families plus all
/// near-star families. Not a certified global minimum.
pub fn sampled_theta<R: Rng + ?Sized>(
    params: &KneserParams,
    samples: usize,
    rng: &mut R,
) -> Result<ThetaScan> {
    let mut scan: Option<ThetaScan> = None;
    for f in all_near_star_families(params)? {
        observe(&mut scan, f, params)?;
    }
    for _ in 0..samples {
        let f = sample_family(params, rng, FamilySampling::Mixed)?;
        observe(&mut scan, f, params)?;
    }
    scan.ok_or_else(|| domain!("no families sampled"))
}

/// The large-`a_F` theorem evaluated at one family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DtBound {
    pub applicable: bool,
    pub zeta: f64,
    /// `ζ M C(n-k-1, k-1)`
    pub bound: f64,
    /// `e(F) > bound`, checked only when applicable.
    pub holds: Option<bool>,
}

pub fn dt_bound(params: &KneserParams, cfg: &BoundConfig, family: &Family) -> Result<DtBound> {
    if !family.is_non_star_m_family() {
        return Err(domain!(
            "the large-a_F bound applies to non-star M-families"
        ));
    }
    let zeta = cfg.zeta_for(params);
    let m = params.star_size as f64;
    let bound = zeta * m * params.cross_degree() as f64;
    let zeta_ok = zeta <= zeta_max(params, cfg.big_k);
    let a_large = family.a_f() as f64 > cfg.big_k * zeta * (params.n as f64 / params.c as f64) * m;
    let applicable = params.k >= 2 && cfg.big_k >= 1.0 && zeta_ok && a_large;
    Ok(DtBound {
        applicable,
        zeta,
        bound,
        holds: applicable.then(|| family.internal_edges() as f64 > bound),
    })
}

/// `ln x` for an arbitrarily large integer.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Largest a-range evaluated by [`union_bound_value`].
pub const UNION_BOUND_TERM_BUDGET: ExactInt = 20_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnionBound {
    pub value: f64,
    pub xi: f64,
    /// `⌊kN/n⌋`, the largest achievable `a_F`.
    pub a_max: ExactInt,
    /// Per-`a` summands (without the leading factor `n`).
    pub terms: Vec<f64>,
}

/// `n Σ_{0<a<=kN/n} C(M,a) C(N,a) exp[-ξ ϑ k^{-1} C(n-k-1,k-1) a ln(N/a)]`.
pub fn union_bound_value(params: &KneserParams, p: f64, cfg: &BoundConfig) -> Result<UnionBound> {
    if cfg.theta.is_nan() || cfg.theta <= 0.0 {
        return Err(domain!("theta must be positive, got {}", cfg.theta));
    }
    if cfg.xi.is_none() && params.c == 1 && !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(domain!("epsilon must lie in (0,1), got {}", cfg.epsilon));
    }
    if cfg.xi.is_none() && params.c >= 2 && !(0.0..=1.0).contains(&p) {
        return Err(domain!("p must lie in [0,1], got {p}"));
    }
    let xi = cfg.xi_for(params, p);
    let a_max = params.k as ExactInt * params.co_star_size / params.n as ExactInt;
    if a_max > UNION_BOUND_TERM_BUDGET {
        return Err(resource!(
            "{a_max} summands exceed the budget of {UNION_BOUND_TERM_BUDGET}"
        ));
    }
    let (big_m, big_n) = (params.star_size, params.co_star_size);
    let rate = xi * cfg.theta / params.k as f64 * params.cross_degree() as f64;

    let mut c_m = BigUint::from(1u32);
    let mut c_n = BigUint::from(1u32);
    let mut terms = Vec::with_capacity(a_max as usize);
    let mut sum = Neumaier::default();
    for a in 1..=a_max {
        // C(X, a) = C(X, a-1) (X - a + 1) / a, zero once a > X
        c_m = if a > big_m {
            BigUint::from(0u32)
        } else {
            c_m * (big_m - a + 1) / a
        };
        c_n = if a > big_n {
            BigUint::from(0u32)
        } else {
            c_n * (big_n - a + 1) / a
        };
        let log_term =
            ln_big(&c_m) + ln_big(&c_n) - rate * a as f64 * (big_n as f64 / a as f64).ln();
        let term = log_term.exp();
        terms.push(term);
        sum.add(term);
    }
    Ok(UnionBound {
        value: params.n as f64 * sum.total(),
        xi,
        a_max,
        terms,
    })
}

/// Compensated summation.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetBranch {
    /// `ln(1/μ) <= c/γ`: compare against the expansion term.
    Expansion,
    /// `ln(1/μ) > c/γ`: compare against the log-Sobolev term.
    LogSobolev,
}

/// The closing comparison of the argument at one context.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetReport {
    /// `(2(k+c-1)/(ck)) ϑ ln(N/a_F)`
    pub lhs: f64,
    /// `(4/c) ϑ ln(1/μ_k(A))`
    pub rhs: f64,
    pub lhs_below_rhs: bool,
    pub branch: TargetBranch,
    /// Unscaled max-argument for the selected branch.
    pub branch_term: f64,
    pub branch_term_exceeds_rhs: bool,
    /// `(γ/c) ln(1/μ)`, the floor the log-Sobolev term clears in its branch.
    pub log_sobolev_floor: f64,
    pub theta_admissible: bool,
    /// `a_F <= M / (100K)`, the regime the comparison is designed for.
    pub small_a_regime: bool,
}

pub fn target_comparison(ctx: &ApexContext, cfg: &BoundConfig) -> Result<TargetReport> {
    if ctx.a.is_empty() {
        return Err(domain!("target comparison needs a_F >= 1"));
    }
    let (m, k, c) = (
        ctx.params.m as f64,
        ctx.params.k as f64,
        ctx.params.c as f64,
    );
    let a_f = ctx.a.len() as f64;
    let log_n_over_a = (ctx.params.co_star_size as f64 / a_f).ln();
    let log_inv_mu = (1.0 / ctx.mu).ln();
    let lhs = 2.0 * (k + c - 1.0) / (c * k) * cfg.theta * log_n_over_a;
    let rhs = 4.0 / c * cfg.theta * log_inv_mu;
    let first = 1.0 - m / k * ctx.mu;
    let second = cfg.gamma * m / (c * k) * log_inv_mu - (k + c - 1.0) / k;
    let (branch, branch_term) = if log_inv_mu <= c / cfg.gamma {
        (TargetBranch::Expansion, first)
    } else {
        (TargetBranch::LogSobolev, second)
    };
    Ok(TargetReport {
        lhs,
        rhs,
        lhs_below_rhs: lhs < rhs,
        branch,
        branch_term,
        branch_term_exceeds_rhs: branch_term > rhs,
        log_sobolev_floor: cfg.gamma / c * log_inv_mu,
        theta_admissible: cfg.theta_admissible(),
        small_a_regime: a_f <= ctx.params.star_size as f64 / (100.0 * cfg.big_k),
    })
}

/// Smallest log-Sobolev ratio over a battery of subsets of `C([m], k)`:
/// every singleton, every "sub-star" `{A : y ∈ A}` and its complement, and
/// `random` uniformly drawn subsets.
pub fn calibrate_gamma<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    random: usize,
    rng: &mut R,
) -> Result<f64> {
    let level: Vec<KSubset> = enumerate_k_subsets(m, k).collect();
    let mut best = f64::INFINITY;
    let mut consider = |set: &[KSubset]| -> Result<()> {
        if !set.is_empty() && set.len() < level.len() {
            best = best.min(log_sobolev_ratio(m, k, set)?);
        }
        Ok(())
    };
    for &v in &level {
        consider(&[v])?;
    }
    for y in 1..=m {
        let (inside, outside): (Vec<KSubset>, Vec<KSubset>) =
            level.iter().partition(|a| a.contains(y));
        consider(&inside)?;
        consider(&outside)?;
    }
    for _ in 0..random {
        consider(&random_level_subset(m, k, rng))?;
    }
    Ok(best)
}
