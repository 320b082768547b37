//! Johnson graphs `J_i(m,k)`: closed-form eigenvalues, a dense numerical
//! cross-check, the Laplacian gap, and edge-boundary inequalities.

use std::collections::HashSet;

use num_rational::Ratio;
use serde::Serialize;

use crate::combinatorics::{
    binomial, colex_rank, enumerate_k_subsets, subsets_of, ExactInt, KSubset, MAX_GROUND,
};
use crate::error::{contract, domain, resource, Result};
use crate::linalg::symmetric_eigenvalues;

/// Largest vertex count the dense eigensolver is asked to handle.
pub const DENSE_BUDGET: ExactInt = 300;

/// `J_i(m,k)`: vertices are the k-subsets of `[m]`, adjacent iff
/// `|A Δ B| = 2i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JohnsonGraph {
    pub m: usize,
    pub k: usize,
    pub i: usize,
    pub degree: ExactInt,
}

impl JohnsonGraph {
    pub fn new(m: usize, k: usize, i: usize) -> Result<Self> {
        if m > MAX_GROUND {
            return Err(domain!("m = {m} exceeds {MAX_GROUND}"));
        }
        if k > m || i == 0 || i > k {
            return Err(domain!("J_{i}({m},{k}) needs 1 <= i <= k <= m"));
        }
        Ok(JohnsonGraph {
            m,
            k,
            i,
            degree: binomial(k as u64, i as u64) * binomial((m - k) as u64, i as u64),
        })
    }

    pub fn vertex_count(&self) -> ExactInt {
        binomial(self.m as u64, self.k as u64)
    }

    pub fn vertices(&self) -> impl Iterator<Item = KSubset> {
        enumerate_k_subsets(self.m, self.k)
    }

    pub fn is_vertex(&self, a: KSubset) -> bool {
        a.len() == self.k && a.max_element() <= self.m
    }

    /// Neighbours of `a`: swap `i` members out for `i` non-members.
    pub fn neighbors(&self, a: KSubset) -> impl Iterator<Item = KSubset> + '_ {
        let outside = a.complement_in(self.m);
        subsets_of(a, self.i).flat_map(move |out| {
            subsets_of(outside, self.i)
                .map(move |inn| KSubset::from_bits(a.bits() ^ out.bits() ^ inn.bits()))
        })
    }

    /// Number of edges `C(m,k) · D / 2`.
    pub fn edge_count(&self) -> ExactInt {
        self.vertex_count() * self.degree / 2
    }
}

fn check_spectral_domain(m: usize, k: usize, c: usize) -> Result<()> {
    if m > MAX_GROUND || 2 * k > m || c == 0 || c > k {
        return Err(domain!(
            "eigenvalue formulas need 1 <= c <= k <= m/2, got m = {m}, k = {k}, c = {c}"
        ));
    }
    Ok(())
}

/// `S^j_i = C(j,i) C(k-j,c-i) C(m-k-j,c-i)`.
pub fn s_term(m: usize, k: usize, c: usize, j: usize, i: usize) -> ExactInt {
    if i > c || j > k || k + j > m {
        return 0;
    }
    binomial(j as u64, i as u64)
        * binomial((k - j) as u64, (c - i) as u64)
        * binomial((m - k - j) as u64, (c - i) as u64)
}

/// `λ_j = Σ_{i=0..c} (-1)^i S^j_i`, exactly.
pub fn adjacency_eigenvalue_exact(m: usize, k: usize, c: usize, j: usize) -> Result<i128> {
    check_spectral_domain(m, k, c)?;
    if j > k {
        return Err(domain!("eigenvalue index j = {j} exceeds k = {k}"));
    }
    Ok((0..=c)
        .map(|i| {
            let s = s_term(m, k, c, j, i) as i128;
            if i % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .sum())
}

pub fn adjacency_eigenvalue(m: usize, k: usize, c: usize, j: usize) -> Result<f64> {
    adjacency_eigenvalue_exact(m, k, c, j).map(|v| v as f64)
}

/// Multiplicity `C(m,j) - C(m,j-1)` of the `j`-th eigenspace.
pub fn eigenvalue_multiplicity(m: usize, j: usize) -> ExactInt {
    let prev = if j == 0 {
        0
    } else {
        binomial(m as u64, j as u64 - 1)
    };
    binomial(m as u64, j as u64) - prev
}

/// Closed-form Laplacian gap `λ = (m/k) C(k,c) C(m-k-1,c-1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapFormula {
    pub value: f64,
    #[serde(skip)]
    pub exact: Ratio<i128>,
    /// `k > 6c`, where the formula is known to be the smallest nonzero
    /// Laplacian eigenvalue.
    pub proven_regime: bool,
}

pub fn laplacian_gap_formula(m: usize, k: usize, c: usize) -> Result<GapFormula> {
    check_spectral_domain(m, k, c)?;
    let num = m as i128
        * binomial(k as u64, c as u64) as i128
        * binomial((m - k - 1) as u64, (c - 1) as u64) as i128;
    let exact = Ratio::new(num, k as i128);
    Ok(GapFormula {
        value: num as f64 / k as f64,
        exact,
        proven_regime: k > 6 * c,
    })
}

/// Full spectrum of `J_c(m,k)` from the formula, each `λ_j` repeated by its
/// multiplicity, ascending.
pub fn formula_spectrum(m: usize, k: usize, c: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for j in 0..=k {
        let lam = adjacency_eigenvalue(m, k, c, j)?;
        out.extend(std::iter::repeat_n(
            lam,
            eigenvalue_multiplicity(m, j) as usize,
        ));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Dense adjacency matrix of `J_i(m,k)` in colex order.
pub fn adjacency_matrix(graph: &JohnsonGraph) -> Vec<f64> {
    let size = graph.vertex_count() as usize;
    let mut a = vec![0.0; size * size];
    for (r, v) in graph.vertices().enumerate() {
        for w in graph.neighbors(v) {
            a[r * size + colex_rank(w) as usize] = 1.0;
        }
    }
    a
}

/// Spectrum of `J_c(m,k)` computed numerically from its adjacency matrix,
/// ascending.
pub fn dense_spectrum_oracle(m: usize, k: usize, c: usize) -> Result<Vec<f64>> {
    let graph = JohnsonGraph::new(m, k, c)?;
    let size = graph.vertex_count();
    if size > DENSE_BUDGET {
        return Err(resource!(
            "J_{c}({m},{k}) has {size} vertices; dense budget is {DENSE_BUDGET}"
        ));
    }
    let mut a = adjacency_matrix(&graph);
    symmetric_eigenvalues(&mut a, size as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub m: usize,
    pub k: usize,
    pub c: usize,
    /// `λ_j`, `j = 0..=k`
    pub formula_eigenvalues: Vec<i128>,
    pub multiplicities: Vec<ExactInt>,
    /// `s_table[j][i] = S^j_i`
    pub s_table: Vec<Vec<ExactInt>>,
    /// `None` when the graph is over the dense budget.
    pub numeric_eigenvalues: Option<Vec<f64>>,
    pub laplacian_gap_formula: GapFormula,
    pub laplacian_gap_numeric: Option<f64>,
    /// Per `j`, the largest deviation between `λ_j` and the numeric
    /// eigenvalues it is matched with after sorting both multisets.
    pub residuals: Option<Vec<f64>>,
}

impl SpectrumReport {
    pub fn max_residual(&self) -> Option<f64> {
        self.residuals
            .as_ref()
            .map(|r| r.iter().copied().fold(0.0, f64::max))
    }
}

pub fn spectrum_report(m: usize, k: usize, c: usize) -> Result<SpectrumReport> {
    check_spectral_domain(m, k, c)?;
    let formula_eigenvalues = (0..=k)
        .map(|j| adjacency_eigenvalue_exact(m, k, c, j))
        .collect::<Result<Vec<_>>>()?;
    let multiplicities: Vec<ExactInt> = (0..=k).map(|j| eigenvalue_multiplicity(m, j)).collect();
    let s_table = (0..=k)
        .map(|j| (0..=c).map(|i| s_term(m, k, c, j, i)).collect())
        .collect();
    let gap = laplacian_gap_formula(m, k, c)?;

    let numeric = if binomial(m as u64, k as u64) <= DENSE_BUDGET {
        Some(dense_spectrum_oracle(m, k, c)?)
    } else {
        None
    };
    let (gap_numeric, residuals) = match &numeric {
        Some(num) => {
            let degree = formula_eigenvalues[0] as f64;
            let second = num.iter().rev().nth(1).copied().unwrap_or(degree);
            let mut tagged: Vec<(f64, usize)> = formula_eigenvalues
                .iter()
                .zip(&multiplicities)
                .enumerate()
                .flat_map(|(j, (&l, &mult))| std::iter::repeat_n((l as f64, j), mult as usize))
                .collect();
            tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut res = vec![0.0f64; k + 1];
            for ((l, j), x) in tagged.iter().zip(num) {
                res[*j] = res[*j].max((l - x).abs());
            }
            (Some(degree - second), Some(res))
        }
        None => (None, None),
    };

    Ok(SpectrumReport {
        m,
        k,
        c,
        formula_eigenvalues,
        multiplicities,
        s_table,
        numeric_eigenvalues: numeric,
        laplacian_gap_formula: gap,
        laplacian_gap_numeric: gap_numeric,
        residuals,
    })
}

fn check_members(graph: &JohnsonGraph, set: &[KSubset]) -> Result<HashSet<KSubset>> {
    let mut members = HashSet::with_capacity(set.len());
    for &a in set {
        if !graph.is_vertex(a) {
            return Err(contract!(
                "{a} is not a {}-subset of [{}]",
                graph.k,
                graph.m
            ));
        }
        members.insert(a);
    }
    Ok(members)
}

/// Vertex cap for [`sparse_gap_numeric`].
pub const SPARSE_BUDGET: ExactInt = 200_000;
const POWER_MAX_ITERS: usize = 20_000;

/// `D - (second largest adjacency eigenvalue)` of `J_c(m,k)` without forming
/// the matrix: power iteration on `A + D I` orthogonal to the constant
/// vector, read off through the Rayleigh quotient.
pub fn sparse_gap_numeric(m: usize, k: usize, c: usize) -> Result<f64> {
    let graph = JohnsonGraph::new(m, k, c)?;
    let size = graph.vertex_count();
    if size > SPARSE_BUDGET {
        return Err(resource!(
            "J_{c}({m},{k}) has {size} vertices; sparse budget is {SPARSE_BUDGET}"
        ));
    }
    let size = size as usize;
    let degree = graph.degree as f64;
    let adj: Vec<Vec<u32>> = graph
        .vertices()
        .map(|v| graph.neighbors(v).map(|w| colex_rank(w) as u32).collect())
        .collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        for (i, row) in adj.iter().enumerate() {
            y[i] = degree * x[i] + row.iter().map(|&j| x[j as usize]).sum::<f64>();
        }
    };
    let center_normalize = |x: &mut [f64]| {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v -= mean);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    };

    let mut x: Vec<f64> = (0..size)
        .map(|i| {
            ((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    center_normalize(&mut x);
    let mut y = vec![0.0; size];
    let mut previous = f64::NAN;
    for _ in 0..POWER_MAX_ITERS {
        apply(&x, &mut y);
        let q: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        if (q - previous).abs() <= 1e-15 * q.abs().max(1.0) {
            return Ok(2.0 * degree - q);
        }
        previous = q;
        std::mem::swap(&mut x, &mut y);
        center_normalize(&mut x);
    }
    Err(resource!(
        "power iteration on J_{c}({m},{k}) did not settle"
    ))
}

/// `β_i(A)`: edges of `J_i(m,k)` leaving `A`.
pub fn edge_boundary(m: usize, k: usize, i: usize, set: &[KSubset]) -> Result<ExactInt> {
    let graph = JohnsonGraph::new(m, k, i)?;
    let members = check_members(&graph, set)?;
    Ok(members
        .iter()
        .map(|&a| graph.neighbors(a).filter(|b| !members.contains(b)).count() as ExactInt)
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapSource {
    Formula,
    Numeric,
}

/// The Laplacian gap used by the expansion bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralGap {
    pub value: f64,
    pub source: GapSource,
}

/// Formula gap when `k > 6c`, otherwise `D - (second largest adjacency
/// eigenvalue)` from the dense solver.
pub fn spectral_gap(m: usize, k: usize, c: usize) -> Result<SpectralGap> {
    let formula = laplacian_gap_formula(m, k, c)?;
    if formula.proven_regime {
        return Ok(SpectralGap {
            value: formula.value,
            source: GapSource::Formula,
        });
    }
    let spectrum = dense_spectrum_oracle(m, k, c)?;
    let degree = adjacency_eigenvalue(m, k, c, 0)?;
    let second = spectrum.iter().rev().nth(1).copied().unwrap_or(degree);
    Ok(SpectralGap {
        value: degree - second,
        source: GapSource::Numeric,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlonMilmanReport {
    /// `β_c(A)`
    pub lhs: f64,
    /// `λ |A| (1 - μ_k(A))`
    pub rhs: f64,
    pub margin: f64,
    pub gap: SpectralGap,
}

/// Evaluates `β_c(A) >= λ |A| (1 - μ_k(A))` with a precomputed gap.
pub fn alon_milman_with_gap(
    m: usize,
    k: usize,
    c: usize,
    gap: SpectralGap,
    set: &[KSubset],
) -> Result<AlonMilmanReport> {
    let boundary = edge_boundary(m, k, c, set)? as f64;
    let size = set.iter().collect::<HashSet<_>>().len() as f64;
    let mu = size / binomial(m as u64, k as u64) as f64;
    let rhs = gap.value * size * (1.0 - mu);
    Ok(AlonMilmanReport {
        lhs: boundary,
        rhs,
        margin: boundary - rhs,
        gap,
    })
}

pub fn check_alon_milman(
    m: usize,
    k: usize,
    c: usize,
    set: &[KSubset],
) -> Result<AlonMilmanReport> {
    let gap = spectral_gap(m, k, c)?;
    alon_milman_with_gap(m, k, c, gap, set)
}

/// `β_1(A) / (m |A| ln(1/μ_k(A)))`: the log-Sobolev constant attained by `A`.
pub fn log_sobolev_ratio(m: usize, k: usize, set: &[KSubset]) -> Result<f64> {
    let graph = JohnsonGraph::new(m, k, 1)?;
    let members = check_members(&graph, set)?;
    let total = graph.vertex_count();
    if members.is_empty() || members.len() as ExactInt == total {
        return Err(domain!("log-Sobolev ratio needs a proper nonempty subset"));
    }
    let boundary = edge_boundary(m, k, 1, set)? as f64;
    let size = members.len() as f64;
    let mu = size / total as f64;
    Ok(boundary / (m as f64 * size * (1.0 / mu).ln()))
}

/// All of `Γ_k = C([m], k)` minus `set`.
pub fn complement_level(m: usize, k: usize, set: &[KSubset]) -> Vec<KSubset> {
    let members: HashSet<KSubset> = set.iter().copied().collect();
    enumerate_k_subsets(m, k)
        .filter(|a| !members.contains(a))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> KSubset {
        KSubset::parse(s).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(adjacency_eigenvalue_exact(4, 2, 1, 0).unwrap(), 4);
        assert_eq!(adjacency_eigenvalue_exact(4, 2, 1, 1).unwrap(), 0);
        assert_eq!(adjacency_eigenvalue_exact(4, 2, 1, 2).unwrap(), -2);
        assert_eq!(adjacency_eigenvalue_exact(8, 3, 2, 0).unwrap(), 30);
        assert!(adjacency_eigenvalue(4, 3, 1, 0).is_err());
        assert!(adjacency_eigenvalue(8, 3, 4, 0).is_err());
        assert!(adjacency_eigenvalue(8, 3, 1, 4).is_err());
    }

    #[test]
    fn degree_matches_neighbor_count() {
        let g = JohnsonGraph::new(8, 3, 2).unwrap();
        assert_eq!(g.degree, 30);
        for v in g.vertices() {
            let nb: Vec<_> = g.neighbors(v).collect();
            assert_eq!(nb.len() as u128, g.degree);
            assert!(nb.iter().all(|w| sym_diff(v, *w) == 2));
        }
    }

    fn sym_diff(a: KSubset, b: KSubset) -> usize {
        crate::combinatorics::sym_diff_half(a, b).unwrap()
    }

    #[test]
    fn gap_examples() {
        let g = laplacian_gap_formula(13, 2, 1).unwrap();
        assert_eq!(g.value, 13.0);
        assert!(!g.proven_regime);
        assert_eq!(laplacian_gap_formula(25, 4, 2).unwrap().value, 750.0);
        assert_eq!(
            laplacian_gap_formula(4, 2, 1).unwrap().exact,
            Ratio::from_integer(4)
        );
        assert!(laplacian_gap_formula(30, 7, 1).unwrap().proven_regime);
        let sparse = sparse_gap_numeric(8, 3, 1).unwrap();
        assert!((sparse - spectral_gap(8, 3, 1).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn octahedron_spectrum() {
        let spec = dense_spectrum_oracle(4, 2, 1).unwrap();
        let want = [-2.0, -2.0, 0.0, 0.0, 0.0, 4.0];
        for (x, y) in spec.iter().zip(want) {
            assert!((x - y).abs() < 1e-10);
        }
        assert_eq!(dense_spectrum_oracle(6, 3, 1).unwrap().len(), 20);
        let trace: f64 = dense_spectrum_oracle(7, 3, 2).unwrap().iter().sum();
        assert!(trace.abs() < 1e-8);
        assert!(matches!(
            dense_spectrum_oracle(12, 6, 1),
            Err(crate::Error::Resource(_))
        ));
    }

    #[test]
    fn report_for_octahedron() {
        let r = spectrum_report(4, 2, 1).unwrap();
        assert_eq!(r.formula_eigenvalues, vec![4, 0, -2]);
        assert_eq!(r.multiplicities, vec![1, 3, 2]);
        assert!((r.laplacian_gap_numeric.unwrap() - 4.0).abs() < 1e-10);
        assert!(r.max_residual().unwrap() < 1e-10);
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(edge_boundary(4, 2, 1, &[]).unwrap(), 0);
        let all: Vec<_> = enumerate_k_subsets(4, 2).collect();
        assert_eq!(edge_boundary(4, 2, 1, &all).unwrap(), 0);
        assert_eq!(edge_boundary(4, 2, 1, &[set("12")]).unwrap(), 4);
        assert!(edge_boundary(4, 2, 1, &[set("123")]).is_err());
    }

    #[test]
    fn alon_milman_examples() {
        let r = check_alon_milman(4, 2, 1, &[set("12")]).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert!((r.rhs - 4.0 * 5.0 / 6.0).abs() < 1e-12);
        assert!((r.margin - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.gap.source, GapSource::Numeric);

        let all: Vec<_> = enumerate_k_subsets(4, 2).collect();
        let r = check_alon_milman(4, 2, 1, &all).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let r = check_alon_milman(4, 2, 1, &[]).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn log_sobolev_examples() {
        let r = log_sobolev_ratio(4, 2, &[set("12")]).unwrap();
        assert!((r - 4.0 / (4.0 * 6f64.ln())).abs() < 1e-12);
        assert!((r - 0.5581).abs() < 1e-4);

        let mut all: Vec<_> = enumerate_k_subsets(4, 2).collect();
        assert!(log_sobolev_ratio(4, 2, &all).is_err());
        assert!(log_sobolev_ratio(4, 2, &[]).is_err());
        all.pop();
        let r = log_sobolev_ratio(4, 2, &all).unwrap();
        assert!(r.is_finite() && r > 0.0);

        // every singleton attains D_1 / (m ln C(m,k))
        for (m, k) in [(6, 3), (7, 2), (8, 4)] {
            let d1 = (k * (m - k)) as f64;
            let want = d1 / (m as f64 * (binomial(m as u64, k as u64) as f64).ln());
            let min = enumerate_k_subsets(m, k)
                .map(|v| log_sobolev_ratio(m, k, &[v]).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!((min - want).abs() < 1e-12);
        }
    }
}
