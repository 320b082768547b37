use ekr_core::bounds::{
    calibrate_gamma, exhaustive_theta, sampled_theta, sufficient_constants, union_bound_value,
    zeta_max, EXHAUSTIVE_FAMILY_BUDGET,
};
use ekr_core::combinatorics::binomial;
use ekr_core::johnson::{spectrum_report, DENSE_BUDGET};
use ekr_core::kneser::{near_star_candidate_count, KneserParams};
use ekr_core::montecarlo::{
    default_mode, estimate_pc_with, near_star_rate, pc_trend_report, TrialPlan,
};
use ekr_core::sampling::seeded_rng;
use ekr_core::suites::{alon_milman_suite, bound_suite, identity_suite, Sweep};
use ekr_core::{Error, Result};
use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::report::Outcome;

/// Spectrum residual tolerance.
pub const SPECTRUM_TOL: f64 = 1e-8;
/// Johnson levels larger than this skip the log-Sobolev calibration.
const CALIBRATION_LEVEL_MAX: u128 = 5_000;

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Params => params(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::VerifyIdentities => verify_identities(cfg),
        Command::VerifyBounds => verify_bounds(cfg),
        Command::ThetaScan => theta_scan(cfg),
        Command::UnionBound => union_bound(cfg),
        Command::EstimatePc => estimate_pc(cfg),
        Command::Trend => trend(cfg),
        Command::NearStar => near_star(cfg),
    }
}

fn kneser(cfg: &RunConfig) -> Result<KneserParams> {
    KneserParams::new(cfg.n, cfg.k)
}

/// Exhaustive when all `C(V, M)` M-families fit in `trials`.
fn sweep(params: &KneserParams, cfg: &RunConfig) -> Sweep {
    let v = params.vertex_count;
    let total = if v <= 64 {
        binomial(v as u64, params.star_size as u64)
    } else {
        u128::MAX
    };
    if total <= cfg.trials as u128 && total <= EXHAUSTIVE_FAMILY_BUDGET {
        Sweep::Exhaustive
    } else {
        Sweep::Sampled {
            count: cfg.trials,
            seed: cfg.seed,
        }
    }
}

fn params(cfg: &RunConfig) -> Result<Outcome> {
    let p = kneser(cfg)?;
    let bounds = cfg.bound_config();
    let mut o = Outcome::default();
    o.row(json!({
        "n": p.n,
        "k": p.k,
        "c": p.c,
        "m": p.m,
        "M": p.star_size,
        "N": p.co_star_size,
        "vertices": p.vertex_count,
        "kneser_degree": p.kneser_degree(),
        "cross_degree": p.cross_degree(),
        "p0": p.p_zero,
    }));
    o.set("M", p.star_size);
    o.set("N", p.co_star_size);
    o.set("p0", p.p_zero);
    o.set("p_floor", bounds.p_floor(&p));
    o.set("zeta_max", zeta_max(&p, cfg.big_k));
    o.set("sufficient_constants", sufficient_constants(cfg.theta)?);
    o.set("theta_admissible", bounds.theta_admissible());
    Ok(o)
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let r = spectrum_report(cfg.m, cfg.k, cfg.c)?;
    let mut o = Outcome::default();
    for j in 0..=cfg.k {
        o.row(json!({
            "j": j,
            "eigenvalue": r.formula_eigenvalues[j],
            "multiplicity": r.multiplicities[j],
            "residual": r.residuals.as_ref().map(|res| res[j]),
            "S": r.s_table[j],
        }));
    }
    let mut spectrum: Vec<i128> = r
        .formula_eigenvalues
        .iter()
        .zip(&r.multiplicities)
        .flat_map(|(&l, &mult)| std::iter::repeat_n(l, mult as usize))
        .collect();
    spectrum.sort_unstable_by(|a, b| b.cmp(a));
    o.set("m", cfg.m);
    o.set("k", cfg.k);
    o.set("c", cfg.c);
    o.set("spectrum", &spectrum);
    o.set("dense_checked", r.numeric_eigenvalues.is_some());
    o.set("max_residual", r.max_residual());
    o.set("laplacian_gap_formula", r.laplacian_gap_formula.value);
    o.set("laplacian_gap_numeric", r.laplacian_gap_numeric);
    o.set("proven_regime", r.laplacian_gap_formula.proven_regime);
    if let Some(res) = r.max_residual() {
        if res >= SPECTRUM_TOL {
            o.failures
                .push(format!("formula and dense spectrum differ by {res:e}"));
        }
    }
    if binomial(cfg.m as u64, cfg.k as u64) > DENSE_BUDGET {
        o.set("note", "above the dense budget; formula only");
    }
    Ok(o)
}

fn verify_identities(cfg: &RunConfig) -> Result<Outcome> {
    let p = kneser(cfg)?;
    let s = identity_suite(&p, sweep(&p, cfg))?;
    let mut o = Outcome::default();
    for (name, r) in [("mo1", &s.mo1), ("gLe", &s.gle), ("mo2", &s.mo2)] {
        o.row(json!({
            "identity": name,
            "contexts": s.contexts,
            "nonzero": r.nonzero,
            "max_abs_residual": r.max_abs,
        }));
    }
    o.set("sweep", s.sweep);
    o.set("families", s.families);
    o.set("contexts", s.contexts);
    o.failures = s.failures;
    Ok(o)
}

fn verify_bounds(cfg: &RunConfig) -> Result<Outcome> {
    let p = kneser(cfg)?;
    let bounds = cfg.bound_config();
    let calibrated = if binomial(p.m as u64, p.k as u64) <= CALIBRATION_LEVEL_MAX {
        Some(calibrate_gamma(p.m, p.k, 200, &mut seeded_rng(cfg.seed))?)
    } else {
        None
    };
    let s = bound_suite(&p, sweep(&p, cfg), &bounds, calibrated)?;
    let mut o = Outcome::default();
    let check =
        |name: &str, evaluated: u64, violations: u64, margin: Option<f64>, asserted: bool| {
            json!({
                "check": name,
                "evaluated": evaluated,
                "violations": violations,
                "min_margin": margin,
                "asserted": asserted,
            })
        };
    o.row(check(
        "proposition",
        s.contexts,
        s.betaprop_violations,
        Some(s.betaprop_min_margin),
        true,
    ));
    o.row(check(
        "term1",
        s.contexts,
        s.term1_violations,
        Some(s.term1_min_margin),
        true,
    ));
    o.row(check(
        "term2",
        s.contexts,
        s.term2_violations,
        Some(s.term2_min_margin),
        s.term2_asserted,
    ));
    o.row(check(
        "target",
        s.contexts,
        s.target_lhs_not_below_rhs,
        None,
        p.c < p.k + 1,
    ));
    o.row(check(
        "large-aF",
        s.dt_applicable,
        s.dt_violations,
        None,
        true,
    ));
    o.failures = s.failures.clone();

    if p.c <= p.k {
        match alon_milman_suite(p.m, p.k, p.c, cfg.trials.min(1000), cfg.seed) {
            Ok(am) => {
                o.row(check(
                    "alon-milman",
                    am.samples,
                    am.violations,
                    Some(am.min_margin),
                    true,
                ));
                if am.violations > 0 {
                    o.failures.push(format!(
                        "Alon-Milman violated on {} subsets of J_{}({},{})",
                        am.violations, p.c, p.m, p.k
                    ));
                }
            }
            Err(Error::Resource(msg)) => o.set("alon_milman_skipped", msg),
            Err(e) => return Err(e),
        }
    }
    o.set("sweep", s.sweep);
    o.set("families", s.families);
    o.set("contexts", s.contexts);
    o.set("gap", s.gap);
    o.set("gamma", cfg.gamma);
    o.set("gamma_calibrated", calibrated);
    o.set("expansion_branch", s.expansion_branch);
    o.set("log_sobolev_branch", s.log_sobolev_branch);
    o.set("min_edges", s.min_edges);
    o.set("min_lemma_ratio", s.min_lemma_ratio);
    Ok(o)
}

fn theta_scan(cfg: &RunConfig) -> Result<Outcome> {
    let p = kneser(cfg)?;
    let scan = if exhaustive_scan_feasible(&p) {
        exhaustive_theta(&p)?
    } else {
        sampled_theta(&p, cfg.trials as usize, &mut seeded_rng(cfg.seed))?
    };
    let mut o = Outcome::default();
    o.row(json!({
        "theta_star": scan.theta_star,
        "families": scan.families,
        "exhaustive": scan.exhaustive,
        "min_edges": scan.min_edges,
        "argmin": scan.argmin.members(),
        "argmin_a_F": scan.argmin.a_f(),
    }));
    o.set("theta_star", scan.theta_star);
    o.set("exhaustive", scan.exhaustive);
    o.set(
        "sufficient_constants",
        sufficient_constants(scan.theta_star)?,
    );
    if scan.exhaustive && scan.min_edges == 0 {
        o.failures
            .push("a non-star M-family is independent in K(n,k)".into());
    }
    Ok(o)
}

/// Exhaustive scans stay cheap well below the hard family budget.
fn exhaustive_scan_feasible(p: &KneserParams) -> bool {
    p.vertex_count <= 64 && binomial(p.vertex_count as u64, p.star_size as u64) <= 100_000
}

fn union_bound(cfg: &RunConfig) -> Result<Outcome> {
    let p = kneser(cfg)?;
    let bounds = cfg.bound_config();
    let u = union_bound_value(&p, cfg.p, &bounds)?;
    let mut o = Outcome::default();
    for (i, t) in u.terms.iter().enumerate() {
        o.row(json!({ "a": i + 1, "term": t }));
    }
    let floor = bounds.p_floor(&p);
    o.set("value", u.value);
    o.set("xi", u.xi);
    o.set("a_max", u.a_max);
    o.set("p", cfg.p);
    o.set("p_floor", floor);
    o.set("p_at_least_floor", cfg.p >= floor);
    Ok(o)
}

fn estimate_pc(cfg: &RunConfig) -> Result<Outcome> {
    let p = kneser(cfg)?;
    let base = TrialPlan {
        budget: cfg.budget(),
        mode: default_mode(&p),
        ..TrialPlan::exact(p, cfg.p, cfg.trials, cfg.seed)
    };
    let est = estimate_pc_with(&base, cfg.tol)?;
    let mut o = Outcome::default();
    for (probe, fraction) in &est.probes {
        o.row(json!({ "p": probe, "fraction": fraction }));
    }
    o.set("p_hat", est.p_hat);
    o.set("bracket", est.bracket);
    o.set("pr_at_p_hat", est.pr_at_p_hat.fraction);
    o.set("wilson", est.pr_at_p_hat.wilson);
    o.set("trials_used", est.trials_used);
    o.set("p0_reference", est.p0_reference);
    o.set("mode", est.mode);
    Ok(o)
}

fn trend(cfg: &RunConfig) -> Result<Outcome> {
    let ks: Vec<usize> = (2..=cfg.k.max(2)).collect();
    let rows = pc_trend_report(&ks, cfg.trials, cfg.tol, cfg.seed)?;
    let mut o = Outcome::default();
    for r in &rows {
        o.row(r);
    }
    o.set("reference", "p0 = 3/4 for n = 2k+1");
    Ok(o)
}

fn near_star(cfg: &RunConfig) -> Result<Outcome> {
    let p = kneser(cfg)?;
    let r = near_star_rate(&p, cfg.p, cfg.trials, cfg.seed)?;
    let mut o = Outcome::default();
    o.row(&r);
    o.set("rate", r.fraction);
    o.set("candidates_per_graph", near_star_candidate_count(&p));
    o.set("p0", p.p_zero);
    Ok(o)
}
