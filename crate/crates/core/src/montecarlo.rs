//! Monte Carlo estimates of `Pr(K_p(n,k) is EKR)` and of the threshold
//! `p_c` where it crosses 1/2.
//!
//! Trial `t` of a plan with master seed `s` draws its graph from the edge
//! oracle keyed by [`sub_seed`]`(s, t)`. Since the oracle couples all `p`, the
//! EKR indicator of a fixed trial is monotone in `p`, and so is the empirical
//! fraction: bisection on it is well-founded.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, resource, Result};
use crate::kneser::oracle::mix64;
use crate::kneser::{
    is_ekr, near_star_verdict, near_star_violation_exists, EdgeOracle, EkrVerdict, KneserParams,
    SearchBudget, SearchMethod,
};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialMode {
    /// Full independent-set search per trial.
    Exact,
    /// Near-star scan only; "EKR" then means "no near-star violation".
    NearStarOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialPlan {
    pub params: KneserParams,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub budget: SearchBudget,
    pub mode: TrialMode,
}

impl TrialPlan {
    pub fn exact(params: KneserParams, p: f64, trials: u64, seed: u64) -> Self {
        TrialPlan {
            params,
            p,
            trials,
            seed,
            budget: SearchBudget::unlimited(),
            mode: TrialMode::Exact,
        }
    }

    pub fn at(&self, p: f64) -> Self {
        TrialPlan { p, ..self.clone() }
    }

    pub fn oracle(&self, t: u64) -> EdgeOracle {
        EdgeOracle::new(self.params.clone(), self.p, sub_seed(self.seed, t))
    }

    /// Verdict of trial `t` alone.
    pub fn trial(&self, t: u64) -> Result<EkrVerdict> {
        let oracle = self.oracle(t);
        match self.mode {
            TrialMode::Exact => is_ekr(&oracle, self.budget),
            TrialMode::NearStarOnly => near_star_verdict(&oracle),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(domain!("p must lie in [0,1], got {}", self.p));
        }
        if self.trials == 0 {
            return Err(domain!("at least one trial is needed"));
        }
        Ok(())
    }
}

/// Seed of trial `t` under master seed `seed`.
pub fn sub_seed(seed: u64, t: u64) -> u64 {
    mix64(mix64(seed ^ 0xD1B5_4A32_D192_ED03).wrapping_add(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    if successes >= trials {
        let w = wilson_interval(0, trials);
        return Interval {
            lo: 1.0 - w.hi,
            hi: 1.0,
        };
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    ekr: u64,
    violation: u64,
    timed_out: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            ekr: self.ekr + o.ekr,
            violation: self.violation + o.violation,
            timed_out: self.timed_out + o.timed_out,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrEstimate {
    pub p: f64,
    pub trials: u64,
    pub ekr: u64,
    pub violations: u64,
    /// Searches that ran out of budget without finding a violation; counted
    /// neither as EKR nor as violations.
    pub timed_out: u64,
    /// `ekr / trials`
    pub fraction: f64,
    pub wilson: Interval,
    pub inconclusive: bool,
    pub mode: TrialMode,
}

pub fn estimate_pr_ekr(plan: &TrialPlan) -> Result<PrEstimate> {
    plan.validate()?;
    let tally = (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            let v = plan.trial(t)?;
            Ok(if !v.is_conclusive() {
                Tally {
                    timed_out: 1,
                    ..Tally::default()
                }
            } else if v.is_ekr() {
                Tally {
                    ekr: 1,
                    ..Tally::default()
                }
            } else {
                Tally {
                    violation: 1,
                    ..Tally::default()
                }
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(PrEstimate {
        p: plan.p,
        trials: plan.trials,
        ekr: tally.ekr,
        violations: tally.violation,
        timed_out: tally.timed_out,
        fraction: tally.ekr as f64 / plan.trials as f64,
        wilson: wilson_interval(tally.ekr, plan.trials),
        inconclusive: tally.timed_out > 0,
        mode: plan.mode,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub p_hat: f64,
    pub bracket: Interval,
    pub pr_at_p_hat: PrEstimate,
    /// Trials summed over every probe.
    pub trials_used: u64,
    pub p0_reference: f64,
    pub probes: Vec<(f64, f64)>,
    pub mode: TrialMode,
}

/// Bisection for the `p` where the empirical EKR fraction of `base` crosses
/// 1/2, with the same trial seeds at every probe. `base.p` is ignored.
pub fn estimate_pc_with(base: &TrialPlan, tol: f64) -> Result<ThresholdEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain!("tolerance must be positive, got {tol}"));
    }
    let mut probes = Vec::new();
    let mut trials_used = 0;
    let mut probe = |p: f64| -> Result<PrEstimate> {
        let est = estimate_pr_ekr(&base.at(p))?;
        trials_used += est.trials;
        probes.push((p, est.fraction));
        if est.inconclusive {
            return Err(resource!(
                "{} of {} trials at p = {p} exhausted the search budget",
                est.timed_out,
                est.trials
            ));
        }
        Ok(est)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let at_lo = probe(lo)?;
    let at_hi = probe(hi)?;
    if at_lo.fraction >= 0.5 || at_hi.fraction < 0.5 {
        return Err(domain!(
            "fraction at the ends of [0,1] is {} and {}; no crossing",
            at_lo.fraction,
            at_hi.fraction
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if probe(mid)?.fraction >= 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p_hat = 0.5 * (lo + hi);
    let pr_at_p_hat = probe(p_hat)?;
    Ok(ThresholdEstimate {
        p_hat,
        bracket: Interval { lo, hi },
        pr_at_p_hat,
        trials_used,
        p0_reference: base.params.p_zero,
        probes,
        mode: base.mode,
    })
}

/// Exact-mode threshold estimate with unlimited search budget.
pub fn estimate_pc(
    params: &KneserParams,
    trials: u64,
    tol: f64,
    seed: u64,
) -> Result<ThresholdEstimate> {
    estimate_pc_with(&TrialPlan::exact(params.clone(), 0.5, trials, seed), tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NearStarRate {
    pub p: f64,
    pub trials: u64,
    pub hits: u64,
    pub fraction: f64,
    pub wilson: Interval,
}

/// Fraction of trials in which some near-star family is independent: a
/// lower estimate of `1 - Pr(EKR)`. Trial `t` sees the same graph as trial
/// `t` of a [`TrialPlan`] with the same seed.
pub fn near_star_rate(
    params: &KneserParams,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<NearStarRate> {
    let plan = TrialPlan {
        mode: TrialMode::NearStarOnly,
        ..TrialPlan::exact(params.clone(), p, trials, seed)
    };
    plan.validate()?;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| near_star_violation_exists(&plan.oracle(t)))
        .count() as u64;
    Ok(NearStarRate {
        p,
        trials,
        hits,
        fraction: hits as f64 / trials as f64,
        wilson: wilson_interval(hits, trials),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub k: usize,
    pub n: usize,
    pub mode: TrialMode,
    pub p_hat: f64,
    pub bracket: Interval,
    pub pr_at_p_hat: f64,
    pub p0_reference: f64,
}

/// Largest `n` for which full searches are routine at thousands of trials.
pub const EXACT_MODE_MAX_N: usize = 8;

/// Exact mode up to [`EXACT_MODE_MAX_N`], near-star proxy beyond.
pub fn default_mode(params: &KneserParams) -> TrialMode {
    if params.n <= EXACT_MODE_MAX_N {
        TrialMode::Exact
    } else {
        TrialMode::NearStarOnly
    }
}

/// `p_c(2k+1, k)` estimates against the reference `p_0 = 3/4`. Beyond
/// [`EXACT_MODE_MAX_N`] the estimate is the near-star proxy: the crossing
/// of `1 - near_star_rate`, which bounds `p_c` from below.
pub fn pc_trend_report(
    k_values: &[usize],
    trials: u64,
    tol: f64,
    seed: u64,
) -> Result<Vec<TrendRow>> {
    k_values
        .iter()
        .map(|&k| {
            let params = KneserParams::new(2 * k + 1, k)?;
            let mode = default_mode(&params);
            let base = TrialPlan {
                mode,
                ..TrialPlan::exact(params.clone(), 0.5, trials, seed)
            };
            let est = estimate_pc_with(&base, tol)?;
            Ok(TrendRow {
                k,
                n: params.n,
                mode,
                p_hat: est.p_hat,
                bracket: est.bracket,
                pr_at_p_hat: est.pr_at_p_hat.fraction,
                p0_reference: params.p_zero,
            })
        })
        .collect()
}

/// Trials of `plan` that timed out; exposed for diagnostics.
pub fn timed_out_trials(plan: &TrialPlan) -> Result<Vec<u64>> {
    (0..plan.trials)
        .into_par_iter()
        .filter_map(|t| match plan.trial(t) {
            Ok(v) if v.method == SearchMethod::TimedOut && !v.is_conclusive() => Some(Ok(t)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}
