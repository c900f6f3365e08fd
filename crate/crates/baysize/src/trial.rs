//! Interval-design trial simulation.
//!
//! Implements the toxicity-probability-interval decision rule with model
//! averaging over equal-width subintervals: the posterior for the current
//! dose is Beta(1+x, 1+n−x), the unit probability mass (interval mass over
//! interval length) is computed for the equivalence interval and for tiles
//! of the same width laid out below and above it, and the dose moves toward
//! the winning tile. A posterior tail rule handles overly toxic doses, both
//! as a per-dose exclusion and as a trial-level stop at the lowest dose.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::betainc::{beta_upper_tail, ln_interval_mass_reg};
use crate::design::{DesignConfig, EquivalenceInterval};

/// Dose-assignment decision for the next cohort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DoseDecision {
    Escalate,
    Stay,
    Deescalate,
    /// Deescalate and never treat the current dose (or a higher one) again.
    DeescalateAndExclude,
}

/// Accumulated per-dose counts of one simulated trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// Number of dose-limiting toxicities observed at each dose.
    pub dlt_counts: Vec<u32>,
    /// Number of patients treated at each dose.
    pub patient_counts: Vec<u32>,
    /// Whether a safety rule stopped the trial.
    pub terminated_early: bool,
    pub total_treated: u32,
}

// Tiles narrower than this are floating-point residue of the boundary
// clamping, not real decision intervals.
const MIN_TILE_WIDTH: f64 = 1e-9;

/// Interval decision for cumulative counts (x, n) at one dose.
///
/// Ties in the unit probability mass resolve toward the interval nearest the
/// equivalence interval, with Stay beating Escalate beating Deescalate; the
/// exclusion rule Pr(p > p_T | x, n) > safety_threshold upgrades the result
/// to [`DoseDecision::DeescalateAndExclude`].
///
/// Panics if `n == 0`: there is no decision without data.
pub fn mtpi2_decision(
    x: u32,
    n: u32,
    ei: &EquivalenceInterval,
    safety_threshold: f64,
) -> DoseDecision {
    assert!(n > 0, "dose decision requires at least one treated patient");
    assert!(x <= n);
    let a = 1.0 + x as f64;
    let b = 1.0 + (n - x) as f64;

    if beta_upper_tail(a, b, ei.target()) > safety_threshold {
        return DoseDecision::DeescalateAndExclude;
    }

    let width = ei.effect_size();
    let lower = ei.lower();
    let upper = ei.upper();
    let upm = |lo: f64, hi: f64| ln_interval_mass_reg(a, b, lo, hi).exp() / (hi - lo);

    // Walk outward from the equivalence interval and replace the leader only
    // on strictly greater mass: ties then fall to the nearer interval, and at
    // equal distance the lower interval (visited first) wins.
    let mut best_upm = upm(lower, upper);
    let mut best = DoseDecision::Stay;
    let mut k = 0u32;
    loop {
        k += 1;
        let mut any = false;
        let hi_below = lower - (k - 1) as f64 * width;
        if hi_below > MIN_TILE_WIDTH {
            let lo_below = (lower - k as f64 * width).max(0.0);
            if hi_below - lo_below > MIN_TILE_WIDTH {
                let u = upm(lo_below, hi_below);
                if u > best_upm {
                    best_upm = u;
                    best = DoseDecision::Escalate;
                }
            }
            any = true;
        }
        let lo_above = upper + (k - 1) as f64 * width;
        if lo_above < 1.0 - MIN_TILE_WIDTH {
            let hi_above = (upper + k as f64 * width).min(1.0);
            if hi_above - lo_above > MIN_TILE_WIDTH {
                let u = upm(lo_above, hi_above);
                if u > best_upm {
                    best_upm = u;
                    best = DoseDecision::Deescalate;
                }
            }
            any = true;
        }
        if !any {
            break;
        }
    }
    best
}

/// Trial-level stopping rule: true iff the Beta(1+x1, 1+n1−x1) posterior
/// puts more than `threshold` mass above `p_t`.
///
/// Well defined at n1 = 0, where the posterior is the uniform prior.
pub fn safety_stop(x1: u32, n1: u32, p_t: f64, threshold: f64) -> bool {
    safety_stop_with_prior(x1, n1, p_t, threshold, (1.0, 1.0))
}

/// Safety rule with configurable Beta prior shapes.
pub fn safety_stop_with_prior(
    x: u32,
    n: u32,
    p_t: f64,
    threshold: f64,
    prior: (f64, f64),
) -> bool {
    debug_assert!(x <= n);
    let a = prior.0 + x as f64;
    let b = prior.1 + (n - x) as f64;
    beta_upper_tail(a, b, p_t) > threshold
}

/// One cohort of trial history, as seen by an observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CohortEvent {
    /// 0-based index of the dose the cohort was treated at.
    pub dose: usize,
    /// Toxicities observed in this cohort.
    pub dlts: u32,
    pub patients: u32,
    /// The interval decision taken after the cohort; `None` when the
    /// trial-level safety rule stopped the trial before a decision.
    pub decision: Option<DoseDecision>,
}

/// Simulates one complete trial under the true toxicity vector `p_true`.
///
/// Cohorts of `cfg.cohort_size` patients (the last one truncated so the
/// enrollment cap is never exceeded) are treated at the current dose; each
/// patient's toxicity is Bernoulli at the dose's true rate. After every
/// cohort the trial-level safety rule is checked at dose 1, then the interval
/// decision moves the dose, clamped to the dose range and to non-excluded
/// doses. Exclusion of dose 1 terminates the trial. `terminated_early` is
/// set exactly when a safety rule fired.
pub fn simulate_trial<R: Rng + ?Sized>(
    p_true: &[f64],
    cfg: &DesignConfig,
    rng: &mut R,
) -> TrialOutcome {
    simulate_trial_observed(p_true, cfg, rng, |_| {})
}

/// [`simulate_trial`] with a per-cohort observer, for inspection and for
/// testing conduct properties that the final counts alone cannot show.
pub fn simulate_trial_observed<R, F>(
    p_true: &[f64],
    cfg: &DesignConfig,
    rng: &mut R,
    mut observe: F,
) -> TrialOutcome
where
    R: Rng + ?Sized,
    F: FnMut(CohortEvent),
{
    assert_eq!(p_true.len(), cfg.num_doses, "true toxicity vector length");
    assert!(
        p_true.iter().all(|p| (0.0..=1.0).contains(p)),
        "toxicity probabilities must lie in [0, 1]"
    );

    let d = cfg.num_doses;
    let mut dlt_counts = vec![0u32; d];
    let mut patient_counts = vec![0u32; d];
    let mut excluded = vec![false; d];
    let mut current = cfg.start_dose - 1;
    let mut total: u32 = 0;
    let mut terminated_early = false;

    while total < cfg.max_patients {
        let cohort = cfg.cohort_size.min(cfg.max_patients - total);
        let mut dlts = 0;
        for _ in 0..cohort {
            if rng.random::<f64>() < p_true[current] {
                dlts += 1;
            }
        }
        dlt_counts[current] += dlts;
        patient_counts[current] += cohort;
        total += cohort;

        if safety_stop_with_prior(
            dlt_counts[0],
            patient_counts[0],
            cfg.ei.target(),
            cfg.safety_threshold,
            cfg.safety_prior,
        ) {
            observe(CohortEvent {
                dose: current,
                dlts,
                patients: cohort,
                decision: None,
            });
            terminated_early = true;
            break;
        }

        let decision = mtpi2_decision(
            dlt_counts[current],
            patient_counts[current],
            &cfg.ei,
            cfg.safety_threshold,
        );
        observe(CohortEvent {
            dose: current,
            dlts,
            patients: cohort,
            decision: Some(decision),
        });

        match decision {
            DoseDecision::Escalate => {
                let next = current + 1;
                if next < d && !excluded[next] {
                    current = next;
                }
            }
            DoseDecision::Stay => {}
            DoseDecision::Deescalate => {
                current = current.saturating_sub(1);
            }
            DoseDecision::DeescalateAndExclude => {
                // monotone toxicity: everything at or above this dose is out
                for e in excluded.iter_mut().skip(current) {
                    *e = true;
                }
                if current == 0 {
                    terminated_early = true;
                    break;
                }
                current -= 1;
            }
        }
    }

    TrialOutcome {
        dlt_counts,
        patient_counts,
        terminated_early,
        total_treated: total,
    }
}
