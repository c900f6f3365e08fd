//! Sample-size search: Type I error calibration, power verification, and
//! the bisection over candidate sample sizes.
//!
//! At a candidate size n, B trials simulated under the null sampling prior
//! give the empirical distribution of the log Bayes factor; the decision
//! cutoff is its floor(B·alpha)-th order statistic, which keeps the
//! empirical Type I error at or below alpha by construction. C trials per
//! alternative scenario then estimate power as the fraction of log Bayes
//! factors strictly below the cutoff, taking the minimum across scenarios
//! when several are configured. The search starts at the upper bound and
//! bisects, recalibrating the cutoff at every candidate size.
//!
//! Monte Carlo trials are embarrassingly parallel; each one owns a stream
//! derived from (root seed, phase, scenario, trial index, n) and results are
//! reduced in trial-index order, so outputs are identical for any thread
//! count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{HypothesisPrior, PreparedModel};
use crate::design::{DesignConfig, EquivalenceInterval};
use crate::priors::FittingPriorSpec;
use crate::scenarios::{
    draw_h0, mtd_location_scenarios, scenario_p1, H0SamplingPrior, ScenarioSpec,
};
use crate::seeding::{derive_rng, Phase};
use crate::trial::simulate_trial;

/// Parameters of the sample-size search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Type I error bound in (0, 1).
    pub alpha: f64,
    /// Type II error bound in (0, 1); the power target is 1 − beta.
    pub beta: f64,
    pub n_upper: u32,
    pub n_lower: u32,
    /// Number of null-side calibration trials (B).
    pub calib_trials: u32,
    /// Number of alternative-side trials per scenario (C).
    pub power_trials: u32,
    /// Bisection stops when consecutive candidates differ by less than this.
    pub convergence_eps: u32,
    pub h0_prior: H0SamplingPrior,
    pub h1_scenarios: Vec<ScenarioSpec>,
    pub root_seed: u64,
    /// Round the found size up to the next multiple of the cohort size.
    pub round_to_cohort: bool,
}

impl SearchConfig {
    pub const DEFAULT_TRIALS: u32 = 1000;

    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if self.n_lower > self.n_upper {
            return Err(format!(
                "n_lower ({}) must not exceed n_upper ({})",
                self.n_lower, self.n_upper
            ));
        }
        if self.n_lower == 0 {
            return Err("n_lower must be at least 1".into());
        }
        if self.calib_trials == 0 || self.power_trials == 0 {
            return Err("calib_trials and power_trials must be at least 1".into());
        }
        if self.convergence_eps == 0 {
            return Err("convergence_eps must be a positive integer".into());
        }
        Ok(())
    }
}

/// Cutoff calibrated against the null Bayes-factor distribution at one n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// The floor(B·alpha)-th smallest simulated log Bayes factor.
    pub cutoff_log_bf: f64,
    /// Fraction of calibration trials strictly below the cutoff; at most
    /// alpha by construction.
    pub empirical_type1: f64,
    pub sorted_log_bfs: Vec<f64>,
    /// True when floor(B·alpha) = 0 and the rank was clamped to 1, making
    /// the cutoff the sample minimum.
    pub degenerate: bool,
}

impl CalibrationResult {
    /// Re-derives the cutoff and empirical Type I error for another alpha
    /// from the same calibration sample.
    pub fn at_alpha(&self, alpha: f64) -> (f64, f64, bool) {
        let b = self.sorted_log_bfs.len();
        let raw_rank = (b as f64 * alpha).floor() as usize;
        let degenerate = raw_rank == 0;
        let rank = raw_rank.clamp(1, b);
        let cutoff = self.sorted_log_bfs[rank - 1];
        let below = self.sorted_log_bfs.iter().filter(|v| **v < cutoff).count();
        (cutoff, below as f64 / b as f64, degenerate)
    }
}

/// Power estimate at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub n: u32,
    /// Minimum power across the configured scenarios.
    pub power: f64,
    pub per_scenario_power: Vec<f64>,
    /// Binomial Monte Carlo standard error of the reported power.
    pub mc_se: f64,
}

/// One evaluated candidate size with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeEvaluation {
    pub n: u32,
    pub cutoff_log_bf: f64,
    pub empirical_type1: f64,
    pub degenerate_calibration: bool,
    pub power: f64,
    pub per_scenario_power: Vec<f64>,
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    /// Smallest evaluated n whose power reached the target.
    Found { n_star: u32, recommended_n: u32 },
    /// Even the upper bound fell short of the power target.
    Infeasible { power_at_n_upper: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSearchResult {
    pub outcome: SearchOutcome,
    /// Evaluations in the order the search made them.
    pub evaluations: Vec<SizeEvaluation>,
}

fn binomial_se(p: f64, trials: u32) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Log Bayes factors of B trials simulated under the null sampling prior,
/// in trial-index order.
pub fn null_log_bfs(
    n: u32,
    search: &SearchConfig,
    design: &DesignConfig,
    fitting: &FittingPriorSpec,
    hp: &HypothesisPrior,
    stream_context: u64,
) -> Vec<f64> {
    let design_n = design.with_max_patients(n);
    let model = PreparedModel::new(fitting, hp);
    (0..search.calib_trials)
        .into_par_iter()
        .map(|b| {
            let mut rng = derive_rng(
                search.root_seed,
                Phase::Calibration,
                &[stream_context, b as u64, n as u64],
            );
            let p = draw_h0(search.h0_prior, design.num_doses, &design.ei, &mut rng);
            let y = simulate_trial(&p, &design_n, &mut rng);
            model.log_bf(&y)
        })
        .collect()
}

/// Log Bayes factors of C trials simulated at the scenario's point-mass
/// toxicity vector, in trial-index order.
#[allow(clippy::too_many_arguments)]
pub fn scenario_log_bfs(
    n: u32,
    p_star: &[f64],
    scenario_index: usize,
    search: &SearchConfig,
    design: &DesignConfig,
    fitting: &FittingPriorSpec,
    hp: &HypothesisPrior,
    stream_context: u64,
) -> Vec<f64> {
    let design_n = design.with_max_patients(n);
    let model = PreparedModel::new(fitting, hp);
    (0..search.power_trials)
        .into_par_iter()
        .map(|c| {
            let mut rng = derive_rng(
                search.root_seed,
                Phase::Power,
                &[stream_context, scenario_index as u64, c as u64, n as u64],
            );
            let y = simulate_trial(p_star, &design_n, &mut rng);
            model.log_bf(&y)
        })
        .collect()
}

/// Calibrates the decision cutoff at sample size n (Type I error step).
pub fn calibrate_cutoff(
    n: u32,
    search: &SearchConfig,
    design: &DesignConfig,
    fitting: &FittingPriorSpec,
    hp: &HypothesisPrior,
) -> CalibrationResult {
    let mut log_bfs = null_log_bfs(n, search, design, fitting, hp, 0);
    log_bfs.sort_by(f64::total_cmp);
    let seed = CalibrationResult {
        cutoff_log_bf: f64::NAN,
        empirical_type1: f64::NAN,
        sorted_log_bfs: log_bfs,
        degenerate: false,
    };
    let (cutoff, type1, degenerate) = seed.at_alpha(search.alpha);
    CalibrationResult {
        cutoff_log_bf: cutoff,
        empirical_type1: type1,
        degenerate,
        ..seed
    }
}

fn scenario_vectors(
    search: &SearchConfig,
    design: &DesignConfig,
) -> Result<Vec<Vec<f64>>, crate::scenarios::ScenarioError> {
    let specs = if search.h1_scenarios.is_empty() {
        mtd_location_scenarios(&design.ei, design.num_doses)
    } else {
        search.h1_scenarios.clone()
    };
    specs
        .iter()
        .map(|s| scenario_p1(s, &design.ei, design.num_doses))
        .collect()
}

/// Estimates power at sample size n against the calibrated cutoff (power
/// verification step). With several scenarios the reported power is their
/// minimum; `mc_se` is the binomial standard error at that minimum.
pub fn estimate_power(
    n: u32,
    cutoff_log_bf: f64,
    search: &SearchConfig,
    design: &DesignConfig,
    fitting: &FittingPriorSpec,
    hp: &HypothesisPrior,
) -> PowerResult {
    let vectors = scenario_vectors(search, design)
        .expect("scenario specs are validated at configuration time");
    let per_scenario_power: Vec<f64> = vectors
        .iter()
        .enumerate()
        .map(|(s, p_star)| {
            let bfs = scenario_log_bfs(n, p_star, s, search, design, fitting, hp, 0);
            let below = bfs.iter().filter(|v| **v < cutoff_log_bf).count();
            below as f64 / search.power_trials as f64
        })
        .collect();
    let power = per_scenario_power
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    PowerResult {
        n,
        power,
        mc_se: binomial_se(power, search.power_trials),
        per_scenario_power,
    }
}

/// Trace of the bisection driver.
#[derive(Debug, Clone, PartialEq)]
pub struct BisectionTrace {
    /// Smallest evaluated n whose power reached the target, if any.
    pub n_star: Option<u32>,
    /// Distinct evaluated sizes with their powers, in evaluation order.
    pub evaluations: Vec<(u32, f64)>,
}

/// Bisection over candidate sizes, generic in the power evaluator.
///
/// Starts at `n_upper`; when the evaluated power exceeds the target the next
/// candidate is the smallest integer above the midpoint of the current size
/// and the nearest known size below, and symmetrically otherwise. Stops when
/// consecutive candidates differ by less than `convergence_eps`. Evaluations
/// are memoized. When every evaluation stayed above the target the untested
/// floor `n_lower` is evaluated once, so the reported minimum is exact for
/// monotone power functions.
pub fn bisect_sample_size<F>(
    n_lower: u32,
    n_upper: u32,
    convergence_eps: u32,
    target_power: f64,
    mut eval: F,
) -> BisectionTrace
where
    F: FnMut(u32) -> f64,
{
    assert!(n_lower >= 1 && n_lower <= n_upper);
    assert!(convergence_eps >= 1);

    let mut cache: BTreeMap<u32, f64> = BTreeMap::new();
    let mut order: Vec<(u32, f64)> = Vec::new();
    let mut evaluate = |n: u32, cache: &mut BTreeMap<u32, f64>, order: &mut Vec<(u32, f64)>| {
        *cache.entry(n).or_insert_with(|| {
            let p = eval(n);
            order.push((n, p));
            p
        })
    };

    let mut below: Option<u32> = None; // largest n with power <= target
    let mut above: Option<u32> = None; // smallest n with power > target
    let mut n = n_upper;
    loop {
        let power = evaluate(n, &mut cache, &mut order);
        let next = if power > target_power {
            above = Some(above.map_or(n, |a| a.min(n)));
            let lo = below.unwrap_or(n_lower);
            (n + lo).div_ceil(2)
        } else {
            below = Some(below.map_or(n, |b| b.max(n)));
            let hi = above.unwrap_or(n_upper);
            (hi + n).div_ceil(2)
        };
        if next.abs_diff(n) < convergence_eps {
            break;
        }
        n = next;
    }

    // All-feasible runs converge at n_lower + 1 without ever proposing the
    // floor itself; one extra evaluation settles it.
    if below.is_none() && above.is_some_and(|a| a > n_lower) {
        evaluate(n_lower, &mut cache, &mut order);
    }

    let n_star = cache
        .iter()
        .find(|(_, p)| **p >= target_power)
        .map(|(n, _)| *n);
    BisectionTrace {
        n_star,
        evaluations: order,
    }
}

fn round_up_to_multiple(n: u32, step: u32) -> u32 {
    n.div_ceil(step) * step
}

/// Runs the full search for the smallest sample size meeting the Type I
/// error and power targets, recalibrating the cutoff at every candidate.
/// Infeasibility (the upper bound itself underpowered) is reported as an
/// outcome, not an error.
pub fn find_sample_size(
    search: &SearchConfig,
    design: &DesignConfig,
    fitting: &FittingPriorSpec,
    hp: &HypothesisPrior,
) -> SizeSearchResult {
    let target = 1.0 - search.beta;
    let mut details: BTreeMap<u32, SizeEvaluation> = BTreeMap::new();

    let trace = bisect_sample_size(
        search.n_lower,
        search.n_upper,
        search.convergence_eps,
        target,
        |n| {
            let calib = calibrate_cutoff(n, search, design, fitting, hp);
            let power = estimate_power(n, calib.cutoff_log_bf, search, design, fitting, hp);
            details.insert(
                n,
                SizeEvaluation {
                    n,
                    cutoff_log_bf: calib.cutoff_log_bf,
                    empirical_type1: calib.empirical_type1,
                    degenerate_calibration: calib.degenerate,
                    power: power.power,
                    per_scenario_power: power.per_scenario_power,
                    mc_se: power.mc_se,
                },
            );
            power.power
        },
    );

    let evaluations: Vec<SizeEvaluation> = trace
        .evaluations
        .iter()
        .map(|(n, _)| details[n].clone())
        .collect();

    let outcome = match trace.n_star {
        Some(n_star) => SearchOutcome::Found {
            n_star,
            recommended_n: if search.round_to_cohort {
                round_up_to_multiple(n_star, design.cohort_size)
            } else {
                n_star
            },
        },
        None => SearchOutcome::Infeasible {
            power_at_n_upper: details[&search.n_upper].power,
        },
    };
    SizeSearchResult {
        outcome,
        evaluations,
    }
}

/// One cell of the power look-up table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTableRow {
    pub half_effect: f64,
    pub alpha: f64,
    pub n: u32,
    pub power_min: f64,
    pub power_max: f64,
    pub per_scenario_power: Vec<f64>,
    /// Largest binomial standard error among the scenario estimates.
    pub mc_se: f64,
    pub cutoff_log_bf: f64,
    pub empirical_type1: f64,
    pub degenerate_calibration: bool,
}

/// Grid of the look-up table: symmetric half effect sizes, Type I error
/// rates, and candidate sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableGrid {
    pub half_effects: Vec<f64>,
    pub alphas: Vec<f64>,
    pub sample_sizes: Vec<u32>,
}

/// Computes the power table over the grid.
///
/// For each (half effect, n) pair the null and scenario Bayes-factor samples
/// are simulated once and every alpha's cutoff and powers are read from the
/// same samples; this is identical to recalibrating per cell (the cutoff is
/// an order statistic of the same deterministic sample) and makes the
/// cutoff's monotonicity in alpha structural. Parametric scenarios follow
/// the per-row equivalence interval; if none are configured, the five
/// MTD-location scenarios are generated for each row.
pub fn power_table(
    grid: &TableGrid,
    search: &SearchConfig,
    design: &DesignConfig,
    hp: &HypothesisPrior,
    dispersion: f64,
    mode_constants: (f64, f64, f64, f64),
) -> Result<Vec<PowerTableRow>, String> {
    let mut rows = Vec::new();
    for (he_idx, &half_effect) in grid.half_effects.iter().enumerate() {
        let ei = EquivalenceInterval::new(design.ei.target(), half_effect, half_effect)
            .map_err(|e| format!("half_effect {half_effect}: {e}"))?;
        let mut row_design = design.clone();
        row_design.ei = ei;
        let fitting = FittingPriorSpec::new(dispersion, mode_constants, ei, design.num_doses)
            .map_err(|e| format!("half_effect {half_effect}: {e}"))?;
        let vectors = scenario_vectors(search, &row_design)
            .map_err(|e| format!("half_effect {half_effect}: {e}"))?;

        for &n in &grid.sample_sizes {
            let mut nulls = null_log_bfs(n, search, &row_design, &fitting, hp, he_idx as u64);
            nulls.sort_by(f64::total_cmp);
            let calib = CalibrationResult {
                cutoff_log_bf: f64::NAN,
                empirical_type1: f64::NAN,
                sorted_log_bfs: nulls,
                degenerate: false,
            };
            let alt_samples: Vec<Vec<f64>> = vectors
                .iter()
                .enumerate()
                .map(|(s, p_star)| {
                    scenario_log_bfs(n, p_star, s, search, &row_design, &fitting, hp, he_idx as u64)
                })
                .collect();

            for &alpha in &grid.alphas {
                let (cutoff, type1, degenerate) = calib.at_alpha(alpha);
                let per_scenario_power: Vec<f64> = alt_samples
                    .iter()
                    .map(|bfs| {
                        bfs.iter().filter(|v| **v < cutoff).count() as f64
                            / search.power_trials as f64
                    })
                    .collect();
                let power_min = per_scenario_power
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                let power_max = per_scenario_power
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let mc_se = per_scenario_power
                    .iter()
                    .map(|p| binomial_se(*p, search.power_trials))
                    .fold(0.0, f64::max);
                rows.push(PowerTableRow {
                    half_effect,
                    alpha,
                    n,
                    power_min,
                    power_max,
                    per_scenario_power,
                    mc_se,
                    cutoff_log_bf: cutoff,
                    empirical_type1: type1,
                    degenerate_calibration: degenerate,
                });
            }
        }
    }
    Ok(rows)
}
