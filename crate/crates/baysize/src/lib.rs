//! Sample size and power calculation for Bayesian phase I dose-finding
//! trials.
//!
//! The question answered here is how many patients a dose-finding trial
//! needs so that, when a maximum tolerated dose exists among the candidate
//! doses, a Bayes-factor test will detect it with the desired power while
//! keeping the Type I error under control. There is no closed form: trials
//! are simulated under an interval-based dose-finding design, each simulated
//! data set is scored by the Bayes factor of "no dose is the MTD" against
//! "one dose is the MTD", the decision cutoff is calibrated on null
//! simulations, and a bisection finds the smallest sample size whose
//! estimated power clears the target.
//!
//! Modules, bottom up:
//!
//! - [`betainc`] — log-space incomplete-beta numerics everything rests on.
//! - [`design`] — equivalence interval and trial-conduct parameters.
//! - [`trial`] — the dose-finding trial simulator.
//! - [`priors`] — submodel families and truncated-beta fitting priors.
//! - [`bayes`] — closed-form marginal likelihoods and the Bayes factor.
//! - [`scenarios`] — sampling priors generating true toxicity vectors.
//! - [`search`] — calibration, power estimation, bisection, look-up tables.
//! - [`seeding`] — deterministic per-trial random streams.
//! - [`config`], [`report`], [`runner`] — the CLI surface.

pub mod bayes;
pub mod betainc;
pub mod config;
pub mod design;
pub mod priors;
pub mod report;
pub mod runner;
pub mod scenarios;
pub mod search;
pub mod seeding;
pub mod trial;

pub use bayes::{bayes_factor, BayesFactorResult, HypothesisPrior, PreparedModel};
pub use config::{parse_config, ConfigError, OutputFormat, RunConfig};
pub use design::{DesignConfig, DesignError, EquivalenceInterval};
pub use priors::{
    fitting_prior_submodel, mode_vector, trunc_beta_from_mode, FittingPriorSpec, Hypothesis,
    PriorError, Submodel, TruncatedBeta,
};
pub use report::Report;
pub use scenarios::{draw_h0, draw_h1, scenario_p1, H0SamplingPrior, ScenarioError, ScenarioSpec};
pub use search::{
    calibrate_cutoff, estimate_power, find_sample_size, power_table, CalibrationResult,
    PowerResult, SearchConfig, SearchOutcome, SizeSearchResult, TableGrid,
};
pub use trial::{
    mtpi2_decision, safety_stop, simulate_trial, simulate_trial_observed, CohortEvent,
    DoseDecision, TrialOutcome,
};
