//! TOML configuration: strict schema, documented defaults, validation into
//! the domain types.
//!
//! Unknown keys are rejected everywhere. Optional fields are filled with the
//! standard defaults (cohort 3, start dose 1, vague prior c = 0, mode
//! constants (0.6, 0.9, 1.05, 1.2), safety threshold 0.95, B = C = 1000) and
//! the fully resolved document is kept alongside the typed configuration so
//! every output record can echo the exact inputs it was produced from.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bayes::HypothesisPrior;
use crate::design::{DesignConfig, EquivalenceInterval};
use crate::priors::FittingPriorSpec;
use crate::scenarios::{scenario_p1, H0SamplingPrior, ScenarioSpec};
use crate::search::{SearchConfig, TableGrid};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config field {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub p_t: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub num_doses: usize,
    pub cohort_size: Option<u32>,
    pub start_dose: Option<usize>,
    pub safety_threshold: Option<f64>,
    pub safety_prior: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FittingSection {
    pub c: Option<f64>,
    pub mode_constants: Option<(f64, f64, f64, f64)>,
    pub h0_weights: Option<Vec<f64>>,
    pub h1_weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub alpha: f64,
    pub beta: f64,
    pub n_upper: u32,
    pub n_lower: Option<u32>,
    pub calib_trials: Option<u32>,
    pub power_trials: Option<u32>,
    pub convergence_eps: Option<u32>,
    pub h0_prior: Option<H0SamplingPrior>,
    pub root_seed: Option<u64>,
    pub round_to_cohort: Option<bool>,
    /// Candidate sizes for the `power` command and the table columns.
    pub n_grid: Option<Vec<u32>>,
    /// Type I error rates of the table rows.
    pub alphas: Option<Vec<f64>>,
    /// Symmetric half effect sizes of the table blocks.
    pub half_effects: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub format: Option<OutputFormat>,
    pub path: Option<String>,
}

/// The raw configuration document; after resolution every optional field is
/// populated, which is the form embedded in output records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub design: DesignSection,
    #[serde(default)]
    pub fitting: FittingSection,
    pub search: SearchSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub scenarios: Vec<ScenarioSpec>,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub design: DesignConfig,
    pub fitting: FittingPriorSpec,
    pub hypothesis: HypothesisPrior,
    pub search: SearchConfig,
    pub table: TableGrid,
    pub n_grid: Vec<u32>,
    pub output_format: OutputFormat,
    pub output_path: Option<String>,
    /// Fully resolved copy of the input document, for echoing into records.
    pub resolved: ConfigDoc,
}

const DEFAULT_ALPHAS: [f64; 6] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
const DEFAULT_HALF_EFFECTS: [f64; 4] = [0.05, 0.10, 0.15, 0.20];
const DEFAULT_N_GRID: [u32; 5] = [30, 45, 60, 75, 90];

fn resolve(mut doc: ConfigDoc) -> ConfigDoc {
    let d = &mut doc.design;
    d.cohort_size.get_or_insert(DesignConfig::DEFAULT_COHORT_SIZE);
    d.start_dose.get_or_insert(1);
    d.safety_threshold
        .get_or_insert(DesignConfig::DEFAULT_SAFETY_THRESHOLD);
    d.safety_prior.get_or_insert((1.0, 1.0));
    let p_t = d.p_t;
    let cohort = d.cohort_size.unwrap();

    let f = &mut doc.fitting;
    f.c.get_or_insert(0.0);
    f.mode_constants
        .get_or_insert(FittingPriorSpec::DEFAULT_MODE_CONSTANTS);
    let num_doses = doc.design.num_doses;
    f.h0_weights
        .get_or_insert_with(|| vec![1.0 / (num_doses + 1) as f64; num_doses + 1]);
    f.h1_weights
        .get_or_insert_with(|| vec![1.0 / num_doses.max(1) as f64; num_doses]);

    let s = &mut doc.search;
    s.n_lower.get_or_insert(cohort);
    s.calib_trials.get_or_insert(SearchConfig::DEFAULT_TRIALS);
    s.power_trials.get_or_insert(SearchConfig::DEFAULT_TRIALS);
    s.convergence_eps.get_or_insert(1);
    s.h0_prior
        .get_or_insert(H0SamplingPrior::OrderStatisticsUniform);
    s.root_seed.get_or_insert(1);
    s.round_to_cohort.get_or_insert(false);
    s.n_grid.get_or_insert_with(|| DEFAULT_N_GRID.to_vec());
    s.alphas.get_or_insert_with(|| DEFAULT_ALPHAS.to_vec());
    s.half_effects.get_or_insert_with(|| {
        DEFAULT_HALF_EFFECTS
            .iter()
            .copied()
            .filter(|he| EquivalenceInterval::new(p_t, *he, *he).is_ok())
            .collect()
    });

    doc.output.format.get_or_insert(OutputFormat::Csv);
    doc
}

impl RunConfig {
    /// Builds a validated configuration from a (possibly unresolved)
    /// document. Every invariant violation names the offending field.
    pub fn from_doc(doc: ConfigDoc) -> Result<Self, ConfigError> {
        let doc = resolve(doc);
        let d = &doc.design;

        let ei = EquivalenceInterval::new(d.p_t, d.eps1, d.eps2)
            .map_err(|e| invalid("design", e))?;
        let design = DesignConfig::new(
            ei,
            d.num_doses,
            d.cohort_size.unwrap(),
            d.start_dose.unwrap(),
            doc.search.n_upper.max(d.cohort_size.unwrap()),
            d.safety_threshold.unwrap(),
            d.safety_prior.unwrap(),
        )
        .map_err(|e| invalid("design", e))?;

        let f = &doc.fitting;
        let fitting = FittingPriorSpec::new(
            f.c.unwrap(),
            f.mode_constants.unwrap(),
            ei,
            d.num_doses,
        )
        .map_err(|e| invalid("fitting", e))?;
        let hypothesis = HypothesisPrior::new(
            d.num_doses,
            f.h0_weights.clone().unwrap(),
            f.h1_weights.clone().unwrap(),
        )
        .map_err(|e| invalid("fitting.h0_weights/h1_weights", e))?;

        let s = &doc.search;
        let search = SearchConfig {
            alpha: s.alpha,
            beta: s.beta,
            n_upper: s.n_upper,
            n_lower: s.n_lower.unwrap(),
            calib_trials: s.calib_trials.unwrap(),
            power_trials: s.power_trials.unwrap(),
            convergence_eps: s.convergence_eps.unwrap(),
            h0_prior: s.h0_prior.unwrap(),
            h1_scenarios: doc.scenarios.clone(),
            root_seed: s.root_seed.unwrap(),
            round_to_cohort: s.round_to_cohort.unwrap(),
        };
        search.validate().map_err(|e| invalid("search", e))?;

        for (i, spec) in doc.scenarios.iter().enumerate() {
            scenario_p1(spec, &ei, d.num_doses)
                .map_err(|e| invalid(&format!("scenarios[{i}]"), e))?;
        }

        let n_grid = s.n_grid.clone().unwrap();
        if n_grid.is_empty() || n_grid.contains(&0) {
            return Err(invalid("search.n_grid", "must be non-empty positive sizes"));
        }
        let alphas = s.alphas.clone().unwrap();
        if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(invalid("search.alphas", "entries must lie in (0, 1)"));
        }
        let half_effects = s.half_effects.clone().unwrap();
        for he in &half_effects {
            EquivalenceInterval::new(d.p_t, *he, *he)
                .map_err(|e| invalid("search.half_effects", e))?;
        }

        Ok(Self {
            design,
            fitting,
            hypothesis,
            search,
            table: TableGrid {
                half_effects,
                alphas,
                sample_sizes: n_grid.clone(),
            },
            n_grid,
            output_format: doc.output.format.unwrap(),
            output_path: doc.output.path.clone(),
            resolved: doc,
        })
    }

    /// Overrides the root seed, keeping the resolved echo in sync.
    pub fn with_root_seed(mut self, seed: u64) -> Self {
        self.search.root_seed = seed;
        self.resolved.search.root_seed = Some(seed);
        self
    }
}

/// Parses and validates a TOML configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: ConfigDoc = toml::from_str(text)?;
    RunConfig::from_doc(doc)
}
