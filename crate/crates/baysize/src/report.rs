//! Machine-readable result records.
//!
//! Every report embeds the schema version and the fully resolved input
//! configuration, so a record alone is enough to re-run the computation.
//! CSV columns are fixed per command and use plain `.`-decimal formatting;
//! JSON is the lossless form.

use serde::{Deserialize, Serialize};

use crate::config::ConfigDoc;
use crate::search::{SearchOutcome, SizeEvaluation};
use crate::trial::TrialOutcome;

pub const SCHEMA_VERSION: &str = "baysize-1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPower {
    pub scenario: String,
    pub power: f64,
    pub mc_se: f64,
}

/// One power estimate: a table cell or one candidate size of the `power`
/// command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRecord {
    pub half_effect: f64,
    pub alpha: f64,
    pub n: u32,
    pub power_min: f64,
    pub power_max: f64,
    pub mc_se: f64,
    pub cutoff_log_bf: f64,
    pub empirical_type1: f64,
    pub degenerate_calibration: bool,
    pub per_scenario: Vec<ScenarioPower>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub p_t: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub scenarios: Vec<String>,
    pub outcome: SearchOutcome,
    pub evaluations: Vec<SizeEvaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub trial: u32,
    pub n: u32,
    pub p_true: Vec<f64>,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Records {
    Size(SizeRecord),
    Power(Vec<PowerRecord>),
    Table(Vec<PowerRecord>),
    Simulate(Vec<SimulationRecord>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub root_seed: u64,
    /// Wall-clock runtime; omitted for `simulate` so repeated runs with the
    /// same seed are byte-identical.
    pub runtime_seconds: Option<f64>,
    pub config: ConfigDoc,
    pub records: Records,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Renders the command's CSV: one header row, fixed column order, the
    /// schema version in the trailing column.
    pub fn to_csv(&self) -> String {
        match &self.records {
            Records::Power(rows) | Records::Table(rows) => power_csv(rows, self.root_seed),
            Records::Size(record) => size_csv(record, self.root_seed, self.runtime_seconds),
            Records::Simulate(rows) => simulate_csv(rows, self.root_seed),
        }
    }

    pub fn render(&self, format: crate::config::OutputFormat) -> String {
        match format {
            crate::config::OutputFormat::Csv => self.to_csv(),
            crate::config::OutputFormat::Json => self.to_json(),
        }
    }
}

fn power_csv(rows: &[PowerRecord], seed: u64) -> String {
    let mut out = String::from(
        "half_effect,alpha,n,power_min,power_max,mc_se,seed,schema_version\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6},{},{}\n",
            r.half_effect, r.alpha, r.n, r.power_min, r.power_max, r.mc_se, seed, SCHEMA_VERSION
        ));
    }
    out
}

fn size_csv(r: &SizeRecord, seed: u64, runtime: Option<f64>) -> String {
    let mut out = String::from(
        "p_t,eps1,eps2,alpha,beta,scenarios,feasible,n_star,recommended_n,power,mc_se,\
         cutoff_log_bf,empirical_type1,n_evaluations,seed,runtime_seconds,schema_version\n",
    );
    let scenarios = r.scenarios.join(";");
    let (feasible, n_star, recommended, power, mc_se, cutoff, type1) = match &r.outcome {
        SearchOutcome::Found {
            n_star,
            recommended_n,
        } => {
            let eval = r
                .evaluations
                .iter()
                .find(|e| e.n == *n_star)
                .expect("found size was evaluated");
            (
                true,
                n_star.to_string(),
                recommended_n.to_string(),
                eval.power,
                eval.mc_se,
                eval.cutoff_log_bf,
                eval.empirical_type1,
            )
        }
        SearchOutcome::Infeasible { power_at_n_upper } => {
            let eval = r
                .evaluations
                .first()
                .expect("infeasible search still evaluated the upper bound");
            (
                false,
                String::new(),
                String::new(),
                *power_at_n_upper,
                eval.mc_se,
                eval.cutoff_log_bf,
                eval.empirical_type1,
            )
        }
    };
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{},{},{},{}\n",
        r.p_t,
        r.eps1,
        r.eps2,
        r.alpha,
        r.beta,
        scenarios,
        feasible,
        n_star,
        recommended,
        power,
        mc_se,
        cutoff,
        type1,
        r.evaluations.len(),
        seed,
        runtime.map(|t| format!("{t:.3}")).unwrap_or_default(),
        SCHEMA_VERSION
    ));
    out
}

fn join_counts(counts: &[u32]) -> String {
    counts
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("|")
}

fn simulate_csv(rows: &[SimulationRecord], seed: u64) -> String {
    let mut out = String::from(
        "trial,n,total_treated,terminated_early,dlt_counts,patient_counts,seed,schema_version\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.trial,
            r.n,
            r.outcome.total_treated,
            r.outcome.terminated_early,
            join_counts(&r.outcome.dlt_counts),
            join_counts(&r.outcome.patient_counts),
            seed,
            SCHEMA_VERSION
        ));
    }
    out
}
