//! Command execution on top of a validated configuration. The CLI is a thin
//! wrapper around these functions; tests call them directly.

use std::time::Instant;

use crate::config::RunConfig;
use crate::report::{
    PowerRecord, Records, Report, ScenarioPower, SimulationRecord, SizeRecord, SCHEMA_VERSION,
};
use crate::scenarios::{mtd_location_scenarios, scenario_p1, ScenarioSpec};
use crate::search::{calibrate_cutoff, estimate_power, find_sample_size, power_table};
use crate::seeding::{derive_rng, Phase};
use crate::trial::simulate_trial;

fn scenario_specs(cfg: &RunConfig) -> Vec<ScenarioSpec> {
    if cfg.search.h1_scenarios.is_empty() {
        mtd_location_scenarios(&cfg.design.ei, cfg.design.num_doses)
    } else {
        cfg.search.h1_scenarios.clone()
    }
}

fn scenario_labels(cfg: &RunConfig) -> Vec<String> {
    scenario_specs(cfg).iter().map(|s| s.label()).collect()
}

fn report(cfg: &RunConfig, command: &str, runtime: Option<f64>, records: Records) -> Report {
    Report {
        schema_version: SCHEMA_VERSION.to_string(),
        command: command.to_string(),
        root_seed: cfg.search.root_seed,
        runtime_seconds: runtime,
        config: cfg.resolved.clone(),
        records,
    }
}

/// Runs the minimum-sample-size search.
pub fn run_size(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let result = find_sample_size(&cfg.search, &cfg.design, &cfg.fitting, &cfg.hypothesis);
    let record = SizeRecord {
        p_t: cfg.design.ei.target(),
        eps1: cfg.design.ei.eps1(),
        eps2: cfg.design.ei.eps2(),
        alpha: cfg.search.alpha,
        beta: cfg.search.beta,
        scenarios: scenario_labels(cfg),
        outcome: result.outcome,
        evaluations: result.evaluations,
    };
    report(
        cfg,
        "size",
        Some(start.elapsed().as_secs_f64()),
        Records::Size(record),
    )
}

fn power_record_at(cfg: &RunConfig, n: u32, alpha: f64) -> PowerRecord {
    let mut search = cfg.search.clone();
    search.alpha = alpha;
    let calib = calibrate_cutoff(n, &search, &cfg.design, &cfg.fitting, &cfg.hypothesis);
    let power = estimate_power(
        n,
        calib.cutoff_log_bf,
        &search,
        &cfg.design,
        &cfg.fitting,
        &cfg.hypothesis,
    );
    let labels = scenario_labels(cfg);
    let per_scenario: Vec<ScenarioPower> = labels
        .into_iter()
        .zip(&power.per_scenario_power)
        .map(|(scenario, p)| ScenarioPower {
            scenario,
            power: *p,
            mc_se: (p * (1.0 - p) / search.power_trials as f64).sqrt(),
        })
        .collect();
    let power_max = power
        .per_scenario_power
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mc_se = per_scenario.iter().map(|s| s.mc_se).fold(0.0, f64::max);
    PowerRecord {
        half_effect: (cfg.design.ei.eps1() + cfg.design.ei.eps2()) / 2.0,
        alpha,
        n,
        power_min: power.power,
        power_max,
        mc_se,
        cutoff_log_bf: calib.cutoff_log_bf,
        empirical_type1: calib.empirical_type1,
        degenerate_calibration: calib.degenerate,
        per_scenario,
    }
}

/// Estimates power at every configured candidate sample size.
pub fn run_power(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let rows: Vec<PowerRecord> = cfg
        .n_grid
        .iter()
        .map(|n| power_record_at(cfg, *n, cfg.search.alpha))
        .collect();
    report(
        cfg,
        "power",
        Some(start.elapsed().as_secs_f64()),
        Records::Power(rows),
    )
}

/// Generates the look-up table over (half effect, alpha, n).
pub fn run_table(cfg: &RunConfig) -> Result<Report, String> {
    let start = Instant::now();
    let rows = power_table(
        &cfg.table,
        &cfg.search,
        &cfg.design,
        &cfg.hypothesis,
        cfg.fitting.dispersion,
        cfg.fitting.mode_constants,
    )?;
    // default scenarios are regenerated per half-effect row, so label them
    // by MTD position; custom scenarios keep their own labels
    let label_of = |i: usize| -> String {
        if cfg.search.h1_scenarios.is_empty() {
            format!("mtd_d{}", i + 1)
        } else {
            cfg.search.h1_scenarios[i].label()
        }
    };
    let records: Vec<PowerRecord> = rows
        .into_iter()
        .map(|r| {
            let per_scenario = r
                .per_scenario_power
                .iter()
                .enumerate()
                .map(|(i, p)| ScenarioPower {
                    scenario: label_of(i),
                    power: *p,
                    mc_se: (p * (1.0 - p) / cfg.search.power_trials as f64).sqrt(),
                })
                .collect();
            PowerRecord {
                half_effect: r.half_effect,
                alpha: r.alpha,
                n: r.n,
                power_min: r.power_min,
                power_max: r.power_max,
                mc_se: r.mc_se,
                cutoff_log_bf: r.cutoff_log_bf,
                empirical_type1: r.empirical_type1,
                degenerate_calibration: r.degenerate_calibration,
                per_scenario,
            }
        })
        .collect();
    Ok(report(
        cfg,
        "table",
        Some(start.elapsed().as_secs_f64()),
        Records::Table(records),
    ))
}

/// Simulates raw trials at the upper-bound sample size for inspection, under
/// the first configured scenario. No runtime is recorded so identical seeds
/// give byte-identical output.
pub fn run_simulate(cfg: &RunConfig, trials: u32) -> Result<Report, String> {
    let spec = scenario_specs(cfg)
        .into_iter()
        .next()
        .ok_or_else(|| "no scenario available for simulation".to_string())?;
    let p_true = scenario_p1(&spec, &cfg.design.ei, cfg.design.num_doses)
        .map_err(|e| e.to_string())?;
    let n = cfg.search.n_upper;
    let design = cfg.design.with_max_patients(n);
    let rows: Vec<SimulationRecord> = (0..trials)
        .map(|t| {
            let mut rng = derive_rng(
                cfg.search.root_seed,
                Phase::Inspect,
                &[t as u64, n as u64],
            );
            SimulationRecord {
                trial: t,
                n,
                p_true: p_true.clone(),
                outcome: simulate_trial(&p_true, &design, &mut rng),
            }
        })
        .collect();
    Ok(report(cfg, "simulate", None, Records::Simulate(rows)))
}
