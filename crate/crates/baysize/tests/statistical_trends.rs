//! Seed-averaged statistical trend: more patients, more power.

use baysize::{
    power_table, DesignConfig, EquivalenceInterval, H0SamplingPrior, HypothesisPrior,
    SearchConfig, TableGrid,
};

/// For every configuration with half effect >= 0.1, the five-scenario
/// minimum power at n = 90 must exceed that at n = 30, averaged over five
/// seeds, up to two Monte Carlo standard errors of the difference.
#[test]
fn power_at_90_exceeds_power_at_30_for_moderate_effect_sizes() {
    let trials = 200u32;
    let seeds = [401u64, 402, 403, 404, 405];
    let alphas = vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
    let half_effects = vec![0.10, 0.15, 0.20];

    let ei = EquivalenceInterval::new(0.3, 0.1, 0.1).unwrap();
    let design = DesignConfig::standard(ei, 5, 90);
    let hp = HypothesisPrior::uniform(5);
    let grid = TableGrid {
        half_effects: half_effects.clone(),
        alphas: alphas.clone(),
        sample_sizes: vec![30, 90],
    };

    // accumulate per-(he, alpha, n) minimum powers over seeds
    let mut sums: std::collections::BTreeMap<(usize, usize, u32), (f64, f64)> =
        std::collections::BTreeMap::new();
    for seed in seeds {
        let search = SearchConfig {
            alpha: 0.3,
            beta: 0.2,
            n_upper: 90,
            n_lower: 3,
            calib_trials: trials,
            power_trials: trials,
            convergence_eps: 1,
            h0_prior: H0SamplingPrior::OrderStatisticsUniform,
            h1_scenarios: vec![],
            root_seed: seed,
            round_to_cohort: false,
        };
        let rows = power_table(&grid, &search, &design, &hp, 0.0, (0.6, 0.9, 1.05, 1.2)).unwrap();
        for r in rows {
            let he_idx = half_effects
                .iter()
                .position(|h| (h - r.half_effect).abs() < 1e-12)
                .unwrap();
            let a_idx = alphas.iter().position(|a| (a - r.alpha).abs() < 1e-12).unwrap();
            let entry = sums.entry((he_idx, a_idx, r.n)).or_insert((0.0, 0.0));
            entry.0 += r.power_min;
            entry.1 += r.power_min * (1.0 - r.power_min) / trials as f64;
        }
    }

    let k = seeds.len() as f64;
    for (he_idx, he) in half_effects.iter().enumerate() {
        for (a_idx, alpha) in alphas.iter().enumerate() {
            let (sum30, var30) = sums[&(he_idx, a_idx, 30)];
            let (sum90, var90) = sums[&(he_idx, a_idx, 90)];
            let mean30 = sum30 / k;
            let mean90 = sum90 / k;
            // variance of each seed-average is the mean per-seed variance / k
            let se_diff = ((var30 + var90) / (k * k)).sqrt();
            assert!(
                mean90 > mean30 - 2.0 * se_diff,
                "half_effect={he} alpha={alpha}: power fell from {mean30:.3} (n=30) \
                 to {mean90:.3} (n=90), se_diff={se_diff:.3}"
            );
        }
    }
}
