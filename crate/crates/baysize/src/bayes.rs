//! Bayes factors for the composite no-MTD / MTD-present hypotheses.
//!
//! Per dose, the marginal likelihood of binomial counts under a truncated
//! beta prior has a closed form: the ratio of two incomplete beta masses.
//! Per submodel the marginals multiply across doses, and per hypothesis the
//! submodel marginals mix under the (default uniform) submodel weights. All
//! of it is computed in log space; mixtures go through log-sum-exp.
//!
//! The dose-assignment mechanism of the underlying design is a deterministic
//! function of past outcomes, so its contribution to the likelihood depends
//! on the data alone and cancels between numerator and denominator; the
//! per-dose counts (x_d, n_d) are sufficient for the Bayes factor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::betainc::{ln_beta_mass, log_sum_exp};
use crate::priors::{fitting_prior_submodel, FittingPriorSpec, Submodel, TruncatedBeta};
use crate::trial::TrialOutcome;

#[derive(Debug, Error, PartialEq)]
pub enum BayesError {
    #[error("expected {expected} submodel weights for {family}, got {got}")]
    WeightDimension {
        family: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("submodel weights must be non-negative and sum to a positive value")]
    BadWeights,
}

/// Prior over hypotheses and submodels.
///
/// The hypothesis-level probabilities are fixed at 1/2 each and cancel in
/// the Bayes factor; they are carried only so results are self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisPrior {
    /// Weights over the D+1 null submodels, normalized to sum to 1.
    pub h0_weights: Vec<f64>,
    /// Weights over the D alternative submodels, normalized to sum to 1.
    pub h1_weights: Vec<f64>,
    /// Pr(H0) = Pr(H1) = 1/2.
    pub hypothesis_prob: f64,
}

impl HypothesisPrior {
    pub fn uniform(num_doses: usize) -> Self {
        Self {
            h0_weights: vec![1.0 / (num_doses + 1) as f64; num_doses + 1],
            h1_weights: vec![1.0 / num_doses as f64; num_doses],
            hypothesis_prob: 0.5,
        }
    }

    /// Builds a prior from raw non-negative weights, normalizing each family.
    pub fn new(
        num_doses: usize,
        h0_weights: Vec<f64>,
        h1_weights: Vec<f64>,
    ) -> Result<Self, BayesError> {
        if h0_weights.len() != num_doses + 1 {
            return Err(BayesError::WeightDimension {
                family: "H0",
                expected: num_doses + 1,
                got: h0_weights.len(),
            });
        }
        if h1_weights.len() != num_doses {
            return Err(BayesError::WeightDimension {
                family: "H1",
                expected: num_doses,
                got: h1_weights.len(),
            });
        }
        let normalize = |w: Vec<f64>| -> Result<Vec<f64>, BayesError> {
            if w.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(BayesError::BadWeights);
            }
            let s: f64 = w.iter().sum();
            if s <= 0.0 {
                return Err(BayesError::BadWeights);
            }
            Ok(w.into_iter().map(|v| v / s).collect())
        };
        Ok(Self {
            h0_weights: normalize(h0_weights)?,
            h1_weights: normalize(h1_weights)?,
            hypothesis_prob: 0.5,
        })
    }
}

/// Log Bayes factor together with its ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesFactorResult {
    /// log f(Y|H0) − log f(Y|H1); the test favors the MTD being present
    /// when this is small.
    pub log_bf: f64,
    pub log_marginal_h0: f64,
    pub log_marginal_h1: f64,
    /// Per-submodel log marginals, ordered by submodel index.
    pub h0_submodel_log_marginals: Vec<f64>,
    pub h1_submodel_log_marginals: Vec<f64>,
}

/// ln ∫ p^x (1−p)^{n−x} dΠ(p) for the truncated-beta prior Π.
///
/// Equal to ln of the posterior-to-prior ratio of beta masses on the
/// truncation interval, evaluated entirely in log space so deep-tail
/// intervals stay finite.
pub fn log_marginal_dose(x: u32, n: u32, prior: &TruncatedBeta) -> f64 {
    debug_assert!(x <= n);
    if n == 0 {
        return 0.0;
    }
    let post_a = prior.a + x as f64;
    let post_b = prior.b + (n - x) as f64;
    ln_beta_mass(post_a, post_b, prior.lo, prior.hi) - prior.ln_normalizer()
}

/// ln f(Y | submodel): sum of per-dose marginals under the submodel's
/// fitting-prior factors. Doses with no patients contribute zero.
pub fn log_marginal_submodel(
    y: &TrialOutcome,
    sub: &Submodel,
    spec: &FittingPriorSpec,
) -> Result<f64, crate::priors::PriorError> {
    let factors = fitting_prior_submodel(sub, spec)?;
    debug_assert_eq!(y.dlt_counts.len(), factors.len());
    Ok(factors
        .iter()
        .zip(y.dlt_counts.iter().zip(&y.patient_counts))
        .filter(|(_, (_, n))| **n > 0)
        .map(|(prior, (x, n))| log_marginal_dose(*x, *n, prior))
        .sum())
}

/// Bayes factor B(Y) = f(Y|H0) / f(Y|H1) under the hierarchical model; each
/// hypothesis marginal is the weighted mixture of its submodel marginals.
/// Zero-weight submodels are skipped (their log marginal is reported as the
/// computed value, but they do not enter the mixture).
pub fn bayes_factor(
    y: &TrialOutcome,
    spec: &FittingPriorSpec,
    hp: &HypothesisPrior,
) -> BayesFactorResult {
    assert_eq!(y.dlt_counts.len(), spec.num_doses);
    assert_eq!(hp.h0_weights.len(), spec.num_doses + 1);
    assert_eq!(hp.h1_weights.len(), spec.num_doses);
    let model = PreparedModel::new(spec, hp);
    model.evaluate(y)
}

/// Fitting priors and their normalizers, precomputed once and reused across
/// many trials. `bayes_factor` goes through this; batch callers should hold
/// one instance per configuration.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    num_doses: usize,
    h0: Vec<(f64, Vec<DoseFactor>)>,
    h1: Vec<(f64, Vec<DoseFactor>)>,
}

#[derive(Debug, Clone)]
struct DoseFactor {
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
    ln_norm: f64,
}

impl DoseFactor {
    fn from_prior(prior: &TruncatedBeta) -> Self {
        Self {
            a: prior.a,
            b: prior.b,
            lo: prior.lo,
            hi: prior.hi,
            ln_norm: prior.ln_normalizer(),
        }
    }

    fn log_marginal(&self, x: u32, n: u32) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let post_a = self.a + x as f64;
        let post_b = self.b + (n - x) as f64;
        ln_beta_mass(post_a, post_b, self.lo, self.hi) - self.ln_norm
    }
}

impl PreparedModel {
    pub fn new(spec: &FittingPriorSpec, hp: &HypothesisPrior) -> Self {
        let build = |sub: Submodel, weight: f64| {
            let factors = fitting_prior_submodel(&sub, spec)
                .expect("family iterators only yield valid submodel indices");
            (weight, factors.iter().map(DoseFactor::from_prior).collect())
        };
        Self {
            num_doses: spec.num_doses,
            h0: Submodel::h0_family(spec.num_doses)
                .zip(hp.h0_weights.iter())
                .map(|(s, w)| build(s, *w))
                .collect(),
            h1: Submodel::h1_family(spec.num_doses)
                .zip(hp.h1_weights.iter())
                .map(|(s, w)| build(s, *w))
                .collect(),
        }
    }

    pub fn evaluate(&self, y: &TrialOutcome) -> BayesFactorResult {
        assert_eq!(y.dlt_counts.len(), self.num_doses);
        let submodel_lm = |factors: &[DoseFactor]| -> f64 {
            factors
                .iter()
                .zip(y.dlt_counts.iter().zip(&y.patient_counts))
                .map(|(f, (x, n))| f.log_marginal(*x, *n))
                .sum()
        };
        let mix = |family: &[(f64, Vec<DoseFactor>)]| -> (Vec<f64>, f64) {
            let per: Vec<f64> = family.iter().map(|(_, f)| submodel_lm(f)).collect();
            let terms: Vec<f64> = family
                .iter()
                .zip(&per)
                .filter(|((w, _), _)| *w > 0.0)
                .map(|((w, _), lm)| w.ln() + lm)
                .collect();
            (per, log_sum_exp(&terms))
        };
        let (h0_per, log_marginal_h0) = mix(&self.h0);
        let (h1_per, log_marginal_h1) = mix(&self.h1);
        BayesFactorResult {
            log_bf: log_marginal_h0 - log_marginal_h1,
            log_marginal_h0,
            log_marginal_h1,
            h0_submodel_log_marginals: h0_per,
            h1_submodel_log_marginals: h1_per,
        }
    }

    pub fn log_bf(&self, y: &TrialOutcome) -> f64 {
        self.evaluate(y).log_bf
    }
}
