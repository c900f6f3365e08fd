//! Core design parameters: the equivalence interval around the target
//! toxicity rate and the conduct parameters of the dose-finding design.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DesignError {
    #[error("eps1 and eps2 must be strictly positive (got eps1={eps1}, eps2={eps2})")]
    NonPositiveHalfWidth { eps1: f64, eps2: f64 },
    #[error("p_T − eps1 must exceed 0 (got p_T={p_t}, eps1={eps1})")]
    LowerIntervalEmpty { p_t: f64, eps1: f64 },
    #[error("p_T + eps2 must be below 1 (got p_T={p_t}, eps2={eps2})")]
    HigherIntervalEmpty { p_t: f64, eps2: f64 },
    #[error("num_doses must be at least 1")]
    NoDoses,
    #[error("cohort_size must be at least 1")]
    EmptyCohort,
    #[error("start_dose must lie in 1..={num_doses} (got {start_dose})")]
    StartDoseOutOfRange { start_dose: usize, num_doses: usize },
    #[error("max_patients ({max_patients}) must be at least cohort_size ({cohort_size})")]
    MaxPatientsTooSmall { max_patients: u32, cohort_size: u32 },
    #[error("safety_threshold must lie in (0, 1) (got {0})")]
    BadSafetyThreshold(f64),
    #[error("safety prior shapes must be positive (got ({0}, {1}))")]
    BadSafetyPrior(f64, f64),
}

/// Target toxicity rate `p_T` with half-widths `eps1`/`eps2`.
///
/// Partitions (0,1) into the lower interval (0, p_T−eps1), the equivalence
/// interval [p_T−eps1, p_T+eps2] and the higher interval (p_T+eps2, 1). A
/// dose whose toxicity probability lands in the equivalence interval counts
/// as the maximum tolerated dose; eps1+eps2 is the effect size of the design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceInterval {
    p_t: f64,
    eps1: f64,
    eps2: f64,
}

impl EquivalenceInterval {
    pub fn new(p_t: f64, eps1: f64, eps2: f64) -> Result<Self, DesignError> {
        // comparisons are phrased so NaN inputs fail validation too
        let positive = |v: f64| v > 0.0;
        if !positive(eps1) || !positive(eps2) {
            return Err(DesignError::NonPositiveHalfWidth { eps1, eps2 });
        }
        if !positive(p_t - eps1) {
            return Err(DesignError::LowerIntervalEmpty { p_t, eps1 });
        }
        if !positive(1.0 - (p_t + eps2)) {
            return Err(DesignError::HigherIntervalEmpty { p_t, eps2 });
        }
        Ok(Self { p_t, eps1, eps2 })
    }

    pub fn target(&self) -> f64 {
        self.p_t
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    /// Lower edge p_T − eps1.
    pub fn lower(&self) -> f64 {
        self.p_t - self.eps1
    }

    /// Upper edge p_T + eps2.
    pub fn upper(&self) -> f64 {
        self.p_t + self.eps2
    }

    /// Effect size eps1 + eps2 (also the width of one decision subinterval).
    pub fn effect_size(&self) -> f64 {
        self.eps1 + self.eps2
    }

    /// Membership in the closed equivalence interval.
    pub fn contains(&self, p: f64) -> bool {
        p >= self.lower() && p <= self.upper()
    }

    /// Membership in the open equivalence interval.
    pub fn contains_strictly(&self, p: f64) -> bool {
        p > self.lower() && p < self.upper()
    }
}

/// Conduct parameters for one simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub ei: EquivalenceInterval,
    pub num_doses: usize,
    pub cohort_size: u32,
    /// 1-based index of the starting dose.
    pub start_dose: usize,
    pub max_patients: u32,
    /// Posterior tail probability above p_T that triggers the safety rule.
    pub safety_threshold: f64,
    /// Beta prior shapes for the safety rule posterior.
    pub safety_prior: (f64, f64),
}

impl DesignConfig {
    pub const DEFAULT_COHORT_SIZE: u32 = 3;
    pub const DEFAULT_SAFETY_THRESHOLD: f64 = 0.95;

    pub fn new(
        ei: EquivalenceInterval,
        num_doses: usize,
        cohort_size: u32,
        start_dose: usize,
        max_patients: u32,
        safety_threshold: f64,
        safety_prior: (f64, f64),
    ) -> Result<Self, DesignError> {
        if num_doses == 0 {
            return Err(DesignError::NoDoses);
        }
        if cohort_size == 0 {
            return Err(DesignError::EmptyCohort);
        }
        if start_dose == 0 || start_dose > num_doses {
            return Err(DesignError::StartDoseOutOfRange {
                start_dose,
                num_doses,
            });
        }
        if max_patients < cohort_size {
            return Err(DesignError::MaxPatientsTooSmall {
                max_patients,
                cohort_size,
            });
        }
        if !(safety_threshold > 0.0 && safety_threshold < 1.0) {
            return Err(DesignError::BadSafetyThreshold(safety_threshold));
        }
        if !(safety_prior.0 > 0.0 && safety_prior.1 > 0.0) {
            return Err(DesignError::BadSafetyPrior(safety_prior.0, safety_prior.1));
        }
        Ok(Self {
            ei,
            num_doses,
            cohort_size,
            start_dose,
            max_patients,
            safety_threshold,
            safety_prior,
        })
    }

    /// Standard conduct: cohort 3, start at dose 1, 0.95 safety threshold,
    /// uniform safety prior.
    pub fn standard(ei: EquivalenceInterval, num_doses: usize, max_patients: u32) -> Self {
        Self::new(
            ei,
            num_doses,
            Self::DEFAULT_COHORT_SIZE,
            1,
            max_patients,
            Self::DEFAULT_SAFETY_THRESHOLD,
            (1.0, 1.0),
        )
        .expect("standard design parameters are valid")
    }

    /// Same design with a different enrollment cap; used by the sample-size
    /// search which sweeps the cap.
    pub fn with_max_patients(&self, max_patients: u32) -> Self {
        let mut cfg = self.clone();
        cfg.max_patients = max_patients;
        cfg
    }
}
