//! Fitting priors: the submodel families locating each dose relative to the
//! equivalence interval, their per-dose mode vectors, and the truncated-beta
//! factors built from them.
//!
//! Under the alternative hypothesis the model space splits into D submodels,
//! one per candidate MTD position; under the null it splits into D+1
//! submodels, one per way of sandwiching the (absent) MTD between adjacent
//! doses. Conditional on a submodel, the prior over the toxicity vector is a
//! product of independent beta densities truncated to the interval each dose
//! is assigned to, with pseudo-mode q and dispersion c giving raw shapes
//! (cq+1, c(1−q)+1). At c = 0 every factor is the uniform on its interval.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::betainc::{ln_beta_mass, ln_interval_mass_reg};
use crate::design::EquivalenceInterval;

#[derive(Debug, Error, PartialEq)]
pub enum PriorError {
    #[error("truncated beta shapes must be positive (got a={a}, b={b})")]
    BadShapes { a: f64, b: f64 },
    #[error("truncation interval must satisfy 0 <= lo < hi <= 1 (got ({lo}, {hi}))")]
    DegenerateInterval { lo: f64, hi: f64 },
    #[error("dispersion c must be non-negative (got {0})")]
    NegativeDispersion(f64),
    #[error("mode must lie strictly inside (0, 1) (got {0})")]
    ModeOutOfRange(f64),
    #[error(
        "mode constants must satisfy 0 < a1 <= a2 < 1 and 1 < a3 <= a4 \
         (got ({0}, {1}, {2}, {3}))"
    )]
    BadModeConstants(f64, f64, f64, f64),
    #[error("mode constant a{index} = {value} pushes a mode to {mode}, outside (0, 1)")]
    ModeEscapesUnitInterval { index: usize, value: f64, mode: f64 },
    #[error("submodel index {index} outside the {hypothesis} family for {num_doses} doses")]
    SubmodelOutOfRange {
        hypothesis: &'static str,
        index: usize,
        num_doses: usize,
    },
}

/// Beta(a, b) density restricted and renormalized to (lo, hi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedBeta {
    pub a: f64,
    pub b: f64,
    pub lo: f64,
    pub hi: f64,
}

impl TruncatedBeta {
    pub fn new(a: f64, b: f64, lo: f64, hi: f64) -> Result<Self, PriorError> {
        if !(a > 0.0 && b > 0.0) {
            return Err(PriorError::BadShapes { a, b });
        }
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(PriorError::DegenerateInterval { lo, hi });
        }
        Ok(Self { a, b, lo, hi })
    }

    /// ln ∫_lo^hi t^{a−1}(1−t)^{b−1} dt, the log normalizing constant.
    pub fn ln_normalizer(&self) -> f64 {
        ln_beta_mass(self.a, self.b, self.lo, self.hi)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return f64::NEG_INFINITY;
        }
        (self.a - 1.0) * x.ln() + (self.b - 1.0) * (1.0 - x).ln() - self.ln_normalizer()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Probability the underlying (untruncated) beta assigns to the support.
    pub fn support_mass(&self) -> f64 {
        ln_interval_mass_reg(self.a, self.b, self.lo, self.hi).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// No dose sits in the equivalence interval.
    H0,
    /// Exactly one dose sits in the equivalence interval.
    H1,
}

/// One cell of the partitioned model space.
///
/// `H1` with index d (1..=D) places dose d in the equivalence interval and
/// every other dose outside it. `H0` with index d (0..=D) places doses 1..=d
/// in the lower interval and doses d+1..=D in the higher interval, so d = 0
/// means every dose is too toxic and d = D means every dose is too safe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Submodel {
    pub hypothesis: Hypothesis,
    pub index: usize,
}

impl Submodel {
    pub fn h0(index: usize) -> Self {
        Self {
            hypothesis: Hypothesis::H0,
            index,
        }
    }

    pub fn h1(index: usize) -> Self {
        Self {
            hypothesis: Hypothesis::H1,
            index,
        }
    }

    pub fn validate(&self, num_doses: usize) -> Result<(), PriorError> {
        let ok = match self.hypothesis {
            Hypothesis::H0 => self.index <= num_doses,
            Hypothesis::H1 => (1..=num_doses).contains(&self.index),
        };
        if ok {
            Ok(())
        } else {
            Err(PriorError::SubmodelOutOfRange {
                hypothesis: match self.hypothesis {
                    Hypothesis::H0 => "H0",
                    Hypothesis::H1 => "H1",
                },
                index: self.index,
                num_doses,
            })
        }
    }

    /// The D+1 null submodels, ordered by index.
    pub fn h0_family(num_doses: usize) -> impl Iterator<Item = Submodel> {
        (0..=num_doses).map(Submodel::h0)
    }

    /// The D alternative submodels, ordered by candidate MTD position.
    pub fn h1_family(num_doses: usize) -> impl Iterator<Item = Submodel> {
        (1..=num_doses).map(Submodel::h1)
    }
}

/// Parameters of the fitting-prior family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittingPriorSpec {
    /// Dispersion c >= 0; larger values concentrate each factor around its
    /// pseudo-mode, c = 0 is the vague (interval-uniform) setting.
    pub dispersion: f64,
    /// (a1, a2, a3, a4) scaling the interval edges into per-dose modes.
    pub mode_constants: (f64, f64, f64, f64),
    pub ei: EquivalenceInterval,
    pub num_doses: usize,
}

impl FittingPriorSpec {
    pub const DEFAULT_MODE_CONSTANTS: (f64, f64, f64, f64) = (0.6, 0.9, 1.05, 1.2);

    pub fn new(
        dispersion: f64,
        mode_constants: (f64, f64, f64, f64),
        ei: EquivalenceInterval,
        num_doses: usize,
    ) -> Result<Self, PriorError> {
        if dispersion < 0.0 {
            return Err(PriorError::NegativeDispersion(dispersion));
        }
        let (a1, a2, a3, a4) = mode_constants;
        // a1 <= a2 and a3 <= a4 keep every mode vector non-decreasing
        if !(0.0 < a1 && a1 <= a2 && a2 < 1.0 && 1.0 < a3 && a3 <= a4) {
            return Err(PriorError::BadModeConstants(a1, a2, a3, a4));
        }
        for (index, value) in [(3, a3), (4, a4)] {
            let mode = value * ei.upper();
            if mode >= 1.0 {
                return Err(PriorError::ModeEscapesUnitInterval { index, value, mode });
            }
        }
        Ok(Self {
            dispersion,
            mode_constants,
            ei,
            num_doses,
        })
    }

    /// Vague prior (c = 0) with the default mode constants.
    pub fn vague(ei: EquivalenceInterval, num_doses: usize) -> Self {
        Self::new(0.0, Self::DEFAULT_MODE_CONSTANTS, ei, num_doses)
            .expect("default mode constants are valid for any valid interval")
    }

    fn li(&self) -> (f64, f64) {
        (0.0, self.ei.lower())
    }

    fn ei_bounds(&self) -> (f64, f64) {
        (self.ei.lower(), self.ei.upper())
    }

    fn hi(&self) -> (f64, f64) {
        (self.ei.upper(), 1.0)
    }
}

/// Per-dose pseudo-modes for one submodel.
///
/// Doses assigned to the lower interval get modes a1·(p_T−eps1) except the
/// topmost of them, which gets a2·(p_T−eps1); the candidate MTD (H1 only)
/// gets p_T; doses assigned to the higher interval get a3·(p_T+eps2) for the
/// lowest of them and a4·(p_T+eps2) above. The result is non-decreasing and
/// every mode lies strictly inside the interval its dose is assigned to.
pub fn mode_vector(sub: &Submodel, spec: &FittingPriorSpec) -> Result<Vec<f64>, PriorError> {
    sub.validate(spec.num_doses)?;
    let (a1, a2, a3, a4) = spec.mode_constants;
    let low_edge = spec.ei.lower();
    let high_edge = spec.ei.upper();
    let target = spec.ei.target();

    let mode_at = |k: usize| -> f64 {
        match sub.hypothesis {
            Hypothesis::H1 => {
                let j = sub.index;
                if k + 1 < j {
                    a1 * low_edge
                } else if k + 1 == j {
                    a2 * low_edge
                } else if k == j {
                    target
                } else if k == j + 1 {
                    a3 * high_edge
                } else {
                    a4 * high_edge
                }
            }
            Hypothesis::H0 => {
                let d = sub.index;
                if k < d {
                    a1 * low_edge
                } else if k == d {
                    a2 * low_edge
                } else if k == d + 1 {
                    a3 * high_edge
                } else {
                    a4 * high_edge
                }
            }
        }
    };

    Ok((1..=spec.num_doses).map(mode_at).collect())
}

/// Truncated beta with raw shapes (cq+1, c(1−q)+1) on the given interval.
///
/// The shapes are those of the untruncated beta whose mode is q; restricted
/// to a subinterval, q acts as a pseudo-mode. c = 0 erases the mode entirely
/// and yields the uniform on the interval.
pub fn trunc_beta_from_mode(
    q: f64,
    c: f64,
    interval: (f64, f64),
) -> Result<TruncatedBeta, PriorError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(PriorError::ModeOutOfRange(q));
    }
    if c < 0.0 {
        return Err(PriorError::NegativeDispersion(c));
    }
    TruncatedBeta::new(c * q + 1.0, c * (1.0 - q) + 1.0, interval.0, interval.1)
}

/// The D truncated-beta factors of one submodel's fitting prior.
pub fn fitting_prior_submodel(
    sub: &Submodel,
    spec: &FittingPriorSpec,
) -> Result<Vec<TruncatedBeta>, PriorError> {
    let modes = mode_vector(sub, spec)?;
    let mut factors = Vec::with_capacity(spec.num_doses);
    for (k, q) in modes.iter().enumerate() {
        let dose = k + 1;
        let interval = match sub.hypothesis {
            Hypothesis::H1 => {
                if dose < sub.index {
                    spec.li()
                } else if dose == sub.index {
                    spec.ei_bounds()
                } else {
                    spec.hi()
                }
            }
            Hypothesis::H0 => {
                if dose <= sub.index {
                    spec.li()
                } else {
                    spec.hi()
                }
            }
        };
        factors.push(trunc_beta_from_mode(*q, spec.dispersion, interval)?);
    }
    Ok(factors)
}
