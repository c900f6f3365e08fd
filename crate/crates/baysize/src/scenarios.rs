//! Sampling priors: generative distributions of the true toxicity vector.
//!
//! Null-side draws keep every dose below the equivalence interval (trials
//! with every dose above it are stopped by the safety rule instead of being
//! tested, so that region is excluded by construction). Alternative-side
//! vectors are point masses, either given explicitly or built from scenario
//! geometry: the MTD position in the dose range, its offset inside the
//! equivalence interval, and the gaps from the interval edges to the
//! neighboring doses.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::EquivalenceInterval;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario vector must have {expected} entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("scenario vector must be strictly increasing inside (0, 1)")]
    NotIncreasing,
    #[error(
        "explicit scenario must contain exactly one entry strictly inside the \
         equivalence interval, found {0}"
    )]
    AmbiguousMtd(usize),
    #[error("d_star must lie in 1..={num_doses} (got {d_star})")]
    MtdIndexOutOfRange { d_star: usize, num_doses: usize },
    #[error("lambda1 must lie in [0, eps1+eps2] (got {0})")]
    BadLambda(f64),
    #[error("rho1 must lie in [0, p_T − eps1) so the next lower dose stays positive (got {0})")]
    BadRho1(f64),
    #[error("rho2 must keep the next higher dose below 1 (got {0})")]
    BadRho2(f64),
    #[error("infeasible geometry: {0}")]
    Infeasible(&'static str),
}

/// Null-side sampling prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H0SamplingPrior {
    /// Sorted i.i.d. uniforms on (0, p_T − eps1).
    OrderStatisticsUniform,
    /// Sequentially conditioned uniforms, each above its predecessor.
    MonotoneUniform,
    /// Every dose exactly at p_T − eps1, the hardest null to tell apart.
    PointMassLowerEdge,
}

/// Alternative-side scenario: either an explicit toxicity vector or the
/// geometry (d*, lambda1, rho1, rho2) it is generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSpec {
    Parametric {
        /// 1-based dose index of the true MTD.
        d_star: usize,
        /// Offset of the MTD toxicity above p_T − eps1, in [0, eps1+eps2].
        lambda1: f64,
        /// Gap from p_T − eps1 down to the next lower dose.
        rho1: f64,
        /// Gap from p_T + eps2 up to the next higher dose.
        rho2: f64,
    },
    Explicit { p_star: Vec<f64> },
}

impl ScenarioSpec {
    /// MTD centered in the equivalence interval, neighbors at its edges.
    pub fn mtd_at(d_star: usize, ei: &EquivalenceInterval) -> Self {
        ScenarioSpec::Parametric {
            d_star,
            lambda1: ei.eps1(),
            rho1: 0.0,
            rho2: 0.0,
        }
    }

    /// Compact identifier for output records.
    pub fn label(&self) -> String {
        match self {
            ScenarioSpec::Parametric {
                d_star,
                lambda1,
                rho1,
                rho2,
            } => format!("mtd_d{d_star}_lam{lambda1}_rho{rho1}_{rho2}"),
            ScenarioSpec::Explicit { p_star } => {
                let joined = p_star
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join("|");
                format!("pstar_{joined}")
            }
        }
    }
}

/// One set of the five standard scenarios placing the MTD at each dose.
pub fn mtd_location_scenarios(ei: &EquivalenceInterval, num_doses: usize) -> Vec<ScenarioSpec> {
    (1..=num_doses).map(|d| ScenarioSpec::mtd_at(d, ei)).collect()
}

// Interval edges are arithmetic on human-entered decimals (0.3 − 0.1 lands
// one ulp below 0.2), so membership checks for scenario validation carry a
// tolerance: a dose sitting on an edge counts as outside the open interval.
const BOUNDARY_TOL: f64 = 1e-9;

fn strictly_inside(p: f64, ei: &EquivalenceInterval) -> bool {
    p > ei.lower() + BOUNDARY_TOL && p < ei.upper() - BOUNDARY_TOL
}

/// Draws a true toxicity vector from the chosen null sampling prior.
pub fn draw_h0<R: Rng + ?Sized>(
    kind: H0SamplingPrior,
    num_doses: usize,
    ei: &EquivalenceInterval,
    rng: &mut R,
) -> Vec<f64> {
    debug_assert!(num_doses >= 1);
    let edge = ei.lower();
    match kind {
        H0SamplingPrior::OrderStatisticsUniform => {
            let mut p: Vec<f64> = (0..num_doses).map(|_| rng.random::<f64>() * edge).collect();
            p.sort_by(f64::total_cmp);
            p
        }
        H0SamplingPrior::MonotoneUniform => {
            let mut p = Vec::with_capacity(num_doses);
            let mut prev = 0.0;
            for _ in 0..num_doses {
                let next = prev + rng.random::<f64>() * (edge - prev);
                p.push(next);
                prev = next;
            }
            p
        }
        H0SamplingPrior::PointMassLowerEdge => vec![edge; num_doses],
    }
}

/// Resolves a scenario into its toxicity vector.
///
/// Parametric scenarios place p_{d*} = (p_T − eps1) + lambda1, the next lower
/// dose at (p_T − eps1) − rho1 and the next higher at (p_T + eps2) + rho2.
/// Remaining lower doses fill (0, p_{d*−1}) on an equally spaced grid;
/// remaining higher doses climb from p_{d*+1} in steps of 0.1, compressed
/// when that would leave the unit interval.
pub fn scenario_p1(
    spec: &ScenarioSpec,
    ei: &EquivalenceInterval,
    num_doses: usize,
) -> Result<Vec<f64>, ScenarioError> {
    match spec {
        ScenarioSpec::Explicit { p_star } => {
            if p_star.len() != num_doses {
                return Err(ScenarioError::WrongLength {
                    expected: num_doses,
                    got: p_star.len(),
                });
            }
            validate_increasing_in_unit(p_star)?;
            let in_ei = p_star.iter().filter(|p| strictly_inside(**p, ei)).count();
            if in_ei != 1 {
                return Err(ScenarioError::AmbiguousMtd(in_ei));
            }
            Ok(p_star.clone())
        }
        ScenarioSpec::Parametric {
            d_star,
            lambda1,
            rho1,
            rho2,
        } => {
            let d_star = *d_star;
            if d_star == 0 || d_star > num_doses {
                return Err(ScenarioError::MtdIndexOutOfRange { d_star, num_doses });
            }
            if !(0.0..=ei.effect_size()).contains(lambda1) {
                return Err(ScenarioError::BadLambda(*lambda1));
            }
            if !(0.0..ei.lower()).contains(rho1) {
                return Err(ScenarioError::BadRho1(*rho1));
            }
            if *rho2 < 0.0 || ei.upper() + rho2 >= 1.0 {
                return Err(ScenarioError::BadRho2(*rho2));
            }

            let mut p = vec![0.0; num_doses];
            p[d_star - 1] = ei.lower() + lambda1;
            if d_star > 1 {
                let below = ei.lower() - rho1;
                if below >= p[d_star - 1] {
                    return Err(ScenarioError::Infeasible(
                        "next lower dose would not be below the MTD (lambda1 + rho1 = 0)",
                    ));
                }
                p[d_star - 2] = below;
                // equally spaced grid on (0, p_{d*−1}) for the remaining lower doses
                let count = d_star - 2;
                for k in 1..=count {
                    p[k - 1] = below * k as f64 / (count + 1) as f64;
                }
            }
            if d_star < num_doses {
                let above = ei.upper() + rho2;
                if above <= p[d_star - 1] {
                    return Err(ScenarioError::Infeasible(
                        "next higher dose would not be above the MTD (lambda1 = eps1+eps2, rho2 = 0)",
                    ));
                }
                p[d_star] = above;
                let count = num_doses - d_star - 1;
                if count > 0 {
                    let step = if above + 0.1 * (count as f64) < 1.0 {
                        0.1
                    } else {
                        (1.0 - above) / (count + 1) as f64
                    };
                    for m in 1..=count {
                        p[d_star + m] = above + step * m as f64;
                    }
                }
            }
            validate_increasing_in_unit(&p)?;
            Ok(p)
        }
    }
}

/// Alternative-side draw: the sampling prior is a point mass, so this is
/// just the resolved scenario vector.
pub fn draw_h1(
    spec: &ScenarioSpec,
    ei: &EquivalenceInterval,
    num_doses: usize,
) -> Result<Vec<f64>, ScenarioError> {
    scenario_p1(spec, ei, num_doses)
}

fn validate_increasing_in_unit(p: &[f64]) -> Result<(), ScenarioError> {
    let in_unit = p.iter().all(|v| *v > 0.0 && *v < 1.0);
    let increasing = p.windows(2).all(|w| w[0] < w[1]);
    if in_unit && increasing {
        Ok(())
    } else {
        Err(ScenarioError::NotIncreasing)
    }
}
