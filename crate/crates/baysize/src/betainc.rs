//! Log-space beta-function numerics.
//!
//! Everything downstream (interval decisions, marginal likelihoods, safety
//! rules) reduces to masses of beta distributions on subintervals of (0,1).
//! Posterior shape parameters grow with the number of treated patients, so
//! tail masses underflow `f64` long before the quantities of interest stop
//! being informative. The functions here therefore work on the log scale and
//! evaluate interval masses through whichever tail keeps the continued
//! fraction well conditioned, switching to complemented forms when both
//! endpoints sit in the same tail.

use statrs::function::gamma::ln_gamma;

const MAX_CF_ITER: usize = 400;
const FPMIN: f64 = 1e-300;

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b).
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
///
/// Converges quickly when x < (a+1)/(a+b+2); callers are responsible for
/// switching to the symmetric form otherwise.
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_CF_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        // even step
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        // odd step
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < 3e-16 {
            return h;
        }
    }
    debug_assert!(false, "incomplete beta continued fraction did not converge");
    h
}

/// ln(1 − e^l) for l ≤ 0, accurate across the whole range.
fn ln_one_minus_exp(l: f64) -> f64 {
    debug_assert!(l <= 0.0);
    if l == f64::NEG_INFINITY {
        0.0
    } else if l > -1e-12 {
        // 1 − e^l ≈ −l to double precision
        (-l).max(f64::MIN_POSITIVE).ln()
    } else if l > -std::f64::consts::LN_2 {
        (-l.exp_m1()).ln()
    } else {
        (-l.exp()).ln_1p()
    }
}

/// ln I_x(a, b) via the fast-converging branch of the continued fraction.
/// Only valid (well conditioned) for x below the switch point.
fn ln_inc_lower(a: f64, b: f64, x: f64) -> f64 {
    a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b) - a.ln() + betacf(a, b, x).ln()
}

fn ln_inc_lower_checked(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if x >= 1.0 {
        0.0
    } else {
        ln_inc_lower(a, b, x)
    }
}

/// Natural log of the regularized incomplete beta function I_x(a, b).
pub fn ln_inc_beta_reg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x >= 1.0 {
        return 0.0;
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_inc_lower(a, b, x)
    } else {
        // I_x(a,b) = 1 − I_{1−x}(b,a)
        ln_one_minus_exp(ln_inc_lower_checked(b, a, 1.0 - x))
    }
}

/// Regularized incomplete beta function I_x(a, b) on the linear scale.
pub fn inc_beta_reg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else if x < (a + 1.0) / (a + b + 2.0) {
        ln_inc_lower(a, b, x).exp()
    } else {
        1.0 - ln_inc_lower_checked(b, a, 1.0 - x).exp()
    }
}

/// Upper tail Pr(T > t) for T ~ Beta(a, b), via the symmetry
/// 1 − I_t(a,b) = I_{1−t}(b,a).
pub fn beta_upper_tail(a: f64, b: f64, t: f64) -> f64 {
    inc_beta_reg(b, a, 1.0 - t)
}

/// ln(e^l1 − e^l0) for l0 ≤ l1.
fn ln_diff_exp(l1: f64, l0: f64) -> f64 {
    if l0 == f64::NEG_INFINITY {
        return l1;
    }
    let d = l1 - l0;
    if d <= 0.0 {
        // mass below one ulp of the tail value itself
        return l1 + f64::EPSILON.ln();
    }
    l1 + ln_one_minus_exp(-d)
}

/// ln Pr(lo < T < hi) for T ~ Beta(a, b).
///
/// The difference I_hi − I_lo is evaluated through the lower-tail forms when
/// both endpoints sit below the continued-fraction switch point, through the
/// complemented forms when both sit above it, and as 1 minus the two outer
/// tails when the interval straddles it. That keeps the result accurate down
/// to masses far below `f64::MIN_POSITIVE`.
pub fn ln_interval_mass_reg(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    debug_assert!(lo < hi);
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    let split = (a + 1.0) / (a + b + 2.0);
    if hi <= split {
        let l1 = ln_inc_lower_checked(a, b, hi);
        let l0 = ln_inc_lower_checked(a, b, lo);
        ln_diff_exp(l1, l0)
    } else if lo >= split {
        let c0 = ln_inc_lower_checked(b, a, 1.0 - lo);
        let c1 = ln_inc_lower_checked(b, a, 1.0 - hi);
        ln_diff_exp(c0, c1)
    } else {
        // interval contains the switch point, so its mass is O(1)
        let lower_tail = ln_inc_lower_checked(a, b, lo).exp();
        let upper_tail = ln_inc_lower_checked(b, a, 1.0 - hi).exp();
        let outside = lower_tail + upper_tail;
        if outside < 1.0 {
            (-outside).ln_1p()
        } else {
            f64::MIN_POSITIVE.ln()
        }
    }
}

/// ln ∫_lo^hi t^{a−1} (1−t)^{b−1} dt, the unnormalized beta mass.
pub fn ln_beta_mass(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    ln_beta(a, b) + ln_interval_mass_reg(a, b, lo, hi)
}

/// log Σ e^{v_i}, guarded against empty and all-(−∞) inputs.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}
