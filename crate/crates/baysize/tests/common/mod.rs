//! Shared oracle machinery for the integration suites.
//!
//! Everything here evaluates beta-family quantities by adaptive quadrature
//! over the raw integrand, deliberately independent of the continued
//! fraction code under test.

#![allow(dead_code)]

use baysize::{DoseDecision, EquivalenceInterval};

/// Adaptive Simpson integration with error control.
///
/// A few subdivision levels are forced before the Richardson error estimate
/// is trusted; the first-level estimate can cancel accidentally when the
/// integrand has an interior mode.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fb, fm, whole, tol, 60, 6)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    forced: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (forced == 0 && delta.abs() <= 15.0 * tol) {
        left + right + delta / 15.0
    } else {
        let forced = forced.saturating_sub(1);
        simpson_step(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1, forced)
            + simpson_step(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1, forced)
    }
}

/// ln ∫_lo^hi t^(a−1) (1−t)^(b−1) dt by scaled adaptive quadrature.
///
/// The integrand is rescaled by its maximum over the interval so the
/// quadrature operates on O(1) values even when the true integral sits far
/// below `f64::MIN_POSITIVE`. Shapes must satisfy a, b >= 1.
pub fn ln_beta_integral_quad(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    assert!(a >= 1.0 && b >= 1.0);
    assert!(lo < hi);
    let ln_g = |t: f64| -> f64 {
        let term_a = if a == 1.0 { 0.0 } else { (a - 1.0) * t.ln() };
        let term_b = if b == 1.0 { 0.0 } else { (b - 1.0) * (1.0 - t).ln() };
        term_a + term_b
    };
    let peak = if a > 1.0 && b > 1.0 {
        ln_g(((a - 1.0) / (a + b - 2.0)).clamp(lo, hi))
    } else if a > 1.0 {
        ln_g(hi)
    } else if b > 1.0 {
        ln_g(lo)
    } else {
        0.0
    };
    let f = |t: f64| (ln_g(t) - peak).exp();
    let integral = adaptive_simpson(&f, lo, hi, 1e-13);
    peak + integral.ln()
}

/// Pr(T > t) for T ~ Beta(a, b), by quadrature of both tail and normalizer.
pub fn beta_upper_tail_quad(a: f64, b: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    (ln_beta_integral_quad(a, b, t, 1.0) - ln_beta_integral_quad(a, b, 0.0, 1.0)).exp()
}

/// Interval-design decision recomputed from scratch: unit probability mass
/// by quadrature over every subinterval, ties toward the equivalence
/// interval with the lower side winning at equal distance, tail-rule upgrade
/// to exclusion.
pub fn upm_oracle_decision(
    x: u32,
    n: u32,
    ei: &EquivalenceInterval,
    safety_threshold: f64,
) -> DoseDecision {
    let a = 1.0 + x as f64;
    let b = 1.0 + (n - x) as f64;
    if beta_upper_tail_quad(a, b, ei.target()) > safety_threshold {
        return DoseDecision::DeescalateAndExclude;
    }
    let ln_total = ln_beta_integral_quad(a, b, 0.0, 1.0);
    let upm = |lo: f64, hi: f64| (ln_beta_integral_quad(a, b, lo, hi) - ln_total).exp() / (hi - lo);

    let width = ei.effect_size();
    let lower = ei.lower();
    let upper = ei.upper();
    let mut best_upm = upm(lower, upper);
    let mut best = DoseDecision::Stay;
    let mut k = 0u32;
    loop {
        k += 1;
        let mut any = false;
        let hi_below = lower - (k - 1) as f64 * width;
        if hi_below > 1e-9 {
            let lo_below = (lower - k as f64 * width).max(0.0);
            if hi_below - lo_below > 1e-9 {
                let u = upm(lo_below, hi_below);
                if u > best_upm {
                    best_upm = u;
                    best = DoseDecision::Escalate;
                }
            }
            any = true;
        }
        let lo_above = upper + (k - 1) as f64 * width;
        if lo_above < 1.0 - 1e-9 {
            let hi_above = (upper + k as f64 * width).min(1.0);
            if hi_above - lo_above > 1e-9 {
                let u = upm(lo_above, hi_above);
                if u > best_upm {
                    best_upm = u;
                    best = DoseDecision::Deescalate;
                }
            }
            any = true;
        }
        if !any {
            break;
        }
    }
    best
}

/// Relative closeness with a floor for values near zero.
pub fn rel_close(got: f64, expect: f64, tol: f64) -> bool {
    (got - expect).abs() <= tol * expect.abs().max(1.0)
}
