//! The bump profile `ψ: [0, ∞) → [0, 1]`.
//!
//! `ψ = t²` on `[0, ½]`. On `[½, √2/2]` the second derivative falls
//! linearly from 2 to 0. On `[√2/2, 3/2]` it is a nonpositive asymmetric
//! tent whose peak position is fixed by `∫₀^{3/2} ψ′ = 1`. Beyond `3/2`,
//! `ψ = 1`. The result is C² with `ψ′ > 0` on `(0, 3/2)`.

use crate::error::{Error, Result};
use crate::report::{Check, Report};

pub const BREAK_QUADRATIC: f64 = 0.5;
pub const BREAK_INFLECTION: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const BREAK_FLAT: f64 = 1.5;

/// Spline coefficients derived from the breakpoints.
#[derive(Debug, Clone, Copy)]
struct Coefficients {
    /// Width of the convex piece past `½`.
    a: f64,
    /// `ψ′(√2/2)`.
    peak_slope: f64,
    /// Width of the concave piece.
    b: f64,
    /// Position of the tent tip inside the concave piece.
    q: f64,
    /// Depth of the tent.
    m: f64,
    /// `ψ` at `√2/2`.
    psi_inflection: f64,
    /// `ψ` and `ψ′` at the tent tip.
    psi_tip: f64,
    dpsi_tip: f64,
}

const fn coefficients() -> Coefficients {
    // const-evaluable arithmetic only; sqrt is folded into the breakpoint constant
    let a = BREAK_INFLECTION - BREAK_QUADRATIC;
    let peak_slope = 1.0 + a;
    let b = BREAK_FLAT - BREAK_INFLECTION;
    let rest = 0.75 - (a + 2.0 * a * a / 3.0);
    let q = 3.0 * rest / peak_slope - b;
    let m = 2.0 * peak_slope / b;
    let psi_inflection = 0.25 + a + 2.0 * a * a / 3.0;
    let psi_tip = psi_inflection + peak_slope * q - m * q * q / 6.0;
    let dpsi_tip = peak_slope - m * q / 2.0;
    Coefficients { a, peak_slope, b, q, m, psi_inflection, psi_tip, dpsi_tip }
}

const C: Coefficients = coefficients();

/// Fraction of the concave piece before the tent tip.
pub fn tent_peak_fraction() -> f64 {
    C.q / C.b
}

/// `(ψ, ψ′, ψ″)` at `t ≥ 0`.
pub fn psi_all(t: f64) -> (f64, f64, f64) {
    if t <= BREAK_QUADRATIC {
        (t * t, 2.0 * t, 2.0)
    } else if t <= BREAK_INFLECTION {
        let s = t - BREAK_QUADRATIC;
        let a = C.a;
        (0.25 + s + s * s - s * s * s / (3.0 * a), 1.0 + 2.0 * s - s * s / a, 2.0 * (1.0 - s / a))
    } else if t < BREAK_FLAT {
        let s = t - BREAK_INFLECTION;
        let (q, m) = (C.q, C.m);
        if s <= q {
            (
                C.psi_inflection + C.peak_slope * s - m * s * s * s / (6.0 * q),
                C.peak_slope - m * s * s / (2.0 * q),
                -m * s / q,
            )
        } else {
            let u = s - q;
            let c = C.b - q;
            (
                C.psi_tip + C.dpsi_tip * u - m * u * u / 2.0 + m * u * u * u / (6.0 * c),
                C.dpsi_tip - m * u + m * u * u / (2.0 * c),
                -m + m * u / c,
            )
        }
    } else {
        (1.0, 0.0, 0.0)
    }
}

pub fn psi(t: f64) -> f64 {
    psi_all(t).0
}

pub fn psi_prime(t: f64) -> f64 {
    psi_all(t).1
}

pub fn psi_second(t: f64) -> f64 {
    psi_all(t).2
}

/// `ψ` with the domain enforced.
pub fn try_psi(t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeArgument(t));
    }
    Ok(psi(t))
}

/// `ψ′` with the domain enforced.
pub fn try_psi_prime(t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeArgument(t));
    }
    Ok(psi_prime(t))
}

/// `ψ′/ψ`, zero where `ψ = 1`.
pub fn log_derivative(t: f64) -> f64 {
    let (p, dp, _) = psi_all(t);
    dp / p
}

/// Samples `n` points of `(0, 3/2]` and checks the defining properties.
///
/// Second-derivative bounds are checked on central differences of the
/// implemented `ψ′`, and `ψ′` itself against central differences of `ψ`.
pub fn verify_psi(n: usize) -> Report {
    let step = BREAK_FLAT / n as f64;
    let fd = 1e-6;
    let mut quad_err = 0.0f64;
    let mut min_slope = f64::INFINITY;
    let mut convex_low = f64::INFINITY;
    let mut convex_high = f64::NEG_INFINITY;
    let mut concave_high = f64::NEG_INFINITY;
    let mut derivative_err = 0.0f64;
    let mut decrease = f64::INFINITY;
    let mut decrease_at = None;
    let mut prev_g: Option<f64> = None;
    let mut range_err = 0.0f64;
    for i in 1..=n {
        let t = i as f64 * step;
        let (p, dp, _) = psi_all(t);
        range_err = range_err.max((-p).max(p - 1.0)).max(0.0);
        if t <= BREAK_QUADRATIC {
            quad_err = quad_err.max((p - t * t).abs());
        }
        if t < BREAK_FLAT {
            min_slope = min_slope.min(dp);
        }
        if t > fd {
            let dd = (psi_prime(t + fd) - psi_prime(t - fd)) / (2.0 * fd);
            if t + fd <= BREAK_INFLECTION {
                convex_low = convex_low.min(dd);
                convex_high = convex_high.max(dd);
            } else if t - fd >= BREAK_INFLECTION {
                concave_high = concave_high.max(dd);
            }
            let d1 = (psi(t + fd) - psi(t - fd)) / (2.0 * fd);
            derivative_err = derivative_err.max((d1 - dp).abs());
        }
        if t < BREAK_FLAT {
            let g = dp / p;
            if let Some(pg) = prev_g {
                if pg - g < decrease {
                    decrease = pg - g;
                    decrease_at = Some(format!("t={t}"));
                }
            }
            prev_g = Some(g);
        }
    }
    let mut flat_err = 0.0f64;
    for i in 0..=100 {
        let t = BREAK_FLAT + i as f64 * 0.05;
        let (p, dp, _) = psi_all(t);
        flat_err = flat_err.max((p - 1.0).abs()).max(dp.abs());
    }
    // continuity of ψ and ψ′ at the breakpoints
    let mut joint = 0.0f64;
    for b in [BREAK_QUADRATIC, BREAK_INFLECTION, BREAK_INFLECTION + C.q, BREAK_FLAT] {
        let (l0, l1, _) = psi_all(b - 1e-12);
        let (r0, r1, _) = psi_all(b + 1e-12);
        joint = joint.max((l0 - r0).abs()).max((l1 - r1).abs());
    }

    let mut r = Report::new();
    r.push(Check::at_most("psi.range", range_err, 0.0, None));
    r.push(Check::at_most("psi.quadratic_start", quad_err, 1e-15, None));
    r.push(Check::above("psi.increasing", min_slope, 0.0, None));
    r.push(Check::at_most("psi.flat_tail", flat_err, 1e-12, None));
    r.push(Check::from_margin(
        "psi.convex_part",
        convex_low.min(2.0 + 1e-6 - convex_high).min(convex_low + 1e-6),
        None,
    ));
    r.push(Check::at_most("psi.concave_part", concave_high, 1e-6, None));
    r.push(Check::at_most("psi.derivative_consistency", derivative_err, 1e-8, None));
    r.push(Check::at_most("psi.c1_joints", joint, 1e-10, None));
    r.push(Check::from_margin("psi.log_derivative_decreasing", decrease + 1e-12, decrease_at));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_values() {
        assert_eq!(psi(0.0), 0.0);
        assert_eq!(psi_prime(0.0), 0.0);
        assert_abs_diff_eq!(psi(0.3), 0.09, epsilon = 1e-16);
        assert_eq!(psi(0.5), 0.25);
        assert_eq!(psi(2.0), 1.0);
        assert_eq!(psi_prime(2.0), 0.0);
        assert!(try_psi(-0.1).is_err());
        assert!(try_psi_prime(-0.1).is_err());
    }

    #[test]
    fn total_rise_is_one() {
        // Simpson's rule on ψ′ over [0, 3/2]
        let n = 30_000;
        let h = 1.5 / n as f64;
        let mut s = psi_prime(0.0) + psi_prime(1.5);
        for i in 1..n {
            s += psi_prime(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert_abs_diff_eq!(s * h / 3.0, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(psi(1.5 - 1e-13), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn peak_fraction_value() {
        assert_abs_diff_eq!(tent_peak_fraction(), 0.612, epsilon = 1e-3);
    }

    #[test]
    fn log_derivative_limits() {
        assert_abs_diff_eq!(log_derivative(1e-4), 2e4, epsilon = 1e-6);
        assert!(log_derivative(1.49) < 1e-3);
        assert!(log_derivative(1.49) > 0.0);
    }

    #[test]
    fn contract_on_dense_grid() {
        let r = verify_psi(10_000);
        assert!(r.passed(), "{r}");
    }
}
