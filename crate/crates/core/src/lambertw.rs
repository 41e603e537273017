//! Principal branch W0 of the Lambert W function on [-1/e, ∞).
//!
//! Halley iteration on f(w) = w·e^w - x, started from a branch-point series
//! near -1/e, a log asymptote above e and Winitzki's approximation in
//! between. Convergence is judged on the defining-identity residual.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// -1/e, the branch point.
pub const BRANCH_POINT: f64 = -1.0 / E;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 100;

/// Arguments this close to -1/e map to exactly -1.
const BRANCH_SNAP: f64 = 1e-14;

/// Evaluates W0(x) with `|w·e^w - x| <= tol·max(1, |x|)`.
pub fn lambert_w0(x: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            constraint: "in (0, 1e-6]",
        });
    }
    if x.is_nan() || x < BRANCH_POINT {
        return Err(Error::LambertDomain(x));
    }
    if x - BRANCH_POINT <= BRANCH_SNAP {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x - BRANCH_POINT < SERIES_REGION {
        return Ok(branch_series(x));
    }

    let scale = x.abs().max(1.0);
    let mut w = initial_guess(x);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - x;
        residual = f.abs();
        let step = halley_step(w, ew, f);
        if residual <= tol * scale {
            // One more step once converged; cubic convergence leaves w at
            // full precision, which keeps W monotone on dense grids.
            let polished = w - step;
            if polished.is_finite() && polished > -1.0 {
                let r = (polished * polished.exp() - x).abs();
                if r <= residual {
                    return Ok(polished);
                }
            }
            return Ok(w.max(-1.0));
        }
        if !step.is_finite() {
            break;
        }
        let next = w - step;
        // Halley can overshoot below the branch point when x is close to it.
        let next = if next <= -1.0 { 0.5 * (w - 1.0) } else { next };
        if next == w {
            break;
        }
        w = next;
    }
    Err(Error::LambertNoConvergence {
        x,
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// [`lambert_w0`] at the default tolerance.
pub fn w0(x: f64) -> Result<f64> {
    lambert_w0(x, DEFAULT_TOL)
}

fn halley_step(w: f64, ew: f64, f: f64) -> f64 {
    let wp1 = w + 1.0;
    f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
}

/// Below this distance from -1/e the branch-point series is used directly.
const SERIES_REGION: f64 = 1e-7;

/// W0 near -1/e from its expansion in p = sqrt(2(ex + 1)); truncation error
/// is O(p^7), below 1e-21 inside [`SERIES_REGION`].
fn branch_series(x: f64) -> f64 {
    let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
    const C: [f64; 6] = [
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
        -221.0 / 8505.0,
    ];
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * p + c;
    }
    -1.0 + p * acc
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series in p = sqrt(2(ex + 1)) around the branch point.
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x > E {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else {
        let l = x.ln_1p();
        l * (1.0 - (l.ln_1p()) / (2.0 + l))
    }
}

/// Evaluates W0(a/e - 1/e) for `a >= 0` given `ln_a = ln(a)`.
///
/// Every closed-form maximizer takes this shape. When `a/e` would overflow
/// the -1/e shift is below double resolution and W is solved directly from
/// `w + ln w = ln_a - 1`.
pub fn lambert_w0_shifted_ln(ln_a: f64) -> Result<f64> {
    if ln_a.is_nan() {
        return Err(Error::LambertDomain(f64::NAN));
    }
    let ln_x = ln_a - 1.0;
    if ln_x < 700.0 {
        let x = ln_x.exp() - 1.0 / E;
        return w0(x.max(BRANCH_POINT));
    }
    w0_of_exp(ln_x)
}

/// W0(e^L) for large L via Newton on g(w) = w + ln w - L.
fn w0_of_exp(ln_x: f64) -> Result<f64> {
    if ln_x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = ln_x - ln_x.ln();
    for _ in 0..MAX_ITERATIONS {
        let g = w + w.ln() - ln_x;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            return Ok(w);
        }
    }
    Err(Error::LambertNoConvergence {
        x: f64::INFINITY,
        iterations: MAX_ITERATIONS,
        residual: f64::NAN,
    })
}
