//! Multi-branch complex Lambert W function.
//!
//! `lambert_w(k, h)` returns a solution of `w * exp(w) = h` on branch `k`.
//! Iteration is Halley's method seeded from the standard asymptotic form
//! `log(h) + 2*pi*i*k - log(log(h) + 2*pi*i*k)`; near the branch point at
//! `-1/e` the square-root series in `p = sqrt(2 (e h + 1))` seeds instead,
//! where the log seed stalls.

use crate::error::NumericsError;
use num_complex::Complex64;
use std::f64::consts::{E, PI};

const MAX_ITERATIONS: usize = 50;

/// Residual bound the returned value is guaranteed to satisfy:
/// `|w e^w - h| <= RESIDUAL_TOL * (1 + |h|)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Lambert W on branch `k`.
pub fn lambert_w(branch: i32, h: Complex64) -> Result<Complex64, NumericsError> {
    if !h.re.is_finite() || !h.im.is_finite() {
        return Err(NumericsError::LambertNonFinite);
    }
    if h.norm() == 0.0 {
        return if branch == 0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(NumericsError::LambertSingular { branch })
        };
    }
    // Exactly at the branch point both adjoining branches take the value -1.
    if h.im == 0.0 && h.re == -1.0 / E && (branch == 0 || branch == -1) {
        return Ok(Complex64::new(-1.0, 0.0));
    }

    let mut w = initial_guess(branch, h);
    let tol = 1e-13 * (1.0 + h.norm());
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(NumericsError::LambertNonConvergence { branch });
        }
        let ew = w.exp();
        let f = w * ew - h;
        if f.norm() <= tol {
            converged = true;
            break;
        }
        // Halley step: dw = f / (e^w (w+1) - (w+2) f / (2 (w+1))).
        let w1 = w + 1.0;
        let denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
        if denom.norm() == 0.0 {
            w += Complex64::new(0.5, 0.5);
            continue;
        }
        let mut dw = f / denom;
        let cap = 1.0 + 0.5 * w.norm();
        if dw.norm() > cap {
            dw *= cap / dw.norm();
        }
        w -= dw;
    }
    if !converged {
        let f = w * w.exp() - h;
        if f.norm() > RESIDUAL_TOL * (1.0 + h.norm()) {
            return Err(NumericsError::LambertNonConvergence { branch });
        }
    }
    Ok(w)
}

fn initial_guess(branch: i32, h: Complex64) -> Complex64 {
    let near_branch_point = (h + 1.0 / E).norm() < 0.25;
    if near_branch_point && (branch == 0 || branch == -1) {
        // Series in p = sqrt(2 (e h + 1)) around w = -1.
        let p = (2.0 * (E * h + 1.0)).sqrt();
        let p = if branch == 0 { p } else { -p };
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    if branch == 0 {
        if h.norm() < 0.3 {
            // Power series W(h) = h - h^2 + 3/2 h^3 - ...
            return h * (1.0 + h * (-1.0 + h * 1.5));
        }
        if h.norm() < 4.0 {
            return (h + 1.0).ln();
        }
    }
    let l = h.ln() + Complex64::new(0.0, 2.0 * PI * branch as f64);
    if l.norm() == 0.0 {
        return Complex64::new(-1e-6, 0.0);
    }
    l - l.ln()
}

/// Principal-branch value for real arguments `x >= -1/e` (real result).
pub fn lambert_w0_real(x: f64) -> Result<f64, NumericsError> {
    let w = lambert_w(0, Complex64::new(x, 0.0))?;
    Ok(w.re)
}
