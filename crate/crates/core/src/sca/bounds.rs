//! First-order Taylor surrogates used to convexify the rate, capacity and
//! speed constraints.
//!
//! The slack rates `log2(1 + ĝ/λ)` are convex in λ, so their tangents are
//! global under-estimators. `‖v‖²` is convex, so its tangent is one too.
//! `log2(1 + κp)` is concave in p, so its tangent over-estimates.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::NonPositiveSlack { name, value: v })
    }
}

/// Value and slope (per unit slack) of the rate tangent at `lambda_j`.
pub fn rate_tangent(hat_gamma: f64, lambda_j: f64) -> Result<(f64, f64)> {
    let lj = positive("lambda_j", lambda_j)?;
    let value = (hat_gamma / lj).ln_1p() / LN_2;
    let slope = -hat_gamma / (lj * (lj + hat_gamma) * LN_2);
    Ok((value, slope))
}

/// Affine under-estimator of `log2(1 + ĝ/λ)` expanded at `lambda_j`.
pub fn rate_lower_bound(hat_gamma: f64, lambda: f64, lambda_j: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    let (value, slope) = rate_tangent(hat_gamma, lambda_j)?;
    Ok(value + slope * (lambda - lambda_j))
}

/// Backhaul counterpart of [`rate_lower_bound`] in the slack μ.
pub fn capacity_lower_bound(hat_gamma: f64, mu: f64, mu_j: f64) -> Result<f64> {
    positive("mu", mu)?;
    positive("mu_j", mu_j)?;
    rate_lower_bound(hat_gamma, mu, mu_j)
}

/// Affine under-estimator of `‖v‖²` expanded at `v_j`.
pub fn velocity_lower_bound(v: [f64; 2], v_j: [f64; 2]) -> f64 {
    let nj = v_j[0] * v_j[0] + v_j[1] * v_j[1];
    nj + 2.0 * (v_j[0] * (v[0] - v_j[0]) + v_j[1] * (v[1] - v_j[1]))
}

/// Affine over-estimator of `log2(1 + κp)` expanded at `p_j`.
pub fn power_upper_bounds(p: f64, p_j: f64, kappa: f64) -> f64 {
    let x_j = p_j * kappa;
    x_j.ln_1p() / LN_2 + kappa * (p - p_j) / ((1.0 + x_j) * LN_2)
}
