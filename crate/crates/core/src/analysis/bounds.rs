//! Closed-form evaluators for the analytic lower bounds and reference
//! curves that the experiments are checked against.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `exp(-14 |ln h|^(2/3))` without a domain gate; the raw curve used as a
/// CSV/plot overlay at every mesh.
pub fn weak_error_lower_bound_formula(h: f64) -> f64 {
    (-14.0 * h.ln().abs().powf(2.0 / 3.0)).exp()
}

/// Lower bound `exp(-14 |ln h|^(2/3))` for the weak Euler error of the
/// order-zero model at `t >= 2`, valid for `h in (0, 1/22]`.
pub fn weak_error_lower_bound(h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1.0 / 22.0) {
        return Err(Error::domain(format!(
            "weak-error lower bound needs h in (0, 1/22], got {h}"
        )));
    }
    Ok(weak_error_lower_bound_formula(h))
}

/// Largest admissible oscillation scale for the cosine bounds:
/// `(pi/2) exp(-|max(sqrt(t) + x, 0)|^3)`.
pub fn cosine_defect_h_max(t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite() && x.is_finite()) {
        return Err(Error::domain(format!("need t > 0 and finite x, got t={t}, x={x}")));
    }
    let a = (t.sqrt() + x).max(0.0);
    Ok(PI / 2.0 * (-a.powi(3)).exp())
}

fn check_cosine_defect_domain(t: f64, x: f64, h: f64) -> Result<()> {
    let h_max = cosine_defect_h_max(t, x)?;
    if !(h > 0.0 && h <= h_max) {
        return Err(Error::domain(format!(
            "oscillation scale h = {h} outside (0, {h_max}] for t = {t}, x = {x}"
        )));
    }
    Ok(())
}

/// First cosine lower bound:
/// `1 - E[cos(h exp([x + W(t)]^3))] >= exp(-(8/t)[|ln(pi/2h)|^(2/3) + x^2])`.
/// Returns the right-hand side.
pub fn cosine_defect_lower_bound(t: f64, x: f64, h: f64) -> Result<f64> {
    check_cosine_defect_domain(t, x, h)?;
    let l = (PI / (2.0 * h)).ln().abs().powf(2.0 / 3.0);
    Ok((-(8.0 / t) * (l + x * x)).exp())
}

/// Second (time-integrated) cosine lower bound:
/// `(t/3) * E[1_{W(t) in A} exp(-72 W(t)^2 / t)] * exp(-(72/t)[|ln(pi/2h)|^(2/3) + x^2])`.
/// The indicator expectation is supplied by the caller (`tail_factor`),
/// either from an oracle or in closed form for `A = R`.
pub fn integrated_cosine_defect_lower_bound(t: f64, x: f64, h: f64, tail_factor: f64) -> Result<f64> {
    check_cosine_defect_domain(t, x, h)?;
    if !(0.0..=1.0).contains(&tail_factor) {
        return Err(Error::domain(format!("tail factor {tail_factor} outside [0, 1]")));
    }
    let l = (PI / (2.0 * h)).ln().abs().powf(2.0 / 3.0);
    Ok(t / 3.0 * tail_factor * (-(72.0 / t) * (l + x * x)).exp())
}

/// `E[exp(-72 W(t)^2 / t)] = (1 + 144)^(-1/2)`, the `A = R` tail factor
/// (Gaussian identity `E[exp(-a Z^2)] = (1 + 2a)^(-1/2)` with `a = 72`;
/// `W(t)^2/t` is chi-square with one degree of freedom for every `t`).
pub fn tail_factor_full_line() -> f64 {
    1.0 / 145f64.sqrt()
}

/// The reference curve with convergence order zero plotted alongside the
/// measured weak errors:
/// `1/(15 (ln N)^(1/3)) * exp(-(1/2T) (ln N - (1/2T)(ln N)^(2/3))^(2/3))`.
pub fn order0_reference(n: u64, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("order-0 reference needs N >= 2, got {n}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("need positive horizon, got {t}")));
    }
    let ln_n = (n as f64).ln();
    let inner = ln_n - ln_n.powf(2.0 / 3.0) / (2.0 * t);
    Ok((-(inner.powf(2.0 / 3.0)) / (2.0 * t)).exp() / (15.0 * ln_n.powf(1.0 / 3.0)))
}
