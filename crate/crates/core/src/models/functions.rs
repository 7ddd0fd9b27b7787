//! Special functions shared by the model zoo: the compactly supported
//! mollifier bump, smooth plateau test functions, and the pinned integral
//! constants they generate.
//!
//! Every pinned constant is computed by adaptive Simpson at tolerance
//! 1e-12 and cross-checked against composite Simpson with 2^20 panels; a
//! disagreement beyond 1e-10 aborts, since every downstream bound check
//! depends on these values.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, composite_simpson};

/// The mollifier bump `x -> 1_(-1,1)(x) * exp(-1/(1-x^2))`, extended
/// continuously by 0 at the boundary.
#[inline]
pub fn mollifier(x: f64) -> f64 {
    if x > -1.0 && x < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// `exp(y^3)` with the exponent saturated below the overflow edge. The
/// oscillatory drifts only ever use this inside a cosine; past the
/// saturation point the phase is not computable in f64 anyway, and the
/// saturated value keeps the cosine finite and bounded. The Gaussian mass
/// beyond `y^3 > 700` is below 1e-15 per sample in every experiment here.
#[inline]
pub fn exp_cubed(y: f64) -> f64 {
    (y * y * y).min(700.0).exp()
}

/// Dual-method pinned integral with hard consistency failure.
fn pinned_integral(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, what: &str) -> f64 {
    let adaptive = adaptive_simpson(f, a, b, 1e-12)
        .unwrap_or_else(|e| panic!("pinned constant {what}: adaptive quadrature failed: {e}"));
    let composite = composite_simpson(f, a, b, 1 << 20)
        .unwrap_or_else(|e| panic!("pinned constant {what}: composite quadrature failed: {e}"));
    let diff = (adaptive.value - composite).abs();
    assert!(
        diff <= 1e-10,
        "pinned constant {what}: dual-method disagreement {diff:e} exceeds 1e-10"
    );
    adaptive.value
}

/// `int_0^1 exp(-1/(1-u^2)) du`, the constant subtracted inside the
/// order-zero drift. Computed once, dual-method checked.
pub fn mollifier_half_integral() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| pinned_integral(mollifier, 0.0, 1.0, "mollifier half integral"))
}

/// `int_{-1}^{1} exp(-1/(1-u^2)) du`, the full bump mass (= twice the half
/// integral by symmetry; kept as an independently computed fixture).
pub fn mollifier_full_integral() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| pinned_integral(mollifier, -1.0, 1.0, "mollifier full integral"))
}

/// Left-endpoint step-function integral of the mollifier:
/// `h * sum_{k : kh < 1} mollifier(kh)`, i.e. the exact value of
/// `int_0^inf 1_[0,1)(floor_h(u)) exp(-1/(1 - floor_h(u)^2)) du`.
pub fn mollifier_stair_integral(h: f64) -> f64 {
    assert!(h > 0.0 && h.is_finite(), "step width must be positive");
    let mut sum = 0.0;
    let mut k = 0u64;
    while (k as f64) * h < 1.0 {
        sum += mollifier(k as f64 * h);
        k += 1;
    }
    sum * h
}

/// `int_1^t exp(-1/(s^2-1)) ds` for `t >= 1` (0 for `t <= 1`): the
/// deterministic first component of the order-zero model's exact solution.
/// Memoized per `t`.
pub fn upper_tail_integral(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::domain(format!("bad time {t}")));
    }
    if t <= 1.0 {
        return Ok(0.0);
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&t.to_bits()) {
        return Ok(v);
    }
    let f = |s: f64| if s > 1.0 { (-1.0 / (s * s - 1.0)).exp() } else { 0.0 };
    let v = adaptive_simpson(f, 1.0, t, 1e-12)?.value;
    cache.lock().unwrap().insert(t.to_bits(), v);
    Ok(v)
}

/// `int_0^t mollifier(s) ds` for `t in [0, 1]`, memoized; equals the half
/// integral for `t >= 1`.
pub fn mollifier_partial_integral(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("bad time {t}")));
    }
    if t >= 1.0 {
        return Ok(mollifier_half_integral());
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&t.to_bits()) {
        return Ok(v);
    }
    let v = adaptive_simpson(mollifier, 0.0, t, 1e-12)?.value;
    cache.lock().unwrap().insert(t.to_bits(), v);
    Ok(v)
}

/// Smooth plateau: 1 on `[-c, c]`, 0 outside `[-c-1, c+1]`, C-infinity in
/// between (standard exp(-1/t) partition-of-unity glue).
pub fn smooth_plateau(c: f64, x: f64) -> f64 {
    let a = x.abs();
    if a <= c {
        1.0
    } else if a >= c + 1.0 {
        0.0
    } else {
        smoothstep(c + 1.0 - a)
    }
}

fn bump_side(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `s(0) = 0`, `s(1) = 1`, smooth and monotone on `[0, 1]`.
fn smoothstep(t: f64) -> f64 {
    let e = bump_side(t);
    e / (e + bump_side(1.0 - t))
}

/// The compactly supported test function `phi(x) = x_1 * prod_i psi(x_i)`
/// where `psi` is the smooth plateau at width `c`: equal to `x_1` on the
/// cube `||x||_inf <= c`, zero once any coordinate leaves `[-c-1, c+1]`.
pub fn bump_test_function(c: f64) -> Result<impl Fn(&[f64]) -> f64 + Send + Sync + Copy> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("plateau width must be positive, got {c}")));
    }
    Ok(move |x: &[f64]| {
        let mut v = x[0];
        for &xi in x {
            if v == 0.0 {
                break;
            }
            v *= smooth_plateau(c, xi);
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mollifier_values() {
        assert!((mollifier(0.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(mollifier(1.0), 0.0);
        assert_eq!(mollifier(-1.0), 0.0);
        assert_eq!(mollifier(2.0), 0.0);
        assert_eq!(mollifier(-7.5), 0.0);
    }

    #[test]
    fn pinned_constants_match_frozen_oracle_values() {
        // frozen from 40-digit quadrature
        assert!((mollifier_half_integral() - 0.2219969080840397).abs() < 1e-12);
        assert!((mollifier_full_integral() - 0.4439938161680794).abs() < 1e-12);
        assert!((upper_tail_integral(2.0).unwrap() - 0.39422276952090207).abs() < 1e-12);
        assert_eq!(upper_tail_integral(1.0).unwrap(), 0.0);
        assert_eq!(upper_tail_integral(0.5).unwrap(), 0.0);
    }

    #[test]
    fn stair_integral_single_cell_for_large_h() {
        // h >= 1: only the k = 0 cell is inside [0, 1)
        assert!((mollifier_stair_integral(1.5) - 1.5 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn partial_integral_endpoints() {
        assert_eq!(mollifier_partial_integral(0.0).unwrap(), 0.0);
        assert_eq!(
            mollifier_partial_integral(1.0).unwrap(),
            mollifier_half_integral()
        );
        let half = mollifier_partial_integral(0.5).unwrap();
        assert!(half > 0.0 && half < mollifier_half_integral());
    }

    #[test]
    fn bump_plateau_and_support() {
        let phi = bump_test_function(2.0).unwrap();
        assert_eq!(phi(&[1.5, -2.0, 0.3]), 1.5);
        assert_eq!(phi(&[-0.7, 1.9]), -0.7);
        assert_eq!(phi(&[3.2, 0.0, 0.0]), 0.0);
        assert_eq!(phi(&[0.5, 0.0, -3.1]), 0.0);
        assert!(bump_test_function(0.0).is_err());
    }

    proptest! {
        #[test]
        fn plateau_is_monotone_cutoff(x in -5.0f64..5.0, c in 0.2f64..3.0) {
            let v = smooth_plateau(c, x);
            prop_assert!((0.0..=1.0).contains(&v));
            // psi_1(x) = x * plateau keeps the sign of x
            prop_assert!(x * (x * v) >= 0.0);
        }
    }
}
