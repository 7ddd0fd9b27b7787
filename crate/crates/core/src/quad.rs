//! Deterministic integration oracles.
//!
//! Adaptive Simpson with Richardson error control for smooth 1-D
//! integrands, plus a fixed-panel composite rule used to cross-check every
//! pinned constant by an independent second route.

use crate::error::{Error, Result};

/// Outcome of a deterministic quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    /// Heuristic Richardson estimate of the remaining error; at most the
    /// requested tolerance when the adaptive refinement succeeded.
    pub error_estimate: f64,
    pub evaluations: usize,
}

const MAX_DEPTH: u32 = 52;

struct AdaptiveCtx<'a> {
    f: &'a dyn Fn(f64) -> f64,
    evaluations: usize,
    err_acc: f64,
    depth_exhausted: bool,
}

impl<'a> AdaptiveCtx<'a> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        let y = (self.f)(x);
        if !y.is_finite() {
            return Err(Error::NonFinite(format!("integrand returned {y} at x = {x}")));
        }
        Ok(y)
    }
}

fn simpson_panel(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    ctx: &mut AdaptiveCtx,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = ctx.eval(lm)?;
    let frm = ctx.eval(rm)?;
    let left = simpson_panel(fa, flm, fm, a, m);
    let right = simpson_panel(fm, frm, fb, m, b);
    let delta = left + right - whole;
    // Factor 15 from the O(h^4) order of Simpson panels.
    if delta.abs() <= 15.0 * tol || depth == 0 {
        if depth == 0 && delta.abs() > 15.0 * tol {
            ctx.depth_exhausted = true;
        }
        ctx.err_acc += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    let l = adapt(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adapt(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. Exact (one panel, zero correction) for polynomials of degree <= 3.
pub fn adaptive_simpson(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(a <= b) {
        return Err(Error::domain(format!("bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let mut ctx = AdaptiveCtx { f: &f, evaluations: 0, err_acc: 0.0, depth_exhausted: false };
    let fa = ctx.eval(a)?;
    let fb = ctx.eval(b)?;
    let m = 0.5 * (a + b);
    let fm = ctx.eval(m)?;
    let whole = simpson_panel(fa, fm, fb, a, b);
    let value = adapt(&mut ctx, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if ctx.depth_exhausted {
        return Err(Error::ToleranceNotMet { estimate: value, error_estimate: ctx.err_acc });
    }
    Ok(QuadratureResult { value, error_estimate: ctx.err_acc, evaluations: ctx.evaluations })
}

/// Composite Simpson rule with `panels` equal panels (two subintervals
/// each). Used as the independent cross-check for pinned constants.
pub fn composite_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> Result<f64> {
    if !(a <= b) {
        return Err(Error::domain(format!("bad interval [{a}, {b}]")));
    }
    if panels == 0 {
        return Err(Error::domain("composite Simpson needs at least one panel"));
    }
    if a == b {
        return Ok(0.0);
    }
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let x = if i == n { b } else { a + i as f64 * h };
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFinite(format!("integrand returned {y} at x = {x}")));
        }
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * y;
    }
    Ok(sum * h / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_on_cubic() {
        let r = adaptive_simpson(|x| x * x * x, 0.0, 1.0, 1e-12).unwrap();
        assert_eq!(r.value, 0.25);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn mollifier_bump_value() {
        // int_{-1}^{1} exp(-1/(1-u^2)) du, dual-method cross-check
        let m = |u: f64| {
            if u > -1.0 && u < 1.0 {
                (-1.0 / (1.0 - u * u)).exp()
            } else {
                0.0
            }
        };
        let a = adaptive_simpson(m, -1.0, 1.0, 1e-12).unwrap().value;
        let b = composite_simpson(m, -1.0, 1.0, 1 << 20).unwrap();
        assert!((a - b).abs() < 1e-10, "adaptive {a} vs composite {b}");
        assert!((a - 0.4439938161680794).abs() < 1e-10);
    }

    #[test]
    fn order_zero_terminal_mean_value() {
        // int_1^2 exp(-1/(s^2-1)) ds
        let g = |s: f64| if s > 1.0 { (-1.0 / (s * s - 1.0)).exp() } else { 0.0 };
        let a = adaptive_simpson(g, 1.0, 2.0, 1e-12).unwrap().value;
        let b = composite_simpson(g, 1.0, 2.0, 1 << 20).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!((a - 0.39422276952090207).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_finite_integrand() {
        let err = adaptive_simpson(|x| 1.0 / x, -1.0, 1.0, 1e-6);
        assert!(matches!(err, Err(Error::NonFinite(_))));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(adaptive_simpson(|x| x, 1.0, 0.0, 1e-9).is_err());
        assert!(adaptive_simpson(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(composite_simpson(|x| x, 0.0, 1.0, 0).is_err());
    }

    proptest! {
        // exact for all polynomials of degree <= 3 over random intervals
        #[test]
        fn exact_on_degree_three(
            c0 in -5.0f64..5.0, c1 in -5.0f64..5.0,
            c2 in -5.0f64..5.0, c3 in -5.0f64..5.0,
            a in -3.0f64..0.0, w in 0.1f64..4.0,
        ) {
            let b = a + w;
            let f = |x: f64| c0 + c1 * x + c2 * x * x + c3 * x * x * x;
            let exact = {
                let anti = |x: f64| c0 * x + c1 * x * x / 2.0 + c2 * x * x * x / 3.0 + c3 * x * x * x * x / 4.0;
                anti(b) - anti(a)
            };
            let r = adaptive_simpson(f, a, b, 1e-12).unwrap();
            prop_assert!((r.value - exact).abs() <= 1e-12 + 1e-13 * exact.abs().max(1.0));
        }

        #[test]
        fn agrees_with_composite_on_smooth(k in 0.2f64..3.0) {
            let f = |x: f64| (k * x).sin() * (-x).exp();
            let a = adaptive_simpson(f, 0.0, 2.0, 1e-10).unwrap().value;
            let b = composite_simpson(f, 0.0, 2.0, 1 << 14).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
