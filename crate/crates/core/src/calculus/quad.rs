//! Adaptive Simpson quadrature.

use crate::error::{check_unit, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;
const MAX_EVALS: usize = 4_000_000;

/// Integrates `f` over `[a, b]` ⊆ [0, 1] to absolute tolerance `tol`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_unit("a", a)?;
    check_unit("b", b)?;
    if a > b {
        return Err(Error::precondition(format!("integration bounds reversed: {a} > {b}")));
    }
    simpson(f, a, b, tol)
}

/// Same as [`integrate_1d`] without the unit-interval restriction.
pub fn simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::precondition(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut state = State { f: &f, evals: 3, a, b };
    state.step(a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

struct State<'a, F> {
    f: &'a F,
    evals: usize,
    a: f64,
    b: f64,
}

impl<F> State<'_, F>
where
    F: Fn(f64) -> Result<f64>,
{
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm)?;
        let frm = (self.f)(rm)?;
        self.evals += 2;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // Below this the difference is rounding noise, not truncation error.
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if delta.abs() <= 15.0 * tol.max(floor) {
            if !(left + right).is_finite() {
                return Err(Error::NonFinite {
                    context: format!("quadrature on [{a}, {b}]"),
                    value: left + right,
                });
            }
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 || self.evals > MAX_EVALS || !delta.is_finite() {
            return Err(Error::QuadratureDiverged {
                a: self.a,
                b: self.b,
                depth: MAX_DEPTH,
            });
        }
        let l = self.step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = self.step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn constant() {
        let v = integrate_1d(|_| Ok(1.0), 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn first_closed_form() {
        // ∫₀¹ t sin(πt/2) dt = 4/π²
        let v = integrate_1d(|t| Ok(t * (PI * t / 2.0).sin()), 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((v - 4.0 / (PI * PI)).abs() < 1e-10);
        assert!((v - 0.405285).abs() < 1e-6);
    }

    #[test]
    fn second_closed_form() {
        // ∫₀¹ t⁴ eᵗ dt = 9e − 24
        let v = integrate_1d(|t| Ok(t.powi(4) * t.exp()), 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((v - (9.0 * E - 24.0)).abs() < 1e-10);
        assert!((v - 0.46453).abs() < 1e-5);
    }

    #[test]
    fn singular_integrand_fails_to_converge() {
        let r = integrate_1d(|t| Ok(if t == 0.0 { 0.0 } else { 1.0 / t }), 0.0, 1.0, DEFAULT_TOL);
        assert!(matches!(r, Err(Error::QuadratureDiverged { .. })));
    }

    #[test]
    fn bounds_are_validated() {
        assert!(integrate_1d(|_| Ok(1.0), 0.5, 0.2, 1e-8).is_err());
        assert!(integrate_1d(|_| Ok(1.0), 0.0, 1.5, 1e-8).is_err());
        assert!(integrate_1d(|_| Ok(1.0), 0.0, 1.0, 0.0).is_err());
        assert_eq!(integrate_1d(|_| Ok(1.0), 0.3, 0.3, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn evaluation_errors_propagate() {
        let r = integrate_1d(
            |t| if t > 0.5 { Err(Error::precondition("boom")) } else { Ok(t) },
            0.0,
            1.0,
            1e-8,
        );
        assert_eq!(r, Err(Error::precondition("boom")));
    }
}
