//! Finite-difference stencils on the closed interval [0, 1].
//!
//! Interior points use central differences. Near an endpoint the stencil
//! switches to a one-sided formula of the same (second) order so that no
//! sample leaves the domain.

use crate::error::Result;

/// Default step for first derivatives.
pub const STEP_FIRST: f64 = 1e-5;
/// Default step for second derivatives and the mixed (2,2) partial.
pub const STEP_SECOND: f64 = 1e-4;

const LO: f64 = 0.0;
const HI: f64 = 1.0;

/// First-derivative approximation with step `h`.
pub fn finite_diff_1<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if x - h >= LO && x + h <= HI {
        Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
    } else if x + 2.0 * h <= HI {
        Ok((-3.0 * f(x)? + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h))
    } else {
        Ok((3.0 * f(x)? - 4.0 * f(x - h)? + f(x - 2.0 * h)?) / (2.0 * h))
    }
}

/// Second-derivative approximation with step `h`.
pub fn finite_diff_2<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h2 = h * h;
    if x - h >= LO && x + h <= HI {
        Ok((f(x + h)? - 2.0 * f(x)? + f(x - h)?) / h2)
    } else if x + 3.0 * h <= HI {
        Ok((2.0 * f(x)? - 5.0 * f(x + h)? + 4.0 * f(x + 2.0 * h)? - f(x + 3.0 * h)?) / h2)
    } else {
        Ok((2.0 * f(x)? - 5.0 * f(x - h)? + 4.0 * f(x - 2.0 * h)? - f(x - 3.0 * h)?) / h2)
    }
}
