//! Scaled residuals `n (Op f − f)` at a point, compared with the
//! Voronovskaja-type limit of the AKR operator and, in two variables, with a
//! conjectured limit for the tensor-product operator.

use serde::Serialize;

use crate::calculus::{Axis, BivariateFunction, ScalarFunction};
use crate::error::{check_unit, Error, Result};
use crate::operators::{eval_akr, eval_akr_2d, OperatorSpec};

pub const DEFAULT_DEGREES: [usize; 7] = [25, 50, 100, 200, 400, 800, 1600];

/// Points excluded from the bivariate probe, where the conjectured limit degenerates.
pub const EXCLUDED_CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitProbe {
    pub operator: String,
    /// `[x]` or `[x, y]`.
    pub point: Vec<f64>,
    pub degrees: Vec<usize>,
    /// `n (Op_n f − f)` at the point, one per degree.
    pub residuals: Vec<f64>,
    pub predicted: f64,
    /// First-order Richardson extrapolation from the last two residuals.
    pub extrapolated: f64,
    pub abs_deviation: f64,
    /// `None` when the predicted limit is zero.
    pub rel_deviation: Option<f64>,
    /// True when `predicted` is a conjectured rather than a proven limit.
    pub conjectural: bool,
}

impl LimitProbe {
    /// Relative deviation within `rel`, or absolute deviation within `abs` when the limit is zero.
    pub fn agrees(&self, rel: f64, abs: f64) -> bool {
        match self.rel_deviation {
            Some(r) => r <= rel,
            None => self.abs_deviation <= abs,
        }
    }
}

/// `(n₂ r₂ − n₁ r₁)/(n₂ − n₁)`, exact for `r(n) = L + c/n`.
pub fn richardson(n1: usize, r1: f64, n2: usize, r2: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    (b * r2 - a * r1) / (b - a)
}

fn check_degrees(degrees: &[usize], j: u32) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::precondition("degree list is empty"));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition(format!("degrees must be strictly increasing, got {degrees:?}")));
    }
    if degrees[0] < j as usize {
        return Err(Error::precondition(format!(
            "n must be ≥ j (n = {}, j = {j})",
            degrees[0]
        )));
    }
    Ok(())
}

fn assemble(
    operator: String,
    point: Vec<f64>,
    degrees: &[usize],
    residuals: Vec<f64>,
    predicted: f64,
    conjectural: bool,
) -> LimitProbe {
    let k = residuals.len();
    let extrapolated = if k >= 2 {
        richardson(degrees[k - 2], residuals[k - 2], degrees[k - 1], residuals[k - 1])
    } else {
        residuals[0]
    };
    let abs_deviation = (extrapolated - predicted).abs();
    LimitProbe {
        operator,
        point,
        degrees: degrees.to_vec(),
        residuals,
        predicted,
        extrapolated,
        abs_deviation,
        rel_deviation: (predicted != 0.0).then(|| abs_deviation / predicted.abs()),
        conjectural,
    }
}

/// `(1−x)/2 · [x f″(x) − (j−1) f′(x)]` for `x ∈ (0, 1]`.
pub fn vor_rhs_1d(f: &ScalarFunction, j: u32, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    if x == 0.0 {
        return Err(Error::precondition("the limit formula holds for x in (0, 1]; x = 0 is excluded"));
    }
    if j < 2 {
        return Err(Error::precondition(format!("j must be ≥ 2, got {j}")));
    }
    let (d1, d2) = f.derivatives(x)?;
    Ok((1.0 - x) / 2.0 * (x * d2 - (j - 1) as f64 * d1))
}

pub fn vor_probe_1d(f: &ScalarFunction, j: u32, x: f64, degrees: &[usize]) -> Result<LimitProbe> {
    let predicted = vor_rhs_1d(f, j, x)?;
    check_degrees(degrees, j)?;
    let fx = f.value(x)?;
    let residuals = degrees
        .iter()
        .map(|&n| Ok(n as f64 * (eval_akr(f, n, j, x)? - fx)))
        .collect::<Result<Vec<_>>>()?;
    let label = format!("B_n_{j}");
    Ok(assemble(label, vec![x], degrees, residuals, predicted, false))
}

/// `U f + V f` with `U f = x(1−x)/2 f_xx − (j−1)/2 (1−x) f_x` and `V` the same in `y`.
pub fn conjecture_rhs_2d(f: &BivariateFunction, j: u32, x: f64, y: f64) -> Result<f64> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    if EXCLUDED_CORNERS.contains(&(x, y)) {
        return Err(Error::precondition(format!("({x}, {y}) is a corner excluded from the conjectured limit")));
    }
    if j < 2 {
        return Err(Error::precondition(format!("j must be ≥ 2, got {j}")));
    }
    let jm1 = (j - 1) as f64;
    let (fx, fxx) = f.along(Axis::X, x, y)?;
    let (fy, fyy) = f.along(Axis::Y, x, y)?;
    let u = x * (1.0 - x) / 2.0 * fxx - jm1 / 2.0 * (1.0 - x) * fx;
    let v = y * (1.0 - y) / 2.0 * fyy - jm1 / 2.0 * (1.0 - y) * fy;
    Ok(u + v)
}

/// Probes `n (B_{n,n,j} f − f)` at `(x, y)`; always marked conjectural.
pub fn conjecture_probe_2d(f: &BivariateFunction, j: u32, x: f64, y: f64, degrees: &[usize]) -> Result<LimitProbe> {
    let predicted = conjecture_rhs_2d(f, j, x, y)?;
    check_degrees(degrees, j)?;
    OperatorSpec::akr_2d(degrees[0], degrees[0], j).validate()?;
    let fxy = f.value(x, y)?;
    let residuals = degrees
        .iter()
        .map(|&n| Ok(n as f64 * (eval_akr_2d(f, n, n, j, x, y)? - fxy)))
        .collect::<Result<Vec<_>>>()?;
    let label = format!("B_n_n_{j}");
    Ok(assemble(label, vec![x, y], degrees, residuals, predicted, true))
}
