//! Closed-form error bounds for the Bernstein and AKR operators, and a
//! verifier that compares them with measured errors on a grid.
//!
//! Derivative sup-norms are grid maxima, so every bound computed from them
//! is as good as the grid; reports carry the grid used.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calculus::{BivariateFunction, GridSpec, ScalarFunction};
use crate::error::{Error, Result};
use crate::operators::{apply_1d, apply_2d, OperatorKind, OperatorSpec};

pub const NORM_POINTS_1D: usize = 1001;
pub const NORM_POINTS_2D: usize = 201;

/// Sup-norm estimates of the derivatives of a univariate function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms1d {
    pub d1: f64,
    pub d2: f64,
    pub grid: GridSpec,
}

/// Sup-norm estimates of the partial derivatives of a bivariate function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms2d {
    pub d10: f64,
    pub d01: f64,
    pub d20: f64,
    pub d02: f64,
    pub d22: f64,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DerivativeNorms {
    Univariate(Norms1d),
    Bivariate(Norms2d),
}

pub fn estimate_norms_1d(f: &ScalarFunction, grid: &GridSpec) -> Result<Norms1d> {
    if !f.has_derivatives() {
        return Err(Error::MissingChannel("derivative"));
    }
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    for x in grid.coords() {
        let (a, b) = f.derivatives(x)?;
        d1 = d1.max(a.abs());
        d2 = d2.max(b.abs());
    }
    Ok(Norms1d { d1, d2, grid: grid.with_dims(1)? })
}

pub fn estimate_norms_2d(f: &BivariateFunction, grid: &GridSpec) -> Result<Norms2d> {
    if !f.has_derivatives() {
        return Err(Error::MissingChannel("partial-derivative"));
    }
    let cs = grid.coords();
    let mut n = [0.0f64; 5];
    for &x in &cs {
        for &y in &cs {
            let (d10, d20) = f.along(crate::calculus::Axis::X, x, y)?;
            let (d01, d02) = f.along(crate::calculus::Axis::Y, x, y)?;
            let d22 = f.d22(x, y)?;
            for (slot, v) in n.iter_mut().zip([d10, d01, d20, d02, d22]) {
                *slot = slot.max(v.abs());
            }
        }
    }
    Ok(Norms2d {
        d10: n[0],
        d01: n[1],
        d20: n[2],
        d02: n[3],
        d22: n[4],
        grid: grid.with_dims(2)?,
    })
}

/// Norms on the default grid for the function's dimension.
pub fn estimate_derivative_norms(f: &crate::calculus::AnyFunction) -> Result<DerivativeNorms> {
    use crate::calculus::AnyFunction;
    Ok(match f {
        AnyFunction::Univariate(g) => {
            DerivativeNorms::Univariate(estimate_norms_1d(g, &GridSpec::line(NORM_POINTS_1D)?)?)
        }
        AnyFunction::Bivariate(g) => {
            DerivativeNorms::Bivariate(estimate_norms_2d(g, &GridSpec::square(NORM_POINTS_2D)?)?)
        }
    })
}

fn xx(x: f64) -> f64 {
    x * (1.0 - x)
}

/// `½‖f″‖ x(1−x)/n`.
pub fn bound_bernstein_1d(x: f64, n: usize, d2: f64) -> f64 {
    0.5 * d2 * xx(x) / n as f64
}

/// `3/2 [x(1−x)/n ‖f^(2,0)‖ + y(1−y)/m ‖f^(0,2)‖]`.
pub fn bound_bivariate_old(x: f64, y: f64, n: usize, m: usize, norms: &Norms2d) -> f64 {
    1.5 * (xx(x) / n as f64 * norms.d20 + xx(y) / m as f64 * norms.d02)
}

/// The new bound plus `x(1−x)y(1−y)/(4nm) ‖f^(2,2)‖`.
pub fn bound_bivariate_mixed(x: f64, y: f64, n: usize, m: usize, norms: &Norms2d) -> f64 {
    bound_bivariate_new(x, y, n, m, norms) + xx(x) * xx(y) / (4.0 * n as f64 * m as f64) * norms.d22
}

/// `½ [x(1−x)/n ‖f^(2,0)‖ + y(1−y)/m ‖f^(0,2)‖]`.
pub fn bound_bivariate_new(x: f64, y: f64, n: usize, m: usize, norms: &Norms2d) -> f64 {
    0.5 * (xx(x) / n as f64 * norms.d20 + xx(y) / m as f64 * norms.d02)
}

/// Bounds on `|B_n f − B_{n,j} f|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AkrDiffBound {
    /// `ω₁(f, (j−1)/n)`, when a modulus was supplied.
    pub modulus: Option<f64>,
    /// `(j−1)/n ‖f′‖`.
    pub derivative: f64,
}

/// `modulus` is `ω₁(f, (j−1)/n)` if known.
pub fn bound_akr_diff(n: usize, j: u32, d1: f64, modulus: Option<f64>) -> Result<AkrDiffBound> {
    OperatorSpec::akr(n, j).validate()?;
    Ok(AkrDiffBound {
        modulus,
        derivative: (j - 1) as f64 / n as f64 * d1,
    })
}

/// `x(1−x)/(2n) ‖f″‖ + (j−1)/n ‖f′‖`.
pub fn bound_akr_1d(x: f64, n: usize, j: u32, norms: &Norms1d) -> f64 {
    xx(x) / (2.0 * n as f64) * norms.d2 + (j - 1) as f64 / n as f64 * norms.d1
}

/// `x(1−x)/(2n) ‖f^(2,0)‖ + y(1−y)/(2m) ‖f^(0,2)‖ + (j−1)/n ‖f^(1,0)‖ + (j−1)/m ‖f^(0,1)‖`.
pub fn bound_akr_2d(x: f64, y: f64, n: usize, m: usize, j: u32, norms: &Norms2d) -> f64 {
    let (nf, mf, jm1) = (n as f64, m as f64, (j - 1) as f64);
    xx(x) / (2.0 * nf) * norms.d20 + xx(y) / (2.0 * mf) * norms.d02 + jm1 / nf * norms.d10 + jm1 / mf * norms.d01
}

/// `max |f(u) − f(v)|` over grid pairs with `|u − v| ≤ δ`.
pub fn compute_modulus(f: &ScalarFunction, delta: f64, grid: &GridSpec) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::precondition(format!("modulus step must lie in (0, 1], got {delta}")));
    }
    let xs = grid.coords();
    let vs: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect::<Result<_>>()?;
    // Absorbs the rounding in i/(N-1) so that δ equal to a multiple of the step keeps that pair.
    let reach = delta * (1.0 + 4.0 * f64::EPSILON);
    let mut best = 0.0f64;
    for i in 0..xs.len() {
        for k in i + 1..xs.len() {
            if xs[k] - xs[i] > reach {
                break;
            }
            best = best.max((vs[k] - vs[i]).abs());
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Univariate Bernstein, `½‖f″‖x(1−x)/n`.
    Bernstein,
    /// Bivariate Bernstein with constant 3/2.
    BivariateOld,
    /// Bivariate Bernstein with the mixed fourth-order term.
    BivariateMixed,
    /// Bivariate Bernstein with constant 1/2.
    BivariateNew,
    /// `|B_n f − B_{n,j} f| ≤ (j−1)/n ‖f′‖`.
    AkrDiff,
    /// `|B_n f − B_{n,j} f| ≤ ω₁(f, (j−1)/n)`.
    AkrDiffModulus,
    /// Univariate AKR error bound.
    Akr,
    /// Bivariate AKR error bound.
    Akr2d,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::Bernstein,
        BoundKind::BivariateOld,
        BoundKind::BivariateMixed,
        BoundKind::BivariateNew,
        BoundKind::AkrDiff,
        BoundKind::AkrDiffModulus,
        BoundKind::Akr,
        BoundKind::Akr2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Bernstein => "bernstein",
            BoundKind::BivariateOld => "bivariate-old",
            BoundKind::BivariateMixed => "bivariate-mixed",
            BoundKind::BivariateNew => "bivariate-new",
            BoundKind::AkrDiff => "akr-diff",
            BoundKind::AkrDiffModulus => "akr-diff-modulus",
            BoundKind::Akr => "akr",
            BoundKind::Akr2d => "akr-2d",
        }
    }

    pub fn dims(self) -> u8 {
        match self {
            BoundKind::Bernstein | BoundKind::AkrDiff | BoundKind::AkrDiffModulus | BoundKind::Akr => 1,
            _ => 2,
        }
    }

    /// Operator kind whose error this bound controls.
    pub fn operator(self) -> OperatorKind {
        match self {
            BoundKind::Bernstein | BoundKind::BivariateOld | BoundKind::BivariateMixed | BoundKind::BivariateNew => {
                OperatorKind::Bernstein
            }
            _ => OperatorKind::Akr,
        }
    }

    /// The bounds applicable to an operator of the given kind and dimension.
    pub fn applicable(kind: OperatorKind, dims: u8) -> Vec<BoundKind> {
        Self::ALL
            .into_iter()
            .filter(|b| b.dims() == dims && b.operator() == kind)
            .collect()
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownIdentifier {
                name: s.to_string(),
                position: 0,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub operator: String,
    pub grid: GridSpec,
    pub norms: DerivativeNorms,
    /// Grid points, `[x]` or `[x, y]`, in the order of `bound` and `error`.
    pub points: Vec<Vec<f64>>,
    pub bound: Vec<f64>,
    /// Measured `|f − Op f|`, or `|B f − B_j f|` for the difference bounds.
    pub error: Vec<f64>,
    /// Smallest `bound − error` over the grid.
    pub min_slack: f64,
    pub worst_point: Vec<f64>,
    pub max_bound: f64,
    pub max_error: f64,
    pub violated: bool,
}

impl BoundReport {
    fn assemble(
        kind: BoundKind,
        spec: &OperatorSpec,
        grid: GridSpec,
        norms: DerivativeNorms,
        points: Vec<Vec<f64>>,
        bound: Vec<f64>,
        error: Vec<f64>,
    ) -> Self {
        let mut min_slack = f64::INFINITY;
        let mut worst = 0;
        for (i, (b, e)) in bound.iter().zip(&error).enumerate() {
            if b - e < min_slack {
                min_slack = b - e;
                worst = i;
            }
        }
        let max_bound = bound.iter().fold(0.0f64, |a, &b| a.max(b));
        let max_error = error.iter().fold(0.0f64, |a, &b| a.max(b));
        Self {
            kind,
            operator: spec.label(),
            grid,
            norms,
            worst_point: points[worst].clone(),
            points,
            bound,
            error,
            min_slack,
            max_bound,
            max_error,
            violated: min_slack < -1e-9 * (1.0 + max_bound),
        }
    }
}

fn check_kind(kind: BoundKind, spec: &OperatorSpec) -> Result<()> {
    spec.validate()?;
    let dims = if spec.is_bivariate() { 2 } else { 1 };
    if kind.dims() != dims || kind.operator() != spec.kind {
        return Err(Error::precondition(format!("bound `{kind}` does not apply to operator {}", spec.label())));
    }
    Ok(())
}

/// Compares a univariate bound with the measured error on `grid`.
pub fn verify_bound_1d(f: &ScalarFunction, spec: &OperatorSpec, kind: BoundKind, grid: &GridSpec) -> Result<BoundReport> {
    check_kind(kind, spec)?;
    let norms = estimate_norms_1d(f, &GridSpec::line(NORM_POINTS_1D)?)?;
    verify_bound_1d_with(f, spec, kind, grid, norms)
}

/// As [`verify_bound_1d`] with caller-supplied norms.
pub fn verify_bound_1d_with(
    f: &ScalarFunction,
    spec: &OperatorSpec,
    kind: BoundKind,
    grid: &GridSpec,
    norms: Norms1d,
) -> Result<BoundReport> {
    check_kind(kind, spec)?;
    let xs = grid.coords();
    let n = spec.n;
    let op = apply_1d(f, spec)?.eval_many(&xs)?;
    let j = spec.j.unwrap_or(1);
    let (bound, error): (Vec<f64>, Vec<f64>) = match kind {
        BoundKind::Bernstein => {
            let fx: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect::<Result<_>>()?;
            (
                xs.iter().map(|&x| bound_bernstein_1d(x, n, norms.d2)).collect(),
                fx.iter().zip(&op).map(|(a, b)| (a - b).abs()).collect(),
            )
        }
        BoundKind::Akr => {
            let fx: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect::<Result<_>>()?;
            (
                xs.iter().map(|&x| bound_akr_1d(x, n, j, &norms)).collect(),
                fx.iter().zip(&op).map(|(a, b)| (a - b).abs()).collect(),
            )
        }
        BoundKind::AkrDiff | BoundKind::AkrDiffModulus => {
            let b = apply_1d(f, &spec.bernstein_counterpart())?.eval_many(&xs)?;
            let modulus = if kind == BoundKind::AkrDiffModulus {
                Some(compute_modulus(f, (j - 1) as f64 / n as f64, &norms.grid)?)
            } else {
                None
            };
            let d = bound_akr_diff(n, j, norms.d1, modulus)?;
            let value = d.modulus.unwrap_or(d.derivative);
            (
                vec![value; xs.len()],
                b.iter().zip(&op).map(|(a, b)| (a - b).abs()).collect(),
            )
        }
        _ => unreachable!("checked by check_kind"),
    };
    let points = xs.iter().map(|&x| vec![x]).collect();
    Ok(BoundReport::assemble(
        kind,
        spec,
        grid.with_dims(1)?,
        DerivativeNorms::Univariate(norms),
        points,
        bound,
        error,
    ))
}

/// Compares a bivariate bound with the measured error on `grid`.
pub fn verify_bound_2d(f: &BivariateFunction, spec: &OperatorSpec, kind: BoundKind, grid: &GridSpec) -> Result<BoundReport> {
    check_kind(kind, spec)?;
    let norms = estimate_norms_2d(f, &GridSpec::square(NORM_POINTS_2D)?)?;
    verify_bound_2d_with(f, spec, kind, grid, norms)
}

pub fn verify_bound_2d_with(
    f: &BivariateFunction,
    spec: &OperatorSpec,
    kind: BoundKind,
    grid: &GridSpec,
    norms: Norms2d,
) -> Result<BoundReport> {
    check_kind(kind, spec)?;
    let cs = grid.coords();
    let (n, m, j) = (spec.n, spec.m.unwrap_or(spec.n), spec.j.unwrap_or(1));
    let op = apply_2d(f, spec)?.eval_grid(&cs, &cs)?;
    let mut points = Vec::with_capacity(cs.len() * cs.len());
    let mut bound = Vec::with_capacity(points.capacity());
    let mut error = Vec::with_capacity(points.capacity());
    for (ix, &x) in cs.iter().enumerate() {
        for (iy, &y) in cs.iter().enumerate() {
            points.push(vec![x, y]);
            bound.push(match kind {
                BoundKind::BivariateOld => bound_bivariate_old(x, y, n, m, &norms),
                BoundKind::BivariateMixed => bound_bivariate_mixed(x, y, n, m, &norms),
                BoundKind::BivariateNew => bound_bivariate_new(x, y, n, m, &norms),
                BoundKind::Akr2d => bound_akr_2d(x, y, n, m, j, &norms),
                _ => unreachable!("checked by check_kind"),
            });
            error.push((f.value(x, y)? - op[ix][iy]).abs());
        }
    }
    Ok(BoundReport::assemble(
        kind,
        spec,
        grid.with_dims(2)?,
        DerivativeNorms::Bivariate(norms),
        points,
        bound,
        error,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::AnyFunction;
    use crate::catalog;
    use std::f64::consts::PI;

    fn uni(s: &str) -> ScalarFunction {
        ScalarFunction::parse(s).unwrap()
    }

    fn bi(s: &str) -> BivariateFunction {
        BivariateFunction::parse(s).unwrap()
    }

    fn norms2(d20: f64, d02: f64, d22: f64, d10: f64, d01: f64) -> Norms2d {
        Norms2d {
            d10,
            d01,
            d20,
            d02,
            d22,
            grid: GridSpec::square(2).unwrap(),
        }
    }

    #[test]
    fn norm_examples() {
        let g = GridSpec::line(NORM_POINTS_1D).unwrap();
        assert_eq!(estimate_norms_1d(&uni("x^2"), &g).unwrap().d2, 2.0);
        let s = estimate_norms_1d(&uni("sin(pi*x/2)"), &g).unwrap();
        assert!((s.d2 - (PI / 2.0).powi(2)).abs() < 1e-12);

        let n = estimate_norms_2d(&bi("x^2 + y^2"), &GridSpec::square(41).unwrap()).unwrap();
        assert_eq!((n.d20, n.d02), (2.0, 2.0));
        assert!(n.d22 < 1e-6);
        let vo = ScalarFunction::value_only("v", |x| x);
        assert!(estimate_norms_1d(&vo, &g).is_err());
    }

    #[test]
    fn univariate_bound_examples() {
        assert_eq!(bound_bernstein_1d(0.5, 10, 1.0), 0.0125);
        assert_eq!(bound_bernstein_1d(0.0, 10, 1.0), 0.0);
        let norms = Norms1d {
            d1: 1.0,
            d2: 0.0,
            grid: GridSpec::line(2).unwrap(),
        };
        assert_eq!(bound_akr_1d(0.0, 10, 2, &norms), 0.1);
        let norms = Norms1d { d1: 2.0, d2: 2.0, ..norms };
        assert!((bound_akr_1d(0.5, 10, 2, &norms) - 0.225).abs() < 1e-15);
    }

    #[test]
    fn bivariate_bound_examples() {
        let n = norms2(2.0, 2.0, 0.0, 2.0, 2.0);
        assert!((bound_bivariate_old(0.5, 0.5, 10, 10, &n) - 0.15).abs() < 1e-15);
        assert_eq!(bound_bivariate_old(0.0, 0.0, 10, 10, &n), 0.0);
        assert!((bound_bivariate_mixed(0.5, 0.5, 10, 10, &n) - 0.05).abs() < 1e-15);
        assert!((bound_bivariate_new(0.5, 0.5, 10, 10, &n) - 0.05).abs() < 1e-15);
        assert_eq!(bound_bivariate_new(1.0, 0.5, 10, 10, &n), 0.5 * 0.25 / 10.0 * 2.0);
        assert_eq!(bound_bivariate_mixed(0.0, 0.5, 10, 10, &n), 0.5 * 0.25 / 10.0 * 2.0);
        assert!((bound_akr_2d(0.5, 0.5, 10, 10, 2, &n) - 0.45).abs() < 1e-15);
        assert_eq!(bound_akr_2d(0.3, 0.6, 4, 4, 2, &norms2(0.0, 0.0, 0.0, 0.0, 0.0)), 0.0);

        // f = 4x²y²: f^(2,2) = 16
        let n = norms2(8.0, 8.0, 16.0, 8.0, 8.0);
        let (x, y) = (0.3, 0.8);
        let expected = 0.5 * (0.21 / 5.0 * 8.0 + 0.16 / 7.0 * 8.0) + 0.21 * 0.16 / (4.0 * 35.0) * 16.0;
        assert!((bound_bivariate_mixed(x, y, 5, 7, &n) - expected).abs() < 1e-15);
    }

    #[test]
    fn akr_difference_examples() {
        assert_eq!(bound_akr_diff(10, 2, 1.0, None).unwrap().derivative, 0.1);
        assert!((bound_akr_diff(50, 2, PI / 2.0, None).unwrap().derivative - 0.01 * PI).abs() < 1e-15);
        assert!(bound_akr_diff(1, 2, 1.0, None).is_err());

        let r = verify_bound_1d(
            &uni("x^2"),
            &OperatorSpec::akr(10, 2),
            BoundKind::AkrDiff,
            &GridSpec::line(201).unwrap(),
        )
        .unwrap();
        assert!(r.max_error <= 0.1);
        assert!((r.max_bound - 0.2).abs() < 1e-15);
        assert!(!r.violated);
    }

    #[test]
    fn modulus_examples() {
        let g = GridSpec::line(1001).unwrap();
        assert!((compute_modulus(&uni("x"), 0.1, &g).unwrap() - 0.1).abs() < 1e-15);
        assert!((compute_modulus(&uni("x^2"), 0.1, &g).unwrap() - 0.19).abs() < 1e-14);
        assert_eq!(compute_modulus(&uni("3"), 0.1, &g).unwrap(), 0.0);
        assert!(compute_modulus(&uni("x"), 0.0, &g).is_err());
    }

    #[test]
    fn verify_equality_cases() {
        let g = GridSpec::line(101).unwrap();
        let r = verify_bound_1d(&uni("x^2"), &OperatorSpec::bernstein(10), BoundKind::Bernstein, &g).unwrap();
        assert!(!r.violated);
        assert!(r.min_slack.abs() < 1e-12);

        let r = verify_bound_2d(
            &bi("x^2 + y^2"),
            &OperatorSpec::bernstein_2d(10, 10),
            BoundKind::BivariateNew,
            &GridSpec::square(21).unwrap(),
        )
        .unwrap();
        assert!(!r.violated);
        let centre = r.points.iter().position(|p| p == &vec![0.5, 0.5]).unwrap();
        assert!((r.bound[centre] - r.error[centre]).abs() < 1e-12);
        assert!((r.error[centre] - 0.05).abs() < 1e-12);

        let r = verify_bound_1d(&catalog::example_3_1(), &OperatorSpec::akr(5, 2), BoundKind::Akr, &g).unwrap();
        assert!(!r.violated);
    }

    #[test]
    fn example_4_4_within_akr_bound() {
        let AnyFunction::Bivariate(f) = catalog::lookup("ex4.4", 2).unwrap() else { unreachable!() };
        let r = verify_bound_2d(
            &f,
            &OperatorSpec::akr_2d(10, 10, 2),
            BoundKind::Akr2d,
            &GridSpec::square(51).unwrap(),
        )
        .unwrap();
        assert!(!r.violated);
        assert!(r.max_error < 0.05 && r.max_error < r.max_bound);
    }

    #[test]
    fn kind_must_match_operator() {
        let g = GridSpec::line(11).unwrap();
        assert!(verify_bound_1d(&uni("x"), &OperatorSpec::bernstein(5), BoundKind::Akr, &g).is_err());
        assert!(verify_bound_1d(&uni("x"), &OperatorSpec::akr(5, 2), BoundKind::BivariateNew, &g).is_err());
        assert_eq!("akr-2d".parse::<BoundKind>().unwrap(), BoundKind::Akr2d);
        assert!("nope".parse::<BoundKind>().is_err());
    }
}
