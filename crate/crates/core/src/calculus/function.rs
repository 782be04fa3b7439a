//! Functions on [0, 1] and [0, 1]² represented as evaluation channels.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::diff::{finite_diff_1, finite_diff_2, STEP_FIRST, STEP_SECOND};
use super::dual::{Dual2, Real};
use super::expr::{eval_dual, parse_expression, Bindings, Expr, Var};
use crate::error::{finite, Error, Result};

/// Where the derivative channels of a function come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// Closed-form derivatives supplied by the caller.
    Analytic,
    /// Forward-mode differentiation of an expression or closed form.
    AutoDiff,
    /// Finite differences of the value channel.
    FiniteDifference,
    /// Value channel only.
    ValueOnly,
}

impl Channel {
    /// Default class-membership tolerance for margins computed from this channel.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Channel::Analytic | Channel::AutoDiff => 1e-9,
            Channel::FiniteDifference | Channel::ValueOnly => 1e-6,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Analytic => "analytic",
            Channel::AutoDiff => "autodiff",
            Channel::FiniteDifference => "finite-difference",
            Channel::ValueOnly => "value-only",
        })
    }
}

/// A closed-form curve written once over [`Real`], differentiated by [`Dual2`].
pub trait Curve: Send + Sync + 'static {
    fn eval<T: Real>(&self, x: T) -> T;
}

/// A closed-form surface written once over [`Real`].
pub trait Surface: Send + Sync + 'static {
    fn eval<T: Real>(&self, x: T, y: T) -> T;
}

type ValueFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
type SlopeFn = Arc<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>;

/// Real-valued function on [0, 1] with value, f′ and f″ channels.
#[derive(Clone)]
pub struct ScalarFunction {
    label: String,
    value: ValueFn,
    slope: Option<SlopeFn>,
    channel: Channel,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("channel", &self.channel)
            .finish()
    }
}

impl ScalarFunction {
    /// Parses an expression in `x` and differentiates it automatically.
    pub fn parse(src: &str) -> Result<Self> {
        let expr = parse_expression(src, &[Var::X])?;
        Ok(Self::from_expr(src.trim().to_string(), expr))
    }

    pub fn from_expr(label: impl Into<String>, expr: Expr) -> Self {
        let expr = Arc::new(expr);
        let e2 = Arc::clone(&expr);
        Self {
            label: label.into(),
            value: Arc::new(move |x| expr.eval(&Bindings::x(x))),
            slope: Some(Arc::new(move |x| {
                let r = eval_dual(&e2, &Bindings::x(Dual2::variable(x)))?;
                Ok((r.d1, r.d2))
            })),
            channel: Channel::AutoDiff,
        }
    }

    pub fn from_curve<C: Curve>(label: impl Into<String>, curve: C) -> Self {
        let curve = Arc::new(curve);
        let c2 = Arc::clone(&curve);
        let label = label.into();
        let l1 = label.clone();
        let l2 = label.clone();
        Self {
            label,
            value: Arc::new(move |x| finite(|| format!("{l1} at {x}"), curve.eval(x))),
            slope: Some(Arc::new(move |x| {
                let r = c2.eval(Dual2::variable(x));
                Ok((
                    finite(|| format!("{l2}' at {x}"), r.d1)?,
                    finite(|| format!("{l2}'' at {x}"), r.d2)?,
                ))
            })),
            channel: Channel::AutoDiff,
        }
    }

    /// Value channel only; derivatives fall back to finite differences.
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let label = label.into();
        let l = label.clone();
        Self {
            label,
            value: Arc::new(move |x| finite(|| format!("{l} at {x}"), f(x))),
            slope: None,
            channel: Channel::FiniteDifference,
        }
    }

    /// Value channel with no derivative information at all.
    pub fn value_only<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            channel: Channel::ValueOnly,
            ..Self::from_fn(label, f)
        }
    }

    /// Closed-form value, first and second derivative.
    pub fn with_derivatives<F, D1, D2>(label: impl Into<String>, f: F, d1: D1, d2: D2) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let label = label.into();
        let l = label.clone();
        Self {
            slope: Some(Arc::new(move |x| {
                Ok((
                    finite(|| format!("{l}' at {x}"), d1(x))?,
                    finite(|| format!("{l}'' at {x}"), d2(x))?,
                ))
            })),
            channel: Channel::Analytic,
            ..Self::from_fn(label, f)
        }
    }

    /// Builds a function from fallible channels.
    pub fn from_channels<F, S>(label: impl Into<String>, value: F, slope: S, channel: Channel) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
        S: Fn(f64) -> Result<(f64, f64)> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            value: Arc::new(value),
            slope: Some(Arc::new(slope)),
            channel,
        }
    }

    /// Drops any derivative channel in favour of finite differences.
    pub fn with_finite_differences(mut self) -> Self {
        self.slope = None;
        self.channel = Channel::FiniteDifference;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn default_tolerance(&self) -> f64 {
        self.channel.default_tolerance()
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        (self.value)(x)
    }

    /// `(f′(x), f″(x))`.
    pub fn derivatives(&self, x: f64) -> Result<(f64, f64)> {
        match (&self.slope, self.channel) {
            (Some(s), _) => s(x),
            (None, Channel::FiniteDifference) => Ok((
                finite_diff_1(&*self.value, x, STEP_FIRST)?,
                finite_diff_2(&*self.value, x, STEP_SECOND)?,
            )),
            _ => Err(Error::MissingChannel("derivative")),
        }
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        match (&self.slope, self.channel) {
            (Some(s), _) => Ok(s(x)?.0),
            (None, Channel::FiniteDifference) => finite_diff_1(&*self.value, x, STEP_FIRST),
            _ => Err(Error::MissingChannel("first-derivative")),
        }
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        match (&self.slope, self.channel) {
            (Some(s), _) => Ok(s(x)?.1),
            (None, Channel::FiniteDifference) => finite_diff_2(&*self.value, x, STEP_SECOND),
            _ => Err(Error::MissingChannel("second-derivative")),
        }
    }

    pub fn jet(&self, x: f64) -> Result<Dual2> {
        let (d1, d2) = self.derivatives(x)?;
        Ok(Dual2::new(self.value(x)?, d1, d2))
    }

    pub fn has_derivatives(&self) -> bool {
        self.channel != Channel::ValueOnly
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

type Value2Fn = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;
type Partial2Fn = Arc<dyn Fn(f64, f64, Axis) -> Result<(f64, f64)> + Send + Sync>;

/// Real-valued function on [0, 1]² with partial-derivative channels.
///
/// Along each axis the channel yields the first and second partial. The
/// mixed `f^{(2,2)}` is a second difference in `y` (step 1e-4) of the
/// `∂²/∂x²` channel.
#[derive(Clone)]
pub struct BivariateFunction {
    label: String,
    value: Value2Fn,
    partials: Option<Partial2Fn>,
    channel: Channel,
}

impl fmt::Debug for BivariateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateFunction")
            .field("label", &self.label)
            .field("channel", &self.channel)
            .finish()
    }
}

impl BivariateFunction {
    pub fn parse(src: &str) -> Result<Self> {
        let expr = parse_expression(src, &[Var::X, Var::Y])?;
        Ok(Self::from_expr(src.trim().to_string(), expr))
    }

    pub fn from_expr(label: impl Into<String>, expr: Expr) -> Self {
        let expr = Arc::new(expr);
        let e2 = Arc::clone(&expr);
        Self {
            label: label.into(),
            value: Arc::new(move |x, y| expr.eval(&Bindings::xy(x, y))),
            partials: Some(Arc::new(move |x, y, axis| {
                let b = match axis {
                    Axis::X => Bindings::xy(Dual2::variable(x), Dual2::constant(y)),
                    Axis::Y => Bindings::xy(Dual2::constant(x), Dual2::variable(y)),
                };
                let r = eval_dual(&e2, &b)?;
                Ok((r.d1, r.d2))
            })),
            channel: Channel::AutoDiff,
        }
    }

    pub fn from_surface<S: Surface>(label: impl Into<String>, surface: S) -> Self {
        let s = Arc::new(surface);
        let s2 = Arc::clone(&s);
        let label = label.into();
        let l1 = label.clone();
        let l2 = label.clone();
        Self {
            label,
            value: Arc::new(move |x, y| finite(|| format!("{l1} at ({x}, {y})"), s.eval(x, y))),
            partials: Some(Arc::new(move |x, y, axis| {
                let r = match axis {
                    Axis::X => s2.eval(Dual2::variable(x), Dual2::constant(y)),
                    Axis::Y => s2.eval(Dual2::constant(x), Dual2::variable(y)),
                };
                Ok((
                    finite(|| format!("{l2} first partial at ({x}, {y})"), r.d1)?,
                    finite(|| format!("{l2} second partial at ({x}, {y})"), r.d2)?,
                ))
            })),
            channel: Channel::AutoDiff,
        }
    }

    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let label = label.into();
        let l = label.clone();
        Self {
            label,
            value: Arc::new(move |x, y| finite(|| format!("{l} at ({x}, {y})"), f(x, y))),
            partials: None,
            channel: Channel::FiniteDifference,
        }
    }

    pub fn value_only<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            channel: Channel::ValueOnly,
            ..Self::from_fn(label, f)
        }
    }

    /// Builds a function from fallible channels; `partials` returns the first
    /// and second partial along the requested axis.
    pub fn from_channels<F, P>(label: impl Into<String>, value: F, partials: P, channel: Channel) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
        P: Fn(f64, f64, Axis) -> Result<(f64, f64)> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            value: Arc::new(value),
            partials: Some(Arc::new(partials)),
            channel,
        }
    }

    pub fn with_finite_differences(mut self) -> Self {
        self.partials = None;
        self.channel = Channel::FiniteDifference;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn default_tolerance(&self) -> f64 {
        self.channel.default_tolerance()
    }

    pub fn has_derivatives(&self) -> bool {
        self.channel != Channel::ValueOnly
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        (self.value)(x, y)
    }

    /// First and second partial derivative along `axis` at `(x, y)`.
    pub fn along(&self, axis: Axis, x: f64, y: f64) -> Result<(f64, f64)> {
        if let Some(p) = &self.partials {
            return p(x, y, axis);
        }
        if self.channel != Channel::FiniteDifference {
            return Err(Error::MissingChannel("partial-derivative"));
        }
        let v = &self.value;
        match axis {
            Axis::X => {
                let g = |t: f64| v(t, y);
                Ok((finite_diff_1(g, x, STEP_FIRST)?, finite_diff_2(g, x, STEP_SECOND)?))
            }
            Axis::Y => {
                let g = |t: f64| v(x, t);
                Ok((finite_diff_1(g, y, STEP_FIRST)?, finite_diff_2(g, y, STEP_SECOND)?))
            }
        }
    }

    pub fn d10(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.along(Axis::X, x, y)?.0)
    }

    pub fn d01(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.along(Axis::Y, x, y)?.0)
    }

    pub fn d20(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.along(Axis::X, x, y)?.1)
    }

    pub fn d02(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.along(Axis::Y, x, y)?.1)
    }

    /// `∂⁴f/∂x²∂y²` as a second difference in `y` of the `∂²/∂x²` channel.
    pub fn d22(&self, x: f64, y: f64) -> Result<f64> {
        finite_diff_2(|t| self.d20(x, t), y, STEP_SECOND)
    }

    /// The slice `t ↦ f(t, y)` (axis X) or `t ↦ f(x, t)` (axis Y).
    pub fn slice(&self, axis: Axis, fixed: f64) -> ScalarFunction {
        let a = self.clone();
        let b = self.clone();
        let label = format!("{} slice", self.label);
        let (value, slope): (Box<dyn Fn(f64) -> Result<f64> + Send + Sync>, _) = match axis {
            Axis::X => (
                Box::new(move |t| a.value(t, fixed)),
                Box::new(move |t| b.along(Axis::X, t, fixed)) as Box<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>,
            ),
            Axis::Y => (
                Box::new(move |t| a.value(fixed, t)),
                Box::new(move |t| b.along(Axis::Y, fixed, t)) as Box<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>,
            ),
        };
        let channel = self.channel;
        if channel == Channel::ValueOnly {
            return ScalarFunction {
                label,
                value: Arc::new(value),
                slope: None,
                channel,
            };
        }
        ScalarFunction::from_channels(label, value, slope, channel)
    }
}

/// Either kind of function, as chosen by the CLI and the C ABI.
#[derive(Debug, Clone)]
pub enum AnyFunction {
    Univariate(ScalarFunction),
    Bivariate(BivariateFunction),
}

impl AnyFunction {
    /// Parses an expression; it is bivariate if it mentions `y` or `force_2d` is set.
    pub fn parse(src: &str, force_2d: bool) -> Result<Self> {
        let expr = parse_expression(src, &[Var::X, Var::Y])?;
        if force_2d || expr.uses(Var::Y) {
            Ok(Self::Bivariate(BivariateFunction::from_expr(src.trim(), expr)))
        } else {
            Ok(Self::Univariate(ScalarFunction::from_expr(src.trim(), expr)))
        }
    }

    pub fn dims(&self) -> u8 {
        match self {
            AnyFunction::Univariate(_) => 1,
            AnyFunction::Bivariate(_) => 2,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            AnyFunction::Univariate(f) => f.label(),
            AnyFunction::Bivariate(f) => f.label(),
        }
    }

    pub fn channel(&self) -> Channel {
        match self {
            AnyFunction::Univariate(f) => f.channel(),
            AnyFunction::Bivariate(f) => f.channel(),
        }
    }

    pub fn with_finite_differences(self) -> Self {
        match self {
            AnyFunction::Univariate(f) => AnyFunction::Univariate(f.with_finite_differences()),
            AnyFunction::Bivariate(f) => AnyFunction::Bivariate(f.with_finite_differences()),
        }
    }

    pub fn as_univariate(&self) -> Result<&ScalarFunction> {
        match self {
            AnyFunction::Univariate(f) => Ok(f),
            AnyFunction::Bivariate(f) => Err(Error::precondition(format!(
                "`{}` is bivariate; this operation needs a function of x only",
                f.label()
            ))),
        }
    }

    pub fn as_bivariate(&self) -> Result<&BivariateFunction> {
        match self {
            AnyFunction::Bivariate(f) => Ok(f),
            AnyFunction::Univariate(f) => Err(Error::precondition(format!(
                "`{}` is univariate; this operation needs a function of x and y",
                f.label()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Gauss;
    impl Surface for Gauss {
        fn eval<T: Real>(&self, x: T, y: T) -> T {
            (x * x * y * y).exp()
        }
    }

    #[test]
    fn expression_channels() {
        let f = ScalarFunction::parse("x^3").unwrap();
        assert_eq!(f.channel(), Channel::AutoDiff);
        assert_eq!(f.value(0.5).unwrap(), 0.125);
        assert_eq!(f.derivatives(0.5).unwrap(), (0.75, 3.0));
    }

    #[test]
    fn finite_difference_fallback() {
        let f = ScalarFunction::from_fn("cube", |x| x * x * x);
        assert_eq!(f.channel(), Channel::FiniteDifference);
        let (d1, d2) = f.derivatives(0.5).unwrap();
        assert!((d1 - 0.75).abs() < 1e-8);
        assert!((d2 - 3.0).abs() < 1e-5);
    }

    #[test]
    fn value_only_has_no_derivatives() {
        let f = ScalarFunction::value_only("v", |x| x);
        assert_eq!(f.d1(0.5), Err(Error::MissingChannel("first-derivative")));
        assert!(!f.has_derivatives());
        let g = BivariateFunction::value_only("v", |x, y| x + y);
        assert!(matches!(g.d10(0.5, 0.5), Err(Error::MissingChannel(_))));
    }

    #[test]
    fn mixed_partial_of_product() {
        // f = x²y²·4 → f^{(2,2)} = 16
        let f = BivariateFunction::parse("4*x^2*y^2").unwrap();
        for (x, y) in [(0.3, 0.6), (0.0, 0.0), (1.0, 1.0)] {
            assert!((f.d22(x, y).unwrap() - 16.0).abs() < 1e-5);
        }
    }

    #[test]
    fn surface_channels_match_closed_form() {
        let f = BivariateFunction::from_surface("gauss", Gauss);
        let (x, y) = (0.4, 0.7);
        let g = (x * x * y * y).exp();
        let (fx, fxx) = f.along(Axis::X, x, y).unwrap();
        assert!((fx - 2.0 * x * y * y * g).abs() < 1e-14);
        assert!((fxx - (2.0 * y * y + 4.0 * x * x * y.powi(4)) * g).abs() < 1e-13);
    }

    #[test]
    fn slices_follow_the_parent() {
        let f = BivariateFunction::parse("x^2*y + y^3").unwrap();
        let s = f.slice(Axis::Y, 0.5);
        assert_eq!(s.value(0.2).unwrap(), 0.25 * 0.2 + 0.008);
        let (d1, d2) = s.derivatives(0.2).unwrap();
        assert!((d1 - (0.25 + 3.0 * 0.04)).abs() < 1e-14);
        assert!((d2 - 1.2).abs() < 1e-14);
    }

    #[test]
    fn dimension_detection() {
        assert_eq!(AnyFunction::parse("x^2", false).unwrap().dims(), 1);
        assert_eq!(AnyFunction::parse("x*y", false).unwrap().dims(), 2);
        assert_eq!(AnyFunction::parse("1", true).unwrap().dims(), 2);
    }
}
