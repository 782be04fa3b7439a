//! Built-in functions keyed by example name, with exact derivative channels.
//!
//! Every entry also has an expression form accepted by
//! [`parse_expression`](crate::calculus::parse_expression), used to
//! cross-check the closed forms against the parser and AD.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::calculus::{AnyFunction, BivariateFunction, Real, ScalarFunction, Surface};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dims: u8,
    /// AKR exponent the example is built for.
    pub j: u32,
    /// Degrees used by the example's figure.
    pub n: usize,
    pub m: Option<usize>,
    pub description: &'static str,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "ex3.1",
        dims: 1,
        j: 2,
        n: 5,
        m: None,
        description: "∫₀ˣ t·sin(πt/2) dt = -(2/π)x cos(πx/2) + (4/π²) sin(πx/2)",
    },
    CatalogEntry {
        name: "ex3.2",
        dims: 1,
        j: 5,
        n: 5,
        m: None,
        description: "∫₀ˣ t⁴eᵗ dt = -24 + (x⁴-4x³+12x²-24x+24)eˣ",
    },
    CatalogEntry {
        name: "ex3.4",
        dims: 1,
        j: 2,
        n: 10,
        m: None,
        description: "cos²(π(x+1)/4), decreasing and convex",
    },
    CatalogEntry {
        name: "ex4.3",
        dims: 2,
        j: 2,
        n: 4,
        m: Some(4),
        description: "(x^j+y^j)²/(2j), from φ = ψ = x^j + y^j",
    },
    CatalogEntry {
        name: "ex4.4",
        dims: 2,
        j: 2,
        n: 3,
        m: Some(4),
        description: "exp(x²y²) - 1",
    },
    CatalogEntry {
        name: "ex4.5",
        dims: 2,
        j: 2,
        n: 3,
        m: Some(4),
        description: "tan(π/4·(2^(x^j)-1)·y^(3j))",
    },
    CatalogEntry {
        name: "ex4.6",
        dims: 2,
        j: 2,
        n: 4,
        m: Some(4),
        description: "∫₀ˣ∫₀ʸ ts·sin(π(t+s)/4) ds dt (closed form, j = 2)",
    },
];

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownIdentifier {
            name: name.to_string(),
            position: 0,
        })
}

/// The catalog function `name`; `j` only matters for `ex4.3` and `ex4.5`.
pub fn lookup(name: &str, j: u32) -> Result<AnyFunction> {
    let e = entry(name)?;
    Ok(match e.name {
        "ex3.1" => AnyFunction::Univariate(example_3_1()),
        "ex3.2" => AnyFunction::Univariate(example_3_2()),
        "ex3.4" => AnyFunction::Univariate(example_3_4()),
        "ex4.3" => AnyFunction::Bivariate(BivariateFunction::from_surface(name, SumOfPowersSquared { j })),
        "ex4.4" => AnyFunction::Bivariate(example_4_4()),
        "ex4.5" => AnyFunction::Bivariate(BivariateFunction::from_surface(name, TanComposite { j })),
        "ex4.6" => AnyFunction::Bivariate(example_4_6()),
        _ => unreachable!(),
    })
}

/// Expression text equivalent to [`lookup`].
pub fn expression(name: &str, j: u32) -> Result<String> {
    let e = entry(name)?;
    Ok(match e.name {
        "ex3.1" => "-(2/pi)*x*cos(pi*x/2) + (4/pi^2)*sin(pi*x/2)".into(),
        "ex3.2" => "-24 + (x^4 - 4*x^3 + 12*x^2 - 24*x + 24)*exp(x)".into(),
        "ex3.4" => "cos(pi*(x+1)/4)^2".into(),
        "ex4.3" => format!("(x^{j} + y^{j})^2/(2*{j})"),
        "ex4.4" => "exp(x^2*y^2) - 1".into(),
        "ex4.5" => format!("tan(pi/4*(2^(x^{j}) - 1)*y^(3*{j}))"),
        "ex4.6" => "(1/pi^4)*(-64*pi*(y+x)*cos(pi*(y+x)/4) + (-16*pi^2*x*y + 256)*sin(pi*(y+x)/4) \
                   + 64*pi*x*cos(pi*x/4) + 64*pi*y*cos(pi*y/4) - 256*sin(pi*x/4) - 256*sin(pi*y/4))"
            .into(),
        _ => unreachable!(),
    })
}

pub fn example_3_1() -> ScalarFunction {
    ScalarFunction::with_derivatives(
        "ex3.1",
        |x| -2.0 / PI * x * (FRAC_PI_2 * x).cos() + 4.0 / (PI * PI) * (FRAC_PI_2 * x).sin(),
        |x| x * (FRAC_PI_2 * x).sin(),
        |x| (FRAC_PI_2 * x).sin() + FRAC_PI_2 * x * (FRAC_PI_2 * x).cos(),
    )
}

pub fn example_3_2() -> ScalarFunction {
    ScalarFunction::with_derivatives(
        "ex3.2",
        |x| -24.0 + ((((x - 4.0) * x + 12.0) * x - 24.0) * x + 24.0) * x.exp(),
        |x| x.powi(4) * x.exp(),
        |x| (4.0 * x.powi(3) + x.powi(4)) * x.exp(),
    )
}

pub fn example_3_4() -> ScalarFunction {
    ScalarFunction::with_derivatives(
        "ex3.4",
        |x| (FRAC_PI_4 * (x + 1.0)).cos().powi(2),
        |x| -FRAC_PI_4 * (FRAC_PI_2 * (x + 1.0)).sin(),
        |x| -(PI * PI / 8.0) * (FRAC_PI_2 * (x + 1.0)).cos(),
    )
}

pub fn example_4_4() -> BivariateFunction {
    BivariateFunction::from_surface("ex4.4", GaussianProduct)
}

pub fn example_4_6() -> BivariateFunction {
    BivariateFunction::from_surface("ex4.6", SineKernelIntegral)
}

struct SumOfPowersSquared {
    j: u32,
}

impl Surface for SumOfPowersSquared {
    fn eval<T: Real>(&self, x: T, y: T) -> T {
        let j = self.j as f64;
        let s = x.powf(j) + y.powf(j);
        s * s / T::lift(2.0 * j)
    }
}

struct GaussianProduct;

impl Surface for GaussianProduct {
    fn eval<T: Real>(&self, x: T, y: T) -> T {
        let p = x * y;
        (p * p).exp() - T::lift(1.0)
    }
}

struct TanComposite {
    j: u32,
}

impl Surface for TanComposite {
    fn eval<T: Real>(&self, x: T, y: T) -> T {
        let j = self.j as f64;
        let a = (x.powf(j) * T::lift(std::f64::consts::LN_2)).exp() - T::lift(1.0);
        (T::lift(FRAC_PI_4) * a * y.powf(3.0 * j)).tan()
    }
}

struct SineKernelIntegral;

impl Surface for SineKernelIntegral {
    fn eval<T: Real>(&self, x: T, y: T) -> T {
        let c = |v: f64| T::lift(v);
        let q = |v: T| c(FRAC_PI_4) * v;
        let s = x + y;
        let bracket = c(-64.0 * PI) * s * q(s).cos()
            + (c(-16.0 * PI * PI) * x * y + c(256.0)) * q(s).sin()
            + c(64.0 * PI) * x * q(x).cos()
            + c(64.0 * PI) * y * q(y).cos()
            - c(256.0) * q(x).sin()
            - c(256.0) * q(y).sin();
        bracket / c(PI.powi(4))
    }
}

/// Smooth univariate test functions for bound and chain batteries.
pub fn battery_univariate() -> Vec<ScalarFunction> {
    let mut v: Vec<ScalarFunction> = [
        "1",
        "x",
        "x^2",
        "x^3",
        "sin(pi*x/2)",
        "exp(x)",
        "ln(1+x)",
        "1/(1+x)",
        "cos(3*x)",
    ]
    .iter()
    .map(|s| ScalarFunction::parse(s).expect("battery expression"))
    .collect();
    v.extend([example_3_1(), example_3_2(), example_3_4()]);
    v
}

/// Smooth bivariate test functions for bound and chain batteries.
pub fn battery_bivariate() -> Vec<BivariateFunction> {
    let mut v: Vec<BivariateFunction> = [
        "1 + 0*y",
        "x + y",
        "x^2 + y^2",
        "x^2*y^2",
        "sin(x + y)",
        "exp(x - y)",
        "x^3*y",
        "cos(pi*x*y/2)",
    ]
    .iter()
    .map(|s| BivariateFunction::parse(s).expect("battery expression"))
    .collect();
    for name in ["ex4.3", "ex4.4", "ex4.5", "ex4.6"] {
        if let Ok(AnyFunction::Bivariate(f)) = lookup(name, 2) {
            v.push(f);
        }
    }
    v
}
