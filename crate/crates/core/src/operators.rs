//! Bernstein basis, AKR nodes and the operators `B_n`, `B_{n,j}`,
//! `B_{n,m}`, `B_{n,m,j}` plus a generalized Bernstein-type operator.
//!
//! All operator sums run over `k = 0..=n` in ascending order with
//! compensated summation, so results are bit-reproducible.

use std::fmt;

use serde::Serialize;

use crate::calculus::{BivariateFunction, ScalarFunction};
use crate::error::{check_unit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Bernstein,
    Akr,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Bernstein => "bernstein",
            OperatorKind::Akr => "akr",
        })
    }
}

/// Which operator to apply, with its degrees and AKR exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub n: usize,
    pub m: Option<usize>,
    pub j: Option<u32>,
}

impl OperatorSpec {
    pub fn bernstein(n: usize) -> Self {
        Self { kind: OperatorKind::Bernstein, n, m: None, j: None }
    }

    pub fn akr(n: usize, j: u32) -> Self {
        Self { kind: OperatorKind::Akr, n, m: None, j: Some(j) }
    }

    pub fn bernstein_2d(n: usize, m: usize) -> Self {
        Self { kind: OperatorKind::Bernstein, n, m: Some(m), j: None }
    }

    pub fn akr_2d(n: usize, m: usize, j: u32) -> Self {
        Self { kind: OperatorKind::Akr, n, m: Some(m), j: Some(j) }
    }

    pub fn is_bivariate(&self) -> bool {
        self.m.is_some()
    }

    /// The Bernstein operator on the same degrees.
    pub fn bernstein_counterpart(&self) -> Self {
        Self { kind: OperatorKind::Bernstein, j: None, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let degrees = std::iter::once(("n", self.n)).chain(self.m.map(|m| ("m", m)));
        match self.kind {
            OperatorKind::Bernstein => {
                for (name, d) in degrees {
                    if d < 1 {
                        return Err(Error::precondition(format!("{name} must be ≥ 1")));
                    }
                }
            }
            OperatorKind::Akr => {
                let j = self
                    .j
                    .ok_or_else(|| Error::precondition("AKR operator needs an exponent j"))?;
                check_exponent(j)?;
                for (name, d) in degrees {
                    if d < j as usize {
                        return Err(Error::precondition(format!("{name} must be ≥ j ({name} = {d}, j = {j})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Sampling nodes along the first axis.
    pub fn nodes_x(&self) -> Result<Vec<f64>> {
        self.axis_nodes(self.n)
    }

    /// Sampling nodes along the second axis.
    pub fn nodes_y(&self) -> Result<Vec<f64>> {
        let m = self
            .m
            .ok_or_else(|| Error::precondition("univariate operator has no second axis"))?;
        self.axis_nodes(m)
    }

    fn axis_nodes(&self, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        match self.kind {
            OperatorKind::Bernstein => Ok(uniform_nodes(n)),
            OperatorKind::Akr => Ok(akr_nodes(n, self.j.unwrap())?.nodes),
        }
    }

    /// Short name such as `B_10`, `B_10_2`, `B_3_4` or `B_3_4_2`.
    pub fn label(&self) -> String {
        let mut s = format!("B_{}", self.n);
        if let Some(m) = self.m {
            s.push_str(&format!("_{m}"));
        }
        if let (OperatorKind::Akr, Some(j)) = (self.kind, self.j) {
            s.push_str(&format!("_{j}"));
        }
        s
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_exponent(j: u32) -> Result<()> {
    if j < 2 {
        return Err(Error::precondition(format!(
            "AKR exponent j must be ≥ 2 (got {j}); use the Bernstein operator for j = 1"
        )));
    }
    Ok(())
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = CompensatedSum::default();
    for (x, y) in a.iter().zip(b) {
        s.add(x * y);
    }
    s.total()
}

/// All `p_{n,i}(x) = C(n,i) x^i (1-x)^{n-i}`, `i = 0..=n`.
pub fn bernstein_basis(n: usize, x: f64) -> Result<Vec<f64>> {
    check_unit("x", x)?;
    let mut out = vec![0.0; n + 1];
    fill_basis(n, x, &mut out);
    Ok(out)
}

/// One pass outward from the mode using the ratio
/// `p_{n,i+1}/p_{n,i} = (n-i)/(i+1) · x/(1-x)`. Starting at the largest
/// term keeps every intermediate representable even when `(1-x)^n`
/// underflows.
pub(crate) fn fill_basis(n: usize, x: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), n + 1);
    out.fill(0.0);
    if x <= 0.0 {
        out[0] = 1.0;
        return;
    }
    if x >= 1.0 {
        out[n] = 1.0;
        return;
    }
    let mode = (((n + 1) as f64 * x).floor() as usize).min(n);
    let ln_p = ln_binomial(n, mode) + mode as f64 * x.ln() + (n - mode) as f64 * (-x).ln_1p();
    out[mode] = ln_p.exp();
    let ratio = x / (1.0 - x);
    for i in mode..n {
        out[i + 1] = out[i] * ((n - i) as f64 / (i + 1) as f64) * ratio;
    }
    for i in (1..=mode).rev() {
        out[i - 1] = out[i] * (i as f64 / (n - i + 1) as f64) / ratio;
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut s = CompensatedSum::default();
    for i in 1..=k {
        s.add(((n - k + i) as f64 / i as f64).ln());
    }
    s.total()
}

pub fn uniform_nodes(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

/// Nodes `t_{n,k}^j` of the AKR operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AkrNodes {
    pub n: usize,
    pub j: u32,
    pub nodes: Vec<f64>,
}

/// Falling factorial `k (k-1) ⋯ (k-j+1)`, exact, with overflow detection.
pub fn falling_factorial(k: usize, j: u32) -> Result<u128> {
    let mut p: u128 = 1;
    for r in 0..j as usize {
        if k < r {
            return Ok(0);
        }
        p = p
            .checked_mul((k - r) as u128)
            .ok_or_else(|| Error::Overflow(format!("falling factorial {k}_({j})")))?;
    }
    Ok(p)
}

/// `t_{n,k}^j = (k(k-1)⋯(k-j+1) / n(n-1)⋯(n-j+1))^{1/j}`, with the integer
/// products formed exactly before the single floating-point root.
pub fn akr_nodes(n: usize, j: u32) -> Result<AkrNodes> {
    check_exponent(j)?;
    if n < j as usize {
        return Err(Error::precondition(format!("n must be ≥ j (n = {n}, j = {j})")));
    }
    let den = falling_factorial(n, j)?;
    let mut nodes = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let num = falling_factorial(k, j)?;
        let t = if num == 0 {
            0.0
        } else if num == den {
            1.0
        } else {
            (num as f64 / den as f64).powf(1.0 / j as f64)
        };
        nodes.push(t);
    }
    Ok(AkrNodes { n, j, nodes })
}

/// A polynomial in Bernstein form on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinPolynomial {
    pub coeffs: Vec<f64>,
}

impl BernsteinPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit("x", x)?;
        let mut basis = vec![0.0; self.coeffs.len()];
        fill_basis(self.degree(), x, &mut basis);
        Ok(dot(&self.coeffs, &basis))
    }

    /// Evaluation at many points reusing one basis buffer.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let mut basis = vec![0.0; self.coeffs.len()];
        xs.iter()
            .map(|&x| {
                check_unit("x", x)?;
                fill_basis(self.degree(), x, &mut basis);
                Ok(dot(&self.coeffs, &basis))
            })
            .collect()
    }

    /// Independent evaluation by repeated convex combination.
    pub fn eval_de_casteljau(&self, x: f64) -> f64 {
        de_casteljau(&self.coeffs, x)
    }
}

pub fn de_casteljau(coeffs: &[f64], x: f64) -> f64 {
    let mut b = coeffs.to_vec();
    let n = b.len();
    for r in 1..n {
        for i in 0..n - r {
            b[i] = (1.0 - x) * b[i] + x * b[i + 1];
        }
    }
    b[0]
}

/// A tensor-product polynomial with coefficients `c[i][k]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorPolynomial {
    pub n: usize,
    pub m: usize,
    pub coeffs: Vec<f64>,
}

impl TensorPolynomial {
    fn coeff(&self, i: usize, k: usize) -> f64 {
        self.coeffs[i * (self.m + 1) + k]
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit("x", x)?;
        check_unit("y", y)?;
        let px = basis_vec(self.n, x);
        let py = basis_vec(self.m, y);
        let mut s = CompensatedSum::default();
        for (i, &pi) in px.iter().enumerate() {
            let mut row = CompensatedSum::default();
            for (k, &pk) in py.iter().enumerate() {
                row.add(self.coeff(i, k) * pk);
            }
            s.add(pi * row.total());
        }
        Ok(s.total())
    }

    /// Values on the Cartesian grid `xs × ys`, indexed `[ix][iy]`.
    pub fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>> {
        for &x in xs {
            check_unit("x", x)?;
        }
        for &y in ys {
            check_unit("y", y)?;
        }
        let py: Vec<Vec<f64>> = ys.iter().map(|&y| basis_vec(self.m, y)).collect();
        let mut px = vec![0.0; self.n + 1];
        let mut collapsed = vec![0.0; self.m + 1];
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            fill_basis(self.n, x, &mut px);
            for (k, c) in collapsed.iter_mut().enumerate() {
                let mut s = CompensatedSum::default();
                for (i, &pi) in px.iter().enumerate() {
                    s.add(pi * self.coeff(i, k));
                }
                *c = s.total();
            }
            out.push(py.iter().map(|b| dot(&collapsed, b)).collect());
        }
        Ok(out)
    }
}

fn basis_vec(n: usize, x: f64) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    fill_basis(n, x, &mut v);
    v
}

/// Samples `f` at the operator's nodes, giving the Bernstein coefficients of the image.
pub fn apply_1d(f: &ScalarFunction, spec: &OperatorSpec) -> Result<BernsteinPolynomial> {
    if spec.is_bivariate() {
        return Err(Error::precondition(format!("{spec} is a bivariate operator")));
    }
    let coeffs = spec
        .nodes_x()?
        .into_iter()
        .map(|t| f.value(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(BernsteinPolynomial { coeffs })
}

pub fn apply_2d(f: &BivariateFunction, spec: &OperatorSpec) -> Result<TensorPolynomial> {
    let m = spec
        .m
        .ok_or_else(|| Error::precondition(format!("{spec} is a univariate operator")))?;
    let tx = spec.nodes_x()?;
    let ty = spec.nodes_y()?;
    let mut coeffs = Vec::with_capacity(tx.len() * ty.len());
    for &a in &tx {
        for &b in &ty {
            coeffs.push(f.value(a, b)?);
        }
    }
    Ok(TensorPolynomial { n: spec.n, m, coeffs })
}

/// `B_n(f; x) = Σ f(i/n) p_{n,i}(x)`.
pub fn eval_bernstein(f: &ScalarFunction, n: usize, x: f64) -> Result<f64> {
    apply_1d(f, &OperatorSpec::bernstein(n))?.eval(x)
}

/// `B_{n,j}(f; x) = Σ f(t_{n,k}^j) p_{n,k}(x)`.
pub fn eval_akr(f: &ScalarFunction, n: usize, j: u32, x: f64) -> Result<f64> {
    apply_1d(f, &OperatorSpec::akr(n, j))?.eval(x)
}

pub fn eval_bernstein_2d(f: &BivariateFunction, n: usize, m: usize, x: f64, y: f64) -> Result<f64> {
    apply_2d(f, &OperatorSpec::bernstein_2d(n, m))?.eval(x, y)
}

pub fn eval_akr_2d(f: &BivariateFunction, n: usize, m: usize, j: u32, x: f64, y: f64) -> Result<f64> {
    apply_2d(f, &OperatorSpec::akr_2d(n, m, j))?.eval(x, y)
}

/// Nodes and positive weights of `Σ f(t_k) α_k p_{n,k}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedOperatorSpec {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GeneralizedOperatorSpec {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.is_empty() {
            return Err(Error::LengthMismatch("operator needs at least one node".into()));
        }
        for &t in &nodes {
            check_unit("node", t)?;
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::precondition(format!("weights must be strictly positive, got {w}")));
        }
        Ok(Self { nodes, weights })
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

pub fn eval_generalized(f: &ScalarFunction, spec: &GeneralizedOperatorSpec, x: f64) -> Result<f64> {
    let basis = bernstein_basis(spec.degree(), x)?;
    let mut s = CompensatedSum::default();
    for ((t, w), p) in spec.nodes.iter().zip(&spec.weights).zip(&basis) {
        s.add(f.value(*t)? * w * p);
    }
    Ok(s.total())
}
