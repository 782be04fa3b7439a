//! Second-order forward-mode differentiation.
//!
//! A [`Dual2`] carries a value together with its first and second derivative
//! with respect to a single seeded variable. Every elementary function is
//! propagated through the second-order chain rule
//! `(g∘u)'' = g''(u)·u'² + g'(u)·u''`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Dual2 {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    /// A quantity independent of the seeded variable.
    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    /// The seeded variable itself.
    pub const fn variable(value: f64) -> Self {
        Self::new(value, 1.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Applies a scalar function given its value and first two derivatives at `self.value`.
    #[inline]
    pub fn chain(self, g: f64, dg: f64, ddg: f64) -> Self {
        // Skip terms whose coefficient is exactly zero so that 0·∞ never shows up
        // (e.g. the second derivative of x^1 at the origin).
        let d1 = if dg == 0.0 || self.d1 == 0.0 { 0.0 } else { dg * self.d1 };
        let mut d2 = 0.0;
        if ddg != 0.0 && self.d1 != 0.0 {
            d2 += ddg * self.d1 * self.d1;
        }
        if dg != 0.0 && self.d2 != 0.0 {
            d2 += dg * self.d2;
        }
        Self::new(g, d1, d2)
    }
}

impl fmt::Display for Dual2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.value, self.d1, self.d2)
    }
}

impl Add for Dual2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Dual2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Dual2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl Div for Dual2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        // u / v = u · (1/v), with (1/v)' = -v'/v², (1/v)'' = 2v'²/v³ - v''/v².
        let inv = 1.0 / o.value;
        let r = Self::new(
            inv,
            -o.d1 * inv * inv,
            2.0 * o.d1 * o.d1 * inv * inv * inv - o.d2 * inv * inv,
        );
        self * r
    }
}

impl Neg for Dual2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2)
    }
}

/// Scalar arithmetic shared by `f64` and [`Dual2`], so that closed-form
/// functions can be written once and differentiated for free.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn lift(v: f64) -> Self;
    fn primal(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    /// Power with an exponent that does not depend on the variable.
    fn powf(self, p: f64) -> Self;
    /// Power where both base and exponent may vary; needs a positive base
    /// unless the exponent is constant.
    fn pow(self, e: Self) -> Self;
    /// True when the quantity does not depend on the seeded variable.
    fn is_constant(self) -> bool;
}

impl Real for f64 {
    fn lift(v: f64) -> Self {
        v
    }
    fn primal(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        pow_const(self, p)
    }
    fn pow(self, e: Self) -> Self {
        pow_const(self, e)
    }
    fn is_constant(self) -> bool {
        true
    }
}

fn pow_const(base: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        base.powi(p as i32)
    } else {
        base.powf(p)
    }
}

impl Real for Dual2 {
    fn lift(v: f64) -> Self {
        Self::constant(v)
    }
    fn primal(self) -> f64 {
        self.value
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn tan(self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = 1.0 / self.value;
        self.chain(self.value.ln(), inv, -inv * inv)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn powf(self, p: f64) -> Self {
        let v = pow_const(self.value, p);
        let dg = if p == 0.0 { 0.0 } else { p * pow_const(self.value, p - 1.0) };
        let ddg = if p == 0.0 || p == 1.0 {
            0.0
        } else {
            p * (p - 1.0) * pow_const(self.value, p - 2.0)
        };
        self.chain(v, dg, ddg)
    }
    fn pow(self, e: Self) -> Self {
        if e.is_constant() {
            self.powf(e.value)
        } else {
            // a^b = exp(b ln a); a constant base only contributes ln a.
            (e * self.ln()).exp()
        }
    }
    fn is_constant(self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeding() {
        let c = Dual2::constant(3.0);
        assert_eq!((c.d1, c.d2), (0.0, 0.0));
        let v = Dual2::variable(3.0);
        assert_eq!((v.d1, v.d2), (1.0, 0.0));
    }

    #[test]
    fn product_rule_second_order() {
        let u = Dual2::new(2.0, 3.0, 5.0);
        let v = Dual2::new(7.0, 11.0, 13.0);
        let p = u * v;
        assert_eq!(p.value, 14.0);
        assert_eq!(p.d1, 3.0 * 7.0 + 2.0 * 11.0);
        assert_eq!(p.d2, 5.0 * 7.0 + 2.0 * 3.0 * 11.0 + 2.0 * 13.0);
    }

    #[test]
    fn quotient_matches_product_with_reciprocal() {
        let x = Dual2::variable(0.7);
        // 1/x: -1/x², 2/x³
        let r = Dual2::constant(1.0) / x;
        assert!((r.d1 + 1.0 / 0.49).abs() < 1e-12);
        assert!((r.d2 - 2.0 / 0.343).abs() < 1e-12);
    }

    #[test]
    fn power_at_origin_has_no_nan() {
        let x = Dual2::variable(0.0);
        let sq = x.powf(2.0);
        assert_eq!((sq.value, sq.d1, sq.d2), (0.0, 0.0, 2.0));
        let lin = x.powf(1.0);
        assert_eq!((lin.value, lin.d1, lin.d2), (0.0, 1.0, 0.0));
    }

    #[test]
    fn variable_exponent() {
        // 2^x at x = 1: (2, 2 ln2, 2 ln²2)
        let r = Dual2::constant(2.0).pow(Dual2::variable(1.0));
        let l = 2f64.ln();
        assert!((r.value - 2.0).abs() < 1e-14);
        assert!((r.d1 - 2.0 * l).abs() < 1e-14);
        assert!((r.d2 - 2.0 * l * l).abs() < 1e-14);
    }
}
