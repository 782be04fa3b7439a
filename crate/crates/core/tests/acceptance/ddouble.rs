//! Double-double arithmetic (about 32 significant digits), enough to run
//! central differences on expressions whose closed forms cancel badly in f64.

use std::f64::consts;
use std::ops::{Add, Div, Mul, Neg, Sub};

use akr_core::calculus::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd { hi: consts::LN_2, lo: 2.3190468138462996e-17 };
const FRAC_PI_2: Dd = Dd { hi: consts::FRAC_PI_2, lo: 6.123233995736766e-17 };

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub fn new(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    fn scale(self, p: f64) -> Self {
        Dd { hi: self.hi * p, lo: self.lo * p }
    }

    fn powi(self, mut k: i64) -> Self {
        let invert = k < 0;
        k = k.abs();
        let (mut acc, mut base) = (Dd::new(1.0), self);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        if invert {
            Dd::new(1.0) / acc
        } else {
            acc
        }
    }

    // Taylor series on |r| <= pi/4.
    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r * r;
        let (mut s, mut c) = (r, Dd::new(1.0));
        let (mut ts, mut tc) = (r, Dd::new(1.0));
        for i in 1..30 {
            let k = 2.0 * i as f64;
            ts = -(ts * r2) / Dd::new(k * (k + 1.0));
            tc = -(tc * r2) / Dd::new((k - 1.0) * k);
            s = s + ts;
            c = c + tc;
            if ts.hi.abs() < 1e-34 && tc.hi.abs() < 1e-34 {
                break;
            }
        }
        (s, c)
    }

    fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / FRAC_PI_2.hi).round();
        let (s, c) = Self::sin_cos_reduced(self - FRAC_PI_2 * Dd::new(k));
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + -b
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let p = self.hi * b.hi;
        let e = self.hi.mul_add(b.hi, -p) + (self.hi * b.lo + self.lo * b.hi);
        quick_two_sum(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::new(q2);
        let q3 = r.hi / b.hi;
        quick_two_sum(q1, q2) + Dd::new(q3)
    }
}

impl Real for Dd {
    fn lift(v: f64) -> Self {
        Dd::new(v)
    }
    fn primal(self) -> f64 {
        self.hi
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }
    fn exp(self) -> Self {
        let k = (self.hi / LN2.hi).round();
        // exp(r) - 1 on r / 1024, then undo the halving with e -> 2e + e^2.
        let r = (self - LN2 * Dd::new(k)).scale(1.0 / 1024.0);
        let (mut em1, mut term) = (r, r);
        for i in 2..20 {
            term = term * r / Dd::new(i as f64);
            em1 = em1 + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            em1 = em1.scale(2.0) + em1 * em1;
        }
        (em1 + Dd::new(1.0)).scale(2f64.powi(k as i32))
    }
    fn ln(self) -> Self {
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::new(1.0);
        }
        y
    }
    fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return Dd::new(0.0);
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = Dd::new(self.hi * x);
        ax + Dd::new((self - ax * ax).hi * x * 0.5)
    }
    fn powf(self, p: f64) -> Self {
        if p.fract() == 0.0 && p.abs() < 1e9 {
            self.powi(p as i64)
        } else if self.hi == 0.0 {
            Dd::new(0.0)
        } else {
            (self.ln() * Dd::new(p)).exp()
        }
    }
    fn pow(self, e: Self) -> Self {
        if e.lo == 0.0 {
            self.powf(e.hi)
        } else {
            (self.ln() * e).exp()
        }
    }
    fn is_constant(self) -> bool {
        true
    }
}

fn close(a: Dd, b: Dd) -> bool {
    (a - b).hi.abs() < 1e-30 * b.hi.abs().max(1.0)
}

/// Checks e, ln 10, sin/cos at pi/4 and sqrt 2 against their double-double
/// expansions.
pub fn self_check() -> Result<(), String> {
    let e = Dd { hi: consts::E, lo: 1.4456468917292502e-16 };
    let ln10 = Dd { hi: consts::LN_10, lo: -2.1707562233822494e-16 };
    let (s, c) = FRAC_PI_2.scale(0.5).sin_cos();
    let r = Dd::new(2.0).sqrt();
    let checks = [
        ("exp(1)", close(Dd::new(1.0).exp(), e)),
        ("ln(10)", close(Dd::new(10.0).ln(), ln10)),
        ("sin^2 + cos^2", close(s * s + c * c, Dd::new(1.0))),
        ("sin = cos at pi/4", close(s, c)),
        ("sqrt(2)^2", close(r * r, Dd::new(2.0))),
        ("tan(pi/4)", close(FRAC_PI_2.scale(0.5).tan(), Dd::new(1.0))),
    ];
    match checks.iter().find(|c| !c.1) {
        Some((name, _)) => Err(format!("double-double {name} is inaccurate")),
        None => Ok(()),
    }
}
