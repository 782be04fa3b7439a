//! Grid-certified membership tests for the shape classes compared by the
//! operators, and constructions that produce members from generators.
//!
//! A check scans an inequality `margin ≥ 0` over a grid and keeps the most
//! negative margin. Margins in `[-tol, 0)` still count as membership (the
//! extremal functions such as `e_j` sit exactly on the boundary) and are
//! flagged with a note.

use std::fmt;

use serde::Serialize;

use crate::calculus::quad::integrate_1d;
use crate::calculus::{Axis, BivariateFunction, Channel, GridSpec, ScalarFunction};
use crate::error::{check_unit, Error, ErrorKind, Result};

pub const DEFAULT_POINTS_1D: usize = 501;
pub const DEFAULT_POINTS_2D: usize = 101;
/// Points per axis of the sub-grid used for determinant triples.
pub const HAAR_SUBGRID: usize = 25;

/// Where derivative limits at the origin are sampled.
const LIMIT_X: f64 = 1e-6;
const OMEGA_SAMPLES: [f64; 3] = [1e-3, 1e-4, 1e-5];
const OMEGA_STABLE: f64 = 1e-4;
const OUTER_TOL: f64 = 1e-11;
const INNER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Member,
    NonMember,
    /// No violation found, but some grid points could not be evaluated.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Member => "member",
            Verdict::NonMember => "non-member",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: String,
    pub verdict: Verdict,
    /// Most negative value of the tested inequalities over the scan.
    pub min_margin: f64,
    /// Point attaining `min_margin`: `[x]`, `[x, y]` or a triple `[x0, x1, x2]`.
    pub witness: Vec<f64>,
    /// The inequality attaining `min_margin`.
    pub condition: String,
    pub tolerance: f64,
    pub points_scanned: usize,
    pub notes: Vec<String>,
}

impl ClassReport {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }
}

/// Running minimum over margins.
struct Scan {
    class: String,
    tol: f64,
    min: f64,
    witness: Vec<f64>,
    condition: &'static str,
    scanned: usize,
    skipped: usize,
    first_skip: Option<String>,
}

impl Scan {
    fn new(class: impl Into<String>, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) || !tol.is_finite() {
            return Err(Error::precondition(format!("tolerance must be a non-negative number, got {tol}")));
        }
        Ok(Self {
            class: class.into(),
            tol,
            min: f64::INFINITY,
            witness: Vec::new(),
            condition: "",
            scanned: 0,
            skipped: 0,
            first_skip: None,
        })
    }

    fn margin(&mut self, value: f64, at: &[f64], condition: &'static str) {
        if value < self.min || self.witness.is_empty() {
            self.min = value;
            self.witness = at.to_vec();
            self.condition = condition;
        }
    }

    /// Runs `body` at one point; numerical failures are counted, not raised.
    fn point(&mut self, at: &[f64], body: impl FnOnce(&mut Self) -> Result<()>) -> Result<()> {
        self.scanned += 1;
        match body(self) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == ErrorKind::Numerical => {
                self.skipped += 1;
                if self.first_skip.is_none() {
                    self.first_skip = Some(format!("{e} at {at:?}"));
                }
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn finish(self) -> ClassReport {
        let mut notes = Vec::new();
        let verdict = if self.min < -self.tol {
            Verdict::NonMember
        } else if self.skipped > 0 || self.witness.is_empty() {
            Verdict::Inconclusive
        } else {
            Verdict::Member
        };
        if verdict != Verdict::NonMember && self.min < 0.0 {
            notes.push(format!("boundary: margin {:e} lies within tolerance", self.min));
        }
        if self.skipped > 0 {
            notes.push(format!(
                "{} of {} points could not be evaluated; first: {}",
                self.skipped,
                self.scanned,
                self.first_skip.unwrap_or_default()
            ));
        }
        ClassReport {
            class: self.class,
            verdict,
            min_margin: self.min,
            witness: self.witness,
            condition: self.condition.to_string(),
            tolerance: self.tol,
            points_scanned: self.scanned,
            notes,
        }
    }
}

fn check_j(j: u32) -> Result<()> {
    if j < 2 {
        return Err(Error::precondition(format!("class exponent j must be ≥ 2, got {j}")));
    }
    Ok(())
}

fn require_1d(f: &ScalarFunction) -> Result<()> {
    if f.has_derivatives() {
        Ok(())
    } else {
        Err(Error::MissingChannel("derivative"))
    }
}

fn require_2d(f: &BivariateFunction) -> Result<()> {
    if f.has_derivatives() {
        Ok(())
    } else {
        Err(Error::MissingChannel("partial-derivative"))
    }
}

fn grid_1d(grid: &GridSpec) -> Vec<f64> {
    grid.coords()
}

/// `f′ ≥ 0` and `x f″ − (j−1) f′ ≥ 0` on the grid.
pub fn check_kj1(f: &ScalarFunction, j: u32, grid: &GridSpec, tol: f64) -> Result<ClassReport> {
    check_j(j)?;
    require_1d(f)?;
    let jm1 = (j - 1) as f64;
    let mut scan = Scan::new(format!("K_{j}^[1]"), tol)?;
    for x in grid_1d(grid) {
        scan.point(&[x], |s| {
            let (d1, d2) = f.derivatives(x)?;
            s.margin(d1, &[x], "f' >= 0");
            s.margin(x * d2 - jm1 * d1, &[x], "x f'' - (j-1) f' >= 0");
            Ok(())
        })?;
    }
    Ok(scan.finish())
}

/// `f′ ≤ 0` and `f″ ≥ 0` on the grid.
pub fn check_decreasing_convex(f: &ScalarFunction, grid: &GridSpec, tol: f64) -> Result<ClassReport> {
    require_1d(f)?;
    let mut scan = Scan::new("decreasing-convex", tol)?;
    for x in grid_1d(grid) {
        scan.point(&[x], |s| {
            let (d1, d2) = f.derivatives(x)?;
            s.margin(-d1, &[x], "f' <= 0");
            s.margin(d2, &[x], "f'' >= 0");
            Ok(())
        })?;
    }
    Ok(scan.finish())
}

/// Which triples the determinant test visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TripleScan {
    /// All triples of a uniform sub-grid with [`HAAR_SUBGRID`] points.
    #[default]
    Coarse,
    /// All triples of the supplied grid.
    Full,
}

/// `det [f0(xi); f1(xi); f(xi)] ≥ 0` for `x0 < x1 < x2`.
pub fn check_haar_convex(
    f: &ScalarFunction,
    f0: &ScalarFunction,
    f1: &ScalarFunction,
    grid: &GridSpec,
    tol: f64,
    triples: TripleScan,
) -> Result<ClassReport> {
    validate_haar_pair(f0, f1, grid)?;
    let sub = match triples {
        TripleScan::Full => *grid,
        TripleScan::Coarse if grid.points() > HAAR_SUBGRID => GridSpec::line(HAAR_SUBGRID)?,
        TripleScan::Coarse => *grid,
    };
    let xs = sub.coords();
    let rows: Vec<[f64; 3]> = xs
        .iter()
        .map(|&x| Ok([f0.value(x)?, f1.value(x)?, f.value(x)?]))
        .collect::<Result<_>>()?;
    let mut scan = Scan::new(format!("({}, {})-convex", f0.label(), f1.label()), tol)?;
    let n = xs.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let at = [xs[a], xs[b], xs[c]];
                scan.point(&at, |s| {
                    s.margin(det3(&rows[a], &rows[b], &rows[c]), &at, "determinant >= 0");
                    Ok(())
                })?;
            }
        }
    }
    Ok(scan.finish())
}

/// Determinant with columns `p`, `q`, `r`.
pub fn det3(p: &[f64; 3], q: &[f64; 3], r: &[f64; 3]) -> f64 {
    p[0] * (q[1] * r[2] - r[1] * q[2]) - q[0] * (p[1] * r[2] - r[1] * p[2]) + r[0] * (p[1] * q[2] - q[1] * p[2])
}

fn validate_haar_pair(f0: &ScalarFunction, f1: &ScalarFunction, grid: &GridSpec) -> Result<()> {
    let mut prev: Option<(f64, f64)> = None;
    for x in grid.coords() {
        let v0 = f0.value(x)?;
        if !(v0 > 0.0) {
            return Err(Error::HaarPair(format!("f0({x}) = {v0} is not strictly positive")));
        }
        let q = f1.value(x)? / v0;
        if let Some((px, pq)) = prev {
            if !(q > pq) {
                return Err(Error::HaarPair(format!(
                    "f1/f0 is not strictly increasing between x = {px} and x = {x}"
                )));
            }
        }
        prev = Some((x, q));
    }
    Ok(())
}

/// Slice-wise `K_j^[1]` conditions in x and in y.
pub fn check_kj2(f: &BivariateFunction, j: u32, grid: &GridSpec, tol: f64) -> Result<ClassReport> {
    check_j(j)?;
    require_2d(f)?;
    let jm1 = (j - 1) as f64;
    let cs = grid.coords();
    let mut scan = Scan::new(format!("K_{j}^[2]"), tol)?;
    for &x in &cs {
        for &y in &cs {
            scan.point(&[x, y], |s| {
                let (fx, fxx) = f.along(Axis::X, x, y)?;
                let (fy, fyy) = f.along(Axis::Y, x, y)?;
                s.margin(fx, &[x, y], "f_x >= 0");
                s.margin(x * fxx - jm1 * fx, &[x, y], "x f_xx - (j-1) f_x >= 0");
                s.margin(fy, &[x, y], "f_y >= 0");
                s.margin(y * fyy - jm1 * fy, &[x, y], "y f_yy - (j-1) f_y >= 0");
                Ok(())
            })?;
        }
    }
    Ok(scan.finish())
}

/// Residual of `x^(j−1) φ_y = y^(j−1) ψ_x` on the grid; the margin is `−|residual|`.
pub fn check_compatibility(
    phi: &BivariateFunction,
    psi: &BivariateFunction,
    j: u32,
    grid: &GridSpec,
    tol: f64,
) -> Result<ClassReport> {
    check_j(j)?;
    require_2d(phi)?;
    require_2d(psi)?;
    let cs = grid.coords();
    let p = (j - 1) as i32;
    let mut scan = Scan::new("compatible", tol)?;
    for &x in &cs {
        for &y in &cs {
            scan.point(&[x, y], |s| {
                let l = x.powi(p) * phi.d01(x, y)?;
                let r = y.powi(p) * psi.d10(x, y)?;
                s.margin(-(l - r).abs(), &[x, y], "x^(j-1) phi_y = y^(j-1) psi_x");
                Ok(())
            })?;
        }
    }
    Ok(scan.finish())
}

/// A constructed function together with warnings about unverified hypotheses.
#[derive(Debug, Clone)]
pub struct Construction<F> {
    pub function: F,
    pub warnings: Vec<String>,
}

fn exact(channels: &[Channel]) -> Channel {
    if channels.iter().all(|c| matches!(c, Channel::Analytic | Channel::AutoDiff)) {
        Channel::Analytic
    } else {
        Channel::FiniteDifference
    }
}

fn warn_if_negative(warnings: &mut Vec<String>, what: &str, min: (f64, Vec<f64>), tol: f64) {
    if min.0 < -tol {
        warnings.push(format!("{what} is violated: value {:e} at {:?}", min.0, min.1));
    }
}

fn track(slot: &mut (f64, Vec<f64>), v: f64, at: &[f64]) {
    if v < slot.0 {
        *slot = (v, at.to_vec());
    }
}

/// Checks that `x^(j−1) g′(x)` settles as `x → 0`, a surrogate for the limit condition.
fn omega_limit_warning(name: &str, j: u32, d1: impl Fn(f64) -> Result<f64>) -> Option<String> {
    let v: Vec<f64> = match OMEGA_SAMPLES.iter().map(|&x| Ok(x.powi(j as i32 - 1) * d1(x)?)).collect::<Result<_>>() {
        Ok(v) => v,
        Err(e) => return Some(format!("could not sample x^(j-1) {name}' near 0: {e}")),
    };
    let first = (v[1] - v[0]).abs();
    let last = (v[2] - v[1]).abs();
    if last <= OMEGA_STABLE || last <= 0.5 * first {
        None
    } else {
        Some(format!(
            "x^(j-1) {name}'(x) does not settle near 0: {:e}, {:e}, {:e} at x = 1e-3, 1e-4, 1e-5",
            v[0], v[1], v[2]
        ))
    }
}

/// `f(x) = f0 + ∫₀ˣ t^(j−1) φ(t) dt` with `f′ = x^(j−1) φ` and
/// `f″ = (j−1) x^(j−2) φ + x^(j−1) φ′`.
pub fn build_from_phi(phi: &ScalarFunction, j: u32, f0: f64) -> Result<Construction<ScalarFunction>> {
    check_j(j)?;
    require_1d(phi)?;
    let tol = phi.default_tolerance();
    let mut warnings = Vec::new();
    let mut min_v = (f64::INFINITY, vec![]);
    let mut min_d = (f64::INFINITY, vec![]);
    for x in GridSpec::line(DEFAULT_POINTS_1D)?.coords() {
        let (v, d) = (phi.value(x)?, phi.d1(x)?);
        track(&mut min_v, v, &[x]);
        if x > 0.0 {
            track(&mut min_d, d, &[x]);
        }
    }
    warn_if_negative(&mut warnings, "phi >= 0", min_v, tol);
    warn_if_negative(&mut warnings, "phi' >= 0", min_d, tol);
    warnings.extend(omega_limit_warning("phi", j, |x| phi.d1(x)));

    let p = (j - 1) as i32;
    let jm1 = (j - 1) as f64;
    let pv = phi.clone();
    let ps = phi.clone();
    let value = move |x: f64| {
        check_unit("x", x)?;
        Ok(f0 + integrate_1d(|t| Ok(t.powi(p) * pv.value(t)?), 0.0, x, OUTER_TOL)?)
    };
    let slope = move |x: f64| {
        check_unit("x", x)?;
        let d1 = x.powi(p) * ps.value(x)?;
        let s = if x == 0.0 { LIMIT_X } else { x };
        let (v, dv) = (ps.value(s)?, ps.d1(s)?);
        let d2 = jm1 * s.powi(p - 1) * v + s.powi(p) * dv;
        Ok((d1, d2))
    };
    let label = format!("from_phi[{}; j={j}]", phi.label());
    Ok(Construction {
        function: ScalarFunction::from_channels(label, value, slope, exact(&[phi.channel()])),
        warnings,
    })
}

fn scan_2d(grid: &GridSpec, mut body: impl FnMut(f64, f64) -> Result<()>) -> Result<()> {
    let cs = grid.coords();
    for &x in &cs {
        for &y in &cs {
            body(x, y)?;
        }
    }
    Ok(())
}

/// `f(x, y) = ∫₀ˣ t^(j−1) φ(t, y) dt + ∫₀ʸ s^(j−1) ψ(0, s) ds`.
///
/// Fails unless the compatibility identity holds on the default 2-D grid.
pub fn build_from_phi_psi(phi: &BivariateFunction, psi: &BivariateFunction, j: u32) -> Result<Construction<BivariateFunction>> {
    build_phi_psi(phi, psi, j, true)
}

fn build_phi_psi(
    phi: &BivariateFunction,
    psi: &BivariateFunction,
    j: u32,
    sign_scan: bool,
) -> Result<Construction<BivariateFunction>> {
    check_j(j)?;
    require_2d(phi)?;
    require_2d(psi)?;
    let grid = GridSpec::square(DEFAULT_POINTS_2D)?;
    let tol = phi.default_tolerance().max(psi.default_tolerance());
    let compat = check_compatibility(phi, psi, j, &grid, tol)?;
    let mut warnings = Vec::new();
    match compat.verdict {
        Verdict::NonMember => {
            return Err(Error::precondition(format!(
                "compatibility condition fails: residual {:e} at {:?}",
                -compat.min_margin, compat.witness
            )))
        }
        Verdict::Inconclusive => warnings.push(format!("compatibility check inconclusive: {}", compat.notes.join("; "))),
        Verdict::Member => {}
    }

    if sign_scan {
        let mut mins = [(); 4].map(|_| (f64::INFINITY, vec![]));
        scan_2d(&grid, |x, y| {
            track(&mut mins[0], phi.value(x, y)?, &[x, y]);
            track(&mut mins[1], phi.d10(x, y)?, &[x, y]);
            track(&mut mins[2], psi.value(x, y)?, &[x, y]);
            track(&mut mins[3], psi.d01(x, y)?, &[x, y]);
            Ok(())
        })?;
        for (name, m) in ["phi >= 0", "phi_x >= 0", "psi >= 0", "psi_y >= 0"].iter().zip(mins) {
            warn_if_negative(&mut warnings, name, m, tol);
        }
    }

    let p = (j - 1) as i32;
    let jm1 = (j - 1) as f64;
    let (pv, qv) = (phi.clone(), psi.clone());
    let value = move |x: f64, y: f64| {
        check_unit("x", x)?;
        check_unit("y", y)?;
        let a = integrate_1d(|t| Ok(t.powi(p) * pv.value(t, y)?), 0.0, x, OUTER_TOL)?;
        let b = integrate_1d(|s| Ok(s.powi(p) * qv.value(0.0, s)?), 0.0, y, OUTER_TOL)?;
        Ok(a + b)
    };
    let (pp, qp) = (phi.clone(), psi.clone());
    let partials = move |x: f64, y: f64, axis: Axis| {
        check_unit("x", x)?;
        check_unit("y", y)?;
        // f_x = x^(j-1) φ(x, y) and f_y = y^(j-1) ψ(x, y); second partials by the product rule.
        let (g, t) = match axis {
            Axis::X => (&pp, x),
            Axis::Y => (&qp, y),
        };
        let at = |t: f64| match axis {
            Axis::X => (t, y),
            Axis::Y => (x, t),
        };
        let (gx, gy) = at(t);
        let d1 = t.powi(p) * g.value(gx, gy)?;
        let s = if t == 0.0 { LIMIT_X } else { t };
        let (sx, sy) = at(s);
        let d2 = jm1 * s.powi(p - 1) * g.value(sx, sy)? + s.powi(p) * g.along(axis, sx, sy)?.0;
        Ok((d1, d2))
    };
    let label = format!("from_phi_psi[{}; {}; j={j}]", phi.label(), psi.label());
    Ok(Construction {
        function: BivariateFunction::from_channels(label, value, partials, exact(&[phi.channel(), psi.channel()])),
        warnings,
    })
}

/// The generators `φ(x, y) = ∫₀ʸ s^(j−1) τ(x, s) ds` and `ψ(x, y) = ∫₀ˣ t^(j−1) τ(t, y) dt`.
pub fn tau_generators(tau: &BivariateFunction, j: u32) -> Result<(BivariateFunction, BivariateFunction)> {
    check_j(j)?;
    require_2d(tau)?;
    let p = (j - 1) as i32;
    let jm1 = (j - 1) as f64;
    let channel = exact(&[tau.channel()]);

    // Integrates s^(j-1) times a channel of τ up to `upper`, the other coordinate fixed. Values
    // are integrated again by the construction and need the tighter tolerance; partials do not.
    fn moment(
        tau: &BivariateFunction,
        p: i32,
        tol: f64,
        upper: f64,
        point: impl Fn(f64) -> (f64, f64),
        g: impl Fn(&BivariateFunction, f64, f64) -> Result<f64>,
    ) -> Result<f64> {
        integrate_1d(
            |s| {
                let (a, b) = point(s);
                Ok(s.powi(p) * g(tau, a, b)?)
            },
            0.0,
            upper,
            tol,
        )
    }

    let t1 = tau.clone();
    let t2 = tau.clone();
    let phi = BivariateFunction::from_channels(
        format!("phi[{}]", tau.label()),
        move |x, y| moment(&t1, p, INNER_TOL, y, |s| (x, s), |t, a, b| t.value(a, b)),
        move |x, y, axis| match axis {
            Axis::X => Ok((
                moment(&t2, p, OUTER_TOL, y, |s| (x, s), |t, a, b| t.d10(a, b))?,
                moment(&t2, p, OUTER_TOL, y, |s| (x, s), |t, a, b| t.d20(a, b))?,
            )),
            Axis::Y => {
                let (v, (d, _)) = (t2.value(x, y)?, t2.along(Axis::Y, x, y)?);
                Ok((y.powi(p) * v, jm1 * y.powi(p - 1) * v + y.powi(p) * d))
            }
        },
        channel,
    );
    let t3 = tau.clone();
    let t4 = tau.clone();
    let psi = BivariateFunction::from_channels(
        format!("psi[{}]", tau.label()),
        move |x, y| moment(&t3, p, INNER_TOL, x, |t| (t, y), |t, a, b| t.value(a, b)),
        move |x, y, axis| match axis {
            Axis::Y => Ok((
                moment(&t4, p, OUTER_TOL, x, |t| (t, y), |t, a, b| t.d01(a, b))?,
                moment(&t4, p, OUTER_TOL, x, |t| (t, y), |t, a, b| t.d02(a, b))?,
            )),
            Axis::X => {
                let (v, (d, _)) = (t4.value(x, y)?, t4.along(Axis::X, x, y)?);
                Ok((x.powi(p) * v, jm1 * x.powi(p - 1) * v + x.powi(p) * d))
            }
        },
        channel,
    );
    Ok((phi, psi))
}

/// `f(x, y) = ∫₀ˣ∫₀ʸ t^(j−1) s^(j−1) τ(t, s) ds dt`, built through [`tau_generators`].
pub fn build_from_tau(tau: &BivariateFunction, j: u32) -> Result<Construction<BivariateFunction>> {
    let (phi, psi) = tau_generators(tau, j)?;
    let tol = tau.default_tolerance();
    let mut mins = [(); 3].map(|_| (f64::INFINITY, vec![]));
    scan_2d(&GridSpec::square(DEFAULT_POINTS_2D)?, |x, y| {
        let (tx, ty) = (tau.d10(x, y)?, tau.d01(x, y)?);
        track(&mut mins[0], tau.value(x, y)?, &[x, y]);
        track(&mut mins[1], tx, &[x, y]);
        track(&mut mins[2], ty, &[x, y]);
        Ok(())
    })?;
    let mut warnings = Vec::new();
    for (name, m) in ["tau >= 0", "tau_x >= 0", "tau_y >= 0"].iter().zip(mins) {
        warn_if_negative(&mut warnings, name, m, tol);
    }
    // The τ conditions imply the sign conditions on φ and ψ, so only compatibility is rechecked.
    let mut built = build_phi_psi(&phi, &psi, j, false)?;
    warnings.append(&mut built.warnings);
    built.warnings = warnings;
    Ok(built)
}

/// `f(x, y) = ω(a(x^j), b(y^j))` with chain-rule partials.
pub fn method_i_compose(
    omega: &BivariateFunction,
    a: &ScalarFunction,
    b: &ScalarFunction,
    j: u32,
) -> Result<Construction<BivariateFunction>> {
    check_j(j)?;
    require_2d(omega)?;
    require_1d(a)?;
    require_1d(b)?;
    let mut warnings = Vec::new();
    let grid1 = GridSpec::line(DEFAULT_POINTS_1D)?;
    for (name, g) in [("a", a), ("b", b)] {
        let mut m1 = (f64::INFINITY, vec![]);
        let mut m2 = (f64::INFINITY, vec![]);
        for x in grid1.coords() {
            let (d1, d2) = g.derivatives(x)?;
            track(&mut m1, d1, &[x]);
            track(&mut m2, d2, &[x]);
        }
        warn_if_negative(&mut warnings, &format!("{name}' >= 0"), m1, g.default_tolerance());
        warn_if_negative(&mut warnings, &format!("{name}'' >= 0"), m2, g.default_tolerance());
    }
    let mut mins = [(); 4].map(|_| (f64::INFINITY, vec![]));
    scan_2d(&GridSpec::square(DEFAULT_POINTS_2D)?, |u, v| {
        let (wu, wuu) = omega.along(Axis::X, u, v)?;
        let (wv, wvv) = omega.along(Axis::Y, u, v)?;
        for (slot, val) in mins.iter_mut().zip([wu, wuu, wv, wvv]) {
            track(slot, val, &[u, v]);
        }
        Ok(())
    })?;
    for (name, m) in ["omega_u >= 0", "omega_uu >= 0", "omega_v >= 0", "omega_vv >= 0"].iter().zip(mins) {
        warn_if_negative(&mut warnings, name, m, omega.default_tolerance());
    }

    let jf = j as f64;
    let p = j as i32;
    let (w1, a1, b1) = (omega.clone(), a.clone(), b.clone());
    let value = move |x: f64, y: f64| w1.value(a1.value(x.powi(p))?, b1.value(y.powi(p))?);
    let (w2, a2, b2) = (omega.clone(), a.clone(), b.clone());
    let partials = move |x: f64, y: f64, axis: Axis| {
        let (inner, t) = match axis {
            Axis::X => (&a2, x),
            Axis::Y => (&b2, y),
        };
        let tj = t.powi(p);
        let (g1, g2) = inner.derivatives(tj)?;
        // d/dt of t^j and its second derivative
        let (e1, e2) = (jf * t.powi(p - 1), jf * (jf - 1.0) * t.powi(p - 2));
        let u1 = g1 * e1;
        let u2 = g2 * e1 * e1 + g1 * e2;
        let (u, v) = (a2.value(x.powi(p))?, b2.value(y.powi(p))?);
        let (w1, w2) = w2.along(axis, u, v)?;
        Ok((w1 * u1, w2 * u1 * u1 + w1 * u2))
    };
    let label = format!("omega[{}]({}(x^{j}), {}(y^{j}))", omega.label(), a.label(), b.label());
    Ok(Construction {
        function: BivariateFunction::from_channels(
            label,
            value,
            partials,
            exact(&[omega.channel(), a.channel(), b.channel()]),
        ),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::f64::consts::{E, PI};

    fn line() -> GridSpec {
        GridSpec::line(DEFAULT_POINTS_1D).unwrap()
    }

    fn square(p: usize) -> GridSpec {
        GridSpec::square(p).unwrap()
    }

    fn uni(s: &str) -> ScalarFunction {
        ScalarFunction::parse(s).unwrap()
    }

    fn bi(s: &str) -> BivariateFunction {
        BivariateFunction::parse(s).unwrap()
    }

    #[test]
    fn kj1_examples() {
        let r = check_kj1(&uni("x^3"), 3, &line(), 1e-9).unwrap();
        assert!(r.is_member());
        assert!(r.min_margin.abs() < 1e-12);

        let r = check_kj1(&uni("x"), 2, &line(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::NonMember);
        assert_eq!(r.min_margin, -1.0);
        assert_eq!(r.condition, "x f'' - (j-1) f' >= 0");

        assert!(check_kj1(&catalog::example_3_1(), 2, &line(), 1e-9).unwrap().is_member());
        assert!(check_kj1(&catalog::example_3_2(), 5, &line(), 1e-9).unwrap().is_member());
    }

    #[test]
    fn kj1_preconditions() {
        assert!(check_kj1(&uni("x^2"), 1, &line(), 1e-9).is_err());
        let vo = ScalarFunction::value_only("v", |x| x * x);
        assert!(matches!(check_kj1(&vo, 2, &line(), 1e-9), Err(Error::MissingChannel(_))));
    }

    #[test]
    fn boundary_margins_are_flagged() {
        let f = ScalarFunction::with_derivatives("nudged", |x| x * x, |x| 2.0 * x, |_| 2.0 - 1e-10);
        let r = check_kj1(&f, 2, &line(), 1e-9).unwrap();
        assert!(r.is_member());
        assert!(r.notes.iter().any(|n| n.starts_with("boundary")));
    }

    #[test]
    fn numerical_failures_make_the_scan_inconclusive() {
        let f = ScalarFunction::from_channels(
            "half",
            |x| Ok(x * x),
            |x| {
                if x < 0.5 {
                    Err(Error::NonFinite { context: "test".into(), value: f64::NAN })
                } else {
                    Ok((2.0 * x, 2.0))
                }
            },
            Channel::Analytic,
        );
        let r = check_kj1(&f, 2, &line(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.points_scanned, DEFAULT_POINTS_1D);
        assert!(r.notes[0].starts_with("250 of 501"));
    }

    #[test]
    fn decreasing_convex_examples() {
        assert!(check_decreasing_convex(&catalog::example_3_4(), &line(), 1e-9).unwrap().is_member());
        assert_eq!(
            check_decreasing_convex(&uni("x"), &line(), 1e-9).unwrap().verdict,
            Verdict::NonMember
        );
        let r = check_decreasing_convex(&uni("1 - x"), &line(), 1e-9).unwrap();
        assert!(r.is_member());
        assert_eq!(r.min_margin, 0.0);
    }

    #[test]
    fn haar_examples() {
        let one = uni("1");
        let (e1, e2) = (uni("x"), uni("x^2"));
        let r = check_haar_convex(&e2, &one, &e1, &line(), 1e-9, TripleScan::Coarse).unwrap();
        assert!(r.is_member());
        assert_eq!(r.points_scanned, 2300);

        let r = check_haar_convex(&e1, &one, &e1, &line(), 1e-9, TripleScan::Coarse).unwrap();
        assert!(r.is_member());
        assert!(r.min_margin.abs() < 1e-15);

        let r = check_haar_convex(&e1, &one, &e2, &line(), 1e-9, TripleScan::Coarse).unwrap();
        assert_eq!(r.verdict, Verdict::NonMember);
        // columns (1, x, x^2 ... ) at the triple (0, 1/4, 1) with f = e1, f1 = e2: 1/16 - 1/4
        let hand = det3(&[1.0, 0.0, 0.0], &[1.0, 0.0625, 0.25], &[1.0, 1.0, 1.0]);
        assert_eq!(hand, -0.1875);
        assert!(r.min_margin <= hand);
    }

    #[test]
    fn haar_pair_preconditions() {
        let r = check_haar_convex(&uni("x"), &uni("x"), &uni("x^2"), &line(), 1e-9, TripleScan::Coarse);
        assert!(matches!(r, Err(Error::HaarPair(_))));
        let r = check_haar_convex(&uni("x"), &uni("1"), &uni("1 - x"), &line(), 1e-9, TripleScan::Coarse);
        assert!(matches!(r, Err(Error::HaarPair(_))));
    }

    #[test]
    fn haar_full_scan_on_small_grid() {
        let g = GridSpec::line(40).unwrap();
        let r = check_haar_convex(&uni("x^2"), &uni("1"), &uni("x"), &g, 1e-9, TripleScan::Full).unwrap();
        assert_eq!(r.points_scanned, 40 * 39 * 38 / 6);
        assert!(r.is_member());
    }

    #[test]
    fn build_from_phi_examples() {
        let c = build_from_phi(&uni("sin(pi*x/2)"), 2, 0.0).unwrap();
        assert!(c.warnings.is_empty(), "{:?}", c.warnings);
        let f = c.function;
        assert!((f.value(1.0).unwrap() - 4.0 / (PI * PI)).abs() < 1e-10);
        let exact = catalog::example_3_1();
        for x in [0.0, 0.3, 0.8] {
            assert!((f.value(x).unwrap() - exact.value(x).unwrap()).abs() < 1e-10);
            let (a, b) = (f.derivatives(x).unwrap(), exact.derivatives(x).unwrap());
            assert!((a.0 - b.0).abs() < 1e-14);
            assert!((a.1 - b.1).abs() < 1e-5);
        }

        let f = build_from_phi(&uni("0*x"), 3, 1.5).unwrap().function;
        assert_eq!(f.value(0.7).unwrap(), 1.5);

        let f = build_from_phi(&uni("exp(x)"), 5, 0.0).unwrap().function;
        assert!((f.value(1.0).unwrap() - (9.0 * E - 24.0)).abs() < 1e-10);
    }

    #[test]
    fn build_from_phi_warns_outside_omega() {
        let c = build_from_phi(&uni("1 - x"), 2, 0.0).unwrap();
        assert!(c.warnings.iter().any(|w| w.contains("phi' >= 0")));
        // x φ'(x) = -1/x has no limit at 0
        let c = build_from_phi(&uni("1/(x + 1e-9)"), 2, 0.0).unwrap();
        assert!(c.warnings.iter().any(|w| w.contains("does not settle")));
    }

    #[test]
    fn kj2_examples() {
        let g = square(DEFAULT_POINTS_2D);
        let r = check_kj2(&bi("x^3 + y^3"), 3, &g, 1e-9).unwrap();
        assert!(r.is_member());
        assert!(r.min_margin.abs() < 1e-12);
        assert_eq!(check_kj2(&bi("x + y"), 2, &g, 1e-9).unwrap().verdict, Verdict::NonMember);
        assert!(check_kj2(&catalog::example_4_4(), 2, &g, 1e-9).unwrap().is_member());
    }

    #[test]
    fn compatibility_examples() {
        let g = square(DEFAULT_POINTS_2D);
        let h = bi("x^3 + y^3");
        let r = check_compatibility(&h, &h, 3, &g, 1e-9).unwrap();
        assert!(r.is_member());
        assert!(r.min_margin.abs() < 1e-14);

        let phi = bi("2*y^2*exp(x^2*y^2)");
        let psi = bi("2*x^2*exp(x^2*y^2)");
        assert!(check_compatibility(&phi, &psi, 2, &g, 1e-9).unwrap().is_member());

        let r = check_compatibility(&bi("y + 0*x"), &bi("0*x*y"), 2, &g, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::NonMember);
        assert_eq!(r.min_margin, -1.0);
    }

    #[test]
    fn build_from_phi_psi_examples() {
        let phi = bi("2*y^2*exp(x^2*y^2)");
        let psi = bi("2*x^2*exp(x^2*y^2)");
        let c = build_from_phi_psi(&phi, &psi, 2).unwrap();
        assert!(c.warnings.is_empty(), "{:?}", c.warnings);
        let f = c.function;
        assert!((f.value(1.0, 1.0).unwrap() - (E - 1.0)).abs() < 1e-10);
        let g = catalog::example_4_4();
        for (x, y) in [(0.3, 0.7), (0.9, 0.2), (0.0, 0.5)] {
            for axis in [Axis::X, Axis::Y] {
                let (a, b) = (f.along(axis, x, y).unwrap(), g.along(axis, x, y).unwrap());
                assert!((a.0 - b.0).abs() < 1e-13 && (a.1 - b.1).abs() < 1e-5, "{axis:?} at ({x}, {y})");
            }
        }

        let zero = bi("0*x*y");
        assert_eq!(build_from_phi_psi(&zero, &zero, 2).unwrap().function.value(0.4, 0.6).unwrap(), 0.0);

        let h = bi("x^3 + y^3");
        let f = build_from_phi_psi(&h, &h, 3).unwrap().function;
        let (x, y) = (0.6, 0.9);
        let s: f64 = x * x * x + y * y * y;
        assert!((f.value(x, y).unwrap() - s * s / 6.0).abs() < 1e-10);
    }

    #[test]
    fn build_from_phi_psi_rejects_incompatible_pairs() {
        let e = build_from_phi_psi(&bi("y + 0*x"), &bi("0*x*y"), 2).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::Precondition);
    }

    #[test]
    fn build_from_tau_examples() {
        let f = build_from_tau(&bi("1 + 0*x*y"), 2).unwrap().function;
        assert!((f.value(1.0, 1.0).unwrap() - 0.25).abs() < 1e-10);
        assert!((f.value(0.5, 0.8).unwrap() - 0.25 * 0.64 / 4.0).abs() < 1e-10);

        let c = build_from_tau(&bi("sin(pi*(x+y)/4)"), 2).unwrap();
        assert!(c.warnings.is_empty(), "{:?}", c.warnings);
        let closed = catalog::example_4_6();
        for (x, y) in [(1.0, 1.0), (0.4, 0.7)] {
            assert!((c.function.value(x, y).unwrap() - closed.value(x, y).unwrap()).abs() < 1e-10);
        }

        let f = build_from_tau(&bi("4*(1 + x^2*y^2)*exp(x^2*y^2)"), 2).unwrap().function;
        assert!((f.value(0.8, 0.9).unwrap() - ((0.72f64).powi(2).exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn method_i_examples() {
        let id = uni("x");
        let f = method_i_compose(&bi("x + y"), &id, &id, 2).unwrap().function;
        assert!((f.value(0.3, 0.4).unwrap() - 0.25).abs() < 1e-15);

        let c = method_i_compose(&bi("tan(pi*x*y/4)"), &uni("2^x - 1"), &uni("x^3"), 2).unwrap();
        assert!(c.warnings.is_empty(), "{:?}", c.warnings);
        let ex = match catalog::lookup("ex4.5", 2).unwrap() {
            crate::calculus::AnyFunction::Bivariate(f) => f,
            _ => unreachable!(),
        };
        for (x, y) in [(0.2, 0.9), (0.7, 0.5), (1.0, 1.0)] {
            assert!((c.function.value(x, y).unwrap() - ex.value(x, y).unwrap()).abs() < 1e-14);
            for axis in [Axis::X, Axis::Y] {
                let (a, b) = (c.function.along(axis, x, y).unwrap(), ex.along(axis, x, y).unwrap());
                assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-11);
            }
        }

        let f = method_i_compose(&bi("x*y"), &id, &id, 2).unwrap().function;
        assert!((f.value(0.5, 0.5).unwrap() - 0.0625).abs() < 1e-15);
        assert!(check_kj2(&f, 2, &square(DEFAULT_POINTS_2D), 1e-9).unwrap().is_member());
    }
}
