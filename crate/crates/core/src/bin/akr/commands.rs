use akr_core::bounds::{self, BoundKind, BoundReport};
use akr_core::calculus::{AnyFunction, GridSpec, ScalarFunction};
use akr_core::catalog;
use akr_core::classes::{self, ClassReport, TripleScan};
use akr_core::experiments::{self, ChainKind, NormKind, PRINTED_3_1, PRINTED_4_4};
use akr_core::operators::{apply_1d, apply_2d, OperatorSpec};
use akr_core::table::{Cell, Table};
use akr_core::voronovskaja::{self, LimitProbe};
use akr_core::{Error, Result};

use crate::args::*;

const FIGURE_DEFAULT_N: usize = 10;

fn resolve(src: &Source, j: u32) -> Result<AnyFunction> {
    let f = match (&src.choice.expr, &src.choice.catalog) {
        (Some(e), _) => {
            let f = match src.dim {
                None | Some(1) => AnyFunction::parse(e, false)?,
                Some(2) => AnyFunction::parse(e, true)?,
                Some(d) => return Err(Error::Precondition(format!("--dim must be 1 or 2, got {d}"))),
            };
            if src.dim == Some(1) && f.dims() == 2 {
                return Err(Error::Precondition("--dim 1 given but the expression uses y".into()));
            }
            f
        }
        (None, Some(name)) => {
            let f = catalog::lookup(name, j)?;
            if src.dim.is_some_and(|d| d != f.dims()) {
                return Err(Error::Precondition(format!("{name} is a function of {} variable(s)", f.dims())));
            }
            f
        }
        (None, None) => unreachable!("clap requires a function source"),
    };
    Ok(if src.fd { f.with_finite_differences() } else { f })
}

fn spec(op: Op, n: usize, m: Option<usize>, j: u32, dims: u8) -> OperatorSpec {
    match (op, dims) {
        (Op::Bernstein, 1) => OperatorSpec::bernstein(n),
        (Op::Akr, 1) => OperatorSpec::akr(n, j),
        (Op::Bernstein, _) => OperatorSpec::bernstein_2d(n, m.unwrap_or(n)),
        (Op::Akr, _) => OperatorSpec::akr_2d(n, m.unwrap_or(n), j),
    }
}

fn grid(points: Option<usize>, dims: u8, d1: usize, d2: usize) -> Result<GridSpec> {
    match dims {
        1 => GridSpec::line(points.unwrap_or(d1)),
        _ => GridSpec::square(points.unwrap_or(d2)),
    }
}

pub fn nodes(a: &NodesArgs) -> Result<Table> {
    experiments::node_data(a.n, a.m, a.j)
}

pub fn eval(a: &EvalArgs) -> Result<Table> {
    let f = resolve(&a.source, a.j)?;
    let s = spec(a.op, a.n, a.m, a.j, f.dims());
    s.validate()?;
    let label = s.label();
    match &f {
        AnyFunction::Univariate(g) => {
            if !a.y.is_empty() {
                return Err(Error::Precondition("--y given for a univariate function".into()));
            }
            let values = apply_1d(g, &s)?.eval_many(&a.x)?;
            let mut t = Table::new(["x".to_string(), "f".into(), label]);
            for (&x, v) in a.x.iter().zip(values) {
                t.push(vec![x.into(), g.value(x)?.into(), v.into()])?;
            }
            Ok(t)
        }
        AnyFunction::Bivariate(g) => {
            if a.y.len() != a.x.len() {
                return Err(Error::LengthMismatch(format!(
                    "{} x coordinate(s) but {} y coordinate(s)",
                    a.x.len(),
                    a.y.len()
                )));
            }
            let p = apply_2d(g, &s)?;
            let mut t = Table::new(["x".to_string(), "y".into(), "f".into(), label]);
            for (&x, &y) in a.x.iter().zip(&a.y) {
                t.push(vec![x.into(), y.into(), g.value(x, y)?.into(), p.eval(x, y)?.into()])?;
            }
            Ok(t)
        }
    }
}

pub fn error(a: &ErrorArgs) -> Result<Table> {
    let f = resolve(&a.source, a.j)?;
    let s = spec(a.op, a.n, a.m, a.j, f.dims());
    let g = grid(a.points, f.dims(), experiments::TABLE_POINTS_1D, experiments::TABLE_POINTS_2D)?;
    let norm = match a.norm {
        Norm::Sup => NormKind::Sup,
        Norm::Rel2 => NormKind::Rel2,
    };
    let r = experiments::sup_error(&f, &s, &g, norm)?;
    let mut t = Table::new(["operator", "norm", "grid_points", "error", "argmax_x", "argmax_y"]);
    t.push(vec![
        r.operator.into(),
        r.norm.to_string().into(),
        r.grid.points().into(),
        r.error.into(),
        r.argmax[0].into(),
        r.argmax.get(1).copied().into(),
    ])?;
    Ok(t)
}

pub fn table(a: &TableArgs) -> Result<Table> {
    match a.example {
        Example::Univariate => {
            let degrees: Vec<usize> = if a.degrees.is_empty() {
                PRINTED_3_1.iter().map(|r| r.0).collect()
            } else {
                a.degrees.clone()
            };
            Ok(experiments::table_3_1(&experiments::table_example_3_1(&degrees)?))
        }
        Example::Bivariate => {
            let degrees: Vec<usize> = if a.degrees.is_empty() {
                PRINTED_4_4.iter().map(|r| r.0).collect()
            } else {
                a.degrees.clone()
            };
            Ok(experiments::table_4_4(&experiments::table_example_4_4(&degrees, a.speed_grid)?))
        }
    }
}

pub fn chain(a: &ChainArgs) -> Result<Table> {
    let f = resolve(&a.source, a.j)?;
    let kind = match (a.kind, f.dims()) {
        (Some(Chain::Below), _) => ChainKind::AkrBelow,
        (Some(Chain::Above), _) => ChainKind::AkrAbove,
        (Some(Chain::Bivariate), _) => ChainKind::Bivariate,
        (None, 1) => ChainKind::AkrBelow,
        (None, _) => ChainKind::Bivariate,
    };
    let m = if f.dims() == 2 { Some(a.m.unwrap_or(a.n)) } else { a.m };
    let g = grid(a.points, f.dims(), experiments::TABLE_POINTS_1D, experiments::TABLE_POINTS_2D)?;
    let r = experiments::chain_check(&f, a.n, m, a.j, kind, &g, a.tol)?;
    let mut t = Table::new(["chain", "link", "min_margin", "witness_x", "witness_y", "link_holds", "chain_holds"]);
    for l in &r.links {
        t.push(vec![
            r.kind.to_string().into(),
            l.name.clone().into(),
            l.min_margin.into(),
            l.witness[0].into(),
            l.witness.get(1).copied().into(),
            l.holds.into(),
            r.holds.into(),
        ])?;
    }
    Ok(t)
}

fn class_table(r: &ClassReport) -> Result<Table> {
    let mut t = Table::new([
        "class",
        "verdict",
        "min_margin",
        "witness",
        "condition",
        "tolerance",
        "points_scanned",
        "notes",
    ]);
    let witness: Vec<String> = r.witness.iter().map(|w| akr_core::table::format_g15(*w)).collect();
    t.push(vec![
        r.class.clone().into(),
        r.verdict.to_string().into(),
        r.min_margin.into(),
        witness.join(" ").into(),
        r.condition.clone().into(),
        r.tolerance.into(),
        r.points_scanned.into(),
        r.notes.join("; ").into(),
    ])?;
    Ok(t)
}

pub fn classify(a: &ClassifyArgs) -> Result<Table> {
    let f = resolve(&a.source, a.j)?;
    let tol = a.tol.unwrap_or(match &f {
        AnyFunction::Univariate(g) => g.default_tolerance(),
        AnyFunction::Bivariate(g) => g.default_tolerance(),
    });
    let g = grid(a.points, f.dims(), classes::DEFAULT_POINTS_1D, classes::DEFAULT_POINTS_2D)?;
    let r = match a.class {
        Class::Kj1 => classes::check_kj1(f.as_univariate()?, a.j, &g, tol)?,
        Class::DecreasingConvex => classes::check_decreasing_convex(f.as_univariate()?, &g, tol)?,
        Class::Haar => {
            let f0 = ScalarFunction::parse(&a.f0)?;
            let f1 = ScalarFunction::parse(a.f1.as_deref().unwrap_or(&format!("x^{}", a.j)))?;
            let scan = if a.full_scan { TripleScan::Full } else { TripleScan::Coarse };
            classes::check_haar_convex(f.as_univariate()?, &f0, &f1, &g, tol, scan)?
        }
        Class::Kj2 => classes::check_kj2(f.as_bivariate()?, a.j, &g, tol)?,
        Class::Compatibility => {
            let src = a
                .psi
                .as_deref()
                .ok_or_else(|| Error::Precondition("--psi is required for the compatibility check".into()))?;
            let psi = AnyFunction::parse(src, true)?;
            let psi = if a.source.fd { psi.with_finite_differences() } else { psi };
            classes::check_compatibility(f.as_bivariate()?, psi.as_bivariate()?, a.j, &g, tol)?
        }
    };
    class_table(&r)
}

fn probe_table(p: &LimitProbe) -> Result<Table> {
    let mut t = Table::new([
        "x",
        "y",
        "n",
        "residual",
        "predicted",
        "extrapolated",
        "abs_deviation",
        "rel_deviation",
        "conjectural",
    ]);
    for (&n, &r) in p.degrees.iter().zip(&p.residuals) {
        t.push(vec![
            p.point[0].into(),
            p.point.get(1).copied().into(),
            n.into(),
            r.into(),
            p.predicted.into(),
            p.extrapolated.into(),
            p.abs_deviation.into(),
            p.rel_deviation.into(),
            p.conjectural.into(),
        ])?;
    }
    Ok(t)
}

pub fn voronovskaja(a: &VorArgs) -> Result<Table> {
    let f = resolve(&a.source, a.j)?;
    let p = match (&f, a.y) {
        (AnyFunction::Univariate(g), None) => voronovskaja::vor_probe_1d(g, a.j, a.x, &a.degrees)?,
        (AnyFunction::Bivariate(g), Some(y)) => voronovskaja::conjecture_probe_2d(g, a.j, a.x, y, &a.degrees)?,
        (AnyFunction::Univariate(_), Some(_)) => {
            return Err(Error::Precondition("--y given for a univariate function".into()))
        }
        (AnyFunction::Bivariate(_), None) => {
            return Err(Error::Precondition("--y is required for a bivariate function".into()))
        }
    };
    probe_table(&p)
}

pub fn figure(a: &FigureArgs) -> Result<Table> {
    let entry = a.source.choice.catalog.as_deref().map(catalog::entry).transpose()?;
    let j = a.j.or(entry.map(|e| e.j)).unwrap_or(2);
    let n = a.n.or(entry.map(|e| e.n)).unwrap_or(FIGURE_DEFAULT_N);
    let f = resolve(&a.source, j)?;
    let specs = if f.dims() == 1 {
        vec![OperatorSpec::akr(n, j), OperatorSpec::bernstein(n)]
    } else {
        let m = a.m.or(entry.and_then(|e| e.m)).unwrap_or(n);
        vec![OperatorSpec::akr_2d(n, m, j), OperatorSpec::bernstein_2d(n, m)]
    };
    let g = grid(a.points, f.dims(), experiments::TABLE_POINTS_1D, experiments::TABLE_POINTS_2D)?;
    experiments::figure_data(&f, &specs, &g)
}

pub fn bounds(a: &BoundsArgs) -> Result<Table> {
    let f = resolve(&a.source, a.j)?;
    let s = spec(a.op, a.n, a.m, a.j, f.dims());
    s.validate()?;
    let kinds = match &a.kind {
        Some(k) => vec![k.parse::<BoundKind>()?],
        None => BoundKind::applicable(s.kind, f.dims()),
    };
    if kinds.is_empty() {
        return Err(Error::Precondition(format!("no bound applies to {}", s.label())));
    }
    let g = grid(a.points, f.dims(), bounds::NORM_POINTS_1D, classes::DEFAULT_POINTS_2D)?;
    let reports = match &f {
        AnyFunction::Univariate(h) => {
            let norms = bounds::estimate_norms_1d(h, &GridSpec::line(bounds::NORM_POINTS_1D)?)?;
            kinds
                .iter()
                .map(|&k| bounds::verify_bound_1d_with(h, &s, k, &g, norms))
                .collect::<Result<Vec<_>>>()?
        }
        AnyFunction::Bivariate(h) => {
            let norms = bounds::estimate_norms_2d(h, &GridSpec::square(bounds::NORM_POINTS_2D)?)?;
            kinds
                .iter()
                .map(|&k| bounds::verify_bound_2d_with(h, &s, k, &g, norms))
                .collect::<Result<Vec<_>>>()?
        }
    };
    if a.pointwise {
        pointwise_table(&reports[0])
    } else {
        summary_table(&reports)
    }
}

fn summary_table(reports: &[BoundReport]) -> Result<Table> {
    let mut t = Table::new([
        "kind",
        "operator",
        "max_bound",
        "max_error",
        "min_slack",
        "worst_x",
        "worst_y",
        "violated",
    ]);
    for r in reports {
        t.push(vec![
            r.kind.to_string().into(),
            r.operator.clone().into(),
            r.max_bound.into(),
            r.max_error.into(),
            r.min_slack.into(),
            r.worst_point[0].into(),
            r.worst_point.get(1).copied().into(),
            r.violated.into(),
        ])?;
    }
    Ok(t)
}

fn pointwise_table(r: &BoundReport) -> Result<Table> {
    let bivariate = r.points.first().is_some_and(|p| p.len() == 2);
    let mut cols = vec!["x"];
    if bivariate {
        cols.push("y");
    }
    cols.extend(["bound", "error", "slack"]);
    let mut t = Table::new(cols);
    for ((p, &b), &e) in r.points.iter().zip(&r.bound).zip(&r.error) {
        let mut row: Vec<Cell> = p.iter().map(|&c| c.into()).collect();
        row.extend([b.into(), e.into(), (b - e).into()]);
        t.push(row)?;
    }
    Ok(t)
}
