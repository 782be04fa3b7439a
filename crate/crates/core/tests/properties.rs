use akr_core::bounds::{self, Norms2d};
use akr_core::calculus::{AnyFunction, BivariateFunction, GridSpec, ScalarFunction};
use akr_core::catalog;
use akr_core::classes::{self, TripleScan, Verdict};
use akr_core::experiments::{self, ChainKind, NormKind};
use akr_core::operators::{akr_nodes, apply_1d, bernstein_basis, OperatorSpec};
use akr_core::table::format_g15;
use proptest::prelude::*;

fn uni(s: &str) -> ScalarFunction {
    ScalarFunction::parse(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_constructions_are_in_kj1(
        a in 0.0..2.0f64,
        b in 0.0..2.0f64,
        c in 0.0..2.0f64,
        d in 0.0..3.0f64,
        p in 1u32..5,
        j in 2u32..6,
        f0 in -1.0..1.0f64,
    ) {
        let phi = uni(&format!("{a} + {b}*x^{p} + {c}*exp({d}*x)"));
        let built = classes::build_from_phi(&phi, j, f0).unwrap();
        prop_assert!(built.warnings.is_empty(), "{:?}", built.warnings);
        let f = &built.function;
        let r = classes::check_kj1(f, j, &GridSpec::line(201).unwrap(), f.default_tolerance()).unwrap();
        prop_assert!(r.is_member(), "{:?} {}", r.verdict, r.min_margin);
        prop_assert_eq!(f.value(0.0).unwrap(), f0);
    }

    // f = P(x^j) with P cubic, so f(x^(1/j)) = P is convex exactly where P'' = 2c + 6du >= 0.
    #[test]
    fn haar_convexity_matches_convexity_of_the_substitution(
        b in -1.0..1.0f64,
        c in -2.0..2.0f64,
        d in -2.0..2.0f64,
        j in 2u32..5,
    ) {
        let pp = |u: f64| 2.0 * c + 6.0 * d * u;
        let convex = pp(0.0) >= 0.1 && pp(1.0) >= 0.1;
        let concave_quarter = (pp(0.0) <= -0.1 && pp(0.25) <= -0.1) || (pp(0.75) <= -0.1 && pp(1.0) <= -0.1);
        prop_assume!(convex || concave_quarter);
        let f = uni(&format!("{b}*x^{j} + {c}*x^(2*{j}) + {d}*x^(3*{j})"));
        let f0 = uni("1");
        let f1 = uni(&format!("x^{j}"));
        let grid = GridSpec::line(41).unwrap();
        let r = classes::check_haar_convex(&f, &f0, &f1, &grid, 1e-9, TripleScan::Full).unwrap();
        prop_assert_eq!(r.verdict == Verdict::Member, convex, "margin {}", r.min_margin);
    }

    #[test]
    fn tau_generators_are_compatible(
        a in 0.1..2.0f64,
        b in 0.0..2.0f64,
        c in 0.0..2.0f64,
        d in 0.0..2.0f64,
        j in 2u32..4,
    ) {
        let tau = BivariateFunction::parse(&format!("{a} + {b}*x + {c}*y + {d}*x*y")).unwrap();
        let (phi, psi) = classes::tau_generators(&tau, j).unwrap();
        let r = classes::check_compatibility(&phi, &psi, j, &GridSpec::square(11).unwrap(), 1e-8).unwrap();
        prop_assert!(r.min_margin > -1e-8, "residual {}", -r.min_margin);
    }

    #[test]
    fn new_bivariate_bound_is_the_smallest(
        x in 0.0..=1.0f64,
        y in 0.0..=1.0f64,
        n in 1usize..300,
        m in 1usize..300,
        d in proptest::array::uniform5(0.0..100.0f64),
    ) {
        let norms = Norms2d { d10: d[0], d01: d[1], d20: d[2], d02: d[3], d22: d[4], grid: GridSpec::square(2).unwrap() };
        let new = bounds::bound_bivariate_new(x, y, n, m, &norms);
        prop_assert!(new <= bounds::bound_bivariate_mixed(x, y, n, m, &norms));
        prop_assert!(new <= bounds::bound_bivariate_old(x, y, n, m, &norms));
    }

    #[test]
    fn modulus_is_monotone_and_lipschitz(i in 0usize..12, d1 in 0.001..1.0f64, d2 in 0.001..1.0f64) {
        let f = &catalog::battery_univariate()[i];
        let grid = GridSpec::line(401).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let w_lo = bounds::compute_modulus(f, lo, &grid).unwrap();
        let w_hi = bounds::compute_modulus(f, hi, &grid).unwrap();
        prop_assert!(w_lo <= w_hi);
        let d1norm = bounds::estimate_norms_1d(f, &GridSpec::line(1001).unwrap()).unwrap().d1;
        prop_assert!(w_hi <= d1norm * hi * (1.0 + 1e-6) + 1e-12);
    }

    #[test]
    fn refining_the_grid_never_lowers_the_error(i in 0usize..12, n in 2usize..40, points in 2usize..60, akr in any::<bool>()) {
        let f = AnyFunction::Univariate(catalog::battery_univariate()[i].clone());
        let spec = if akr { OperatorSpec::akr(n, 2) } else { OperatorSpec::bernstein(n) };
        let g = GridSpec::line(points).unwrap();
        let coarse = experiments::sup_error(&f, &spec, &g, NormKind::Sup).unwrap().error;
        let fine = experiments::sup_error(&f, &spec, &g.refined(), NormKind::Sup).unwrap().error;
        prop_assert!(coarse <= fine);
    }

    // f <= B_{n,j} f <= B_n f pointwise forces the AKR error below the Bernstein error.
    #[test]
    fn chain_implies_error_ordering(i in 0usize..12, n in 2usize..40) {
        let f = AnyFunction::Univariate(catalog::battery_univariate()[i].clone());
        let grid = GridSpec::line(201).unwrap();
        let chain = experiments::chain_check(&f, n, None, 2, ChainKind::AkrBelow, &grid, 0.0).unwrap();
        if chain.holds {
            let ea = experiments::sup_error(&f, &OperatorSpec::akr(n, 2), &grid, NormKind::Sup).unwrap().error;
            let eb = experiments::sup_error(&f, &OperatorSpec::bernstein(n), &grid, NormKind::Sup).unwrap().error;
            prop_assert!(ea <= eb, "{ea} > {eb}");
        }
    }

    #[test]
    fn akr_nodes_are_ordered_and_below_uniform(n in 2usize..200, j in 2u32..9) {
        prop_assume!(n >= j as usize);
        let t = akr_nodes(n, j).unwrap().nodes;
        prop_assert_eq!(t.len(), n + 1);
        prop_assert_eq!(t[n], 1.0);
        for k in 0..=n {
            prop_assert!(t[k] <= k as f64 / n as f64 + 1e-15);
            if k > 0 {
                prop_assert!(t[k - 1] <= t[k]);
            }
        }
    }

    #[test]
    fn basis_is_a_partition_of_unity(n in 0usize..300, x in 0.0..=1.0f64) {
        let b = bernstein_basis(n, x).unwrap();
        prop_assert!(b.iter().all(|&v| v >= 0.0));
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn operators_are_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, n in 2usize..30, x in 0.0..=1.0f64) {
        let spec = OperatorSpec::akr(n, 2);
        let f = uni("sin(3*x)");
        let g = uni("exp(x)");
        let h = uni(&format!("{a}*sin(3*x) + {b}*exp(x)"));
        let lhs = apply_1d(&h, &spec).unwrap().eval(x).unwrap();
        let rhs = a * apply_1d(&f, &spec).unwrap().eval(x).unwrap() + b * apply_1d(&g, &spec).unwrap().eval(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs()));
    }

    #[test]
    fn g15_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = format_g15(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 1e-14 * v.abs());
    }
}
