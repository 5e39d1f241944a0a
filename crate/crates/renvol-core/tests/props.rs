//! Property suites: curvature-tensor symmetries across the model catalog,
//! the finite-difference differentiation oracle against the jet engine, and
//! randomized exactness checks for quadrature and ladder fits.

use proptest::prelude::*;

use renvol_core::exec::ExecMode;
use renvol_core::kernel;
use renvol_core::metric::MetricField;
use renvol_core::models::{hyperbolic_normal_form, NormalFormModel};
use renvol_core::quad::{integrate_raw, Axis, ProductDomain};
use renvol_core::sampling::Sampler;
use renvol_core::series::{fit_expansion, EpsilonLadder, FitKind, LadderSpec};

fn catalog() -> Vec<(MetricField, Vec<Vec<f64>>)> {
    let mut sampler = Sampler::new(17);
    vec![
        (
            MetricField::hyperbolic_ball(4),
            vec![vec![0.2, -0.3, 0.1, 0.25], vec![0.4, 0.1, -0.35, 0.0]],
        ),
        (
            MetricField::round_sphere(3, 1.0),
            vec![vec![1.0, 0.8, 2.0], vec![1.9, 2.2, 0.5]],
        ),
        (
            hyperbolic_normal_form(1.0).unwrap().metric(),
            vec![vec![0.3, 1.1, 0.8, 2.0], vec![0.12, 2.0, 1.4, 0.6]],
        ),
        (
            NormalFormModel::torus_hyperbolic().metric(),
            vec![vec![0.2, 0.5, 1.0, 2.0]],
        ),
        (sampler.metric4(0.1), vec![vec![0.3, -0.2, 0.4, 0.1]]),
    ]
}

#[test]
fn curvature_symmetry_suite() {
    // R antisymmetries, pair symmetry, first Bianchi, Weyl trace-freeness,
    // Christoffel symmetry at 200 random points across the catalog
    let mut sampler = Sampler::new(2025);
    let models = catalog();
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    while count < 200 {
        for (metric, seeds) in &models {
            let n = metric.dim;
            let mut p = seeds[count % seeds.len()].clone();
            for x in p.iter_mut() {
                *x += 0.05 * (sampler.point3()[0]);
            }
            if !metric.contains(&p) {
                continue;
            }
            let b = kernel::curvature_bundle(metric, &p).unwrap();
            let scale = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| metric.eval(&p).at(i, j).abs())
                .fold(0.0_f64, f64::max)
                .powi(2);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        assert!(
                            (b.christoffel[renvol_core::curv::gidx(n, k, i, j)]
                                - b.christoffel[renvol_core::curv::gidx(n, k, j, i)])
                            .abs()
                                < 1e-10
                        );
                        for l in 0..n {
                            let r = b.riemann.at(i, j, k, l);
                            worst = worst
                                .max((r + b.riemann.at(j, i, k, l)).abs() / scale)
                                .max((r + b.riemann.at(i, j, l, k)).abs() / scale)
                                .max((r - b.riemann.at(k, l, i, j)).abs() / scale);
                            // first Bianchi: R_i[jkl] = 0
                            let bianchi = b.riemann.at(i, j, k, l)
                                + b.riemann.at(i, k, l, j)
                                + b.riemann.at(i, l, j, k);
                            worst = worst.max(bianchi.abs() / scale);
                        }
                    }
                }
            }
            if n == 4 {
                let ginv = metric.eval(&p).inverse().unwrap();
                for j in 0..4 {
                    for l in 0..4 {
                        let mut tr = 0.0;
                        for i in 0..4 {
                            for k in 0..4 {
                                tr += ginv.at(i, k) * b.weyl.at(i, j, k, l);
                            }
                        }
                        worst_trace = worst_trace.max(tr.abs());
                    }
                }
            }
            count += 1;
            if count >= 200 {
                break;
            }
        }
    }
    assert!(worst < 1e-7, "symmetry residual {worst}");
    assert!(worst_trace < 1e-8, "Weyl trace residual {worst_trace}");
}

#[test]
fn differentiation_cross_check() {
    // jet derivatives of the metric components against fourth-order central
    // finite differences (Richardson-refined), on every catalog metric
    for (metric, seeds) in &catalog() {
        let n = metric.dim;
        let p = &seeds[0];
        let jets = metric.eval_jets(p, 2).unwrap();
        for i in 0..n {
            for j in 0..n {
                for d in 0..n {
                    let fd = |h: f64| -> f64 {
                        let mut pp = p.clone();
                        let mut pm = p.clone();
                        pp[d] += h;
                        pm[d] -= h;
                        (metric.eval(&pp).at(i, j) - metric.eval(&pm).at(i, j)) / (2.0 * h)
                    };
                    let h0 = 1e-3;
                    let d1 = (4.0 * fd(h0 / 2.0) - fd(h0)) / 3.0;
                    let mut e = vec![0usize; n];
                    e[d] = 1;
                    let exact = jets.at(i, j).partial(&e);
                    assert!(
                        (exact - d1).abs() < 1e-9 * (1.0 + exact.abs()),
                        "∂g mismatch {exact} vs {d1}"
                    );
                    // second derivative along d
                    let fd2 = |h: f64| -> f64 {
                        let mut pp = p.clone();
                        let mut pm = p.clone();
                        pp[d] += h;
                        pm[d] -= h;
                        (metric.eval(&pp).at(i, j) - 2.0 * metric.eval(p.as_slice()).at(i, j)
                            + metric.eval(&pm).at(i, j))
                            / (h * h)
                    };
                    let d2 = (4.0 * fd2(h0 / 2.0) - fd2(h0)) / 3.0;
                    let mut e2 = vec![0usize; n];
                    e2[d] = 2;
                    let exact2 = jets.at(i, j).partial(&e2);
                    assert!(
                        (exact2 - d2).abs() < 1e-6 * (1.0 + exact2.abs()),
                        "∂²g mismatch {exact2} vs {d2}"
                    );
                }
            }
        }
    }
}

#[test]
fn spd_validation_across_catalog() {
    for (metric, seeds) in &catalog() {
        for p in seeds {
            metric.validate_spd(p).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadrature_polynomial_exactness(
        c in proptest::collection::vec(-2.0..2.0f64, 6),
        px in 0usize..8,
        py in 0usize..7,
    ) {
        // order 8 integrates degree ≤ 15 exactly; monomial degrees ≤ 7+6+2
        let dom = ProductDomain {
            axes: vec![Axis::new(-1.0, 1.0, 8, 1), Axis::new(0.0, 2.0, 8, 2)],
        };
        let f = |x: &[f64]| {
            c[0] * x[0].powi(px as i32) * x[1].powi(py as i32)
                + c[1] * x[0].powi(2)
                + c[2] * x[1].powi(3)
                + c[3]
        };
        let got = integrate_raw(f, &dom, ExecMode::Sequential);
        // reference by 1D closed forms
        let m1 = |p: i32, a: f64, b: f64| (b.powi(p + 1) - a.powi(p + 1)) / (p as f64 + 1.0);
        let expect = c[0] * m1(px as i32, -1.0, 1.0) * m1(py as i32, 0.0, 2.0)
            + c[1] * m1(2, -1.0, 1.0) * 2.0
            + c[2] * 2.0 * m1(3, 0.0, 2.0)
            + c[3] * 2.0 * 2.0;
        prop_assert!((got - expect).abs() < 1e-11 * (1.0 + expect.abs()));
    }

    #[test]
    fn fit_recovers_synthetic_expansions(
        c0 in -5.0..5.0f64,
        c2 in -5.0..5.0f64,
        v in -10.0..10.0f64,
    ) {
        let spec = LadderSpec::default();
        let rungs: Vec<(f64, f64)> = spec
            .epsilons()
            .iter()
            .map(|&e| (e, c0 * e.powi(-3) + c2 * e.powi(-1) + v))
            .collect();
        let ladder = EpsilonLadder::new(rungs).unwrap();
        let fit = fit_expansion(&ladder, FitKind::Volume { with_log: false }).unwrap();
        prop_assert!((fit.c0 - c0).abs() < 1e-9 * (1.0 + c0.abs()));
        prop_assert!((fit.c2 - c2).abs() < 1e-8 * (1.0 + c2.abs()));
        prop_assert!((fit.finite_part - v).abs() < 1e-9 * (1.0 + v.abs()));
    }

    #[test]
    fn jet_chain_rule_matches_closed_form(a in -1.0..1.0f64, b in 0.2..1.5f64) {
        // f(x, y) = exp(a sin x) / (b + y²): all partials to order 3
        let p = [0.4, -0.3];
        let xs = renvol_core::jet::variables(&p, 3);
        use renvol_core::jet::Scalar;
        let f = (xs[0].sin().scl(a)).exp()
            * Scalar::recip(&(xs[1].clone() * xs[1].clone()).addc(b));
        let g = |x: f64, y: f64| (a * x.sin()).exp() / (b + y * y);
        let h = 1e-4;
        let fd_x = (g(p[0] + h, p[1]) - g(p[0] - h, p[1])) / (2.0 * h);
        let fd_yy = (g(p[0], p[1] + h) - 2.0 * g(p[0], p[1]) + g(p[0], p[1] - h)) / (h * h);
        prop_assert!((f.partial(&[1, 0]) - fd_x).abs() < 1e-7);
        prop_assert!((f.partial(&[0, 2]) - fd_yy).abs() < 1e-5);
    }
}
