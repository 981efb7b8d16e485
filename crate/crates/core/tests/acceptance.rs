//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use martinet::blowup::{
    strict_transform, verify_div_compat, ChartMap, CompatOpts, Sign,
};
use martinet::examples::{
    builtin, homoclinic_halves, loop_surface, planar_mirror_error, run_chain, ChainOpts,
    chain_field, curvature_numerator, ChainField,
};
use martinet::flow::{
    integrate_orbit, liouville_check, reparametrize, IntegratorOpts,
};
use martinet::martinet::{
    divergence_ratio_scan, martinet_function, reduced_martinet, MartinetData,
};
use martinet::poly::Poly;
use martinet::vfield::VecField;
use martinet::{selftest, Box3};
use std::time::Instant;

fn p(s: &str) -> Poly {
    Poly::parse(s).unwrap()
}

struct Criterion {
    number: u32,
    name: &'static str,
    budget_s: f64,
    started: Instant,
}

impl Criterion {
    fn start(number: u32, name: &'static str, budget_s: f64) -> Self {
        Criterion {
            number,
            name,
            budget_s,
            started: Instant::now(),
        }
    }

    fn pass(self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        println!(
            "[acceptance] criterion {:2} ({}): PASS in {:.2}s (budget {}s)",
            self.number, self.name, elapsed, self.budget_s
        );
        assert!(
            elapsed <= self.budget_s,
            "criterion {} exceeded its {}s budget: {:.2}s",
            self.number,
            self.budget_s,
            elapsed
        );
    }
}

#[test]
fn criterion_01_symbolic_bracket_reproduction() {
    let c = Criterion::start(1, "symbolic bracket reproduction", 1.0);
    let d = builtin("loop").unwrap();
    let bracket = d.x().lie_bracket(d.y());
    let expected = VecField::new([Poly::zero(), Poly::zero(), p("y^2 - x^2*(x+z)")]);
    assert_eq!(bracket, expected, "[X,Y] must equal (y^2 - x^2(x+z)) d/dz exactly");
    c.pass();
}

#[test]
fn criterion_02_martinet_determinant_suite() {
    let c = Criterion::start(2, "Martinet determinant suite", 1.0);
    let heis = builtin("heisenberg").unwrap();
    let h = martinet_function(&heis);
    assert!(h.is_constant() && !h.is_zero(), "Heisenberg surface is empty");

    let flat = builtin("martinet_flat").unwrap();
    let h = reduced_martinet(&martinet_function(&flat)).unwrap();
    assert_eq!(h, p("x1"), "flat squarefree part is x1");

    let lp = builtin("loop").unwrap();
    let h = reduced_martinet(&martinet_function(&lp)).unwrap();
    let target = p("y^2 - x^2*(x+z)");
    assert!(
        h == target || h == -target,
        "loop generator is +/- (y^2 - x^2(x+z)), got {h}"
    );
    c.pass();
}

#[test]
fn criterion_03_tangency_certificates() {
    let c = Criterion::start(3, "tangency certificates", 1.0);
    for name in ["heisenberg", "martinet_flat", "loop", "conical_frame"] {
        let d = builtin(name).unwrap();
        let md = MartinetData::from_distribution(&d).unwrap();
        let zh = md.z.lie_derivative(&md.h);
        assert!(
            zh.divide_exact(&md.h).is_ok(),
            "{name}: Z.h must be exactly divisible by h"
        );
    }
    c.pass();
}

#[test]
fn criterion_04_conical_blowup_factorization() {
    let c = Criterion::start(4, "conical blow-up factorization", 1.0);
    let cone = p("x3^2 - x1^2 - x2^2");
    let chart = ChartMap::new(&[0, 1, 2], 2, Sign::Plus).unwrap();
    let tr = strict_transform(&cone, &chart).unwrap();
    assert_eq!(tr.total, &p("x3^2") * &p("1 - x1^2 - x2^2"));
    assert_eq!(tr.alpha, 2);
    assert_eq!(chart.beta(), 2);
    assert_eq!(tr.strict, p("1 - x1^2 - x2^2"));
    assert_eq!(&p("x3^2") * &tr.strict, tr.total, "total = x3^alpha * strict exactly");
    c.pass();
}

#[test]
fn criterion_05_divergence_compatibility() {
    let c = Criterion::start(5, "divergence compatibility on blow-up charts", 30.0);
    let opts = CompatOpts::default();
    assert!(opts.min_exceptional >= 0.1);

    let cone_frame = builtin("conical_frame").unwrap();
    let cone = p("x3^2 - x1^2 - x2^2");
    let chart = ChartMap::new(&[0, 1, 2], 2, Sign::Plus).unwrap();
    let report = verify_div_compat(&cone_frame, &cone, &chart, 200, 0, &opts).unwrap();
    assert!(report.n >= 200);
    assert!(
        report.max_abs_err <= 1e-6,
        "conical chart: max error {}",
        report.max_abs_err
    );

    let lp = builtin("loop").unwrap();
    let h = loop_surface();
    let chart = ChartMap::new(&[0, 1], 0, Sign::Plus).unwrap();
    let report = verify_div_compat(&lp, &h, &chart, 200, 0, &opts).unwrap();
    assert!(report.n >= 200);
    assert!(
        report.max_abs_err <= 1e-6,
        "loop chart: max error {}",
        report.max_abs_err
    );
    c.pass();
}

#[test]
fn criterion_06_liouville_transport() {
    let c = Criterion::start(6, "Liouville volume transport", 60.0);
    let opts = IntegratorOpts::default();

    // linear field: both estimators against exp(2t) on a grid of [0, 1]
    let v = VecField::new([Poly::var(0), Poly::var(1), Poly::zero()]);
    let grid: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
    let s0 = [[0.1, 0.2], [0.3, -0.1], [-0.2, 0.4], [0.25, 0.15]];
    let report = liouville_check(&v, &s0, &grid, &opts).unwrap();
    for (k, &t) in grid.iter().enumerate() {
        let expect = (2.0 * t).exp();
        let e1 = (report.vol_formula[k] - expect).abs() / expect;
        let e2 = (report.vol_jacobian[k] - expect).abs() / expect;
        assert!(e1 <= 1e-8 && e2 <= 1e-8, "t = {t}: errors {e1}, {e2}");
    }

    // planar loop field on a 5x4 grid in [-0.4,-0.2] x [0.05,0.15]
    let xhat = VecField::new([
        p("-2*x*y"),
        p("-(3*x^3 + 2*y^2)"),
        Poly::zero(),
    ]);
    let mut s0 = Vec::new();
    for i in 0..5 {
        for j in 0..4 {
            s0.push([
                -0.4 + 0.05 * i as f64,
                0.05 + 0.1 / 3.0 * j as f64,
            ]);
        }
    }
    assert_eq!(s0.len(), 20);
    let report = liouville_check(&xhat, &s0, &[0.5, 1.0], &opts).unwrap();
    assert!(
        report.max_rel_err <= 1e-5,
        "estimators disagree: {}",
        report.max_rel_err
    );
    c.pass();
}

#[test]
fn criterion_07_divergence_ratio_scans() {
    let c = Criterion::start(7, "divergence-ratio boundedness scans", 60.0);
    let stable = |r1: f64, r2: f64| (r2 - r1).abs() <= 0.5 * r1.abs().max(r2.abs()).max(1e-30);

    let flat = builtin("martinet_flat").unwrap();
    let md = MartinetData::from_distribution(&flat).unwrap();
    let region = Box3::new([-1.0, -1.0, -1.0], [1.0, 1.0, 1.0]);
    let r1 = divergence_ratio_scan(&md, &region, 500, 0).unwrap();
    let r2 = divergence_ratio_scan(&md, &region, 1000, 0).unwrap();
    assert!(r1.sup_ratio.is_finite() && r2.sup_ratio.is_finite());
    assert!(stable(r1.sup_ratio, r2.sup_ratio), "flat: {} vs {}", r1.sup_ratio, r2.sup_ratio);

    let lp = builtin("loop").unwrap();
    let md = MartinetData::with_h(&lp, loop_surface()).unwrap();
    // box avoiding the singular axis {x = y = 0} by 0.05 in x
    let region = Box3::new([-1.0, -1.0, 0.05], [-0.05, 1.0, 1.0]);
    let r1 = divergence_ratio_scan(&md, &region, 500, 0).unwrap();
    let r2 = divergence_ratio_scan(&md, &region, 1000, 0).unwrap();
    assert!(r1.sup_ratio.is_finite() && r2.sup_ratio.is_finite());
    assert!(r1.n >= 500 && r2.n >= 1000);
    assert!(stable(r1.sup_ratio, r2.sup_ratio), "loop: {} vs {}", r1.sup_ratio, r2.sup_ratio);
    c.pass();
}

#[test]
fn criterion_08_homoclinic_link_qualitative() {
    let c = Criterion::start(8, "homoclinic link qualitative claims", 60.0);
    let opts = ChainOpts::default();
    let (_, fwd) = homoclinic_halves(-0.3, opts.floor_fine, &opts).unwrap();
    let v = chain_field(ChainField::Reference).compile();
    let mut pos = false;
    let mut neg = false;
    for s in fwd.samples.iter().skip(1) {
        assert!(s.p[0] < 0.0, "x < 0 at t = {}", s.t);
        assert!(s.p[1] > 0.0, "y > 0 at t = {}", s.t);
        let vel = v.eval(&s.p);
        assert!(vel[0] > 0.0, "xdot > 0 at t = {}", s.t);
        assert!(vel[2] < 0.0, "zdot < 0 at t = {}", s.t);
        let k = curvature_numerator(s.p[0], s.p[1]);
        if k > 1e-12 {
            pos = true;
        }
        if k < -1e-12 {
            neg = true;
        }
    }
    assert!(!(pos && neg), "curvature numerator changed sign");

    let grid: Vec<f64> = (1..=20).map(|k| k as f64).collect();
    let err = planar_mirror_error(-0.3, &grid, &opts).unwrap();
    assert!(err <= 1e-5, "mirror symmetry defect {err}");
    c.pass();
}

#[test]
fn criterion_09_chain_inequalities() {
    let c = Criterion::start(9, "chain inequalities with 5% slack", 300.0);
    let opts = ChainOpts::default();
    assert!((opts.slack - 0.05).abs() < 1e-15);
    let report = run_chain(0.5, 4, &opts).unwrap();
    assert_eq!(report.links.len(), 4);
    assert!(
        report.ineq_violations.is_empty(),
        "violations: {:?}",
        report.ineq_violations
    );
    assert!(report.checks.iter().all(|ck| ck.ok));
    for w in report.z_seq.windows(2) {
        assert!(w[1] < w[0] && w[1] > 0.0, "z-sequence strictly decreasing and positive");
    }
    // the sandwich checks are part of the report; re-assert them directly
    for l in &report.links {
        let a = l.xbar.abs();
        assert!(2.0 * a <= l.len_planar * 1.05);
        assert!(l.len_planar <= (2.0 * a + 4.0 * a.powf(1.5)) * 1.05);
    }
    c.pass();
}

#[test]
fn criterion_10_reparametrization() {
    let c = Criterion::start(10, "flow reparametrization", 30.0);
    let d = builtin("loop").unwrap();
    let md = MartinetData::with_h(&d, loop_surface()).unwrap();
    let opts = IntegratorOpts {
        stop_speed: 1e-12,
        ..Default::default()
    };
    let p0 = [-0.3, 0.0, 0.3];

    // constant factors: r(t) = c t
    for (f, cval) in [(Poly::one(), 1.0), (Poly::int(2), 2.0)] {
        let trace = reparametrize(&f, &md, &p0, 1.0, &opts).unwrap();
        let (t, r) = *trace.pairs.last().unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!((r - cval).abs() <= 1e-9, "f = {cval}: r(1) = {r}");
    }

    // f = -x rescales Z to the finite-effort field; close the loop by
    // integrating Z itself for time r(t).
    let f = p("-x");
    for t_end in [0.5, 1.0] {
        let trace = reparametrize(&f, &md, &p0, t_end, &opts).unwrap();
        let (_, r_end) = *trace.pairs.last().unwrap();
        let z_opts = IntegratorOpts {
            max_time: r_end,
            stop_speed: 1e-15,
            ..Default::default()
        };
        let z_trace = integrate_orbit(&md, &p0, &z_opts, 1.0).unwrap();
        let a = trace.end_point;
        let b = z_trace.end_point();
        let err =
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        assert!(err <= 1e-6, "t = {t_end}: position error {err}");
    }
    c.pass();
}

#[test]
fn criterion_11_invariant_suites() {
    let c = Criterion::start(11, "randomized invariant suites", 120.0);
    let results = selftest::run_all(0);
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{}: {}", r.name, r.detail))
        .collect();
    assert!(failures.is_empty(), "failed checks: {failures:?}");
    assert!(results.len() >= 15);
    c.pass();
}
