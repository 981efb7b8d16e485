//! Runtime-runnable invariant suites: randomized algebraic identities with a
//! fixed seed, plus the exactness certificates of the built-in examples.
//! The CLI's selftest command and the acceptance tests both run these.

use crate::blowup::{pullback_vecfield, ChartMap, Sign};
use crate::examples::{builtin, loop_surface, BUILTIN_NAMES};
use crate::flow::{integrate_orbit, IntegratorOpts, SurfaceModel};
use crate::martinet::{classify_point, MartinetData, Stratum};
use crate::poly::{gcd, squarefree_part, Mono, Poly};
use crate::scalar::Scalar;
use crate::vfield::VecField;
use crate::Rat;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, fn(&mut ChaCha8Rng) -> Result<String, String>);

const CHECKS: &[Check] = &[
    ("poly_ring_axioms", poly_ring_axioms),
    ("poly_parse_print_roundtrip", poly_parse_print_roundtrip),
    ("poly_diff_leibniz", poly_diff_leibniz),
    ("poly_substitute_homomorphism", poly_substitute_homomorphism),
    ("poly_divide_mul_roundtrip", poly_divide_mul_roundtrip),
    ("poly_squarefree_stability", poly_squarefree_stability),
    ("vfield_jacobi_identity", vfield_jacobi_identity),
    ("vfield_bracket_leibniz", vfield_bracket_leibniz),
    ("vfield_divergence_of_bracket", vfield_divergence_of_bracket),
    ("vfield_eval_linearity_crosscheck", vfield_eval_linearity_crosscheck),
    ("vfield_trace_jacobian_is_divergence", vfield_trace_jacobian_is_divergence),
    ("blowup_jacobian_determinants", blowup_jacobian_determinants),
    ("blowup_pullback_functoriality", blowup_pullback_functoriality),
    ("blowup_pullback_roundtrip", blowup_pullback_roundtrip),
    ("divergence_shift_identities", divergence_shift_identities),
    ("martinet_tangency_certificates", martinet_tangency_certificates),
    ("martinet_zero_set_preservation", martinet_zero_set_preservation),
    ("martinet_z_vanishes_on_singular_samples", martinet_z_vanishes_on_singular_samples),
    ("flow_projection_invariant", flow_projection_invariant),
];

/// Runs every suite with substreams of the given seed; results come back in
/// registry order, so output is reproducible.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(idx, (name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            match f(&mut rng) {
                Ok(detail) => CheckResult {
                    name,
                    passed: true,
                    detail,
                },
                Err(detail) => CheckResult {
                    name,
                    passed: false,
                    detail,
                },
            }
        })
        .collect()
}

fn rand_rat(rng: &mut ChaCha8Rng) -> Rat {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=9);
    Rat::new(BigInt::from(num), BigInt::from(den))
}

fn rand_poly(rng: &mut ChaCha8Rng, max_terms: usize, max_total_deg: i32) -> Poly {
    let n = rng.gen_range(0..=max_terms);
    let mut terms = Vec::new();
    for _ in 0..n {
        let mut e = [0i32; 3];
        loop {
            for v in 0..3 {
                e[v] = rng.gen_range(0..=max_total_deg);
            }
            if e.iter().sum::<i32>() <= max_total_deg {
                break;
            }
        }
        terms.push((Mono(e), rand_rat(rng)));
    }
    Poly::from_terms(terms, None)
}

fn rand_poly_nonzero(rng: &mut ChaCha8Rng, max_terms: usize, max_total_deg: i32) -> Poly {
    loop {
        let p = rand_poly(rng, max_terms, max_total_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

fn rand_field(rng: &mut ChaCha8Rng, max_terms: usize, max_total_deg: i32) -> VecField {
    VecField::new([
        rand_poly(rng, max_terms, max_total_deg),
        rand_poly(rng, max_terms, max_total_deg),
        rand_poly(rng, max_terms, max_total_deg),
    ])
}

fn rand_point(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-1.5..1.5),
    ]
}

fn poly_ring_axioms(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 120;
    for case in 0..CASES {
        let p = rand_poly(rng, 5, 4);
        let q = rand_poly(rng, 5, 4);
        let r = rand_poly(rng, 5, 4);
        if &(&p + &q) + &r != &p + &(&q + &r) {
            return Err(format!("associativity of + failed on case {case}"));
        }
        if &p + &q != &q + &p || &p * &q != &q * &p {
            return Err(format!("commutativity failed on case {case}"));
        }
        if &(&p * &q) * &r != &p * &(&q * &r) {
            return Err(format!("associativity of * failed on case {case}"));
        }
        if &p * &(&q + &r) != &(&p * &q) + &(&p * &r) {
            return Err(format!("distributivity failed on case {case}"));
        }
        if !(&p + &(-&p)).is_zero() {
            return Err(format!("additive inverse failed on case {case}"));
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn poly_parse_print_roundtrip(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 120;
    for case in 0..CASES {
        let p = rand_poly(rng, 6, 5);
        let printed = p.to_string();
        let back = Poly::parse(&printed)
            .map_err(|e| format!("case {case}: `{printed}` failed to reparse: {e}"))?;
        if back != p {
            return Err(format!("case {case}: `{printed}` reparsed differently"));
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn poly_diff_leibniz(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 120;
    for case in 0..CASES {
        let p = rand_poly(rng, 4, 4);
        let q = rand_poly(rng, 4, 4);
        for v in 0..3 {
            let lhs = (&p * &q).diff(v);
            let rhs = &(&p.diff(v) * &q) + &(&p * &q.diff(v));
            if lhs != rhs {
                return Err(format!("Leibniz failed on case {case}, var {v}"));
            }
        }
    }
    Ok(format!("{CASES} randomized cases, all variables"))
}

fn poly_substitute_homomorphism(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 100;
    for case in 0..CASES {
        let p = rand_poly(rng, 4, 3);
        let q = rand_poly(rng, 4, 3);
        let imgs = [
            rand_poly(rng, 3, 2),
            rand_poly(rng, 3, 2),
            rand_poly(rng, 3, 2),
        ];
        let images = [&imgs[0], &imgs[1], &imgs[2]];
        if (&p + &q).substitute(images) != &p.substitute(images) + &q.substitute(images) {
            return Err(format!("additivity failed on case {case}"));
        }
        if (&p * &q).substitute(images) != &p.substitute(images) * &q.substitute(images) {
            return Err(format!("multiplicativity failed on case {case}"));
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn poly_divide_mul_roundtrip(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 120;
    for case in 0..CASES {
        let p = rand_poly(rng, 4, 4);
        let q = rand_poly_nonzero(rng, 4, 4);
        let prod = &p * &q;
        match prod.divide_exact(&q) {
            Ok(back) if back == p => {}
            other => return Err(format!("case {case}: divide(p*q, q) = {other:?} != p")),
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn poly_squarefree_stability(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 40;
    for case in 0..CASES {
        let p = rand_poly_nonzero(rng, 3, 2);
        let q = rand_poly_nonzero(rng, 3, 2);
        let sf_sq = squarefree_part(&(&(&p * &p) * &q)).map_err(|e| e.to_string())?;
        let sf = squarefree_part(&(&p * &q)).map_err(|e| e.to_string())?;
        if sf_sq != sf {
            return Err(format!(
                "case {case}: squarefree(p^2 q) != squarefree(p q): {sf_sq} vs {sf}"
            ));
        }
        if squarefree_part(&sf).map_err(|e| e.to_string())? != sf {
            return Err(format!("case {case}: squarefree part not idempotent"));
        }
        let g = gcd(&(&p * &q), &(&p * &p));
        if (&p * &q).divide_exact(&g).is_err() || (&p * &p).divide_exact(&g).is_err() {
            return Err(format!("case {case}: gcd does not divide its arguments"));
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn vfield_jacobi_identity(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 100;
    for case in 0..CASES {
        let u = rand_field(rng, 2, 3);
        let v = rand_field(rng, 2, 3);
        let w = rand_field(rng, 2, 3);
        let cyclic = &(&u.lie_bracket(&v.lie_bracket(&w))
            + &v.lie_bracket(&w.lie_bracket(&u)))
            + &w.lie_bracket(&u.lie_bracket(&v));
        if !cyclic.is_zero() {
            return Err(format!("Jacobi identity failed on case {case}"));
        }
    }
    Ok(format!("{CASES} randomized cases, degree <= 3"))
}

fn vfield_bracket_leibniz(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 100;
    for case in 0..CASES {
        let v = rand_field(rng, 2, 3);
        let w = rand_field(rng, 2, 3);
        let f = rand_poly(rng, 3, 3);
        let lhs = v.lie_bracket(&w.scale_poly(&f));
        let rhs = &w.scale_poly(&v.lie_derivative(&f)) + &v.lie_bracket(&w).scale_poly(&f);
        if lhs != rhs {
            return Err(format!("[V, fW] expansion failed on case {case}"));
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn vfield_divergence_of_bracket(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 100;
    for case in 0..CASES {
        let v = rand_field(rng, 2, 3);
        let w = rand_field(rng, 2, 3);
        let lhs = v.lie_bracket(&w).divergence();
        let rhs = &v.lie_derivative(&w.divergence()) - &w.lie_derivative(&v.divergence());
        if lhs != rhs {
            return Err(format!("div[V,W] identity failed on case {case}"));
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn vfield_eval_linearity_crosscheck(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 100;
    for case in 0..CASES {
        let v = rand_field(rng, 3, 3);
        let w = rand_field(rng, 3, 3);
        // exact rational point with small denominators
        let coords: Vec<Rat> = (0..3).map(|_| rand_rat(rng)).collect();
        let exact_pt = [coords[0].clone(), coords[1].clone(), coords[2].clone()];
        let sum = &v + &w;
        let lhs = sum.eval::<Rat>(&exact_pt).expect("ordinary");
        let va = v.eval::<Rat>(&exact_pt).expect("ordinary");
        let wa = w.eval::<Rat>(&exact_pt).expect("ordinary");
        for i in 0..3 {
            if lhs[i] != va[i].clone() + wa[i].clone() {
                return Err(format!("case {case}: exact eval not additive"));
            }
        }
        let fp = [
            f64::from_rational(&exact_pt[0]),
            f64::from_rational(&exact_pt[1]),
            f64::from_rational(&exact_pt[2]),
        ];
        let double = sum.eval_f64(&fp).expect("no poles");
        for i in 0..3 {
            let exact_f = f64::from_rational(&lhs[i]);
            let err = (double[i] - exact_f).abs();
            if err > 1e-12 * (1.0 + exact_f.abs()) {
                return Err(format!(
                    "case {case}: double vs exact evaluation differ by {err}"
                ));
            }
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn vfield_trace_jacobian_is_divergence(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 100;
    for case in 0..CASES {
        let v = rand_field(rng, 3, 4);
        let j = v.jacobian();
        let trace = &(&j[0][0] + &j[1][1]) + &j[2][2];
        if trace != v.divergence() {
            return Err(format!("trace(DV) != div V on case {case}"));
        }
    }
    Ok(format!("{CASES} randomized cases"))
}

fn all_charts() -> Vec<ChartMap> {
    let mut charts = Vec::new();
    let centers: [&[usize]; 4] = [&[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
    for center in centers {
        for &j in center {
            for sign in [Sign::Plus, Sign::Minus] {
                charts.push(ChartMap::new(center, j, sign).expect("valid chart"));
            }
        }
    }
    charts
}

fn blowup_jacobian_determinants(_rng: &mut ChaCha8Rng) -> Result<String, String> {
    let charts = all_charts();
    for c in &charts {
        let vf = crate::blowup::volume_factor(c);
        let expected = Poly::var(c.exceptional_var()).pow(c.beta());
        if vf.jacobian_monomial != expected && vf.jacobian_monomial != -expected {
            return Err(format!(
                "chart {:?}: det = {} is not +/- x_j^beta",
                c.spec(),
                vf.jacobian_monomial
            ));
        }
    }
    Ok(format!("{} directional charts, exact determinants", charts.len()))
}

fn blowup_pullback_functoriality(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 60;
    let charts = all_charts();
    for case in 0..CASES {
        let c = &charts[rng.gen_range(0..charts.len())];
        let v = rand_field(rng, 2, 2);
        let w = rand_field(rng, 2, 2);
        let lhs = pullback_vecfield(&v.lie_bracket(&w), c);
        let rhs = pullback_vecfield(&v, c).lie_bracket(&pullback_vecfield(&w, c));
        if lhs != rhs {
            return Err(format!(
                "case {case}: pullback of bracket != bracket of pullbacks on chart {:?}",
                c.spec()
            ));
        }
    }
    Ok(format!("{CASES} randomized cases over all charts"))
}

fn blowup_pullback_roundtrip(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 50;
    let charts = all_charts();
    for case in 0..CASES {
        let c = &charts[rng.gen_range(0..charts.len())];
        let v = rand_field(rng, 3, 2);
        let w = pullback_vecfield(&v, c);
        let jac = c.jacobian();
        // sample with the exceptional coordinate away from zero
        let mut q = rand_point(rng);
        let j = c.exceptional_var();
        q[j] = rng.gen_range(0.3..1.5);
        let wq = w
            .eval_f64(&q)
            .map_err(|e| format!("case {case}: {e}"))?;
        let mut pushed = [0.0; 3];
        for i in 0..3 {
            for k in 0..3 {
                pushed[i] += jac[i][k].eval_f64(&q).expect("ordinary") * wq[k];
            }
        }
        let vq = v
            .eval_f64(&c.push_forward(&q))
            .expect("ordinary field");
        for i in 0..3 {
            if (pushed[i] - vq[i]).abs() > 1e-10 * (1.0 + vq[i].abs()) {
                return Err(format!(
                    "case {case}: pushforward(pullback(V)) != V at {q:?} on chart {:?}",
                    c.spec()
                ));
            }
        }
    }
    Ok(format!("{CASES} randomized points"))
}

fn divergence_shift_identities(rng: &mut ChaCha8Rng) -> Result<String, String> {
    const CASES: usize = 100;
    for case in 0..CASES {
        // alpha: a monomial that does not vanish at the sample points
        let mut e = [0i32; 3];
        for v in 0..3 {
            e[v] = rng.gen_range(0..=2);
        }
        let alpha = Poly::monomial(Mono(e), Rat::new(BigInt::from(rng.gen_range(1..=4)), BigInt::from(1)));
        let beta = rand_poly(rng, 3, 2);
        let z = rand_field(rng, 2, 2);

        // div^omega(beta Z) = beta div Z + Z . beta, exactly
        let lhs = z.scale_poly(&beta).divergence();
        let rhs = &(&beta * &z.divergence()) + &z.lie_derivative(&beta);
        if lhs != rhs {
            return Err(format!("case {case}: scaled-field identity failed symbolically"));
        }

        // div^{alpha omega}(Z) = div Z + (Z . alpha)/alpha at sample points:
        // route A computes it as (1/alpha) div(alpha Z).
        let div_alpha_z = z.scale_poly(&alpha).divergence().compile();
        let div_z = z.divergence().compile();
        let z_dot_alpha = z.lie_derivative(&alpha).compile();
        let alpha_c = alpha.compile();
        for _ in 0..5 {
            let mut p = rand_point(rng);
            for c in p.iter_mut() {
                // keep coordinates away from zero so alpha(p) != 0
                if c.abs() < 0.3 {
                    *c = 0.3 + c.abs();
                }
            }
            let av = alpha_c.eval(&p);
            let route_a = div_alpha_z.eval(&p) / av;
            let route_b = div_z.eval(&p) + z_dot_alpha.eval(&p) / av;
            if (route_a - route_b).abs() > 1e-10 * (1.0 + route_a.abs()) {
                return Err(format!(
                    "case {case}: weighted-divergence routes differ: {route_a} vs {route_b}"
                ));
            }
        }
    }
    Ok(format!("{CASES} randomized cases, 5 sample points each"))
}

fn martinet_tangency_certificates(_rng: &mut ChaCha8Rng) -> Result<String, String> {
    for name in BUILTIN_NAMES {
        let d = builtin(name).map_err(|e| e.to_string())?;
        let md = MartinetData::from_distribution(&d).map_err(|e| format!("{name}: {e}"))?;
        let zh = md.z.lie_derivative(&md.h);
        if zh.divide_exact(&md.h).is_err() {
            return Err(format!("{name}: Z.h not divisible by h"));
        }
    }
    Ok("4 built-in examples, exact division".to_string())
}

fn martinet_zero_set_preservation(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for name in ["martinet_flat", "loop", "conical_frame"] {
        let d = builtin(name).map_err(|e| e.to_string())?;
        let md = MartinetData::from_distribution(&d).map_err(|e| e.to_string())?;
        let model = SurfaceModel::new(&md);
        let raw = md.h_raw.compile();
        let raw_deg = md.h_raw.total_degree();
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 200 && attempts < 20_000 {
            attempts += 1;
            let cand = rand_point(rng);
            let Some(p) = model.project(&cand, 1e-12, 60) else {
                continue;
            };
            checked += 1;
            let scale_raw = 1.0 + crate::norm3(&p).powi(raw_deg);
            if raw.eval(&p).abs() > 1e-9 * scale_raw {
                return Err(format!(
                    "{name}: reduced zero set point {p:?} has |h_raw| = {}",
                    raw.eval(&p).abs()
                ));
            }
        }
        if checked < 200 {
            return Err(format!("{name}: only {checked} projected samples"));
        }
    }
    Ok("200 surface samples per example".to_string())
}

fn martinet_z_vanishes_on_singular_samples(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let d = builtin("loop").map_err(|e| e.to_string())?;
    let md = MartinetData::with_h(&d, loop_surface()).map_err(|e| e.to_string())?;
    let model = SurfaceModel::new(&md);
    for _ in 0..50 {
        let zc = rng.gen_range(0.1..1.0);
        let p = [0.0, 0.0, zc];
        match classify_point(&md, &p, 1e-9) {
            Stratum::SingularLocus => {}
            other => return Err(format!("axis point classified {other:?}")),
        }
        let scale = md.scale(&p);
        if model.speed(&p) > 1e-6 * scale {
            return Err(format!("Z does not vanish at singular point {p:?}"));
        }
    }
    Ok("50 singular-axis samples".to_string())
}

fn flow_projection_invariant(_rng: &mut ChaCha8Rng) -> Result<String, String> {
    let d = builtin("loop").map_err(|e| e.to_string())?;
    let md = MartinetData::with_h(&d, loop_surface()).map_err(|e| e.to_string())?;
    // 1e-5 is the realistic speed floor for this saddle-type example.
    let opts = IntegratorOpts {
        stop_speed: 1e-5,
        ..Default::default()
    };
    let trace =
        integrate_orbit(&md, &[-0.3, 0.0, 0.3], &opts, 1.0).map_err(|e| e.to_string())?;
    for s in &trace.samples {
        let scale = md.scale(&s.p);
        if s.h_residual > opts.projection_tol * scale {
            return Err(format!(
                "sample at t = {} violates the projection invariant",
                s.t
            ));
        }
    }
    Ok(format!("{} orbit samples within tolerance", trace.samples.len()))
}
