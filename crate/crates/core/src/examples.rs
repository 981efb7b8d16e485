//! Built-in distributions and the homoclinic-chain experiment on the loop
//! surface: homoclinic orbits of the rescaled field, shooting for prescribed
//! backward z-limits, chain construction with a decreasing z-sequence, and
//! the closed-form inequality checks on lengths and z-steps.

use crate::flow::rk::{drive, AdaptiveOpts, Outcome};
use crate::martinet::{characteristic_field, Distribution, MartinetError};
use crate::poly::Poly;
use crate::vfield::{CompiledField, VecField};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("unknown builtin distribution `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bisection bracket failure for z0 = {z0}: z_minus({a}) = {za}, z_minus({b}) = {zb}")]
    BracketFailure {
        z0: f64,
        a: f64,
        za: f64,
        b: f64,
        zb: f64,
    },
    #[error("orbit integration failed (t = {t})")]
    IntegrationFailure { t: f64 },
    #[error(transparent)]
    Martinet(#[from] MartinetError),
}

pub const BUILTIN_NAMES: [&str; 4] = ["heisenberg", "martinet_flat", "loop", "conical_frame"];

/// Built-in distributions:
/// - `heisenberg`: X = d/dx1, Y = d/dx2 + x1 d/dx3 (empty Martinet set),
/// - `martinet_flat`: X = d/dx1, Y = d/dx2 + x1^2 d/dx3 (surface {x1 = 0}),
/// - `loop`: X = d/dy, Y = d/dx + (y^3/3 - x^2 y (x+z)) d/dz, whose surface
///   {y^2 - x^2(x+z) = 0} carries the homoclinic loops,
/// - `conical_frame`: X = d/dx1, Y = d/dx2 + (x1 x3^2 - x1^3/3 - x1 x2^2) d/dx3,
///   a frame constructed so that its bracket determinant is the cone
///   x3^2 - x1^2 - x2^2 (that determinant is the frame's only contractual
///   property, and the martinet pipeline verifies it).
pub fn builtin(name: &str) -> Result<Distribution, ChainError> {
    let p = |s: &str| Poly::parse(s).expect("builtin expressions parse");
    let field = |a: &str, b: &str, c: &str| VecField::new([p(a), p(b), p(c)]);
    let (x, y) = match name {
        "heisenberg" => (field("1", "0", "0"), field("0", "1", "x1")),
        "martinet_flat" => (field("1", "0", "0"), field("0", "1", "x1^2")),
        "loop" => (
            field("0", "1", "0"),
            field("1", "0", "1/3*y^3 - x^2*y*(x+z)"),
        ),
        "conical_frame" => (
            field("1", "0", "0"),
            field("0", "1", "x1*x3^2 - 1/3*x1^3 - x1*x2^2"),
        ),
        other => return Err(ChainError::UnknownBuiltin(other.to_string())),
    };
    Ok(Distribution::new(x, y, Some(name.to_string()))?)
}

/// The loop example's surface generator in its customary form.
pub fn loop_surface() -> Poly {
    Poly::parse("y^2 - x^2*(x+z)").expect("fixed expression")
}

/// Which 3-space system drives the chain experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainField {
    /// The rescaled system in its commonly quoted closed form:
    /// x' = -2xy, y' = -(3x^3 + 2y^2), z' = (4/3) x y^4.
    Reference,
    /// The rescaled field -x * Z with Z recomputed from the defining formula
    /// (X.h) Y - (Y.h) X on the loop surface.
    Derived,
}

#[derive(Clone, Debug)]
pub struct ChainOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Speed floors used for limit extraction (coarse, fine) with Richardson
    /// extrapolation across them.
    pub floor_coarse: f64,
    pub floor_fine: f64,
    pub shoot_tol: f64,
    /// Right bracket endpoint is -shoot_eps * z0.
    pub shoot_eps: f64,
    pub shoot_max_iters: usize,
    /// Relative slack applied to the analytic inequality checks.
    pub slack: f64,
    pub max_steps: usize,
    pub field: ChainField,
}

impl Default for ChainOpts {
    fn default() -> Self {
        ChainOpts {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            floor_coarse: 1e-6,
            floor_fine: 1e-8,
            shoot_tol: 1e-7,
            shoot_eps: 1e-3,
            shoot_max_iters: 80,
            slack: 0.05,
            max_steps: 2_000_000,
            field: ChainField::Reference,
        }
    }
}

impl ChainOpts {
    fn adaptive(&self) -> AdaptiveOpts {
        AdaptiveOpts {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_steps: self.max_steps,
        }
    }
}

/// The driving 3-space field of the chain experiment as polynomials.
pub fn chain_field(which: ChainField) -> VecField {
    match which {
        ChainField::Reference => VecField::new([
            Poly::parse("-2*x*y").expect("fixed"),
            Poly::parse("-(3*x^3 + 2*y^2)").expect("fixed"),
            Poly::parse("4/3*x*y^4").expect("fixed"),
        ]),
        ChainField::Derived => {
            let d = builtin("loop").expect("builtin");
            let z = characteristic_field(&d, &loop_surface()).expect("certified");
            z.scale_poly(&Poly::parse("-x").expect("fixed"))
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HalfSample {
    pub t: f64,
    pub p: [f64; 3],
    pub len_planar: f64,
    pub len_3d: f64,
    pub div_int: f64,
}

/// One half of a homoclinic orbit, integrated to the speed floor.
#[derive(Clone, Debug)]
pub struct HalfOrbitData {
    pub samples: Vec<HalfSample>,
    pub end: [f64; 3],
    pub t_end: f64,
    pub len_planar: f64,
    pub len_3d: f64,
    pub div_int: f64,
}

fn half_orbit(
    field: &CompiledField,
    div: &crate::poly::Compiled,
    start: [f64; 3],
    time_dir: f64,
    floor: f64,
    opts: &ChainOpts,
) -> Result<HalfOrbitData, ChainError> {
    let rhs = |y: &[f64; 6]| -> [f64; 6] {
        let p = [y[0], y[1], y[2]];
        let v = field.eval(&p);
        let planar = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let full = (planar * planar + v[2] * v[2]).sqrt();
        [
            time_dir * v[0],
            time_dir * v[1],
            time_dir * v[2],
            planar,
            full,
            div.eval(&p),
        ]
    };
    let mut samples = vec![HalfSample {
        t: 0.0,
        p: start,
        len_planar: 0.0,
        len_3d: 0.0,
        div_int: 0.0,
    }];
    let y0 = [start[0], start[1], start[2], 0.0, 0.0, 0.0];
    let result = drive(
        &rhs,
        y0,
        0.0,
        1e12,
        &opts.adaptive(),
        |t, y: &mut [f64; 6]| {
            let p = [y[0], y[1], y[2]];
            samples.push(HalfSample {
                t,
                p,
                len_planar: y[3],
                len_3d: y[4],
                div_int: y[5],
            });
            (field.speed(&p) < floor).then_some(())
        },
    );
    match result.outcome {
        Outcome::Stopped(()) => Ok(HalfOrbitData {
            end: [result.y[0], result.y[1], result.y[2]],
            t_end: result.t,
            len_planar: result.y[3],
            len_3d: result.y[4],
            div_int: result.y[5],
            samples,
        }),
        _ => Err(ChainError::IntegrationFailure { t: result.t }),
    }
}

/// Both halves of the homoclinic orbit through (xbar, 0, -xbar) at a given
/// speed floor; backward first, forward second.
pub fn homoclinic_halves(
    xbar: f64,
    floor: f64,
    opts: &ChainOpts,
) -> Result<(HalfOrbitData, HalfOrbitData), ChainError> {
    validate_xbar(xbar)?;
    let v = chain_field(opts.field);
    let field = v.compile();
    let div = v.divergence().compile();
    let start = [xbar, 0.0, -xbar];
    let back = half_orbit(&field, &div, start, -1.0, floor, opts)?;
    let fwd = half_orbit(&field, &div, start, 1.0, floor, opts)?;
    Ok((back, fwd))
}

fn validate_xbar(xbar: f64) -> Result<(), ChainError> {
    if !(xbar < 0.0 && xbar >= -1.0) {
        return Err(ChainError::InvalidArgument(format!(
            "xbar must lie in [-1, 0), got {xbar}"
        )));
    }
    Ok(())
}

/// Richardson extrapolation of a floor-dependent limit across the two
/// configured floors (ratio r = coarse/fine, assumed first order).
fn richardson(coarse: f64, fine: f64, ratio: f64) -> f64 {
    fine + (fine - coarse) / (ratio - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainLink {
    pub xbar: f64,
    pub z_minus: f64,
    pub z_plus: f64,
    pub len_planar: f64,
    pub len_3d: f64,
    pub curvature_sign_ok: bool,
}

/// Integrates the homoclinic orbit through (xbar, 0, -xbar) both ways to the
/// speed floors and extracts the z-limits (Richardson-extrapolated), planar
/// and 3D lengths, and the sign-constancy of the projected curvature
/// numerator 18 x^7 - 24 x^4 y^2.
pub fn homoclinic_orbit(xbar: f64, opts: &ChainOpts) -> Result<ChainLink, ChainError> {
    let (back_c, fwd_c) = homoclinic_halves(xbar, opts.floor_coarse, opts)?;
    let (back_f, fwd_f) = homoclinic_halves(xbar, opts.floor_fine, opts)?;
    let ratio = opts.floor_coarse / opts.floor_fine;
    let z_minus = richardson(back_c.end[2], back_f.end[2], ratio);
    let z_plus = richardson(fwd_c.end[2], fwd_f.end[2], ratio);
    let mut pos = false;
    let mut neg = false;
    for s in back_f.samples.iter().chain(fwd_f.samples.iter()) {
        let k = curvature_numerator(s.p[0], s.p[1]);
        if k > 1e-12 {
            pos = true;
        }
        if k < -1e-12 {
            neg = true;
        }
    }
    Ok(ChainLink {
        xbar,
        z_minus,
        z_plus,
        len_planar: back_f.len_planar + fwd_f.len_planar,
        len_3d: back_f.len_3d + fwd_f.len_3d,
        curvature_sign_ok: !(pos && neg),
    })
}

/// Sign numerator of the planar curvature along reference orbits.
pub fn curvature_numerator(x: f64, y: f64) -> f64 {
    18.0 * x.powi(7) - 24.0 * x.powi(4) * y * y
}

/// Finds xbar < 0 with z_minus(xbar) = z0 by bisection on [-z0, -eps*z0];
/// the bracket's sign change is validated and reported on failure.
pub fn shoot_for_zminus(z0: f64, tol: f64, opts: &ChainOpts) -> Result<f64, ChainError> {
    if !(z0 > 0.0 && z0 <= 1.0) {
        return Err(ChainError::InvalidArgument(format!(
            "z0 must lie in (0, 1], got {z0}"
        )));
    }
    let zminus_of = |xbar: f64| -> Result<f64, ChainError> {
        let (back, _) = homoclinic_halves(xbar, opts.floor_fine, opts)?;
        Ok(back.end[2])
    };
    let mut a = -z0;
    let mut b = -opts.shoot_eps * z0;
    let za = zminus_of(a)?;
    let zb = zminus_of(b)?;
    if !(za >= z0 && zb <= z0) {
        return Err(ChainError::BracketFailure { z0, a, za, b, zb });
    }
    let mut mid = 0.5 * (a + b);
    for _ in 0..opts.shoot_max_iters {
        mid = 0.5 * (a + b);
        let zm = zminus_of(mid)?;
        if (zm - z0).abs() <= tol {
            return Ok(mid);
        }
        if zm > z0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(mid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IneqCheck {
    pub link: usize,
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowEvidence {
    pub k: usize,
    pub p_k: usize,
    pub window_sum: f64,
    /// p_k * z_{k + p_k}: a consequence of monotonicity, asserted.
    pub monotone_bound: f64,
    /// (3 / 4K) z_k^{-7/2}: the idealized-chain growth rate, reported only.
    pub reference_bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub z0: f64,
    pub field: ChainField,
    pub slack: f64,
    pub k_const: f64,
    pub links: Vec<ChainLink>,
    pub z_seq: Vec<f64>,
    pub len_seq: Vec<f64>,
    pub checks: Vec<IneqCheck>,
    pub ineq_violations: Vec<String>,
    pub partial_sum_evidence: Vec<WindowEvidence>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("shooting failed at link {link}: {reason}")]
pub struct ChainFailure {
    pub link: usize,
    pub reason: String,
    /// Links completed before the failure, for partial reporting.
    pub partial: ChainReport,
}

/// Runs the chain z0 > z1 > ... > z_n: each link shoots for the previous
/// z-limit and the closed-form inequalities are checked with relative slack.
pub fn run_chain(z0: f64, n_links: usize, opts: &ChainOpts) -> Result<ChainReport, Box<ChainFailure>> {
    assert!(n_links >= 1, "a chain needs at least one link");
    assert!(z0 > 0.0 && z0 <= 1.0, "z0 must lie in (0, 1]");
    let k_const = (0.5 + z0.powf(4.5) / 3.0).max(2.0 * 2.0_f64.sqrt() + 4.0 / 3.0 * z0.powf(4.5));
    let mut links: Vec<ChainLink> = Vec::new();
    let mut z_k = z0;
    for k in 0..n_links {
        let result = shoot_for_zminus(z_k, opts.shoot_tol, opts)
            .and_then(|xbar| homoclinic_orbit(xbar, opts));
        match result {
            Ok(link) => {
                z_k = link.z_plus;
                links.push(link);
            }
            Err(err) => {
                let partial = assemble_report(z0, k_const, links, opts);
                return Err(Box::new(ChainFailure {
                    link: k,
                    reason: err.to_string(),
                    partial,
                }));
            }
        }
    }
    Ok(assemble_report(z0, k_const, links, opts))
}

#[allow(clippy::too_many_arguments)]
fn push_check(
    checks: &mut Vec<IneqCheck>,
    violations: &mut Vec<String>,
    slack: f64,
    link: usize,
    name: &'static str,
    lhs: f64,
    rhs: f64,
    strict: bool,
) {
    let ok = if strict {
        lhs < rhs
    } else {
        lhs <= rhs + slack * lhs.abs().max(rhs.abs())
    };
    checks.push(IneqCheck {
        link,
        name,
        lhs,
        rhs,
        ok,
    });
    if !ok {
        violations.push(format!("link{link}:{name}"));
    }
}

fn assemble_report(z0: f64, k_const: f64, links: Vec<ChainLink>, opts: &ChainOpts) -> ChainReport {
    let slack = opts.slack;
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    let push = |checks: &mut Vec<IneqCheck>,
                    violations: &mut Vec<String>,
                    link: usize,
                    name: &'static str,
                    lhs: f64,
                    rhs: f64,
                    strict: bool| {
        push_check(checks, violations, slack, link, name, lhs, rhs, strict)
    };
    for (k, l) in links.iter().enumerate() {
        let zm = l.z_minus;
        let zp = l.z_plus;
        let a = l.xbar.abs();
        let c = &mut checks;
        let v = &mut violations;
        push(c, v, k, "z_plus_lt_z_minus", zp, zm, true);
        push(
            c,
            v,
            k,
            "z_step_lower",
            -(2.0 / 3.0) * zm.powf(4.5) * l.len_planar,
            zp - zm,
            false,
        );
        push(c, v, k, "z_step_upper", zp - zm, -zp.powf(5.5) / 35.0, false);
        push(
            c,
            v,
            k,
            "z_minus_le_len",
            zm,
            l.len_planar * (0.5 + zm.abs().powf(4.5) / 3.0),
            false,
        );
        push(c, v, k, "planar_le_3d", l.len_planar, l.len_3d, false);
        push(
            c,
            v,
            k,
            "len3d_upper",
            l.len_3d,
            2.0 * (zm.abs() + 2.0 * zm.abs().powf(1.5))
                * (2.0_f64.sqrt() + (2.0 / 3.0) * zm.abs().powf(4.5)),
            false,
        );
        push(c, v, k, "z_le_K_len", zm, k_const * l.len_3d, false);
        push(
            c,
            v,
            k,
            "len_le_K_z",
            l.len_3d,
            k_const * (zm + 2.0 * zm.powf(1.5)),
            false,
        );
        push(c, v, k, "sandwich_lower", 2.0 * a, l.len_planar, false);
        push(
            c,
            v,
            k,
            "sandwich_upper",
            l.len_planar,
            2.0 * a + 4.0 * a.powf(1.5),
            false,
        );
        if !l.curvature_sign_ok {
            violations.push(format!("link{k}:curvature_sign"));
        }
    }
    let mut z_seq: Vec<f64> = Vec::new();
    if let Some(first) = links.first() {
        z_seq.push(first.z_minus);
    }
    z_seq.extend(links.iter().map(|l| l.z_plus));
    let len_seq: Vec<f64> = links.iter().map(|l| l.len_3d).collect();
    let mut evidence = Vec::new();
    for k in 0..z_seq.len() {
        let z_k = z_seq[k];
        let p_k = (3.0 / (4.0 * k_const) * z_k.powf(-4.5)).ceil() as usize;
        if k + p_k < z_seq.len() {
            let window_sum: f64 = z_seq[k..=k + p_k].iter().sum();
            let monotone_bound = p_k as f64 * z_seq[k + p_k];
            evidence.push(WindowEvidence {
                k,
                p_k,
                window_sum,
                monotone_bound,
                reference_bound: 3.0 / (4.0 * k_const) * z_k.powf(-3.5),
                ok: window_sum >= monotone_bound,
            });
        }
    }
    ChainReport {
        z0,
        field: opts.field,
        slack,
        k_const,
        links,
        z_seq,
        len_seq,
        checks,
        ineq_violations: violations,
        partial_sum_evidence: evidence,
    }
}

/// Assembles the full homoclinic orbit through (xbar, 0, -xbar) as a single
/// time-ordered trace (backward half reversed, then the forward half) with
/// the same per-row accounting as flow traces: speed, |h| residual against
/// the loop surface, cumulative 3D length and cumulative divergence integral
/// of the driving field.
pub fn link_trace(xbar: f64, opts: &ChainOpts) -> Result<Vec<crate::flow::OrbitSample>, ChainError> {
    let (back, fwd) = homoclinic_halves(xbar, opts.floor_fine, opts)?;
    let v = chain_field(opts.field);
    let field = v.compile();
    let h = loop_surface().compile();
    let mut rows = Vec::with_capacity(back.samples.len() + fwd.samples.len());
    let mut push = |t: f64, s: &HalfSample, cum_length: f64, cum_div: f64| {
        rows.push(crate::flow::OrbitSample {
            t,
            p: s.p,
            speed: field.speed(&s.p),
            h_residual: h.eval(&s.p).abs(),
            cum_length,
            cum_div,
        });
    };
    for s in back.samples.iter().rev() {
        push(-s.t, s, back.len_3d - s.len_3d, back.div_int - s.div_int);
    }
    for s in fwd.samples.iter().skip(1) {
        push(s.t, s, back.len_3d + s.len_3d, back.div_int + s.div_int);
    }
    Ok(rows)
}

/// Maximum mirror-symmetry defect of the reference planar system: the
/// backward half reflected through y -> -y is compared against the forward
/// half on a shared time grid.
pub fn planar_mirror_error(xbar: f64, t_grid: &[f64], opts: &ChainOpts) -> Result<f64, ChainError> {
    validate_xbar(xbar)?;
    let rhs_fwd = |y: &[f64; 2]| -> [f64; 2] {
        [-2.0 * y[0] * y[1], -(3.0 * y[0].powi(3) + 2.0 * y[1] * y[1])]
    };
    let rhs_back = |y: &[f64; 2]| -> [f64; 2] {
        let v = rhs_fwd(y);
        [-v[0], -v[1]]
    };
    let mut max_err = 0.0_f64;
    let mut yf = [xbar, 0.0];
    let mut yb = [xbar, 0.0];
    let mut t = 0.0;
    for &tk in t_grid {
        let rf = drive(&rhs_fwd, yf, t, tk, &opts.adaptive(), |_, _| None::<()>);
        let rb = drive(&rhs_back, yb, t, tk, &opts.adaptive(), |_, _| None::<()>);
        if !matches!(rf.outcome, Outcome::ReachedEnd) || !matches!(rb.outcome, Outcome::ReachedEnd)
        {
            return Err(ChainError::IntegrationFailure { t: tk });
        }
        yf = rf.y;
        yb = rb.y;
        t = tk;
        let dx = yf[0] - yb[0];
        let dy = yf[1] + yb[1];
        max_err = max_err.max((dx * dx + dy * dy).sqrt());
    }
    Ok(max_err)
}

/// Planar loop curves of the reference field for several starting absissae,
/// for phase-portrait figures: each curve is the mirror-closed homoclinic
/// loop in the (x, y) plane.
pub fn phase_portrait_orbits(
    xbars: &[f64],
    opts: &ChainOpts,
) -> Result<Vec<Vec<(f64, f64)>>, ChainError> {
    let mut curves = Vec::new();
    for &xbar in xbars {
        let (back, fwd) = homoclinic_halves(xbar, opts.floor_fine, opts)?;
        let mut curve: Vec<(f64, f64)> = back
            .samples
            .iter()
            .rev()
            .map(|s| (s.p[0], s.p[1]))
            .collect();
        curve.extend(fwd.samples.iter().skip(1).map(|s| (s.p[0], s.p[1])));
        curves.push(curve);
    }
    Ok(curves)
}

/// Comparison of the definitional characteristic field of the loop example
/// against its commonly quoted closed-form coefficients, reduced modulo the
/// surface ideal (h). The d/dy coefficients genuinely disagree, so the
/// toolkit derives everything from the definition and reports the residues.
#[derive(Clone, Debug)]
pub struct ZComparison {
    pub definitional: VecField,
    pub quoted: VecField,
    pub residues_mod_h: [Poly; 3],
    pub matches: [bool; 3],
}

impl ZComparison {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "definitional": [
                self.definitional.comp(0).to_string(),
                self.definitional.comp(1).to_string(),
                self.definitional.comp(2).to_string(),
            ],
            "quoted": [
                self.quoted.comp(0).to_string(),
                self.quoted.comp(1).to_string(),
                self.quoted.comp(2).to_string(),
            ],
            "residues_mod_h": [
                self.residues_mod_h[0].to_string(),
                self.residues_mod_h[1].to_string(),
                self.residues_mod_h[2].to_string(),
            ],
            "matches": self.matches,
        })
    }
}

pub fn reference_z_comparison() -> ZComparison {
    let d = builtin("loop").expect("builtin");
    let h = loop_surface();
    let definitional = characteristic_field(&d, &h).expect("certified");
    let quoted = VecField::new([
        Poly::parse("2*y").expect("fixed"),
        Poly::parse("3*x^2 + 2*x*(x+z)").expect("fixed"),
        Poly::parse("-4/3*y^4").expect("fixed"),
    ]);
    let mut residues_mod_h: [Poly; 3] = Default::default();
    let mut matches = [false; 3];
    for i in 0..3 {
        let diff = definitional.comp(i) - quoted.comp(i);
        residues_mod_h[i] = diff.reduce_mod(&h);
        matches[i] = residues_mod_h[i].is_zero();
    }
    ZComparison {
        definitional,
        quoted,
        residues_mod_h,
        matches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martinet::{martinet_function, reduced_martinet, MartinetData};

    #[test]
    fn builtin_catalog() {
        for name in BUILTIN_NAMES {
            assert!(builtin(name).is_ok());
        }
        assert!(matches!(
            builtin("nope"),
            Err(ChainError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn conical_frame_has_the_cone_determinant() {
        let d = builtin("conical_frame").unwrap();
        let h = reduced_martinet(&martinet_function(&d)).unwrap();
        let cone = Poly::parse("x3^2 - x1^2 - x2^2").unwrap();
        assert!(h == cone.normalize());
    }

    #[test]
    fn loop_data_certifies() {
        let d = builtin("loop").unwrap();
        assert!(MartinetData::with_h(&d, loop_surface()).is_ok());
    }

    #[test]
    fn curvature_sign_sample() {
        // frozen by direct evaluation: 18(-0.5)^7 - 24(-0.5)^4 (0.1)^2
        let k = curvature_numerator(-0.5, 0.1);
        assert!((k - (-0.155625)).abs() < 1e-12);
        assert!(k < 0.0);
    }

    #[test]
    fn homoclinic_link_qualitative() {
        let opts = ChainOpts::default();
        let link = homoclinic_orbit(-0.3, &opts).unwrap();
        assert!(link.z_plus < link.z_minus);
        assert!(link.z_minus > 0.3 && link.z_minus < 0.31);
        assert!(link.z_plus > 0.29 && link.z_plus < 0.3);
        assert!(link.len_planar <= link.len_3d);
        assert!(link.len_planar >= 2.0 * 0.3);
        assert!(link.len_planar <= 2.0 * 0.3 + 4.0 * 0.3_f64.powf(1.5));
        assert!(link.curvature_sign_ok);
    }

    #[test]
    fn forward_half_monotone_claims() {
        let opts = ChainOpts::default();
        let (_, fwd) = homoclinic_halves(-0.3, 1e-8, &opts).unwrap();
        let v = chain_field(ChainField::Reference).compile();
        for s in fwd.samples.iter().skip(1) {
            assert!(s.p[0] < 0.0, "x stays negative");
            assert!(s.p[1] > 0.0, "y stays positive");
            let vel = v.eval(&s.p);
            assert!(vel[0] > 0.0, "x increases");
            assert!(vel[2] < 0.0, "z decreases");
        }
    }

    #[test]
    fn mirror_symmetry() {
        let opts = ChainOpts::default();
        let grid: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let err = planar_mirror_error(-0.3, &grid, &opts).unwrap();
        assert!(err <= 1e-5, "mirror defect {err}");
    }

    #[test]
    fn shooting_hits_the_target() {
        let opts = ChainOpts::default();
        let xbar = shoot_for_zminus(0.5, 1e-6, &opts).unwrap();
        assert!(xbar > -0.5 && xbar < 0.0);
        let (back, _) = homoclinic_halves(xbar, opts.floor_fine, &opts).unwrap();
        assert!((back.end[2] - 0.5).abs() <= 1e-6);
        assert!(matches!(
            shoot_for_zminus(0.0, 1e-6, &opts),
            Err(ChainError::InvalidArgument(_))
        ));
    }

    #[test]
    fn long_chain_produces_window_evidence() {
        let opts = ChainOpts::default();
        let report = run_chain(0.5, 7, &opts).unwrap();
        assert!(report.ineq_violations.is_empty());
        assert!(
            !report.partial_sum_evidence.is_empty(),
            "7 links reach at least one full window"
        );
        for w in &report.partial_sum_evidence {
            assert!(w.ok, "window at k = {} violates monotone bound", w.k);
            assert!(w.window_sum >= w.monotone_bound);
            assert!(w.reference_bound > 0.0);
        }
    }

    #[test]
    fn derived_field_link_is_consistent() {
        let opts = ChainOpts {
            field: ChainField::Derived,
            ..Default::default()
        };
        let link = homoclinic_orbit(-0.3, &opts).unwrap();
        assert!(link.z_plus < link.z_minus);
        assert!(link.z_minus > 0.29 && link.z_minus < 0.31);
        assert!(link.len_planar >= 0.6 && link.len_planar <= 1.26);
        assert!(link.len_planar <= link.len_3d);
        assert!(link.curvature_sign_ok);
    }

    #[test]
    fn quoted_z_comparison_residues() {
        let cmp = reference_z_comparison();
        assert!(cmp.matches[0], "d/dx coefficients agree");
        assert!(!cmp.matches[1], "d/dy coefficients differ even mod (h)");
        assert!(cmp.matches[2], "d/dz coefficients agree mod (h)");
    }

    #[test]
    fn derived_field_is_tangent_but_reference_is_not() {
        let h = loop_surface();
        let derived = chain_field(ChainField::Derived);
        assert!(derived.lie_derivative(&h).divide_exact(&h).is_ok());
        let reference = chain_field(ChainField::Reference);
        assert!(reference.lie_derivative(&h).divide_exact(&h).is_err());
    }
}
