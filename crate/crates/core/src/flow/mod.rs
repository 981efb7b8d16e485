//! Numerical integration of the characteristic field constrained to the
//! surface, arc-length and divergence-integral accounting, surface divergence
//! on a codimension-one level set, volume-transport verification, and the
//! flow-reparametrization ODE.

pub(crate) mod rk;

use crate::martinet::{classify_point, MartinetData, Stratum};
use crate::poly::{Compiled, Poly};
use crate::vfield::VecField;
use crate::{norm3, Box3, Point};
use rk::{drive, AdaptiveOpts, Outcome};
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("start point is not a transverse surface point (classified {0:?})")]
    OffSurface(Stratum),
    #[error("gradient-degenerate point (on or near the singular locus)")]
    GradientDegenerate,
    #[error("field is not planar: expected components in (x1, x2) only")]
    NotPlanar,
    #[error("reparametrization factor is non-positive along the orbit (t = {t})")]
    NonPositiveFactor { t: f64 },
    #[error("orbit escaped or failed before the requested time (t = {t})")]
    OrbitEscape { t: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Integrator options shared by the constrained-orbit routines.
#[derive(Clone, Debug)]
pub struct IntegratorOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    pub projection_tol: f64,
    /// Terminate when |Z| drops below this; orbits limiting onto the
    /// tangency/singular set take infinite time otherwise.
    pub stop_speed: f64,
    pub chart_box: Option<Box3>,
}

impl Default for IntegratorOpts {
    fn default() -> Self {
        IntegratorOpts {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_time: 1e9,
            max_steps: 5_000_000,
            projection_tol: 1e-9,
            stop_speed: 1e-8,
            chart_box: None,
        }
    }
}

impl IntegratorOpts {
    fn validate(&self) {
        assert!(self.rel_tol > 0.0 && self.abs_tol > 0.0);
        assert!(self.projection_tol > 0.0 && self.stop_speed > 0.0);
        assert!(self.max_steps >= 1);
    }

    fn adaptive(&self) -> AdaptiveOpts {
        AdaptiveOpts {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    MaxTime,
    SpeedFloor,
    LeftBox,
    StepFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitSample {
    pub t: f64,
    pub p: Point,
    pub speed: f64,
    pub h_residual: f64,
    pub cum_length: f64,
    pub cum_div: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitTrace {
    pub samples: Vec<OrbitSample>,
    pub termination: Termination,
}

impl OrbitTrace {
    pub fn arc_length(&self) -> f64 {
        self.samples.last().map(|s| s.cum_length).unwrap_or(0.0)
    }

    pub fn div_integral(&self) -> f64 {
        self.samples.last().map(|s| s.cum_div).unwrap_or(0.0)
    }

    pub fn end_point(&self) -> Point {
        self.samples.last().expect("traces are never empty").p
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,z,speed,h_residual,cum_length,cum_div")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                s.t, s.p[0], s.p[1], s.p[2], s.speed, s.h_residual, s.cum_length, s.cum_div
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("csv is utf8")
    }
}

/// Compiled numerics of a (h, Z) pair: everything the constrained integrator
/// and the divergence formulas evaluate in hot loops.
pub struct SurfaceModel {
    h: Compiled,
    grad: [Compiled; 3],
    grad_sq: Compiled,
    z: [Compiled; 3],
    div_z: Compiled,
    z_dot_grad_sq: Compiled,
    deg_h: i32,
}

impl SurfaceModel {
    pub fn new(md: &MartinetData) -> Self {
        let grad_sq_poly = &(&(&md.grad_h[0] * &md.grad_h[0]) + &(&md.grad_h[1] * &md.grad_h[1]))
            + &(&md.grad_h[2] * &md.grad_h[2]);
        SurfaceModel {
            h: md.h.compile(),
            grad: [
                md.grad_h[0].compile(),
                md.grad_h[1].compile(),
                md.grad_h[2].compile(),
            ],
            grad_sq: grad_sq_poly.compile(),
            z: [
                md.z.comp(0).compile(),
                md.z.comp(1).compile(),
                md.z.comp(2).compile(),
            ],
            div_z: md.z.divergence().compile(),
            z_dot_grad_sq: md.z.lie_derivative(&grad_sq_poly).compile(),
            deg_h: md.h.total_degree(),
        }
    }

    pub fn h_at(&self, p: &Point) -> f64 {
        self.h.eval(p)
    }

    pub fn scale(&self, p: &Point) -> f64 {
        1.0 + norm3(p).powi(self.deg_h)
    }

    pub fn grad_at(&self, p: &Point) -> [f64; 3] {
        [
            self.grad[0].eval(p),
            self.grad[1].eval(p),
            self.grad[2].eval(p),
        ]
    }

    pub fn grad_norm(&self, p: &Point) -> f64 {
        self.grad_sq.eval(p).max(0.0).sqrt()
    }

    pub fn z_at(&self, p: &Point) -> [f64; 3] {
        [self.z[0].eval(p), self.z[1].eval(p), self.z[2].eval(p)]
    }

    pub fn speed(&self, p: &Point) -> f64 {
        norm3(&self.z_at(p))
    }

    /// Newton projection along the gradient onto {h = 0}; converged when
    /// |h| <= tol * (1 + |p|^deg h).
    pub fn project(&self, p: &Point, tol: f64, max_iters: usize) -> Option<Point> {
        let mut q = *p;
        for _ in 0..max_iters {
            let h = self.h.eval(&q);
            if !h.is_finite() {
                return None;
            }
            if h.abs() <= tol * self.scale(&q) {
                return Some(q);
            }
            let g = self.grad_at(&q);
            let g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if g2 < 1e-30 {
                return None;
            }
            for i in 0..3 {
                q[i] -= h * g[i] / g2;
            }
        }
        let h = self.h.eval(&q);
        (h.is_finite() && h.abs() <= tol * self.scale(&q)).then_some(q)
    }

    /// Surface divergence of Z on {h = 0}: the ambient Euclidean divergence
    /// plus the level-set correction (Z . |grad h|^2) / (2 |grad h|^2).
    pub fn surface_divergence_at(&self, p: &Point) -> Result<f64, FlowError> {
        let g2 = self.grad_sq.eval(p);
        if g2.sqrt() < 1e-9 {
            return Err(FlowError::GradientDegenerate);
        }
        Ok(self.div_z.eval(p) + self.z_dot_grad_sq.eval(p) / (2.0 * g2))
    }
}

/// Surface divergence of md's characteristic field at a surface point.
pub fn surface_divergence(md: &MartinetData, p: &Point) -> Result<f64, FlowError> {
    SurfaceModel::new(md).surface_divergence_at(p)
}

/// Integrates dx/dt = direction * Z(x) from a transverse surface point with
/// Newton projection back onto {h = 0} after every accepted step. Arc length
/// and the surface-divergence integral ride along as extra state components,
/// so they share the integrator's quadrature order.
pub fn integrate_orbit(
    md: &MartinetData,
    p0: &Point,
    opts: &IntegratorOpts,
    direction: f64,
) -> Result<OrbitTrace, FlowError> {
    opts.validate();
    assert!(direction == 1.0 || direction == -1.0, "direction is +1 or -1");
    match classify_point(md, p0, opts.projection_tol) {
        Stratum::Sigma2Tr => {}
        other => return Err(FlowError::OffSurface(other)),
    }
    let model = SurfaceModel::new(md);
    let rhs = |y: &[f64; 5]| -> [f64; 5] {
        let p = [y[0], y[1], y[2]];
        let v = model.z_at(&p);
        let speed = norm3(&v);
        let g2 = model.grad_sq.eval(&p);
        let div = if g2.sqrt() < 1e-9 {
            f64::NAN
        } else {
            model.div_z.eval(&p) + model.z_dot_grad_sq.eval(&p) / (2.0 * g2)
        };
        [
            direction * v[0],
            direction * v[1],
            direction * v[2],
            speed,
            direction * div,
        ]
    };

    let mut samples = Vec::new();
    let speed0 = model.speed(p0);
    samples.push(OrbitSample {
        t: 0.0,
        p: *p0,
        speed: speed0,
        h_residual: model.h_at(p0).abs(),
        cum_length: 0.0,
        cum_div: 0.0,
    });
    if speed0 < opts.stop_speed {
        return Ok(OrbitTrace {
            samples,
            termination: Termination::SpeedFloor,
        });
    }

    let y0 = [p0[0], p0[1], p0[2], 0.0, 0.0];
    let result = drive(
        &rhs,
        y0,
        0.0,
        opts.max_time,
        &opts.adaptive(),
        |t, y: &mut [f64; 5]| {
            let pos = [y[0], y[1], y[2]];
            let Some(projected) = model.project(&pos, opts.projection_tol, 5) else {
                return Some(Termination::StepFailure);
            };
            y[0] = projected[0];
            y[1] = projected[1];
            y[2] = projected[2];
            let speed = model.speed(&projected);
            samples.push(OrbitSample {
                t,
                p: projected,
                speed,
                h_residual: model.h_at(&projected).abs(),
                cum_length: y[3],
                cum_div: y[4],
            });
            if speed < opts.stop_speed {
                return Some(Termination::SpeedFloor);
            }
            if let Some(region) = &opts.chart_box {
                if !region.contains(&projected) {
                    return Some(Termination::LeftBox);
                }
            }
            None
        },
    );
    let termination = match result.outcome {
        Outcome::ReachedEnd => Termination::MaxTime,
        Outcome::Stopped(term) => term,
        Outcome::StepUnderflow | Outcome::MaxSteps => Termination::StepFailure,
    };
    Ok(OrbitTrace {
        samples,
        termination,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeReport {
    pub t_grid: Vec<f64>,
    pub vol_formula: Vec<f64>,
    pub vol_jacobian: Vec<f64>,
    pub max_rel_err: f64,
}

/// Verifies volume transport for a planar field two independent ways: the
/// exponential of the integrated divergence along each orbit, and the
/// determinant of the variational-equation solution dJ/dt = DV J. Both
/// estimates are ensemble means over `s0` times a unit reference cell.
pub fn liouville_check(
    v: &VecField,
    s0: &[[f64; 2]],
    t_grid: &[f64],
    opts: &IntegratorOpts,
) -> Result<VolumeReport, FlowError> {
    opts.validate();
    if !v.comp(2).is_zero() || v.comp(0).degree_in(2) > 0 || v.comp(1).degree_in(2) > 0 {
        return Err(FlowError::NotPlanar);
    }
    if s0.is_empty() {
        return Err(FlowError::InvalidInput("empty initial set".to_string()));
    }
    for (i, a) in s0.iter().enumerate() {
        for b in &s0[i + 1..] {
            if a == b {
                return Err(FlowError::InvalidInput(
                    "initial points must be pairwise distinct".to_string(),
                ));
            }
        }
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] <= 0.0 {
        return Err(FlowError::InvalidInput(
            "t_grid must be positive and strictly increasing".to_string(),
        ));
    }

    let fx = v.comp(0).compile();
    let fy = v.comp(1).compile();
    let jac = v.jacobian();
    let a11 = jac[0][0].compile();
    let a12 = jac[0][1].compile();
    let a21 = jac[1][0].compile();
    let a22 = jac[1][1].compile();
    let div = v.divergence().compile();

    // state: x, y, integral of div, J11, J12, J21, J22
    let rhs = |y: &[f64; 7]| -> [f64; 7] {
        let p = [y[0], y[1], 0.0];
        let (j11, j12, j21, j22) = (y[3], y[4], y[5], y[6]);
        let (m11, m12, m21, m22) = (a11.eval(&p), a12.eval(&p), a21.eval(&p), a22.eval(&p));
        [
            fx.eval(&p),
            fy.eval(&p),
            div.eval(&p),
            m11 * j11 + m12 * j21,
            m11 * j12 + m12 * j22,
            m21 * j11 + m22 * j21,
            m21 * j12 + m22 * j22,
        ]
    };

    let mut sum_formula = vec![0.0; t_grid.len()];
    let mut sum_jacobian = vec![0.0; t_grid.len()];
    for start in s0 {
        let mut y = [start[0], start[1], 0.0, 1.0, 0.0, 0.0, 1.0];
        let mut t = 0.0;
        for (k, &tk) in t_grid.iter().enumerate() {
            let res = drive(&rhs, y, t, tk, &opts.adaptive(), |_, _| None::<()>);
            if !matches!(res.outcome, Outcome::ReachedEnd)
                || res.y.iter().any(|c| !c.is_finite())
            {
                return Err(FlowError::OrbitEscape { t: res.t });
            }
            y = res.y;
            t = tk;
            sum_formula[k] += y[2].exp();
            sum_jacobian[k] += y[3] * y[6] - y[4] * y[5];
        }
    }
    let n = s0.len() as f64;
    let vol_formula: Vec<f64> = sum_formula.iter().map(|s| s / n).collect();
    let vol_jacobian: Vec<f64> = sum_jacobian.iter().map(|s| s / n).collect();
    let max_rel_err = vol_formula
        .iter()
        .zip(&vol_jacobian)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1e-300))
        .fold(0.0, f64::max);
    Ok(VolumeReport {
        t_grid: t_grid.to_vec(),
        vol_formula,
        vol_jacobian,
        max_rel_err,
    })
}

/// Result of co-integrating the rescaled field f*Z with the clock ODE
/// dr/dt = f(orbit(t)): pairs (t, r) plus the rescaled orbit's end point,
/// so callers can close the loop by re-integrating Z for time r.
#[derive(Clone, Debug)]
pub struct ReparamTrace {
    pub pairs: Vec<(f64, f64)>,
    pub end_point: Point,
}

/// Integrates the orbit of f*Z together with r' = f along it; the returned
/// r satisfies flow_{t}^{fZ}(p0) = flow_{r(t)}^{Z}(p0) up to integrator
/// tolerance. Fails if f is not strictly positive along the orbit.
pub fn reparametrize(
    f: &Poly,
    md: &MartinetData,
    p0: &Point,
    t_end: f64,
    opts: &IntegratorOpts,
) -> Result<ReparamTrace, FlowError> {
    opts.validate();
    let model = SurfaceModel::new(md);
    let fc = f.compile();
    if fc.eval(p0) <= 0.0 {
        return Err(FlowError::NonPositiveFactor { t: 0.0 });
    }
    let rhs = |y: &[f64; 4]| -> [f64; 4] {
        let p = [y[0], y[1], y[2]];
        let v = model.z_at(&p);
        let fv = fc.eval(&p);
        [fv * v[0], fv * v[1], fv * v[2], fv]
    };
    let mut pairs = vec![(0.0, 0.0)];
    let y0 = [p0[0], p0[1], p0[2], 0.0];
    let result = drive(
        &rhs,
        y0,
        0.0,
        t_end,
        &opts.adaptive(),
        |t, y: &mut [f64; 4]| {
            let pos = [y[0], y[1], y[2]];
            let Some(projected) = model.project(&pos, opts.projection_tol, 5) else {
                return Some(FlowError::OrbitEscape { t });
            };
            y[0] = projected[0];
            y[1] = projected[1];
            y[2] = projected[2];
            if fc.eval(&projected) <= 0.0 {
                return Some(FlowError::NonPositiveFactor { t });
            }
            pairs.push((t, y[3]));
            None
        },
    );
    match result.outcome {
        Outcome::ReachedEnd => Ok(ReparamTrace {
            pairs,
            end_point: [result.y[0], result.y[1], result.y[2]],
        }),
        Outcome::Stopped(err) => Err(err),
        Outcome::StepUnderflow | Outcome::MaxSteps => {
            Err(FlowError::OrbitEscape { t: result.t })
        }
    }
}
