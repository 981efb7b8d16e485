//! Embedded Dormand-Prince 4(5) stepper and an adaptive driver for
//! autonomous systems. The driver hands every accepted state to a callback
//! that may mutate it (constraint projection) and request termination.

pub(crate) struct AdaptiveOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome<T> {
    ReachedEnd,
    Stopped(T),
    StepUnderflow,
    MaxSteps,
}

pub(crate) struct DriveResult<const N: usize, T> {
    pub t: f64,
    pub y: [f64; N],
    pub outcome: Outcome<T>,
}

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// 5th-order minus embedded 4th-order weights.
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy<const N: usize>(y: &[f64; N], h: f64, coeffs: &[f64], ks: &[[f64; N]]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks.iter()) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// One trial step: returns the 5th-order solution and the embedded error.
pub(crate) fn dopri5_step<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    let k1 = f(y);
    let k2 = f(&axpy(y, h, &A2, &[k1]));
    let k3 = f(&axpy(y, h, &A3, &[k1, k2]));
    let k4 = f(&axpy(y, h, &A4, &[k1, k2, k3]));
    let k5 = f(&axpy(y, h, &A5, &[k1, k2, k3, k4]));
    let k6 = f(&axpy(y, h, &A6, &[k1, k2, k3, k4, k5]));
    let y5 = axpy(y, h, &B5, &[k1, k2, k3, k4, k5, k6]);
    let k7 = f(&y5);
    let mut err = [0.0; N];
    for (c, k) in ERR.iter().zip([k1, k2, k3, k4, k5, k6, k7].iter()) {
        for i in 0..N {
            err[i] += h * c * k[i];
        }
    }
    (y5, err)
}

fn error_norm<const N: usize>(y: &[f64; N], y5: &[f64; N], err: &[f64; N], opts: &AdaptiveOpts) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / N as f64).sqrt()
}

fn initial_step<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y: &[f64; N],
    span: f64,
    opts: &AdaptiveOpts,
) -> f64 {
    let f0 = f(y);
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let d0 = (d0 / N as f64).sqrt();
    let d1 = (d1 / N as f64).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span).max(1e-12)
}

/// Integrates from t0 to t_end (t_end > t0). The callback runs after each
/// accepted (possibly clamped) step and may mutate the state; returning
/// `Some(x)` stops the run with `Outcome::Stopped(x)`.
pub(crate) fn drive<const N: usize, T>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t_end: f64,
    opts: &AdaptiveOpts,
    mut on_accept: impl FnMut(f64, &mut [f64; N]) -> Option<T>,
) -> DriveResult<N, T> {
    let mut t = t0;
    let mut y = y0;
    if t_end <= t0 {
        return DriveResult {
            t,
            y,
            outcome: Outcome::ReachedEnd,
        };
    }
    let mut h = initial_step(f, &y, t_end - t0, opts);
    for _ in 0..opts.max_steps {
        if t >= t_end {
            return DriveResult {
                t,
                y,
                outcome: Outcome::ReachedEnd,
            };
        }
        let clamped = h >= t_end - t;
        let h_try = if clamped { t_end - t } else { h };
        let (y5, err) = dopri5_step(f, &y, h_try);
        let finite = y5.iter().all(|v| v.is_finite()) && err.iter().all(|v| v.is_finite());
        let enorm = if finite {
            error_norm(&y, &y5, &err, opts)
        } else {
            f64::INFINITY
        };
        if enorm <= 1.0 {
            t += h_try;
            y = y5;
            if let Some(stop) = on_accept(t, &mut y) {
                return DriveResult {
                    t,
                    y,
                    outcome: Outcome::Stopped(stop),
                };
            }
            if t >= t_end {
                return DriveResult {
                    t,
                    y,
                    outcome: Outcome::ReachedEnd,
                };
            }
            let fac = if enorm == 0.0 {
                5.0
            } else {
                (0.9 * enorm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h_try * fac).max(1e-300);
        } else {
            let fac = if enorm.is_finite() {
                (0.9 * enorm.powf(-0.2)).clamp(0.1, 0.5)
            } else {
                0.25
            };
            h = h_try * fac;
        }
        if h < 1e-13 * t.abs().max(1.0) {
            return DriveResult {
                t,
                y,
                outcome: Outcome::StepUnderflow,
            };
        }
    }
    DriveResult {
        t,
        y,
        outcome: Outcome::MaxSteps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> AdaptiveOpts {
        AdaptiveOpts {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 100_000,
        }
    }

    #[test]
    fn exponential_growth() {
        let f = |y: &[f64; 1]| [y[0]];
        let r = drive(&f, [1.0], 0.0, 1.0, &opts(), |_, _| None::<()>);
        assert!(matches!(r.outcome, Outcome::ReachedEnd));
        assert!((r.y[0] - 1.0_f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let f = |y: &[f64; 2]| [y[1], -y[0]];
        let two_pi = 2.0 * std::f64::consts::PI;
        let r = drive(&f, [1.0, 0.0], 0.0, two_pi, &opts(), |_, _| None::<()>);
        assert!((r.y[0] - 1.0).abs() < 1e-8);
        assert!(r.y[1].abs() < 1e-8);
    }

    #[test]
    fn callback_stops_the_run() {
        let f = |y: &[f64; 1]| [y[0]];
        let r = drive(&f, [1.0], 0.0, 10.0, &opts(), |_, y: &mut [f64; 1]| {
            (y[0] > 2.0).then_some("grew")
        });
        assert!(matches!(r.outcome, Outcome::Stopped("grew")));
        assert!(r.y[0] > 2.0 && r.y[0] < 2.5);
    }
}
