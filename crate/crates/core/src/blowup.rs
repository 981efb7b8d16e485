//! Real blow-up directional charts, total/strict/weighted transforms with
//! exceptional-exponent bookkeeping, Laurent pullbacks of vector fields, and
//! the divergence-compatibility verifier.
//!
//! The engine is single-chart: a directional chart substitutes
//! `u_i = x_i * x_j` over the center, `u_j = +/- x_j`, identity elsewhere,
//! on the half-space `x_j >= 0`. Sequences of blow-ups are expressed as chart
//! compositions chosen by the caller; there is no automatic center selection.
//! The exceptional function in a chart is exactly `x_j`.

use crate::martinet::{characteristic_field, Distribution, MartinetError};
use crate::poly::{Poly, NVARS};
use crate::vfield::{det3, VecField};
use crate::{Box3, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BlowupError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("transform of the zero polynomial is undefined")]
    ZeroInput,
    #[error("the generator does not vanish on the center (exceptional exponent is zero)")]
    NoExceptionalFactor,
    #[error("internal decomposition failure: residual not divisible by the strict transform")]
    DecompositionResidual,
    #[error("no admissible samples on the strict-transform surface")]
    NoAdmissibleSamples,
    #[error(transparent)]
    Martinet(#[from] MartinetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn as_poly(self) -> Poly {
        match self {
            Sign::Plus => Poly::one(),
            Sign::Minus => -Poly::one(),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A directional blow-up chart with its exceptional bookkeeping.
#[derive(Clone, Debug)]
pub struct ChartMap {
    center: Vec<usize>,
    direction: usize,
    sign: Sign,
    images: [Poly; NVARS],
    beta: u32,
}

/// Serializable chart descriptor (1-based variable indices).
#[derive(Clone, Debug, Serialize)]
pub struct ChartSpec {
    pub center: Vec<usize>,
    pub j: usize,
    pub sign: Sign,
}

impl ChartMap {
    /// Builds the directional chart for a center of codimension 2 or 3 and a
    /// direction variable `j` inside the center (0-based indices).
    pub fn new(center: &[usize], j: usize, sign: Sign) -> Result<Self, BlowupError> {
        let mut center: Vec<usize> = center.to_vec();
        center.sort_unstable();
        center.dedup();
        if !(center.len() == 2 || center.len() == 3) {
            return Err(BlowupError::InvalidChart(
                "center must consist of 2 or 3 distinct variables".to_string(),
            ));
        }
        if center.iter().any(|&v| v >= NVARS) {
            return Err(BlowupError::InvalidChart(
                "center variables must be among x1, x2, x3".to_string(),
            ));
        }
        if !center.contains(&j) {
            return Err(BlowupError::InvalidChart(format!(
                "direction x{} must belong to the center",
                j + 1
            )));
        }
        let mut images: [Poly; NVARS] = Default::default();
        for i in 0..NVARS {
            images[i] = if i == j {
                &sign.as_poly() * &Poly::var(j)
            } else if center.contains(&i) {
                &Poly::var(i) * &Poly::var(j)
            } else {
                Poly::var(i)
            };
        }
        let beta = (center.len() - 1) as u32;
        let chart = ChartMap {
            center,
            direction: j,
            sign,
            images,
            beta,
        };
        let det = det3(&chart.jacobian());
        let expected = Poly::var(j).pow(beta);
        debug_assert!(det == expected || det == -expected);
        Ok(chart)
    }

    /// The degenerate no-blow-up chart (alpha = beta = 0).
    pub fn identity() -> Self {
        ChartMap {
            center: Vec::new(),
            direction: 0,
            sign: Sign::Plus,
            images: [Poly::var(0), Poly::var(1), Poly::var(2)],
            beta: 0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.center.is_empty()
    }

    pub fn center(&self) -> &[usize] {
        &self.center
    }

    /// The exceptional variable: the divisor is {x_j = 0} in this chart.
    pub fn exceptional_var(&self) -> usize {
        self.direction
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn images(&self) -> &[Poly; NVARS] {
        &self.images
    }

    pub fn jacobian(&self) -> [[Poly; NVARS]; NVARS] {
        let mut m: [[Poly; NVARS]; NVARS] = Default::default();
        for i in 0..NVARS {
            for k in 0..NVARS {
                m[i][k] = self.images[i].diff(k);
            }
        }
        m
    }

    /// Numeric evaluation of the chart map.
    pub fn push_forward(&self, p: &Point) -> Point {
        [
            self.images[0].eval_f64(p).expect("ordinary image"),
            self.images[1].eval_f64(p).expect("ordinary image"),
            self.images[2].eval_f64(p).expect("ordinary image"),
        ]
    }

    pub fn spec(&self) -> ChartSpec {
        ChartSpec {
            center: self.center.iter().map(|v| v + 1).collect(),
            j: self.direction + 1,
            sign: self.sign,
        }
    }
}

/// The composition f o sigma.
pub fn total_transform(f: &Poly, c: &ChartMap) -> Poly {
    f.substitute([&c.images[0], &c.images[1], &c.images[2]])
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    pub total: Poly,
    /// Order of the total transform along the exceptional divisor.
    pub alpha: u32,
    /// total / x_j^alpha; not divisible by x_j.
    pub strict: Poly,
    /// total / x_j, defined when alpha >= 1.
    pub weighted: Option<Poly>,
}

/// Factors the total transform as x_j^alpha * strict.
pub fn strict_transform(f: &Poly, c: &ChartMap) -> Result<TransformResult, BlowupError> {
    if f.is_zero() {
        return Err(BlowupError::ZeroInput);
    }
    let total = total_transform(f, c);
    let j = c.direction;
    let alpha = total.min_exponent(j).max(0) as u32;
    let strict = total.mul_var_power(j, -(alpha as i32));
    let weighted = (alpha >= 1).then(|| total.mul_var_power(j, -1));
    Ok(TransformResult {
        total,
        alpha,
        strict,
        weighted,
    })
}

/// Pullback dsigma^{-1}(V o sigma): exact because the chart Jacobian has a
/// monomial determinant +/- x_j^beta. Components are Laurent in x_j, with
/// pole order bounded by 1 + codim(center).
pub fn pullback_vecfield(v: &VecField, c: &ChartMap) -> VecField {
    assert!(v.is_ordinary(), "pullback expects an ordinary field");
    let jac = c.jacobian();
    let adj = adjugate(&jac);
    let composed = v.substitute([&c.images[0], &c.images[1], &c.images[2]]);
    let j = c.direction;
    let det = det3(&jac);
    let det_negative = det
        .leading()
        .map(|(_, coeff)| num_traits::Signed::is_negative(coeff))
        .unwrap_or(false);
    let mut comps: [Poly; NVARS] = Default::default();
    for i in 0..NVARS {
        let mut acc = Poly::zero();
        for k in 0..NVARS {
            acc = &acc + &(&adj[i][k] * composed.comp(k));
        }
        // divide by det = +/- x_j^beta
        if det_negative {
            acc = -acc;
        }
        comps[i] = acc.mul_var_power(j, -(c.beta as i32));
    }
    let out = VecField::new(comps);
    debug_assert!(
        out.min_exponent(j) >= -(1 + c.center.len() as i32),
        "pullback pole order exceeds 1 + codim(center)"
    );
    out
}

#[derive(Clone, Debug)]
pub struct VolumeFactor {
    pub beta: u32,
    /// det of the chart Jacobian; equals +/- x_j^beta.
    pub jacobian_monomial: Poly,
}

/// Exceptional exponent of the pulled-back volume form and the symbolic
/// Jacobian determinant certifying it.
pub fn volume_factor(c: &ChartMap) -> VolumeFactor {
    let det = det3(&c.jacobian());
    let expected = Poly::var(c.direction).pow(c.beta);
    assert!(
        det == expected || det == -expected,
        "chart Jacobian determinant is not +/- x_j^beta"
    );
    VolumeFactor {
        beta: c.beta,
        jacobian_monomial: det,
    }
}

fn adjugate(m: &[[Poly; NVARS]; NVARS]) -> [[Poly; NVARS]; NVARS] {
    let minor = |r: usize, cidx: usize| -> Poly {
        let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&i| i != cidx).collect();
        &(&m[rows[0]][cols[0]] * &m[rows[1]][cols[1]])
            - &(&m[rows[0]][cols[1]] * &m[rows[1]][cols[0]])
    };
    let mut adj: [[Poly; NVARS]; NVARS] = Default::default();
    for i in 0..NVARS {
        for k in 0..NVARS {
            let c = minor(k, i);
            adj[i][k] = if (i + k) % 2 == 0 { c } else { -c };
        }
    }
    adj
}

/// The characteristic field transported through a chart, decomposed as
/// zstar = ztilde + hstrict * wtilde with every identity certified by exact
/// division.
#[derive(Clone, Debug)]
pub struct TransformedCharacteristic {
    pub zstar: VecField,
    pub ztilde: VecField,
    pub wtilde: VecField,
    pub hstrict: Poly,
    pub alpha: u32,
    pub beta: u32,
}

impl TransformedCharacteristic {
    /// Whether ztilde extends smoothly over the exceptional divisor
    /// (no negative exponents survive the exceptional multiplication).
    pub fn ztilde_is_smooth(&self) -> bool {
        self.ztilde.is_ordinary()
    }
}

/// Public operation: requires alpha >= 1 (the center must lie in {h = 0}).
pub fn transformed_characteristic(
    d: &Distribution,
    h: &Poly,
    c: &ChartMap,
) -> Result<TransformedCharacteristic, BlowupError> {
    assemble_transformed(d, h, c, false)
}

fn assemble_transformed(
    d: &Distribution,
    h: &Poly,
    c: &ChartMap,
    allow_alpha_zero: bool,
) -> Result<TransformedCharacteristic, BlowupError> {
    let tr = strict_transform(h, c)?;
    if tr.alpha == 0 && !allow_alpha_zero {
        return Err(BlowupError::NoExceptionalFactor);
    }
    let hstrict = tr.strict;
    let xs = pullback_vecfield(d.x(), c);
    let ys = pullback_vecfield(d.y(), c);
    let alpha_mono = Poly::var(c.direction).pow(tr.alpha);
    let xh = xs.lie_derivative(&hstrict);
    let yh = ys.lie_derivative(&hstrict);
    let ztilde = (&ys.scale_poly(&xh) - &xs.scale_poly(&yh)).scale_poly(&alpha_mono);
    let z = characteristic_field(d, h)?;
    let zstar = pullback_vecfield(&z, c);
    let residual = &zstar - &ztilde;
    let mut wcomps: [Poly; NVARS] = Default::default();
    for i in 0..NVARS {
        wcomps[i] = residual
            .comp(i)
            .divide_exact(&hstrict)
            .map_err(|_| BlowupError::DecompositionResidual)?;
    }
    let wtilde = VecField::new(wcomps);
    // certificate: alpha * (wtilde . hstrict) + ztilde . alpha = 0 exactly
    let lhs = &(&alpha_mono * &wtilde.lie_derivative(&hstrict))
        + &ztilde.lie_derivative(&alpha_mono);
    if !lhs.is_zero() {
        return Err(BlowupError::DecompositionResidual);
    }
    Ok(TransformedCharacteristic {
        zstar,
        ztilde,
        wtilde,
        hstrict,
        alpha: tr.alpha,
        beta: c.beta,
    })
}

#[derive(Clone, Debug)]
pub struct CompatOpts {
    /// Sampling region in chart coordinates; the exceptional coordinate is
    /// additionally clipped to at least `min_exceptional`.
    pub region: Box3,
    pub min_exceptional: f64,
}

impl Default for CompatOpts {
    fn default() -> Self {
        CompatOpts {
            region: Box3::new([-1.0, -1.0, -1.0], [1.0, 1.0, 1.0]),
            min_exceptional: 0.1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatReport {
    pub max_abs_err: f64,
    pub n: usize,
    pub chart: ChartSpec,
    pub alpha: u32,
    pub beta: u32,
}

/// Samples the strict-transform surface away from the exceptional divisor
/// and compares the divergence of the transported field with respect to the
/// weighted chart volume against the pushed-forward ambient divergence.
///
/// The weighted volume is (1/xi) i_N((beta/alpha) lambda) with
/// xi = |grad hstrict| and lambda the chart's Euclidean volume; its
/// divergence is assembled from the codimension-one formula plus the
/// logarithmic-derivative shifts of the weight.
pub fn verify_div_compat(
    d: &Distribution,
    h: &Poly,
    c: &ChartMap,
    n: usize,
    seed: u64,
    opts: &CompatOpts,
) -> Result<CompatReport, BlowupError> {
    assert!(n >= 1);
    let tc = assemble_transformed(d, h, c, true)?;
    let j = c.direction;
    let exp_shift = tc.beta as i64 - tc.alpha as i64;

    let grad = [
        tc.hstrict.diff(0),
        tc.hstrict.diff(1),
        tc.hstrict.diff(2),
    ];
    let grad_sq = &(&(&grad[0] * &grad[0]) + &(&grad[1] * &grad[1])) + &(&grad[2] * &grad[2]);
    let hs_c = tc.hstrict.compile();
    let grad_c = [grad[0].compile(), grad[1].compile(), grad[2].compile()];
    let grad_sq_c = grad_sq.compile();
    let div_zt_c = tc.ztilde.divergence().compile();
    let zt_dot_s_c = tc.ztilde.lie_derivative(&grad_sq).compile();
    let zt_j_c = tc.ztilde.comp(j).compile();

    let z = characteristic_field(d, h)?;
    let div_z_c = z.divergence().compile();
    let images_c = [
        c.images[0].compile(),
        c.images[1].compile(),
        c.images[2].compile(),
    ];

    let mut region = opts.region;
    if !c.is_identity() {
        region.min[j] = region.min[j].max(opts.min_exceptional);
        if region.min[j] >= region.max[j] {
            return Err(BlowupError::InvalidChart(
                "sampling region excludes the chart half-space".to_string(),
            ));
        }
    }

    let mut max_abs_err = 0.0_f64;
    let mut accepted = 0usize;
    let max_attempts = n.saturating_mul(1000);
    for attempt in 0..max_attempts {
        if accepted == n {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let candidate = region.lerp([rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()]);
        // Newton projection onto {hstrict = 0}
        let mut p = candidate;
        let mut ok = false;
        for _ in 0..60 {
            let hv = hs_c.eval(&p);
            if !hv.is_finite() {
                break;
            }
            if hv.abs() <= 1e-12 * (1.0 + crate::norm3(&p).powi(tc.hstrict.total_degree())) {
                ok = true;
                break;
            }
            let g = [grad_c[0].eval(&p), grad_c[1].eval(&p), grad_c[2].eval(&p)];
            let g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if g2 < 1e-30 {
                break;
            }
            for i in 0..3 {
                p[i] -= hv * g[i] / g2;
            }
        }
        if !ok || !region.contains(&p) {
            continue;
        }
        if !c.is_identity() && p[j] < opts.min_exceptional {
            continue;
        }
        let s = grad_sq_c.eval(&p);
        if s.sqrt() < 1e-6 {
            continue;
        }
        let correction = zt_dot_s_c.eval(&p) / (2.0 * s);
        let monomial_shift = if exp_shift == 0 {
            0.0
        } else {
            exp_shift as f64 * zt_j_c.eval(&p) / p[j]
        };
        let weight_shift = monomial_shift - correction;
        let lhs = div_zt_c.eval(&p) + correction + weight_shift;
        let pushed = [
            images_c[0].eval(&p),
            images_c[1].eval(&p),
            images_c[2].eval(&p),
        ];
        let rhs = div_z_c.eval(&pushed);
        if !lhs.is_finite() || !rhs.is_finite() {
            continue;
        }
        accepted += 1;
        max_abs_err = max_abs_err.max((lhs - rhs).abs());
    }
    if accepted == 0 {
        return Err(BlowupError::NoAdmissibleSamples);
    }
    Ok(CompatReport {
        max_abs_err,
        n: accepted,
        chart: c.spec(),
        alpha: tc.alpha,
        beta: tc.beta,
    })
}
