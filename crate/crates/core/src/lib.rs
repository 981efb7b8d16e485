//! Symbolic-numeric toolkit for rank-two polynomial distributions on 3-space.
//!
//! The symbolic layer ([`poly`], [`vfield`]) works over exact rational
//! coefficients: Martinet surfaces, characteristic fields, Lie brackets and
//! blow-up transforms are computed and certified exactly. The numeric layer
//! ([`flow`], [`examples`]) integrates orbits, volume transport and homoclinic
//! chains in double precision, converting at the boundary.
//!
//! Modules map one-to-one onto the subsystems:
//! - [`poly`]: sparse exact polynomials in (x1, x2, x3) with a Laurent
//!   extension in one designated variable, parsing, gcd, squarefree reduction.
//! - [`vfield`]: polynomial vector fields, Lie derivatives/brackets,
//!   divergence, Jacobians, pointwise evaluation.
//! - [`martinet`]: Martinet surface, characteristic field, strata
//!   classification, divergence-ratio scans, singular-path classification.
//! - [`flow`]: constrained orbit integration, surface divergence, volume
//!   transport, flow reparametrization.
//! - [`blowup`]: directional blow-up charts, total/strict/weighted transforms,
//!   Laurent pullbacks, divergence-compatibility verification.
//! - [`examples`]: built-in distributions and the homoclinic-chain experiment.

pub mod blowup;
pub mod examples;
pub mod flow;
pub mod martinet;
pub mod poly;
pub mod scalar;
pub mod selftest;
pub mod svg;
pub mod vfield;

pub use num_rational::BigRational;

/// Exact coefficient type of the symbolic layer.
pub type Rat = BigRational;

/// A point of 3-space in double precision.
pub type Point = [f64; 3];

/// Axis-aligned box in 3-space.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Box3 {
    pub min: Point,
    pub max: Point,
}

impl Box3 {
    pub fn new(min: Point, max: Point) -> Self {
        assert!(
            (0..3).all(|i| min[i] <= max[i]),
            "box min must not exceed max"
        );
        Box3 { min, max }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Uniform sample from the box driven by three unit variates.
    pub fn lerp(&self, u: [f64; 3]) -> Point {
        let mut p = [0.0; 3];
        for i in 0..3 {
            p[i] = self.min[i] + u[i] * (self.max[i] - self.min[i]);
        }
        p
    }
}

pub(crate) fn norm3(p: &Point) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}
