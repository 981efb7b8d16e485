//! Polynomial vector fields on 3-space: Lie derivatives and brackets,
//! Euclidean divergence, Jacobians, and pointwise evaluation.

use crate::poly::{Compiled, Poly, NVARS};
use crate::scalar::Scalar;
use crate::Point;
use std::fmt;
use std::ops::{Add, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VecField {
    comps: [Poly; NVARS],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("pole: the Laurent variable x{} vanishes at the evaluation point", var + 1)]
    Pole { var: usize },
    #[error("evaluation point has a non-finite coordinate")]
    NonFinitePoint,
}

impl VecField {
    pub fn new(comps: [Poly; NVARS]) -> VecField {
        // Touching all three pairs validates Laurent compatibility.
        let _ = comps.iter().fold(None, |acc, c| {
            match (acc, c.laurent_var()) {
                (None, v) => v,
                (v, None) => v,
                (Some(i), Some(j)) => {
                    assert_eq!(i, j, "component Laurent variables disagree");
                    Some(i)
                }
            }
        });
        VecField { comps }
    }

    pub fn zero() -> VecField {
        VecField::default()
    }

    /// The coordinate field d/dx{i+1}.
    pub fn unit(i: usize) -> VecField {
        let mut comps: [Poly; NVARS] = Default::default();
        comps[i] = Poly::one();
        VecField::new(comps)
    }

    pub fn comps(&self) -> &[Poly; NVARS] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn laurent_var(&self) -> Option<usize> {
        self.comps.iter().find_map(|c| c.laurent_var())
    }

    pub fn is_ordinary(&self) -> bool {
        self.comps.iter().all(|c| c.is_ordinary())
    }

    /// Smallest exponent of `var` across components (0 when absent).
    pub fn min_exponent(&self, var: usize) -> i32 {
        self.comps
            .iter()
            .map(|c| c.min_exponent(var))
            .min()
            .unwrap_or(0)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> VecField {
        VecField::new([f(&self.comps[0]), f(&self.comps[1]), f(&self.comps[2])])
    }

    pub fn scale_poly(&self, f: &Poly) -> VecField {
        self.map(|c| c * f)
    }

    /// Lie derivative V.f = sum_i V_i df/dx_i.
    pub fn lie_derivative(&self, f: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for i in 0..NVARS {
            acc = &acc + &(&self.comps[i] * &f.diff(i));
        }
        acc
    }

    /// Lie bracket [V, W], component k = sum_i V_i dW_k/dx_i - W_i dV_k/dx_i.
    pub fn lie_bracket(&self, w: &VecField) -> VecField {
        let mut comps: [Poly; NVARS] = Default::default();
        for k in 0..NVARS {
            comps[k] = &self.lie_derivative(&w.comps[k]) - &w.lie_derivative(&self.comps[k]);
        }
        VecField::new(comps)
    }

    /// Euclidean divergence sum_i dV_i/dx_i.
    pub fn divergence(&self) -> Poly {
        let mut acc = Poly::zero();
        for i in 0..NVARS {
            acc = &acc + &self.comps[i].diff(i);
        }
        acc
    }

    /// Jacobian matrix, entry (i, j) = dV_i/dx_j.
    pub fn jacobian(&self) -> [[Poly; NVARS]; NVARS] {
        let mut m: [[Poly; NVARS]; NVARS] = Default::default();
        for i in 0..NVARS {
            for j in 0..NVARS {
                m[i][j] = self.comps[i].diff(j);
            }
        }
        m
    }

    pub fn eval<S: Scalar>(&self, p: &[S; NVARS]) -> Option<[S; NVARS]> {
        Some([
            self.comps[0].eval(p)?,
            self.comps[1].eval(p)?,
            self.comps[2].eval(p)?,
        ])
    }

    pub fn eval_f64(&self, p: &Point) -> Result<[f64; NVARS], FieldError> {
        if p.iter().any(|c| !c.is_finite()) {
            return Err(FieldError::NonFinitePoint);
        }
        if let Some(v) = self.laurent_var() {
            if self.min_exponent(v) < 0 && p[v] == 0.0 {
                return Err(FieldError::Pole { var: v });
            }
        }
        Ok(self.eval::<f64>(p).expect("pole was ruled out"))
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField {
            comps: [
                self.comps[0].compile(),
                self.comps[1].compile(),
                self.comps[2].compile(),
            ],
        }
    }

    pub fn substitute(&self, images: [&Poly; NVARS]) -> VecField {
        self.map(|c| c.substitute(images))
    }
}

impl Add for &VecField {
    type Output = VecField;
    fn add(self, rhs: &VecField) -> VecField {
        VecField::new([
            &self.comps[0] + &rhs.comps[0],
            &self.comps[1] + &rhs.comps[1],
            &self.comps[2] + &rhs.comps[2],
        ])
    }
}

impl Sub for &VecField {
    type Output = VecField;
    fn sub(self, rhs: &VecField) -> VecField {
        self + &(-rhs)
    }
}

impl Neg for &VecField {
    type Output = VecField;
    fn neg(self) -> VecField {
        self.map(|c| -c)
    }
}

impl fmt::Display for VecField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) d/dx1 + ({}) d/dx2 + ({}) d/dx3",
            self.comps[0], self.comps[1], self.comps[2]
        )
    }
}

/// Determinant of a 3x3 polynomial matrix (row-major).
pub fn det3(m: &[[Poly; NVARS]; NVARS]) -> Poly {
    let c0 = &(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1]);
    let c1 = &(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]);
    let c2 = &(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0]);
    &(&(&m[0][0] * &c0) - &(&m[0][1] * &c1)) + &(&m[0][2] * &c2)
}

#[derive(Clone, Debug)]
pub struct CompiledField {
    comps: [Compiled; NVARS],
}

impl CompiledField {
    pub fn eval(&self, p: &Point) -> [f64; NVARS] {
        [
            self.comps[0].eval(p),
            self.comps[1].eval(p),
            self.comps[2].eval(p),
        ]
    }

    pub fn speed(&self, p: &Point) -> f64 {
        let v = self.eval(p);
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }
}
