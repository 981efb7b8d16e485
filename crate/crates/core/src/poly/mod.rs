//! Sparse exact polynomials in the three variables (x1, x2, x3).
//!
//! Coefficients are arbitrary-precision rationals and the stored form is
//! canonical: no zero coefficients, and a fixed graded-lexicographic term
//! order (x1 > x2 > x3) for printing and normalization. One variable may be
//! designated as a Laurent variable, in which case its exponents are allowed
//! to be negative; blow-up pullbacks are the only producer of such terms.

mod fmt;
mod gcd;
mod parse;

pub use gcd::{gcd, squarefree_part};
pub use parse::ParseError;

use crate::scalar::Scalar;
use crate::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

pub const NVARS: usize = 3;

/// Exponent triple ordered graded-lexicographically with x1 > x2 > x3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub [i32; NVARS]);

impl Mono {
    pub fn total_degree(&self) -> i32 {
        self.0.iter().sum()
    }

    fn key(&self) -> (i32, [i32; NVARS]) {
        (self.total_degree(), self.0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        let mut e = [0; NVARS];
        for i in 0..NVARS {
            e[i] = self.0[i] + other.0[i];
        }
        Mono(e)
    }

    /// Componentwise difference; the divisibility check is the caller's job.
    fn div(&self, other: &Mono) -> Mono {
        let mut e = [0; NVARS];
        for i in 0..NVARS {
            e[i] = self.0[i] - other.0[i];
        }
        Mono(e)
    }

    fn divides(&self, other: &Mono) -> bool {
        (0..NVARS).all(|i| self.0[i] <= other.0[i])
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rat>,
    laurent: Option<usize>,
}

/// Equality and hashing compare the term maps only: the Laurent marker is a
/// capability, not part of the value.
impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DivideError {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("not exactly divisible")]
    NotDivisible,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("operation requires a nonzero polynomial")]
    ZeroInput,
    #[error("operation is restricted to ordinary (non-Laurent) polynomials")]
    LaurentInput,
}

fn join_laurent(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (None, v) => v,
        (v, None) => v,
        (Some(i), Some(j)) => {
            assert_eq!(i, j, "incompatible Laurent variables {i} and {j}");
            Some(i)
        }
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Poly {
        Poly::monomial(Mono([0; NVARS]), c)
    }

    pub fn int(c: i64) -> Poly {
        Poly::constant(Rat::from_integer(BigInt::from(c)))
    }

    pub fn rational(num: i64, den: i64) -> Poly {
        Poly::constant(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The variable x{i+1} for i in 0..3.
    pub fn var(i: usize) -> Poly {
        assert!(i < NVARS);
        let mut e = [0; NVARS];
        e[i] = 1;
        Poly::monomial(Mono(e), Rat::one())
    }

    pub fn monomial(m: Mono, c: Rat) -> Poly {
        let laurent = (0..NVARS).find(|&i| m.0[i] < 0);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms, laurent }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Rat)>>(
        iter: I,
        laurent: Option<usize>,
    ) -> Poly {
        let mut terms: BTreeMap<Mono, Rat> = BTreeMap::new();
        for (m, c) in iter {
            if c.is_zero() {
                continue;
            }
            for i in 0..NVARS {
                assert!(
                    m.0[i] >= 0 || laurent == Some(i),
                    "negative exponent in non-Laurent variable x{}",
                    i + 1
                );
            }
            let entry = terms.entry(m).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(&m);
            }
        }
        Poly { terms, laurent }
    }

    /// Marks `var` as the Laurent variable of this polynomial.
    pub fn with_laurent(mut self, var: usize) -> Poly {
        assert!(var < NVARS);
        self.laurent = join_laurent(self.laurent, Some(var));
        self
    }

    pub fn laurent_var(&self) -> Option<usize> {
        self.laurent
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.terms.len() == 1 && self.terms.contains_key(&Mono([0; NVARS])))
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            return self.terms.get(&Mono([0; NVARS])).cloned();
        }
        None
    }

    /// True when every exponent is non-negative.
    pub fn is_ordinary(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e >= 0))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    /// Leading term under graded lex (largest monomial).
    pub fn leading(&self) -> Option<(Mono, &Rat)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn total_degree(&self) -> i32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Minimum exponent of `var` over all terms (0 for the zero polynomial).
    pub fn min_exponent(&self, var: usize) -> i32 {
        self.terms.keys().map(|m| m.0[var]).min().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> Poly {
        Poly::from_terms(
            self.terms.iter().map(|(m, c)| (*m, f(c))),
            self.laurent,
        )
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        self.map_coeffs(|x| x * c)
    }

    /// Multiplies by the single monomial `var^k`; a negative exponent in the
    /// result sets the Laurent marker on `var`.
    pub fn mul_var_power(&self, var: usize, k: i32) -> Poly {
        if k == 0 {
            return self.clone();
        }
        let laurent = if self.min_exponent(var) + k < 0 {
            join_laurent(self.laurent, Some(var))
        } else {
            self.laurent
        };
        Poly::from_terms(
            self.terms.iter().map(|(m, c)| {
                let mut e = m.0;
                e[var] += k;
                (Mono(e), c.clone())
            }),
            laurent,
        )
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Poly {
        assert!(var < NVARS);
        Poly::from_terms(
            self.terms.iter().filter(|(m, _)| m.0[var] != 0).map(|(m, c)| {
                let mut e = m.0;
                let k = e[var];
                e[var] -= 1;
                (Mono(e), c * Rat::from_integer(BigInt::from(k)))
            }),
            self.laurent,
        )
    }

    /// Exact composition p(images); `self` and all images must be ordinary.
    pub fn substitute(&self, images: [&Poly; NVARS]) -> Poly {
        assert!(self.is_ordinary(), "substitute requires an ordinary polynomial");
        for img in &images {
            assert!(img.is_ordinary(), "substitution images must be ordinary");
        }
        let mut powers: [Vec<Poly>; NVARS] = [vec![Poly::one()], vec![Poly::one()], vec![Poly::one()]];
        for v in 0..NVARS {
            let maxe = self.degree_in(v).max(0) as usize;
            for k in 1..=maxe {
                let next = &powers[v][k - 1] * images[v];
                powers[v].push(next);
            }
        }
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for v in 0..NVARS {
                if m.0[v] > 0 {
                    term = &term * &powers[v][m.0[v] as usize];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Evaluates by direct term summation in the target scalar.
    /// Returns `None` on a pole (zero coordinate raised to a negative power).
    pub fn eval<S: Scalar>(&self, p: &[S; NVARS]) -> Option<S> {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for v in 0..NVARS {
                if m.0[v] != 0 {
                    t = t * S::powi(&p[v], m.0[v])?;
                }
            }
            acc = acc + t;
        }
        Some(acc)
    }

    pub fn eval_f64(&self, p: &[f64; NVARS]) -> Option<f64> {
        self.eval::<f64>(p)
    }

    /// Exact division: returns `r` with `q * r = self`, or `NotDivisible`.
    pub fn divide_exact(&self, q: &Poly) -> Result<Poly, DivideError> {
        if q.is_zero() {
            return Err(DivideError::ZeroDivisor);
        }
        // Shift Laurent inputs down to ordinary polynomials; powers of the
        // Laurent variable are units, so divisibility is unaffected.
        let lv = join_laurent(self.laurent, q.laurent);
        if let Some(v) = lv {
            let sp = self.min_exponent(v).min(0);
            let sq = q.min_exponent(v).min(0);
            if sp < 0 || sq < 0 {
                let p0 = self.mul_var_power(v, -sp);
                let q0 = q.mul_var_power(v, -sq);
                return p0
                    .divide_exact(&q0)
                    .map(|r| r.mul_var_power(v, sp - sq));
            }
        }
        let (quot, rem) = self.div_rem(q);
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(DivideError::NotDivisible)
        }
    }

    /// Multivariate division with remainder by a single divisor under the
    /// graded-lex order. Both polynomials must be ordinary.
    pub fn div_rem(&self, q: &Poly) -> (Poly, Poly) {
        assert!(!q.is_zero(), "division by the zero polynomial");
        assert!(self.is_ordinary() && q.is_ordinary());
        let (qm, qc) = {
            let (m, c) = q.leading().expect("nonzero divisor");
            (m, c.clone())
        };
        let mut rem_terms: Vec<(Mono, Rat)> = Vec::new();
        let mut quot_terms: Vec<(Mono, Rat)> = Vec::new();
        let mut r = self.clone();
        loop {
            let Some((rm, rc)) = r.leading().map(|(m, c)| (m, c.clone())) else {
                break;
            };
            if qm.divides(&rm) {
                let tm = rm.div(&qm);
                let tc = &rc / &qc;
                r = &r - &(q * &Poly::monomial(tm, tc.clone()));
                quot_terms.push((tm, tc));
            } else {
                r.terms.remove(&rm);
                rem_terms.push((rm, rc));
            }
        }
        (
            Poly::from_terms(quot_terms, None),
            Poly::from_terms(rem_terms, None),
        )
    }

    /// Normal form modulo the principal ideal (m): the division remainder.
    pub fn reduce_mod(&self, m: &Poly) -> Poly {
        self.div_rem(m).1
    }

    /// Scales to integer coprime coefficients with a positive leading
    /// coefficient under graded lex. The zero polynomial stays zero.
    pub fn normalize(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let mut factor = Rat::new(den_lcm, num_gcd);
        let (_, lead) = self.leading().expect("nonzero");
        if (lead * &factor).is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Pre-converts coefficients to doubles for tight evaluation loops.
    pub fn compile(&self) -> Compiled {
        Compiled {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (f64::from_rational(c), m.0))
                .collect(),
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let laurent = join_laurent(self.laurent, rhs.laurent);
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let entry = terms.entry(*m).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Poly { terms, laurent }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.map_coeffs(|c| -c)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let laurent = join_laurent(self.laurent, rhs.laurent);
        let mut terms: BTreeMap<Mono, Rat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let entry = terms.entry(m).or_insert_with(Rat::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&m);
                }
            }
        }
        Poly { terms, laurent }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                $trait::$method(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// A polynomial lowered to double-precision coefficients for hot loops.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<(f64, [i32; NVARS])>,
}

impl Compiled {
    pub fn eval(&self, p: &[f64; NVARS]) -> f64 {
        let mut acc = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for v in 0..NVARS {
                if e[v] != 0 {
                    t *= p[v].powi(e[v]);
                }
            }
            acc += t;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn canonical_zero_cases() {
        assert!(p("0").is_zero());
        assert_eq!(&p("x") + &p("-x"), Poly::zero());
        assert_eq!(p("(x+y)^2 - x^2 - 2*x*y - y^2"), Poly::zero());
    }

    #[test]
    fn product_identities() {
        assert_eq!(&p("x+y") * &p("x-y"), p("x^2 - y^2"));
        // w^2 * (1 - u^2 - v^2) with (u, v, w) = (x1, x2, x3)
        assert_eq!(
            &p("x3^2") * &p("1 - x1^2 - x2^2"),
            p("x3^2 - x1^2*x3^2 - x2^2*x3^2")
        );
    }

    #[test]
    fn diff_power_rule() {
        assert_eq!(p("y^2 - x^3 - x^2*z").diff(0), p("-3*x^2 - 2*x*z"));
        assert_eq!(Poly::int(7).diff(1), Poly::zero());
        assert_eq!(p("x3^2 - x1^2 - x2^2").diff(2), p("2*x3"));
    }

    #[test]
    fn substitute_conical_chart() {
        let h = p("x3^2 - x1^2 - x2^2");
        let img = [&p("x1*x3"), &p("x2*x3"), &p("x3")];
        assert_eq!(h.substitute(img), p("x3^2 - x1^2*x3^2 - x2^2*x3^2"));
        let q = p("y^2 - x^2*(x+z)");
        assert_eq!(q.substitute([&Poly::var(0), &Poly::var(1), &Poly::var(2)]), q);
        // independent hand expansion: (x2 x3)^2 - (x1 x3)^2 (x1 x3 + x3)
        assert_eq!(
            q.substitute(img),
            p("x2^2*x3^2 - x1^3*x3^3 - x1^2*x3^3")
        );
    }

    #[test]
    fn exact_division() {
        let total = p("x3^2 - x1^2*x3^2 - x2^2*x3^2");
        assert_eq!(
            total.divide_exact(&p("x3^2")).unwrap(),
            p("1 - x1^2 - x2^2")
        );
        assert_eq!(p("x^2-y^2").divide_exact(&Poly::one()).unwrap(), p("x^2-y^2"));
        assert_eq!(
            p("x^2 - y^2").divide_exact(&p("x + z")),
            Err(DivideError::NotDivisible)
        );
        assert_eq!(
            p("x").divide_exact(&Poly::zero()),
            Err(DivideError::ZeroDivisor)
        );
    }

    #[test]
    fn laurent_division_shifts_units() {
        // (x2/x1) * x1^2 stays divisible by x1 in the Laurent ring.
        let a = p("x2").mul_var_power(0, -1); // x2 * x1^-1
        let b = &a * &p("x1^2"); // x1 * x2
        let q = b.divide_exact(&p("x1")).unwrap();
        assert_eq!(q, p("x2"));
        let back = b.divide_exact(&a).unwrap();
        assert_eq!(back, p("x1^2"));
    }

    #[test]
    fn normalization_is_primitive_positive() {
        assert_eq!(p("4*x1^2").normalize(), p("x1^2"));
        assert_eq!(p("-2*x1").normalize(), p("x1"));
        let h = p("y^2 - x^2*(x+z)");
        // leading graded-lex term is -x1^3, so the sign flips
        assert_eq!(h.normalize(), p("x^3 + x^2*z - y^2"));
        assert_eq!(p("1/3*x - 1/6").normalize(), p("2*x - 1"));
    }

    #[test]
    fn reduce_mod_ideal() {
        let h = p("y^2 - x^3 - x^2*z");
        // y^4 = (h + x^3 + x^2 z)^2 reduces to (x^3 + x^2 z)^2 mod h
        let r = p("y^4").reduce_mod(&h.normalize());
        assert_eq!(r, p("(x^3 + x^2*z)^2").reduce_mod(&h.normalize()));
        assert_eq!(
            (&p("x2^2") * &h).reduce_mod(&h),
            Poly::zero()
        );
    }

    #[test]
    fn eval_both_scalars() {
        let h = p("y^2 - x^2*(x+z)");
        assert_eq!(h.eval_f64(&[1.0, 1.0, 0.0]).unwrap(), 0.0);
        let exact = h
            .eval::<Rat>(&[
                Rat::from_integer(1.into()),
                Rat::from_integer(1.into()),
                Rat::zero(),
            ])
            .unwrap();
        assert!(exact.is_zero());
        // pole detection
        let l = p("x2").mul_var_power(0, -1);
        assert!(l.eval_f64(&[0.0, 1.0, 1.0]).is_none());
        assert_eq!(l.eval_f64(&[2.0, 1.0, 1.0]).unwrap(), 0.5);
    }

    #[test]
    fn compiled_matches_eval() {
        let q = p("1/3*y^3 - x^2*y*(x+z)");
        let c = q.compile();
        let pt = [0.3, -0.7, 1.1];
        assert!((c.eval(&pt) - q.eval_f64(&pt).unwrap()).abs() < 1e-15);
    }
}
