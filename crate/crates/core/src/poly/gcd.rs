//! Multivariate gcd by recursive content/primitive-part reduction with a
//! subresultant polynomial remainder sequence in one variable at a time, and
//! the squarefree reduction built on it. Inputs are desk-scale (degree on the
//! order of a dozen), so simplicity and exactness win over asymptotics.

use super::{Poly, PolyError, NVARS};

/// A greatest common divisor, normalized to primitive integer coefficients
/// with a positive leading coefficient under graded lex.
pub fn gcd(p: &Poly, q: &Poly) -> Poly {
    // Powers of the Laurent variable are units; strip them first.
    let p = strip_laurent_units(p);
    let q = strip_laurent_units(q);
    gcd_ordinary(&p, &q)
}

fn strip_laurent_units(p: &Poly) -> Poly {
    match p.laurent_var() {
        Some(v) if p.min_exponent(v) < 0 => p.mul_var_power(v, -p.min_exponent(v)),
        _ => p.clone(),
    }
}

fn gcd_ordinary(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() {
        return q.normalize();
    }
    if q.is_zero() {
        return p.normalize();
    }
    if p.is_constant() || q.is_constant() {
        return Poly::one();
    }
    let v = (0..NVARS)
        .find(|&v| p.degree_in(v) > 0 || q.degree_in(v) > 0)
        .expect("non-constant inputs involve a variable");
    let pu = to_uni(p, v);
    let qu = to_uni(q, v);
    let cp = content(&pu);
    let cq = content(&qu);
    let c = gcd_ordinary(&cp, &cq);
    let pp = divide_coeffs(&pu, &cp);
    let qq = divide_coeffs(&qu, &cq);
    if deg(&pp).unwrap_or(0) == 0 || deg(&qq).unwrap_or(0) == 0 {
        return c;
    }
    let g_v = subresultant_gcd(pp, qq, v);
    (&c * &g_v).normalize()
}

/// The squarefree part p / gcd(p, dp/dx1, dp/dx2, dp/dx3), normalized:
/// the product of the distinct irreducible factors of `p`.
pub fn squarefree_part(p: &Poly) -> Result<Poly, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    if !p.is_ordinary() {
        return Err(PolyError::LaurentInput);
    }
    let mut g = p.clone();
    for v in 0..NVARS {
        g = gcd(&g, &p.diff(v));
    }
    let part = p.divide_exact(&g).expect("gcd divides its argument");
    Ok(part.normalize())
}

// Dense univariate view in variable `v`; coefficients do not involve `v`.
fn to_uni(p: &Poly, v: usize) -> Vec<Poly> {
    let d = p.degree_in(v).max(0) as usize;
    let mut coeffs = vec![Poly::zero(); d + 1];
    for (m, c) in p.terms() {
        let e = m.0[v] as usize;
        let mut rest = m.0;
        rest[v] = 0;
        coeffs[e] = &coeffs[e] + &Poly::monomial(super::Mono(rest), c.clone());
    }
    trim(&mut coeffs);
    coeffs
}

fn from_uni(coeffs: &[Poly], v: usize) -> Poly {
    let mut acc = Poly::zero();
    for (e, c) in coeffs.iter().enumerate() {
        acc = &acc + &c.mul_var_power(v, e as i32);
    }
    acc
}

fn trim(coeffs: &mut Vec<Poly>) {
    while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
}

fn deg(coeffs: &[Poly]) -> Option<usize> {
    if coeffs.is_empty() {
        None
    } else {
        Some(coeffs.len() - 1)
    }
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for c in coeffs {
        acc = gcd_ordinary(&acc, c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn divide_coeffs(coeffs: &[Poly], d: &Poly) -> Vec<Poly> {
    coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                Poly::zero()
            } else {
                c.divide_exact(d).expect("content divides coefficients")
            }
        })
        .collect()
}

fn scale_uni(coeffs: &[Poly], f: &Poly) -> Vec<Poly> {
    let mut out: Vec<Poly> = coeffs.iter().map(|c| c * f).collect();
    trim(&mut out);
    out
}

fn shift_uni(coeffs: &[Poly], k: usize) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); k];
    out.extend_from_slice(coeffs);
    out
}

fn sub_uni(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] = &out[i] + c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = &out[i] - c;
    }
    trim(&mut out);
    out
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a modulo b.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = deg(b).expect("nonzero divisor");
    let lcb = b[db].clone();
    let mut r = a.to_vec();
    trim(&mut r);
    let mut e = deg(&r).map(|da| da as i64 - db as i64 + 1).unwrap_or(0);
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let lcr = r[dr].clone();
        r = sub_uni(&scale_uni(&r, &lcb), &scale_uni(&shift_uni(b, dr - db), &lcr));
        e -= 1;
    }
    for _ in 0..e.max(0) {
        r = scale_uni(&r, &lcb);
    }
    r
}

/// Subresultant PRS on primitive inputs; returns the primitive gcd in `v`.
fn subresultant_gcd(mut a: Vec<Poly>, mut b: Vec<Poly>, v: usize) -> Poly {
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let da = deg(&a).expect("nonzero");
        let db = deg(&b).expect("nonzero");
        let d = da - db;
        let r = prem(&a, &b);
        if r.is_empty() {
            let full = from_uni(&b, v);
            let cont = content(&b);
            return full.divide_exact(&cont).expect("content divides").normalize();
        }
        if deg(&r) == Some(0) {
            return Poly::one();
        }
        let divisor = &g * &h.pow(d as u32);
        a = b;
        b = r
            .iter()
            .map(|c| {
                if c.is_zero() {
                    Poly::zero()
                } else {
                    c.divide_exact(&divisor)
                        .expect("subresultant division is exact")
                }
            })
            .collect();
        trim(&mut b);
        g = a[deg(&a).expect("nonzero")].clone();
        h = match d {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(d as u32)
                .divide_exact(&h.pow(d as u32 - 1))
                .expect("subresultant h update is exact"),
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn monomial_gcd() {
        assert_eq!(gcd(&p("x^2*y"), &p("x*y^2")), p("x*y"));
    }

    #[test]
    fn gcd_with_zero_normalizes() {
        assert_eq!(gcd(&p("-2*x"), &Poly::zero()), p("x"));
        assert_eq!(gcd(&Poly::zero(), &p("4*x^2+2*x")), p("2*x^2+x"));
    }

    #[test]
    fn gcd_of_products() {
        // verified by multiplying back
        let g = gcd(&p("(x+y)^2"), &p("(x+y)*(x-y)"));
        assert_eq!(g, p("x+y"));
        assert_eq!(p("(x+y)^2").divide_exact(&g).unwrap(), p("x+y"));
        assert_eq!(p("(x+y)*(x-y)").divide_exact(&g).unwrap(), p("x-y"));
    }

    #[test]
    fn gcd_three_vars() {
        let a = &p("y^2 - x^2*(x+z)") * &p("x*z - 1");
        let b = &p("y^2 - x^2*(x+z)") * &p("x + y + z");
        assert_eq!(gcd(&a, &b), p("y^2 - x^2*(x+z)").normalize());
    }

    #[test]
    fn coprime_gcd_is_one() {
        assert_eq!(gcd(&p("x^2+1"), &p("y+z")), Poly::one());
        assert_eq!(gcd(&p("3"), &p("x")), Poly::one());
    }

    #[test]
    fn squarefree_examples() {
        // w^2 (1 - u^2 - v^2) loses one power of w
        let q = &p("x3^2") * &p("1 - x1^2 - x2^2");
        let sf = squarefree_part(&q).unwrap();
        assert_eq!(sf, (&p("x3") * &p("1 - x1^2 - x2^2")).normalize());
        assert_eq!(squarefree_part(&p("x+y")).unwrap(), p("x+y"));
        assert_eq!(squarefree_part(&p("(2*x1)^2")).unwrap(), p("x1"));
        assert_eq!(
            squarefree_part(&p("x1^2*(1-x2)")).unwrap(),
            p("x1*(1-x2)").normalize()
        );
    }

    #[test]
    fn squarefree_is_idempotent() {
        let q = p("(x+y)^3*(x-z)^2*(y+1)");
        let s1 = squarefree_part(&q).unwrap();
        let s2 = squarefree_part(&s1).unwrap();
        assert_eq!(s1, s2);
        assert!(q.divide_exact(&s1).is_ok());
    }

    #[test]
    fn squarefree_rejects_zero() {
        assert_eq!(squarefree_part(&Poly::zero()), Err(PolyError::ZeroInput));
    }
}
