//! Deterministic printing: graded-lex term order (descending), explicit `*`
//! and `^`, coefficients as reduced integer or `num/den` literals. The output
//! re-parses to the same canonical polynomial.

use super::{Poly, NVARS};
use num_traits::{One, Signed};
use std::fmt;

const VAR_NAMES: [&str; NVARS] = ["x1", "x2", "x3"];

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const_mono = m.0.iter().all(|&e| e == 0);
            if is_const_mono {
                write!(f, "{mag}")?;
            } else {
                let mut lead = true;
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                    lead = false;
                }
                for v in 0..NVARS {
                    let e = m.0[v];
                    if e == 0 {
                        continue;
                    }
                    if !lead {
                        write!(f, "*")?;
                    }
                    lead = false;
                    if e == 1 {
                        write!(f, "{}", VAR_NAMES[v])?;
                    } else {
                        write!(f, "{}^{}", VAR_NAMES[v], e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::Poly;

    #[test]
    fn prints_graded_lex_descending() {
        let p = Poly::parse("y^2 - x^2*(x+z)").unwrap();
        assert_eq!(p.to_string(), "-x1^3 - x1^2*x3 + x2^2");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::parse("1/3*y^3 - 2").unwrap().to_string(), "1/3*x2^3 - 2");
    }

    #[test]
    fn laurent_exponents_print_and_reparse() {
        let l = Poly::parse("x2").unwrap().mul_var_power(0, -2);
        assert_eq!(l.to_string(), "x1^-2*x2");
        let back = Poly::parse_laurent(&l.to_string(), 0).unwrap();
        assert_eq!(back, l);
    }
}
