//! Closed-form test functions on (−1, 1).
//!
//! Expressions are built from exact rationals, `x`, the four arithmetic
//! operations, integer powers, and rational powers and logarithms of affine
//! arguments `c₀ + c₁x`. Within that fragment differentiation is closed and
//! exact.

mod canon;
mod compiled;
mod eval;
mod parser;
mod print;

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Poly, Rational};
use crate::quadrature::Abscissa;

pub use canon::Canon;
pub use compiled::{Compiled, DslFunction};
pub use parser::parse;

/// `c0 + c1·x` with `c1 ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub c0: Rational,
    pub c1: Rational,
}

impl Affine {
    pub fn new(c0: Rational, c1: Rational) -> Option<Self> {
        (!c1.is_zero()).then_some(Affine { c0, c1 })
    }

    pub fn from_poly(p: &Poly) -> Option<Self> {
        match p.degree() {
            Some(1) => Affine::new(p.coeff(0), p.coeff(1)),
            _ => None,
        }
    }

    pub fn to_poly(&self) -> Poly {
        Poly::linear(self.c0.clone(), self.c1.clone())
    }

    /// Value at `a`, computed from the distance to the nearer endpoint so
    /// that `1 − x` and `1 + x` keep full relative accuracy.
    pub fn eval_at(&self, a: &Abscissa) -> f64 {
        let c0 = crate::poly::to_f64(&self.c0);
        let c1 = crate::poly::to_f64(&self.c1);
        if a.dist() < 0.5 {
            let s = a.side().sign();
            let end = crate::poly::to_f64(&(&self.c0 + &self.c1 * crate::poly::rat(s as i64)));
            end - s * c1 * a.dist()
        } else {
            c0 + c1 * a.x()
        }
    }
}

/// Abstract syntax tree of an expression in `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power of an arbitrary subexpression.
    Pow(Box<Expr>, i64),
    /// Rational power of an affine argument.
    AffinePow(Affine, Rational),
    Ln(Affine),
}

impl Expr {
    pub fn constant(q: Rational) -> Expr {
        Expr::Const(q)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n.into()))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn pow(a: Expr, n: i64) -> Expr {
        Expr::Pow(Box::new(a), n)
    }

    /// The expression for an exact polynomial, highest degree first.
    pub fn from_poly(p: &Poly) -> Expr {
        print::poly_expr(p)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::render(self))
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

/// Serialized as its printed form.
impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot evaluate {subexpr} at x = {x}: {reason}")]
pub struct EvalError {
    pub subexpr: String,
    pub x: f64,
    pub reason: String,
}

/// Simplified form: the exact canonical form when the expression admits one,
/// otherwise the tree with children simplified and constants folded.
pub fn normalize(e: &Expr) -> Expr {
    match Canon::from_expr(e) {
        Ok(c) => c.to_expr(),
        Err(_) => structural(e),
    }
}

/// Exact derivative, normalized.
pub fn differentiate(e: &Expr) -> Expr {
    match Canon::from_expr(e) {
        Ok(c) => c.derivative().to_expr(),
        Err(_) => structural(&derive_tree(e)),
    }
}

/// Value of `e` at `x`.
pub fn eval(e: &Expr, x: f64) -> Result<f64, EvalError> {
    eval::eval_tree(e, &Abscissa::new(x))
}

/// Value of `e` at an endpoint-aware abscissa.
pub fn eval_at(e: &Expr, a: &Abscissa) -> Result<f64, EvalError> {
    eval::eval_tree(e, a)
}

/// Exact coefficients (lowest degree first) when `e` is a polynomial.
pub fn as_polynomial(e: &Expr) -> Option<Poly> {
    Canon::from_expr(e).ok()?.as_polynomial()
}

fn derive_tree(e: &Expr) -> Expr {
    use Expr::*;
    match e {
        Const(_) => Expr::int(0),
        X => Expr::int(1),
        Neg(a) => Expr::neg(derive_tree(a)),
        Add(a, b) => Expr::add(derive_tree(a), derive_tree(b)),
        Sub(a, b) => Expr::sub(derive_tree(a), derive_tree(b)),
        Mul(a, b) => Expr::add(
            Expr::mul(derive_tree(a), (**b).clone()),
            Expr::mul((**a).clone(), derive_tree(b)),
        ),
        Div(a, b) => Expr::div(
            Expr::sub(
                Expr::mul(derive_tree(a), (**b).clone()),
                Expr::mul((**a).clone(), derive_tree(b)),
            ),
            Expr::pow((**b).clone(), 2),
        ),
        Pow(a, n) => Expr::mul(
            Expr::mul(Expr::int(*n), Expr::pow((**a).clone(), n - 1)),
            derive_tree(a),
        ),
        AffinePow(b, q) => Expr::mul(
            Expr::Const(q * &b.c1),
            Expr::AffinePow(b.clone(), q - Rational::one()),
        ),
        Ln(b) => Expr::div(Expr::Const(b.c1.clone()), Expr::from_poly(&b.to_poly())),
    }
}

/// Bottom-up simplification without a canonical form: each child is
/// normalized, then trivial identities and constant arithmetic are folded.
fn structural(e: &Expr) -> Expr {
    use Expr::*;
    let fold = |c: &Expr| normalize(c);
    match e {
        Const(_) | X | AffinePow(..) | Ln(_) => e.clone(),
        Neg(a) => match fold(a) {
            Const(c) => Const(-c),
            Neg(inner) => *inner,
            other => Expr::neg(other),
        },
        Add(a, b) => match (fold(a), fold(b)) {
            (Const(p), Const(q)) => Const(p + q),
            (z, o) | (o, z) if z.is_zero() => o,
            (p, q) => Expr::add(p, q),
        },
        Sub(a, b) => match (fold(a), fold(b)) {
            (Const(p), Const(q)) => Const(p - q),
            (p, z) if z.is_zero() => p,
            (z, q) if z.is_zero() => Expr::neg(q),
            (p, q) => Expr::sub(p, q),
        },
        Mul(a, b) => match (fold(a), fold(b)) {
            (Const(p), Const(q)) => Const(p * q),
            (z, _) | (_, z) if z.is_zero() => Expr::int(0),
            (u, o) | (o, u) if u.is_one() => o,
            (p, q) => Expr::mul(p, q),
        },
        Div(a, b) => match (fold(a), fold(b)) {
            (Const(p), Const(q)) if !q.is_zero() => Const(p / q),
            (z, _) if z.is_zero() => Expr::int(0),
            (p, u) if u.is_one() => p,
            (p, q) => Expr::div(p, q),
        },
        Pow(a, n) => match (fold(a), *n) {
            (_, 0) => Expr::int(1),
            (p, 1) => p,
            (Const(c), n) if !(c.is_zero() && n < 0) => {
                let r = num_traits::pow::pow(c.abs(), n.unsigned_abs() as usize);
                let r = if c.is_negative() && n % 2 != 0 { -r } else { r };
                Const(if n < 0 { r.recip() } else { r })
            }
            (p, n) => Expr::pow(p, n),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn polynomial_coefficients() {
        assert_eq!(
            as_polynomial(&p("x^2 - 1")),
            Some(Poly::from_ints(&[-1, 0, 1]))
        );
        assert_eq!(
            as_polynomial(&p("(1-x)*(1+x)")),
            Some(Poly::from_ints(&[1, 0, -1]))
        );
        assert_eq!(as_polynomial(&p("ln(1-x)")), None);
        assert_eq!(
            as_polynomial(&p("x/2 + 0.25")),
            Some(Poly::new(vec![ratio(1, 4), ratio(1, 2)]))
        );
    }

    #[test]
    fn derivative_examples() {
        let d = differentiate(&p("ln(1-x)"));
        assert_eq!(d, normalize(&p("-1/(1-x)")));
        assert_eq!(
            as_polynomial(&differentiate(&p("x^3"))),
            Some(Poly::monomial(rat(3), 2))
        );
        let d = differentiate(&p("(1-x)^(1/2)*(1+x)^(1/2)"));
        let expected = p("-x*(1-x)^(-1/2)*(1+x)^(-1/2)");
        assert_eq!(d, normalize(&expected));
        for x in [-0.7, 0.0, 0.4, 0.95] {
            let v = eval(&d, x).unwrap();
            assert!((v + x / (1.0 - x * x).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(eval(&p("ln(1-x)"), 0.0).unwrap(), 0.0);
        let v = eval(&p("(1+x)*ln(1+x)"), -1.0 + 1e-12).unwrap();
        assert!((v + 2.7633e-11).abs() < 1e-14);
        assert!(eval(&p("1/(1-x)"), 1.0).is_err());
        assert!(eval(&p("ln(1-x)"), 1.0).is_err());
    }

    #[test]
    fn ln_identities_cancel_exactly() {
        // ℓ[ln(1-x)] = -((1-x²) f')' = 1
        let f = p("ln(1-x)");
        let b1 = normalize(&Expr::mul(p("1 - x^2"), differentiate(&f)));
        assert_eq!(as_polynomial(&b1), Some(Poly::from_ints(&[-1, -1])));
        let l = normalize(&Expr::neg(differentiate(&b1)));
        assert_eq!(as_polynomial(&l), Some(Poly::one()));
    }

    #[test]
    fn structural_fallback_for_non_rational_inverse() {
        let e = p("1/ln(1-x)");
        let d = differentiate(&e);
        let x = 0.3f64;
        let expected = 1.0 / ((1.0 - x) * (1.0 - x).ln().powi(2));
        assert!((eval(&d, x).unwrap() - expected).abs() < 1e-12);
    }
}
