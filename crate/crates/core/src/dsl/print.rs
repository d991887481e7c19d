//! Text rendering and conversion of canonical forms back to trees.
//!
//! Rendering is structural: parsing the output yields a tree that renders
//! to the same text.

use num_traits::{One, Signed, Zero};

use super::canon::{Canon, Term};
use super::{Affine, Expr};
use crate::poly::{fmt_rational, Poly, Rational};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Const(c) if !c.is_integer() => PRODUCT,
        Expr::Const(c) if c.is_negative() => UNARY,
        Expr::Pow(..) | Expr::AffinePow(..) => POWER,
        Expr::Const(_) | Expr::X | Expr::Ln(_) => ATOM,
    }
}

fn wrap(e: &Expr, parens: bool) -> String {
    if parens {
        format!("({})", render(e))
    } else {
        render(e)
    }
}

pub(crate) fn render(e: &Expr) -> String {
    match e {
        Expr::Const(c) => fmt_rational(c),
        Expr::X => "x".into(),
        Expr::Neg(a) => format!("-{}", wrap(a, prec(a) < UNARY)),
        Expr::Add(a, b) => format!("{} + {}", wrap(a, false), wrap(b, prec(b) <= SUM)),
        Expr::Sub(a, b) => format!("{} - {}", wrap(a, false), wrap(b, prec(b) <= SUM)),
        Expr::Mul(a, b) => format!(
            "{}*{}",
            wrap(a, prec(a) < PRODUCT),
            wrap(b, prec(b) <= PRODUCT)
        ),
        Expr::Div(a, b) => format!(
            "{}/{}",
            wrap(a, prec(a) < PRODUCT),
            wrap(b, prec(b) <= PRODUCT)
        ),
        Expr::Pow(a, n) => {
            let base = wrap(a, prec(a) < ATOM);
            if *n < 0 {
                format!("{base}^({n})")
            } else {
                format!("{base}^{n}")
            }
        }
        Expr::AffinePow(a, q) => {
            let inner = affine_expr(a);
            format!(
                "{}^({})",
                wrap(&inner, prec(&inner) < ATOM),
                fmt_rational(q)
            )
        }
        Expr::Ln(a) => format!("ln({})", render(&affine_expr(a))),
    }
}

fn monomial(c: &Rational, k: usize) -> Expr {
    let xk = match k {
        0 => return Expr::Const(c.clone()),
        1 => Expr::X,
        _ => Expr::pow(Expr::X, k as i64),
    };
    if c.is_one() {
        xk
    } else {
        Expr::mul(Expr::Const(c.clone()), xk)
    }
}

fn signed_sum(parts: impl IntoIterator<Item = (Rational, Expr)>) -> Expr {
    // parts carry a nonzero sign-bearing coefficient and the unsigned body
    let mut acc: Option<Expr> = None;
    for (sign, body) in parts {
        acc = Some(match acc {
            None if sign.is_negative() => negate_leading(body),
            None => body,
            Some(a) if sign.is_negative() => Expr::sub(a, body),
            Some(a) => Expr::add(a, body),
        });
    }
    acc.unwrap_or_else(|| Expr::int(0))
}

fn negate_leading(e: Expr) -> Expr {
    match e {
        Expr::Mul(a, b) => Expr::Mul(Box::new(negate_leading(*a)), b),
        Expr::Const(c) => Expr::Const(-c),
        other => Expr::neg(other),
    }
}

/// Polynomial with the highest degree first.
pub(crate) fn poly_expr(p: &Poly) -> Expr {
    signed_sum(
        p.coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (c.clone(), monomial(&c.abs(), k))),
    )
}

/// Affine argument with the constant first, as in `1 - x`.
pub(crate) fn affine_expr(a: &Affine) -> Expr {
    let lin = monomial(&a.c1.abs(), 1);
    if a.c0.is_zero() {
        return if a.c1.is_negative() {
            negate_leading(lin)
        } else {
            lin
        };
    }
    let c0 = Expr::Const(a.c0.clone());
    if a.c1.is_negative() {
        Expr::sub(c0, lin)
    } else {
        Expr::add(c0, lin)
    }
}

fn base_expr(b: &Poly) -> Expr {
    match Affine::from_poly(b) {
        Some(a) => affine_expr(&a),
        None => poly_expr(b),
    }
}

fn power(base: Expr, n: usize) -> Expr {
    if n == 1 {
        base
    } else {
        Expr::pow(base, n as i64)
    }
}

/// Factors of one term: signed coefficient and the product of the rest.
fn term_parts(t: &Term) -> (Rational, Vec<Expr>) {
    let mut factors = Vec::new();
    let (k0, rest) = t.poly.strip_root(&Rational::zero());
    let (k1, rest) = rest.strip_root(&Rational::one());
    let (km, rest) = rest.strip_root(&-Rational::one());
    let mut coef;
    let mut cofactor = None;
    if rest.is_constant() {
        coef = rest.coeff(0);
    } else {
        let (c, mut q) = rest.content_and_primitive();
        coef = c;
        if q.coeff(0).is_negative() {
            q = -&q;
            coef = -coef;
        }
        cofactor = Some(q);
    }
    if k1 % 2 == 1 {
        coef = -coef;
    }
    if k0 > 0 {
        factors.push(power(Expr::X, k0));
    }
    let one = Rational::one();
    if k1 > 0 {
        factors.push(power(
            affine_expr(&Affine {
                c0: one.clone(),
                c1: -one.clone(),
            }),
            k1,
        ));
    }
    if km > 0 {
        factors.push(power(
            affine_expr(&Affine {
                c0: one.clone(),
                c1: one.clone(),
            }),
            km,
        ));
    }
    if let Some(q) = cofactor {
        factors.push(poly_expr(&q));
    }
    for (b, e) in &t.pows {
        let f = if e.is_integer() {
            Expr::pow(
                base_expr(b),
                i64::try_from(e.to_integer()).expect("small exponent"),
            )
        } else {
            Expr::AffinePow(
                Affine::from_poly(b).expect("fractional powers have affine bases"),
                e.clone(),
            )
        };
        factors.push(f);
    }
    for (b, k) in &t.logs {
        let l = Expr::Ln(Affine::from_poly(b).expect("log arguments are affine"));
        factors.push(power(l, *k as usize));
    }
    (coef, factors)
}

pub(crate) fn canon_expr(c: &Canon) -> Expr {
    signed_sum(c.terms.iter().map(|t| {
        let (coef, factors) = term_parts(t);
        let mag = coef.abs();
        let mut it = factors.into_iter();
        let body = match it.next() {
            None => Expr::Const(mag),
            Some(first) => {
                let chain = it.fold(first, Expr::mul);
                if mag.is_one() {
                    chain
                } else {
                    prepend(Expr::Const(mag), chain)
                }
            }
        };
        (coef, body)
    }))
}

/// `c*f1*f2*…` kept left-associated.
fn prepend(c: Expr, chain: Expr) -> Expr {
    match chain {
        Expr::Mul(a, b) => Expr::Mul(Box::new(prepend(c, *a)), b),
        other => Expr::mul(c, other),
    }
}

#[cfg(test)]
mod tests {
    use crate::dsl::{normalize, parse};

    fn norm(s: &str) -> String {
        normalize(&parse(s).unwrap()).to_string()
    }

    #[test]
    fn normalized_text() {
        assert_eq!(norm("ln(1-x)"), "ln(1 - x)");
        assert_eq!(norm("(1+x)*ln(1+x)"), "(1 + x)*ln(1 + x)");
        assert_eq!(norm("1 - x^2"), "(1 - x)*(1 + x)");
        assert_eq!(norm("x^2 + 1"), "x^2 + 1");
        assert_eq!(norm("-1/(1-x)"), "-(1 - x)^(-1)");
        assert_eq!(norm("x/2"), "1/2*x");
        assert_eq!(norm("-3*x^3 + 2"), "-3*x^3 + 2");
        assert_eq!(norm("(1-x)^(1/2)*2"), "2*(1 - x)^(1/2)");
        assert_eq!(norm("0"), "0");
    }

    #[test]
    fn structural_rendering_round_trips() {
        for s in [
            "-x^2", "x - -x", "(x*x)*x", "x*(x*x)", "(-3)^2", "x^(-2)", "-(x + 1)", "1/2*x",
        ] {
            let e = parse(s).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap().to_string(), printed, "{s}");
        }
    }
}
