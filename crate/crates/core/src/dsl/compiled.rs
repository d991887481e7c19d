//! Fast evaluators for canonical forms, with cached derivatives.

use super::canon::Canon;
use super::eval::{eval_tree, powi};
use super::print::{poly_expr, render};
use super::{differentiate, parse, EvalError, Expr, ParseError};
use crate::poly::{rat, to_f64, Poly};
use crate::quadrature::Abscissa;

/// A polynomial expanded about `x`, about `1 − x` and about `1 + x`, so that
/// small values near a root at ±1 keep their relative accuracy.
#[derive(Clone, Debug)]
struct ShiftedPoly {
    plain: Vec<f64>,
    right: Vec<f64>,
    left: Vec<f64>,
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

impl ShiftedPoly {
    fn new(p: &Poly) -> Self {
        let f = |q: Poly| q.coeffs().iter().map(to_f64).collect();
        ShiftedPoly {
            plain: f(p.clone()),
            right: f(p.compose_affine(&rat(1), &rat(-1))),
            left: f(p.compose_affine(&rat(-1), &rat(1))),
        }
    }

    fn eval(&self, a: &Abscissa) -> f64 {
        if a.dist() < 0.5 {
            match a.side() {
                crate::quadrature::Side::Right => horner(&self.right, a.dist()),
                crate::quadrature::Side::Left => horner(&self.left, a.dist()),
            }
        } else {
            horner(&self.plain, a.x())
        }
    }
}

#[derive(Clone, Debug)]
struct Factor {
    base: ShiftedPoly,
    exp: f64,
    int: Option<i64>,
    text: String,
}

#[derive(Clone, Debug)]
pub struct CompiledTerm {
    poly: ShiftedPoly,
    pows: Vec<Factor>,
    logs: Vec<(ShiftedPoly, i32, String)>,
}

/// An evaluator: compiled canonical terms, or the raw tree when the
/// expression has no canonical form.
#[derive(Clone, Debug)]
pub enum Compiled {
    Terms(Vec<CompiledTerm>),
    Tree(Expr),
}

impl Compiled {
    pub fn new(e: &Expr) -> Self {
        match Canon::from_expr(e) {
            Ok(c) => Compiled::from_canon(&c),
            Err(_) => Compiled::Tree(e.clone()),
        }
    }

    pub fn from_canon(c: &Canon) -> Self {
        let terms = c
            .terms
            .iter()
            .map(|t| CompiledTerm {
                poly: ShiftedPoly::new(&t.poly),
                pows: t
                    .pows
                    .iter()
                    .map(|(b, e)| Factor {
                        base: ShiftedPoly::new(b),
                        exp: to_f64(e),
                        int: e
                            .is_integer()
                            .then(|| i64::try_from(e.to_integer()).unwrap_or(i64::MAX)),
                        text: format!(
                            "({})^({})",
                            render(&poly_expr(b)),
                            crate::poly::fmt_rational(e)
                        ),
                    })
                    .collect(),
                logs: t
                    .logs
                    .iter()
                    .map(|(b, k)| {
                        (
                            ShiftedPoly::new(b),
                            *k as i32,
                            format!("ln({})", render(&poly_expr(b))),
                        )
                    })
                    .collect(),
            })
            .collect();
        Compiled::Terms(terms)
    }

    pub fn eval(&self, a: &Abscissa) -> Result<f64, EvalError> {
        let terms = match self {
            Compiled::Tree(e) => return eval_tree(e, a),
            Compiled::Terms(t) => t,
        };
        let fail = |text: &str, reason: &str| EvalError {
            subexpr: text.to_string(),
            x: a.x(),
            reason: reason.to_string(),
        };
        let mut sum = 0.0;
        for t in terms {
            let mut v = t.poly.eval(a);
            for f in &t.pows {
                let b = f.base.eval(a);
                v *= match f.int {
                    Some(n) => {
                        if b == 0.0 {
                            return Err(fail(&f.text, "negative power of zero"));
                        }
                        powi(b, n)
                    }
                    None => {
                        if b < 0.0 || (b == 0.0 && f.exp < 0.0) {
                            return Err(fail(&f.text, "fractional power outside its domain"));
                        }
                        b.powf(f.exp)
                    }
                };
            }
            for (base, k, text) in &t.logs {
                let b = base.eval(a);
                if b <= 0.0 {
                    return Err(fail(text, "logarithm of a non-positive value"));
                }
                v *= b.ln().powi(*k);
            }
            sum += v;
        }
        if sum.is_nan() {
            return Err(fail("sum of terms", "undefined value"));
        }
        Ok(sum)
    }
}

/// A DSL function with its derivatives up to a fixed order prepared for
/// repeated evaluation.
#[derive(Clone, Debug)]
pub struct DslFunction {
    expr: Expr,
    label: String,
    derivatives: Vec<Expr>,
    compiled: Vec<Compiled>,
}

/// Derivative order prepared by default (enough for fourth-order operators).
pub const DEFAULT_ORDER: usize = 4;

impl DslFunction {
    pub fn new(expr: Expr) -> Self {
        DslFunction::with_order(expr, DEFAULT_ORDER)
    }

    pub fn with_order(expr: Expr, order: usize) -> Self {
        let label = expr.to_string();
        let mut derivatives = Vec::with_capacity(order + 1);
        let mut compiled = Vec::with_capacity(order + 1);
        match Canon::from_expr(&expr) {
            Ok(c) => {
                let mut cur = c;
                for k in 0..=order {
                    if k > 0 {
                        cur = cur.derivative();
                    }
                    derivatives.push(cur.to_expr());
                    compiled.push(Compiled::from_canon(&cur));
                }
            }
            Err(_) => {
                let mut cur = expr.clone();
                for k in 0..=order {
                    if k > 0 {
                        cur = differentiate(&cur);
                    }
                    compiled.push(Compiled::Tree(cur.clone()));
                    derivatives.push(cur.clone());
                }
            }
        }
        DslFunction {
            expr,
            label,
            derivatives,
            compiled,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(DslFunction::new(parse(text)?))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.compiled.len() - 1
    }

    /// The normalized k-th derivative (k ≤ order).
    pub fn derivative(&self, k: usize) -> &Expr {
        &self.derivatives[k]
    }

    pub fn value(&self, a: &Abscissa) -> Result<f64, EvalError> {
        self.compiled[0].eval(a)
    }

    /// `[f, f′, …, f⁽ᵏ⁾]` at `a`; panics if `k` exceeds the prepared order.
    pub fn values(&self, a: &Abscissa, k: usize) -> Result<Vec<f64>, EvalError> {
        assert!(
            k <= self.order(),
            "derivative order {k} exceeds prepared order {}",
            self.order()
        );
        self.compiled[..=k].iter().map(|c| c.eval(a)).collect()
    }
}
