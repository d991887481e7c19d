use super::{print::render, EvalError, Expr};
use crate::poly::to_f64;
use crate::quadrature::Abscissa;

fn fail(e: &Expr, a: &Abscissa, reason: &str) -> EvalError {
    EvalError {
        subexpr: render(e),
        x: a.x(),
        reason: reason.to_string(),
    }
}

/// Direct evaluation of the tree; affine arguments use the endpoint distance.
pub(crate) fn eval_tree(e: &Expr, a: &Abscissa) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Const(c) => to_f64(c),
        Expr::X => a.x(),
        Expr::Neg(u) => -eval_tree(u, a)?,
        Expr::Add(u, v) => eval_tree(u, a)? + eval_tree(v, a)?,
        Expr::Sub(u, v) => eval_tree(u, a)? - eval_tree(v, a)?,
        Expr::Mul(u, v) => eval_tree(u, a)? * eval_tree(v, a)?,
        Expr::Div(u, v) => {
            let d = eval_tree(v, a)?;
            if d == 0.0 {
                return Err(fail(e, a, "division by zero"));
            }
            eval_tree(u, a)? / d
        }
        Expr::Pow(u, n) => {
            let b = eval_tree(u, a)?;
            if b == 0.0 && *n < 0 {
                return Err(fail(e, a, "negative power of zero"));
            }
            powi(b, *n)
        }
        Expr::AffinePow(aff, q) => {
            let b = aff.eval_at(a);
            let q = to_f64(q);
            if b < 0.0 || (b == 0.0 && q < 0.0) {
                return Err(fail(e, a, "fractional power outside its domain"));
            }
            b.powf(q)
        }
        Expr::Ln(aff) => {
            let b = aff.eval_at(a);
            if b <= 0.0 {
                return Err(fail(e, a, "logarithm of a non-positive value"));
            }
            b.ln()
        }
    };
    if v.is_nan() {
        return Err(fail(e, a, "undefined value"));
    }
    Ok(v)
}

pub(crate) fn powi(b: f64, n: i64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => b.powi(k),
        Err(_) => b.powf(n as f64),
    }
}
