//! Exact operator algebra for powers of the Legendre expression
//! `ℓ[y] = −((1−x²)y′)′`.
//!
//! An operator is held either structured, as `Σ sⱼ((1−x²)ʲy⁽ʲ⁾)⁽ʲ⁾`, or
//! expanded, as `Σ aₖ(x)y⁽ᵏ⁾` with polynomial coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{normalize, Canon, Expr};
use crate::poly::{fmt_rational, rat, Poly, Rational};
use crate::quadrature::Side;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("index j = {j} outside 1..={n}")]
    BadIndex { n: usize, j: usize },
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("Legendre-Stirling sum for ({n}, {j}) is not an integer")]
    NonIntegral { n: usize, j: usize },
    #[error("structured operator has repeated or zero index {0}")]
    BadTerms(usize),
    #[error("indicial polynomial does not fit sample m = {0}")]
    InterpolationMismatch(i64),
    #[error("indicial polynomial has irrational roots")]
    IrrationalRoots,
    #[error("invalid rational {0:?}")]
    BadRational(String),
}

/// `Σ sⱼ((1−x²)ʲy⁽ʲ⁾)⁽ʲ⁾` with distinct `j ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredOperator {
    terms: Vec<(usize, Rational)>,
}

impl StructuredOperator {
    pub fn new(mut terms: Vec<(usize, Rational)>) -> Result<Self, OperatorError> {
        terms.sort_by_key(|t| t.0);
        for w in terms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(OperatorError::BadTerms(w[0].0));
            }
        }
        if let Some(t) = terms.iter().find(|t| t.0 == 0) {
            return Err(OperatorError::BadTerms(t.0));
        }
        Ok(StructuredOperator { terms })
    }

    pub fn terms(&self) -> &[(usize, Rational)] {
        &self.terms
    }

    pub fn max_index(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    pub fn order(&self) -> usize {
        2 * self.max_index()
    }
}

/// `Σₖ aₖ(x) y⁽ᵏ⁾`, trailing zero coefficients removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedOperator {
    coeffs: Vec<Poly>,
}

impl ExpandedOperator {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        ExpandedOperator { coeffs }
    }

    pub fn identity() -> Self {
        ExpandedOperator::new(vec![Poly::one()])
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Poly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: usize, k: usize) -> Rational {
    Rational::from_integer(factorial(n) / (factorial(k) * factorial(n - k)))
}

/// The Legendre–Stirling number `{n j}₁`.
pub fn legendre_stirling(n: usize, j: usize) -> Result<BigInt, OperatorError> {
    if n == 0 {
        return Err(OperatorError::ZeroPower);
    }
    if j == 0 || j > n {
        return Err(OperatorError::BadIndex { n, j });
    }
    let mut sum = Rational::zero();
    for r in 0..=j {
        let rr = BigInt::from(r * r + r);
        let num = BigInt::from(2 * r + 1) * num_traits::pow(rr, n);
        let den = factorial(j - r) * factorial(j + r + 1);
        let term = Rational::new(num, den);
        if (r + j).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if !sum.is_integer() {
        return Err(OperatorError::NonIntegral { n, j });
    }
    Ok(sum.to_integer())
}

pub fn legendre_stirling_row(n: usize) -> Result<Vec<BigInt>, OperatorError> {
    (1..=n).map(|j| legendre_stirling(n, j)).collect()
}

/// ℓⁿ with signed coefficients `(−1)ʲ{n j}₁`.
pub fn legendre_power(n: usize) -> Result<StructuredOperator, OperatorError> {
    let row = legendre_stirling_row(n)?;
    let terms = row
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let j = i + 1;
            let s = Rational::from_integer(s);
            (j, if j % 2 == 1 { -s } else { s })
        })
        .collect();
    StructuredOperator::new(terms)
}

fn one_minus_x2() -> Poly {
    Poly::from_ints(&[1, 0, -1])
}

/// Leibniz expansion: `((1−x²)ʲy⁽ʲ⁾)⁽ʲ⁾ = Σᵢ C(j,i) Dⁱ[(1−x²)ʲ] y⁽²ʲ⁻ⁱ⁾`.
pub fn expand(op: &StructuredOperator) -> ExpandedOperator {
    let mut coeffs = vec![Poly::zero(); op.order() + 1];
    for (j, s) in &op.terms {
        let w = one_minus_x2().pow(*j as u32);
        for i in 0..=*j {
            let c = w.nth_derivative(i).scale(&(binomial(*j, i) * s));
            let k = 2 * j - i;
            coeffs[k] = &coeffs[k] + &c;
        }
    }
    ExpandedOperator::new(coeffs)
}

/// Expanded ℓⁿ.
pub fn legendre_expanded(n: usize) -> Result<ExpandedOperator, OperatorError> {
    Ok(expand(&legendre_power(n)?))
}

/// `p ∘ q`: `Σₖ pₖ Dᵏ[Σₘ qₘ y⁽ᵐ⁾] = Σₖ Σₘ Σᵢ C(k,i) pₖ qₘ⁽ⁱ⁾ y⁽ᵐ⁺ᵏ⁻ⁱ⁾`.
pub fn compose(p: &ExpandedOperator, q: &ExpandedOperator) -> ExpandedOperator {
    let mut coeffs = vec![Poly::zero(); p.coeffs.len() + q.coeffs.len()];
    for (k, pk) in p.coeffs.iter().enumerate() {
        if pk.is_zero() {
            continue;
        }
        for (m, qm) in q.coeffs.iter().enumerate() {
            for i in 0..=k {
                let c = &(pk * &qm.nth_derivative(i)) * &Poly::constant(binomial(k, i));
                let idx = m + k - i;
                coeffs[idx] = &coeffs[idx] + &c;
            }
        }
    }
    ExpandedOperator::new(coeffs)
}

/// `Σ aₖ f⁽ᵏ⁾` on canonical forms.
pub fn apply_canon(op: &ExpandedOperator, f: &Canon) -> Canon {
    let mut acc = Canon::zero();
    let mut d = f.clone();
    for (k, a) in op.coeffs.iter().enumerate() {
        if k > 0 {
            d = d.derivative();
        }
        if !a.is_zero() {
            acc = acc.add(&d.mul_poly(a));
        }
    }
    acc
}

/// `Σ aₖ f⁽ᵏ⁾` as a normalized expression.
pub fn apply_symbolic(op: &ExpandedOperator, f: &Expr) -> Expr {
    if let Ok(c) = Canon::from_expr(f) {
        return apply_canon(op, &c).to_expr();
    }
    let mut acc = Expr::int(0);
    let mut d = f.clone();
    for (k, a) in op.coeffs.iter().enumerate() {
        if k > 0 {
            d = crate::dsl::differentiate(&d);
        }
        if !a.is_zero() {
            acc = Expr::add(acc, Expr::mul(Expr::from_poly(a), d.clone()));
        }
    }
    normalize(&acc)
}

/// `Σ aₖ(x)·derivs[k]`; `derivs` must hold at least `order + 1` values.
pub fn apply_numeric(op: &ExpandedOperator, derivs: &[f64], x: f64) -> f64 {
    assert!(
        derivs.len() > op.order(),
        "need {} derivative values",
        op.order() + 1
    );
    op.coeffs
        .iter()
        .zip(derivs)
        .map(|(a, d)| a.eval_f64(x) * d)
        .sum()
}

/// Indicial polynomial `I(r)` at `endpoint` and its roots with multiplicity.
///
/// `I(m)` is the coefficient of `t^(m−n)` in `op[t^m]`, `t = 1 ∓ x`, for
/// integer samples `m`; the polynomial is recovered by exact interpolation
/// and checked against one extra sample.
pub fn indicial_polynomial(op: &StructuredOperator, endpoint: Side) -> Result<Poly, OperatorError> {
    let expanded = expand(op);
    let order = op.order();
    let n = op.max_index();
    // t = 1 - x at +1, t = 1 + x at -1; x = ±(1 - t)
    let (t_of_x, x_of_t) = match endpoint {
        Side::Right => ((rat(1), rat(-1)), (rat(1), rat(-1))),
        Side::Left => ((rat(1), rat(1)), (rat(-1), rat(1))),
    };
    let sample = |m: usize| -> Rational {
        let base = Poly::linear(t_of_x.0.clone(), t_of_x.1.clone()).pow(m as u32);
        let image = apply_canon(&expanded, &Canon::from_poly(&base))
            .as_polynomial()
            .expect("operators map polynomials to polynomials");
        image.compose_affine(&x_of_t.0, &x_of_t.1).coeff(m - n)
    };
    let ms: Vec<usize> = (order..=2 * order).collect();
    let points: Vec<(Rational, Rational)> =
        ms.iter().map(|&m| (rat(m as i64), sample(m))).collect();
    let poly = Poly::interpolate(&points);
    let extra = 2 * order + 1;
    if poly.eval(&rat(extra as i64)) != sample(extra) {
        return Err(OperatorError::InterpolationMismatch(extra as i64));
    }
    Ok(poly)
}

pub fn indicial_roots(
    op: &StructuredOperator,
    endpoint: Side,
) -> Result<Vec<Rational>, OperatorError> {
    let poly = indicial_polynomial(op, endpoint)?;
    let (roots, rest) = poly
        .rational_roots()
        .ok_or(OperatorError::IrrationalRoots)?;
    if !rest.is_constant() {
        return Err(OperatorError::IrrationalRoots);
    }
    Ok(roots)
}

/// JSON form of an operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorJson {
    Structured { structured: Vec<(usize, String)> },
    Expanded { expanded: Vec<Vec<String>> },
}

fn parse_rational(s: &str) -> Result<Rational, OperatorError> {
    let bad = || OperatorError::BadRational(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl From<&StructuredOperator> for OperatorJson {
    fn from(op: &StructuredOperator) -> Self {
        OperatorJson::Structured {
            structured: op
                .terms
                .iter()
                .map(|(j, s)| (*j, fmt_rational(s)))
                .collect(),
        }
    }
}

impl From<&ExpandedOperator> for OperatorJson {
    fn from(op: &ExpandedOperator) -> Self {
        OperatorJson::Expanded {
            expanded: op
                .coeffs
                .iter()
                .map(|p| p.coeffs().iter().map(fmt_rational).collect())
                .collect(),
        }
    }
}

impl OperatorJson {
    /// The operator in expanded form.
    pub fn to_expanded(&self) -> Result<ExpandedOperator, OperatorError> {
        match self {
            OperatorJson::Structured { .. } => {
                Ok(expand(&self.to_structured()?.expect("structured")))
            }
            OperatorJson::Expanded { expanded } => {
                let coeffs = expanded
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|s| parse_rational(s))
                            .collect::<Result<Vec<_>, _>>()
                            .map(Poly::new)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ExpandedOperator::new(coeffs))
            }
        }
    }

    pub fn to_structured(&self) -> Result<Option<StructuredOperator>, OperatorError> {
        match self {
            OperatorJson::Structured { structured } => {
                let terms = structured
                    .iter()
                    .map(|(j, s)| parse_rational(s).map(|q| (*j, q)))
                    .collect::<Result<Vec<_>, _>>()?;
                StructuredOperator::new(terms).map(Some)
            }
            OperatorJson::Expanded { .. } => Ok(None),
        }
    }
}

/// Deficiency indices of the minimal operators for ℓ and ℓ², recorded for
/// reports; nothing computes them.
pub const DEFICIENCY_INDEX_L1: (u8, u8) = (2, 2);
pub const DEFICIENCY_INDEX_L2: (u8, u8) = (4, 4);

/// The structured operator with a single term `((1−x²)ʲy⁽ʲ⁾)⁽ʲ⁾`.
pub fn single_term(j: usize) -> StructuredOperator {
    StructuredOperator {
        terms: vec![(j, Rational::one())],
    }
}
