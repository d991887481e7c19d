//! Sesquilinear boundary forms of ℓ and ℓ², endpoint limits, Green's formula
//! residuals and bracket differences against the piecewise boundary-condition
//! functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{Compiled, DslFunction, EvalError};
use crate::operator::{apply_symbolic, legendre_expanded, ExpandedOperator};
use crate::quadrature::{integrate, legendre_derivatives, Abscissa, Side};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormsError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Green's formula is available for ℓ and ℓ² only")]
    UnsupportedOperator,
    #[error("need -1 < alpha < beta < 1, got [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

/// A real function on (−1, 1) with derivatives available pointwise.
pub trait RealFunction: Sync {
    /// `[f, f′, …, f⁽ᵏ⁾]` at `at`.
    fn derivs(&self, at: &Abscissa, k: usize) -> Result<Vec<f64>, EvalError>;
    fn label(&self) -> String;
}

impl RealFunction for DslFunction {
    fn derivs(&self, at: &Abscissa, k: usize) -> Result<Vec<f64>, EvalError> {
        self.values(at, k)
    }

    fn label(&self) -> String {
        DslFunction::label(self).to_string()
    }
}

/// The Legendre polynomial Pₙ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LegendreP(pub usize);

impl RealFunction for LegendreP {
    fn derivs(&self, at: &Abscissa, k: usize) -> Result<Vec<f64>, EvalError> {
        Ok(legendre_derivatives(self.0, at.x(), k))
    }

    fn label(&self) -> String {
        format!("P{}", self.0)
    }
}

/// `[f,g]₁ = −(1−x²)(f′g − fg′)`.
pub fn form1(f: &dyn RealFunction, g: &dyn RealFunction, at: &Abscissa) -> Result<f64, EvalError> {
    let (a, b) = (f.derivs(at, 1)?, g.derivs(at, 1)?);
    Ok(-at.one_minus_x2() * (a[1] * b[0] - a[0] * b[1]))
}

/// `((1−x²)²h″)′ = (1−x²)²h‴ − 4x(1−x²)h″` from `[h, h′, h″, h‴]`.
fn b2_from(d: &[f64], at: &Abscissa) -> f64 {
    let w = at.one_minus_x2();
    w * w * d[3] - 4.0 * at.x() * w * d[2]
}

/// `[f,g]₂` from derivative vectors of length ≥ 4.
fn form2_from(a: &[f64], b: &[f64], at: &Abscissa) -> f64 {
    let w = at.one_minus_x2();
    let w2 = w * w;
    b2_from(a, at) * b[0] - b2_from(b, at) * a[0] - w2 * a[2] * b[1] + w2 * a[1] * b[2]
        - 2.0 * w * a[1] * b[0]
        + 2.0 * w * a[0] * b[1]
}

/// `[f,g]₂`.
pub fn form2(f: &dyn RealFunction, g: &dyn RealFunction, at: &Abscissa) -> Result<f64, EvalError> {
    Ok(form2_from(&f.derivs(at, 3)?, &g.derivs(at, 3)?, at))
}

/// `[f,1]₂ = ((1−x²)²f″)′ − 2(1−x²)f′`.
pub fn bracket_with_one(f: &dyn RealFunction, at: &Abscissa) -> Result<f64, EvalError> {
    let d = f.derivs(at, 3)?;
    Ok(b2_from(&d, at) - 2.0 * at.one_minus_x2() * d[1])
}

/// `[f,x]₂ = x[f,1]₂ − (1−x²)²f″ + 2(1−x²)f`.
pub fn bracket_with_x(f: &dyn RealFunction, at: &Abscissa) -> Result<f64, EvalError> {
    let d = f.derivs(at, 3)?;
    let w = at.one_minus_x2();
    let with_one = b2_from(&d, at) - 2.0 * w * d[1];
    Ok(at.x() * with_one - w * w * d[2] + 2.0 * w * d[0])
}

/// `(1−x²)f′`.
pub fn functional_b1(f: &dyn RealFunction, at: &Abscissa) -> Result<f64, EvalError> {
    Ok(at.one_minus_x2() * f.derivs(at, 1)?[1])
}

/// `((1−x²)²f″)′`.
pub fn functional_b2(f: &dyn RealFunction, at: &Abscissa) -> Result<f64, EvalError> {
    Ok(b2_from(&f.derivs(at, 3)?, at))
}

/// Settings for endpoint limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    /// First rung: distance `2^-first`.
    pub first: u32,
    /// Last rung: distance `2^-ladder`.
    pub ladder: u32,
    pub tol: f64,
    /// Absolute floor of the "limit is zero" rule.
    pub zero_tol: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            first: 4,
            ladder: 40,
            tol: 1e-9,
            zero_tol: 1e-7,
        }
    }
}

/// An extrapolated one-sided limit at ±1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryLimit {
    pub functional: String,
    pub endpoint: Side,
    pub estimate: f64,
    #[serde(rename = "error")]
    pub error_estimate: f64,
    pub converged: bool,
    /// `(distance to the endpoint, value)` on the ladder.
    pub samples: Vec<(f64, f64)>,
}

impl BoundaryLimit {
    /// Converged and `|estimate| ≤ max(zero_tol, 10·error)`.
    pub fn is_zero(&self, zero_tol: f64) -> bool {
        self.converged && self.estimate.abs() <= zero_tol.max(10.0 * self.error_estimate)
    }
}

const RICHARDSON_DEPTH: usize = 3;

/// Limit of `functional` at `endpoint` from the ladder `2^-k`, accelerated by
/// a Richardson table of depth 3 in the distance.
pub fn boundary_limit<F>(
    name: &str,
    functional: F,
    endpoint: Side,
    cfg: &LimitConfig,
) -> BoundaryLimit
where
    F: Fn(&Abscissa) -> Result<f64, EvalError>,
{
    let mut samples = Vec::new();
    for k in cfg.first..=cfg.ladder {
        let d = (-(k as f64)).exp2();
        match functional(&Abscissa::near(endpoint, d)) {
            Ok(v) if v.is_finite() => samples.push((d, v)),
            _ => break,
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(samples.len());
    let mut extrapolants = Vec::new();
    for (i, &(_, v)) in samples.iter().enumerate() {
        let mut row = vec![v];
        for m in 1..=RICHARDSON_DEPTH.min(i) {
            let p = (m as f64).exp2();
            let r = (p * row[m - 1] - rows[i - 1][m - 1]) / (p - 1.0);
            row.push(r);
        }
        if row.len() == RICHARDSON_DEPTH + 1 {
            extrapolants.push(row[RICHARDSON_DEPTH]);
        }
        rows.push(row);
    }
    let (estimate, error_estimate, converged) = match extrapolants.as_slice() {
        [.., a, b, c] => {
            let err = (c - b).abs().max((b - a).abs());
            let ok = err <= cfg.tol * c.abs().max(1.0);
            (*c, err, ok && c.is_finite())
        }
        _ => (
            samples.last().map_or(f64::NAN, |s| s.1),
            f64::INFINITY,
            false,
        ),
    };
    BoundaryLimit {
        functional: name.to_string(),
        endpoint,
        estimate,
        error_estimate,
        converged,
        samples,
    }
}

/// Which plateau value a boundary-condition function carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BcTag {
    F1,
    F2,
    F3,
    F4,
    G1,
    G2,
    G3,
    G4,
}

impl BcTag {
    pub fn all() -> [BcTag; 8] {
        use BcTag::*;
        [F1, F2, F3, F4, G1, G2, G3, G4]
    }

    /// Plateau expression and the endpoint where it is carried.
    pub fn plateau(self) -> (&'static str, Side) {
        use BcTag::*;
        match self {
            F1 => ("1", Side::Right),
            F2 => ("1", Side::Left),
            F3 => ("x", Side::Right),
            F4 => ("x", Side::Left),
            G1 => ("ln(1-x)", Side::Right),
            G2 => ("ln(1+x)", Side::Left),
            G3 => ("(1-x)*ln(1-x)", Side::Right),
            G4 => ("(1+x)*ln(1+x)", Side::Left),
        }
    }
}

impl std::str::FromStr for BcTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        BcTag::all()
            .into_iter()
            .find(|t| format!("{t:?}").eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown boundary function {s:?}; expected f1..f4 or g1..g4"))
    }
}

/// Default plateau width.
pub const DEFAULT_DELTA: f64 = 0.25;

/// Hermite basis on u ∈ [0,1]: `φₖ⁽ⁱ⁾(0) = δᵢₖ` and `φₖ⁽ⁱ⁾(1) = 0` for i ≤ 4.
fn hermite_basis() -> [Vec<f64>; 5] {
    use crate::poly::{rat, Poly};
    let binom = |n: i64, k: i64| (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1));
    let fact = |k: i64| (1..=k).product::<i64>();
    let one_minus_u5 = Poly::from_ints(&[1, -1]).pow(5);
    std::array::from_fn(|k| {
        let k = k as i64;
        let tail = Poly::new((0..=4 - k).map(|j| rat(binom(4 + j, j))).collect());
        let p =
            &(&Poly::monomial(crate::poly::ratio(1, fact(k)), k as usize) * &one_minus_u5) * &tail;
        p.coeffs().iter().map(crate::poly::to_f64).collect()
    })
}

fn poly_derivs(c: &[f64], u: f64, k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    let mut cur = c.to_vec();
    for _ in 0..=k {
        out.push(cur.iter().rev().fold(0.0, |acc, v| acc * u + v));
        cur = cur
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, v)| i as f64 * v)
            .collect();
    }
    out
}

/// `fⱼ` or `gⱼ`: the plateau function on the δ-neighbourhood of one
/// endpoint, zero on the δ-neighbourhood of the other, joined by the degree-9
/// Hermite polynomial matching four derivatives at both junctions.
#[derive(Clone, Debug)]
pub struct BcFunction {
    tag: BcTag,
    delta: f64,
    side: Side,
    target: DslFunction,
    /// Blend in u as f64 coefficients (u = 0 at the plateau junction).
    blend: Vec<f64>,
    /// Signed width from the plateau junction to the zero junction.
    width: f64,
}

impl BcFunction {
    pub fn new(tag: BcTag, delta: f64) -> Self {
        assert!(
            delta > 0.0 && delta < 0.5,
            "plateau width must lie in (0, 0.5)"
        );
        let (text, side) = tag.plateau();
        let target = DslFunction::parse(text).expect("plateau expressions parse");
        let junction = side.sign() * (1.0 - delta);
        let width = -2.0 * junction;
        let d = target
            .values(&Abscissa::near(side, delta), 4)
            .expect("plateau function is smooth at the junction");
        let basis = hermite_basis();
        let mut blend = vec![0.0; 10];
        for (k, phi) in basis.iter().enumerate() {
            let scale = d[k] * width.powi(k as i32);
            for (i, c) in phi.iter().enumerate() {
                blend[i] += scale * c;
            }
        }
        BcFunction {
            tag,
            delta,
            side,
            target,
            blend,
            width,
        }
    }

    pub fn tag(&self) -> BcTag {
        self.tag
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl RealFunction for BcFunction {
    fn derivs(&self, at: &Abscissa, k: usize) -> Result<Vec<f64>, EvalError> {
        if at.dist() <= self.delta {
            return if at.side() == self.side {
                self.target.values(at, k)
            } else {
                Ok(vec![0.0; k + 1])
            };
        }
        let junction = self.side.sign() * (1.0 - self.delta);
        let u = (at.x() - junction) / self.width;
        let mut d = poly_derivs(&self.blend, u, k);
        for (i, v) in d.iter_mut().enumerate() {
            *v /= self.width.powi(i as i32);
        }
        Ok(d)
    }

    fn label(&self) -> String {
        format!("{:?}(delta={})", self.tag, self.delta)
    }
}

/// `[f,g]₂(1) − [f,g]₂(−1)` from extrapolated limits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketDifference {
    pub value: f64,
    pub converged: bool,
    pub right: BoundaryLimit,
    pub left: BoundaryLimit,
}

pub fn gkn_bracket_difference(
    f: &dyn RealFunction,
    g: &dyn RealFunction,
    cfg: &LimitConfig,
) -> BracketDifference {
    let name = format!("[{}, {}]_2", f.label(), g.label());
    let lim = |side| boundary_limit(&name, |a: &Abscissa| form2(f, g, a), side, cfg);
    let (right, left) = (lim(Side::Right), lim(Side::Left));
    BracketDifference {
        value: right.estimate - left.estimate,
        converged: right.converged && left.converged,
        right,
        left,
    }
}

/// Both sides of Green's formula on [α, β] and their difference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreenResidual {
    pub order: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `∫ (op[f]g − f op[g])`.
    pub integral: f64,
    /// `[f,g](β) − [f,g](α)`.
    pub boundary: f64,
    pub residual: f64,
    pub quadrature_error: f64,
}

/// Default quadrature tolerance for Green residuals.
pub const GREEN_TOL: f64 = 1e-12;

/// `|∫_α^β (op[f]g − f op[g]) − ([f,g](β) − [f,g](α))|` for op = ℓ or ℓ²,
/// with `op[f]`, `op[g]` formed symbolically.
pub fn green_residual(
    op: &ExpandedOperator,
    f: &DslFunction,
    g: &DslFunction,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> Result<GreenResidual, FormsError> {
    let order = if *op == legendre_expanded(1).expect("ℓ") {
        1
    } else if *op == legendre_expanded(2).expect("ℓ²") {
        2
    } else {
        return Err(FormsError::UnsupportedOperator);
    };
    if !(-1.0 < alpha && alpha < beta && beta < 1.0) {
        return Err(FormsError::BadInterval(alpha, beta));
    }
    let lf = Compiled::new(&apply_symbolic(op, f.expr()));
    let lg = Compiled::new(&apply_symbolic(op, g.expr()));
    let failure = std::cell::RefCell::new(None);
    let integrand = |x: f64| {
        let a = Abscissa::new(x);
        let r = (|| -> Result<f64, EvalError> {
            Ok(lf.eval(&a)? * g.value(&a)? - f.value(&a)? * lg.eval(&a)?)
        })();
        r.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    };
    let est = integrate(integrand, alpha, beta, tol);
    if let Some(e) = failure.into_inner() {
        return Err(FormsError::Eval(e));
    }
    if !est.value.is_finite() {
        return Err(FormsError::Quadrature("non-finite integral".into()));
    }
    let form = |x: f64| {
        let a = Abscissa::new(x);
        if order == 1 {
            form1(f, g, &a)
        } else {
            form2(f, g, &a)
        }
    };
    let boundary = form(beta)? - form(alpha)?;
    Ok(GreenResidual {
        order,
        alpha,
        beta,
        integral: est.value,
        boundary,
        residual: (est.value - boundary).abs(),
        quadrature_error: est.error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dsl(s: &str) -> DslFunction {
        DslFunction::parse(s).unwrap()
    }

    #[test]
    fn form_examples() {
        let (one, x) = (dsl("1"), dsl("x"));
        let at = Abscissa::new(0.5);
        assert!((form1(&one, &x, &at).unwrap() - 0.75).abs() < 1e-15);
        assert!((form2(&x, &one, &Abscissa::new(0.0)).unwrap() + 2.0).abs() < 1e-15);
        let f = dsl("x^2");
        assert_eq!(bracket_with_one(&f, &Abscissa::new(0.0)).unwrap(), 0.0);
        assert_eq!(bracket_with_one(&one, &at).unwrap(), 0.0);
        let cfg = LimitConfig::default();
        let p5 = LegendreP(5);
        let lim = boundary_limit(
            "[P5,1]",
            |a: &Abscissa| bracket_with_one(&p5, a),
            Side::Left,
            &cfg,
        );
        assert!(lim.converged && lim.estimate.abs() < 1e-9);
    }

    #[test]
    fn log_functionals() {
        let cfg = LimitConfig::default();
        let f = dsl("ln(1-x)");
        let b1 = boundary_limit("B1", |a: &Abscissa| functional_b1(&f, a), Side::Right, &cfg);
        assert!(b1.converged && (b1.estimate + 2.0).abs() < 1e-9);
        let w = boundary_limit(
            "1-x^2",
            |a: &Abscissa| Ok(a.one_minus_x2()),
            Side::Right,
            &cfg,
        );
        assert!(w.is_zero(cfg.zero_tol));
        let with_one = boundary_limit(
            "[f,1]",
            |a: &Abscissa| bracket_with_one(&f, a),
            Side::Right,
            &cfg,
        );
        assert!(with_one.is_zero(cfg.zero_tol));
        let with_x = boundary_limit(
            "[f,x]",
            |a: &Abscissa| bracket_with_x(&f, a),
            Side::Right,
            &cfg,
        );
        assert!(with_x.converged && (with_x.estimate - 4.0).abs() < 1e-8);
    }

    #[test]
    fn blend_is_c4() {
        for tag in BcTag::all() {
            let b = BcFunction::new(tag, 0.25);
            for j in [-0.75, 0.75] {
                let lo = b.derivs(&Abscissa::new(j - 1e-9), 4).unwrap();
                let hi = b.derivs(&Abscissa::new(j + 1e-9), 4).unwrap();
                for i in 0..=3 {
                    assert!(
                        (lo[i] - hi[i]).abs() < 1e-6 * (1.0 + lo[i].abs()),
                        "{tag:?} {i} at {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn bc_bracket_difference() {
        let cfg = LimitConfig::default();
        let f3 = BcFunction::new(BcTag::F3, 0.25);
        let g1 = BcFunction::new(BcTag::G1, 0.25);
        let d = gkn_bracket_difference(&f3, &g1, &cfg);
        assert!(d.converged && (d.value + 4.0).abs() < 1e-6, "{}", d.value);
        let zero = dsl("0");
        assert_eq!(gkn_bracket_difference(&zero, &g1, &cfg).value, 0.0);
    }

    #[test]
    fn green_examples() {
        let l2 = legendre_expanded(2).unwrap();
        let r = green_residual(&l2, &dsl("ln(1-x)"), &dsl("x"), -0.5, 0.5, GREEN_TOL).unwrap();
        assert!(r.residual <= 1e-8);
        let r = green_residual(
            &l2,
            &dsl("(3*x^2-1)/2"),
            &dsl("(5*x^3-3*x)/2"),
            -0.9,
            0.9,
            GREEN_TOL,
        )
        .unwrap();
        assert!(r.residual <= 1e-9);
        let f = dsl("(1+x)^(3/4)");
        let r = green_residual(&l2, &f, &f, -0.9, 0.9, GREEN_TOL).unwrap();
        assert!(r.residual <= 1e-12);
    }
}
