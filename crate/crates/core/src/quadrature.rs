//! Legendre polynomials and integration on (−1, 1).
//!
//! Points are passed around as [`Abscissa`] values, which carry the distance
//! to the nearest endpoint alongside `x`. Integrands that are singular at ±1
//! can then be resolved far below the spacing of `f64` near ±1.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("node count must be at least 1")]
    EmptyRule,
    #[error("Newton iteration for root {index} of P_{order} did not converge")]
    NoConvergence { order: usize, index: usize },
}

/// One of the two endpoints of (−1, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn both() -> [Side; 2] {
        [Side::Left, Side::Right]
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Left => "-1",
            Side::Right => "+1",
        }
    }
}

impl From<Side> for i8 {
    fn from(s: Side) -> i8 {
        match s {
            Side::Left => -1,
            Side::Right => 1,
        }
    }
}

impl TryFrom<i8> for Side {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            -1 => Ok(Side::Left),
            1 => Ok(Side::Right),
            _ => Err(format!("endpoint must be 1 or -1, got {v}")),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "1" | "+1" | "right" => Ok(Side::Right),
            "-1" | "left" => Ok(Side::Left),
            other => Err(format!("endpoint must be +1 or -1, got {other:?}")),
        }
    }
}

/// A point of (−1, 1) together with its distance to the nearer endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Abscissa {
    x: f64,
    side: Side,
    dist: f64,
}

impl Abscissa {
    pub fn new(x: f64) -> Self {
        if x >= 0.0 {
            Abscissa {
                x,
                side: Side::Right,
                dist: 1.0 - x,
            }
        } else {
            Abscissa {
                x,
                side: Side::Left,
                dist: 1.0 + x,
            }
        }
    }

    /// The point at distance `dist` from the endpoint `side`.
    pub fn near(side: Side, dist: f64) -> Self {
        Abscissa {
            x: side.sign() * (1.0 - dist),
            side,
            dist,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dist(&self) -> f64 {
        self.dist
    }

    pub fn one_minus_x(&self) -> f64 {
        match self.side {
            Side::Right => self.dist,
            Side::Left => 2.0 - self.dist,
        }
    }

    pub fn one_plus_x(&self) -> f64 {
        match self.side {
            Side::Right => 2.0 - self.dist,
            Side::Left => self.dist,
        }
    }

    /// `1 − x²` with full relative accuracy near ±1.
    pub fn one_minus_x2(&self) -> f64 {
        self.one_minus_x() * self.one_plus_x()
    }
}

/// Pₙ(x) by the three-term recurrence.
pub fn legendre_eval(n: usize, x: f64) -> f64 {
    legendre_pair(n, x).0
}

/// (Pₙ(x), Pₙ₋₁(x)); Pₙ₋₁ is 0 for n = 0.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for m in 0..n {
        let next = ((2 * m + 1) as f64 * x * cur - m as f64 * prev) / (m + 1) as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `[Pₙ(x), Pₙ′(x), …, Pₙ⁽ᵏ⁾(x)]`.
///
/// Uses the recurrence differentiated `j` times,
/// `(m+1)P⁽ʲ⁾ₘ₊₁ = (2m+1)(x P⁽ʲ⁾ₘ + j P⁽ʲ⁻¹⁾ₘ) − m P⁽ʲ⁾ₘ₋₁`,
/// which stays exact at x = ±1.
pub fn legendre_derivatives(n: usize, x: f64, k: usize) -> Vec<f64> {
    let mut prev = vec![0.0; k + 1];
    let mut cur = vec![0.0; k + 1];
    cur[0] = 1.0;
    for m in 0..n {
        let mut next = vec![0.0; k + 1];
        let a = (2 * m + 1) as f64;
        for j in 0..=k {
            let lower = if j > 0 { j as f64 * cur[j - 1] } else { 0.0 };
            next[j] = (a * (x * cur[j] + lower) - m as f64 * prev[j]) / (m + 1) as f64;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Nodes and weights of a Gauss–Legendre rule on [−1, 1].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// ∫ₐᵇ f by the affine image of the rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }
}

/// Gauss–Legendre rule with `m` nodes: Newton on Pₘ from Chebyshev-type guesses.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule, QuadratureError> {
    if m == 0 {
        return Err(QuadratureError::EmptyRule);
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut converged = false;
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, q) = legendre_pair(m, x);
            deriv = m as f64 * (x * p - q) / (x * x - 1.0);
            let dx = p / deriv;
            x -= dx;
            if dx.abs() <= 1e-15 {
                converged = true;
                let (p, q) = legendre_pair(m, x);
                deriv = m as f64 * (x * p - q) / (x * x - 1.0);
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::NoConvergence { order: m, index: i });
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        // root i counts down from the right end
        nodes[m - 1 - i] = x;
        nodes[i] = -x;
        weights[m - 1 - i] = w;
        weights[i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Shared 20-node rule used for panels and shells.
pub(crate) fn panel_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20).expect("20-node rule"))
}

fn coarse_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10).expect("10-node rule"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Default absolute tolerance for smooth integrands.
pub const SMOOTH_TOL: f64 = 1e-10;
/// Default tolerance for endpoint-graded integration.
pub const GRADED_TOL: f64 = 1e-8;

const MAX_PANELS: usize = 20_000;

/// Adaptive bisection: a 10-node Gauss rule on a panel is compared with the
/// same rule on both halves until the difference is below the panel's share of `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> IntegralEstimate {
    integrate_with(f, a, b, tol, 0.0)
}

/// As [`integrate`], also accepting panels whose error is below `rel_tol·|I|`.
pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> IntegralEstimate {
    let rule = coarse_rule();
    let mut evaluations = 0usize;
    let mut eval = |lo: f64, hi: f64| {
        evaluations += rule.order();
        rule.integrate(&f, lo, hi)
    };
    let total_len = b - a;
    let mut stack = vec![(a, b, eval(a, b))];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0usize;
    let mut converged = true;
    // a crude magnitude for the relative test, refined as panels are accepted
    let mut scale = stack[0].2.abs();
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = eval(lo, mid);
        let right = eval(mid, hi);
        let halves = left + right;
        let err = (whole - halves).abs();
        panels += 1;
        let share = abs_tol.max(rel_tol * scale) * (hi - lo) / total_len;
        let roundoff = 50.0 * f64::EPSILON * (left.abs() + right.abs());
        if err <= share.max(roundoff) || panels >= MAX_PANELS || hi - lo < 1e-15 * total_len.abs() {
            if err > share.max(roundoff) {
                converged = false;
            }
            value += halves;
            error += err;
            scale = scale.max(value.abs());
        } else {
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
    }
    if !value.is_finite() {
        converged = false;
    }
    IntegralEstimate {
        value,
        error_estimate: error,
        converged,
        evaluations,
    }
}

/// Settings for shell-by-shell integration toward an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedConfig {
    pub tol: f64,
    pub max_shells: usize,
    pub min_shells: usize,
    /// Consecutive non-decreasing shell contributions that flag divergence.
    pub divergence_window: usize,
}

impl Default for GradedConfig {
    fn default() -> Self {
        GradedConfig {
            tol: GRADED_TOL,
            max_shells: 120,
            min_shells: 24,
            divergence_window: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradedIntegral {
    pub estimate: IntegralEstimate,
    /// Contribution of each shell, outermost first.
    pub shells: Vec<f64>,
    pub divergent: bool,
    /// The integrand produced NaN somewhere.
    pub non_finite: bool,
}

impl GradedIntegral {
    /// Ratio of the last two shell magnitudes (∞ when undefined).
    pub fn tail_ratio(&self) -> f64 {
        match self.shells.as_slice() {
            [.., a, b] if a.abs() > 0.0 => b.abs() / a.abs(),
            [.., _, b] if *b == 0.0 => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// ∫ over [0, 1) (side +1) or (−1, 0] (side −1) by dyadic shells
/// `[1−2⁻ᵏ, 1−2⁻ᵏ⁻¹]`, for integrands possibly singular at the endpoint.
pub fn integrate_endpoint_graded<F: Fn(Abscissa) -> f64>(
    f: F,
    side: Side,
    tol: f64,
) -> GradedIntegral {
    integrate_graded(
        f,
        side,
        1.0,
        &GradedConfig {
            tol,
            ..GradedConfig::default()
        },
    )
}

/// Shell integration over the distances `(0, start]` from `side`.
pub fn integrate_graded<F: Fn(Abscissa) -> f64>(
    f: F,
    side: Side,
    start: f64,
    cfg: &GradedConfig,
) -> GradedIntegral {
    let rule = panel_rule();
    let mut shells: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut evaluations = 0;
    let mut outer = start;
    let mut divergent = false;
    let mut non_finite = false;
    let mut converged = false;
    let mut error_estimate = f64::INFINITY;
    for k in 0..cfg.max_shells {
        let inner = 0.5 * outer;
        let half = 0.5 * (outer - inner);
        let mid = 0.5 * (outer + inner);
        let c: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| w * f(Abscissa::near(side, mid + half * t)))
            .sum::<f64>()
            * half;
        evaluations += rule.order();
        outer = inner;
        if c.is_nan() {
            non_finite = true;
            break;
        }
        if c.is_infinite() {
            divergent = true;
            sum += c;
            shells.push(c);
            break;
        }
        sum += c;
        shells.push(c);
        let n = shells.len();
        if n > cfg.divergence_window && c.abs() > cfg.tol {
            let window = &shells[n - 1 - cfg.divergence_window..];
            if window
                .windows(2)
                .all(|p| p[1].abs() >= p[0].abs() * (1.0 - 1e-9))
            {
                divergent = true;
                break;
            }
        }
        if k + 1 >= cfg.min_shells {
            let prev = shells[n - 2].abs();
            let r = if prev > 0.0 {
                c.abs() / prev
            } else if c == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let tail = if r < 1.0 {
                c.abs() * r / (1.0 - r)
            } else {
                f64::INFINITY
            };
            error_estimate = tail;
            if c.abs() <= cfg.tol && tail <= cfg.tol {
                converged = true;
                break;
            }
        }
    }
    GradedIntegral {
        estimate: IntegralEstimate {
            value: sum,
            error_estimate: if divergent {
                f64::INFINITY
            } else {
                error_estimate
            },
            converged: converged && !divergent && !non_finite,
            evaluations,
        },
        shells,
        divergent,
        non_finite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_eval(0, 0.3), 1.0);
        assert_eq!(legendre_eval(5, 1.0), 1.0);
        assert!((legendre_eval(2, 0.5) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn legendre_derivative_examples() {
        let d = legendre_derivatives(1, 0.2, 2);
        assert_eq!(d, vec![0.2, 1.0, 0.0]);
        let d = legendre_derivatives(2, 0.0, 2);
        assert!((d[0] + 0.5).abs() < 1e-15 && d[1].abs() < 1e-15 && (d[2] - 3.0).abs() < 1e-14);
        let d = legendre_derivatives(3, 1.0, 1);
        assert!((d[0] - 1.0).abs() < 1e-15 && (d[1] - 6.0).abs() < 1e-14);
        // P_n^(k) vanishes for k > n
        assert!(legendre_derivatives(2, 0.7, 4)[3..]
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn small_rules() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);
        let r2 = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.nodes[0] + s).abs() < 1e-15 && (r2.nodes[1] - s).abs() < 1e-15);
        assert!((r2.weights[0] - 1.0).abs() < 1e-15 && (r2.weights[1] - 1.0).abs() < 1e-15);
        let r16 = gauss_legendre(16).unwrap();
        assert!((r16.integrate(|x| x.powi(10), -1.0, 1.0) - 2.0 / 11.0).abs() < 1e-14);
        assert_eq!(gauss_legendre(0), Err(QuadratureError::EmptyRule));
    }

    #[test]
    fn adaptive_examples() {
        assert!((integrate(|_| 1.0, -1.0, 1.0, 1e-10).value - 2.0).abs() < 1e-14);
        let p33 = integrate(|x| legendre_eval(3, x).powi(2), -1.0, 1.0, 1e-12);
        assert!((p33.value - 2.0 / 7.0).abs() < 1e-12 && p33.converged);
        let p25 = integrate(
            |x| legendre_eval(2, x) * legendre_eval(5, x),
            -1.0,
            1.0,
            1e-12,
        );
        assert!(p25.value.abs() < 1e-12);
    }

    #[test]
    fn graded_examples() {
        // ∫_0^1 (1-x)^{-1/4} dx = 4/3
        let g = integrate_endpoint_graded(|a| a.one_minus_x().powf(-0.25), Side::Right, 1e-8);
        assert!(g.estimate.converged && !g.divergent);
        assert!((g.estimate.value - 4.0 / 3.0).abs() < 1e-7);
        let g = integrate_endpoint_graded(|a| a.one_minus_x().powi(-2), Side::Right, 1e-8);
        assert!(g.divergent && !g.estimate.converged);
        // ∫_0^1 ln^2(1-x) dx = ∫_0^1 ln^2 t dt = 2
        let g = integrate_endpoint_graded(|a| a.one_minus_x().ln().powi(2), Side::Right, 1e-8);
        assert!(g.estimate.converged);
        assert!((g.estimate.value - 2.0).abs() < 1e-7);
        // mirrored: ∫_{-1}^0 (1+x)^{-1/2} dx = 2
        let g = integrate_endpoint_graded(|a| a.one_plus_x().powf(-0.5), Side::Left, 1e-8);
        assert!(g.estimate.converged && (g.estimate.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn log_borderline_is_divergent() {
        // (1-x)^{-1}: equal shell contributions ln 2
        let g = integrate_endpoint_graded(|a| 1.0 / a.one_minus_x(), Side::Right, 1e-8);
        assert!(g.divergent);
    }
}
