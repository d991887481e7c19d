//! Pairs of one-sided integral operators
//! `(Af)(x) = φ(x)∫ₓᵇ ψ f w` and `(Bf)(x) = ψ(x)∫ₐˣ φ f w`, the functional
//! `K(x) = (∫ₐˣ |φ|²w)^{1/2} (∫ₓᵇ |ψ|²w)^{1/2}` and the bounds
//! `‖Af‖, ‖Bf‖ ≤ 2 sup K · ‖f‖`.
//!
//! Intervals lie inside [−1, 1]; coefficients may be singular only at ±1.
//! All integrals run over a fixed cell grid: dyadic shells toward ±1 and
//! quarter-width cells in the middle, each integrated with a 20-point rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{parse, Compiled, Expr, ParseError};
use crate::operator::{apply_symbolic, legendre_expanded};
use crate::poly::{ratio, Poly};
use crate::quadrature::{legendre_eval, panel_rule, Abscissa, Side};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CeError {
    #[error("interval ({a}, {b}) must satisfy -1 <= a < b <= 1")]
    Interval { a: f64, b: f64 },
    #[error("split point {0} must lie strictly inside the interval")]
    Split(f64),
    #[error(
        "{which} is not square integrable toward {endpoint} (shell contributions do not decay)"
    )]
    NotSquareIntegrable { which: &'static str, endpoint: f64 },
    #[error("integral of |{which}|^2 w vanishes on [{alpha}, {beta}]")]
    NotPositive {
        which: &'static str,
        alpha: f64,
        beta: f64,
    },
    #[error("non-finite value of {0} on the grid")]
    NonFinite(&'static str),
    #[error("K is unbounded on the interval")]
    Unbounded,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Dyadic shells toward an endpoint at ±1.
pub const SHELLS: usize = 64;
/// Slack factor on the bound `2K`.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CEProblem {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub w: Expr,
    pub phi: Expr,
    pub psi: Expr,
    pub split: f64,
}

pub const PRESETS: [&str; 5] = [
    "ce-p1",
    "ce-p2",
    "ce-p1-mirror",
    "ce-p2-mirror",
    "hardy-unit",
];

impl CEProblem {
    pub fn new(
        name: &str,
        (a, b): (f64, f64),
        phi: &str,
        psi: &str,
        w: &str,
        split: f64,
    ) -> Result<Self, CeError> {
        Ok(CEProblem {
            name: name.to_string(),
            a,
            b,
            w: parse(w)?,
            phi: parse(phi)?,
            psi: parse(psi)?,
            split,
        })
    }

    /// The instantiations used for the second-derivative estimates, their
    /// reflections onto (−1, 0], and the plain Hardy pair on (0, 1).
    pub fn preset(name: &str) -> Result<Self, CeError> {
        let (interval, phi, psi, split) = match name {
            "ce-p1" => ((0.0, 1.0), "1/(1-x^2)", "1", 0.5),
            "ce-p2" => ((0.0, 1.0), "1/(1-x^2)^2", "1-x^2", 0.5),
            "ce-p1-mirror" => ((-1.0, 0.0), "1", "1/(1-x^2)", -0.5),
            "ce-p2-mirror" => ((-1.0, 0.0), "1-x^2", "1/(1-x^2)^2", -0.5),
            "hardy-unit" => ((0.0, 1.0), "1", "1", 0.5),
            _ => return Err(CeError::UnknownPreset(name.to_string())),
        };
        CEProblem::new(name, interval, phi, psi, "1", split)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Chart {
    Left,
    Plain,
    Right,
}

/// A grid cell: an interval in its chart's parameter (distance to −1,
/// `x` itself, or distance to +1), so the Jacobian is always 1.
#[derive(Clone, Copy, Debug)]
struct Cell {
    chart: Chart,
    p0: f64,
    p1: f64,
}

impl Cell {
    fn at(&self, p: f64) -> Abscissa {
        match self.chart {
            Chart::Left => Abscissa::near(Side::Left, p),
            Chart::Plain => Abscissa::new(p),
            Chart::Right => Abscissa::near(Side::Right, p),
        }
    }

    fn param(&self, a: &Abscissa) -> f64 {
        match (self.chart, a.side()) {
            (Chart::Left, Side::Left) | (Chart::Right, Side::Right) => a.dist(),
            (Chart::Left, Side::Right) => 1.0 + a.x(),
            (Chart::Right, Side::Left) => 1.0 - a.x(),
            (Chart::Plain, _) => a.x(),
        }
    }

    /// ∫ of h over the part of the cell between `lo` and `hi` in parameter.
    fn integrate<F: Fn(&Abscissa) -> f64>(&self, h: &F, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let rule = panel_rule();
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| w * h(&self.at(mid + half * t)))
            .sum::<f64>()
            * half
    }

    fn whole<F: Fn(&Abscissa) -> f64>(&self, h: &F) -> f64 {
        self.integrate(h, self.p0, self.p1)
    }

    /// Integral from the point to the cell's right end (in `x`).
    fn tail_right<F: Fn(&Abscissa) -> f64>(&self, h: &F, at: &Abscissa) -> f64 {
        let p = self.param(at).clamp(self.p0, self.p1);
        match self.chart {
            Chart::Right => self.integrate(h, self.p0, p),
            _ => self.integrate(h, p, self.p1),
        }
    }

    /// Integral from the cell's left end (in `x`) to the point.
    fn head_left<F: Fn(&Abscissa) -> f64>(&self, h: &F, at: &Abscissa) -> f64 {
        let p = self.param(at).clamp(self.p0, self.p1);
        match self.chart {
            Chart::Right => self.integrate(h, p, self.p1),
            _ => self.integrate(h, self.p0, p),
        }
    }
}

/// Ordering key increasing with x, exact near both endpoints.
fn position(a: &Abscissa) -> (u8, f64) {
    if a.dist() < 0.5 {
        match a.side() {
            Side::Left => (0, a.dist()),
            Side::Right => (2, -a.dist()),
        }
    } else {
        (1, a.x())
    }
}

fn before(a: &Abscissa, b: &Abscissa) -> bool {
    let (ka, kb) = (position(a), position(b));
    ka.0 < kb.0 || (ka.0 == kb.0 && ka.1 < kb.1)
}

/// Shell boundaries from 1/2 down to `d_end` (or 2^-(SHELLS+1) when 0).
fn shell_ladder(d_end: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut d = 0.5;
    loop {
        if d <= d_end {
            out.push(d_end);
            break;
        }
        out.push(d);
        if d_end == 0.0 && out.len() > SHELLS {
            break;
        }
        d *= 0.5;
    }
    out
}

/// Cells covering [lo, hi] in increasing x; ends at ±1 are approached by
/// [`SHELLS`] dyadic shells.
fn build_cells(lo: Abscissa, hi: Abscissa) -> Vec<Cell> {
    let mut cells = Vec::new();
    let in_left = |a: &Abscissa| a.side() == Side::Left && a.dist() < 0.5;
    let in_right = |a: &Abscissa| a.side() == Side::Right && a.dist() < 0.5;
    if in_left(&lo) {
        let top = if in_left(&hi) { hi.dist() } else { 0.5 };
        let ladder: Vec<f64> = shell_ladder(lo.dist())
            .into_iter()
            .filter(|d| *d <= top)
            .collect();
        let mut bounds: Vec<f64> = ladder.into_iter().rev().collect();
        if bounds.last().is_none_or(|d| *d < top) {
            bounds.push(top);
        }
        for w in bounds.windows(2) {
            if w[1] > w[0] {
                cells.push(Cell {
                    chart: Chart::Left,
                    p0: w[0],
                    p1: w[1],
                });
            }
        }
    }
    let x0 = if in_left(&lo) { -0.5 } else { lo.x() };
    let x1 = if in_right(&hi) { 0.5 } else { hi.x() };
    if x1 > x0 && !in_left(&hi) && !in_right(&lo) {
        let mut bounds = vec![x0];
        for q in [-0.25, 0.0, 0.25] {
            if q > x0 && q < x1 {
                bounds.push(q);
            }
        }
        bounds.push(x1);
        for w in bounds.windows(2) {
            cells.push(Cell {
                chart: Chart::Plain,
                p0: w[0],
                p1: w[1],
            });
        }
    }
    if in_right(&hi) {
        let top = if in_right(&lo) { lo.dist() } else { 0.5 };
        let mut bounds: Vec<f64> = shell_ladder(hi.dist())
            .into_iter()
            .filter(|d| *d <= top)
            .collect();
        if bounds.first().is_none_or(|d| *d < top) {
            bounds.insert(0, top);
        }
        for w in bounds.windows(2) {
            if w[0] > w[1] {
                cells.push(Cell {
                    chart: Chart::Right,
                    p0: w[1],
                    p1: w[0],
                });
            }
        }
    }
    cells
}

/// Geometric continuation of the shell sums past the deepest shell at an
/// end of ±1 (exact for power-law integrands).
fn tail(deepest: f64, next: f64) -> f64 {
    if deepest == 0.0 {
        return 0.0;
    }
    let r = deepest / next;
    if r.is_finite() && (0.0..1.0).contains(&r) {
        deepest * r / (1.0 - r)
    } else {
        f64::INFINITY.copysign(deepest)
    }
}

fn improper(c: &Cell) -> bool {
    c.chart != Chart::Plain && c.p0 < (-(SHELLS as f64)).exp2()
}

/// Tails beyond the left and right ends of the grid.
fn tails(cells: &[Cell], integrals: &[f64]) -> (f64, f64) {
    let n = cells.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let head = if cells[0].chart == Chart::Left && improper(&cells[0]) {
        tail(integrals[0], integrals[1])
    } else {
        0.0
    };
    let end = if cells[n - 1].chart == Chart::Right && improper(&cells[n - 1]) {
        tail(integrals[n - 1], integrals[n - 2])
    } else {
        0.0
    };
    (head, end)
}

/// Cell integrals of one integrand with prefix and suffix sums.
struct Cumulative<F> {
    h: F,
    cells: Vec<Cell>,
    ends: Vec<Abscissa>,
    integrals: Vec<f64>,
    /// `prefix[i]` = sum of cells before i; `suffix[i]` = sum after i.
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl<F: Fn(&Abscissa) -> f64> Cumulative<F> {
    fn new(h: F, cells: &[Cell]) -> Self {
        let integrals: Vec<f64> = cells.iter().map(|c| c.whole(&h)).collect();
        let n = integrals.len();
        let (head, end) = tails(cells, &integrals);
        let mut prefix = vec![head; n];
        let mut suffix = vec![end; n];
        for i in 1..n {
            prefix[i] = prefix[i - 1] + integrals[i - 1];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            suffix[i] = suffix[i + 1] + integrals[i + 1];
        }
        let ends = cells
            .iter()
            .map(|c| match c.chart {
                Chart::Right => c.at(c.p0),
                _ => c.at(c.p1),
            })
            .collect();
        Cumulative {
            h,
            cells: cells.to_vec(),
            ends,
            integrals,
            prefix,
            suffix,
        }
    }

    fn locate(&self, a: &Abscissa) -> usize {
        let i = self.ends.partition_point(|e| before(e, a));
        i.min(self.cells.len() - 1)
    }

    /// ∫ from the left end of the grid to `a`.
    fn left(&self, a: &Abscissa) -> f64 {
        let i = self.locate(a);
        self.prefix[i] + self.cells[i].head_left(&self.h, a)
    }

    /// ∫ from `a` to the right end of the grid.
    fn right(&self, a: &Abscissa) -> f64 {
        let i = self.locate(a);
        self.suffix[i] + self.cells[i].tail_right(&self.h, a)
    }
}

/// A problem with compiled coefficients and its grid.
pub struct Prepared {
    pub problem: CEProblem,
    phi: Compiled,
    psi: Compiled,
    w: Compiled,
    cells: Vec<Cell>,
}

fn value(c: &Compiled, a: &Abscissa) -> f64 {
    c.eval(a).unwrap_or(f64::NAN)
}

impl Prepared {
    /// Compile and validate: interval, split point, square integrability of
    /// φ toward a and ψ toward b, and positivity on sampled subintervals.
    pub fn new(problem: &CEProblem) -> Result<Self, CeError> {
        let (a, b) = (problem.a, problem.b);
        if !(-1.0..=1.0).contains(&a) || !(-1.0..=1.0).contains(&b) || a >= b {
            return Err(CeError::Interval { a, b });
        }
        if !(problem.split > a && problem.split < b) {
            return Err(CeError::Split(problem.split));
        }
        let p = Prepared {
            problem: problem.clone(),
            phi: Compiled::new(&problem.phi),
            psi: Compiled::new(&problem.psi),
            w: Compiled::new(&problem.w),
            cells: build_cells(Abscissa::new(a), Abscissa::new(b)),
        };
        let c = Abscissa::new(problem.split);
        let phi2 = Cumulative::new(
            |x: &Abscissa| p.phi_sq(x),
            &build_cells(Abscissa::new(a), c),
        );
        let psi2 = Cumulative::new(
            |x: &Abscissa| p.psi_sq(x),
            &build_cells(c, Abscissa::new(b)),
        );
        check_tail("phi", &phi2.integrals, phi2.integrals.first(), a)?;
        check_tail("psi", &psi2.integrals, psi2.integrals.last(), b)?;
        check_positive("phi", &p.cumulative(|x| p.phi_sq(x)), a, b)?;
        check_positive("psi", &p.cumulative(|x| p.psi_sq(x)), a, b)?;
        Ok(p)
    }

    fn phi_sq(&self, x: &Abscissa) -> f64 {
        let v = value(&self.phi, x);
        v * v * value(&self.w, x)
    }

    fn psi_sq(&self, x: &Abscissa) -> f64 {
        let v = value(&self.psi, x);
        v * v * value(&self.w, x)
    }

    fn cumulative<F: Fn(&Abscissa) -> f64>(&self, h: F) -> Cumulative<F> {
        Cumulative::new(h, &self.cells)
    }

    /// K on the interior, evaluated from cached cumulative integrals.
    pub fn k_function(&self) -> KFunction<'_> {
        KFunction {
            phi2: self.cumulative(Box::new(move |x: &Abscissa| self.phi_sq(x))
                as Box<dyn Fn(&Abscissa) -> f64 + Sync + '_>),
            psi2: self.cumulative(Box::new(move |x: &Abscissa| self.psi_sq(x))
                as Box<dyn Fn(&Abscissa) -> f64 + Sync + '_>),
        }
    }

    pub fn apply_a<'s, F: Fn(&Abscissa) -> f64>(
        &'s self,
        f: &'s F,
    ) -> Applied<'s, impl Fn(&Abscissa) -> f64 + 's> {
        Applied {
            outer: &self.phi,
            inner: self
                .cumulative(move |x: &Abscissa| value(&self.psi, x) * f(x) * value(&self.w, x)),
            upper: true,
        }
    }

    pub fn apply_b<'s, F: Fn(&Abscissa) -> f64>(
        &'s self,
        f: &'s F,
    ) -> Applied<'s, impl Fn(&Abscissa) -> f64 + 's> {
        Applied {
            outer: &self.psi,
            inner: self
                .cumulative(move |x: &Abscissa| value(&self.phi, x) * f(x) * value(&self.w, x)),
            upper: false,
        }
    }

    /// `(∫ₐᵇ |g|² w)^{1/2}` on the problem grid.
    pub fn norm<G: Fn(&Abscissa) -> f64>(&self, g: G) -> f64 {
        let sq = |x: &Abscissa| {
            let v = g(x);
            v * v * value(&self.w, x)
        };
        let integrals: Vec<f64> = self.cells.iter().map(|c| c.whole(&sq)).collect();
        let (head, end) = tails(&self.cells, &integrals);
        (head + integrals.iter().sum::<f64>() + end).sqrt()
    }
}

fn check_tail(
    which: &'static str,
    integrals: &[f64],
    deepest: Option<&f64>,
    endpoint: f64,
) -> Result<(), CeError> {
    let total: f64 = integrals.iter().sum();
    if !total.is_finite() {
        return Err(CeError::NonFinite(which));
    }
    if endpoint.abs() == 1.0 {
        let d = deepest.copied().unwrap_or(0.0).abs();
        if d > 1e-6 * total.abs().max(f64::MIN_POSITIVE) {
            return Err(CeError::NotSquareIntegrable { which, endpoint });
        }
    }
    Ok(())
}

/// φ sums are taken from the left and ψ sums from the right, the ends at
/// which each is square integrable.
fn check_positive<F: Fn(&Abscissa) -> f64>(
    which: &'static str,
    cum: &Cumulative<F>,
    a: f64,
    b: f64,
) -> Result<(), CeError> {
    for k in 0..16 {
        let alpha = a + (b - a) * k as f64 / 16.0;
        let beta = a + (b - a) * (k + 1) as f64 / 16.0;
        let (al, be) = (Abscissa::new(alpha), Abscissa::new(beta));
        let v = if which == "phi" {
            cum.left(&be) - cum.left(&al)
        } else {
            cum.right(&al) - cum.right(&be)
        };
        if !(v > 0.0) {
            return Err(CeError::NotPositive { which, alpha, beta });
        }
    }
    Ok(())
}

type Integrand<'a> = Box<dyn Fn(&Abscissa) -> f64 + Sync + 'a>;

/// `x ↦ K(x)` backed by cumulative integrals of |φ|²w and |ψ|²w.
pub struct KFunction<'a> {
    phi2: Cumulative<Integrand<'a>>,
    psi2: Cumulative<Integrand<'a>>,
}

impl KFunction<'_> {
    pub fn squared(&self, x: &Abscissa) -> f64 {
        self.phi2.left(x) * self.psi2.right(x)
    }

    pub fn at(&self, x: &Abscissa) -> f64 {
        self.squared(x).sqrt()
    }
}

/// `(Af)(x)` or `(Bf)(x)` with the inner integral cached per cell.
pub struct Applied<'a, H> {
    outer: &'a Compiled,
    inner: Cumulative<H>,
    upper: bool,
}

impl<H: Fn(&Abscissa) -> f64> Applied<'_, H> {
    pub fn eval(&self, x: &Abscissa) -> f64 {
        let integral = if self.upper {
            self.inner.right(x)
        } else {
            self.inner.left(x)
        };
        value(self.outer, x) * integral
    }
}

/// K(x) for a single point.
pub fn k_of_x(p: &CEProblem, x: f64) -> Result<f64, CeError> {
    let prepared = Prepared::new(p)?;
    let k = prepared.k_function().at(&Abscissa::new(x));
    if k.is_finite() {
        Ok(k)
    } else {
        Err(CeError::NonFinite("K"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSup {
    pub value: f64,
    pub argmax: f64,
    /// Distance of the argmax to the nearer of ±1.
    pub argmax_dist: f64,
    pub unbounded: bool,
    pub samples: usize,
}

/// Grid points: 199 uniform interior points plus dyadic ladders toward
/// any end at ±1.
fn search_points(a: f64, b: f64) -> Vec<Abscissa> {
    let mut pts: Vec<Abscissa> = (1..200)
        .map(|i| Abscissa::new(a + (b - a) * i as f64 / 200.0))
        .collect();
    for (end, side) in [(a, Side::Left), (b, Side::Right)] {
        if end.abs() == 1.0 && end.signum() == side.sign() {
            for k in 2..=60 {
                pts.push(Abscissa::near(side, (-(k as f64)).exp2()));
            }
        }
    }
    let (lo, hi) = (Abscissa::new(a), Abscissa::new(b));
    pts.retain(|p| before(&lo, p) && before(p, &hi));
    pts.sort_by(|p, q| {
        position(p)
            .partial_cmp(&position(q))
            .expect("finite positions")
    });
    pts
}

pub fn k_sup(p: &CEProblem) -> Result<KSup, CeError> {
    let prepared = Prepared::new(p)?;
    let k = prepared.k_function();
    let pts = search_points(p.a, p.b);
    let vals: Vec<f64> = pts.iter().map(|x| k.at(x)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(CeError::NonFinite("K"));
    }
    let (i, _) =
        vals.iter().enumerate().fold(
            (0, f64::MIN),
            |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc },
        );
    let n = pts.len();
    // growth still under way at the deepest ladder rungs
    let at_edge = i < 5 || i + 5 >= n;
    let growing = if i < 5 {
        vals[0] > vals[10] * (1.0 + 1e-6)
    } else {
        vals[n - 1] > vals[n - 11] * (1.0 + 1e-6)
    };
    if at_edge && growing {
        return Ok(KSup {
            value: vals[i],
            argmax: pts[i].x(),
            argmax_dist: pts[i].dist(),
            unbounded: true,
            samples: n,
        });
    }
    if at_edge && (i == 0 || i + 1 == n) {
        return Ok(KSup {
            value: vals[i],
            argmax: pts[i].x(),
            argmax_dist: pts[i].dist(),
            unbounded: false,
            samples: n,
        });
    }
    let (mut lo, mut hi) = (pts[i - 1].x(), pts[i + 1].x());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |x: f64| k.at(&Abscissa::new(x));
    let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evals = n + 2;
    while hi - lo > 1e-10 * (1.0 + lo.abs()) && evals < n + 200 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
        evals += 1;
    }
    let (x, v) = if fc > fd { (c, fc) } else { (d, fd) };
    let (x, v) = if v >= vals[i] {
        (x, v)
    } else {
        (pts[i].x(), vals[i])
    };
    let at = Abscissa::new(x);
    Ok(KSup {
        value: v,
        argmax: x,
        argmax_dist: at.dist(),
        unbounded: false,
        samples: evals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRecord {
    pub label: String,
    pub norm_f: f64,
    pub norm_af: f64,
    pub norm_bf: f64,
    pub ratio_a: f64,
    pub ratio_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessProbe {
    /// Largest ratio over cut-off test functions near the K argmax.
    pub max_ratio: f64,
    /// That ratio divided by K; the bound allows up to 2.
    pub ratio_over_k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CEBoundReport {
    pub problem: String,
    pub k_sup: KSup,
    pub bound: f64,
    pub ratios: Vec<RatioRecord>,
    pub max_ratio: f64,
    pub violations: Vec<String>,
    pub sharpness: SharpnessProbe,
}

fn ratio_of(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn record<F: Fn(&Abscissa) -> f64 + Sync>(p: &Prepared, label: String, f: &F) -> RatioRecord {
    let norm_f = p.norm(f);
    let a = p.apply_a(f);
    let b = p.apply_b(f);
    let norm_af = p.norm(|x| a.eval(x));
    let norm_bf = p.norm(|x| b.eval(x));
    RatioRecord {
        label,
        norm_f,
        norm_af,
        norm_bf,
        ratio_a: ratio_of(norm_af, norm_f),
        ratio_b: ratio_of(norm_bf, norm_f),
    }
}

/// C¹ step from 0 to 1 across [c − ε, c + ε].
fn step(x: f64, c: f64, eps: f64) -> f64 {
    let u = ((x - c) / eps * 0.5 + 0.5).clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

fn sharpness(p: &Prepared, k: &KSup) -> SharpnessProbe {
    let c = k.argmax;
    let mut best: f64 = 0.0;
    for eps in [1e-1, 1e-2, 1e-3] {
        // ψ cut off to the right of c tests A; φ cut off to the left tests B.
        let fa = |x: &Abscissa| value(&p.psi, x) * step(x.x(), c, eps);
        let fb = |x: &Abscissa| value(&p.phi, x) * (1.0 - step(x.x(), c, eps));
        let ra = record(p, String::new(), &fa).ratio_a;
        let rb = record(p, String::new(), &fb).ratio_b;
        best = best.max(ra).max(rb);
    }
    SharpnessProbe {
        max_ratio: best,
        ratio_over_k: ratio_of(best, k.value),
    }
}

/// Ratios ‖Af‖/‖f‖ and ‖Bf‖/‖f‖ over the corpus against `2·K_sup`.
pub fn verify_bound(p: &CEProblem, corpus: &[Expr]) -> Result<CEBoundReport, CeError> {
    let prepared = Prepared::new(p)?;
    let k = k_sup(p)?;
    if k.unbounded {
        return Err(CeError::Unbounded);
    }
    let bound = 2.0 * k.value;
    let ratios: Vec<RatioRecord> = corpus
        .par_iter()
        .map(|e| {
            let c = Compiled::new(e);
            record(&prepared, e.to_string(), &|x: &Abscissa| value(&c, x))
        })
        .collect();
    let limit = bound * (1.0 + BOUND_SLACK);
    let mut violations = Vec::new();
    for r in &ratios {
        for (name, v) in [("A", r.ratio_a), ("B", r.ratio_b)] {
            if !(v <= limit) {
                violations.push(format!("{name}: ratio {v} exceeds {limit} for {}", r.label));
            }
        }
    }
    let max_ratio = ratios
        .iter()
        .flat_map(|r| [r.ratio_a, r.ratio_b])
        .fold(0.0, f64::max);
    let sharpness = sharpness(&prepared, &k);
    Ok(CEBoundReport {
        problem: p.name.clone(),
        k_sup: k,
        bound,
        ratios,
        max_ratio,
        violations,
        sharpness,
    })
}

/// Seeded polynomials of degree ≤ `max_degree` with small rational coefficients.
pub fn random_polynomials(seed: u64, count: usize, max_degree: usize) -> Vec<Expr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let degree = rng.gen_range(0..=max_degree);
            let coeffs = (0..=degree)
                .map(|_| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                .collect();
            let p = Poly::new(coeffs);
            let p = if p.is_zero() { Poly::one() } else { p };
            Expr::from_poly(&p)
        })
        .collect()
}

/// Sixteen seeded polynomials and four functions singular at ±1.
pub fn default_corpus(seed: u64) -> Vec<Expr> {
    let mut out = random_polynomials(seed, 16, 6);
    for s in ["ln(1-x)", "ln(1+x)", "(1-x)^(-1/4)", "(1+x)^(-1/4)"] {
        out.push(parse(s).expect("corpus expression"));
    }
    out
}

/// `ℓ²[Pₙ]` for n = 0..=max_n.
pub fn legendre_square_corpus(max_n: usize) -> Vec<Expr> {
    let l2 = legendre_expanded(2).expect("ℓ²");
    (0..=max_n)
        .map(|n| apply_symbolic(&l2, &Expr::from_poly(&legendre_poly(n))))
        .collect()
}

/// Pₙ with exact coefficients.
pub fn legendre_poly(n: usize) -> Poly {
    let mut prev = Poly::one();
    if n == 0 {
        return prev;
    }
    let mut cur = Poly::x();
    for k in 1..n {
        let next = (&(&Poly::x() * &cur).scale(&ratio(2 * k as i64 + 1, k as i64 + 1)))
            - &prev.scale(&ratio(k as i64, k as i64 + 1));
        prev = cur;
        cur = next;
    }
    debug_assert!((cur.eval_f64(0.5) - legendre_eval(n, 0.5)).abs() < 1e-12);
    cur
}
