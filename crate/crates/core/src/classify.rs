//! Numerical domain membership with recorded evidence.
//!
//! Square-integrability near an endpoint is judged from dyadic shell
//! integrals of `|h|^p` together with a log–log fit of the shell averages;
//! limits come from [`boundary_limit`]. Anything the evidence cannot settle
//! is reported as inconclusive.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsl::{
    differentiate, normalize, parse, Affine, Compiled, DslFunction, Expr, ParseError,
};
use crate::forms::{boundary_limit, BoundaryLimit, LimitConfig};
use crate::operator::{apply_symbolic, legendre_expanded};
use crate::poly::{rat, Poly};
use crate::quadrature::{integrate_graded, Abscissa, GradedConfig, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub reason: String,
}

impl Verdict {
    fn new(status: Status, reason: impl Into<String>) -> Self {
        Verdict {
            status,
            reason: reason.into(),
        }
    }

    /// Member iff every part is; otherwise names the first violated, then
    /// the first undecided, part.
    fn all_of(parts: &[(&str, Status)]) -> Verdict {
        if let Some((name, _)) = parts.iter().find(|p| p.1 == Status::NonMember) {
            return Verdict::new(Status::NonMember, format!("fails: {name}"));
        }
        if let Some((name, _)) = parts.iter().find(|p| p.1 == Status::Inconclusive) {
            return Verdict::new(Status::Inconclusive, format!("undecided: {name}"));
        }
        let names: Vec<&str> = parts.iter().map(|p| p.0).collect();
        Verdict::new(Status::Member, format!("holds: {}", names.join(", ")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub graded: GradedConfig,
    pub limit: LimitConfig,
    /// Guard band on the fitted exponent test `p·slope > −1 ± guard`.
    pub guard: f64,
    /// Shells used in the exponent fit.
    pub fit_shells: usize,
    /// Growth factor allowed over the boundedness window.
    pub bounded_factor: f64,
    pub bounded_window: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            graded: GradedConfig::default(),
            limit: LimitConfig::default(),
            guard: 0.1,
            fit_shells: 12,
            bounded_factor: 1.05,
            bounded_window: 8,
        }
    }
}

/// Shell evidence for `|h|^p` near one endpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideEvidence {
    pub endpoint: Side,
    /// Fitted exponent s in `|h| ~ dist^s` (absent when the tail vanishes).
    pub slope: Option<f64>,
    pub shell_sum: f64,
    pub shells: usize,
    pub converged: bool,
    pub divergent: bool,
    pub tail_ratio: f64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityEvidence {
    pub quantity: String,
    pub expr: String,
    /// 1 for L¹, 2 for L².
    pub power: u32,
    pub sides: Vec<SideEvidence>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessEvidence {
    pub endpoint: Side,
    pub samples: Vec<(f64, f64)>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElmVerdicts {
    pub ii_derivative_l2: Verdict,
    pub iii_derivative_l1: Verdict,
    pub iv_bounded: Verdict,
    pub v_absolutely_continuous: Verdict,
    pub vi_weighted_derivative_l2: Verdict,
    pub vii_weighted_second_derivative_l2: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Main4Verdicts {
    /// f ∈ 𝒟(A) and ℓ[f] ∈ 𝒟(A).
    pub i_algebraic: Verdict,
    /// (1−x²)²f⁗ ∈ L².
    pub ii_b: Verdict,
    /// Δ₂,max with [f,1]₂ and [f,x]₂ vanishing at ±1.
    pub iii_s: Verdict,
    /// Δ₂,max with (1−x²)f′ and ((1−x²)²f″)′ vanishing at ±1.
    pub iv_d: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub expr: String,
    pub delta1_max: Verdict,
    pub domain_a: Verdict,
    pub elm: ElmVerdicts,
    pub delta2_max: Verdict,
    pub main4: Main4Verdicts,
    /// (ii), (iii), (iv) never disagree where conclusive.
    pub main4_consistent: bool,
    /// For members of 𝒟(S): f″ ∈ L², ℓ′[f] ∈ L², ℓ[f] has finite limits.
    pub corollary: Option<Verdict>,
    pub integrability: Vec<IntegrabilityEvidence>,
    pub limits: Vec<BoundaryLimit>,
    pub boundedness: Vec<BoundednessEvidence>,
}

impl ClassificationReport {
    pub fn integrability(&self, quantity: &str) -> Option<&IntegrabilityEvidence> {
        self.integrability.iter().find(|e| e.quantity == quantity)
    }

    pub fn limit(&self, functional: &str, endpoint: Side) -> Option<&BoundaryLimit> {
        self.limits
            .iter()
            .find(|l| l.functional == functional && l.endpoint == endpoint)
    }
}

fn one_minus_x2() -> Poly {
    Poly::from_ints(&[1, 0, -1])
}

fn times_poly(p: &Poly, e: &Expr) -> Expr {
    normalize(&Expr::mul(Expr::from_poly(p), e.clone()))
}

fn sqrt_weight(e: &Expr) -> Expr {
    let half = crate::poly::ratio(1, 2);
    let one = rat(1);
    let w = Expr::mul(
        Expr::AffinePow(
            Affine {
                c0: one.clone(),
                c1: -one.clone(),
            },
            half.clone(),
        ),
        Expr::AffinePow(
            Affine {
                c0: one.clone(),
                c1: one,
            },
            half,
        ),
    );
    normalize(&Expr::mul(w, e.clone()))
}

/// Log–log least-squares slope.
fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

fn side_evidence(h: &Compiled, side: Side, power: u32, cfg: &ClassifyConfig) -> SideEvidence {
    let failed = std::sync::atomic::AtomicBool::new(false);
    let g = integrate_graded(
        |a: Abscissa| match h.eval(&a) {
            Ok(v) => v.abs().powi(power as i32),
            Err(_) => {
                failed.store(true, std::sync::atomic::Ordering::Relaxed);
                f64::NAN
            }
        },
        side,
        1.0,
        &cfg.graded,
    );
    // shell k spans distances [2^-(k+1), 2^-k]
    let n = g.shells.len();
    let window = cfg.fit_shells.min(n);
    let points: Vec<(f64, f64)> = g.shells[n - window..]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0.0 && c.is_finite())
        .map(|(i, c)| {
            let k = (n - window + i) as f64;
            let width = (-(k + 1.0)).exp2();
            let mean = c / width;
            ((0.75 * (-k).exp2()).ln(), mean.ln() / power as f64)
        })
        .collect();
    let all_zero = g.shells[n - window..].iter().all(|c| *c == 0.0);
    let slope = fit_slope(&points);
    let tail_ratio = g.tail_ratio();
    let sums_ok = g.estimate.converged || tail_ratio <= 0.98;
    let p = power as f64;
    let status = if failed.load(std::sync::atomic::Ordering::Relaxed) || g.non_finite {
        Status::Inconclusive
    } else if g.divergent {
        Status::NonMember
    } else if all_zero && !g.shells.is_empty() {
        Status::Member
    } else {
        match slope {
            Some(s) if p * s < -1.0 - cfg.guard => Status::NonMember,
            Some(s) if p * s > -1.0 + cfg.guard && sums_ok => Status::Member,
            _ => Status::Inconclusive,
        }
    };
    SideEvidence {
        endpoint: side,
        slope,
        shell_sum: g.estimate.value,
        shells: n,
        converged: g.estimate.converged,
        divergent: g.divergent,
        tail_ratio,
        status,
    }
}

fn integrability(
    quantity: &str,
    e: &Expr,
    power: u32,
    cfg: &ClassifyConfig,
) -> IntegrabilityEvidence {
    let space = if power == 1 { "L1" } else { "L2" };
    if e.is_zero() {
        return IntegrabilityEvidence {
            quantity: quantity.to_string(),
            expr: e.to_string(),
            power,
            sides: Vec::new(),
            verdict: Verdict::new(Status::Member, format!("{quantity} is identically zero")),
        };
    }
    let h = Compiled::new(e);
    let sides: Vec<SideEvidence> = Side::both()
        .iter()
        .map(|s| side_evidence(&h, *s, power, cfg))
        .collect();
    let parts: Vec<(String, Status)> = sides
        .iter()
        .map(|s| {
            (
                format!("{quantity} in {space} near {}", s.endpoint.label()),
                s.status,
            )
        })
        .collect();
    let refs: Vec<(&str, Status)> = parts.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    IntegrabilityEvidence {
        quantity: quantity.to_string(),
        expr: e.to_string(),
        power,
        sides,
        verdict: Verdict::all_of(&refs),
    }
}

fn boundedness(f: &Compiled, side: Side, cfg: &ClassifyConfig) -> BoundednessEvidence {
    let mut samples = Vec::new();
    let mut status = None;
    for k in cfg.limit.first..=cfg.limit.ladder {
        let d = (-(k as f64)).exp2();
        match f.eval(&Abscissa::near(side, d)) {
            Ok(v) if v.is_infinite() => {
                status = Some(Status::NonMember);
                break;
            }
            Ok(v) => samples.push((d, v)),
            Err(_) => {
                status = Some(Status::Inconclusive);
                break;
            }
        }
    }
    let w = cfg.bounded_window;
    let status = status.unwrap_or_else(|| {
        let v: Vec<f64> = samples.iter().map(|s| s.1.abs()).collect();
        let n = v.len();
        if n < w + 2 {
            return Status::Inconclusive;
        }
        let base = v[n - 1 - w];
        let peak = v[n - w..].iter().cloned().fold(0.0, f64::max);
        let grows = peak >= cfg.bounded_factor * base + 1e-12;
        let last_step = (v[n - 1] - v[n - 2]).abs();
        let early_step = (v[n - 1 - w] - v[n - 2 - w]).abs();
        let steady = last_step > 1e-9 && last_step >= 0.9 * early_step;
        if grows || steady {
            Status::NonMember
        } else {
            Status::Member
        }
    });
    BoundednessEvidence {
        endpoint: side,
        samples,
        status,
    }
}

fn limit_status(l: &BoundaryLimit, cfg: &ClassifyConfig) -> Status {
    if l.is_zero(cfg.limit.zero_tol) {
        Status::Member
    } else if l.converged {
        Status::NonMember
    } else {
        Status::Inconclusive
    }
}

/// Real roots of a canonical base or log argument inside (−1, 1) make
/// shell evidence meaningless; such inputs are reported inconclusive.
fn interior_problem(f: &DslFunction) -> Option<String> {
    let c = f.derivative(0);
    for i in 1..400 {
        let x = -1.0 + i as f64 / 200.0;
        if let Err(e) = crate::dsl::eval(c, x) {
            return Some(format!("not evaluable inside (-1, 1): {e}"));
        }
    }
    None
}

struct Probes {
    f: Expr,
    d1: Expr,
    d2: Expr,
    l1: Expr,
    l2: Expr,
}

/// Classify `f` against Δ₁,max, 𝒟(A) with the ELM conditions, Δ₂,max and
/// the four characterizations of 𝒟(A²).
pub fn classify(expr: &Expr, cfg: &ClassifyConfig) -> ClassificationReport {
    let f = DslFunction::new(expr.clone());
    let label = normalize(expr).to_string();
    let w = one_minus_x2();
    let w2 = w.pow(2);
    let p = Probes {
        f: f.derivative(0).clone(),
        d1: f.derivative(1).clone(),
        d2: f.derivative(2).clone(),
        l1: apply_symbolic(&legendre_expanded(1).expect("ℓ"), expr),
        l2: apply_symbolic(&legendre_expanded(2).expect("ℓ²"), expr),
    };
    let d4 = f.derivative(4).clone();
    let dl1 = differentiate(&p.l1);
    let b1 = times_poly(&w, &p.d1);
    let b2 = differentiate(&times_poly(&w2, &p.d2));
    let two_w = w.scale(&rat(2));
    let with_one = normalize(&Expr::sub(b2.clone(), times_poly(&two_w, &p.d1)));
    let with_x = normalize(&Expr::add(
        Expr::sub(times_poly(&Poly::x(), &with_one), times_poly(&w2, &p.d2)),
        times_poly(&two_w, &p.f),
    ));
    let b1_of_l1 = times_poly(&w, &dl1);

    let interior = interior_problem(&f);
    let quantities: Vec<(&str, Expr, u32)> = vec![
        ("f", p.f.clone(), 2),
        ("f'", p.d1.clone(), 2),
        ("f' (L1)", p.d1.clone(), 1),
        ("f''", p.d2.clone(), 2),
        ("(1-x^2)^(1/2) f'", sqrt_weight(&p.d1), 2),
        ("(1-x^2) f''", times_poly(&w, &p.d2), 2),
        ("(1-x^2)^2 f''''", times_poly(&w2, &d4), 2),
        ("l[f]", p.l1.clone(), 2),
        ("l'[f]", dl1, 2),
        ("l^2[f]", p.l2.clone(), 2),
    ];
    let mut integ: Vec<IntegrabilityEvidence> = quantities
        .into_iter()
        .map(|(q, e, pw)| integrability(q, &e, pw, cfg))
        .collect();

    let functionals: Vec<(&str, Expr)> = vec![
        ("B1", b1),
        ("B2", b2),
        ("[f,1]_2", with_one),
        ("[f,x]_2", with_x),
        ("l[f]", p.l1.clone()),
        ("B1(l[f])", b1_of_l1),
    ];
    let mut limits = Vec::new();
    for (name, e) in &functionals {
        let c = Compiled::new(e);
        for side in Side::both() {
            limits.push(boundary_limit(
                name,
                |a: &Abscissa| c.eval(a),
                side,
                &cfg.limit,
            ));
        }
    }
    let f_compiled = Compiled::new(&p.f);
    let bounded: Vec<BoundednessEvidence> = Side::both()
        .iter()
        .map(|s| boundedness(&f_compiled, *s, cfg))
        .collect();

    if let Some(problem) = &interior {
        for e in &mut integ {
            e.verdict = Verdict::new(Status::Inconclusive, problem.clone());
        }
    }
    let st = |q: &str| -> Status {
        integ
            .iter()
            .find(|e| e.quantity == q)
            .map(|e| e.verdict.status)
            .expect("probe present")
    };
    let lim = |name: &str| -> Vec<Status> {
        limits
            .iter()
            .filter(|l| l.functional == name)
            .map(|l| limit_status(l, cfg))
            .collect()
    };
    let both = |name: &str| -> Status {
        let s = lim(name);
        if s.contains(&Status::NonMember) {
            Status::NonMember
        } else if s.contains(&Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Member
        }
    };

    let delta1 = Verdict::all_of(&[("f in L2", st("f")), ("l[f] in L2", st("l[f]"))]);
    let domain_a = Verdict::all_of(&[
        ("Delta1,max", delta1.status),
        ("B1 -> 0 at +-1", both("B1")),
    ]);
    let bounded_status = if interior.is_some() {
        Status::Inconclusive
    } else {
        Verdict::all_of(
            &bounded
                .iter()
                .map(|b| ("bounded", b.status))
                .collect::<Vec<_>>(),
        )
        .status
    };
    let single = |name: &str, s: Status| Verdict::all_of(&[(name, s)]);
    let ii = single("f' in L2", st("f'"));
    let elm = ElmVerdicts {
        v_absolutely_continuous: Verdict::new(ii.status, "not probed; implied by (ii)"),
        ii_derivative_l2: ii,
        iii_derivative_l1: single("f' in L1", st("f' (L1)")),
        iv_bounded: single("f bounded near +-1", bounded_status),
        vi_weighted_derivative_l2: single("(1-x^2)^(1/2) f' in L2", st("(1-x^2)^(1/2) f'")),
        vii_weighted_second_derivative_l2: single("(1-x^2) f'' in L2", st("(1-x^2) f''")),
    };
    let delta2 = Verdict::all_of(&[("f in L2", st("f")), ("l^2[f] in L2", st("l^2[f]"))]);
    let main4 = Main4Verdicts {
        i_algebraic: Verdict::all_of(&[
            ("f in D(A)", domain_a.status),
            ("l[f] in L2", st("l[f]")),
            ("l^2[f] in L2", st("l^2[f]")),
            ("B1(l[f]) -> 0 at +-1", both("B1(l[f])")),
        ]),
        ii_b: Verdict::all_of(&[
            ("f in L2", st("f")),
            ("(1-x^2)^2 f'''' in L2", st("(1-x^2)^2 f''''")),
        ]),
        iii_s: Verdict::all_of(&[
            ("Delta2,max", delta2.status),
            ("[f,1]_2 -> 0 at +-1", both("[f,1]_2")),
            ("[f,x]_2 -> 0 at +-1", both("[f,x]_2")),
        ]),
        iv_d: Verdict::all_of(&[
            ("Delta2,max", delta2.status),
            ("B1 -> 0 at +-1", both("B1")),
            ("B2 -> 0 at +-1", both("B2")),
        ]),
    };
    let main4_consistent = agree(&[main4.ii_b.status, main4.iii_s.status, main4.iv_d.status]);
    let corollary = (main4.iii_s.status == Status::Member).then(|| {
        let finite = limits
            .iter()
            .filter(|l| l.functional == "l[f]")
            .all(|l| l.converged && l.estimate.is_finite());
        let finite = if finite {
            Status::Member
        } else {
            Status::NonMember
        };
        Verdict::all_of(&[
            ("f'' in L2", st("f''")),
            ("l'[f] in L2", st("l'[f]")),
            ("l[f] has finite limits at +-1", finite),
        ])
    });
    ClassificationReport {
        expr: label,
        delta1_max: delta1,
        domain_a,
        elm,
        delta2_max: delta2,
        main4,
        main4_consistent,
        corollary,
        integrability: integ,
        limits,
        boundedness: bounded,
    }
}

/// No two conclusive verdicts differ.
pub fn agree(statuses: &[Status]) -> bool {
    let conclusive: Vec<&Status> = statuses
        .iter()
        .filter(|s| **s != Status::Inconclusive)
        .collect();
    conclusive.windows(2).all(|w| w[0] == w[1])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElmConsistency {
    pub expr: String,
    /// False when f is not (conclusively) in Δ₁,max.
    pub applicable: bool,
    pub conditions: Vec<(String, Status)>,
    pub consistent: bool,
    pub disagreement: Option<String>,
}

/// Agreement of ELM (i), (ii), (iv), (vi), (vii) for members of Δ₁,max.
pub fn elm_consistency(report: &ClassificationReport) -> ElmConsistency {
    let conditions: Vec<(String, Status)> = vec![
        ("(i) f in D(A)".into(), report.domain_a.status),
        ("(ii) f' in L2".into(), report.elm.ii_derivative_l2.status),
        ("(iv) f bounded".into(), report.elm.iv_bounded.status),
        (
            "(vi) (1-x^2)^(1/2) f' in L2".into(),
            report.elm.vi_weighted_derivative_l2.status,
        ),
        (
            "(vii) (1-x^2) f'' in L2".into(),
            report.elm.vii_weighted_second_derivative_l2.status,
        ),
    ];
    let applicable = report.delta1_max.status == Status::Member;
    let consistent = !applicable || agree(&conditions.iter().map(|c| c.1).collect::<Vec<_>>());
    let disagreement = (!consistent).then(|| {
        conditions
            .iter()
            .filter(|c| c.1 != Status::Inconclusive)
            .map(|c| format!("{}: {:?}", c.0, c.1))
            .collect::<Vec<_>>()
            .join("; ")
    });
    ElmConsistency {
        expr: report.expr.clone(),
        applicable,
        conditions,
        consistent,
        disagreement,
    }
}

/// Membership in Bₙ and Dₙ for a power n of ℓ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerVerdicts {
    pub n: usize,
    /// (1−x²)ⁿ f⁽²ⁿ⁾ ∈ L².
    pub b_n: Verdict,
    /// f, ℓⁿ[f] ∈ L² and ((1−x²)ʲ f⁽ʲ⁾)⁽ʲ⁻¹⁾ → 0 at ±1 for j = 1..n.
    pub d_n: Verdict,
    pub agree: bool,
}

/// Bₙ and Dₙ for n = 1..=max_n (at most 4).
pub fn classify_powers(expr: &Expr, max_n: usize, cfg: &ClassifyConfig) -> Vec<PowerVerdicts> {
    let max_n = max_n.min(4);
    let f = DslFunction::with_order(expr.clone(), 2 * max_n);
    let f_l2 = integrability("f", f.derivative(0), 2, cfg).verdict.status;
    (1..=max_n)
        .map(|n| {
            let wn = one_minus_x2().pow(n as u32);
            let weighted = times_poly(&wn, f.derivative(2 * n));
            let b = integrability("(1-x^2)^n f^(2n)", &weighted, 2, cfg)
                .verdict
                .status;
            let b_n = Verdict::all_of(&[("f in L2", f_l2), ("(1-x^2)^n f^(2n) in L2", b)]);
            let ln = apply_symbolic(&legendre_expanded(n).expect("ℓⁿ"), expr);
            let mut parts = vec![
                ("f in L2".to_string(), f_l2),
                (
                    "l^n[f] in L2".to_string(),
                    integrability("l^n[f]", &ln, 2, cfg).verdict.status,
                ),
            ];
            for j in 1..=n {
                let inner = times_poly(&one_minus_x2().pow(j as u32), f.derivative(j));
                let e = (1..j).fold(inner, |acc, _| differentiate(&acc));
                let c = Compiled::new(&e);
                for side in Side::both() {
                    let l = boundary_limit("", |a: &Abscissa| c.eval(a), side, &cfg.limit);
                    parts.push((
                        format!("((1-x^2)^{j} f^({j}))^({}) -> 0 at {}", j - 1, side.label()),
                        limit_status(&l, cfg),
                    ));
                }
            }
            let refs: Vec<(&str, Status)> = parts.iter().map(|(s, v)| (s.as_str(), *v)).collect();
            let d_n = Verdict::all_of(&refs);
            let agree = agree(&[b_n.status, d_n.status]);
            PowerVerdicts { n, b_n, d_n, agree }
        })
        .collect()
}

/// The 25-function corpus of polynomials, endpoint powers, logarithms and
/// their products.
pub const STANDARD_CORPUS: [&str; 25] = [
    "1",
    "x",
    "x^3",
    "(35*x^4 - 30*x^2 + 3)/8",
    "x^5 - x",
    "(1-x)^(-1/4)",
    "(1-x)^(1/4)",
    "(1-x)^(3/4)",
    "(1-x)^(3/2)",
    "(1+x)^(-1/4)",
    "(1+x)^(1/4)",
    "(1+x)^(3/4)",
    "(1+x)^(3/2)",
    "ln(1-x)",
    "ln(1+x)",
    "(1-x)*ln(1-x)",
    "(1+x)*ln(1+x)",
    "x*ln(1-x)",
    "(1-x)^2*ln(1-x)",
    "(1+x)^2*ln(1+x)",
    "x^2*(1-x)^(3/2)",
    "(1-x)^(5/2)",
    "(1-x)^3*ln(1-x)",
    "x*(1+x)^(3/4)",
    "(1+x)^(7/2)",
];

/// One expression per line; blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Vec<(usize, Result<Expr, ParseError>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then(|| (i + 1, parse(body)))
        })
        .collect()
}

/// Classify many expressions in parallel; output order follows input order.
pub fn classify_all(exprs: &[Expr], cfg: &ClassifyConfig) -> Vec<ClassificationReport> {
    exprs.par_iter().map(|e| classify(e, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(s: &str) -> ClassificationReport {
        classify(&parse(s).unwrap(), &ClassifyConfig::default())
    }

    #[test]
    fn legendre_polynomial_everywhere() {
        let r = run("(35*x^4 - 30*x^2 + 3)/8");
        for v in [
            &r.delta1_max,
            &r.domain_a,
            &r.delta2_max,
            &r.main4.i_algebraic,
            &r.main4.ii_b,
            &r.main4.iii_s,
            &r.main4.iv_d,
        ] {
            assert_eq!(v.status, Status::Member, "{}", v.reason);
        }
        assert_eq!(r.corollary.unwrap().status, Status::Member);
    }

    #[test]
    fn log_examples() {
        let r = run("ln(1-x)");
        assert_eq!(r.delta1_max.status, Status::Member);
        assert_eq!(r.domain_a.status, Status::NonMember);
        assert_eq!(r.delta2_max.status, Status::Member);
        assert_eq!(r.main4.iii_s.status, Status::NonMember);
        assert!(r.main4_consistent);
        let e = elm_consistency(&r);
        assert!(e.applicable && e.consistent, "{:?}", e.disagreement);
        assert!(e.conditions.iter().all(|c| c.1 == Status::NonMember));

        let r = run("(1+x)*ln(1+x)");
        assert_eq!(r.delta2_max.status, Status::Member);
        assert_eq!(r.domain_a.status, Status::Member);
        assert_eq!(r.elm.ii_derivative_l2.status, Status::Member);
        assert_eq!(r.main4.iii_s.status, Status::NonMember);
        let b2 = r.limit("B2", Side::Left).unwrap();
        assert!((b2.estimate - 4.0).abs() < 1e-6);
    }

    #[test]
    fn endpoint_powers() {
        let r = run("(1-x)^(3/4)");
        let e = elm_consistency(&r);
        assert!(e.applicable && e.consistent);
        assert!(
            e.conditions.iter().all(|c| c.1 == Status::Member),
            "{:?}",
            e.conditions
        );
        let r = run("(1-x)^(-3/4)");
        assert_eq!(r.delta1_max.status, Status::NonMember);
    }

    #[test]
    fn powers_of_the_operator() {
        let v = classify_powers(&parse("x^3").unwrap(), 4, &ClassifyConfig::default());
        assert!(v
            .iter()
            .all(|p| p.b_n.status == Status::Member && p.d_n.status == Status::Member));
        let v = classify_powers(&parse("ln(1-x)").unwrap(), 2, &ClassifyConfig::default());
        assert_eq!(v[1].b_n.status, Status::NonMember);
        assert_eq!(v[1].d_n.status, Status::NonMember);
    }

    #[test]
    fn corpus_parsing() {
        let c = parse_corpus("# header\nx\n\nln(1-x)  # log\nln(x^2)\n");
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].0, 2);
        assert!(c[2].1.is_err());
    }
}
