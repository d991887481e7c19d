//! Subcommand bodies. Each returns a [`Report`] carrying all three renderings.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use legendre_core::ce::{default_corpus, verify_bound, CEBoundReport, CEProblem, PRESETS};
use legendre_core::classify::{
    classify, classify_powers, elm_consistency, parse_corpus, ClassificationReport, ElmConsistency,
    PowerVerdicts, Status, Verdict,
};
use legendre_core::dsl::{parse, DslFunction, Expr};
use legendre_core::forms::{
    boundary_limit, form1, form2, green_residual, BcFunction, BcTag, BoundaryLimit, GreenResidual,
    RealFunction,
};
use legendre_core::operator::{
    compose, expand, indicial_roots, legendre_expanded, legendre_power, legendre_stirling_row,
    OperatorJson, DEFICIENCY_INDEX_L1, DEFICIENCY_INDEX_L2,
};
use legendre_core::poly::fmt_rational;
use legendre_core::quadrature::{Abscissa, Side};
use legendre_core::spectral::{spectrum as solve_spectrum, Basis, OpTag, SpectrumResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};

pub struct Report {
    json: String,
    csv: String,
    pretty: String,
    pub ok: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    command: &'a str,
    ok: bool,
    result: &'a T,
}

impl Report {
    fn new<T: Serialize>(
        command: &str,
        ok: bool,
        result: &T,
        csv: String,
        pretty: String,
    ) -> Result<Self> {
        let mut json = serde_json::to_string_pretty(&Envelope {
            command,
            ok,
            result,
        })?;
        json.push('\n');
        Ok(Report {
            json,
            csv,
            pretty,
            ok,
        })
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => self.json.clone(),
            Format::Csv => self.csv.clone(),
            Format::Pretty => self.pretty.clone(),
        })
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Member => "member",
        Status::NonMember => "non-member",
        Status::Inconclusive => "inconclusive",
    }
}

fn parse_expr(text: &str) -> Result<Expr> {
    parse(text).map_err(|e| anyhow!("cannot parse {text:?}: {e}"))
}

#[derive(Serialize)]
struct StirlingRow {
    n: usize,
    values: Vec<String>,
}

pub fn stirling(n: usize) -> Result<Report> {
    let rows = (1..=n)
        .map(|i| {
            let values = legendre_stirling_row(i)?
                .iter()
                .map(|v| v.to_string())
                .collect();
            Ok(StirlingRow { n: i, values })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("n,j,value\n");
    let mut pretty = String::new();
    for r in &rows {
        for (j, v) in r.values.iter().enumerate() {
            writeln!(csv, "{},{},{}", r.n, j + 1, v)?;
        }
        writeln!(pretty, "n = {:>3}: {}", r.n, r.values.join("  "))?;
    }
    Report::new("stirling", true, &rows, csv, pretty)
}

#[derive(Serialize)]
struct EndpointRoots {
    endpoint: Side,
    roots: Vec<String>,
}

#[derive(Serialize)]
struct ComposeCheck {
    powers: usize,
    mismatches: Vec<usize>,
}

#[derive(Serialize)]
struct OperatorReport {
    n: usize,
    order: usize,
    operator: OperatorJson,
    indicial_roots: Vec<EndpointRoots>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deficiency_indices: Option<(u8, u8)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compose_check: Option<ComposeCheck>,
}

pub fn operator(n: usize, expanded: bool, check: bool) -> Result<Report> {
    let structured = legendre_power(n)?;
    let full = expand(&structured);
    let indicial = Side::both()
        .into_iter()
        .map(|side| {
            let mut roots = indicial_roots(&structured, side)?;
            roots.sort();
            Ok(EndpointRoots {
                endpoint: side,
                roots: roots.iter().map(fmt_rational).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let compose_check = check.then(|| {
        let l = legendre_expanded(1).expect("first power");
        let mut power = l.clone();
        let mut mismatches = Vec::new();
        for k in 1..=n {
            if k > 1 {
                power = compose(&l, &power);
            }
            if legendre_expanded(k).expect("k >= 1") != power {
                mismatches.push(k);
            }
        }
        ComposeCheck {
            powers: n,
            mismatches,
        }
    });
    let ok = compose_check
        .as_ref()
        .is_none_or(|c| c.mismatches.is_empty());

    let mut csv = String::new();
    let mut pretty = String::new();
    if expanded {
        csv.push_str("derivative,power,coefficient\n");
        writeln!(pretty, "l^{n}[y] = sum of a_k(x) y^(k):")?;
        for (k, a) in full.coeffs().iter().enumerate().rev() {
            for (p, c) in a.coeffs().iter().enumerate() {
                writeln!(csv, "{k},{p},{}", fmt_rational(c))?;
            }
            writeln!(pretty, "  a_{k} = {a}")?;
        }
    } else {
        csv.push_str("j,coefficient\n");
        writeln!(pretty, "l^{n}[y] = sum of s_j ((1-x^2)^j y^(j))^(j):")?;
        for (j, s) in structured.terms() {
            writeln!(csv, "{j},{}", fmt_rational(s))?;
            writeln!(pretty, "  s_{j} = {}", fmt_rational(s))?;
        }
    }
    for r in &indicial {
        writeln!(
            pretty,
            "indicial roots at {}: {}",
            r.endpoint.label(),
            r.roots.join(", ")
        )?;
    }
    if let Some(c) = &compose_check {
        if c.mismatches.is_empty() {
            writeln!(pretty, "expansion matches composition for powers 1..={n}")?;
        } else {
            writeln!(pretty, "MISMATCH at powers {:?}", c.mismatches)?;
        }
    }
    let report = OperatorReport {
        n,
        order: full.order(),
        operator: if expanded {
            OperatorJson::from(&full)
        } else {
            OperatorJson::from(&structured)
        },
        indicial_roots: indicial,
        deficiency_indices: match n {
            1 => Some(DEFICIENCY_INDEX_L1),
            2 => Some(DEFICIENCY_INDEX_L2),
            _ => None,
        },
        compose_check,
    };
    Report::new("operator", ok, &report, csv, pretty)
}

#[derive(Serialize)]
struct ClassifyItem {
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    input: String,
    consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elm: Option<ElmConsistency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    powers: Option<Vec<PowerVerdicts>>,
}

fn classify_one(
    line: Option<usize>,
    input: String,
    expr: &Expr,
    powers: Option<usize>,
    cfg: &RunConfig,
) -> ClassifyItem {
    let ccfg = cfg.classify();
    let report = classify(expr, &ccfg);
    let elm = elm_consistency(&report);
    let powers = powers.map(|n| classify_powers(expr, n, &ccfg));
    let consistent = report.main4_consistent
        && elm.consistent
        && powers.as_ref().is_none_or(|p| p.iter().all(|v| v.agree));
    ClassifyItem {
        line,
        input,
        consistent,
        error: None,
        report: Some(report),
        elm: Some(elm),
        powers,
    }
}

fn verdict_cell(v: &Verdict) -> &'static str {
    status_str(v.status)
}

fn pretty_item(out: &mut String, item: &ClassifyItem) -> std::fmt::Result {
    match item.line {
        Some(l) => writeln!(out, "line {l}: {}", item.input)?,
        None => writeln!(out, "{}", item.input)?,
    }
    if let Some(e) = &item.error {
        return writeln!(out, "  error: {e}");
    }
    let r = item.report.as_ref().expect("report present without error");
    let rows: [(&str, &Verdict); 8] = [
        ("Delta1,max", &r.delta1_max),
        ("D(A)", &r.domain_a),
        ("Delta2,max", &r.delta2_max),
        ("(i) algebraic", &r.main4.i_algebraic),
        ("(ii) B", &r.main4.ii_b),
        ("(iii) D(S)", &r.main4.iii_s),
        ("(iv) D", &r.main4.iv_d),
        ("ELM (iv) bounded", &r.elm.iv_bounded),
    ];
    for (name, v) in rows {
        writeln!(
            out,
            "  {name:<18} {:<13} {}",
            status_str(v.status),
            v.reason
        )?;
    }
    if let Some(c) = &r.corollary {
        writeln!(
            out,
            "  {:<18} {:<13} {}",
            "corollary",
            status_str(c.status),
            c.reason
        )?;
    }
    for p in item.powers.iter().flatten() {
        writeln!(
            out,
            "  n = {}: B_n {}, D_n {}",
            p.n,
            status_str(p.b_n.status),
            status_str(p.d_n.status)
        )?;
    }
    writeln!(out, "  consistent: {}", item.consistent)
}

pub fn classify_cmd(
    expr: Option<&str>,
    corpus: Option<&Path>,
    powers: Option<usize>,
    cfg: &RunConfig,
) -> Result<Report> {
    let items: Vec<ClassifyItem> = match (expr, corpus) {
        (Some(text), None) => vec![classify_one(
            None,
            text.to_string(),
            &parse_expr(text)?,
            powers,
            cfg,
        )],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading corpus {}", path.display()))?;
            let lines: Vec<&str> = text.lines().collect();
            parse_corpus(&text)
                .into_par_iter()
                .map(|(line, parsed)| {
                    let input = lines[line - 1].trim().to_string();
                    match parsed {
                        Ok(e) => classify_one(Some(line), input, &e, powers, cfg),
                        Err(e) => ClassifyItem {
                            line: Some(line),
                            input,
                            consistent: false,
                            error: Some(e.to_string()),
                            report: None,
                            elm: None,
                            powers: None,
                        },
                    }
                })
                .collect()
        }
        _ => bail!("give exactly one of --expr and --corpus"),
    };
    let ok = items.iter().all(|i| i.consistent);
    let mut csv = String::from("input,delta1_max,domain_a,delta2_max,main4_i,main4_ii,main4_iii,main4_iv,corollary,consistent\n");
    let mut pretty = String::new();
    for item in &items {
        let cells = match &item.report {
            Some(r) => [
                &r.delta1_max,
                &r.domain_a,
                &r.delta2_max,
                &r.main4.i_algebraic,
                &r.main4.ii_b,
                &r.main4.iii_s,
                &r.main4.iv_d,
            ]
            .map(verdict_cell)
            .join(","),
            None => ["error"; 7].join(","),
        };
        let corollary = item
            .report
            .as_ref()
            .and_then(|r| r.corollary.as_ref())
            .map_or("", verdict_cell);
        writeln!(
            csv,
            "\"{}\",{cells},{corollary},{}",
            item.input.replace('"', "\"\""),
            item.consistent
        )?;
        pretty_item(&mut pretty, item)?;
    }
    if expr.is_some() {
        let item = items.into_iter().next().expect("one item");
        Report::new("classify", ok, &item, csv, pretty)
    } else {
        Report::new("classify", ok, &items, csv, pretty)
    }
}

fn real_function(text: &str, cfg: &RunConfig) -> Result<Box<dyn RealFunction>> {
    if let Some(tag) = text.strip_prefix("bc:") {
        let tag: BcTag = tag.parse().map_err(|e| anyhow!("{e}"))?;
        return Ok(Box::new(BcFunction::new(tag, cfg.delta)));
    }
    let f = DslFunction::parse(text).map_err(|e| anyhow!("cannot parse {text:?}: {e}"))?;
    Ok(Box::new(f))
}

fn endpoint(text: &str) -> Result<Side> {
    match text.trim() {
        "1" | "+1" => Ok(Side::Right),
        "-1" => Ok(Side::Left),
        other => bail!("--limit takes 1 or -1, not {other:?}"),
    }
}

#[derive(Serialize)]
struct FormPoint {
    order: u8,
    f: String,
    g: String,
    at: f64,
    value: f64,
}

#[derive(Serialize)]
struct FormLimit {
    order: u8,
    f: String,
    g: String,
    limit: BoundaryLimit,
}

#[derive(Serialize)]
struct FormDifference {
    order: u8,
    f: String,
    g: String,
    value: f64,
    converged: bool,
    right: BoundaryLimit,
    left: BoundaryLimit,
}

fn limit_csv(l: &BoundaryLimit) -> String {
    let side: i8 = l.endpoint.into();
    format!(
        "{},{},{:e},{:e},{}\n",
        l.functional, side, l.estimate, l.error_estimate, l.converged
    )
}

fn limit_pretty(l: &BoundaryLimit) -> String {
    format!(
        "{} at {}: {:.12e} (error {:.1e}, {})\n",
        l.functional,
        l.endpoint.label(),
        l.estimate,
        l.error_estimate,
        if l.converged {
            "converged"
        } else {
            "NOT converged"
        }
    )
}

pub fn forms(
    f_text: &str,
    g_text: &str,
    order: u8,
    at: Option<f64>,
    limit: Option<&str>,
    difference: bool,
    cfg: &RunConfig,
) -> Result<Report> {
    let f = real_function(f_text, cfg)?;
    let g = real_function(g_text, cfg)?;
    let form = |a: &Abscissa| {
        if order == 1 {
            form1(f.as_ref(), g.as_ref(), a)
        } else {
            form2(f.as_ref(), g.as_ref(), a)
        }
    };
    let name = format!("[{}, {}]_{order}", f.label(), g.label());
    let lim = |side| boundary_limit(&name, |a: &Abscissa| form(a), side, &cfg.limit());
    let (f_s, g_s) = (f_text.to_string(), g_text.to_string());
    if let Some(x) = at {
        if !(-1.0 < x && x < 1.0) {
            bail!("--at must lie in (-1, 1)");
        }
        let value = form(&Abscissa::new(x)).map_err(|e| anyhow!("{e}"))?;
        let csv = format!("order,at,value\n{order},{x:e},{value:e}\n");
        let pretty = format!("{name} at x = {x}: {value:.15e}\n");
        return Report::new(
            "forms",
            true,
            &FormPoint {
                order,
                f: f_s,
                g: g_s,
                at: x,
                value,
            },
            csv,
            pretty,
        );
    }
    let header = "functional,endpoint,estimate,error,converged\n";
    if let Some(e) = limit {
        let l = lim(endpoint(e)?);
        let ok = l.converged;
        let (csv, pretty) = (format!("{header}{}", limit_csv(&l)), limit_pretty(&l));
        return Report::new(
            "forms",
            ok,
            &FormLimit {
                order,
                f: f_s,
                g: g_s,
                limit: l,
            },
            csv,
            pretty,
        );
    }
    if difference {
        let (right, left) = (lim(Side::Right), lim(Side::Left));
        let value = right.estimate - left.estimate;
        let converged = right.converged && left.converged;
        let csv = format!("{header}{}{}", limit_csv(&right), limit_csv(&left));
        let pretty = format!(
            "{}{}difference: {value:.12e}\n",
            limit_pretty(&right),
            limit_pretty(&left)
        );
        let out = FormDifference {
            order,
            f: f_s,
            g: g_s,
            value,
            converged,
            right,
            left,
        };
        return Report::new("forms", converged, &out, csv, pretty);
    }
    bail!("give one of --at X, --limit 1|-1 or --difference")
}

#[derive(Serialize)]
struct GreenReport {
    f: String,
    g: String,
    threshold: f64,
    #[serde(flatten)]
    residual: GreenResidual,
}

pub fn green(f: &str, g: &str, alpha: f64, beta: f64, n: u8, cfg: &RunConfig) -> Result<Report> {
    let fd = DslFunction::parse(f).map_err(|e| anyhow!("cannot parse {f:?}: {e}"))?;
    let gd = DslFunction::parse(g).map_err(|e| anyhow!("cannot parse {g:?}: {e}"))?;
    let op = legendre_expanded(n as usize)?;
    let r = green_residual(&op, &fd, &gd, alpha, beta, cfg.quadrature_tol)?;
    let ok = r.residual <= cfg.green_threshold;
    let csv = format!(
        "order,alpha,beta,integral,boundary,residual,threshold\n{},{:e},{:e},{:e},{:e},{:e},{:e}\n",
        r.order, r.alpha, r.beta, r.integral, r.boundary, r.residual, cfg.green_threshold
    );
    let pretty = format!(
        "integral  {:.15e}\nboundary  {:.15e}\nresidual  {:.3e} ({} {:.0e})\n",
        r.integral,
        r.boundary,
        r.residual,
        if ok { "<=" } else { ">" },
        cfg.green_threshold
    );
    let out = GreenReport {
        f: f.to_string(),
        g: g.to_string(),
        threshold: cfg.green_threshold,
        residual: r,
    };
    Report::new("green", ok, &out, csv, pretty)
}

pub fn spectrum(op: &str, basis: &str, n: usize) -> Result<Report> {
    let op: OpTag = op.parse().map_err(|e| anyhow!("{e}"))?;
    let basis: Basis = basis.parse().map_err(|e| anyhow!("{e}"))?;
    let r: SpectrumResult = solve_spectrum(op, basis, n)?;
    let mut pretty = format!(
        "{op:?} on {basis} basis, N = {n}, {} Jacobi sweeps\n",
        r.sweeps
    );
    writeln!(
        pretty,
        "{:>5}  {:>24}  {:>10}  {:>9}",
        "index", "eigenvalue", "target", "error"
    )?;
    for e in &r.entries {
        writeln!(
            pretty,
            "{:>5}  {:>24.15}  {:>10}  {:>9.1e}",
            e.index, e.eigenvalue, e.target, e.abs_error
        )?;
    }
    let csv = r.to_csv();
    Report::new("spectrum", true, &r, csv, pretty)
}

pub fn ce(preset: &str, corpus: Option<&Path>, cfg: &RunConfig) -> Result<Report> {
    let problem = CEProblem::preset(preset)
        .map_err(|e| anyhow!("{e}; known presets: {}", PRESETS.join(", ")))?;
    let functions = match corpus {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading corpus {}", path.display()))?;
            parse_corpus(&text)
                .into_iter()
                .map(|(line, e)| e.map_err(|e| anyhow!("{}:{line}: {e}", path.display())))
                .collect::<Result<Vec<_>>>()?
        }
        None => default_corpus(cfg.seed),
    };
    let r: CEBoundReport = verify_bound(&problem, &functions)?;
    let ok = r.violations.is_empty();
    let mut csv = String::from("label,norm_f,norm_af,norm_bf,ratio_a,ratio_b\n");
    for x in &r.ratios {
        writeln!(
            csv,
            "\"{}\",{:e},{:e},{:e},{:e},{:e}",
            x.label.replace('"', "\"\""),
            x.norm_f,
            x.norm_af,
            x.norm_bf,
            x.ratio_a,
            x.ratio_b
        )?;
    }
    let mut pretty = format!(
        "{}: sup K = {:.9} at x = {:.6}\nbound 2K = {:.9}, largest ratio {:.9} over {} functions\n",
        r.problem,
        r.k_sup.value,
        r.k_sup.argmax,
        r.bound,
        r.max_ratio,
        r.ratios.len()
    );
    writeln!(
        pretty,
        "cut-off probe: ratio {:.6} = {:.4} K",
        r.sharpness.max_ratio, r.sharpness.ratio_over_k
    )?;
    for v in &r.violations {
        writeln!(pretty, "VIOLATION {v}")?;
    }
    Report::new("ce", ok, &r, csv, pretty)
}
