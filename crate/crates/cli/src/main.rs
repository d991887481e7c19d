//! `legendre`: batch front end for legendre-core.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "legendre",
    version,
    about = "Powers of the Legendre differential expression: algebra, forms, domains, spectra"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration; flags below override it.
    #[arg(long, global = true, env = "LEGENDRE_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized corpora.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Plateau width of the boundary-condition functions, in (0, 0.5).
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Deepest extrapolation rung (distance 2^-ladder).
    #[arg(long, global = true)]
    ladder: Option<u32>,
    #[arg(long, global = true)]
    limit_tol: Option<f64>,
    #[arg(long, global = true)]
    graded_tol: Option<f64>,
    #[arg(long, global = true)]
    quadrature_tol: Option<f64>,
    /// Guard band of the square-integrability test.
    #[arg(long, global = true)]
    guard: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Legendre–Stirling numbers, rows 1..=N.
    Stirling {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=200))]
        n: u32,
    },
    /// The n-th power of the Legendre expression.
    Operator {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
        n: u32,
        /// Polynomial coefficients of y^(k) instead of the structured form.
        #[arg(long)]
        expand: bool,
        /// Check expansion against repeated composition for every power up to n.
        #[arg(long)]
        compose_check: bool,
    },
    /// Domain membership of a function or of a corpus file.
    Classify {
        #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
        expr: Option<String>,
        /// One expression per line; `#` starts a comment.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Also decide B_n and D_n for n up to this power (at most 4).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        powers: Option<u32>,
    },
    /// Sesquilinear forms at a point or as a limit at an endpoint.
    ///
    /// Functions are DSL expressions or `bc:f1`..`bc:f4`, `bc:g1`..`bc:g4`.
    Forms {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        order: u8,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["limit", "difference"])]
        at: Option<f64>,
        /// Endpoint, 1 or -1.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "difference")]
        limit: Option<String>,
        /// [f,g](1) - [f,g](-1) from both limits.
        #[arg(long)]
        difference: bool,
    },
    /// Residual of Green's formula on [alpha, beta].
    Green {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        n: u8,
    },
    /// Galerkin eigenvalues of A or A².
    Spectrum {
        #[arg(long, default_value = "A")]
        op: String,
        #[arg(long, default_value = "legendre")]
        basis: String,
        #[arg(long = "N", alias = "n", default_value_t = 8)]
        size: usize,
    },
    /// K, sup K and the norm bounds for an integral-operator pair.
    Ce {
        #[arg(long)]
        preset: String,
        /// Test functions, one expression per line; defaults to a seeded corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

fn resolve(g: &Global) -> Result<RunConfig> {
    let mut c = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = g.format {
        c.format = v;
    }
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = g.$field { c.$field = v; } )* };
    }
    set!(
        seed,
        delta,
        ladder,
        limit_tol,
        graded_tol,
        quadrature_tol,
        guard
    );
    c.validate()?;
    Ok(c)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = resolve(&cli.global)?;
    let report = match cli.command {
        Command::Stirling { n } => commands::stirling(n as usize)?,
        Command::Operator {
            n,
            expand,
            compose_check,
        } => commands::operator(n as usize, expand, compose_check)?,
        Command::Classify {
            expr,
            corpus,
            powers,
        } => commands::classify_cmd(
            expr.as_deref(),
            corpus.as_deref(),
            powers.map(|p| p as usize),
            &cfg,
        )?,
        Command::Forms {
            f,
            g,
            order,
            at,
            limit,
            difference,
        } => commands::forms(&f, &g, order, at, limit.as_deref(), difference, &cfg)?,
        Command::Green {
            f,
            g,
            alpha,
            beta,
            n,
        } => commands::green(&f, &g, alpha, beta, n, &cfg)?,
        Command::Spectrum { op, basis, size } => commands::spectrum(&op, &basis, size)?,
        Command::Ce { preset, corpus } => commands::ce(&preset, corpus.as_deref(), &cfg)?,
    };
    print!("{}", report.render(cfg.format)?);
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
