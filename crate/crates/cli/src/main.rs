use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use peakpoly::verify::{self, Claim, SuiteConfig};
use peakpoly::{Limits, Permutation, PositionSet};

mod render;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "peakpoly", version, about = "Descent and peak polynomials of permutations")]
struct Cli {
    /// Largest n walked permutation by permutation.
    #[arg(long, global = true, env = "PEAKPOLY_CAP", default_value_t = peakpoly::DEFAULT_CAP)]
    cap: usize,

    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true, env = "PEAKPOLY_WORKERS", value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,

    #[arg(long, global = true, env = "PEAKPOLY_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Descent,
    Peak,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Binomial-basis coefficients of d(S,n).
    DescentPoly {
        #[arg(value_parser = parse_set)]
        set: PositionSet,
        /// Defaults to max(S)+1, or 0 for the empty set.
        #[arg(long)]
        center: Option<usize>,
    },
    /// Binomial-basis coefficients of p(I,n).
    PeakPoly {
        #[arg(value_parser = parse_set)]
        set: PositionSet,
        /// Defaults to max(I).
        #[arg(long)]
        center: Option<usize>,
    },
    /// d(S,n) or p(I,n) at one n.
    Count {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(value_parser = parse_set)]
        set: PositionSet,
        n: usize,
        /// Count by walking the class instead of using the closed form.
        #[arg(long)]
        enumerate: bool,
    },
    /// d(S,n) as a sum of p(I,n) over the spikes of S.
    Expand {
        #[arg(value_parser = parse_set)]
        set: PositionSet,
        n: usize,
    },
    /// p(I,n) as a signed sum of descent counts.
    Moebius {
        #[arg(value_parser = parse_set)]
        set: PositionSet,
        n: usize,
    },
    /// Flip admissions at every spike of a permutation.
    Flips {
        #[arg(value_parser = parse_perm)]
        perm: Permutation,
    },
    /// The coefficient classes with their flip flags.
    Table1 {
        #[arg(long = "set", value_parser = parse_set, default_value = "2,4")]
        set: PositionSet,
        /// Defaults to max(I).
        #[arg(long)]
        center: Option<usize>,
    },
    /// Run the verification suite, or one claim of it.
    Verify {
        #[arg(long, value_parser = parse_claim)]
        claim: Option<Claim>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        random_cases: usize,
    },
}

fn parse_set(s: &str) -> Result<PositionSet, String> {
    s.parse().map_err(|e: peakpoly::Error| e.to_string())
}

fn parse_perm(s: &str) -> Result<Permutation, String> {
    s.parse().map_err(|e: peakpoly::Error| e.to_string())
}

fn parse_claim(s: &str) -> Result<Claim, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Claim::ALL.iter().map(|c| c.name()).collect();
        format!("unknown claim {s:?}; expected one of {}", names.join(", "))
    })
}

/// What a successful command wants the process to report.
enum Status {
    Ok,
    VerificationFailed,
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<Status> {
    let limits = Limits::new(cli.cap)?;
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w as usize)
            .build_global()
            .context("configuring worker threads")?;
    }
    let fmt = cli.format;
    match cli.command {
        Command::DescentPoly { set, center } => {
            let m = center.unwrap_or(if set.is_empty() { 0 } else { set.max() + 1 });
            let poly = peakpoly::descent_coeffs(set, m, &limits)?;
            render::polynomial(out, fmt, "d", set, &poly)?;
        }
        Command::PeakPoly { set, center } => {
            let m = center.unwrap_or(set.max());
            let poly = peakpoly::peak_coeffs(set, m, &limits)?;
            render::polynomial(out, fmt, "p", set, &poly)?;
        }
        Command::Count { kind, set, n, enumerate } => {
            let value = match (kind, enumerate) {
                (Kind::Descent, false) => peakpoly::count_descent_class(set, n)?,
                (Kind::Descent, true) => {
                    let q = peakpoly::ClassQuery::Descent(peakpoly::DescentClassQuery::new(set, n)?);
                    peakpoly::parallel_count(q, n.min(2), &limits)?
                }
                (Kind::Peak, false) if !peakpoly::is_admissible(set) => {
                    set.check_bound(n)?;
                    peakpoly::ExactCount::zero()
                }
                (Kind::Peak, false) => peakpoly::peak_poly_via_moebius(set, n)?,
                (Kind::Peak, true) => peakpoly::peak_poly_value(set, n, &limits)?,
            };
            let name = if kind == Kind::Descent { "d" } else { "p" };
            render::count(out, fmt, name, set, n, &value)?;
        }
        Command::Expand { set, n } => {
            let e = peakpoly::spike_expansion(set, n, &limits)?;
            render::spike_expansion(out, fmt, &e)?;
        }
        Command::Moebius { set, n } => {
            let e = peakpoly::moebius_expansion(set, n)?;
            render::moebius(out, fmt, &e)?;
        }
        Command::Flips { perm } => {
            render::flips(out, fmt, &peakpoly::FlipProfile::of(&perm))?;
        }
        Command::Table1 { set, center } => {
            let t = verify::table1(set, center.unwrap_or(set.max()), &limits)?;
            render::table(out, fmt, &t)?;
        }
        Command::Verify { claim, max_n, seed, random_cases } => {
            let cfg = SuiteConfig {
                limits,
                max_n,
                seed,
                random_cases,
            };
            let reports = match claim {
                Some(c) => verify::run_claim(c, &cfg),
                None => verify::run_suite(&cfg),
            };
            render::reports(out, fmt, &reports)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            eprintln!("{} of {} checks passed", reports.len() - failed, reports.len());
            if failed > 0 {
                return Ok(Status::VerificationFailed);
            }
        }
    }
    Ok(Status::Ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
