//! `zonalis`: scans, verification suites and fixed-point experiments.

mod commands;
mod range;
mod table;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use table::Format;

#[derive(Parser)]
#[command(name = "zonalis", version, about = "Zonal harmonic analysis and Minkowski valuation fixed points")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; ZONALIS_THREADS takes precedence.
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    /// Exit with status 1 when a verdict fails or cannot be certified.
    #[arg(long, global = true)]
    pub strict: bool,
    /// `key = value` file of flags; command-line flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Legendre polynomial P^n_k.
    Legendre(commands::LegendreArgs),
    /// Multipliers of a Berg kernel or a body's support function.
    Multipliers(commands::MultipliersArgs),
    /// Certified Q-polynomial extrema and conjecture verdicts over a grid.
    Qscan(commands::QscanArgs),
    /// Pencil intervals J and I, with the closed-form cross-check.
    Intervals(commands::IntervalsArgs),
    /// Validity, area measures and second-multiplier ratios of canonical bodies.
    Bodies(commands::BodiesArgs),
    /// Conditions C1, C2, C3 and C3' for a valuation.
    Conditions(commands::ConditionsArgs),
    /// Fixed-point iteration of a mean section operator.
    Msofixpoint(commands::MsoArgs),
    /// Fixed-point iteration of a valuation given by a Berg kernel or a generating body.
    Fixpoint(commands::FixpointArgs),
}

const SUBCOMMANDS: [&str; 8] =
    ["legendre", "multipliers", "qscan", "intervals", "bodies", "conditions", "msofixpoint", "fixpoint"];

/// Splice flags from `--config FILE` in right after the subcommand, so later flags override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (j, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(j + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut extra = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key = value", ln + 1))?;
        let (k, v) = (k.trim(), v.trim());
        match v {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => {
                extra.push(format!("--{k}"));
                extra.push(v.to_string());
            }
        }
    }
    let at = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())).map_or(args.len(), |p| p + 1);
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn threads(g: &Global) -> Result<usize, String> {
    let env = match std::env::var("ZONALIS_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Some(t),
            _ => return Err(format!("ZONALIS_THREADS must be a positive integer, got '{v}'")),
        },
        Err(_) => None,
    };
    if g.parallel == Some(0) {
        return Err("--parallel must be positive".into());
    }
    Ok(env.or(g.parallel).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    let pool = match threads(&cli.global).and_then(|t| {
        rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| e.to_string())
    }) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let g = cli.global.clone();
    let result = pool.install(|| match &cli.cmd {
        Cmd::Legendre(a) => commands::legendre_cmd(a),
        Cmd::Multipliers(a) => commands::multipliers(a),
        Cmd::Qscan(a) => commands::qscan(a),
        Cmd::Intervals(a) => commands::intervals(a),
        Cmd::Bodies(a) => commands::bodies(a),
        Cmd::Conditions(a) => commands::conditions(a),
        Cmd::Msofixpoint(a) => commands::msofixpoint(a),
        Cmd::Fixpoint(a) => commands::fixpoint(a),
    });
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for f in &report.findings {
        eprintln!("finding: {f}");
    }
    let bytes = match table::render(&report.tables, g.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &g.out {
        Some(p) => std::fs::write(p, &bytes),
        None => std::io::Write::write_all(&mut std::io::stdout().lock(), &bytes),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if g.strict && !report.findings.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
