//! `dbr`: runs the verification suites on realizations read from JSON and
//! prints one report per line. Exit status 0 iff every report passes, 1 if
//! some report fails, 2 on usage, parse or dimension errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dbr_core::schur::rows_to_matrix;
use dbr_core::{corpus, suite, CMatrix, Report, RunConfig, StateSpaceSchur};

#[derive(Parser, Debug)]
#[command(
    name = "dbr",
    version,
    about = "Functional-model verification for rational Schur functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Relative tolerance for positive-semidefiniteness.
    #[arg(long, global = true, default_value_t = 1e-9)]
    postol: f64,
    /// Sampling seed; DBR_SEED takes precedence when set.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of sampled points or sections per check.
    #[arg(long, global = true, default_value_t = 20)]
    points: usize,
    /// Cayley and resolvent parameter, `re,im`.
    #[arg(long, global = true, default_value = "1,0", allow_hyphen_values = true)]
    alpha: String,
    /// Rigging parameter of the extrapolation space, `re,im`.
    #[arg(long, global = true, default_value = "1,0", allow_hyphen_values = true)]
    beta: String,
    /// Append a roll-up report.
    #[arg(long, global = true)]
    summary: bool,
    /// Directory the `corpus` command writes its realizations into.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Schur-class certificate, plus the conservativity residual for square realizations.
    Validate { schur: PathBuf },
    /// Half-plane model suite.
    Model { schur: PathBuf },
    /// Disk recovery and Cayley colligation at `--alpha`.
    Cayley { schur: PathBuf },
    /// Intertwinement of two realizations by the matrix in `e`.
    Intertwine {
        node0: PathBuf,
        node1: PathBuf,
        e: PathBuf,
    },
    /// Validate, model and Cayley suites over the built-in corpus.
    Corpus,
}

fn config(opts: &Opts) -> Result<RunConfig, String> {
    let parse = |name: &str, text: &str| {
        suite::parse_complex(text)
            .ok_or_else(|| format!("--{name}: expected `re,im`, got `{text}`"))
    };
    let mut cfg = RunConfig {
        tol: opts.tol,
        postol: opts.postol,
        points: opts.points,
        alpha: parse("alpha", &opts.alpha)?,
        beta: parse("beta", &opts.beta)?,
        ..RunConfig::default()
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(seed) = RunConfig::seed_from_env() {
        cfg.seed = seed;
    }
    if !(cfg.tol > 0.0 && cfg.postol > 0.0) {
        return Err("tolerances must be positive".into());
    }
    if !(cfg.alpha.re > 0.0 && cfg.beta.re > 0.0) {
        return Err("alpha and beta need a positive real part".into());
    }
    if cfg.points == 0 {
        return Err("--points must be positive".into());
    }
    Ok(cfg)
}

fn load(path: &Path) -> Result<StateSpaceSchur, String> {
    StateSpaceSchur::load(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_matrix(path: &Path) -> Result<CMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let cols = rows.first().map_or(0, Vec::len);
    rows_to_matrix(&rows, rows.len(), cols).map_err(|e| format!("{}: {e}", path.display()))
}

fn prefixed(name: &str, reports: Vec<Report>) -> Vec<Report> {
    reports
        .into_iter()
        .map(|mut r| {
            r.check_name = format!("{name}/{}", r.check_name);
            r
        })
        .collect()
}

fn run(cli: &Cli) -> Result<Vec<Report>, String> {
    let cfg = config(&cli.opts)?;
    let core = |r: dbr_core::Result<Vec<Report>>| r.map_err(|e| e.to_string());
    match &cli.command {
        Command::Validate { schur } => core(suite::validate(&load(schur)?, &cfg)),
        Command::Model { schur } => core(suite::model(&load(schur)?, &cfg)),
        Command::Cayley { schur } => core(suite::cayley(&load(schur)?, &cfg)),
        Command::Intertwine { node0, node1, e } => core(suite::intertwine(
            &load_matrix(e)?,
            &load(node0)?,
            &load(node1)?,
            &cfg,
        )),
        Command::Corpus => {
            if let Some(dir) = &cli.opts.corpus {
                core(corpus::write_corpus(dir).map(|_| Vec::new()))?;
            }
            let mut out = Vec::new();
            for entry in corpus::standard().map_err(|e| e.to_string())? {
                let mut reports = core(suite::validate(&entry.phi, &cfg))?;
                reports.extend(core(suite::model(&entry.phi, &cfg))?);
                reports.extend(core(suite::cayley(&entry.phi, &cfg))?);
                out.extend(prefixed(entry.name, reports));
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(mut reports) => {
            let pass = reports.iter().all(|r| r.pass);
            if cli.opts.summary {
                reports.push(suite::summary(&reports));
            }
            // A closed reader (e.g. `| head`) ends output early; the verdict stands.
            let mut out = std::io::stdout().lock();
            for r in &reports {
                if writeln!(out, "{}", r.to_json_line()).is_err() {
                    break;
                }
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("dbr: {msg}");
            ExitCode::from(2)
        }
    }
}
