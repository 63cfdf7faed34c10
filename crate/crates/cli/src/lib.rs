//! Argument handling and dispatch for the `pellphi` binary.
//!
//! Exit codes: 0 when every report is Verified (or the command only prints
//! data), 1 on any Counterexample, 2 on any Unresolved, 64 on usage errors.

use std::io::Write;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use pellphi_core::arith::DEFAULT_BUDGET;
use pellphi_core::claims::{self, Bounds};
use pellphi_core::modular::{period_table, residue_preimages};
use pellphi_core::render::{render_report, render_table, to_json};
use pellphi_core::sequences::terms_upto;
use pellphi_core::{SequenceKind, Status, VerificationReport, Verifier};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_UNRESOLVED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

pub const BUDGET_ENV: &str = "PELLPHI_BUDGET";

const GRAMMAR: &str = "usage: pellphi <command> [claim-id|kind] [--mod K] [--max-n N] [--min-m M] \
[--residue R] [--budget SECONDS] [--jobs J] [--json]
commands: seq, table, preimages, verify, replay, search
kinds: pell, assoc-pell, balancing";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Seq,
    Table,
    Preimages,
    Verify,
    Replay,
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "pellphi", version, about = "Pell and associated Pell totient verification")]
struct Args {
    command: Command,
    /// Claim id (verify, replay; `all` for every claim) or sequence kind.
    target: Option<String>,
    #[arg(long = "mod", value_name = "K")]
    modulus: Option<u64>,
    #[arg(long, value_name = "N")]
    max_n: Option<u64>,
    #[arg(long, value_name = "M")]
    min_m: Option<u32>,
    /// Residue for `preimages`.
    #[arg(long, value_name = "R")]
    residue: Option<u64>,
    /// Factorization budget per number, in seconds.
    #[arg(long, value_name = "SECONDS")]
    budget: Option<f64>,
    #[arg(long, value_name = "J")]
    jobs: Option<usize>,
    #[arg(long)]
    json: bool,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub target: Option<String>,
    pub modulus: Option<u64>,
    pub residue: Option<u64>,
    pub bounds: Bounds,
    pub budget: Duration,
    pub output: Output,
    pub jobs: usize,
}

#[derive(Debug)]
struct UsageError(String);

impl<T: std::fmt::Display> From<T> for UsageError {
    fn from(e: T) -> Self {
        UsageError(e.to_string())
    }
}

fn parse_budget(secs: f64) -> Result<Duration, UsageError> {
    Duration::try_from_secs_f64(secs).map_err(|_| UsageError(format!("invalid budget `{secs}`")))
}

impl RunConfig {
    fn from_args(a: Args, env_budget: Option<String>) -> Result<Self, UsageError> {
        let budget = match (a.budget, env_budget) {
            (Some(s), _) => parse_budget(s)?,
            (None, Some(s)) => {
                let secs: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| UsageError(format!("{BUDGET_ENV}=`{s}` is not a number")))?;
                parse_budget(secs)?
            }
            (None, None) => DEFAULT_BUDGET,
        };
        let jobs = match a.jobs {
            Some(0) => return Err(UsageError("--jobs must be at least 1".into())),
            Some(j) => j,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(RunConfig {
            command: a.command,
            target: a.target,
            modulus: a.modulus,
            residue: a.residue,
            bounds: Bounds {
                max_n: a.max_n,
                min_m: a.min_m,
            },
            budget,
            output: if a.json { Output::Json } else { Output::Text },
            jobs,
        })
    }

    fn kind(&self) -> Result<SequenceKind, UsageError> {
        let t = self
            .target
            .as_deref()
            .ok_or_else(|| UsageError("missing sequence kind".into()))?;
        Ok(t.parse()?)
    }

    fn claim(&self) -> Result<&str, UsageError> {
        self.target
            .as_deref()
            .ok_or_else(|| UsageError("missing claim id".into()))
    }
}

fn exit_code(reports: &[VerificationReport]) -> i32 {
    match reports.iter().map(|r| r.status).max() {
        Some(Status::Counterexample) => EXIT_COUNTEREXAMPLE,
        Some(Status::Unresolved) => EXIT_UNRESOLVED,
        _ => EXIT_OK,
    }
}

fn emit_reports(cfg: &RunConfig, reports: &[VerificationReport], out: &mut dyn Write) -> std::io::Result<()> {
    match cfg.output {
        Output::Json if reports.len() == 1 => writeln!(out, "{}", to_json(&reports[0])),
        Output::Json => writeln!(out, "{}", serde_json::to_string_pretty(reports).expect("reports serialize")),
        Output::Text => reports.iter().try_for_each(|r| write!(out, "{}", render_report(r))),
    }
}

fn default_moduli(kind: SequenceKind) -> Result<&'static [u64], UsageError> {
    match kind {
        SequenceKind::Pell => Ok(&[11, 20, 40]),
        SequenceKind::AssocPell => Ok(&[4, 5, 8, 20]),
        SequenceKind::Balancing => Err(UsageError("balancing tables need --mod".into())),
    }
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, UsageError> {
    let verifier = || Verifier::new(cfg.budget, cfg.jobs);
    let json = cfg.output == Output::Json;
    match cfg.command {
        Command::Seq => {
            let kind = cfg.kind()?;
            let terms = terms_upto(kind, cfg.bounds.max_n.unwrap_or(20));
            if json {
                let strings: Vec<String> = terms.iter().map(ToString::to_string).collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&strings)?)?;
            } else {
                for (n, t) in terms.iter().enumerate() {
                    writeln!(out, "{n} {t}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Table => {
            let kind = cfg.kind()?;
            let moduli = match cfg.modulus {
                Some(k) => vec![k],
                None => default_moduli(kind)?.to_vec(),
            };
            let tables = moduli
                .iter()
                .map(|&k| period_table(kind, k))
                .collect::<Result<Vec<_>, _>>()?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&tables)?)?;
            } else {
                for t in &tables {
                    writeln!(out, "{}", render_table(t))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Preimages => {
            let kind = cfg.kind()?;
            let k = cfg.modulus.ok_or_else(|| UsageError("preimages needs --mod".into()))?;
            let r = cfg.residue.ok_or_else(|| UsageError("preimages needs --residue".into()))?;
            let set = residue_preimages(kind, k, r)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&set)?)?;
            } else {
                writeln!(out, "{set}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let id = cfg.claim()?;
            let v = verifier();
            let reports = if id == "all" {
                claims::CLAIMS
                    .iter()
                    .map(|c| claims::run_claim(&v, c.id, cfg.bounds))
                    .collect::<Result<Vec<_>, _>>()?
            } else {
                vec![claims::run_claim(&v, id, cfg.bounds)?]
            };
            emit_reports(cfg, &reports, out)?;
            Ok(exit_code(&reports))
        }
        Command::Replay => {
            let report = claims::replay(&verifier(), cfg.claim()?, cfg.bounds)?;
            emit_reports(cfg, std::slice::from_ref(&report), out)?;
            Ok(exit_code(std::slice::from_ref(&report)))
        }
        Command::Search => {
            let kind = cfg.kind()?;
            let report = verifier().search_repdigit_totients(
                kind,
                cfg.bounds.max_n.unwrap_or(60),
                cfg.bounds.min_m.unwrap_or(2),
            );
            emit_reports(cfg, std::slice::from_ref(&report), out)?;
            Ok(exit_code(std::slice::from_ref(&report)))
        }
    }
}

/// Runs one invocation. `argv` includes the program name. The budget
/// override is read from `PELLPHI_BUDGET`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_env(argv, std::env::var(BUDGET_ENV).ok(), out, err)
}

/// [`run`] with the budget override passed explicitly.
pub fn run_with_env<I, S>(argv: I, env_budget: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            let _ = writeln!(err, "{GRAMMAR}");
            return EXIT_USAGE;
        }
    };
    let result = RunConfig::from_args(args, env_budget).and_then(|cfg| execute(&cfg, out));
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(err, "{GRAMMAR}");
            EXIT_USAGE
        }
    }
}
