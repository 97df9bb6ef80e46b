//! Command-line front end: argument parsing, report rendering, `describe`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::algebra::SlAlgebra;
use crate::par::Execution;
use crate::parabolic::{build_parabolic, DEFAULT_BOUND};
use crate::verify::{self, CheckId, CheckResult, Compositions, RunConfig};
use crate::weyl::{self, LeviComposition, Root};

#[derive(Debug, Parser)]
#[command(name = "parabolic", version, about = "Exact checks of polarized gradient spans on parabolic subalgebras of sl_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the verification grid and emit a report.
    Verify(VerifyArgs),
    /// Print root sets and dimensions of one standard parabolic.
    Describe(DescribeArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Ranks n of sl_n, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4])]
    rank: Vec<usize>,
    /// Levi composition such as 2,1,1; repeat for several, or `all`.
    #[arg(long)]
    levi: Vec<String>,
    /// Trials per randomized check.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Bound on sampled integer coefficients.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: i64,
    /// Check ids, comma separated, or `all`.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run on the current thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct DescribeArgs {
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    levi: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

/// A validated `verify` invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub run: RunConfig,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Invocation {
    Verify(VerifyConfig),
    Describe { levi: LeviComposition },
}

fn usage(kind: ErrorKind, message: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, message)
}

/// Parses and validates `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv)?.command {
        Command::Verify(a) => verify_config(a).map(Invocation::Verify),
        Command::Describe(a) => {
            let levi: LeviComposition = a
                .levi
                .parse()
                .map_err(|e| usage(ErrorKind::ValueValidation, format!("--levi: {e}")))?;
            levi.check_rank(a.rank).map_err(|e| {
                usage(ErrorKind::ValueValidation, format!("--levi: {e} (from --rank {})", a.rank))
            })?;
            if !(2..=weyl::MAX_RANK).contains(&a.rank) {
                return Err(usage(
                    ErrorKind::ValueValidation,
                    format!("--rank: {} is outside 2..={}", a.rank, weyl::MAX_RANK),
                ));
            }
            Ok(Invocation::Describe { levi })
        }
    }
}

fn verify_config(a: VerifyArgs) -> Result<VerifyConfig, clap::Error> {
    let compositions = if a.levi.is_empty() || a.levi.iter().any(|l| l == "all") {
        Compositions::All
    } else {
        let list: Result<Vec<LeviComposition>, _> = a.levi.iter().map(|s| s.parse()).collect();
        Compositions::List(list.map_err(|e| usage(ErrorKind::ValueValidation, format!("--levi: {e}")))?)
    };
    let checks = if a.checks.is_empty() || a.checks.iter().any(|c| c == "all") {
        None
    } else {
        let list: Result<Vec<CheckId>, _> = a.checks.iter().map(|s| s.parse()).collect();
        Some(list.map_err(|e| usage(ErrorKind::InvalidValue, format!("--checks: {e}")))?)
    };
    let run = RunConfig {
        ranks: a.rank,
        compositions,
        samples: a.samples,
        seed: a.seed,
        bound: a.bound,
        checks,
        execution: if a.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    run.validate()
        .map_err(|e| usage(ErrorKind::ValueValidation, e))?;
    Ok(VerifyConfig {
        run,
        output: a.output,
        format: a.format,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub n: usize,
    pub levi: LeviComposition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub cells: Vec<GridCell>,
    pub samples: usize,
    pub bound: i64,
    pub checks: Vec<CheckId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub grid: Grid,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn new(config: &RunConfig, results: Vec<CheckResult>) -> Self {
        let cells = config
            .cells()
            .into_iter()
            .map(|levi| GridCell { n: levi.n(), levi })
            .collect();
        Report {
            meta: Meta {
                seed: config.seed,
                grid: Grid {
                    cells,
                    samples: config.samples,
                    bound: config.bound,
                    checks: config.selected_checks(),
                },
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            results,
        }
    }

    pub fn failures(&self) -> usize {
        self.results.iter().map(|r| r.failures).sum()
    }

    /// 0 iff no check failed.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failures() > 0)
    }
}

/// Renders the report; JSON output is newline-terminated.
pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Markdown => markdown(report).into_bytes(),
    }
}

fn levi_label(levi: &Option<LeviComposition>) -> String {
    levi.as_ref().map_or_else(|| "all".to_string(), ToString::to_string)
}

fn markdown(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Verification report\n");
    let _ = writeln!(
        s,
        "seed {}, {} samples per randomized check, bound {}, version {}\n",
        report.meta.seed, report.meta.grid.samples, report.meta.grid.bound, report.meta.version
    );
    let total = report.failures();
    let _ = writeln!(
        s,
        "**{}**: {} results, {} failures\n",
        if total == 0 { "PASS" } else { "FAIL" },
        report.results.len(),
        total
    );
    for check in CheckId::ALL {
        let rows: Vec<&CheckResult> = report.results.iter().filter(|r| r.check_id == check).collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(s, "## {check}\n");
        if check == CheckId::RichardsonDensity {
            let _ = writeln!(
                s,
                "Passes when at least {:.0}% of draws are Richardson; the threshold is a harness choice.\n",
                verify::RICHARDSON_THRESHOLD * 100.0
            );
        }
        let _ = writeln!(s, "| n | levi | trials | failures | rejected | elapsed ms |");
        let _ = writeln!(s, "|---|------|--------|----------|----------|------------|");
        for r in &rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {:.1} |",
                r.n,
                levi_label(&r.levi),
                r.trials,
                r.failures,
                r.rejected,
                r.elapsed_ms
            );
        }
        let failing: Vec<_> = rows.iter().filter(|r| !r.passed()).collect();
        if !failing.is_empty() {
            let _ = writeln!(s, "\nWitnesses:\n");
            for r in failing {
                for w in &r.witnesses {
                    let evidence = serde_json::to_string(&w.evidence).expect("evidence serializes");
                    let _ = writeln!(
                        s,
                        "- n={} levi={} seed={} trial={} trial_seed={}: `{}`",
                        r.n,
                        levi_label(&r.levi),
                        w.seed,
                        w.trial.map_or_else(|| "-".to_string(), |t| t.to_string()),
                        w.trial_seed.map_or_else(|| "-".to_string(), |t| t.to_string()),
                        evidence
                    );
                }
            }
        }
        s.push('\n');
    }
    s
}

fn root_list<'a>(roots: impl IntoIterator<Item = &'a Root>) -> String {
    let items: Vec<String> = roots.into_iter().map(ToString::to_string).collect();
    if items.is_empty() {
        "(none)".to_string()
    } else {
        items.join(" ")
    }
}

/// Human-readable summary of one standard parabolic.
pub fn describe(levi: &LeviComposition) -> crate::Result<String> {
    let g = SlAlgebra::new(levi.n())?;
    let p = build_parabolic(&g, levi)?;
    let mut s = String::new();
    let _ = writeln!(s, "sl_{}  levi {}", levi.n(), levi);
    let _ = writeln!(s, "R_l:      {}", root_list(p.r_l()));
    let _ = writeln!(s, "R'_+:     {}", root_list(p.r_prime_plus()));
    let _ = writeln!(s, "roots(p): {}", root_list(&weyl::parabolic_roots(levi)));
    let _ = writeln!(s, "dim g     {}", g.dim());
    let _ = writeln!(s, "dim p     {}", p.p().dim());
    let _ = writeln!(s, "dim p_u   {}", p.pu().dim());
    let _ = writeln!(s, "b_g       {}", p.b_g());
    let _ = writeln!(s, "b_l       {}", p.b_l());
    let _ = writeln!(s, "|W/W_l|   {}", weyl::coset_count(levi)?);
    Ok(s)
}

/// Entry point; returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let invocation = match parse_args(argv) {
        Ok(i) => i,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match invocation {
        Invocation::Describe { levi } => match describe(&levi) {
            Ok(text) => {
                print!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Invocation::Verify(config) => {
            let report = Report::new(&config.run, verify::run_all(&config.run));
            let bytes = emit_report(&report, config.format);
            let written = match &config.output {
                Some(path) => std::fs::write(path, &bytes)
                    .map_err(|e| format!("--output {}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(&bytes)
                    .map_err(|e| format!("stdout: {e}")),
            };
            match written {
                Ok(()) => report.exit_code(),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    2
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Invocation, clap::Error> {
        parse_args(std::iter::once("parabolic").chain(args.iter().copied()))
    }

    fn verify_config(args: &[&str]) -> VerifyConfig {
        match parse(args).unwrap() {
            Invocation::Verify(c) => c,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defaults() {
        let c = verify_config(&["verify"]);
        assert_eq!(c.run, RunConfig::default());
        assert_eq!(c.format, Format::Json);
        assert!(c.output.is_none());
        assert_eq!(c.run.cells().len(), 2 + 4 + 8);
    }

    #[test]
    fn single_cell() {
        let c = verify_config(&["verify", "--rank", "3", "--levi", "2,1", "--samples", "100", "--seed", "7"]);
        assert_eq!(c.run.cells(), vec!["2,1".parse::<LeviComposition>().unwrap()]);
        assert_eq!((c.run.samples, c.run.seed), (100, 7));
        let c = verify_config(&["verify", "--levi", "1,2", "--levi", "2,1", "--rank", "3", "--checks", "weyl_lemma,varpi_image"]);
        assert_eq!(c.run.cells().len(), 2);
        assert_eq!(c.run.selected_checks(), vec![CheckId::VarpiImage, CheckId::WeylLemma]);
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let e = parse(&["verify", "--levi", "2,2", "--rank", "3"]).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::ValueValidation);
        assert!(e.to_string().contains("--levi"), "{e}");
        assert_ne!(e.exit_code(), 0);
        for (args, flag) in [
            (&["verify", "--rank", "9"][..], "--rank"),
            (&["verify", "--samples", "0"], "--samples"),
            (&["verify", "--bound", "0"], "--bound"),
            (&["verify", "--checks", "bogus"], "--checks"),
            (&["verify", "--levi", "2,x"], "--levi"),
            (&["verify", "--format", "xml"], "--format"),
            (&["describe", "--rank", "3", "--levi", "1,1"], "--levi"),
        ] {
            let e = parse(args).unwrap_err();
            assert!(e.to_string().contains(flag), "{args:?}: {e}");
        }
    }

    #[test]
    fn describe_output() {
        let levi: LeviComposition = "2,1".parse().unwrap();
        assert_eq!(parse(&["describe", "--rank", "3", "--levi", "2,1"]).unwrap(), Invocation::Describe { levi: levi.clone() });
        let text = describe(&levi).unwrap();
        assert!(text.contains("R'_+:     (1,3) (2,3)"), "{text}");
        assert!(text.contains("dim p     6"));
        assert!(text.contains("dim p_u   2"));
        assert!(text.contains("b_l       3"));
        assert!(text.contains("|W/W_l|   3"));
    }

    #[test]
    fn report_round_trip_and_newline() {
        let config = RunConfig {
            ranks: vec![2, 3],
            samples: 3,
            checks: Some(vec![CheckId::VxyInP, CheckId::FiberCardinality, CheckId::RichardsonDensity]),
            ..RunConfig::default()
        };
        let report = Report::new(&config, verify::run_all(&config));
        let bytes = emit_report(&report, Format::Json);
        assert_eq!(bytes.last(), Some(&b'\n'));
        let mut back: Report = serde_json::from_slice(&bytes).unwrap();
        let mut report = report;
        for r in back.results.iter_mut().chain(report.results.iter_mut()) {
            r.elapsed_ms = 0.0;
        }
        assert_eq!(back, report);
        assert_eq!(report.exit_code(), 0);
        let md = String::from_utf8(emit_report(&report, Format::Markdown)).unwrap();
        assert!(md.contains("## fiber_cardinality"));
        assert!(md.contains("| 3 | 2,1 |"));
    }

    #[test]
    fn empty_report() {
        let config = RunConfig { ranks: vec![], ..RunConfig::default() };
        let report = Report::new(&config, Vec::new());
        let v: serde_json::Value = serde_json::from_slice(&emit_report(&report, Format::Json)).unwrap();
        assert_eq!(v["results"], serde_json::json!([]));
        assert_eq!(v["meta"]["seed"], 42);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn failing_report_exits_nonzero() {
        let cell = verify::Cell::new(&LeviComposition::borel(3)).unwrap().without_g_generator(1);
        let result = cell.run(CheckId::VxyEqB, &verify::Params::new(4, 42));
        let report = Report::new(&RunConfig::default(), vec![result]);
        assert_eq!(report.exit_code(), 1);
        let v: serde_json::Value = serde_json::from_slice(&emit_report(&report, Format::Json)).unwrap();
        let w = &v["results"][0]["witnesses"][0];
        assert_eq!(w["seed"], 42);
        assert!(w["trial"].is_u64());
        assert!(w["trial_seed"].is_u64());
        assert_eq!(w["kind"], "pair");
        let md = String::from_utf8(emit_report(&report, Format::Markdown)).unwrap();
        assert!(md.contains("Witnesses:"));
        assert!(md.contains("**FAIL**"));
    }
}
