//! Argument definitions and command execution.
//!
//! Exit codes: 0 all checks pass, 1 a check failed (the report is still
//! written), 2 usage or parameter error, 3 impossible post-selection.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gedanken_core::scenarios::{list_scenarios, run_scenario, scenario_info, ScenarioReport};
use gedanken_core::Error;

use crate::report::{checks_csv, number, to_json, ReportDoc, ScenarioDoc};
use crate::values::{parse_overrides, parse_range};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IMPOSSIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gedanken", version, about = "Run and check post-selection thought experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the scenario catalog with parameter schemas.
    List {
        #[arg(long, value_enum, default_value_t = ListFormat::Text)]
        format: ListFormat,
    },
    /// Run one scenario and emit its report.
    Run(RunArgs),
    /// Run a scenario over a range of one parameter; emits CSV of metrics.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ListFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Parameter override, e.g. `alpha=pi/40` (repeatable).
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (written atomically); standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub scenario: String,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub scenario: String,
    pub param: String,
    /// `start:stop:steps` or a comma-separated list of values.
    pub range: String,
    #[command(flatten)]
    pub common: Common,
}

/// What to print and how to exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, msg: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: msg.into() + "\n" }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_impossible_outcome() {
        return EXIT_IMPOSSIBLE;
    }
    match root(err) {
        Error::UnknownScenario(_)
        | Error::UnknownParameter { .. }
        | Error::ParameterOutOfRange { .. }
        | Error::InvalidParameter(_)
        | Error::InvalidStrength(_)
        | Error::UnderResolved { .. }
        | Error::DomainTooSmall { .. } => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

fn root(err: &Error) -> &Error {
    match err {
        Error::Step { source, .. } => root(source),
        e => e,
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::List { format } => list(*format),
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
    }
}

fn list(format: ListFormat) -> Outcome {
    let catalog = list_scenarios();
    let stdout = match format {
        ListFormat::Json => to_json(&catalog.iter().map(ScenarioDoc::from).collect::<Vec<_>>()),
        ListFormat::Text => {
            let mut s = String::new();
            for info in &catalog {
                let params: Vec<String> =
                    info.params.iter().map(|p| format!("{}={} {}", p.name, number(p.default), p.range())).collect();
                let params = if params.is_empty() { "-".to_string() } else { params.join(", ") };
                s += &format!("{:<24} {:<48} {}\n", info.name, params, info.anchor);
            }
            s
        }
    };
    Outcome { code: EXIT_PASS, stdout, stderr: String::new() }
}

fn run_report(scenario: &str, overrides: &[(String, f64)], seed: u64) -> Result<ScenarioReport, Outcome> {
    let refs: Vec<(&str, f64)> = overrides.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    run_scenario(scenario, &refs, seed).map_err(|e| Outcome::fail(exit_code(&e), format!("error: {e}")))
}

fn failures(doc: &ReportDoc) -> String {
    doc.checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("check failed: {} (expected {}, got {})\n", c.name, number(c.expected), number(c.actual)))
        .collect()
}

fn run(args: &RunArgs) -> Outcome {
    let overrides = match parse_overrides(&args.common.params) {
        Ok(o) => o,
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("error: {e}")),
    };
    let report = match run_report(&args.scenario, &overrides, args.common.seed) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let doc = ReportDoc::from(&report);
    let text = match args.format {
        Format::Json => to_json(&doc),
        Format::Csv => checks_csv(&doc),
    };
    let code = if doc.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED };
    deliver(text, args.common.out.as_deref(), code, failures(&doc))
}

fn sweep(args: &SweepArgs) -> Outcome {
    let usage = |e: String| Outcome::fail(EXIT_USAGE, format!("error: {e}"));
    let points = match parse_range(&args.range) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let fixed = match parse_overrides(&args.common.params) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    if fixed.iter().any(|(k, _)| *k == args.param) {
        return usage(format!("`{}` is both swept and fixed", args.param));
    }
    let info = match scenario_info(&args.scenario) {
        Ok(i) => i,
        Err(e) => return Outcome::fail(exit_code(&e), format!("error: {e}")),
    };
    let Some(spec) = info.params.iter().find(|p| p.name == args.param) else {
        return usage(format!("scenario `{}` has no parameter `{}`", args.scenario, args.param));
    };
    for &x in &points {
        if let Err(e) = spec.validate(x) {
            return Outcome::fail(exit_code(&e), format!("error: {e}"));
        }
    }

    let mut rows = Vec::with_capacity(points.len());
    for &x in &points {
        let mut overrides = fixed.clone();
        overrides.push((args.param.clone(), x));
        match run_report(&args.scenario, &overrides, args.common.seed) {
            Ok(r) => rows.push((x, ReportDoc::from(&r))),
            Err(mut o) => {
                o.stderr = format!("at {} = {}: {}", args.param, number(x), o.stderr);
                return o;
            }
        }
    }

    let mut columns: Vec<&str> = Vec::new();
    for (_, doc) in &rows {
        for (name, _) in &doc.metrics {
            if !columns.contains(&name.as_str()) {
                columns.push(name);
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![args.param.as_str(), "passed", "failed_checks"];
    header.extend(&columns);
    w.write_record(&header).expect("in-memory csv");
    let mut stderr = String::new();
    for (x, doc) in &rows {
        let failed = doc.checks.iter().filter(|c| !c.pass).count();
        let mut record = vec![number(*x), doc.passed().to_string(), failed.to_string()];
        record.extend(columns.iter().map(|c| doc.metric(c).map(number).unwrap_or_default()));
        w.write_record(&record).expect("in-memory csv");
        if failed > 0 {
            stderr += &format!("at {} = {}:\n{}", args.param, number(*x), failures(doc));
        }
    }
    let text = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv writes UTF-8");
    let code = if rows.iter().all(|(_, d)| d.passed()) { EXIT_PASS } else { EXIT_CHECK_FAILED };
    deliver(text, args.common.out.as_deref(), code, stderr)
}

fn deliver(text: String, out: Option<&Path>, code: i32, stderr: String) -> Outcome {
    match out {
        None => Outcome { code, stdout: text, stderr },
        Some(path) => match write_atomic(path, text.as_bytes()) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr },
            Err(e) => Outcome::fail(EXIT_USAGE, format!("error: cannot write {}: {e}", path.display())),
        },
    }
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let name = path.file_name().ok_or_else(|| std::io::Error::other("output path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
