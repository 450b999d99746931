//! `svs-test`: the command-line surface over the conformance toolkit.
//!
//! Subcommands follow the pipeline phases: `gen-cases` emits the fixture
//! library, `ingest-osv` builds a vulnerability snapshot, `run` executes
//! adapters over the cases, `eval` grades the recorded runs, `report` renders
//! the verdict matrix, and `scan` / `lint` expose the reference scanner and
//! the corpus linter directly. Everything is hermetic — no subcommand touches
//! the network — and idempotent given identical inputs.
//!
//! Exit codes: 0 success, 1 operational error (including a scan whose input
//! BOM is rejected), 2 usage error, and 3 when `eval` or `report` see at
//! least one silent failure — so CI can gate on regressions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::OnceLock;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use svs_core::evaluator::{
    evaluate_records, render_matrix, summarize_scenarios, CaseResult, MatrixFormat,
    ScenarioSummary, Verdict,
};
use svs_core::harness::{
    case_inputs_from_dir, execute_suite, load_adapters, load_runs, persist_run, AdapterConfig,
};
use svs_core::lint::lint_corpus;
use svs_core::refscanner::{render_report_text, scan, serialize_report, Profile};
use svs_core::sbom::parse_bom;
use svs_core::testlib::{emit_sbom_files, library_digest, Expectation, ExpectationsFile};
use svs_core::vulndb::{ingest_osv, seed_snapshot, Snapshot};

/// Schema tag for the document written by `eval` and read by `report`.
const RESULTS_SCHEMA: &str = "svs-test/results/1";

#[derive(Debug, Serialize, Deserialize)]
struct ResultsDocument {
    schema: String,
    results: Vec<CaseResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    scenarios: Vec<ScenarioSummary>,
}

/// Tool version plus the identities of everything it ships: the fixture
/// library digest and the seed snapshot id.
fn long_version() -> &'static str {
    static VERSION: OnceLock<String> = OnceLock::new();
    VERSION.get_or_init(|| {
        format!(
            "{}\nfixture library: {}\nseed snapshot: {}",
            env!("CARGO_PKG_VERSION"),
            library_digest(),
            seed_snapshot().snapshot_id
        )
    })
}

fn parse_profile(name: &str) -> Result<Profile, String> {
    Profile::parse(name).ok_or_else(|| {
        let known: Vec<&str> = Profile::ALL.iter().map(|p| p.name()).collect();
        format!("unknown profile `{name}` (known: {})", known.join(", "))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Markdown,
}

#[derive(Parser)]
#[command(
    name = "svs-test",
    about = "Conformance harness for SBOM-based vulnerability scanners",
    version = env!("CARGO_PKG_VERSION"),
    long_version = long_version()
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the 16-case fixture library: SBOMs, manifest, expectations
    GenCases {
        /// Output directory (created if absent)
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a vulnerability snapshot from OSV JSON documents
    IngestOsv {
        /// OSV files, each one document or an array of documents
        #[arg(required = true, value_name = "OSV_FILE")]
        osv: Vec<PathBuf>,
        /// Where to write the snapshot JSON
        #[arg(long)]
        out: PathBuf,
    },
    /// Scan one SBOM and print the JSON report on standard output
    Scan {
        /// CycloneDX JSON file to scan
        #[arg(long)]
        sbom: PathBuf,
        /// Snapshot file (defaults to the built-in seed snapshot)
        #[arg(long)]
        db: Option<PathBuf>,
        /// Scanner profile (see `profiles`)
        #[arg(long, default_value = "IDEAL", value_parser = parse_profile)]
        profile: Profile,
    },
    /// Run adapters over an emitted case directory and persist run records
    Run {
        /// Case directory written by `gen-cases`
        #[arg(long)]
        cases: PathBuf,
        /// Adapter configuration file, a JSON array (defaults to all built-in
        /// profiles)
        #[arg(long)]
        adapters: Option<PathBuf>,
        /// Directory that receives one `<run-id>/` per adapter
        #[arg(long)]
        out: PathBuf,
        /// Snapshot for built-in adapters (defaults to the built-in seed)
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Grade persisted runs against the case expectations
    Eval {
        /// Directory of persisted runs (the `run --out` directory)
        #[arg(long)]
        runs: PathBuf,
        /// Case directory holding expectations.json
        #[arg(long)]
        cases: PathBuf,
        /// Where to write the results document
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the verdict matrix from a results document
    Report {
        /// Results document written by `eval`
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
        format: ReportFormat,
    },
    /// Identifier-hygiene statistics over a CycloneDX corpus
    Lint {
        /// Directory scanned recursively for `.json` files
        #[arg(long)]
        corpus: PathBuf,
        /// Where to write the stats JSON (standard output when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scanner profiles
    Profiles,
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE by default, so `svs-test report | head` would
    // panic on the first write after the reader exits. Restore the default
    // disposition so the process ends quietly like any other pipeline tool.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::GenCases { out } => gen_cases(&out),
        Command::IngestOsv { osv, out } => ingest(&osv, &out),
        Command::Scan { sbom, db, profile } => scan_one(&sbom, db.as_deref(), profile),
        Command::Run {
            cases,
            adapters,
            out,
            db,
        } => run_suites(&cases, adapters.as_deref(), &out, db.as_deref()),
        Command::Eval { runs, cases, out } => eval_runs(&runs, &cases, &out),
        Command::Report { results, format } => report(&results, format),
        Command::Lint { corpus, out } => lint(&corpus, out.as_deref()),
        Command::Profiles => {
            print_profiles();
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_snapshot(db: Option<&Path>) -> Result<Snapshot> {
    match db {
        Some(path) => {
            Snapshot::load(path).with_context(|| format!("cannot load {}", path.display()))
        }
        None => Ok(seed_snapshot()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn gen_cases(out: &Path) -> Result<ExitCode> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let manifest = emit_sbom_files(out).context("emitting the fixture library failed")?;
    println!(
        "wrote {} cases, manifest.json and expectations.json to {}",
        manifest.entries.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn ingest(osv: &[PathBuf], out: &Path) -> Result<ExitCode> {
    let (snapshot, report) = ingest_osv(osv).context("OSV ingestion failed")?;
    for skip in &report.skipped {
        eprintln!("warning: skipped {}: {}", skip.file, skip.reason);
    }
    snapshot
        .save(out)
        .with_context(|| format!("cannot write {}", out.display()))?;
    println!(
        "snapshot {} ({} records from {} files) written to {}",
        snapshot.snapshot_id,
        snapshot.records.len(),
        report.files_read,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn scan_one(sbom: &Path, db: Option<&Path>, profile: Profile) -> Result<ExitCode> {
    let bytes = std::fs::read(sbom).with_context(|| format!("cannot read {}", sbom.display()))?;
    let bom = parse_bom(&bytes).context("input is not a scannable BOM")?;
    let snapshot = load_snapshot(db)?;
    let report = scan(&bom, &snapshot, &profile.config());

    // JSON report on stdout, WARN: lines on stderr — the same split the
    // harness records for built-in adapters.
    print!("{}", serialize_report(&report));
    for line in render_report_text(&report)
        .lines()
        .filter(|line| line.starts_with("WARN:"))
    {
        eprintln!("{line}");
    }
    Ok(if report.rejected.is_some() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_suites(
    cases_dir: &Path,
    adapters: Option<&Path>,
    out: &Path,
    db: Option<&Path>,
) -> Result<ExitCode> {
    let cases = case_inputs_from_dir(cases_dir)
        .with_context(|| format!("cannot read cases from {}", cases_dir.display()))?;
    let snapshot = load_snapshot(db)?;
    let adapters: Vec<AdapterConfig> = match adapters {
        Some(path) => load_adapters(path)
            .with_context(|| format!("cannot load adapters from {}", path.display()))?,
        None => Profile::ALL
            .into_iter()
            .map(AdapterConfig::builtin)
            .collect(),
    };
    if adapters.is_empty() {
        bail!("adapter list is empty");
    }

    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for adapter in &adapters {
        let records = execute_suite(&cases, adapter, &snapshot)
            .with_context(|| format!("adapter `{}` failed", adapter.name))?;
        let manifest = persist_run(&records, adapter, out)
            .with_context(|| format!("cannot persist run for `{}`", adapter.name))?;
        println!(
            "run {}: {} cases, tool {}",
            manifest.run_id,
            manifest.case_ids.len(),
            manifest.tool_version
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn load_expectations(cases_dir: &Path) -> Result<BTreeMap<String, Expectation>> {
    let path = cases_dir.join("expectations.json");
    let bytes = std::fs::read(&path).with_context(|| format!("cannot read {}", path.display()))?;
    let file: ExpectationsFile = serde_json::from_slice(&bytes)
        .with_context(|| format!("{} is not an expectations file", path.display()))?;
    Ok(file
        .cases
        .into_iter()
        .map(|case| (case.id, case.expectation))
        .collect())
}

fn silent_failures(results: &[CaseResult]) -> usize {
    results
        .iter()
        .filter(|r| r.outcome.verdict == Verdict::SilentFail)
        .count()
}

fn eval_runs(runs_dir: &Path, cases_dir: &Path, out: &Path) -> Result<ExitCode> {
    let runs = load_runs(runs_dir)
        .with_context(|| format!("cannot load runs from {}", runs_dir.display()))?;
    if runs.is_empty() {
        bail!("no runs found under {}", runs_dir.display());
    }
    let expectations = load_expectations(cases_dir)?;

    let mut results = Vec::new();
    for (_, records) in &runs {
        results.extend(evaluate_records(records, &expectations)?);
    }

    // Scenario summaries need a complete per-adapter suite; partial runs
    // still evaluate case by case.
    let scenarios = match summarize_scenarios(&results) {
        Ok(summaries) => summaries,
        Err(err) => {
            eprintln!("warning: no scenario summaries: {err}");
            Vec::new()
        }
    };

    let mut per_adapter: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for result in &results {
        let entry = per_adapter.entry(result.adapter_name.as_str()).or_default();
        match result.outcome.verdict {
            Verdict::Pass => entry.0 += 1,
            Verdict::Warning => entry.1 += 1,
            Verdict::SilentFail => entry.2 += 1,
        }
    }
    for (adapter, (pass, warning, silent)) in &per_adapter {
        println!("{adapter}: {pass} pass, {warning} warning, {silent} silent-fail");
    }

    let document = ResultsDocument {
        schema: RESULTS_SCHEMA.to_string(),
        results,
        scenarios,
    };
    let mut text = serde_json::to_string_pretty(&document).expect("results serialize");
    text.push('\n');
    write_text(out, &text)?;
    println!("results written to {}", out.display());

    Ok(exit_for_results(&document.results))
}

fn exit_for_results(results: &[CaseResult]) -> ExitCode {
    let silent = silent_failures(results);
    if silent > 0 {
        eprintln!("{silent} silent failure(s) detected");
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn report(results_path: &Path, format: ReportFormat) -> Result<ExitCode> {
    let bytes = std::fs::read(results_path)
        .with_context(|| format!("cannot read {}", results_path.display()))?;
    let document: ResultsDocument = serde_json::from_slice(&bytes)
        .with_context(|| format!("{} is not a results document", results_path.display()))?;
    if document.schema != RESULTS_SCHEMA {
        bail!(
            "unsupported results schema `{}` (expected `{RESULTS_SCHEMA}`)",
            document.schema
        );
    }

    let matrix_format = match format {
        ReportFormat::Json => MatrixFormat::Json,
        ReportFormat::Markdown => MatrixFormat::Markdown,
    };
    print!("{}", render_matrix(&document.results, matrix_format)?);
    if format == ReportFormat::Markdown && !document.scenarios.is_empty() {
        println!();
        for summary in &document.scenarios {
            println!("{}", summary.interpretation);
        }
    }
    Ok(exit_for_results(&document.results))
}

fn lint(corpus: &Path, out: Option<&Path>) -> Result<ExitCode> {
    if !corpus.is_dir() {
        bail!("{} is not a directory", corpus.display());
    }
    let stats = lint_corpus(corpus);
    let mut text = serde_json::to_string_pretty(&stats).expect("stats serialize");
    text.push('\n');
    match out {
        Some(path) => {
            write_text(path, &text)?;
            println!(
                "{} files linted ({} skipped, {} unparsed); stats written to {}",
                stats.files_scanned,
                stats.files_skipped,
                stats.files_unparsed,
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn print_profiles() {
    for profile in Profile::ALL {
        let description = match profile {
            Profile::Ideal => {
                "full-featured reference: CPE + purl matching, VEX honored, strict structure"
            }
            Profile::PurlOnly => "ignores CPE identifiers; components without a purl go untested",
            Profile::VersionFieldDependent => {
                "only tests components that carry an explicit version field"
            }
            Profile::NoVex => "ignores embedded VEX statements; suppressed findings resurface",
            Profile::Lenient => "accepts structurally invalid documents instead of rejecting",
        };
        println!("{:<24} {description}", profile.name());
    }
}
