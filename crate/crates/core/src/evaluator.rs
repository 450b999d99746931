//! Grading: map run records to verdicts, then aggregate and render.
//!
//! A record is judged only by what its tool showed the user — the report
//! text (re-rendered to the human-readable view when it is a reference
//! scanner JSON report, so suppressed findings stay invisible) plus stderr.
//! Three verdicts exist:
//!
//! * `PASS` — every required finding appeared (any alternative id counts)
//!   and no forbidden finding did; or the case accepts rejection and the
//!   tool rejected the BOM.
//! * `WARNING` — the expected findings are missing, but the tool explicitly
//!   warned in a way the case accepts (for most cases: a warning that names
//!   the affected component).
//! * `SILENT_FAIL` — neither happened. If some warning-ish text was present
//!   but did not qualify, the result is flagged `needs_review` for human
//!   triage rather than silently upgraded.

use crate::harness::{ExitStatus, RunRecord};
use crate::refscanner::{render_report_text, ScanReport};
use crate::testlib::{build_library, scenarios, Expectation, WarningMatcher};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Schema tag for the JSON form of the results matrix.
pub const MATRIX_SCHEMA: &str = "svs-test/matrix/1";

/// Text that looks like trouble without qualifying as an accepted warning;
/// its presence turns a silent failure into one that needs human review.
const GENERIC_WARNING_PATTERN: &str = r"(?i)(warn|error|fail|could not|cannot|unable|skip|ignor)";

#[derive(Debug, thiserror::Error)]
pub enum EvaluatorError {
    #[error("no expectation known for case `{0}`")]
    UnknownCase(String),
    #[error("incomplete suite: missing {}", missing.join(", "))]
    IncompleteSuite { missing: Vec<String> },
    #[error("conflicting results for {0}")]
    ConflictingResults(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Warning,
    SilentFail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Warning => "WARNING",
            Verdict::SilentFail => "SILENT_FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub verdict: Verdict,
    /// Set only on silent failures where warning-like text was seen but did
    /// not qualify — a human should look before trusting the verdict.
    pub needs_review: bool,
    /// The strings that justified the verdict (matched ids, warning lines,
    /// rejection evidence).
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case_id: String,
    pub adapter_name: String,
    pub outcome: Outcome,
    pub notes: String,
}

/// One adapter's verdicts over a scenario's cases, plus the behavior label
/// the fixed rule table assigns to that verdict pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterScenarioVerdicts {
    pub adapter_name: String,
    /// One verdict per case, in scenario case order.
    pub verdicts: Vec<Verdict>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: u8,
    pub name: String,
    pub case_ids: Vec<String>,
    /// One entry per adapter evaluated.
    pub per_adapter: Vec<AdapterScenarioVerdicts>,
    pub interpretation: String,
}

/// The view of the run a user actually saw: the report re-rendered to text
/// when it is a reference scanner JSON report (so suppressed findings appear
/// only as a count), the raw report text otherwise, plus stderr. Log files
/// are never consulted.
fn active_view(record: &RunRecord) -> String {
    let rendered = serde_json::from_str::<ScanReport>(&record.report_text)
        .map(|report| render_report_text(&report))
        .unwrap_or_else(|_| record.report_text.clone());
    let mut view = rendered;
    if !view.ends_with('\n') && !view.is_empty() {
        view.push('\n');
    }
    view.push_str(&record.stderr_text);
    view
}

fn contains_ci(haystack: &str, needle: &str) -> bool {
    haystack.to_lowercase().contains(&needle.to_lowercase())
}

/// Find a line where `matcher` matches; when the matcher requires a component
/// reference, the whole line must also name one of `hints`.
fn matcher_evidence(matcher: &WarningMatcher, view: &str, hints: &[String]) -> Option<String> {
    // Expectation patterns are validated at build time; a pattern that fails
    // to compile here simply never matches.
    let re = Regex::new(&matcher.pattern).ok()?;
    for found in re.find_iter(view) {
        let line_start = view[..found.start()].rfind('\n').map_or(0, |i| i + 1);
        let line_end = view[found.end()..]
            .find('\n')
            .map_or(view.len(), |i| found.end() + i);
        let line = &view[line_start..line_end];
        if !matcher.must_reference_component || hints.iter().any(|hint| contains_ci(line, hint)) {
            return Some(line.to_string());
        }
    }
    None
}

fn rejection_shown(record: &RunRecord, expectation: &Expectation, view: &str) -> Option<String> {
    match &record.exit_status {
        ExitStatus::Code(code) if *code != 0 => {
            return Some(format!("nonzero exit status {code}"));
        }
        // A crash counts as a (crude) rejection; a hang does not.
        ExitStatus::Marker(marker) if marker == "signal" => {
            return Some("terminated by signal".to_string());
        }
        _ => {}
    }
    expectation
        .accepted_warnings
        .iter()
        .find_map(|matcher| matcher_evidence(matcher, view, &expectation.component_hints))
        .map(|line| format!("rejection notice: {line}"))
}

/// Judge one run record against its case expectation. Pure: the same record
/// and expectation always yield the same result.
pub fn evaluate_case(record: &RunRecord, expectation: &Expectation) -> CaseResult {
    let view = active_view(record);

    let result = |verdict, needs_review, evidence, notes: String| CaseResult {
        case_id: record.case_id.clone(),
        adapter_name: record.adapter_name.clone(),
        outcome: Outcome {
            verdict,
            needs_review,
            evidence,
        },
        notes,
    };

    // 1. All required findings present (any alternative) and none forbidden.
    let mut required_evidence = Vec::new();
    let mut all_required = true;
    for pattern in &expectation.required_findings {
        match pattern
            .alternatives
            .iter()
            .find(|id| contains_ci(&view, id))
        {
            Some(id) => required_evidence.push(format!("required finding present: {id}")),
            None => {
                all_required = false;
                break;
            }
        }
    }
    let forbidden_hit = expectation
        .forbidden_findings
        .iter()
        .flat_map(|pattern| pattern.alternatives.iter())
        .find(|id| contains_ci(&view, id));
    if all_required && forbidden_hit.is_none() {
        if required_evidence.is_empty() {
            required_evidence
                .push("no findings required; no forbidden finding reported".to_string());
        }
        return result(
            Verdict::Pass,
            false,
            required_evidence,
            "expected findings observed".to_string(),
        );
    }

    // 2. The case may accept outright rejection of the BOM.
    if expectation.rejection_accepted {
        if let Some(evidence) = rejection_shown(record, expectation, &view) {
            return result(
                Verdict::Pass,
                false,
                vec![evidence],
                "BOM rejection accepted for this case".to_string(),
            );
        }
    }

    // 3. An accepted warning (component-referencing where demanded).
    if let Some(line) = expectation
        .accepted_warnings
        .iter()
        .find_map(|matcher| matcher_evidence(matcher, &view, &expectation.component_hints))
    {
        return result(
            Verdict::Warning,
            false,
            vec![line],
            "expected findings missing, but the tool warned explicitly".to_string(),
        );
    }

    // 4./5. Silent failure; warning-like noise flags it for review.
    let generic = Regex::new(GENERIC_WARNING_PATTERN).expect("generic pattern compiles");
    if let Some(found) = generic.find(&view) {
        let line_start = view[..found.start()].rfind('\n').map_or(0, |i| i + 1);
        let line_end = view[found.end()..]
            .find('\n')
            .map_or(view.len(), |i| found.end() + i);
        return result(
            Verdict::SilentFail,
            true,
            vec![view[line_start..line_end].to_string()],
            "unclassified warning-like output; review manually".to_string(),
        );
    }
    result(
        Verdict::SilentFail,
        false,
        Vec::new(),
        "expected findings missing and no warning shown".to_string(),
    )
}

/// Evaluate records against a case-id → expectation map.
pub fn evaluate_records(
    records: &[RunRecord],
    expectations: &BTreeMap<String, Expectation>,
) -> Result<Vec<CaseResult>, EvaluatorError> {
    records
        .iter()
        .map(|record| {
            let expectation = expectations
                .get(&record.case_id)
                .ok_or_else(|| EvaluatorError::UnknownCase(record.case_id.clone()))?;
            Ok(evaluate_case(record, expectation))
        })
        .collect()
}

/// Evaluate records against the built-in fixture library.
pub fn evaluate_against_library(records: &[RunRecord]) -> Result<Vec<CaseResult>, EvaluatorError> {
    let expectations = build_library()
        .into_iter()
        .map(|case| (case.id, case.expectation))
        .collect();
    evaluate_records(records, &expectations)
}

fn verdict_index(
    results: &[CaseResult],
) -> Result<BTreeMap<(String, String), &CaseResult>, EvaluatorError> {
    let mut index = BTreeMap::new();
    for result in results {
        let key = (result.adapter_name.clone(), result.case_id.clone());
        if index.insert(key, result).is_some() {
            return Err(EvaluatorError::ConflictingResults(format!(
                "{}/{}",
                result.adapter_name, result.case_id
            )));
        }
    }
    Ok(index)
}

/// The fixed rule table mapping a scenario's verdict pattern to a behavior
/// label. `verdicts` is in scenario case order.
fn pattern_label(scenario: u8, verdicts: &[Verdict]) -> String {
    use Verdict::*;
    let all_pass = verdicts.iter().all(|v| *v == Pass);
    if all_pass {
        return "fully conformant".to_string();
    }
    let any_silent = verdicts.contains(&SilentFail);
    match scenario {
        1 => match (verdicts[0], verdicts[1]) {
            (Warning | SilentFail, Pass) => "CPE unsupported".to_string(),
            (Pass, Warning | SilentFail) => "purl unsupported".to_string(),
            (Warning, Warning) => "version-field dependent".to_string(),
            _ => "no identifier support detected".to_string(),
        },
        2 => {
            if any_silent {
                "silent failure on legal CPE version tokens".to_string()
            } else if verdicts.iter().all(|v| *v == Warning) {
                "CPE identifiers not tested (warned)".to_string()
            } else {
                "inconsistent CPE version-token handling".to_string()
            }
        }
        3 => match verdicts[0] {
            Pass => unreachable!("all-pass handled above"),
            Warning => "versionless purl not tested (warned)".to_string(),
            SilentFail => "versionless purl silently dropped".to_string(),
        },
        4 => {
            let cpe_pair_differs = verdicts[0] != verdicts[1];
            let purl_pair_differs = verdicts[2] != verdicts[3];
            if cpe_pair_differs || purl_pair_differs {
                "identifier key order affects results".to_string()
            } else if verdicts[0] != Pass && verdicts[2] == Pass {
                "purl preferred; vulnerable CPE not consulted".to_string()
            } else if verdicts[0] == Pass && verdicts[2] != Pass {
                "CPE preferred; vulnerable purl not consulted".to_string()
            } else if verdicts.iter().all(|v| *v == Warning) {
                "components not tested (warned)".to_string()
            } else {
                "mixed identifier handling".to_string()
            }
        }
        5 => match verdicts[0] {
            Pass => unreachable!("all-pass handled above"),
            Warning => "identifierless components not tested (warned)".to_string(),
            SilentFail => "identifierless components silently dropped".to_string(),
        },
        6 => match verdicts[0] {
            Pass => unreachable!("all-pass handled above"),
            Warning => "non-canonical purl not tested (warned)".to_string(),
            SilentFail => "non-canonical purl silently dropped".to_string(),
        },
        7 => match (verdicts[0], verdicts[1]) {
            (Pass, Warning) => "VEX data ignored".to_string(),
            (Pass, SilentFail) => "VEX suppression not honored (silent)".to_string(),
            _ => "baseline finding missed; VEX behavior inconclusive".to_string(),
        },
        8 => {
            if any_silent {
                "invalid input mishandled (silent)".to_string()
            } else {
                "structural validation inconsistent".to_string()
            }
        }
        _ => format!(
            "mixed outcomes ({} pass, {} warned, {} silent)",
            verdicts.iter().filter(|v| **v == Pass).count(),
            verdicts.iter().filter(|v| **v == Warning).count(),
            verdicts.iter().filter(|v| **v == SilentFail).count(),
        ),
    }
}

/// Group case results by scenario and attach per-adapter behavior labels.
/// Every adapter must have a result for every library case.
pub fn summarize_scenarios(results: &[CaseResult]) -> Result<Vec<ScenarioSummary>, EvaluatorError> {
    if results.is_empty() {
        return Err(EvaluatorError::IncompleteSuite {
            missing: vec!["(no case results at all)".to_string()],
        });
    }
    let index = verdict_index(results)?;
    let adapters: BTreeSet<&String> = results.iter().map(|r| &r.adapter_name).collect();

    let mut missing = Vec::new();
    for scenario in scenarios() {
        for case_id in &scenario.case_ids {
            for adapter in &adapters {
                if !index.contains_key(&((*adapter).clone(), case_id.clone())) {
                    missing.push(format!("{adapter}/{case_id}"));
                }
            }
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(EvaluatorError::IncompleteSuite { missing });
    }

    let mut summaries = Vec::new();
    for scenario in scenarios() {
        let mut per_adapter = Vec::new();
        for adapter in &adapters {
            let verdicts: Vec<Verdict> = scenario
                .case_ids
                .iter()
                .map(|case_id| {
                    index[&((*adapter).clone(), case_id.clone())]
                        .outcome
                        .verdict
                })
                .collect();
            let label = pattern_label(scenario.number, &verdicts);
            per_adapter.push(AdapterScenarioVerdicts {
                adapter_name: (*adapter).clone(),
                verdicts,
                label,
            });
        }
        let interpretation = format!(
            "{}: {}",
            scenario.name,
            per_adapter
                .iter()
                .map(|a| format!("{} — {}", a.adapter_name, a.label))
                .collect::<Vec<_>>()
                .join("; ")
        );
        summaries.push(ScenarioSummary {
            scenario: scenario.number,
            name: scenario.name.clone(),
            case_ids: scenario.case_ids.clone(),
            per_adapter,
            interpretation,
        });
    }
    Ok(summaries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Markdown,
    Json,
}

fn cell_symbol(outcome: &Outcome) -> &'static str {
    match (outcome.verdict, outcome.needs_review) {
        (Verdict::Pass, _) => "✓",
        (Verdict::Warning, _) => "⚠",
        (Verdict::SilentFail, true) => "(✗)",
        (Verdict::SilentFail, false) => "✗",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub scenario: u8,
    pub case_id: String,
    /// adapter name → cell symbol (✓ pass, ⚠ explicit warning, ✗ silent
    /// failure, (✗) silent failure flagged for review).
    pub cells: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub schema: String,
    pub adapters: Vec<String>,
    pub rows: Vec<MatrixRow>,
}

fn matrix_document(results: &[CaseResult]) -> Result<MatrixDocument, EvaluatorError> {
    let index = verdict_index(results)?;
    let adapters: Vec<String> = results
        .iter()
        .map(|r| r.adapter_name.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let present: BTreeSet<&String> = results.iter().map(|r| &r.case_id).collect();

    let mut rows = Vec::new();
    for scenario in scenarios() {
        for case_id in &scenario.case_ids {
            if !present.contains(case_id) {
                continue;
            }
            let mut cells = BTreeMap::new();
            for adapter in &adapters {
                if let Some(result) = index.get(&(adapter.clone(), case_id.clone())) {
                    cells.insert(adapter.clone(), cell_symbol(&result.outcome).to_string());
                }
            }
            rows.push(MatrixRow {
                scenario: scenario.number,
                case_id: case_id.clone(),
                cells,
            });
        }
    }
    Ok(MatrixDocument {
        schema: MATRIX_SCHEMA.to_string(),
        adapters,
        rows,
    })
}

/// Render the case × adapter verdict matrix. The markdown table and the JSON
/// document carry identical cells; JSON is the machine-readable twin.
pub fn render_matrix(
    results: &[CaseResult],
    format: MatrixFormat,
) -> Result<String, EvaluatorError> {
    let document = matrix_document(results)?;
    match format {
        MatrixFormat::Json => {
            let mut text = serde_json::to_string_pretty(&document).expect("matrix serializes");
            text.push('\n');
            Ok(text)
        }
        MatrixFormat::Markdown => {
            let mut out = String::new();
            out.push_str("| Scenario | Case |");
            for adapter in &document.adapters {
                out.push_str(&format!(" {adapter} |"));
            }
            out.push('\n');
            out.push_str("|---|---|");
            out.push_str(&"---|".repeat(document.adapters.len()));
            out.push('\n');
            let mut last_scenario = 0;
            for row in &document.rows {
                let scenario_cell = if row.scenario != last_scenario {
                    last_scenario = row.scenario;
                    row.scenario.to_string()
                } else {
                    String::new()
                };
                out.push_str(&format!("| {scenario_cell} | {} |", row.case_id));
                for adapter in &document.adapters {
                    let symbol = row.cells.get(adapter).map_or("", |s| s.as_str());
                    out.push_str(&format!(" {symbol} |"));
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}
