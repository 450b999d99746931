//! Suite execution: run every test case against a scanner and record output.
//!
//! A scanner is described by an [`AdapterConfig`] — either one of the
//! built-in reference profiles (run in-process) or an external command line
//! with a `{sbom}` placeholder (run through `sh -c` with captured output and
//! a timeout). Cases run strictly sequentially per adapter, with an optional
//! reset command between cases, and every case yields exactly one
//! [`RunRecord`] capturing raw report text, stderr, exit status, timestamps,
//! and configuration provenance. Records persist to `runs/<run_id>/` and can
//! be reloaded for evaluation later.

use crate::refscanner::{render_report_text, scan, serialize_report, Profile};
use crate::sbom::parse_bom;
use crate::vulndb::Snapshot;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

/// Schema tag for `run.json` inside a persisted run directory.
pub const RUN_SCHEMA: &str = "svs-test/run/1";
/// Fallback timeout (seconds) when neither the adapter nor the environment
/// variable `SVS_TEST_TIMEOUT_DEFAULT` specifies one.
pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("adapter `{adapter}` is invalid: {detail}")]
    InvalidAdapter { adapter: String, detail: String },
    #[error("adapter `{adapter}` is unavailable: {detail}")]
    AdapterUnavailable { adapter: String, detail: String },
    #[error("i/o failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed data at {path}: {detail}")]
    Malformed { path: PathBuf, detail: String },
    #[error("records span multiple run ids: {0} and {1}")]
    MixedRunIds(String, String),
    #[error("no records to persist")]
    NoRecords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AdapterKind {
    /// One of the reference scanner profiles, run in-process.
    Builtin,
    /// An external command line run through the shell.
    External,
}

/// Where an external tool's report comes from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReportSource {
    /// Captured standard output (the default).
    #[default]
    Stdout,
    /// A file written by the tool; `{sbom}` in the template expands to the
    /// case's SBOM path.
    File(String),
}

/// Everything needed to invoke one scanner, and the provenance that gets
/// hashed into each run record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterConfig {
    pub name: String,
    pub kind: AdapterKind,
    /// Profile name for builtin adapters (e.g. `IDEAL`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Command line for external adapters; must contain `{sbom}` exactly once.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invoke_template: Option<String>,
    #[serde(default)]
    pub report_source: ReportSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset_command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_secs: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub env: BTreeMap<String, String>,
}

impl AdapterConfig {
    /// A builtin adapter for a reference profile, named after it.
    pub fn builtin(profile: Profile) -> AdapterConfig {
        AdapterConfig {
            name: format!("builtin-{}", profile.name().to_lowercase()),
            kind: AdapterKind::Builtin,
            profile: Some(profile.name().to_string()),
            invoke_template: None,
            report_source: ReportSource::Stdout,
            version_command: None,
            reset_command: None,
            timeout_secs: None,
            env: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |detail: &str| {
            Err(HarnessError::InvalidAdapter {
                adapter: self.name.clone(),
                detail: detail.to_string(),
            })
        };
        if self.name.is_empty() {
            return fail("name must not be empty");
        }
        if !self
            .name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return fail("name may only contain ASCII letters, digits, `-`, `_`, `.`");
        }
        match self.kind {
            AdapterKind::Builtin => {
                let Some(profile) = &self.profile else {
                    return fail("builtin adapters need a profile");
                };
                if Profile::parse(profile).is_none() {
                    return fail("unknown profile");
                }
            }
            AdapterKind::External => {
                let Some(template) = &self.invoke_template else {
                    return fail("external adapters need an invoke_template");
                };
                if template.matches("{sbom}").count() != 1 {
                    return fail("invoke_template must contain `{sbom}` exactly once");
                }
            }
        }
        Ok(())
    }

    /// Stable digest of the full adapter configuration, recorded with every
    /// run so results can be traced back to the exact parametrization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("adapter config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    fn timeout(&self) -> Duration {
        let secs = self
            .timeout_secs
            .or_else(|| {
                std::env::var("SVS_TEST_TIMEOUT_DEFAULT")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(DEFAULT_TIMEOUT_SECS);
        Duration::from_secs(secs)
    }
}

/// Exit status of one case execution: a numeric code, or a marker like
/// `"timeout"` / `"signal"` when no code exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExitStatus {
    Code(i32),
    Marker(String),
}

impl ExitStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, ExitStatus::Code(0))
    }
}

/// Everything observed while running one case against one adapter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub adapter_name: String,
    pub tool_version: String,
    pub case_id: String,
    pub started_at: String,
    pub finished_at: String,
    pub exit_status: ExitStatus,
    /// Raw report text; present (possibly empty) even on failure.
    pub report_text: String,
    pub stderr_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db_snapshot_id: Option<String>,
    pub config_digest: String,
}

/// One emitted test case on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseInput {
    pub case_id: String,
    pub sbom_path: PathBuf,
}

/// Suite-level metadata persisted as `run.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub run_id: String,
    pub adapter: AdapterConfig,
    pub tool_version: String,
    pub config_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db_snapshot_id: Option<String>,
    pub started_at: String,
    pub finished_at: String,
    pub case_ids: Vec<String>,
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339()
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Read the emitted case manifest and return the suite inputs in manifest
/// order.
pub fn case_inputs_from_dir(cases_dir: &Path) -> Result<Vec<CaseInput>, HarnessError> {
    let manifest_path = cases_dir.join("manifest.json");
    let bytes = std::fs::read(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
    let manifest: crate::testlib::CaseManifest =
        serde_json::from_slice(&bytes).map_err(|e| HarnessError::Malformed {
            path: manifest_path.clone(),
            detail: e.to_string(),
        })?;
    Ok(manifest
        .entries
        .into_iter()
        .map(|entry| CaseInput {
            case_id: entry.id,
            sbom_path: cases_dir.join(entry.file),
        })
        .collect())
}

fn shell_quote(path: &Path) -> String {
    format!("'{}'", path.to_string_lossy().replace('\'', r"'\''"))
}

/// Run a shell command to completion with captured output and a deadline.
/// Returns (exit, stdout, stderr); `None` exit means the spawn itself failed.
fn run_shell(
    command: &str,
    env: &BTreeMap<String, String>,
    timeout: Duration,
) -> std::io::Result<(ExitStatus, String, String)> {
    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(command)
        .envs(env)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    // Give the command its own process group so a timeout can reap the whole
    // tree; otherwise grandchildren keep the output pipes open after a kill.
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    let mut child = cmd.spawn()?;

    fn drain(stream: Option<impl Read + Send + 'static>) -> std::thread::JoinHandle<String> {
        std::thread::spawn(move || {
            let mut buf = Vec::new();
            if let Some(mut stream) = stream {
                let _ = stream.read_to_end(&mut buf);
            }
            String::from_utf8_lossy(&buf).into_owned()
        })
    }
    let stdout_reader = drain(child.stdout.take());
    let stderr_reader = drain(child.stderr.take());

    let exit = wait_with_deadline(&mut child, timeout)?;
    let stdout = stdout_reader.join().unwrap_or_default();
    let stderr = stderr_reader.join().unwrap_or_default();
    Ok((exit, stdout, stderr))
}

fn wait_with_deadline(child: &mut Child, timeout: Duration) -> std::io::Result<ExitStatus> {
    let deadline = Instant::now() + timeout;
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(match status.code() {
                Some(code) => ExitStatus::Code(code),
                None => ExitStatus::Marker("signal".to_string()),
            });
        }
        if Instant::now() >= deadline {
            #[cfg(unix)]
            unsafe {
                libc::killpg(child.id() as i32, libc::SIGKILL);
            }
            let _ = child.kill();
            let _ = child.wait();
            return Ok(ExitStatus::Marker("timeout".to_string()));
        }
        std::thread::sleep(Duration::from_millis(25));
    }
}

fn capture_tool_version(adapter: &AdapterConfig) -> Result<String, HarnessError> {
    match (&adapter.kind, &adapter.version_command) {
        (AdapterKind::Builtin, _) => Ok(format!(
            "svs-core/{} profile {}",
            env!("CARGO_PKG_VERSION"),
            adapter.profile.as_deref().unwrap_or("?")
        )),
        (AdapterKind::External, None) => Ok("unknown".to_string()),
        (AdapterKind::External, Some(command)) => {
            let (exit, stdout, stderr) = run_shell(command, &adapter.env, adapter.timeout())
                .map_err(|e| HarnessError::AdapterUnavailable {
                    adapter: adapter.name.clone(),
                    detail: format!("version command failed to spawn: {e}"),
                })?;
            // `sh` reports a missing command as exit 127 — the tool is absent.
            if exit == ExitStatus::Code(127) {
                return Err(HarnessError::AdapterUnavailable {
                    adapter: adapter.name.clone(),
                    detail: format!("version command not found: {}", stderr.trim()),
                });
            }
            let version = stdout.lines().next().unwrap_or("").trim();
            Ok(if version.is_empty() {
                "unknown".to_string()
            } else {
                version.to_string()
            })
        }
    }
}

fn fresh_run_id(adapter_name: &str) -> String {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or_default();
    format!("{adapter_name}-{nanos}")
}

/// Execute every case against one adapter, strictly in order, resetting
/// between cases when configured. Per-case failures (nonzero exits, timeouts,
/// unreadable output) are recorded, never fatal; only an unusable adapter
/// aborts the suite.
pub fn execute_suite(
    cases: &[CaseInput],
    adapter: &AdapterConfig,
    snapshot: &Snapshot,
) -> Result<Vec<RunRecord>, HarnessError> {
    adapter.validate()?;
    let tool_version = capture_tool_version(adapter)?;
    let run_id = fresh_run_id(&adapter.name);
    let config_digest = adapter.digest();
    let db_snapshot_id = match adapter.kind {
        AdapterKind::Builtin => Some(snapshot.snapshot_id.clone()),
        AdapterKind::External => None,
    };

    let mut records = Vec::with_capacity(cases.len());
    for (index, case) in cases.iter().enumerate() {
        let started_at = now_rfc3339();
        let (exit_status, report_text, stderr_text) = match adapter.kind {
            AdapterKind::Builtin => run_builtin_case(adapter, case, snapshot),
            AdapterKind::External => run_external_case(adapter, case)?,
        };
        let finished_at = now_rfc3339();
        records.push(RunRecord {
            run_id: run_id.clone(),
            adapter_name: adapter.name.clone(),
            tool_version: tool_version.clone(),
            case_id: case.case_id.clone(),
            started_at,
            finished_at,
            exit_status,
            report_text,
            stderr_text,
            db_snapshot_id: db_snapshot_id.clone(),
            config_digest: config_digest.clone(),
        });

        if index + 1 < cases.len() {
            if let Some(reset) = &adapter.reset_command {
                // Best effort: a failing reset must not kill the suite.
                let _ = run_shell(reset, &adapter.env, adapter.timeout());
            }
        }
    }
    Ok(records)
}

fn run_builtin_case(
    adapter: &AdapterConfig,
    case: &CaseInput,
    snapshot: &Snapshot,
) -> (ExitStatus, String, String) {
    let profile = adapter
        .profile
        .as_deref()
        .and_then(Profile::parse)
        .expect("validated adapter has a known profile");
    let bytes = match std::fs::read(&case.sbom_path) {
        Ok(bytes) => bytes,
        Err(e) => {
            return (
                ExitStatus::Code(1),
                String::new(),
                format!("cannot read {}: {e}\n", case.sbom_path.display()),
            )
        }
    };
    match parse_bom(&bytes) {
        Ok(bom) => {
            let report = scan(&bom, snapshot, &profile.config());
            let warn_lines: String = render_report_text(&report)
                .lines()
                .filter(|line| line.starts_with("WARN:"))
                .map(|line| format!("{line}\n"))
                .collect();
            (ExitStatus::Code(0), serialize_report(&report), warn_lines)
        }
        Err(e) => (
            ExitStatus::Code(1),
            String::new(),
            format!("input is not a scannable BOM: {e}\n"),
        ),
    }
}

fn run_external_case(
    adapter: &AdapterConfig,
    case: &CaseInput,
) -> Result<(ExitStatus, String, String), HarnessError> {
    let template = adapter
        .invoke_template
        .as_deref()
        .expect("validated adapter has a template");
    let command = template.replace("{sbom}", &shell_quote(&case.sbom_path));
    let (exit, stdout, stderr) =
        run_shell(&command, &adapter.env, adapter.timeout()).map_err(|e| {
            HarnessError::AdapterUnavailable {
                adapter: adapter.name.clone(),
                detail: format!("invoke command failed to spawn: {e}"),
            }
        })?;
    let report_text = match &adapter.report_source {
        ReportSource::Stdout => stdout,
        ReportSource::File(template) => {
            let path = template.replace("{sbom}", &case.sbom_path.to_string_lossy());
            std::fs::read_to_string(&path).unwrap_or_default()
        }
    };
    Ok((exit, report_text, stderr))
}

/// Load adapter configurations from a JSON array file (`adapters.json`).
pub fn load_adapters(path: &Path) -> Result<Vec<AdapterConfig>, HarnessError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let adapters: Vec<AdapterConfig> =
        serde_json::from_slice(&bytes).map_err(|e| HarnessError::Malformed {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
    for adapter in &adapters {
        adapter.validate()?;
    }
    Ok(adapters)
}

/// Persist one suite's records under `dir/<run_id>/`: a `case-<id>.json` per
/// record plus `run.json` with suite metadata.
pub fn persist_run(
    records: &[RunRecord],
    adapter: &AdapterConfig,
    dir: &Path,
) -> Result<RunManifest, HarnessError> {
    let Some(first) = records.first() else {
        return Err(HarnessError::NoRecords);
    };
    for record in records {
        if record.run_id != first.run_id {
            return Err(HarnessError::MixedRunIds(
                first.run_id.clone(),
                record.run_id.clone(),
            ));
        }
    }

    let run_dir = dir.join(&first.run_id);
    std::fs::create_dir_all(&run_dir).map_err(|e| io_err(&run_dir, e))?;

    for record in records {
        let path = run_dir.join(format!("case-{}.json", record.case_id));
        write_json(&path, record)?;
    }

    let manifest = RunManifest {
        schema: RUN_SCHEMA.to_string(),
        run_id: first.run_id.clone(),
        adapter: adapter.clone(),
        tool_version: first.tool_version.clone(),
        config_digest: first.config_digest.clone(),
        db_snapshot_id: first.db_snapshot_id.clone(),
        started_at: first.started_at.clone(),
        finished_at: records
            .last()
            .map(|r| r.finished_at.clone())
            .unwrap_or_default(),
        case_ids: records.iter().map(|r| r.case_id.clone()).collect(),
    };
    write_json(&run_dir.join("run.json"), &manifest)?;
    Ok(manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Load every persisted run under `dir`, sorted by run id for determinism.
pub fn load_runs(dir: &Path) -> Result<Vec<(RunManifest, Vec<RunRecord>)>, HarnessError> {
    let mut runs = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut run_dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("run.json").is_file())
        .collect();
    run_dirs.sort();

    for run_dir in run_dirs {
        let manifest_path = run_dir.join("run.json");
        let bytes = std::fs::read(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
        let manifest: RunManifest =
            serde_json::from_slice(&bytes).map_err(|e| HarnessError::Malformed {
                path: manifest_path.clone(),
                detail: e.to_string(),
            })?;
        let mut records = Vec::with_capacity(manifest.case_ids.len());
        for case_id in &manifest.case_ids {
            let record_path = run_dir.join(format!("case-{case_id}.json"));
            let bytes = std::fs::read(&record_path).map_err(|e| io_err(&record_path, e))?;
            let record: RunRecord =
                serde_json::from_slice(&bytes).map_err(|e| HarnessError::Malformed {
                    path: record_path.clone(),
                    detail: e.to_string(),
                })?;
            records.push(record);
        }
        runs.push((manifest, records));
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn external(name: &str, template: &str) -> AdapterConfig {
        AdapterConfig {
            name: name.to_string(),
            kind: AdapterKind::External,
            profile: None,
            invoke_template: Some(template.to_string()),
            report_source: ReportSource::Stdout,
            version_command: None,
            reset_command: None,
            timeout_secs: Some(5),
            env: BTreeMap::new(),
        }
    }

    #[test]
    fn validation_rules() {
        assert!(AdapterConfig::builtin(Profile::Ideal).validate().is_ok());

        let mut no_profile = AdapterConfig::builtin(Profile::Ideal);
        no_profile.profile = None;
        assert!(no_profile.validate().is_err());

        let mut bad_profile = AdapterConfig::builtin(Profile::Ideal);
        bad_profile.profile = Some("SOMETHING".to_string());
        assert!(bad_profile.validate().is_err());

        assert!(external("ok", "scanner --sbom {sbom}").validate().is_ok());
        assert!(external("none", "scanner --all").validate().is_err());
        assert!(external("twice", "scanner {sbom} {sbom}")
            .validate()
            .is_err());
        assert!(external("bad name!", "scanner {sbom}").validate().is_err());

        let mut no_template = external("x", "scanner {sbom}");
        no_template.invoke_template = None;
        assert!(no_template.validate().is_err());
    }

    #[test]
    fn config_digest_is_stable_and_sensitive() {
        let a = AdapterConfig::builtin(Profile::Ideal);
        let b = AdapterConfig::builtin(Profile::Ideal);
        assert_eq!(a.digest(), b.digest());
        let c = AdapterConfig::builtin(Profile::PurlOnly);
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn exit_status_serializes_untagged() {
        assert_eq!(serde_json::to_string(&ExitStatus::Code(3)).unwrap(), "3");
        assert_eq!(
            serde_json::to_string(&ExitStatus::Marker("timeout".to_string())).unwrap(),
            "\"timeout\""
        );
        let code: ExitStatus = serde_json::from_str("0").unwrap();
        assert!(code.is_success());
        let marker: ExitStatus = serde_json::from_str("\"timeout\"").unwrap();
        assert_eq!(marker, ExitStatus::Marker("timeout".to_string()));
    }

    #[test]
    fn adapter_config_json_round_trip() {
        let mut adapter = external("wrapped", "tool scan {sbom} --json");
        adapter.report_source = ReportSource::File("{sbom}.report".to_string());
        adapter
            .env
            .insert("TOOL_MODE".to_string(), "strict".to_string());
        let json = serde_json::to_string(&adapter).unwrap();
        let back: AdapterConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, adapter);

        // Defaults: report_source falls back to STDOUT when omitted.
        let minimal: AdapterConfig = serde_json::from_str(
            r#"{"name": "t", "kind": "EXTERNAL", "invoke_template": "run {sbom}"}"#,
        )
        .unwrap();
        assert_eq!(minimal.report_source, ReportSource::Stdout);
        assert!(minimal.validate().is_ok());
    }

    #[test]
    fn shell_quoting_handles_spaces_and_quotes() {
        let quoted = shell_quote(Path::new("/tmp/has space/it's.json"));
        let (exit, stdout, _) = run_shell(
            &format!("printf %s {quoted}"),
            &BTreeMap::new(),
            Duration::from_secs(5),
        )
        .unwrap();
        assert!(exit.is_success());
        assert_eq!(stdout, "/tmp/has space/it's.json");
    }
}
