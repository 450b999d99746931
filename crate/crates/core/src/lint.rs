//! Corpus linter: scan directories of CycloneDX documents for the conditions
//! the test scenarios probe — identifier gaps, odd CPE version tokens,
//! versionless purls, structural defects, embedded VEX — and report how
//! common each one is.
//!
//! The linter is deliberately more tolerant than [`crate::sbom::parse_bom`]:
//! the point is to measure defects in the wild, so files that the strict
//! parser would reject (out-of-order roots, unknown keys) must still be
//! examined. A file only needs to be valid JSON with `"bomFormat":
//! "CycloneDX"` to be linted; anything else in the directory is tallied and
//! skipped. Only the root `components` array is inspected for per-component
//! conditions — `metadata.component` describes the SBOM's subject, not a
//! dependency, and would otherwise drown the counts.

use crate::identifiers::parse_purl;
use crate::sbom::{raw_layout, ROOT_KEY_ORDER};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

/// Schema tag for the stats JSON document.
pub const LINT_STATS_SCHEMA: &str = "svs-test/lint-stats/1";

/// One condition the linter can detect, linked to the scenario that tests
/// the failure mode the condition triggers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detector {
    pub id: &'static str,
    pub description: &'static str,
    pub scenario_link: u8,
}

/// The fixed detector registry. Stats are zero-filled over exactly this set.
pub const REGISTRY: [Detector; 10] = [
    Detector {
        id: "D_CPE_BLANK",
        description: "CPE 2.3 string whose version attribute is empty",
        scenario_link: 2,
    },
    Detector {
        id: "D_CPE_ASTERISK",
        description: "CPE 2.3 string whose version attribute is `*` (ANY)",
        scenario_link: 2,
    },
    Detector {
        id: "D_CPE_HYPHEN",
        description: "CPE 2.3 string with `-` (NA) in any attribute",
        scenario_link: 2,
    },
    Detector {
        id: "D_PURL_NO_VERSION",
        description: "purl that parses but carries no version",
        scenario_link: 3,
    },
    Detector {
        id: "D_NO_IDENTIFIER",
        description: "component with neither a cpe nor a purl",
        scenario_link: 5,
    },
    Detector {
        id: "D_NO_VERSION_FIELD",
        description: "component whose `version` field is absent or blank",
        scenario_link: 1,
    },
    Detector {
        id: "D_ROOT_ORDER",
        description: "root elements out of the normative CycloneDX order",
        scenario_link: 8,
    },
    Detector {
        id: "D_UNKNOWN_ROOT",
        description: "root element that is not a CycloneDX 1.6 root key",
        scenario_link: 8,
    },
    Detector {
        id: "D_VEX_PRESENT",
        description: "embedded VEX statement in the vulnerabilities section",
        scenario_link: 7,
    },
    Detector {
        id: "D_METADATA_AT_END",
        description: "metadata section placed after the components section",
        scenario_link: 8,
    },
];

#[derive(Debug, thiserror::Error)]
pub enum LintError {
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: not valid JSON: {detail}")]
    InvalidJson { path: PathBuf, detail: String },
    #[error("{path}: not a CycloneDX document (no `bomFormat: CycloneDX`)")]
    NotCycloneDx { path: PathBuf },
}

/// One detected occurrence of a condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintFinding {
    pub file: String,
    pub detector_id: String,
    /// Component bom-ref, JSON path, or root key — never empty.
    pub locator: String,
    pub detail: String,
    /// Only on `D_NO_IDENTIFIER`: whether publisher, name, and version are
    /// all present, i.e. whether an identifier could have been constructed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstructable: Option<bool>,
}

/// Aggregated statistics over a corpus. Occurrences count individual
/// findings (per component, per key, per statement); `files_affected` counts
/// files with at least one finding from the detector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub schema: String,
    /// CycloneDX files actually linted.
    pub files_scanned: u64,
    /// Valid JSON, but not CycloneDX.
    pub files_skipped: u64,
    /// Unreadable or not valid JSON.
    pub files_unparsed: u64,
    pub occurrences: BTreeMap<String, u64>,
    pub files_affected: BTreeMap<String, u64>,
    /// How many `D_NO_IDENTIFIER` occurrences had all the data needed to
    /// construct an identifier anyway.
    pub no_identifier_reconstructable: u64,
}

impl CorpusStats {
    /// All-zero stats with every registry detector present.
    pub fn zeroed() -> CorpusStats {
        let zeros: BTreeMap<String, u64> = REGISTRY.iter().map(|d| (d.id.to_string(), 0)).collect();
        CorpusStats {
            schema: LINT_STATS_SCHEMA.to_string(),
            files_scanned: 0,
            files_skipped: 0,
            files_unparsed: 0,
            occurrences: zeros.clone(),
            files_affected: zeros,
            no_identifier_reconstructable: 0,
        }
    }

    /// Fold one linted file's findings into the stats.
    fn absorb(&mut self, findings: &[LintFinding]) {
        self.files_scanned += 1;
        let mut seen = BTreeSet::new();
        for finding in findings {
            *self
                .occurrences
                .entry(finding.detector_id.clone())
                .or_insert(0) += 1;
            if seen.insert(finding.detector_id.clone()) {
                *self
                    .files_affected
                    .entry(finding.detector_id.clone())
                    .or_insert(0) += 1;
            }
            if finding.reconstructable == Some(true) {
                self.no_identifier_reconstructable += 1;
            }
        }
    }

    /// Combine with stats from another (disjoint) slice of the corpus.
    /// Commutative and associative, so partitions may be linted in parallel.
    pub fn merge(&mut self, other: &CorpusStats) {
        self.files_scanned += other.files_scanned;
        self.files_skipped += other.files_skipped;
        self.files_unparsed += other.files_unparsed;
        for (id, n) in &other.occurrences {
            *self.occurrences.entry(id.clone()).or_insert(0) += n;
        }
        for (id, n) in &other.files_affected {
            *self.files_affected.entry(id.clone()).or_insert(0) += n;
        }
        self.no_identifier_reconstructable += other.no_identifier_reconstructable;
    }
}

/// Split a CPE 2.3 formatted string on unescaped colons, keeping escape
/// sequences intact inside the attribute values.
fn split_cpe(s: &str) -> Vec<String> {
    let mut parts = vec![String::new()];
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                let part = parts.last_mut().expect("never empty");
                part.push('\\');
                if let Some(next) = chars.next() {
                    part.push(next);
                }
            }
            ':' => parts.push(String::new()),
            other => parts.last_mut().expect("never empty").push(other),
        }
    }
    parts
}

fn nonempty_str<'v>(value: &'v Value, key: &str) -> Option<&'v str> {
    value
        .get(key)
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
}

fn component_findings(file: &str, path: &str, component: &Value, out: &mut Vec<LintFinding>) {
    let locator = nonempty_str(component, "bom-ref")
        .map(str::to_string)
        .unwrap_or_else(|| path.to_string());
    let finding = |detector_id: &str, detail: String| LintFinding {
        file: file.to_string(),
        detector_id: detector_id.to_string(),
        locator: locator.clone(),
        detail,
        reconstructable: None,
    };

    let cpe = nonempty_str(component, "cpe");
    if let Some(cpe) = cpe {
        // Inspect the raw attribute tokens rather than parsing: strings that
        // a strict parser rejects are exactly the ones worth counting.
        if let Some(rest) = cpe.strip_prefix("cpe:2.3:") {
            let attrs = split_cpe(rest);
            match attrs.get(3).map(String::as_str) {
                Some("") => out.push(finding(
                    "D_CPE_BLANK",
                    format!("version attribute is empty in `{cpe}`"),
                )),
                Some("*") => out.push(finding(
                    "D_CPE_ASTERISK",
                    format!("version attribute is `*` in `{cpe}`"),
                )),
                _ => {}
            }
            if attrs.iter().any(|a| a == "-") {
                out.push(finding(
                    "D_CPE_HYPHEN",
                    format!("`-` (NA) attribute in `{cpe}`"),
                ));
            }
        }
    }

    let purl = nonempty_str(component, "purl");
    if let Some(purl) = purl {
        if let Ok(parsed) = parse_purl(purl) {
            if parsed.version.is_none() {
                out.push(finding(
                    "D_PURL_NO_VERSION",
                    format!("purl `{purl}` carries no version"),
                ));
            }
        }
    }

    if cpe.is_none() && purl.is_none() {
        let reconstructable = nonempty_str(component, "publisher").is_some()
            && nonempty_str(component, "name").is_some()
            && nonempty_str(component, "version").is_some();
        let mut finding = finding(
            "D_NO_IDENTIFIER",
            if reconstructable {
                "no cpe or purl, but publisher/name/version would allow one".to_string()
            } else {
                "no cpe or purl, and not enough data to construct one".to_string()
            },
        );
        finding.reconstructable = Some(reconstructable);
        out.push(finding);
    }

    if nonempty_str(component, "version").is_none() {
        out.push(finding(
            "D_NO_VERSION_FIELD",
            "component has no usable `version` field".to_string(),
        ));
    }
}

fn walk_components(file: &str, path: &str, array: &Value, out: &mut Vec<LintFinding>) {
    let Some(items) = array.as_array() else {
        return;
    };
    for (index, component) in items.iter().enumerate() {
        let component_path = format!("{path}[{index}]");
        component_findings(file, &component_path, component, out);
        if let Some(nested) = component.get("components") {
            walk_components(file, &format!("{component_path}.components"), nested, out);
        }
    }
}

fn document_findings(file: &str, text: &str, doc: &Value) -> Vec<LintFinding> {
    let mut out = Vec::new();
    let finding = |detector_id: &str, locator: &str, detail: String| LintFinding {
        file: file.to_string(),
        detector_id: detector_id.to_string(),
        locator: locator.to_string(),
        detail,
        reconstructable: None,
    };

    if let Some(components) = doc.get("components") {
        walk_components(file, "components", components, &mut out);
    }

    if let Some(statements) = doc.get("vulnerabilities").and_then(Value::as_array) {
        for (index, statement) in statements.iter().enumerate() {
            let id = nonempty_str(statement, "id").unwrap_or("(no id)");
            out.push(finding(
                "D_VEX_PRESENT",
                &format!("vulnerabilities[{index}]"),
                format!("embedded statement for {id}"),
            ));
        }
    }

    // Order-related conditions come from the raw byte layout; the parsed
    // Value has already forgotten key order.
    let root_keys: Vec<String> = match raw_layout(text) {
        Some(layout) => layout.root.into_iter().map(|e| e.key).collect(),
        None => doc
            .as_object()
            .map(|o| o.keys().cloned().collect())
            .unwrap_or_default(),
    };

    let mut max_seen: Option<usize> = None;
    for key in &root_keys {
        if let Some(index) = ROOT_KEY_ORDER.iter().position(|k| k == key) {
            if max_seen.is_some_and(|m| index < m) {
                out.push(finding(
                    "D_ROOT_ORDER",
                    key,
                    format!("root key `{key}` appears after keys that must follow it"),
                ));
                break;
            }
            max_seen = Some(max_seen.map_or(index, |m| m.max(index)));
        }
    }

    let unknown: BTreeSet<&String> = root_keys
        .iter()
        .filter(|k| !ROOT_KEY_ORDER.contains(&k.as_str()))
        .collect();
    for key in unknown {
        out.push(finding(
            "D_UNKNOWN_ROOT",
            key,
            format!("`{key}` is not a CycloneDX 1.6 root element"),
        ));
    }

    let position = |wanted: &str| root_keys.iter().position(|k| k == wanted);
    if let (Some(metadata), Some(components)) = (position("metadata"), position("components")) {
        if metadata > components {
            out.push(finding(
                "D_METADATA_AT_END",
                "metadata",
                "metadata section appears after the components section".to_string(),
            ));
        }
    }

    out
}

/// Lint one file. The file must be valid JSON declaring
/// `"bomFormat": "CycloneDX"`; it need not pass strict SBOM parsing.
pub fn lint_file(path: &Path) -> Result<Vec<LintFinding>, LintError> {
    let text = std::fs::read_to_string(path).map_err(|source| LintError::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| LintError::InvalidJson {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    if doc.get("bomFormat").and_then(Value::as_str) != Some("CycloneDX") {
        return Err(LintError::NotCycloneDx {
            path: path.to_path_buf(),
        });
    }
    let file = path.display().to_string();
    Ok(document_findings(&file, &text, &doc))
}

/// Lint every `*.json` file under `dir` (recursively) and aggregate. Never
/// fails: unreadable or non-JSON files count as `files_unparsed`, JSON files
/// that are not CycloneDX as `files_skipped`. The result is independent of
/// traversal order.
pub fn lint_corpus(dir: &Path) -> CorpusStats {
    let mut paths: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();

    let mut stats = CorpusStats::zeroed();
    for path in &paths {
        match lint_file(path) {
            Ok(findings) => stats.absorb(&findings),
            Err(LintError::NotCycloneDx { .. }) => stats.files_skipped += 1,
            Err(_) => stats.files_unparsed += 1,
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn lint_text(text: &str) -> Vec<LintFinding> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("doc.json");
        fs::write(&path, text).unwrap();
        lint_file(&path).unwrap()
    }

    fn ids(findings: &[LintFinding]) -> Vec<&str> {
        findings.iter().map(|f| f.detector_id.as_str()).collect()
    }

    #[test]
    fn split_cpe_respects_escaped_colons() {
        assert_eq!(split_cpe("a:b"), vec!["a", "b"]);
        assert_eq!(split_cpe(r"a\:b:c"), vec![r"a\:b", "c"]);
        assert_eq!(split_cpe("a::b"), vec!["a", "", "b"]);
    }

    #[test]
    fn cpe_version_token_detectors() {
        let bom = |cpe: &str| {
            format!(
                r#"{{"bomFormat":"CycloneDX","specVersion":"1.6","version":1,
                     "components":[{{"bom-ref":"c1","name":"x","version":"1",
                                     "cpe":"{cpe}"}}]}}"#
            )
        };
        let blank = lint_text(&bom("cpe:2.3:a:v:p::*:*:*:*:*:*:*"));
        assert_eq!(ids(&blank), vec!["D_CPE_BLANK"]);
        assert_eq!(blank[0].locator, "c1");

        let star = lint_text(&bom("cpe:2.3:a:v:p:*:*:*:*:*:*:*:*"));
        assert_eq!(ids(&star), vec!["D_CPE_ASTERISK"]);

        let hyphen = lint_text(&bom("cpe:2.3:a:v:p:-:*:*:*:*:*:*:*"));
        assert_eq!(ids(&hyphen), vec!["D_CPE_HYPHEN"]);

        // Hyphen in a non-version attribute still counts; a hyphen inside a
        // value (not a lone token) does not.
        let update = lint_text(&bom("cpe:2.3:a:v:p:1.0:-:*:*:*:*:*:*"));
        assert_eq!(ids(&update), vec!["D_CPE_HYPHEN"]);
        let inside = lint_text(&bom("cpe:2.3:a:v:my-lib:1.0:*:*:*:*:*:*:*"));
        assert!(ids(&inside).is_empty());

        // CPE 2.2 URIs are not inspected.
        let uri = lint_text(&bom("cpe:/a:v:p"));
        assert!(ids(&uri).is_empty());
    }

    #[test]
    fn purl_and_identifier_detectors() {
        let versionless = lint_text(
            r#"{"bomFormat":"CycloneDX",
                "components":[{"name":"d","version":"1","purl":"pkg:npm/dicer"}]}"#,
        );
        assert_eq!(ids(&versionless), vec!["D_PURL_NO_VERSION"]);

        let none = lint_text(
            r#"{"bomFormat":"CycloneDX",
                "components":[{"bom-ref":"c","publisher":"p","name":"d","version":"1"},
                              {"name":"bare"}]}"#,
        );
        let no_id: Vec<&LintFinding> = none
            .iter()
            .filter(|f| f.detector_id == "D_NO_IDENTIFIER")
            .collect();
        assert_eq!(no_id.len(), 2);
        assert_eq!(no_id[0].reconstructable, Some(true));
        assert_eq!(no_id[1].reconstructable, Some(false));
        // The bare component also lacks a version field.
        assert_eq!(
            none.iter()
                .filter(|f| f.detector_id == "D_NO_VERSION_FIELD")
                .count(),
            1
        );
        // The sub-flag never appears outside D_NO_IDENTIFIER.
        assert!(none
            .iter()
            .all(|f| f.reconstructable.is_none() || f.detector_id == "D_NO_IDENTIFIER"));
    }

    #[test]
    fn nested_components_are_walked() {
        let findings = lint_text(
            r#"{"bomFormat":"CycloneDX",
                "components":[{"name":"outer","version":"1","purl":"pkg:npm/a@1",
                               "components":[{"name":"inner"}]}]}"#,
        );
        let inner: Vec<&LintFinding> = findings
            .iter()
            .filter(|f| f.locator == "components[0].components[0]")
            .collect();
        assert!(inner.iter().any(|f| f.detector_id == "D_NO_IDENTIFIER"));
    }

    #[test]
    fn structural_detectors() {
        // vulnerabilities before components: out of order, metadata fine.
        let reordered = lint_text(
            r#"{"bomFormat":"CycloneDX","metadata":{},
                "vulnerabilities":[{"id":"CVE-1"},{"id":"CVE-2"}],
                "components":[]}"#,
        );
        assert_eq!(
            ids(&reordered),
            vec!["D_VEX_PRESENT", "D_VEX_PRESENT", "D_ROOT_ORDER"]
        );
        assert_eq!(reordered[2].locator, "components");

        let trailing_metadata =
            lint_text(r#"{"bomFormat":"CycloneDX","components":[],"metadata":{}}"#);
        assert_eq!(
            ids(&trailing_metadata),
            vec!["D_ROOT_ORDER", "D_METADATA_AT_END"]
        );

        let unknown =
            lint_text(r#"{"bomFormat":"CycloneDX","components":[],"licenses":[],"junk":1}"#);
        let mut unknown_keys: Vec<&str> = unknown
            .iter()
            .filter(|f| f.detector_id == "D_UNKNOWN_ROOT")
            .map(|f| f.locator.as_str())
            .collect();
        unknown_keys.sort();
        assert_eq!(unknown_keys, vec!["junk", "licenses"]);
        assert!(!unknown.iter().any(|f| f.detector_id == "D_ROOT_ORDER"));
    }

    #[test]
    fn clean_bom_yields_no_findings() {
        let findings = lint_text(
            r#"{"bomFormat":"CycloneDX","specVersion":"1.6","version":1,
                "metadata":{},
                "components":[
                  {"bom-ref":"a","name":"a","version":"1.0","purl":"pkg:npm/a@1.0"},
                  {"bom-ref":"b","name":"b","version":"2.0",
                   "cpe":"cpe:2.3:a:v:b:2.0:*:*:*:*:*:*:*",
                   "purl":"pkg:npm/b@2.0"}],
                "dependencies":[]}"#,
        );
        assert!(findings.is_empty(), "{findings:?}");
    }

    #[test]
    fn non_cyclonedx_and_invalid_files_are_classified() {
        let dir = tempfile::tempdir().unwrap();
        let not_sbom = dir.path().join("manifest.json");
        fs::write(&not_sbom, r#"{"schema":"other","entries":[]}"#).unwrap();
        assert!(matches!(
            lint_file(&not_sbom),
            Err(LintError::NotCycloneDx { .. })
        ));

        let broken = dir.path().join("broken.json");
        fs::write(&broken, "{ nope").unwrap();
        assert!(matches!(
            lint_file(&broken),
            Err(LintError::InvalidJson { .. })
        ));

        assert!(matches!(
            lint_file(&dir.path().join("missing.json")),
            Err(LintError::UnreadableFile { .. })
        ));

        let stats = lint_corpus(dir.path());
        assert_eq!(stats.files_scanned, 0);
        assert_eq!(stats.files_skipped, 1);
        assert_eq!(stats.files_unparsed, 1);
        assert!(stats.occurrences.values().all(|n| *n == 0));
    }

    #[test]
    fn empty_directory_yields_zeroed_stats() {
        let dir = tempfile::tempdir().unwrap();
        let stats = lint_corpus(dir.path());
        assert_eq!(stats, CorpusStats::zeroed());
        assert_eq!(stats.occurrences.len(), REGISTRY.len());
        assert_eq!(stats.schema, LINT_STATS_SCHEMA);
    }

    #[test]
    fn merge_is_commutative() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("a.json"),
            r#"{"bomFormat":"CycloneDX","components":[{"name":"x"}]}"#,
        )
        .unwrap();
        let other = tempfile::tempdir().unwrap();
        fs::write(
            other.path().join("b.json"),
            r#"{"bomFormat":"CycloneDX","components":[],"junk":1}"#,
        )
        .unwrap();

        let a = lint_corpus(dir.path());
        let b = lint_corpus(other.path());
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.files_scanned, 2);
        assert_eq!(ab.occurrences["D_NO_IDENTIFIER"], 1);
        assert_eq!(ab.occurrences["D_UNKNOWN_ROOT"], 1);
    }
}
