//! CycloneDX 1.6 JSON parsing with structure validation.
//!
//! Parsing is deliberately lenient: structural problems (root keys out of the
//! normative order, unknown root keys, duplicate keys, missing mandatory
//! fields) are recorded as [`ValidationIssue`]s on the returned [`Bom`] while
//! components, dependencies and embedded VEX statements are still extracted
//! whenever structurally possible. Whether issues lead to rejection is the
//! consumer's policy, not the parser's.
//!
//! Root-level key order is recovered from the raw bytes via [`raw_layout`],
//! because order is invisible to map-based object models.

mod raw;

pub use raw::{raw_layout, RawEntry, RawLayout};

use crate::identifiers::{parse_cpe, parse_purl};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use thiserror::Error;

/// The normative order of CycloneDX 1.6 root-level keys. Every key is
/// optional except `bomFormat`, `specVersion` and `version`; order violations
/// and keys outside this list are reported as validation issues.
pub const ROOT_KEY_ORDER: [&str; 18] = [
    "$schema",
    "bomFormat",
    "specVersion",
    "serialNumber",
    "version",
    "metadata",
    "components",
    "services",
    "externalReferences",
    "dependencies",
    "compositions",
    "vulnerabilities",
    "annotations",
    "formulation",
    "declarations",
    "definitions",
    "properties",
    "signature",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    /// A known root key appeared after a key that must follow it.
    RootOrder,
    /// A root key that is not part of CycloneDX 1.6.
    UnknownRootKey,
    /// Any other structural defect (duplicate keys, missing mandatory fields).
    Schema,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub code: IssueCode,
    pub detail: String,
    /// Root-key name or JSON-pointer-style path of the offending element.
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SbomError {
    #[error("input is not JSON: {0}")]
    NotJson(String),
    #[error("input is not a CycloneDX BOM (missing `bomFormat: \"CycloneDX\"`)")]
    NotCycloneDx,
}

/// Document-order positions of the identifier keys inside a component object.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IdOrder {
    pub cpe: Option<usize>,
    pub purl: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub bom_ref: Option<String>,
    pub ctype: String,
    pub publisher: Option<String>,
    pub name: String,
    pub version_field: Option<String>,
    pub cpe: Option<String>,
    pub purl: Option<String>,
    /// Byte order of the `cpe` and `purl` keys in the source document.
    pub raw_order: IdOrder,
}

impl Component {
    /// The version the component effectively declares: the `version` field if
    /// present, else the version embedded in the purl, else the CPE version
    /// attribute when it is a concrete literal.
    pub fn effective_version(&self) -> Option<String> {
        if let Some(v) = &self.version_field {
            return Some(v.clone());
        }
        if let Some(p) = self.purl.as_deref().and_then(|p| parse_purl(p).ok()) {
            if let Some(v) = p.version {
                return Some(v);
            }
        }
        self.cpe
            .as_deref()
            .and_then(|c| parse_cpe(c).ok())
            .and_then(|wfn| wfn.version.plain_literal())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metadata {
    pub timestamp: Option<String>,
    pub component: Option<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyEdge {
    pub dependency_ref: String,
    pub depends_on: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VersionStatus {
    Affected,
    Unaffected,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VexAffects {
    pub component_ref: String,
    pub version_status: Vec<(String, VersionStatus)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VexStatement {
    pub vuln_id: String,
    pub source_name: Option<String>,
    pub analysis_state: Option<String>,
    pub affects: Vec<VexAffects>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bom {
    pub spec_version: String,
    pub serial_number: Option<String>,
    pub metadata: Option<Metadata>,
    pub components: Vec<Component>,
    pub dependencies: Vec<DependencyEdge>,
    pub vulnerabilities: Vec<VexStatement>,
    pub validation_issues: Vec<ValidationIssue>,
}

fn get_str(obj: &Value, key: &str) -> Option<String> {
    obj.get(key).and_then(Value::as_str).map(str::to_string)
}

fn extract_component(
    el: &Value,
    location: &str,
    keys: Option<&[String]>,
    issues: &mut Vec<ValidationIssue>,
) -> Option<Component> {
    let name = match get_str(el, "name").filter(|n| !n.is_empty()) {
        Some(n) => n,
        None => {
            issues.push(ValidationIssue {
                code: IssueCode::Schema,
                detail: "component has no name".into(),
                location: location.to_string(),
            });
            return None;
        }
    };
    let raw_order = keys
        .map(|keys| IdOrder {
            cpe: keys.iter().position(|k| k == "cpe"),
            purl: keys.iter().position(|k| k == "purl"),
        })
        .unwrap_or_default();
    Some(Component {
        bom_ref: get_str(el, "bom-ref"),
        ctype: get_str(el, "type").unwrap_or_default(),
        publisher: get_str(el, "publisher"),
        name,
        version_field: get_str(el, "version"),
        cpe: get_str(el, "cpe"),
        purl: get_str(el, "purl"),
        raw_order,
    })
}

fn extract_vex(
    el: &Value,
    location: &str,
    issues: &mut Vec<ValidationIssue>,
) -> Option<VexStatement> {
    let vuln_id = match get_str(el, "id").filter(|v| !v.is_empty()) {
        Some(id) => id,
        None => {
            issues.push(ValidationIssue {
                code: IssueCode::Schema,
                detail: "vulnerability entry has no id".into(),
                location: location.to_string(),
            });
            return None;
        }
    };
    let affects = el
        .get("affects")
        .and_then(Value::as_array)
        .map(|entries| {
            entries
                .iter()
                .filter_map(|a| {
                    let component_ref = get_str(a, "ref")?;
                    let version_status = a
                        .get("versions")
                        .and_then(Value::as_array)
                        .map(|versions| {
                            versions
                                .iter()
                                .filter_map(|v| {
                                    let version = get_str(v, "version")?;
                                    let status = match v.get("status").and_then(Value::as_str) {
                                        Some("affected") => VersionStatus::Affected,
                                        Some("unaffected") => VersionStatus::Unaffected,
                                        _ => VersionStatus::Unknown,
                                    };
                                    Some((version, status))
                                })
                                .collect()
                        })
                        .unwrap_or_default();
                    Some(VexAffects {
                        component_ref,
                        version_status,
                    })
                })
                .collect()
        })
        .unwrap_or_default();
    Some(VexStatement {
        vuln_id,
        source_name: el
            .get("source")
            .and_then(|s| s.get("name"))
            .and_then(Value::as_str)
            .map(str::to_string),
        analysis_state: el
            .get("analysis")
            .and_then(|a| a.get("state"))
            .and_then(Value::as_str)
            .map(str::to_string),
        affects,
    })
}

fn structure_issues(layout: &RawLayout, issues: &mut Vec<ValidationIssue>) {
    for dup in &layout.root_duplicates {
        issues.push(ValidationIssue {
            code: IssueCode::Schema,
            detail: format!("duplicate root-level key `{dup}` (last occurrence wins)"),
            location: dup.clone(),
        });
    }
    for (idx, dup) in &layout.component_duplicates {
        issues.push(ValidationIssue {
            code: IssueCode::Schema,
            detail: format!("duplicate key `{dup}` in component (last occurrence wins)"),
            location: format!("/components/{idx}"),
        });
    }
    let mut reported_unknown = Vec::new();
    let mut max_seen: Option<usize> = None;
    let mut order_reported = false;
    for entry in &layout.root {
        match ROOT_KEY_ORDER.iter().position(|k| *k == entry.key) {
            Some(idx) => {
                if max_seen.is_some_and(|m| idx < m) {
                    if !order_reported {
                        issues.push(ValidationIssue {
                            code: IssueCode::RootOrder,
                            detail: format!(
                                "root key `{}` appears after keys that must follow it",
                                entry.key
                            ),
                            location: entry.key.clone(),
                        });
                        order_reported = true;
                    }
                } else {
                    max_seen = Some(idx);
                }
            }
            None => {
                if !reported_unknown.contains(&entry.key) {
                    issues.push(ValidationIssue {
                        code: IssueCode::UnknownRootKey,
                        detail: format!("`{}` is not a CycloneDX 1.6 root-level key", entry.key),
                        location: entry.key.clone(),
                    });
                    reported_unknown.push(entry.key.clone());
                }
            }
        }
    }
}

/// Parse a CycloneDX 1.6 JSON document leniently.
///
/// Structural defects are reported in `Bom::validation_issues`; only inputs
/// that are not JSON or not CycloneDX at all are errors.
pub fn parse_bom(raw: &[u8]) -> Result<Bom, SbomError> {
    let text = std::str::from_utf8(raw).map_err(|e| SbomError::NotJson(e.to_string()))?;
    let value: Value = serde_json::from_str(text).map_err(|e| SbomError::NotJson(e.to_string()))?;
    let obj = value.as_object().ok_or(SbomError::NotCycloneDx)?;
    if obj.get("bomFormat").and_then(Value::as_str) != Some("CycloneDX") {
        return Err(SbomError::NotCycloneDx);
    }

    let mut issues = Vec::new();
    let layout = raw_layout(text).unwrap_or_default();
    structure_issues(&layout, &mut issues);

    let spec_version = match get_str(&value, "specVersion") {
        Some(v) => v,
        None => {
            issues.push(ValidationIssue {
                code: IssueCode::Schema,
                detail: "missing `specVersion`".into(),
                location: "specVersion".into(),
            });
            String::new()
        }
    };

    let metadata = obj.get("metadata").map(|m| Metadata {
        timestamp: get_str(m, "timestamp"),
        component: m
            .get("component")
            .and_then(|c| extract_component(c, "/metadata/component", None, &mut issues)),
    });

    let components = obj
        .get("components")
        .and_then(Value::as_array)
        .map(|items| {
            items
                .iter()
                .enumerate()
                .filter_map(|(i, el)| {
                    extract_component(
                        el,
                        &format!("/components/{i}"),
                        layout.components.get(i).map(Vec::as_slice),
                        &mut issues,
                    )
                })
                .collect()
        })
        .unwrap_or_default();

    let dependencies = obj
        .get("dependencies")
        .and_then(Value::as_array)
        .map(|items| {
            items
                .iter()
                .filter_map(|el| {
                    Some(DependencyEdge {
                        dependency_ref: get_str(el, "ref")?,
                        depends_on: el
                            .get("dependsOn")
                            .and_then(Value::as_array)
                            .map(|deps| {
                                deps.iter()
                                    .filter_map(Value::as_str)
                                    .map(str::to_string)
                                    .collect()
                            })
                            .unwrap_or_default(),
                    })
                })
                .collect()
        })
        .unwrap_or_default();

    let vulnerabilities = obj
        .get("vulnerabilities")
        .and_then(Value::as_array)
        .map(|items| {
            items
                .iter()
                .enumerate()
                .filter_map(|(i, el)| {
                    extract_vex(el, &format!("/vulnerabilities/{i}"), &mut issues)
                })
                .collect()
        })
        .unwrap_or_default();

    Ok(Bom {
        spec_version,
        serial_number: get_str(&value, "serialNumber"),
        metadata,
        components,
        dependencies,
        vulnerabilities,
        validation_issues: issues,
    })
}

/// Exploitability status a VEX statement assigns to one (component, vuln) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VexStatus {
    /// An `unaffected` entry matched the component's effective version.
    Suppressed,
    /// An `affected` entry confirmed the finding.
    Confirmed,
}

/// VEX statements resolved against the BOM's components.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VexIndex {
    pub statuses: BTreeMap<(String, String), VexStatus>,
    /// `(ref, vuln_id)` pairs whose ref matches no component — warning material.
    pub dangling: Vec<(String, String)>,
}

/// Resolve the BOM's embedded VEX statements. An `unaffected` version entry
/// equal to the referenced component's effective version suppresses the
/// vulnerability for that component; `affected` confirms it; suppression wins
/// when both appear. Statements never add findings by themselves.
pub fn vex_suppressions(bom: &Bom) -> VexIndex {
    let by_ref: BTreeMap<&str, &Component> = bom
        .components
        .iter()
        .filter_map(|c| c.bom_ref.as_deref().map(|r| (r, c)))
        .collect();

    let mut index = VexIndex::default();
    for statement in &bom.vulnerabilities {
        for affects in &statement.affects {
            let Some(component) = by_ref.get(affects.component_ref.as_str()) else {
                index
                    .dangling
                    .push((affects.component_ref.clone(), statement.vuln_id.clone()));
                continue;
            };
            let effective = component.effective_version();
            let key = (affects.component_ref.clone(), statement.vuln_id.clone());
            for (version, status) in &affects.version_status {
                match status {
                    VersionStatus::Unaffected if Some(version) == effective.as_ref() => {
                        index.statuses.insert(key.clone(), VexStatus::Suppressed);
                    }
                    VersionStatus::Affected => {
                        index
                            .statuses
                            .entry(key.clone())
                            .or_insert(VexStatus::Confirmed);
                    }
                    _ => {}
                }
            }
        }
    }
    index
}

#[cfg(test)]
mod tests {
    use super::*;

    fn in_order_doc() -> String {
        r#"{
          "bomFormat": "CycloneDX",
          "specVersion": "1.6",
          "serialNumber": "urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79",
          "version": 1,
          "metadata": {
            "timestamp": "2025-01-01T00:00:00Z",
            "component": {"type": "application", "name": "app", "version": "1.0.0"}
          },
          "components": [
            {
              "bom-ref": "comp-dicer",
              "type": "library",
              "name": "dicer",
              "purl": "pkg:npm/dicer@0.3.0"
            }
          ]
        }"#
        .to_string()
    }

    #[test]
    fn in_order_document_parses_without_issues() {
        let bom = parse_bom(in_order_doc().as_bytes()).unwrap();
        assert_eq!(bom.spec_version, "1.6");
        assert!(
            bom.validation_issues.is_empty(),
            "{:?}",
            bom.validation_issues
        );
        assert_eq!(bom.components.len(), 1);
        let c = &bom.components[0];
        assert_eq!(c.purl.as_deref(), Some("pkg:npm/dicer@0.3.0"));
        assert_eq!(c.cpe, None);
        assert_eq!(c.effective_version().as_deref(), Some("0.3.0"));
    }

    #[test]
    fn out_of_order_roots_yield_root_order_issue_but_components_extract() {
        let doc = r#"{
          "bomFormat": "CycloneDX",
          "specVersion": "1.6",
          "version": 1,
          "metadata": {},
          "vulnerabilities": [],
          "dependencies": [],
          "components": [{"bom-ref": "c1", "type": "library", "name": "dicer"}]
        }"#;
        let bom = parse_bom(doc.as_bytes()).unwrap();
        let codes: Vec<IssueCode> = bom.validation_issues.iter().map(|i| i.code).collect();
        assert_eq!(codes, [IssueCode::RootOrder]);
        assert_eq!(bom.validation_issues[0].location, "dependencies");
        assert_eq!(bom.components.len(), 1);
    }

    #[test]
    fn unknown_root_key_is_named() {
        let doc = r#"{
          "bomFormat": "CycloneDX",
          "specVersion": "1.6",
          "version": 1,
          "licenses": [],
          "properties": []
        }"#;
        let bom = parse_bom(doc.as_bytes()).unwrap();
        assert_eq!(bom.validation_issues.len(), 1);
        let issue = &bom.validation_issues[0];
        assert_eq!(issue.code, IssueCode::UnknownRootKey);
        assert_eq!(issue.location, "licenses");
    }

    #[test]
    fn duplicate_root_key_last_wins_with_schema_issue() {
        let doc = r#"{
          "bomFormat": "CycloneDX",
          "specVersion": "1.5",
          "specVersion": "1.6",
          "version": 1
        }"#;
        let bom = parse_bom(doc.as_bytes()).unwrap();
        assert_eq!(bom.spec_version, "1.6");
        assert!(bom
            .validation_issues
            .iter()
            .any(|i| i.code == IssueCode::Schema && i.location == "specVersion"));
    }

    #[test]
    fn permuting_root_keys_changes_only_issues() {
        let ordered = in_order_doc();
        let shuffled = r#"{
          "components": [
            {
              "bom-ref": "comp-dicer",
              "type": "library",
              "name": "dicer",
              "purl": "pkg:npm/dicer@0.3.0"
            }
          ],
          "version": 1,
          "bomFormat": "CycloneDX",
          "specVersion": "1.6",
          "serialNumber": "urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79",
          "metadata": {
            "timestamp": "2025-01-01T00:00:00Z",
            "component": {"type": "application", "name": "app", "version": "1.0.0"}
          }
        }"#;
        let a = parse_bom(ordered.as_bytes()).unwrap();
        let b = parse_bom(shuffled.as_bytes()).unwrap();
        assert_eq!(a.components, b.components);
        assert!(a.validation_issues.is_empty());
        assert_eq!(
            b.validation_issues
                .iter()
                .filter(|i| i.code == IssueCode::RootOrder)
                .count(),
            1
        );
    }

    #[test]
    fn raw_order_reflects_identifier_byte_positions() {
        let doc = r#"{
          "bomFormat": "CycloneDX",
          "specVersion": "1.6",
          "version": 1,
          "components": [
            {"bom-ref": "a", "type": "library", "name": "x", "cpe": "cpe:2.3:a:v:x:1:*:*:*:*:*:*:*", "purl": "pkg:npm/x@1"},
            {"bom-ref": "b", "type": "library", "name": "y", "purl": "pkg:npm/y@1", "cpe": "cpe:2.3:a:v:y:1:*:*:*:*:*:*:*"}
          ]
        }"#;
        let bom = parse_bom(doc.as_bytes()).unwrap();
        let a = &bom.components[0].raw_order;
        let b = &bom.components[1].raw_order;
        assert!(a.cpe.unwrap() < a.purl.unwrap());
        assert!(b.purl.unwrap() < b.cpe.unwrap());
    }

    #[test]
    fn component_without_name_is_skipped_with_issue() {
        let doc = r#"{
          "bomFormat": "CycloneDX",
          "specVersion": "1.6",
          "version": 1,
          "components": [{"bom-ref": "c1", "type": "library"}, {"type": "library", "name": "ok"}]
        }"#;
        let bom = parse_bom(doc.as_bytes()).unwrap();
        assert_eq!(bom.components.len(), 1);
        assert_eq!(bom.components[0].name, "ok");
        assert!(bom
            .validation_issues
            .iter()
            .any(|i| i.code == IssueCode::Schema && i.location == "/components/0"));
    }

    #[test]
    fn effective_version_priority_chain() {
        let mk = |version_field: Option<&str>, cpe: Option<&str>, purl: Option<&str>| Component {
            bom_ref: None,
            ctype: "library".into(),
            publisher: None,
            name: "x".into(),
            version_field: version_field.map(str::to_string),
            cpe: cpe.map(str::to_string),
            purl: purl.map(str::to_string),
            raw_order: IdOrder::default(),
        };
        let field_wins = mk(
            Some("2.0"),
            Some("cpe:2.3:a:v:x:1.5:*:*:*:*:*:*:*"),
            Some("pkg:npm/x@1.0"),
        );
        assert_eq!(field_wins.effective_version().as_deref(), Some("2.0"));

        let purl_beats_cpe = mk(
            None,
            Some("cpe:2.3:a:v:x:1.5:*:*:*:*:*:*:*"),
            Some("pkg:npm/x@1.0"),
        );
        assert_eq!(purl_beats_cpe.effective_version().as_deref(), Some("1.0"));

        let cpe_literal = mk(None, Some("cpe:2.3:a:v:x:1.5:*:*:*:*:*:*:*"), None);
        assert_eq!(cpe_literal.effective_version().as_deref(), Some("1.5"));

        let cpe_any = mk(None, Some("cpe:2.3:a:v:x:*:*:*:*:*:*:*:*"), None);
        assert_eq!(cpe_any.effective_version(), None);

        let versionless_purl = mk(None, None, Some("pkg:npm/x"));
        assert_eq!(versionless_purl.effective_version(), None);
    }

    fn vex_doc(state: &str, status: &str) -> String {
        format!(
            r#"{{
              "bomFormat": "CycloneDX",
              "specVersion": "1.6",
              "version": 1,
              "components": [
                {{
                  "bom-ref": "comp-lucene-replicator",
                  "type": "library",
                  "name": "lucene-replicator",
                  "version": "8.11.4",
                  "purl": "pkg:maven/org.apache.lucene/lucene-replicator@8.11.4"
                }}
              ],
              "vulnerabilities": [
                {{
                  "id": "CVE-2024-45772",
                  "source": {{"name": "NVD"}},
                  "analysis": {{"state": "{state}"}},
                  "affects": [
                    {{
                      "ref": "comp-lucene-replicator",
                      "versions": [{{"version": "8.11.4", "status": "{status}"}}]
                    }}
                  ]
                }}
              ]
            }}"#
        )
    }

    #[test]
    fn vex_unaffected_matching_version_suppresses() {
        let bom = parse_bom(vex_doc("not_affected", "unaffected").as_bytes()).unwrap();
        let index = vex_suppressions(&bom);
        assert_eq!(
            index.statuses.get(&(
                "comp-lucene-replicator".to_string(),
                "CVE-2024-45772".to_string()
            )),
            Some(&VexStatus::Suppressed)
        );
        assert!(index.dangling.is_empty());
    }

    #[test]
    fn vex_affected_confirms() {
        let bom = parse_bom(vex_doc("exploitable", "affected").as_bytes()).unwrap();
        let index = vex_suppressions(&bom);
        assert_eq!(
            index.statuses.get(&(
                "comp-lucene-replicator".to_string(),
                "CVE-2024-45772".to_string()
            )),
            Some(&VexStatus::Confirmed)
        );
    }

    #[test]
    fn vex_unaffected_other_version_does_not_suppress() {
        let doc = vex_doc("not_affected", "unaffected").replace(
            r#"{"version": "8.11.4", "status": "unaffected"}"#,
            r#"{"version": "9.12.0", "status": "unaffected"}"#,
        );
        let bom = parse_bom(doc.as_bytes()).unwrap();
        let index = vex_suppressions(&bom);
        assert!(index.statuses.is_empty());
    }

    #[test]
    fn vex_dangling_ref_is_recorded() {
        let doc = vex_doc("exploitable", "affected").replace(
            "\"ref\": \"comp-lucene-replicator\"",
            "\"ref\": \"comp-missing\"",
        );
        let bom = parse_bom(doc.as_bytes()).unwrap();
        let index = vex_suppressions(&bom);
        assert!(index.statuses.is_empty());
        assert_eq!(
            index.dangling,
            [("comp-missing".to_string(), "CVE-2024-45772".to_string())]
        );
    }

    #[test]
    fn no_vulnerabilities_section_yields_empty_index() {
        let bom = parse_bom(in_order_doc().as_bytes()).unwrap();
        assert_eq!(vex_suppressions(&bom), VexIndex::default());
    }

    #[test]
    fn non_json_and_non_cyclonedx_errors() {
        assert!(matches!(parse_bom(b"not json"), Err(SbomError::NotJson(_))));
        assert!(matches!(
            parse_bom(&[0xff, 0xfe]),
            Err(SbomError::NotJson(_))
        ));
        assert!(matches!(
            parse_bom(br#"{"bomFormat": "SPDX"}"#),
            Err(SbomError::NotCycloneDx)
        ));
        assert!(matches!(parse_bom(b"[1]"), Err(SbomError::NotCycloneDx)));
    }

    #[test]
    fn metadata_fields_are_extracted() {
        let bom = parse_bom(in_order_doc().as_bytes()).unwrap();
        let meta = bom.metadata.unwrap();
        assert_eq!(meta.timestamp.as_deref(), Some("2025-01-01T00:00:00Z"));
        assert_eq!(meta.component.unwrap().name, "app");
        assert_eq!(
            bom.serial_number.as_deref(),
            Some("urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79")
        );
    }
}
