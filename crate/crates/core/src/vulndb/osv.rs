//! OSV-format ingestion.
//!
//! Reads OSV JSON documents (one per file, or a top-level array per file),
//! translates ecosystem+name pairs to purl coordinates, maps SEMVER/ECOSYSTEM
//! range events onto [`VersionRange`]s, promotes CVE aliases to record ids,
//! and merges documents describing the same vulnerability. Malformed
//! documents are skipped with an entry in the [`IngestReport`], never
//! aborting the whole ingestion.

use super::{
    merge_records, CpeCriterion, PurlCriterion, Snapshot, VersionRange, VulnDbError, VulnRecord,
};
use crate::identifiers::{parse_cpe, parse_purl, CpeAttribute, Purl};
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct IngestSkip {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestReport {
    pub files_read: usize,
    pub documents_seen: usize,
    pub records_ingested: usize,
    pub documents_merged: usize,
    pub skipped: Vec<IngestSkip>,
}

/// Translate an OSV ecosystem + package name to purl coordinates. Ecosystem
/// suffixes after `:` (e.g. `Alpine:v3.16`) are ignored for the type mapping.
fn ecosystem_coordinates(ecosystem: &str, name: &str) -> Option<Purl> {
    let base = ecosystem.split(':').next().unwrap_or(ecosystem);
    let (ptype, namespace, pkg_name): (&str, Option<&str>, &str) =
        match base.to_ascii_lowercase().as_str() {
            "npm" => match name.rsplit_once('/') {
                Some((scope, n)) => ("npm", Some(scope), n),
                None => ("npm", None, name),
            },
            "maven" => {
                let (group, artifact) = name.split_once(':')?;
                ("maven", Some(group), artifact)
            }
            "pypi" => ("pypi", None, name),
            "go" => match name.rsplit_once('/') {
                Some((module, n)) => ("golang", Some(module), n),
                None => ("golang", None, name),
            },
            "crates.io" => ("cargo", None, name),
            "rubygems" => ("gem", None, name),
            "packagist" => match name.split_once('/') {
                Some((vendor, n)) => ("composer", Some(vendor), n),
                None => ("composer", None, name),
            },
            "nuget" => ("nuget", None, name),
            _ => return None,
        };
    Some(Purl {
        ptype: ptype.to_string(),
        namespace: namespace.map(|ns| ns.to_lowercase()),
        name: pkg_name.to_string(),
        version: None,
        qualifiers: BTreeMap::new(),
        subpath: None,
    })
}

/// Strip version, qualifiers and subpath: criteria carry coordinates only.
fn as_coordinates(purl: Purl) -> Purl {
    Purl {
        version: None,
        qualifiers: BTreeMap::new(),
        subpath: None,
        ..purl
    }
}

/// Map an OSV `ranges[].events` list to version ranges: `introduced` opens a
/// range, `fixed`/`last_affected` closes it.
fn ranges_from_events(events: &[Value]) -> Vec<VersionRange> {
    let mut ranges = Vec::new();
    let mut open: Option<VersionRange> = None;
    for event in events {
        if let Some(v) = event.get("introduced").and_then(Value::as_str) {
            if let Some(range) = open.take() {
                ranges.push(range);
            }
            open = Some(VersionRange {
                introduced: v.to_string(),
                fixed: None,
                last_affected: None,
            });
        } else if let Some(v) = event.get("fixed").and_then(Value::as_str) {
            let mut range = open.take().unwrap_or_else(VersionRange::all);
            range.fixed = Some(v.to_string());
            ranges.push(range);
        } else if let Some(v) = event.get("last_affected").and_then(Value::as_str) {
            let mut range = open.take().unwrap_or_else(VersionRange::all);
            range.last_affected = Some(v.to_string());
            ranges.push(range);
        }
    }
    if let Some(range) = open {
        ranges.push(range);
    }
    ranges
}

fn record_from_document(
    doc: &Value,
    source: &str,
    report: &mut IngestReport,
) -> Option<VulnRecord> {
    let original_id = match doc
        .get("id")
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
    {
        Some(id) => id.to_string(),
        None => {
            report.skipped.push(IngestSkip {
                file: source.to_string(),
                reason: "document has no `id`".to_string(),
            });
            return None;
        }
    };

    let mut aliases: Vec<String> = doc
        .get("aliases")
        .and_then(Value::as_array)
        .map(|list| {
            list.iter()
                .filter_map(Value::as_str)
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default();

    // Promote a CVE alias to the record id so records from different sources
    // merge under the scheme the test expectations use.
    let id = if original_id.starts_with("CVE-") {
        original_id.clone()
    } else if let Some(pos) = aliases.iter().position(|a| a.starts_with("CVE-")) {
        let cve = aliases.remove(pos);
        aliases.push(original_id.clone());
        cve
    } else {
        original_id.clone()
    };
    aliases.retain(|a| a != &id);

    let summary = doc
        .get("summary")
        .or_else(|| doc.get("details"))
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();

    let mut cpe_criteria = Vec::new();
    let mut purl_criteria = Vec::new();

    for affected in doc
        .get("affected")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
    {
        let mut ranges = Vec::new();
        for range in affected
            .get("ranges")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            match range.get("type").and_then(Value::as_str) {
                Some("SEMVER") | Some("ECOSYSTEM") => {
                    if let Some(events) = range.get("events").and_then(Value::as_array) {
                        ranges.extend(ranges_from_events(events));
                    }
                }
                // GIT ranges need commit ordering, which a version snapshot
                // cannot evaluate.
                _ => {}
            }
        }

        let explicit_versions = affected
            .get("versions")
            .and_then(Value::as_array)
            .map(|list| {
                list.iter()
                    .filter_map(Value::as_str)
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            })
            .filter(|v| !v.is_empty());

        let coordinates = affected.get("package").and_then(|package| {
            if let Some(raw) = package.get("purl").and_then(Value::as_str) {
                match parse_purl(raw) {
                    Ok(purl) => return Some(as_coordinates(purl)),
                    Err(e) => {
                        report.skipped.push(IngestSkip {
                            file: source.to_string(),
                            reason: format!("{id}: unparseable package purl `{raw}`: {e}"),
                        });
                        return None;
                    }
                }
            }
            let ecosystem = package.get("ecosystem").and_then(Value::as_str)?;
            let name = package.get("name").and_then(Value::as_str)?;
            let coords = ecosystem_coordinates(ecosystem, name);
            if coords.is_none() {
                report.skipped.push(IngestSkip {
                    file: source.to_string(),
                    reason: format!("{id}: unsupported ecosystem `{ecosystem}`"),
                });
            }
            coords
        });

        if let Some(coordinates) = coordinates {
            purl_criteria.push(PurlCriterion {
                coordinates,
                ranges: ranges.clone(),
                explicit_versions,
            });
        }

        for raw in affected
            .get("database_specific")
            .and_then(|d| d.get("cpes"))
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
            .filter_map(Value::as_str)
        {
            match parse_cpe(raw) {
                Ok(pattern) => {
                    let takes_ranges = pattern.version == CpeAttribute::Any && !ranges.is_empty();
                    if takes_ranges {
                        for range in &ranges {
                            cpe_criteria.push(CpeCriterion {
                                pattern: pattern.clone(),
                                version_range: Some(range.clone()),
                            });
                        }
                    } else {
                        cpe_criteria.push(CpeCriterion {
                            pattern,
                            version_range: None,
                        });
                    }
                }
                Err(e) => report.skipped.push(IngestSkip {
                    file: source.to_string(),
                    reason: format!("{id}: unparseable CPE `{raw}`: {e}"),
                }),
            }
        }
    }

    Some(VulnRecord {
        id,
        aliases,
        summary,
        cpe_criteria,
        purl_criteria,
    })
}

/// Ingest OSV documents from files into a fresh snapshot, reporting skips.
pub fn ingest_osv<P: AsRef<Path>>(paths: &[P]) -> Result<(Snapshot, IngestReport), VulnDbError> {
    let mut report = IngestReport::default();
    let mut records = Vec::new();

    for path in paths {
        let path = path.as_ref();
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| VulnDbError::Io {
            path: label.clone(),
            source,
        })?;
        report.files_read += 1;
        let value: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => {
                report.skipped.push(IngestSkip {
                    file: label,
                    reason: format!("not JSON: {e}"),
                });
                continue;
            }
        };
        let docs: Vec<&Value> = match &value {
            Value::Array(items) => items.iter().collect(),
            other => vec![other],
        };
        for doc in docs {
            report.documents_seen += 1;
            if let Some(record) = record_from_document(doc, &label, &mut report) {
                records.push(record);
            }
        }
    }

    let (merged, merges) = merge_records(records);
    report.documents_merged = merges;
    report.records_ingested = merged.len();
    let snapshot = Snapshot::new(merged)?;
    Ok((snapshot, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identifiers::parse_purl;
    use crate::vulndb::VersionlessPurlPolicy;

    fn write_docs(dir: &tempfile::TempDir, files: &[(&str, &str)]) -> Vec<std::path::PathBuf> {
        files
            .iter()
            .map(|(name, body)| {
                let path = dir.path().join(name);
                std::fs::write(&path, body).unwrap();
                path
            })
            .collect()
    }

    const GHSA_DOC: &str = r#"{
        "id": "GHSA-wm7h-9275-46v2",
        "aliases": ["CVE-2022-24434"],
        "summary": "Crash in HeaderParser in dicer",
        "affected": [
            {
                "package": {"ecosystem": "npm", "name": "dicer"},
                "ranges": [{"type": "SEMVER", "events": [{"introduced": "0"}]}],
                "database_specific": {
                    "cpes": ["cpe:2.3:a:dicer_project:dicer:*:*:*:*:*:*:*:*"]
                }
            }
        ]
    }"#;

    #[test]
    fn cve_alias_is_promoted_to_record_id() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_docs(&dir, &[("ghsa.json", GHSA_DOC)]);
        let (snapshot, report) = ingest_osv(&paths).unwrap();
        assert_eq!(report.records_ingested, 1);
        assert!(report.skipped.is_empty());
        let record = &snapshot.records[0];
        assert_eq!(record.id, "CVE-2022-24434");
        assert_eq!(record.aliases, vec!["GHSA-wm7h-9275-46v2".to_string()]);

        let hit = parse_purl("pkg:npm/dicer@0.3.0").unwrap();
        let hits = snapshot.lookup_by_purl(&hit, VersionlessPurlPolicy::Wildcard);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0.id, "CVE-2022-24434");
    }

    #[test]
    fn documents_for_the_same_cve_merge() {
        let nvd_doc = r#"{
            "id": "CVE-2022-24434",
            "summary": "",
            "affected": [
                {
                    "package": {"ecosystem": "npm", "name": "busboy"},
                    "ranges": [{"type": "SEMVER", "events": [{"introduced": "0"}, {"fixed": "1.0.0"}]}]
                }
            ]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let paths = write_docs(&dir, &[("a.json", GHSA_DOC), ("b.json", nvd_doc)]);
        let (snapshot, report) = ingest_osv(&paths).unwrap();
        assert_eq!(report.documents_seen, 2);
        assert_eq!(report.documents_merged, 1);
        assert_eq!(report.records_ingested, 1);
        let record = &snapshot.records[0];
        assert_eq!(record.id, "CVE-2022-24434");
        assert_eq!(record.summary, "Crash in HeaderParser in dicer");
        assert_eq!(record.purl_criteria.len(), 2, "union of criteria");
    }

    #[test]
    fn ingestion_order_does_not_change_snapshot_id() {
        let maven_doc = r#"{
            "id": "CVE-2024-45772",
            "affected": [
                {
                    "package": {"ecosystem": "Maven", "name": "org.apache.lucene:lucene-replicator"},
                    "ranges": [{"type": "ECOSYSTEM", "events": [{"introduced": "0"}, {"fixed": "9.12.0"}]}]
                }
            ]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let paths = write_docs(&dir, &[("a.json", GHSA_DOC), ("b.json", maven_doc)]);
        let (forward, _) = ingest_osv(&paths).unwrap();
        let reversed: Vec<_> = paths.iter().rev().collect();
        let (backward, _) = ingest_osv(&reversed).unwrap();
        assert_eq!(forward.snapshot_id, backward.snapshot_id);
    }

    #[test]
    fn maven_names_split_into_group_and_artifact() {
        let coords = ecosystem_coordinates("Maven", "org.apache.lucene:lucene-replicator").unwrap();
        assert_eq!(
            coords.to_string(),
            "pkg:maven/org.apache.lucene/lucene-replicator"
        );

        let scoped = ecosystem_coordinates("npm", "@scope/pkg").unwrap();
        assert_eq!(scoped.to_string(), "pkg:npm/%40scope/pkg");

        let cargo = ecosystem_coordinates("crates.io", "rand").unwrap();
        assert_eq!(cargo.to_string(), "pkg:cargo/rand");

        assert!(ecosystem_coordinates("Linux", "kernel").is_none());
    }

    #[test]
    fn missing_id_is_skipped_with_report_entry() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_docs(
            &dir,
            &[
                ("bad.json", r#"{"summary": "no id here"}"#),
                ("good.json", GHSA_DOC),
            ],
        );
        let (snapshot, report) = ingest_osv(&paths).unwrap();
        assert_eq!(snapshot.records.len(), 1);
        assert_eq!(report.skipped.len(), 1);
        assert!(report.skipped[0].reason.contains("no `id`"));
    }

    #[test]
    fn array_files_and_multiple_range_events() {
        let array_doc = r#"[
            {
                "id": "CVE-2020-0001",
                "affected": [
                    {
                        "package": {"ecosystem": "PyPI", "name": "widget"},
                        "ranges": [{
                            "type": "ECOSYSTEM",
                            "events": [
                                {"introduced": "0"}, {"fixed": "1.2"},
                                {"introduced": "2.0"}, {"last_affected": "2.5"}
                            ]
                        }],
                        "versions": ["1.9"]
                    }
                ]
            },
            {
                "id": "CVE-2020-0002",
                "affected": [
                    {
                        "package": {"ecosystem": "Go", "name": "github.com/acme/pkg"},
                        "ranges": [{"type": "GIT", "events": [{"introduced": "abc123"}]}]
                    }
                ]
            }
        ]"#;
        let dir = tempfile::tempdir().unwrap();
        let paths = write_docs(&dir, &[("batch.json", array_doc)]);
        let (snapshot, report) = ingest_osv(&paths).unwrap();
        assert_eq!(report.documents_seen, 2);
        assert_eq!(snapshot.records.len(), 2);

        let widget = snapshot.find("CVE-2020-0001").unwrap();
        let criterion = &widget.purl_criteria[0];
        assert_eq!(criterion.ranges.len(), 2);
        assert_eq!(criterion.ranges[0].fixed.as_deref(), Some("1.2"));
        assert_eq!(criterion.ranges[1].last_affected.as_deref(), Some("2.5"));
        assert_eq!(
            criterion.explicit_versions.as_deref(),
            Some(&["1.9".to_string()][..])
        );

        let go = snapshot.find("CVE-2020-0002").unwrap();
        assert!(
            go.purl_criteria[0].ranges.is_empty(),
            "GIT ranges are skipped"
        );
        assert_eq!(
            go.purl_criteria[0].coordinates.to_string(),
            "pkg:golang/github.com/acme/pkg"
        );
    }

    #[test]
    fn package_purl_field_preferred_and_stripped_to_coordinates() {
        let doc = r#"{
            "id": "CVE-2021-0001",
            "affected": [
                {
                    "package": {
                        "ecosystem": "npm",
                        "name": "ignored",
                        "purl": "pkg:npm/actual@9.9.9?foo=bar"
                    },
                    "ranges": [{"type": "SEMVER", "events": [{"introduced": "0"}]}]
                }
            ]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let paths = write_docs(&dir, &[("p.json", doc)]);
        let (snapshot, _) = ingest_osv(&paths).unwrap();
        let coords = &snapshot.records[0].purl_criteria[0].coordinates;
        assert_eq!(coords.to_string(), "pkg:npm/actual");
        assert_eq!(coords.version, None);
    }

    #[test]
    fn empty_file_list_yields_stable_empty_snapshot() {
        let (a, report) = ingest_osv::<std::path::PathBuf>(&[]).unwrap();
        let (b, _) = ingest_osv::<std::path::PathBuf>(&[]).unwrap();
        assert_eq!(a.snapshot_id, b.snapshot_id);
        assert!(a.records.is_empty());
        assert_eq!(report.files_read, 0);
    }

    #[test]
    fn cpes_with_ranges_get_one_criterion_per_range() {
        let doc = r#"{
            "id": "CVE-2024-45772",
            "affected": [
                {
                    "package": {"ecosystem": "Maven", "name": "org.apache.lucene:lucene-replicator"},
                    "ranges": [{"type": "ECOSYSTEM", "events": [{"introduced": "0"}, {"fixed": "9.12.0"}]}],
                    "database_specific": {
                        "cpes": ["cpe:2.3:a:apache:lucene-replicator:*:*:*:*:*:*:*:*"]
                    }
                }
            ]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let paths = write_docs(&dir, &[("lucene.json", doc)]);
        let (snapshot, _) = ingest_osv(&paths).unwrap();
        let record = snapshot.find("CVE-2024-45772").unwrap();
        assert_eq!(record.cpe_criteria.len(), 1);
        let range = record.cpe_criteria[0].version_range.as_ref().unwrap();
        assert_eq!(range.fixed.as_deref(), Some("9.12.0"));
    }
}
