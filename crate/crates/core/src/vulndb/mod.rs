//! Local vulnerability-knowledge snapshots.
//!
//! A [`Snapshot`] is an immutable, content-addressed set of [`VulnRecord`]s:
//! vulnerabilities keyed by ID, each carrying CPE criteria and purl+range
//! criteria. Lookups answer "which records claim this component identifier";
//! [`compare_versions`] supplies the house version ordering used by ranges.
//! Snapshots persist as a single canonical JSON file — no database server —
//! and two snapshots with equal record content always share a `snapshot_id`.

mod osv;
mod seed;

pub use osv::{ingest_osv, IngestReport, IngestSkip};
pub use seed::{
    seed_snapshot, DICER_CPE_PATTERN, DICER_PURL_COORDINATES, DICER_VULN_ALIAS, DICER_VULN_ID,
    LUCENE_CPE_PATTERN, LUCENE_FIXED_VERSION, LUCENE_PURL_COORDINATES, LUCENE_VULN_ID,
};

use crate::identifiers::{cpe_names_match, NaVersionPolicy, Purl, Wfn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub const SNAPSHOT_SCHEMA: &str = "svs-test/vulndb/1";

#[derive(Debug, Error)]
pub enum VulnDbError {
    #[error("failed to read or write `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid snapshot JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported snapshot schema `{0}` (expected `{SNAPSHOT_SCHEMA}`)")]
    SchemaMismatch(String),
    #[error("snapshot integrity check failed: file says {stored}, content hashes to {computed}")]
    IntegrityMismatch { stored: String, computed: String },
    #[error("duplicate vulnerability id `{0}`")]
    DuplicateId(String),
    #[error("alias `{alias}` of record `{id}` collides with another record's id")]
    AliasCollision { id: String, alias: String },
    #[error("invalid version range in record `{id}`: {detail}")]
    InvalidRange { id: String, detail: String },
    #[error("invalid criterion in record `{id}`: {detail}")]
    InvalidCriterion { id: String, detail: String },
}

/// Compare two version strings under the house ordering.
///
/// Versions split into segments on `.` and `-`. Two numeric segments compare
/// numerically; any other pair compares lexicographically, case-insensitive.
/// When one version is a prefix of the other, the extra material decides:
/// an extra numeric segment extends the version upward (`1.0 < 1.0.1`), an
/// extra non-numeric segment marks a pre-release and sorts below the base
/// (`1.0.0-rc1 < 1.0.0`). This is a documented house scheme for opaque
/// version strings, not a semver implementation; it is pinned by the fixture
/// table in the tests below.
pub fn compare_versions(a: &str, b: &str) -> Ordering {
    fn is_numeric(seg: &str) -> bool {
        !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_digit())
    }
    fn numeric_cmp(a: &str, b: &str) -> Ordering {
        let a = a.trim_start_matches('0');
        let b = b.trim_start_matches('0');
        a.len().cmp(&b.len()).then_with(|| a.cmp(b))
    }
    fn segment_cmp(a: &str, b: &str) -> Ordering {
        if is_numeric(a) && is_numeric(b) {
            numeric_cmp(a, b)
        } else {
            a.to_lowercase().cmp(&b.to_lowercase())
        }
    }

    let sa: Vec<&str> = a.split(['.', '-']).collect();
    let sb: Vec<&str> = b.split(['.', '-']).collect();
    for (x, y) in sa.iter().zip(&sb) {
        match segment_cmp(x, y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    match sa.len().cmp(&sb.len()) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Less => {
            // b continues: numeric extension is greater, pre-release is less.
            if is_numeric(sb[sa.len()]) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        Ordering::Greater => {
            if is_numeric(sa[sb.len()]) {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    }
}

fn default_introduced() -> String {
    "0".to_string()
}

/// A half-open (or inclusive-capped) affected-version interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionRange {
    /// First affected version, inclusive. Defaults to "0" (all from the start).
    #[serde(default = "default_introduced")]
    pub introduced: String,
    /// First fixed version, exclusive upper bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<String>,
    /// Last affected version, inclusive upper bound. Mutually exclusive with `fixed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_affected: Option<String>,
}

impl VersionRange {
    /// Every version from "0" on: affected with no fix known.
    pub fn all() -> Self {
        VersionRange {
            introduced: default_introduced(),
            fixed: None,
            last_affected: None,
        }
    }

    /// Affected from "0" up to (excluding) the fixed version.
    pub fn up_to_fixed(fixed: &str) -> Self {
        VersionRange {
            introduced: default_introduced(),
            fixed: Some(fixed.to_string()),
            last_affected: None,
        }
    }

    pub fn contains(&self, version: &str) -> bool {
        if compare_versions(&self.introduced, version) == Ordering::Greater {
            return false;
        }
        if let Some(fixed) = &self.fixed {
            return compare_versions(version, fixed) == Ordering::Less;
        }
        if let Some(last) = &self.last_affected {
            return compare_versions(version, last) != Ordering::Greater;
        }
        true
    }

    fn validate(&self, id: &str) -> Result<(), VulnDbError> {
        if self.fixed.is_some() && self.last_affected.is_some() {
            return Err(VulnDbError::InvalidRange {
                id: id.to_string(),
                detail: "both `fixed` and `last_affected` set".into(),
            });
        }
        if let Some(bound) = self.fixed.as_deref().or(self.last_affected.as_deref()) {
            if compare_versions(&self.introduced, bound) == Ordering::Greater {
                return Err(VulnDbError::InvalidRange {
                    id: id.to_string(),
                    detail: format!("introduced `{}` above bound `{bound}`", self.introduced),
                });
            }
        }
        Ok(())
    }
}

/// How purl lookups treat a component purl that carries no version.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VersionlessPurlPolicy {
    /// Treat the component as potentially affected: return the record.
    Wildcard,
    /// Return nothing; the caller is expected to warn about the skip.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpeCriterion {
    pub pattern: Wfn,
    /// Applies when the component supplies a concrete version; patterns with a
    /// literal version constrain matching by themselves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_range: Option<VersionRange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurlCriterion {
    /// Version-free package coordinates.
    pub coordinates: Purl,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ranges: Vec<VersionRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit_versions: Option<Vec<String>>,
}

impl PurlCriterion {
    /// Does a concrete component version fall under this criterion? With
    /// neither ranges nor explicit versions the coordinates alone decide.
    fn covers_version(&self, version: &str) -> bool {
        if self.ranges.is_empty() && self.explicit_versions.is_none() {
            return true;
        }
        self.ranges.iter().any(|r| r.contains(version))
            || self
                .explicit_versions
                .iter()
                .flatten()
                .any(|v| compare_versions(v, version) == Ordering::Equal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VulnRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub summary: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cpe_criteria: Vec<CpeCriterion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub purl_criteria: Vec<PurlCriterion>,
}

/// An immutable, content-addressed set of vulnerability records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    schema: String,
    pub snapshot_id: String,
    pub created_at: String,
    pub records: Vec<VulnRecord>,
}

fn canonicalize_records(records: &mut [VulnRecord]) {
    for record in records.iter_mut() {
        record.aliases.sort();
        record.aliases.dedup();
        record
            .cpe_criteria
            .sort_by_key(|c| serde_json::to_string(c).unwrap_or_default());
        for criterion in &mut record.purl_criteria {
            if let Some(versions) = &mut criterion.explicit_versions {
                versions.sort();
                versions.dedup();
            }
            criterion
                .ranges
                .sort_by(|a, b| compare_versions(&a.introduced, &b.introduced));
        }
        record
            .purl_criteria
            .sort_by_key(|c| serde_json::to_string(c).unwrap_or_default());
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
}

fn digest_records(records: &[VulnRecord]) -> String {
    let canonical = serde_json::to_string(records).expect("records serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn validate_records(records: &[VulnRecord]) -> Result<(), VulnDbError> {
    let mut ids = std::collections::BTreeSet::new();
    for record in records {
        if !ids.insert(record.id.as_str()) {
            return Err(VulnDbError::DuplicateId(record.id.clone()));
        }
    }
    for record in records {
        for alias in &record.aliases {
            if alias != &record.id && ids.contains(alias.as_str()) {
                return Err(VulnDbError::AliasCollision {
                    id: record.id.clone(),
                    alias: alias.clone(),
                });
            }
        }
        for criterion in &record.cpe_criteria {
            if let Some(range) = &criterion.version_range {
                range.validate(&record.id)?;
            }
        }
        for criterion in &record.purl_criteria {
            if criterion.coordinates.version.is_some() {
                return Err(VulnDbError::InvalidCriterion {
                    id: record.id.clone(),
                    detail: format!(
                        "purl coordinates `{}` must not carry a version",
                        criterion.coordinates
                    ),
                });
            }
            for range in &criterion.ranges {
                range.validate(&record.id)?;
            }
            for pair in criterion.ranges.windows(2) {
                let upper_ok = match (&pair[0].fixed, &pair[0].last_affected) {
                    (Some(fixed), _) => {
                        compare_versions(fixed, &pair[1].introduced) != Ordering::Greater
                    }
                    (_, Some(last)) => {
                        compare_versions(last, &pair[1].introduced) == Ordering::Less
                    }
                    _ => false,
                };
                if !upper_ok {
                    return Err(VulnDbError::InvalidRange {
                        id: record.id.clone(),
                        detail: format!(
                            "overlapping ranges starting at `{}` and `{}`",
                            pair[0].introduced, pair[1].introduced
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

impl Snapshot {
    /// Build a snapshot: records are canonicalized (sorted, deduplicated),
    /// validated, and content-hashed. `created_at` does not enter the hash.
    pub fn new(mut records: Vec<VulnRecord>) -> Result<Self, VulnDbError> {
        canonicalize_records(&mut records);
        validate_records(&records)?;
        Ok(Snapshot {
            schema: SNAPSHOT_SCHEMA.to_string(),
            snapshot_id: digest_records(&records),
            created_at: chrono::Utc::now().to_rfc3339(),
            records,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), VulnDbError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|source| VulnDbError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Load a snapshot file, verifying both the schema marker and that the
    /// stored `snapshot_id` still matches the record content.
    pub fn load(path: &Path) -> Result<Self, VulnDbError> {
        let text = std::fs::read_to_string(path).map_err(|source| VulnDbError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let snapshot: Snapshot = serde_json::from_str(&text)?;
        if snapshot.schema != SNAPSHOT_SCHEMA {
            return Err(VulnDbError::SchemaMismatch(snapshot.schema));
        }
        validate_records(&snapshot.records)?;
        let computed = digest_records(&snapshot.records);
        if computed != snapshot.snapshot_id {
            return Err(VulnDbError::IntegrityMismatch {
                stored: snapshot.snapshot_id,
                computed,
            });
        }
        Ok(snapshot)
    }

    /// Records whose CPE criteria match the component name. When a criterion
    /// carries a version range and the component version is a concrete
    /// literal, the version must lie in range. Results are in record-id order,
    /// one (record, first matching criterion) pair per record.
    pub fn lookup_by_cpe(
        &self,
        component: &Wfn,
        policy: NaVersionPolicy,
    ) -> Vec<(&VulnRecord, &CpeCriterion)> {
        let component_version = component.version.plain_literal();
        self.records
            .iter()
            .filter_map(|record| {
                record
                    .cpe_criteria
                    .iter()
                    .find(|criterion| {
                        if !cpe_names_match(component, &criterion.pattern, policy) {
                            return false;
                        }
                        match (&criterion.version_range, &component_version) {
                            (Some(range), Some(version)) => range.contains(version),
                            _ => true,
                        }
                    })
                    .map(|criterion| (record, criterion))
            })
            .collect()
    }

    /// Records whose purl criteria cover the component. Versioned components
    /// are checked against ranges/explicit versions; versionless components
    /// match under [`VersionlessPurlPolicy::Wildcard`] and never match under
    /// [`VersionlessPurlPolicy::Skip`].
    pub fn lookup_by_purl(
        &self,
        component: &Purl,
        policy: VersionlessPurlPolicy,
    ) -> Vec<(&VulnRecord, &PurlCriterion)> {
        self.records
            .iter()
            .filter_map(|record| {
                record
                    .purl_criteria
                    .iter()
                    .find(|criterion| {
                        if !crate::identifiers::purl_coordinates_match(
                            component,
                            &criterion.coordinates,
                        ) {
                            return false;
                        }
                        match (&component.version, policy) {
                            (Some(version), _) => criterion.covers_version(version),
                            (None, VersionlessPurlPolicy::Wildcard) => true,
                            (None, VersionlessPurlPolicy::Skip) => false,
                        }
                    })
                    .map(|criterion| (record, criterion))
            })
            .collect()
    }

    /// Find a record by its id or any of its aliases.
    pub fn find(&self, id: &str) -> Option<&VulnRecord> {
        self.records
            .iter()
            .find(|r| r.id == id || r.aliases.iter().any(|a| a == id))
    }
}

/// Merge records that describe the same vulnerability id: union of aliases
/// and criteria, first non-empty summary. Returns how many merges happened.
pub(crate) fn merge_records(records: Vec<VulnRecord>) -> (Vec<VulnRecord>, usize) {
    let mut merged: BTreeMap<String, VulnRecord> = BTreeMap::new();
    let mut merges = 0;
    for record in records {
        match merged.get_mut(&record.id) {
            None => {
                merged.insert(record.id.clone(), record);
            }
            Some(existing) => {
                merges += 1;
                existing.aliases.extend(record.aliases);
                if existing.summary.is_empty() {
                    existing.summary = record.summary;
                }
                for criterion in record.cpe_criteria {
                    if !existing.cpe_criteria.contains(&criterion) {
                        existing.cpe_criteria.push(criterion);
                    }
                }
                for criterion in record.purl_criteria {
                    if !existing.purl_criteria.contains(&criterion) {
                        existing.purl_criteria.push(criterion);
                    }
                }
            }
        }
    }
    (merged.into_values().collect(), merges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identifiers::{parse_cpe, parse_purl};
    use proptest::prelude::*;

    /// Hand-ordered before the implementation existed; the ordering rule must
    /// reproduce every row.
    const VERSION_ORDER_FIXTURE: [(&str, &str, Ordering); 31] = [
        ("1.0.0", "1.0.0", Ordering::Equal),
        ("1.0.0", "1.0.1", Ordering::Less),
        ("8.11.4", "9.12.0", Ordering::Less),
        ("9.12.0", "9.12.0", Ordering::Equal),
        ("0", "0.3.0", Ordering::Less),
        ("0.3.0", "0.3", Ordering::Greater),
        ("1.0.0-rc1", "1.0.0", Ordering::Less),
        ("1.0.0-rc1", "1.0.0-rc2", Ordering::Less),
        ("1.0.0-rc2", "1.0.0-rc10", Ordering::Greater),
        ("1.0.0-alpha", "1.0.0-beta", Ordering::Less),
        ("1.0.0-RC1", "1.0.0-rc1", Ordering::Equal),
        ("2", "10", Ordering::Less),
        ("02", "2", Ordering::Equal),
        ("1.2.3", "1.02.3", Ordering::Equal),
        ("4.5", "4.5.0", Ordering::Less),
        ("4.5", "4.5-beta", Ordering::Greater),
        ("1.10", "1.9", Ordering::Greater),
        ("1.a", "1.b", Ordering::Less),
        ("1.a", "1.10", Ordering::Greater),
        ("3.0.x", "3.0.1", Ordering::Greater),
        ("0.0.0", "0", Ordering::Greater),
        ("6.11", "6.9", Ordering::Greater),
        ("1-0", "1.0", Ordering::Equal),
        ("5.2.1", "5.2.1.1", Ordering::Less),
        ("5.2.1-hotfix", "5.2.1.1", Ordering::Greater),
        ("r100", "r99", Ordering::Less),
        ("2024.01.05", "2024.1.5", Ordering::Equal),
        ("1.0.0+build1", "1.0.0+build2", Ordering::Less),
        ("", "0", Ordering::Less),
        ("9.12.0", "8.11.4", Ordering::Greater),
        ("1.0.0-rc1", "1.0.0-rc1.1", Ordering::Less),
    ];

    #[test]
    fn version_ordering_reproduces_fixture() {
        for (a, b, expected) in VERSION_ORDER_FIXTURE {
            assert_eq!(compare_versions(a, b), expected, "compare {a:?} vs {b:?}");
            assert_eq!(
                compare_versions(b, a),
                expected.reverse(),
                "compare {b:?} vs {a:?}"
            );
        }
    }

    proptest! {
        #[test]
        fn version_ordering_is_antisymmetric(a in "[0-9a-zA-Z.+-]{0,12}", b in "[0-9a-zA-Z.+-]{0,12}") {
            prop_assert_eq!(compare_versions(&a, &b), compare_versions(&b, &a).reverse());
        }

        #[test]
        fn version_ordering_is_reflexive(a in "[0-9a-zA-Z.+-]{0,12}") {
            prop_assert_eq!(compare_versions(&a, &a), Ordering::Equal);
        }
    }

    #[test]
    fn range_bounds() {
        let fixed = VersionRange::up_to_fixed("9.12.0");
        assert!(fixed.contains("8.11.4"));
        assert!(fixed.contains("9.11"));
        assert!(fixed.contains("0"));
        assert!(!fixed.contains("9.12.0"), "fixed bound is exclusive");
        assert!(!fixed.contains("10.0.0"));

        let capped = VersionRange {
            introduced: "2.0".into(),
            fixed: None,
            last_affected: Some("2.5".into()),
        };
        assert!(!capped.contains("1.9"));
        assert!(capped.contains("2.0"), "introduced is inclusive");
        assert!(capped.contains("2.5"), "last_affected is inclusive");
        assert!(!capped.contains("2.5.1"));

        assert!(VersionRange::all().contains("0"));
        assert!(VersionRange::all().contains("999.999"));
    }

    #[test]
    fn seed_cpe_lookups() {
        let snapshot = seed_snapshot();

        let dicer = parse_cpe("cpe:2.3:a:dicer_project:dicer:0.3.0:*:*:*:*:*:*:*").unwrap();
        let hits = snapshot.lookup_by_cpe(&dicer, NaVersionPolicy::TreatNaVersionAsUnknown);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0.id, DICER_VULN_ID);

        let fixed_lucene =
            parse_cpe("cpe:2.3:a:apache:lucene-replicator:9.12.0:*:*:*:*:*:*:*").unwrap();
        assert!(snapshot
            .lookup_by_cpe(&fixed_lucene, NaVersionPolicy::TreatNaVersionAsUnknown)
            .is_empty());

        let affected_lucene =
            parse_cpe("cpe:2.3:a:apache:lucene-replicator:8.11.4:*:*:*:*:*:*:*").unwrap();
        let hits =
            snapshot.lookup_by_cpe(&affected_lucene, NaVersionPolicy::TreatNaVersionAsUnknown);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0.id, LUCENE_VULN_ID);

        let all_any = Wfn::any();
        let hits = snapshot.lookup_by_cpe(&all_any, NaVersionPolicy::TreatNaVersionAsUnknown);
        assert_eq!(
            hits.len(),
            2,
            "all-ANY matches every record with CPE criteria"
        );
    }

    #[test]
    fn seed_purl_lookups() {
        let snapshot = seed_snapshot();

        let versioned = parse_purl("pkg:npm/dicer@0.3.0").unwrap();
        let hits = snapshot.lookup_by_purl(&versioned, VersionlessPurlPolicy::Wildcard);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0.id, DICER_VULN_ID);

        let versionless = parse_purl("pkg:npm/dicer").unwrap();
        assert_eq!(
            snapshot
                .lookup_by_purl(&versionless, VersionlessPurlPolicy::Wildcard)
                .len(),
            1
        );
        assert!(snapshot
            .lookup_by_purl(&versionless, VersionlessPurlPolicy::Skip)
            .is_empty());

        let unaffected =
            parse_purl("pkg:maven/org.apache.lucene/lucene-replicator@9.12.0").unwrap();
        assert!(snapshot
            .lookup_by_purl(&unaffected, VersionlessPurlPolicy::Wildcard)
            .is_empty());

        let affected = parse_purl("pkg:maven/org.apache.lucene/lucene-replicator@8.11.4").unwrap();
        let hits = snapshot.lookup_by_purl(&affected, VersionlessPurlPolicy::Wildcard);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0.id, LUCENE_VULN_ID);
    }

    #[test]
    fn fixed_bound_excluded_version_below_included() {
        let snapshot = seed_snapshot();
        let mk = |v: &str| {
            parse_purl(&format!(
                "pkg:maven/org.apache.lucene/lucene-replicator@{v}"
            ))
            .unwrap()
        };
        assert!(snapshot
            .lookup_by_purl(&mk(LUCENE_FIXED_VERSION), VersionlessPurlPolicy::Wildcard)
            .is_empty());
        assert_eq!(
            snapshot
                .lookup_by_purl(&mk("9.11"), VersionlessPurlPolicy::Wildcard)
                .len(),
            1,
            "version immediately below the fixed bound is affected"
        );
    }

    #[test]
    fn snapshot_id_is_content_addressed_and_order_independent() {
        let seed = seed_snapshot();
        let mut reversed = seed.records.clone();
        reversed.reverse();
        let rebuilt = Snapshot::new(reversed).unwrap();
        assert_eq!(seed.snapshot_id, rebuilt.snapshot_id);
        assert_eq!(seed.records, rebuilt.records);

        let empty_a = Snapshot::new(Vec::new()).unwrap();
        let empty_b = Snapshot::new(Vec::new()).unwrap();
        assert_eq!(empty_a.snapshot_id, empty_b.snapshot_id);
        assert_ne!(empty_a.snapshot_id, seed.snapshot_id);
    }

    #[test]
    fn save_load_roundtrip_and_integrity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.json");
        let seed = seed_snapshot();
        seed.save(&path).unwrap();
        let loaded = Snapshot::load(&path).unwrap();
        assert_eq!(loaded, seed);

        let tampered = std::fs::read_to_string(&path)
            .unwrap()
            .replace("dicer", "slicer");
        std::fs::write(&path, tampered).unwrap();
        assert!(matches!(
            Snapshot::load(&path),
            Err(VulnDbError::IntegrityMismatch { .. })
        ));

        let wrong_schema = serde_json::json!({
            "schema": "svs-test/vulndb/999",
            "snapshot_id": "x",
            "created_at": "now",
            "records": []
        });
        std::fs::write(&path, wrong_schema.to_string()).unwrap();
        assert!(matches!(
            Snapshot::load(&path),
            Err(VulnDbError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn invalid_record_sets_are_rejected() {
        let record = |id: &str| VulnRecord {
            id: id.into(),
            aliases: Vec::new(),
            summary: String::new(),
            cpe_criteria: Vec::new(),
            purl_criteria: Vec::new(),
        };

        let dup = vec![record("CVE-1"), record("CVE-1")];
        assert!(matches!(
            Snapshot::new(dup),
            Err(VulnDbError::DuplicateId(_))
        ));

        let mut aliased = record("CVE-1");
        aliased.aliases.push("CVE-2".into());
        assert!(matches!(
            Snapshot::new(vec![aliased, record("CVE-2")]),
            Err(VulnDbError::AliasCollision { .. })
        ));

        let mut bad_range = record("CVE-3");
        bad_range.purl_criteria.push(PurlCriterion {
            coordinates: parse_purl("pkg:npm/x").unwrap(),
            ranges: vec![VersionRange {
                introduced: "0".into(),
                fixed: Some("1".into()),
                last_affected: Some("2".into()),
            }],
            explicit_versions: None,
        });
        assert!(matches!(
            Snapshot::new(vec![bad_range]),
            Err(VulnDbError::InvalidRange { .. })
        ));

        let mut versioned_coords = record("CVE-4");
        versioned_coords.purl_criteria.push(PurlCriterion {
            coordinates: parse_purl("pkg:npm/x@1.0").unwrap(),
            ranges: Vec::new(),
            explicit_versions: None,
        });
        assert!(matches!(
            Snapshot::new(vec![versioned_coords]),
            Err(VulnDbError::InvalidCriterion { .. })
        ));

        let mut overlapping = record("CVE-5");
        overlapping.purl_criteria.push(PurlCriterion {
            coordinates: parse_purl("pkg:npm/x").unwrap(),
            ranges: vec![
                VersionRange::all(),
                VersionRange {
                    introduced: "2.0".into(),
                    fixed: Some("3.0".into()),
                    last_affected: None,
                },
            ],
            explicit_versions: None,
        });
        assert!(matches!(
            Snapshot::new(vec![overlapping]),
            Err(VulnDbError::InvalidRange { .. })
        ));
    }

    #[test]
    fn explicit_versions_match_by_ordering_equality() {
        let record = VulnRecord {
            id: "CVE-9".into(),
            aliases: Vec::new(),
            summary: String::new(),
            cpe_criteria: Vec::new(),
            purl_criteria: vec![PurlCriterion {
                coordinates: parse_purl("pkg:npm/x").unwrap(),
                ranges: Vec::new(),
                explicit_versions: Some(vec!["1.2.0".into()]),
            }],
        };
        let snapshot = Snapshot::new(vec![record]).unwrap();
        let hit = parse_purl("pkg:npm/x@1.02.0").unwrap();
        assert_eq!(
            snapshot
                .lookup_by_purl(&hit, VersionlessPurlPolicy::Wildcard)
                .len(),
            1,
            "1.02.0 equals 1.2.0 under the house ordering"
        );
        let miss = parse_purl("pkg:npm/x@1.3").unwrap();
        assert!(snapshot
            .lookup_by_purl(&miss, VersionlessPurlPolicy::Wildcard)
            .is_empty());
    }

    #[test]
    fn find_resolves_aliases() {
        let snapshot = seed_snapshot();
        assert_eq!(snapshot.find(DICER_VULN_ID).unwrap().id, DICER_VULN_ID);
        assert_eq!(snapshot.find(DICER_VULN_ALIAS).unwrap().id, DICER_VULN_ID);
        assert!(snapshot.find("CVE-0000-0000").is_none());
    }

    #[test]
    fn lookup_results_are_ordered_by_record_id() {
        let snapshot = seed_snapshot();
        let hits = snapshot.lookup_by_cpe(&Wfn::any(), NaVersionPolicy::TreatNaVersionAsUnknown);
        let ids: Vec<&str> = hits.iter().map(|(r, _)| r.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }
}
