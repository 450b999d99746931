//! The ground-truth snapshot shipped with the repository.
//!
//! Two real vulnerabilities cover everything the test library needs: one with
//! all versions affected and a GHSA alias, one with a fixed version so range
//! boundaries get exercised. The CPE vendor/product tokens here are the
//! repository's own choice and must stay identical to the tokens used in the
//! test-case SBOMs — the fixtures and this snapshot are two halves of one
//! contract.

use super::{CpeCriterion, PurlCriterion, Snapshot, VersionRange, VulnRecord};
use crate::identifiers::{parse_cpe, parse_purl};

/// Crash in busboy's HeaderParser, all dicer versions affected, no fix.
pub const DICER_VULN_ID: &str = "CVE-2022-24434";
pub const DICER_VULN_ALIAS: &str = "GHSA-wm7h-9275-46v2";
/// Apache Lucene Replicator deserialization issue, fixed in 9.12.0.
pub const LUCENE_VULN_ID: &str = "CVE-2024-45772";

pub const DICER_CPE_PATTERN: &str = "cpe:2.3:a:dicer_project:dicer:*:*:*:*:*:*:*:*";
pub const LUCENE_CPE_PATTERN: &str = "cpe:2.3:a:apache:lucene-replicator:*:*:*:*:*:*:*:*";
pub const DICER_PURL_COORDINATES: &str = "pkg:npm/dicer";
pub const LUCENE_PURL_COORDINATES: &str = "pkg:maven/org.apache.lucene/lucene-replicator";
pub const LUCENE_FIXED_VERSION: &str = "9.12.0";

/// Build the seed snapshot. Infallible by construction; the unit tests pin
/// its lookup behavior.
pub fn seed_snapshot() -> Snapshot {
    let dicer = VulnRecord {
        id: DICER_VULN_ID.to_string(),
        aliases: vec![DICER_VULN_ALIAS.to_string()],
        summary: "Crash in HeaderParser in dicer: a malicious attacker can send a modified form \
                  to crash the Node.js service."
            .to_string(),
        cpe_criteria: vec![CpeCriterion {
            pattern: parse_cpe(DICER_CPE_PATTERN).expect("seed CPE pattern parses"),
            version_range: None,
        }],
        purl_criteria: vec![PurlCriterion {
            coordinates: parse_purl(DICER_PURL_COORDINATES).expect("seed purl parses"),
            ranges: vec![VersionRange::all()],
            explicit_versions: None,
        }],
    };

    let lucene = VulnRecord {
        id: LUCENE_VULN_ID.to_string(),
        aliases: Vec::new(),
        summary: "Apache Lucene Replicator: deserialization of untrusted data on the replication \
                  endpoint; fixed in 9.12.0."
            .to_string(),
        cpe_criteria: vec![CpeCriterion {
            pattern: parse_cpe(LUCENE_CPE_PATTERN).expect("seed CPE pattern parses"),
            version_range: Some(VersionRange::up_to_fixed(LUCENE_FIXED_VERSION)),
        }],
        purl_criteria: vec![PurlCriterion {
            coordinates: parse_purl(LUCENE_PURL_COORDINATES).expect("seed purl parses"),
            ranges: vec![VersionRange::up_to_fixed(LUCENE_FIXED_VERSION)],
            explicit_versions: None,
        }],
    };

    Snapshot::new(vec![dicer, lucene]).expect("seed snapshot is valid")
}
