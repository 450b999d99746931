//! The built-in fixture library: 16 CycloneDX SBOMs across 8 scenarios.
//!
//! Every case is a small, hand-shaped BOM probing one behavior of a
//! vulnerability scanner — identifier support, odd-but-legal version tokens,
//! identifier priority, CPE reconstruction, VEX handling, structural
//! validity — paired with a machine-readable [`Expectation`] describing what
//! a conformant tool must report. Cases within a scenario differ from their
//! baseline in exactly the dimension under test, so a verdict difference
//! between two cases isolates a single tool behavior.
//!
//! BOM bytes are built with the order-preserving [`bomdoc`] writer because
//! several cases test byte-level properties (root-element order, the relative
//! position of `cpe` and `purl` keys) that ordinary JSON maps cannot pin.

pub mod bomdoc;

use crate::vulndb::{DICER_VULN_ALIAS, DICER_VULN_ID, LUCENE_VULN_ID};
use bomdoc::{arr, i, obj, s, Node};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Schema tag for `manifest.json` written next to emitted cases.
pub const CASE_MANIFEST_SCHEMA: &str = "svs-test/case-manifest/1";
/// Schema tag for `expectations.json` written next to emitted cases.
pub const EXPECTATIONS_SCHEMA: &str = "svs-test/expectations/1";

/// All case ids in library order (scenario 1 through 8).
pub const CASE_IDS: [&str; 16] = [
    "an7esfjj", "dmszq6mv", // 1: component identifier support
    "u8h8dnoj", "fayptrma", "b5mxq45i", // 2: CPE without a component version
    "9a7iknu4", // 3: purl without a component version
    "2lb5zfps", "9xhb7rgj", "pq3cy9or", "5q46iw4f", // 4: identifier priority
    "sqs4tbob", // 5: no component identifier
    "hawmnwbz", // 6: non-canonical purl prefix
    "qbqy99do", "0vo0efli", // 7: VEX exploitability data
    "omwcmwv1", "3fvslnon", // 8: invalid input SBOM
];

#[derive(Debug, thiserror::Error)]
pub enum TestlibError {
    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A vulnerability-id expectation; any one alternative satisfies it
/// (e.g. a CVE id or the GHSA alias of the same vulnerability).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VulnIdPattern {
    pub alternatives: Vec<String>,
}

impl VulnIdPattern {
    pub fn new<S: Into<String>>(alternatives: impl IntoIterator<Item = S>) -> Self {
        VulnIdPattern {
            alternatives: alternatives.into_iter().map(Into::into).collect(),
        }
    }
}

/// A regular expression describing an acceptable warning message. When
/// `must_reference_component` is set, the matched line must also name one of
/// the expectation's component hints — a warning that does not identify the
/// affected component is not actionable and does not count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WarningMatcher {
    pub pattern: String,
    pub must_reference_component: bool,
}

/// The machine-readable contract for one test case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    /// Every pattern must be satisfied (by any of its alternatives) for a pass.
    pub required_findings: Vec<VulnIdPattern>,
    /// Ids that must NOT appear among active findings (VEX suppression).
    pub forbidden_findings: Vec<VulnIdPattern>,
    /// Warnings that turn a miss into an explicit-warning verdict.
    pub accepted_warnings: Vec<WarningMatcher>,
    /// Whether rejecting the whole BOM (nonzero exit or a rejection message)
    /// also counts as a pass.
    pub rejection_accepted: bool,
    /// Identifiers (bom-refs and names) of the components under test; used to
    /// check that warnings actually reference the affected component.
    pub component_hints: Vec<String>,
}

/// One fixture: a BOM, its expectation, and the story of why it exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    pub scenario: u8,
    pub title: String,
    /// Exact serialized SBOM; emitted byte-for-byte.
    pub bom_bytes: Vec<u8>,
    pub expectation: Expectation,
    pub rationale: String,
}

/// A scenario groups cases whose joint verdicts isolate one tool behavior.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub number: u8,
    pub name: String,
    pub case_ids: Vec<String>,
    pub interpretation_note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseManifest {
    pub schema: String,
    pub entries: Vec<ManifestEntry>,
}

/// One row of `expectations.json` — everything an external harness needs to
/// grade a tool's output for a case, minus the BOM bytes themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationEntry {
    pub id: String,
    pub scenario: u8,
    pub title: String,
    pub rationale: String,
    pub expectation: Expectation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationsFile {
    pub schema: String,
    pub cases: Vec<ExpectationEntry>,
}

// ---------------------------------------------------------------------------
// Fixture vocabulary. One serial number, timestamp, and root component shared
// by every case keeps structural diffs between cases down to exactly the
// dimension each case tests.

const FIXTURE_SERIAL_NUMBER: &str = "urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79";
const FIXTURE_TIMESTAMP: &str = "2025-01-01T00:00:00Z";
const CDX_SCHEMA_URL: &str = "http://cyclonedx.org/schema/bom-1.6.schema.json";
const ROOT_REF: &str = "root-application";
const DICER_REF: &str = "comp-dicer";
const MULTER_REF: &str = "comp-multer";
const LUCENE_REF: &str = "comp-lucene-replicator";
const LUCENE_AFFECTED_VERSION: &str = "8.11.4";
const LUCENE_FIXED_VERSION: &str = "9.12.0";

fn dicer_cpe(version_token: &str) -> String {
    format!("cpe:2.3:a:dicer_project:dicer:{version_token}:*:*:*:*:*:*:*")
}

fn lucene_cpe(version: &str) -> String {
    format!("cpe:2.3:a:apache:lucene-replicator:{version}:*:*:*:*:*:*:*")
}

fn lucene_purl(version: &str) -> String {
    format!("pkg:maven/org.apache.lucene/lucene-replicator@{version}")
}

fn root_component() -> Node {
    obj(vec![
        ("bom-ref", s(ROOT_REF)),
        ("type", s("application")),
        ("name", s("svs-test-target")),
        ("version", s("1.0.0")),
    ])
}

fn standard_metadata() -> Node {
    obj(vec![
        ("timestamp", s(FIXTURE_TIMESTAMP)),
        ("component", root_component()),
    ])
}

/// The ordinary, fully in-order BOM shell used by scenarios 1–7.
fn standard_bom(components: Vec<Node>, vulnerabilities: Option<Node>) -> Node {
    let mut entries = vec![
        ("$schema", s(CDX_SCHEMA_URL)),
        ("bomFormat", s("CycloneDX")),
        ("specVersion", s("1.6")),
        ("serialNumber", s(FIXTURE_SERIAL_NUMBER)),
        ("version", i(1)),
        ("metadata", standard_metadata()),
        ("components", arr(components)),
    ];
    if let Some(vulns) = vulnerabilities {
        entries.push(("vulnerabilities", vulns));
    }
    obj(entries)
}

fn dicer_component(id_entries: Vec<(&str, Node)>) -> Node {
    let mut entries = vec![
        ("bom-ref", s(DICER_REF)),
        ("type", s("library")),
        ("name", s("dicer")),
    ];
    entries.extend(id_entries);
    obj(entries)
}

fn lucene_component(id_entries: Vec<(&str, Node)>) -> Node {
    let mut entries = vec![
        ("bom-ref", s(LUCENE_REF)),
        ("type", s("library")),
        ("name", s("lucene-replicator")),
    ];
    entries.extend(id_entries);
    obj(entries)
}

fn lucene_vex(analysis_state: &str, version_status: &str) -> Node {
    arr(vec![obj(vec![
        ("id", s(LUCENE_VULN_ID)),
        (
            "source",
            obj(vec![
                ("name", s("NVD")),
                ("url", s("https://nvd.nist.gov/vuln/detail/CVE-2024-45772")),
            ]),
        ),
        ("analysis", obj(vec![("state", s(analysis_state))])),
        (
            "affects",
            arr(vec![obj(vec![
                ("ref", s(LUCENE_REF)),
                (
                    "versions",
                    arr(vec![obj(vec![
                        ("version", s(LUCENE_AFFECTED_VERSION)),
                        ("status", s(version_status)),
                    ])]),
                ),
            ])]),
        ),
    ])])
}

/// The two-component payload of the structural-validity cases: dicer
/// (vulnerable, both identifiers) and multer (clean).
fn structure_case_components() -> Node {
    arr(vec![
        obj(vec![
            ("bom-ref", s(DICER_REF)),
            ("type", s("library")),
            ("name", s("dicer")),
            ("version", s("0.3.0")),
            ("cpe", s(&dicer_cpe("0.3.0"))),
            ("purl", s("pkg:npm/dicer@0.3.0")),
        ]),
        obj(vec![
            ("bom-ref", s(MULTER_REF)),
            ("type", s("library")),
            ("name", s("multer")),
            ("version", s("1.4.4")),
            ("purl", s("pkg:npm/multer@1.4.4")),
        ]),
    ])
}

fn structure_case_dependencies() -> Node {
    arr(vec![obj(vec![
        ("ref", s(ROOT_REF)),
        ("dependsOn", arr(vec![s(DICER_REF), s(MULTER_REF)])),
    ])])
}

fn sbom_license_block() -> Node {
    arr(vec![obj(vec![("license", obj(vec![("id", s("MIT"))]))])])
}

fn sbom_properties_block() -> Node {
    arr(vec![obj(vec![
        ("name", s("generator")),
        ("value", s("svs-test fixture library")),
    ])])
}

// ---------------------------------------------------------------------------
// Expectation vocabulary.

fn dicer_finding() -> VulnIdPattern {
    VulnIdPattern::new([DICER_VULN_ID, DICER_VULN_ALIAS])
}

fn lucene_finding() -> VulnIdPattern {
    VulnIdPattern::new([LUCENE_VULN_ID])
}

/// Accepts component-referencing warnings about untestable or mishandled
/// identifiers: "skipped", "Invalid CPE", "Error processing PURL for
/// component X", "does not have a testable component identifier", and the
/// like. A match only counts when the line names the component.
fn identifier_warning() -> WarningMatcher {
    WarningMatcher {
        pattern: r"(?i)(skipped|ignored|not scanned|not tested|testable (component )?identifier|(usable|supported) (component )?identifier|invalid (cpe|purl)|error processing (cpe|purl)|does not parse|no version)".to_string(),
        must_reference_component: true,
    }
}

/// Accepts whole-BOM rejection notices ("Invalid BOM segment", "Error in
/// uploading the BOM", schema-validation failures). No component reference is
/// required — the defect is document-level.
fn rejection_notice() -> WarningMatcher {
    WarningMatcher {
        pattern: r"(?i)(invalid|malformed|reject|schema validation|out[ -]of[ -]order|root[ -]level|error.{0,40}upload)".to_string(),
        must_reference_component: false,
    }
}

/// Accepts an explicit notice that embedded VEX data was not processed.
fn vex_notice() -> WarningMatcher {
    WarningMatcher {
        pattern: r"(?i)vex".to_string(),
        must_reference_component: false,
    }
}

fn expect_finding(pattern: VulnIdPattern, hints: &[&str]) -> Expectation {
    Expectation {
        required_findings: vec![pattern],
        forbidden_findings: Vec::new(),
        accepted_warnings: vec![identifier_warning()],
        rejection_accepted: false,
        component_hints: hints.iter().map(|h| h.to_string()).collect(),
    }
}

fn case(
    id: &str,
    scenario: u8,
    title: &str,
    bom: Node,
    expectation: Expectation,
    rationale: &str,
) -> TestCase {
    TestCase {
        id: id.to_string(),
        scenario,
        title: title.to_string(),
        bom_bytes: bom.render().into_bytes(),
        expectation,
        rationale: rationale.to_string(),
    }
}

// ---------------------------------------------------------------------------
// The library itself.

/// Build all 16 test cases, in scenario order. Pure and deterministic: the
/// same bytes and expectations on every call.
pub fn build_library() -> Vec<TestCase> {
    let dicer_hints = &["comp-dicer", "dicer"];
    let lucene_hints = &["comp-lucene-replicator", "lucene-replicator"];

    vec![
        // Scenario 1 — component identifier support.
        case(
            "an7esfjj",
            1,
            "CPE identifier support",
            standard_bom(
                vec![dicer_component(vec![("cpe", s(&dicer_cpe("0.3.0")))])],
                None,
            ),
            expect_finding(dicer_finding(), dicer_hints),
            "A component identified only by a valid CPE with an explicit version. \
             Tools that match on CPE report the vulnerability; tools without CPE \
             support must say that the component went untested.",
        ),
        case(
            "dmszq6mv",
            1,
            "purl identifier support",
            standard_bom(
                vec![dicer_component(vec![("purl", s("pkg:npm/dicer@0.3.0"))])],
                None,
            ),
            expect_finding(dicer_finding(), dicer_hints),
            "A component identified only by a canonical purl with an embedded \
             version. Any purl-capable tool should report the vulnerability.",
        ),
        // Scenario 2 — CPE without a component version.
        case(
            "u8h8dnoj",
            2,
            "CPE component version left blank",
            standard_bom(
                vec![dicer_component(vec![("cpe", s(&dicer_cpe("")))])],
                None,
            ),
            expect_finding(dicer_finding(), dicer_hints),
            "The CPE version attribute is an empty string, which CPE naming \
             interprets as the logical value ANY; matching must treat it as \
             always matching, not as a literal empty version.",
        ),
        case(
            "fayptrma",
            2,
            "CPE component version as asterisk",
            standard_bom(
                vec![dicer_component(vec![("cpe", s(&dicer_cpe("*")))])],
                None,
            ),
            expect_finding(dicer_finding(), dicer_hints),
            "The CPE version attribute is `*`, the explicit spelling of ANY. \
             Identical to the blank-version case except for the version token.",
        ),
        case(
            "b5mxq45i",
            2,
            "CPE component version as hyphen",
            standard_bom(
                vec![dicer_component(vec![("cpe", s(&dicer_cpe("-")))])],
                None,
            ),
            expect_finding(dicer_finding(), dicer_hints),
            "The CPE version attribute is `-` (Not Applicable). NA is legal in \
             CPE naming but meaningless as a component version; tools should \
             still match or warn rather than fail silently.",
        ),
        // Scenario 3 — purl without a component version.
        case(
            "9a7iknu4",
            3,
            "purl without component version",
            standard_bom(
                vec![dicer_component(vec![("purl", s("pkg:npm/dicer"))])],
                None,
            ),
            expect_finding(dicer_finding(), dicer_hints),
            "The purl carries no version, which the purl specification permits. \
             The component cannot be cleared of the vulnerability, so a tool \
             should report it (or warn that versionless purls go untested).",
        ),
        // Scenario 4 — identifier priority. Identical component data; only the
        // identifier values and the cpe/purl key order vary.
        case(
            "2lb5zfps",
            4,
            "Vulnerable CPE before purl",
            standard_bom(
                vec![lucene_component(vec![
                    ("cpe", s(&lucene_cpe(LUCENE_AFFECTED_VERSION))),
                    ("purl", s(&lucene_purl(LUCENE_FIXED_VERSION))),
                ])],
                None,
            ),
            expect_finding(lucene_finding(), lucene_hints),
            "The CPE names the affected version while the purl names the fixed \
             one, with the CPE key first. A tool honoring both identifiers must \
             report the vulnerability; one that only reads the purl misses it.",
        ),
        case(
            "9xhb7rgj",
            4,
            "purl before vulnerable CPE",
            standard_bom(
                vec![lucene_component(vec![
                    ("purl", s(&lucene_purl(LUCENE_FIXED_VERSION))),
                    ("cpe", s(&lucene_cpe(LUCENE_AFFECTED_VERSION))),
                ])],
                None,
            ),
            expect_finding(lucene_finding(), lucene_hints),
            "Same identifier values as the previous case with the key order \
             swapped; JSON key order must not change the outcome.",
        ),
        case(
            "pq3cy9or",
            4,
            "CPE before vulnerable purl",
            standard_bom(
                vec![lucene_component(vec![
                    ("cpe", s(&lucene_cpe(LUCENE_FIXED_VERSION))),
                    ("purl", s(&lucene_purl(LUCENE_AFFECTED_VERSION))),
                ])],
                None,
            ),
            expect_finding(lucene_finding(), lucene_hints),
            "Mirror image: the purl names the affected version while the CPE \
             names the fixed one. A purl-capable tool must report the finding.",
        ),
        case(
            "5q46iw4f",
            4,
            "Vulnerable purl before CPE",
            standard_bom(
                vec![lucene_component(vec![
                    ("purl", s(&lucene_purl(LUCENE_AFFECTED_VERSION))),
                    ("cpe", s(&lucene_cpe(LUCENE_FIXED_VERSION))),
                ])],
                None,
            ),
            expect_finding(lucene_finding(), lucene_hints),
            "Same values as the previous case with the key order swapped, \
             completing the 2×2 grid of vulnerable-identifier × key order.",
        ),
        // Scenario 5 — no component identifier at all.
        case(
            "sqs4tbob",
            5,
            "Components without identifier strings",
            standard_bom(
                vec![
                    obj(vec![
                        ("bom-ref", s(DICER_REF)),
                        ("type", s("library")),
                        ("publisher", s("dicer_project")),
                        ("name", s("dicer")),
                        ("version", s("0.3.0")),
                    ]),
                    obj(vec![
                        ("bom-ref", s(MULTER_REF)),
                        ("type", s("library")),
                        ("publisher", s("expressjs")),
                        ("name", s("multer")),
                        ("version", s("1.4.4")),
                    ]),
                ],
                None,
            ),
            Expectation {
                required_findings: vec![dicer_finding()],
                forbidden_findings: Vec::new(),
                accepted_warnings: vec![identifier_warning()],
                rejection_accepted: false,
                component_hints: vec![
                    "comp-dicer".to_string(),
                    "dicer".to_string(),
                    "comp-multer".to_string(),
                    "multer".to_string(),
                ],
            },
            "Two components carry publisher, name, and version but neither a CPE \
             nor a purl — everything needed to reconstruct an identifier is \
             present. A tool should either reconstruct and report the known \
             vulnerability or warn that the components went untested.",
        ),
        // Scenario 6 — non-canonical purl prefix.
        case(
            "hawmnwbz",
            6,
            "Non-canonical purl prefix",
            standard_bom(
                vec![lucene_component(vec![(
                    "purl",
                    s(&format!(
                        "pkg://maven/org.apache.lucene/lucene-replicator@{LUCENE_AFFECTED_VERSION}"
                    )),
                )])],
                None,
            ),
            expect_finding(lucene_finding(), lucene_hints),
            "The purl uses the `pkg://` prefix, which the purl specification \
             requires parsers to accept by ignoring extra slashes after the \
             scheme. The identifier is otherwise ordinary and vulnerable.",
        ),
        // Scenario 7 — embedded VEX data.
        case(
            "qbqy99do",
            7,
            "VEX statement with no influence",
            standard_bom(
                vec![lucene_component(vec![
                    ("cpe", s(&lucene_cpe(LUCENE_AFFECTED_VERSION))),
                    ("purl", s(&lucene_purl(LUCENE_AFFECTED_VERSION))),
                ])],
                Some(lucene_vex("exploitable", "affected")),
            ),
            expect_finding(lucene_finding(), lucene_hints),
            "The embedded VEX statement confirms the affected version really is \
             affected, so processing it must not change anything: a baseline \
             showing the vulnerability is still reported alongside VEX data.",
        ),
        case(
            "0vo0efli",
            7,
            "VEX statement suppressing the vulnerability",
            standard_bom(
                vec![lucene_component(vec![
                    ("cpe", s(&lucene_cpe(LUCENE_AFFECTED_VERSION))),
                    ("purl", s(&lucene_purl(LUCENE_AFFECTED_VERSION))),
                ])],
                Some(lucene_vex("not_affected", "unaffected")),
            ),
            Expectation {
                required_findings: Vec::new(),
                forbidden_findings: vec![lucene_finding()],
                accepted_warnings: vec![vex_notice()],
                rejection_accepted: false,
                component_hints: vec![
                    "comp-lucene-replicator".to_string(),
                    "lucene-replicator".to_string(),
                ],
            },
            "Identical to the baseline VEX case except the statement marks the \
             installed version as unaffected. A conformant tool suppresses the \
             finding; reporting it anyway is a failure unless the tool clearly \
             states that it ignores VEX data.",
        ),
        // Scenario 8 — structurally invalid input.
        case(
            "omwcmwv1",
            8,
            "Out-of-order root elements",
            obj(vec![
                ("$schema", s(CDX_SCHEMA_URL)),
                ("bomFormat", s("CycloneDX")),
                ("specVersion", s("1.6")),
                ("serialNumber", s(FIXTURE_SERIAL_NUMBER)),
                ("version", i(1)),
                (
                    "metadata",
                    obj(vec![
                        ("timestamp", s(FIXTURE_TIMESTAMP)),
                        ("component", root_component()),
                        ("licenses", sbom_license_block()),
                        ("properties", sbom_properties_block()),
                    ]),
                ),
                ("vulnerabilities", arr(vec![])),
                ("dependencies", structure_case_dependencies()),
                ("components", structure_case_components()),
            ]),
            Expectation {
                required_findings: vec![dicer_finding()],
                forbidden_findings: Vec::new(),
                accepted_warnings: vec![rejection_notice()],
                rejection_accepted: true,
                component_hints: vec!["comp-dicer".to_string(), "dicer".to_string()],
            },
            "Root elements appear as metadata, vulnerabilities, dependencies, \
             components — legal JSON but not the normative element order. \
             Rejecting the document with a clear error passes; since JSON \
             parsers need not care about order, reporting the vulnerability \
             in the dicer component also passes.",
        ),
        case(
            "3fvslnon",
            8,
            "Unknown root-level element",
            obj(vec![
                ("$schema", s(CDX_SCHEMA_URL)),
                ("bomFormat", s("CycloneDX")),
                ("specVersion", s("1.6")),
                ("serialNumber", s(FIXTURE_SERIAL_NUMBER)),
                ("version", i(1)),
                ("metadata", standard_metadata()),
                ("components", structure_case_components()),
                ("dependencies", structure_case_dependencies()),
                ("vulnerabilities", arr(vec![])),
                ("properties", sbom_properties_block()),
                ("licenses", sbom_license_block()),
            ]),
            Expectation {
                required_findings: vec![dicer_finding()],
                forbidden_findings: Vec::new(),
                accepted_warnings: vec![rejection_notice()],
                rejection_accepted: true,
                component_hints: vec!["comp-dicer".to_string(), "dicer".to_string()],
            },
            "The same content with the licenses block hoisted out of metadata to \
             the document root, where no `licenses` element exists (the \
             neighboring `properties` element is legal there). Rejection passes; \
             so does reporting the vulnerability despite the junk element.",
        ),
    ]
}

/// Scenario grouping with a note on what the joint verdicts reveal.
pub fn scenarios() -> Vec<Scenario> {
    fn scenario(number: u8, name: &str, case_ids: &[&str], note: &str) -> Scenario {
        Scenario {
            number,
            name: name.to_string(),
            case_ids: case_ids.iter().map(|id| id.to_string()).collect(),
            interpretation_note: note.to_string(),
        }
    }
    vec![
        scenario(
            1,
            "Component Identifier Support",
            &["an7esfjj", "dmszq6mv"],
            "Passing one case but not the other isolates which identifier \
             family (CPE or purl) the tool actually matches on.",
        ),
        scenario(
            2,
            "CPE: No Component Version",
            &["u8h8dnoj", "fayptrma", "b5mxq45i"],
            "Blank, `*`, and `-` version tokens are all legal CPE spellings; \
             a tool that fails any of them deviates from CPE name matching.",
        ),
        scenario(
            3,
            "purl: No Component Version",
            &["9a7iknu4"],
            "Shows whether a versionless purl is treated as potentially \
             affected, skipped with a warning, or silently dropped.",
        ),
        scenario(
            4,
            "Component Identifier Priority",
            &["2lb5zfps", "9xhb7rgj", "pq3cy9or", "5q46iw4f"],
            "The 2×2 grid of (which identifier is vulnerable) × (key order) \
             reveals which identifier a tool prefers and whether JSON key \
             order leaks into results.",
        ),
        scenario(
            5,
            "No Component Identifier",
            &["sqs4tbob"],
            "Distinguishes tools that reconstruct identifiers from name, \
             publisher, and version from tools that skip such components — \
             and whether the skip is announced.",
        ),
        scenario(
            6,
            "purl: Non-canonical Prefix",
            &["hawmnwbz"],
            "A `pkg://` prefix is non-canonical but must parse; failing here \
             indicates a purl parser stricter than the specification.",
        ),
        scenario(
            7,
            "VEX Exploitability Data",
            &["qbqy99do", "0vo0efli"],
            "The confirming statement is a baseline; only the suppressing \
             statement separates tools that process embedded VEX from tools \
             that ignore it.",
        ),
        scenario(
            8,
            "Invalid Input SBOM",
            &["omwcmwv1", "3fvslnon"],
            "Checks whether structural defects (element order, unknown root \
             elements) are rejected, tolerated deliberately, or mishandled.",
        ),
    ]
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write every case's BOM plus `manifest.json` and `expectations.json` into
/// `dir`. Emitted BOM bytes are exactly `bom_bytes`; re-emitting yields
/// identical files.
pub fn emit_sbom_files(dir: &Path) -> Result<CaseManifest, TestlibError> {
    let io_err = |path: &Path, source: std::io::Error| TestlibError::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let cases = build_library();
    let mut entries = Vec::with_capacity(cases.len());
    for case in &cases {
        let file = format!("{}.cdx.json", case.id);
        let path = dir.join(&file);
        std::fs::write(&path, &case.bom_bytes).map_err(|e| io_err(&path, e))?;
        entries.push(ManifestEntry {
            id: case.id.clone(),
            file,
            sha256: sha256_hex(&case.bom_bytes),
        });
    }

    let manifest = CaseManifest {
        schema: CASE_MANIFEST_SCHEMA.to_string(),
        entries,
    };
    let manifest_path = dir.join("manifest.json");
    let mut manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest_json.push('\n');
    std::fs::write(&manifest_path, manifest_json).map_err(|e| io_err(&manifest_path, e))?;

    let expectations = ExpectationsFile {
        schema: EXPECTATIONS_SCHEMA.to_string(),
        cases: cases
            .iter()
            .map(|c| ExpectationEntry {
                id: c.id.clone(),
                scenario: c.scenario,
                title: c.title.clone(),
                rationale: c.rationale.clone(),
                expectation: c.expectation.clone(),
            })
            .collect(),
    };
    let expectations_path = dir.join("expectations.json");
    let mut expectations_json =
        serde_json::to_string_pretty(&expectations).expect("expectations serialize");
    expectations_json.push('\n');
    std::fs::write(&expectations_path, expectations_json)
        .map_err(|e| io_err(&expectations_path, e))?;

    Ok(manifest)
}

/// Content digest over the whole library (BOM bytes and expectations); two
/// builds with identical fixtures share a digest.
pub fn library_digest() -> String {
    let mut hasher = Sha256::new();
    for case in build_library() {
        hasher.update(case.id.as_bytes());
        hasher.update([0]);
        hasher.update(&case.bom_bytes);
        hasher.update([0]);
        hasher.update(serde_json::to_vec(&case.expectation).expect("expectation serializes"));
        hasher.update([0]);
    }
    hex::encode(hasher.finalize())
}
