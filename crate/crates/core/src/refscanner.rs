//! Reference SBOM vulnerability scanner with configurable degradations.
//!
//! The scanner embodies the behavior a conformant tool should show: use every
//! identifier a component carries, never skip anything silently, and warn
//! with the component reference whenever something cannot be tested. The
//! [`Profile`]s then deliberately break single axes of that behavior —
//! CPE support off, version-field dependence, VEX ignored, structure checks
//! relaxed — so the evaluation pipeline has realistic failure modes to
//! classify without depending on any external tool.
//!
//! `scan` is a pure function of (BOM, snapshot, config); reports serialize
//! deterministically both as JSON and as a `WARN:`-style text rendering.

use crate::identifiers::{parse_cpe, parse_purl, NaVersionPolicy, Purl, Wfn};
use crate::sbom::{vex_suppressions, Bom, Component, IssueCode, VexStatus};
use crate::vulndb::{Snapshot, VersionlessPurlPolicy};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub use_cpe: bool,
    pub use_purl: bool,
    pub versionless_purl_policy: VersionlessPurlPolicy,
    pub na_version_policy: NaVersionPolicy,
    /// Build a CPE from publisher/name/effective version when a component
    /// carries no identifier at all (requires `use_cpe`).
    pub reconstruct_cpe_if_none: bool,
    /// Only test components with an explicit `version` field, and prefer that
    /// field over purl-embedded versions — emulates tools that ignore the
    /// version inside the purl.
    pub require_version_field: bool,
    pub process_vex: bool,
    /// Reject BOMs with unknown root keys or schema-level defects.
    pub reject_invalid_root: bool,
    /// Reject BOMs whose root keys are out of the normative order.
    pub reject_root_order: bool,
}

impl ScanConfig {
    /// A scanner that can use no identifier family at all is misconfigured.
    pub fn validate(&self) -> Result<(), String> {
        if !self.use_cpe && !self.use_purl {
            return Err("at least one of use_cpe/use_purl must be enabled".to_string());
        }
        Ok(())
    }
}

/// Named scanner behavior patterns: one conformant, four degraded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Profile {
    /// Recommended behavior: all identifiers, VEX honored, structure enforced.
    Ideal,
    /// CPE matching disabled — components without a purl go untested.
    PurlOnly,
    /// Only components with an explicit `version` field are tested.
    VersionFieldDependent,
    /// Embedded VEX statements are ignored.
    NoVex,
    /// Structure violations do not cause rejection.
    Lenient,
}

impl Profile {
    pub const ALL: [Profile; 5] = [
        Profile::Ideal,
        Profile::PurlOnly,
        Profile::VersionFieldDependent,
        Profile::NoVex,
        Profile::Lenient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Ideal => "IDEAL",
            Profile::PurlOnly => "PURL_ONLY",
            Profile::VersionFieldDependent => "VERSION_FIELD_DEPENDENT",
            Profile::NoVex => "NO_VEX",
            Profile::Lenient => "LENIENT",
        }
    }

    pub fn parse(name: &str) -> Option<Profile> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }

    /// Each degraded profile differs from IDEAL in exactly one axis.
    pub fn config(self) -> ScanConfig {
        let ideal = ScanConfig {
            use_cpe: true,
            use_purl: true,
            versionless_purl_policy: VersionlessPurlPolicy::Wildcard,
            na_version_policy: NaVersionPolicy::TreatNaVersionAsUnknown,
            reconstruct_cpe_if_none: true,
            require_version_field: false,
            process_vex: true,
            reject_invalid_root: true,
            reject_root_order: true,
        };
        match self {
            Profile::Ideal => ideal,
            Profile::PurlOnly => ScanConfig {
                use_cpe: false,
                ..ideal
            },
            Profile::VersionFieldDependent => ScanConfig {
                require_version_field: true,
                ..ideal
            },
            Profile::NoVex => ScanConfig {
                process_vex: false,
                ..ideal
            },
            Profile::Lenient => ScanConfig {
                reject_invalid_root: false,
                reject_root_order: false,
                ..ideal
            },
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MatchedVia {
    Cpe,
    Purl,
}

impl fmt::Display for MatchedVia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchedVia::Cpe => "CPE",
            MatchedVia::Purl => "PURL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub vuln_id: String,
    pub component_ref: String,
    pub matched_via: MatchedVia,
    pub suppressed_by_vex: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WarningCode {
    NoIdentifier,
    NoVersion,
    CpeUnsupported,
    PurlUnsupported,
    MalformedCpe,
    MalformedPurl,
    VexIgnored,
    VexDanglingRef,
    InvalidBom,
}

impl fmt::Display for WarningCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            WarningCode::NoIdentifier => "NO_IDENTIFIER",
            WarningCode::NoVersion => "NO_VERSION",
            WarningCode::CpeUnsupported => "CPE_UNSUPPORTED",
            WarningCode::PurlUnsupported => "PURL_UNSUPPORTED",
            WarningCode::MalformedCpe => "MALFORMED_CPE",
            WarningCode::MalformedPurl => "MALFORMED_PURL",
            WarningCode::VexIgnored => "VEX_IGNORED",
            WarningCode::VexDanglingRef => "VEX_DANGLING_REF",
            WarningCode::InvalidBom => "INVALID_BOM",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanWarning {
    pub code: WarningCode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_ref: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStats {
    pub components_total: usize,
    pub components_tested: usize,
    pub components_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    /// Active findings only; VEX-suppressed ones live in `suppressed`.
    pub findings: Vec<Finding>,
    pub suppressed: Vec<Finding>,
    pub warnings: Vec<ScanWarning>,
    pub stats: ScanStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
}

/// Why a component could not be tested. Ordered by how specific the message
/// can be; when several apply, the most specific one becomes the single skip
/// warning.
enum SkipCause {
    MalformedCpe(String),
    MalformedPurl(String),
    CpeUnsupported,
    PurlUnsupported,
    VersionlessPurl,
    MissingVersionField,
    NoIdentifier,
}

fn rejection_reason(bom: &Bom, config: &ScanConfig) -> Option<String> {
    if config.reject_invalid_root {
        if let Some(issue) = bom
            .validation_issues
            .iter()
            .find(|i| matches!(i.code, IssueCode::UnknownRootKey | IssueCode::Schema))
        {
            return Some(format!("schema validation failed: {}", issue.detail));
        }
    }
    if config.reject_root_order {
        if let Some(issue) = bom
            .validation_issues
            .iter()
            .find(|i| i.code == IssueCode::RootOrder)
        {
            return Some(format!(
                "root-level elements out of order: {}",
                issue.detail
            ));
        }
    }
    None
}

fn component_label(component: &Component, index: usize) -> String {
    component
        .bom_ref
        .clone()
        .unwrap_or_else(|| format!("/components/{index}"))
}

fn skip_warning(cause: &SkipCause, label: &str) -> ScanWarning {
    let (code, message) = match cause {
        SkipCause::MalformedCpe(err) => (
            WarningCode::MalformedCpe,
            format!("component `{label}` skipped: CPE does not parse ({err})"),
        ),
        SkipCause::MalformedPurl(err) => (
            WarningCode::MalformedPurl,
            format!("component `{label}` skipped: purl does not parse ({err})"),
        ),
        SkipCause::CpeUnsupported => (
            WarningCode::CpeUnsupported,
            format!(
                "component `{label}` skipped: CPE matching is disabled and the component \
                 has no other identifier (component must have a purl)"
            ),
        ),
        SkipCause::PurlUnsupported => (
            WarningCode::PurlUnsupported,
            format!(
                "component `{label}` skipped: purl matching is disabled and the component \
                 has no other identifier"
            ),
        ),
        SkipCause::VersionlessPurl => (
            WarningCode::NoVersion,
            format!(
                "component `{label}` skipped: purl carries no version and versionless \
                 purls are not tested under this configuration"
            ),
        ),
        SkipCause::MissingVersionField => (
            WarningCode::NoVersion,
            format!(
                "component `{label}` skipped: no version field set and this configuration \
                 only tests components with an explicit version"
            ),
        ),
        SkipCause::NoIdentifier => (
            WarningCode::NoIdentifier,
            format!(
                "component `{label}` skipped: no usable component identifier (no CPE, no purl)"
            ),
        ),
    };
    ScanWarning {
        code,
        component_ref: Some(label.to_string()),
        message,
    }
}

/// Scan a parsed BOM against a snapshot. Pure; all degradation is in-band as
/// warnings, and the only hard stop is the configured rejection pathway.
pub fn scan(bom: &Bom, snapshot: &Snapshot, config: &ScanConfig) -> ScanReport {
    if let Some(reason) = rejection_reason(bom, config) {
        return ScanReport {
            findings: Vec::new(),
            suppressed: Vec::new(),
            warnings: vec![ScanWarning {
                code: WarningCode::InvalidBom,
                component_ref: None,
                message: format!("input BOM rejected: {reason}"),
            }],
            stats: ScanStats {
                components_total: bom.components.len(),
                components_tested: 0,
                components_skipped: 0,
            },
            rejected: Some(reason),
        };
    }

    let mut warnings: Vec<ScanWarning> = Vec::new();
    let mut matches: BTreeMap<(String, String), MatchedVia> = BTreeMap::new();
    let mut skipped = 0usize;

    for (index, component) in bom.components.iter().enumerate() {
        let label = component_label(component, index);
        let mut causes: Vec<SkipCause> = Vec::new();
        let mut cpe_ids: Vec<Wfn> = Vec::new();
        let mut purl_ids: Vec<Purl> = Vec::new();
        let mut notes: Vec<ScanWarning> = Vec::new();

        if config.require_version_field && component.version_field.is_none() {
            causes.push(SkipCause::MissingVersionField);
        } else {
            if let Some(raw) = &component.cpe {
                if !config.use_cpe {
                    causes.push(SkipCause::CpeUnsupported);
                    notes.push(ScanWarning {
                        code: WarningCode::CpeUnsupported,
                        component_ref: Some(label.clone()),
                        message: format!(
                            "component `{label}`: CPE identifier ignored (CPE matching disabled)"
                        ),
                    });
                } else {
                    match parse_cpe(raw) {
                        Ok(wfn) => cpe_ids.push(wfn),
                        Err(e) => causes.push(SkipCause::MalformedCpe(e.to_string())),
                    }
                }
            }
            if let Some(raw) = &component.purl {
                if !config.use_purl {
                    causes.push(SkipCause::PurlUnsupported);
                    notes.push(ScanWarning {
                        code: WarningCode::PurlUnsupported,
                        component_ref: Some(label.clone()),
                        message: format!(
                            "component `{label}`: purl identifier ignored (purl matching disabled)"
                        ),
                    });
                } else {
                    match parse_purl(raw) {
                        Ok(mut purl) => {
                            // Version-field-dependent tools trust the version
                            // field over whatever the purl embeds.
                            if config.require_version_field {
                                purl.version = component.version_field.clone();
                            }
                            if purl.version.is_none()
                                && config.versionless_purl_policy == VersionlessPurlPolicy::Skip
                            {
                                causes.push(SkipCause::VersionlessPurl);
                            } else {
                                purl_ids.push(purl);
                            }
                        }
                        Err(e) => causes.push(SkipCause::MalformedPurl(e.to_string())),
                    }
                }
            }
            if component.cpe.is_none()
                && component.purl.is_none()
                && config.use_cpe
                && config.reconstruct_cpe_if_none
            {
                cpe_ids.push(Wfn::application(
                    component.publisher.as_deref(),
                    &component.name,
                    component.effective_version().as_deref(),
                ));
            }
        }

        if cpe_ids.is_empty() && purl_ids.is_empty() {
            if causes.is_empty() {
                causes.push(SkipCause::NoIdentifier);
            }
            // One warning per skipped component: the most specific cause.
            causes.sort_by_key(|c| match c {
                SkipCause::MalformedCpe(_) => 0,
                SkipCause::MalformedPurl(_) => 1,
                SkipCause::CpeUnsupported => 2,
                SkipCause::PurlUnsupported => 3,
                SkipCause::VersionlessPurl => 4,
                SkipCause::MissingVersionField => 5,
                SkipCause::NoIdentifier => 6,
            });
            warnings.push(skip_warning(&causes[0], &label));
            skipped += 1;
            continue;
        }

        // The component is tested; identifier-level degradations surface as
        // informational warnings so nothing disappears silently.
        warnings.extend(notes);
        for cause in &causes {
            match cause {
                SkipCause::MalformedCpe(_) | SkipCause::MalformedPurl(_) => {
                    let (code, what, err) = match cause {
                        SkipCause::MalformedCpe(e) => (WarningCode::MalformedCpe, "CPE", e),
                        _ => {
                            let SkipCause::MalformedPurl(e) = cause else {
                                unreachable!()
                            };
                            (WarningCode::MalformedPurl, "purl", e)
                        }
                    };
                    warnings.push(ScanWarning {
                        code,
                        component_ref: Some(label.clone()),
                        message: format!("component `{label}`: {what} does not parse ({err})"),
                    });
                }
                SkipCause::VersionlessPurl => warnings.push(ScanWarning {
                    code: WarningCode::NoVersion,
                    component_ref: Some(label.clone()),
                    message: format!(
                        "component `{label}`: versionless purl not tested; other identifiers were"
                    ),
                }),
                _ => {}
            }
        }

        for wfn in &cpe_ids {
            for (record, _) in snapshot.lookup_by_cpe(wfn, config.na_version_policy) {
                matches
                    .entry((record.id.clone(), label.clone()))
                    .or_insert(MatchedVia::Cpe);
            }
        }
        for purl in &purl_ids {
            for (record, _) in snapshot.lookup_by_purl(purl, config.versionless_purl_policy) {
                matches.insert((record.id.clone(), label.clone()), MatchedVia::Purl);
            }
        }
    }

    let mut findings: Vec<Finding> = matches
        .into_iter()
        .map(|((vuln_id, component_ref), matched_via)| Finding {
            vuln_id,
            component_ref,
            matched_via,
            suppressed_by_vex: false,
        })
        .collect();

    let mut suppressed: Vec<Finding> = Vec::new();
    if config.process_vex {
        let index = vex_suppressions(bom);
        let (kept, moved): (Vec<Finding>, Vec<Finding>) = findings.into_iter().partition(|f| {
            index
                .statuses
                .get(&(f.component_ref.clone(), f.vuln_id.clone()))
                != Some(&VexStatus::Suppressed)
        });
        findings = kept;
        suppressed = moved
            .into_iter()
            .map(|mut f| {
                f.suppressed_by_vex = true;
                f
            })
            .collect();
        for (dangling_ref, vuln_id) in &index.dangling {
            warnings.push(ScanWarning {
                code: WarningCode::VexDanglingRef,
                component_ref: Some(dangling_ref.clone()),
                message: format!(
                    "VEX statement for {vuln_id} references unknown component `{dangling_ref}`"
                ),
            });
        }
    } else if !bom.vulnerabilities.is_empty() {
        warnings.push(ScanWarning {
            code: WarningCode::VexIgnored,
            component_ref: None,
            message: format!(
                "BOM carries {} VEX statement(s) but VEX processing is disabled; findings are \
                 reported as if no VEX were attached",
                bom.vulnerabilities.len()
            ),
        });
    }

    findings.sort_by(|a, b| (&a.vuln_id, &a.component_ref).cmp(&(&b.vuln_id, &b.component_ref)));
    suppressed.sort_by(|a, b| (&a.vuln_id, &a.component_ref).cmp(&(&b.vuln_id, &b.component_ref)));

    ScanReport {
        findings,
        suppressed,
        warnings,
        stats: ScanStats {
            components_total: bom.components.len(),
            components_tested: bom.components.len() - skipped,
            components_skipped: skipped,
        },
        rejected: None,
    }
}

/// Deterministic JSON serialization of a report.
pub fn serialize_report(report: &ScanReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// Human-readable rendering: what a CLI scanner would print. Suppressed
/// findings appear as a count only — their identifiers stay out of the active
/// output on purpose, mirroring a scanner that honors VEX.
pub fn render_report_text(report: &ScanReport) -> String {
    let mut out = String::new();
    if let Some(reason) = &report.rejected {
        out.push_str(&format!("REJECTED: {reason}\n"));
    }
    for finding in &report.findings {
        out.push_str(&format!(
            "FINDING: {} component={} via={}\n",
            finding.vuln_id, finding.component_ref, finding.matched_via
        ));
    }
    if !report.suppressed.is_empty() {
        out.push_str(&format!(
            "SUPPRESSED: {} finding(s) withheld by VEX statements (details in the JSON report)\n",
            report.suppressed.len()
        ));
    }
    for warning in &report.warnings {
        out.push_str(&format!("WARN: {} {}\n", warning.code, warning.message));
    }
    out.push_str(&format!(
        "STATS: components total={} tested={} skipped={}\n",
        report.stats.components_total,
        report.stats.components_tested,
        report.stats.components_skipped
    ));
    out
}
