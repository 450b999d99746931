//! Conformance-testing toolkit for SBOM-based vulnerability scanners.
//!
//! The crate is organised as a pipeline:
//!
//! * [`identifiers`] — CPE 2.3 and package-url parsing, canonicalisation and matching.
//! * [`sbom`] — lenient CycloneDX JSON ingestion with root-order validation and VEX extraction.
//! * [`vulndb`] — a content-addressed vulnerability snapshot plus OSV ingestion.
//! * [`refscanner`] — a reference scanner with deliberately flawed configuration profiles.
//! * [`testlib`] — the built-in fixture library: 16 SBOM cases with machine-readable expectations.
//! * [`harness`] — runs built-in profiles or external tools over emitted cases and records output.
//! * [`evaluator`] — grades run records against expectations (pass / warning / silent failure).
//! * [`lint`] — identifier-hygiene statistics over arbitrary CycloneDX corpora.

pub mod evaluator;
pub mod harness;
pub mod identifiers;
pub mod lint;
pub mod refscanner;
pub mod sbom;
pub mod testlib;
pub mod vulndb;
