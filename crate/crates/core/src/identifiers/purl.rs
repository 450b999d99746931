//! Package URLs: tolerant parsing, canonical rendering and coordinate matching.
//!
//! The parser accepts the canonical `pkg:` scheme as well as the `pkg:/` and
//! `pkg://` variants seen in the wild, in any case; the canonical form always
//! begins with a bare `pkg:`. Types are lowercased, namespaces are lowercased,
//! names keep their case for display (matching lowercases them), versions are
//! opaque strings, and qualifiers are a key-sorted map whose empty values are
//! dropped. The version separator is an unencoded `@` after the final path
//! separator, which also tolerates npm-style `@scope` namespaces that were not
//! percent-encoded.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Purl {
    /// Package type (`npm`, `maven`, …), always lowercase.
    pub ptype: String,
    /// Optional namespace (npm scope, maven groupId, …), decoded and lowercased.
    pub namespace: Option<String>,
    /// Package name, decoded, case preserved.
    pub name: String,
    /// Version as given, decoded, no semantics attached.
    pub version: Option<String>,
    /// Qualifiers with lowercased keys; pairs with empty values are dropped.
    pub qualifiers: BTreeMap<String, String>,
    /// Extra path inside the package, normalised (`.`/`..`/empty segments dropped).
    pub subpath: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedPurl {
    #[error("purl must use the `pkg:` scheme: `{0}`")]
    Scheme(String),
    #[error("purl has no package type: `{0}`")]
    MissingType(String),
    #[error("invalid package type `{0}`")]
    BadType(String),
    #[error("purl has no package name: `{0}`")]
    MissingName(String),
    #[error("invalid percent-encoding in `{0}`")]
    BadPercentEncoding(String),
}

fn percent_decode(raw: &str) -> Result<String, MalformedPurl> {
    let bytes = raw.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes
                .get(i + 1..i + 3)
                .and_then(|h| std::str::from_utf8(h).ok())
                .and_then(|h| u8::from_str_radix(h, 16).ok())
                .ok_or_else(|| MalformedPurl::BadPercentEncoding(raw.to_string()))?;
            out.push(hex);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| MalformedPurl::BadPercentEncoding(raw.to_string()))
}

fn percent_encode(raw: &str, extra_allowed: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for &b in raw.as_bytes() {
        let c = b as char;
        if c.is_ascii_alphanumeric() || "-._~".contains(c) || extra_allowed.contains(c) {
            out.push(c);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn enc_segment(s: &str) -> String {
    percent_encode(s, "+")
}

fn enc_version(s: &str) -> String {
    percent_encode(s, "+:")
}

fn enc_qualifier_value(s: &str) -> String {
    percent_encode(s, "+:/")
}

fn valid_type(t: &str) -> bool {
    let mut chars = t.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '+' | '-'))
}

/// Parse a package URL, accepting non-canonical `pkg:/` and `pkg://` prefixes.
pub fn parse_purl(input: &str) -> Result<Purl, MalformedPurl> {
    let s = input.trim();
    let (scheme, rest) = s
        .split_once(':')
        .ok_or_else(|| MalformedPurl::Scheme(s.to_string()))?;
    if !scheme.eq_ignore_ascii_case("pkg") {
        return Err(MalformedPurl::Scheme(s.to_string()));
    }
    let rest = rest.trim_start_matches('/');
    if rest.is_empty() {
        return Err(MalformedPurl::MissingType(s.to_string()));
    }

    let (rest, subpath_raw) = match rest.rsplit_once('#') {
        Some((a, b)) => (a, Some(b)),
        None => (rest, None),
    };
    let (rest, qualifiers_raw) = match rest.rsplit_once('?') {
        Some((a, b)) => (a, Some(b)),
        None => (rest, None),
    };

    let (type_raw, path) = rest
        .split_once('/')
        .ok_or_else(|| MalformedPurl::MissingName(s.to_string()))?;
    if type_raw.is_empty() {
        return Err(MalformedPurl::MissingType(s.to_string()));
    }
    if !valid_type(type_raw) {
        return Err(MalformedPurl::BadType(type_raw.to_string()));
    }
    let ptype = type_raw.to_ascii_lowercase();

    // The version separator is an `@` that occurs after the last `/`; an `@`
    // earlier in the path belongs to an unencoded namespace segment.
    let last_slash = path.rfind('/');
    let at = path
        .rfind('@')
        .filter(|&pos| last_slash.is_none_or(|sl| pos > sl));
    let (coords, version_raw) = match at {
        Some(pos) => (&path[..pos], Some(&path[pos + 1..])),
        None => (path, None),
    };

    let mut segs: Vec<&str> = coords.split('/').filter(|seg| !seg.is_empty()).collect();
    let name_raw = segs
        .pop()
        .ok_or_else(|| MalformedPurl::MissingName(s.to_string()))?;
    let name = percent_decode(name_raw)?;
    if name.is_empty() {
        return Err(MalformedPurl::MissingName(s.to_string()));
    }
    let namespace = if segs.is_empty() {
        None
    } else {
        let decoded: Result<Vec<String>, _> = segs.iter().map(|seg| percent_decode(seg)).collect();
        Some(decoded?.join("/").to_lowercase())
    };

    let version = match version_raw {
        Some("") | None => None,
        Some(v) => Some(percent_decode(v)?),
    };

    let mut qualifiers = BTreeMap::new();
    if let Some(q) = qualifiers_raw {
        for pair in q.split('&').filter(|p| !p.is_empty()) {
            let (key, value) = match pair.split_once('=') {
                Some(kv) => kv,
                None => continue,
            };
            let value = percent_decode(value)?;
            if key.is_empty() || value.is_empty() {
                continue;
            }
            qualifiers.insert(key.to_lowercase(), value);
        }
    }

    let subpath = subpath_raw.and_then(|raw| {
        let segs: Vec<String> = raw
            .split('/')
            .filter(|seg| !seg.is_empty() && *seg != "." && *seg != "..")
            .filter_map(|seg| percent_decode(seg).ok())
            .collect();
        if segs.is_empty() {
            None
        } else {
            Some(segs.join("/"))
        }
    });

    Ok(Purl {
        ptype,
        namespace,
        name,
        version,
        qualifiers,
        subpath,
    })
}

/// Render the canonical string form. Never emits the `pkg://` slash variants.
pub fn canonicalize_purl(purl: &Purl) -> String {
    let mut out = String::from("pkg:");
    out.push_str(&purl.ptype);
    if let Some(ns) = &purl.namespace {
        for seg in ns.split('/') {
            out.push('/');
            out.push_str(&enc_segment(seg));
        }
    }
    out.push('/');
    out.push_str(&enc_segment(&purl.name));
    if let Some(v) = &purl.version {
        out.push('@');
        out.push_str(&enc_version(v));
    }
    if !purl.qualifiers.is_empty() {
        out.push('?');
        let pairs: Vec<String> = purl
            .qualifiers
            .iter()
            .map(|(k, v)| format!("{k}={}", enc_qualifier_value(v)))
            .collect();
        out.push_str(&pairs.join("&"));
    }
    if let Some(sp) = &purl.subpath {
        out.push('#');
        let segs: Vec<String> = sp.split('/').map(enc_segment).collect();
        out.push_str(&segs.join("/"));
    }
    out
}

/// Version-free coordinate equality: type, namespace and name identify the
/// package. Names compare case-insensitively; qualifiers, subpath and any
/// version on either side are ignored.
pub fn purl_coordinates_match(component: &Purl, criterion: &Purl) -> bool {
    component.ptype == criterion.ptype
        && component.namespace == criterion.namespace
        && component.name.to_lowercase() == criterion.name.to_lowercase()
}

impl fmt::Display for Purl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonicalize_purl(self))
    }
}

impl FromStr for Purl {
    type Err = MalformedPurl;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_purl(s)
    }
}

impl Serialize for Purl {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&canonicalize_purl(self))
    }
}

impl<'de> Deserialize<'de> for Purl {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_purl(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// A second, deliberately independent canonicalizer used as an oracle: it
    /// works purely on strings and was written against the format rules before
    /// the parser existed. Returns `None` for inputs it considers malformed.
    fn naive_canonical(input: &str) -> Option<String> {
        fn dec(s: &str) -> Option<String> {
            let mut out = Vec::new();
            let mut it = s.bytes();
            while let Some(b) = it.next() {
                if b == b'%' {
                    let hi = it.next()?;
                    let lo = it.next()?;
                    let pair = [hi, lo];
                    let hex = std::str::from_utf8(&pair).ok()?;
                    out.push(u8::from_str_radix(hex, 16).ok()?);
                } else {
                    out.push(b);
                }
            }
            String::from_utf8(out).ok()
        }
        fn enc(s: &str, extra: &str) -> String {
            s.bytes()
                .map(|b| {
                    let c = b as char;
                    if c.is_ascii_alphanumeric() || "-._~".contains(c) || extra.contains(c) {
                        c.to_string()
                    } else {
                        format!("%{b:02X}")
                    }
                })
                .collect()
        }

        let trimmed = input.trim();
        let lower = trimmed.to_ascii_lowercase();
        if !lower.starts_with("pkg:") {
            return None;
        }
        let mut body = &trimmed[4..];
        while body.starts_with('/') {
            body = &body[1..];
        }

        let (body, fragment) = match body.rfind('#') {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let (body, query) = match body.rfind('?') {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };

        let slash = body.find('/')?;
        let (ptype, path) = (&body[..slash], &body[slash + 1..]);
        if ptype.is_empty() || !ptype.chars().next()?.is_ascii_alphabetic() {
            return None;
        }
        if !ptype
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || ".+-".contains(c))
        {
            return None;
        }

        let last_slash = path.rfind('/');
        let version_at = path
            .rfind('@')
            .filter(|&i| last_slash.is_none_or(|sl| i > sl));
        let (coords, version) = match version_at {
            Some(i) => (&path[..i], Some(&path[i + 1..])),
            None => (path, None),
        };

        let mut parts: Vec<String> = coords
            .split('/')
            .filter(|p| !p.is_empty())
            .map(dec)
            .collect::<Option<Vec<_>>>()?;
        if parts.is_empty() {
            return None;
        }
        let name = parts.pop()?;
        if name.is_empty() {
            return None;
        }

        let mut canonical = format!("pkg:{}", ptype.to_ascii_lowercase());
        for part in &parts {
            canonical.push('/');
            canonical.push_str(&enc(&part.to_lowercase(), "+"));
        }
        canonical.push('/');
        canonical.push_str(&enc(&name, "+"));
        if let Some(v) = version {
            if !v.is_empty() {
                canonical.push('@');
                canonical.push_str(&enc(&dec(v)?, "+:"));
            }
        }
        if let Some(q) = query {
            let mut pairs: Vec<(String, String)> = Vec::new();
            for item in q.split('&') {
                if let Some(eq) = item.find('=') {
                    let key = item[..eq].to_lowercase();
                    let value = dec(&item[eq + 1..])?;
                    if !key.is_empty() && !value.is_empty() {
                        pairs.retain(|(k, _)| *k != key);
                        pairs.push((key, value));
                    }
                }
            }
            pairs.sort();
            if !pairs.is_empty() {
                canonical.push('?');
                canonical.push_str(
                    &pairs
                        .iter()
                        .map(|(k, v)| format!("{k}={}", enc(v, "+:/")))
                        .collect::<Vec<_>>()
                        .join("&"),
                );
            }
        }
        if let Some(f) = fragment {
            let segs: Vec<String> = f
                .split('/')
                .filter(|s| !s.is_empty() && *s != "." && *s != "..")
                .map(dec)
                .collect::<Option<Vec<_>>>()?;
            if !segs.is_empty() {
                canonical.push('#');
                canonical.push_str(
                    &segs
                        .iter()
                        .map(|s| enc(s, "+"))
                        .collect::<Vec<_>>()
                        .join("/"),
                );
            }
        }
        Some(canonical)
    }

    fn corpus() -> Vec<String> {
        let raw = include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/tests/data/purl_corpus.txt"
        ));
        raw.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect()
    }

    #[test]
    fn canonicalizer_agrees_with_independent_oracle_on_corpus() {
        let corpus = corpus();
        assert!(corpus.len() >= 50, "corpus must hold at least 50 purls");
        for line in &corpus {
            let parsed = parse_purl(line).unwrap_or_else(|e| panic!("{line}: {e}"));
            let canonical = canonicalize_purl(&parsed);
            let oracle = naive_canonical(line).unwrap_or_else(|| panic!("oracle rejected {line}"));
            assert_eq!(canonical, oracle, "canonical form of {line}");
        }
    }

    #[test]
    fn corpus_round_trips() {
        for line in corpus() {
            let parsed = parse_purl(&line).unwrap();
            let canonical = canonicalize_purl(&parsed);
            assert_eq!(
                parse_purl(&canonical).unwrap(),
                parsed,
                "round trip of {line}"
            );
            assert!(canonical.starts_with("pkg:") && !canonical.starts_with("pkg:/"));
        }
    }

    /// Hand-written anchors so the two canonicalizers cannot drift in unison.
    #[test]
    fn canonical_anchors() {
        let anchors = [
            ("PKG:NPM/dicer", "pkg:npm/dicer"),
            ("pkg://npm/dicer@0.3.0", "pkg:npm/dicer@0.3.0"),
            (
                "pkg:/maven/org.apache.lucene/lucene-replicator@8.11.4",
                "pkg:maven/org.apache.lucene/lucene-replicator@8.11.4",
            ),
            ("pkg:npm/@scope/pkg@1.0.0", "pkg:npm/%40scope/pkg@1.0.0"),
            (
                "pkg:npm/dicer@0.3.0?b=2&a=1&c=",
                "pkg:npm/dicer@0.3.0?a=1&b=2",
            ),
            (
                "pkg:docker/cassandra@sha256%3A244fd47e07d1004f0aed9c",
                "pkg:docker/cassandra@sha256:244fd47e07d1004f0aed9c",
            ),
            (
                "pkg:npm/dicer@0.3.0#/src/./lib/..//deep/",
                "pkg:npm/dicer@0.3.0#src/lib/deep",
            ),
            ("pkg:pypi/Django@1.11.1", "pkg:pypi/Django@1.11.1"),
            (
                "pkg:Maven/Org.Apache.Lucene/lucene-core@9.0.0",
                "pkg:maven/org.apache.lucene/lucene-core@9.0.0",
            ),
            ("pkg:generic/100%25@1.0", "pkg:generic/100%25@1.0"),
        ];
        for (input, expected) in anchors {
            let parsed = parse_purl(input).unwrap();
            assert_eq!(canonicalize_purl(&parsed), expected, "canonical of {input}");
        }
    }

    #[test]
    fn prefix_variants_parse_identically() {
        for line in corpus() {
            let canonical = canonicalize_purl(&parse_purl(&line).unwrap());
            let body = &canonical[4..];
            let variants = [
                canonical.clone(),
                format!("pkg:/{body}"),
                format!("pkg://{body}"),
            ];
            let parsed: Vec<Purl> = variants.iter().map(|v| parse_purl(v).unwrap()).collect();
            assert_eq!(parsed[0], parsed[1], "pkg:/ variant of {line}");
            assert_eq!(parsed[0], parsed[2], "pkg:// variant of {line}");
        }
    }

    #[test]
    fn coordinates_match_ignores_version_qualifiers_and_case() {
        let a = parse_purl("pkg:npm/Dicer@0.3.0?os=linux#src").unwrap();
        let b = parse_purl("pkg:npm/dicer").unwrap();
        assert!(purl_coordinates_match(&a, &b));
        assert!(purl_coordinates_match(&b, &a));

        let c = parse_purl("pkg:maven/org.apache.lucene/lucene-replicator@8.11.4").unwrap();
        let d = parse_purl("pkg:maven/org.apache.lucene/lucene-replicator").unwrap();
        let e = parse_purl("pkg:maven/org.apache.solr/lucene-replicator").unwrap();
        assert!(purl_coordinates_match(&c, &d));
        assert!(!purl_coordinates_match(&c, &e));

        let f = parse_purl("pkg:npm/dicer").unwrap();
        let g = parse_purl("pkg:pypi/dicer").unwrap();
        assert!(!purl_coordinates_match(&f, &g));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            parse_purl("npm/dicer"),
            Err(MalformedPurl::Scheme(_))
        ));
        assert!(matches!(
            parse_purl("pkg:npm"),
            Err(MalformedPurl::MissingName(_))
        ));
        assert!(matches!(
            parse_purl("pkg:npm/"),
            Err(MalformedPurl::MissingName(_))
        ));
        assert!(matches!(
            parse_purl("pkg:"),
            Err(MalformedPurl::MissingType(_))
        ));
        assert!(matches!(
            parse_purl("pkg:1bad/name@1"),
            Err(MalformedPurl::BadType(_))
        ));
        assert!(matches!(
            parse_purl("pkg:npm/di%2zcer"),
            Err(MalformedPurl::BadPercentEncoding(_))
        ));
    }

    #[test]
    fn versionless_purl_has_no_version() {
        let p = parse_purl("pkg:npm/dicer").unwrap();
        assert_eq!(p.version, None);
        let q = parse_purl("pkg:npm/dicer@").unwrap();
        assert_eq!(q.version, None);
    }

    fn coord_strategy() -> impl Strategy<Value = (String, Option<String>, String, Option<String>)> {
        let ptype = proptest::string::string_regex("[a-z][a-z0-9]{0,7}").unwrap();
        let name = proptest::string::string_regex("[a-z][a-z0-9]{0,7}").unwrap();
        let ns =
            proptest::option::of(proptest::string::string_regex("[a-z][a-z0-9.]{0,7}").unwrap());
        let version = proptest::option::of(
            proptest::string::string_regex("[0-9]{1,2}(\\.[0-9]{1,2}){0,2}").unwrap(),
        );
        (ptype, ns, name, version)
    }

    proptest! {
        #[test]
        fn generated_coordinates_roundtrip((t, ns, name, version) in coord_strategy()) {
            let mut s = format!("pkg:{t}");
            if let Some(ns) = &ns { s.push('/'); s.push_str(ns); }
            s.push('/');
            s.push_str(&name);
            if let Some(v) = &version { s.push('@'); s.push_str(v); }
            let parsed = parse_purl(&s).unwrap();
            prop_assert_eq!(parse_purl(&canonicalize_purl(&parsed)).unwrap(), parsed.clone());

            let slashed = format!("pkg://{}", &s[4..]);
            prop_assert_eq!(parse_purl(&slashed).unwrap(), parsed);
        }
    }
}
