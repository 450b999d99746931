//! CPE 2.3 formatted strings: parsing into well-formed names and set-relation matching.
//!
//! A formatted string is `cpe:2.3:` followed by eleven colon-separated attribute
//! tokens (thirteen fields in total). Each token is either the logical value ANY
//! (`*`, or an empty field as found in the wild), the logical value NA (`-`), or a
//! literal. Literals keep their escape sequences (`\.`, `\*`, …) and may carry
//! glob-style wildcards, restricted to the start and/or end of the value: a single
//! `*` matching any run of characters, or one or more `?` each matching exactly
//! one character.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Attribute names in formatted-string order.
pub const ATTRIBUTE_NAMES: [&str; 11] = [
    "part",
    "vendor",
    "product",
    "version",
    "update",
    "edition",
    "language",
    "sw_edition",
    "target_sw",
    "target_hw",
    "other",
];

const PREFIX: &str = "cpe:2.3:";

/// One attribute of a well-formed CPE name.
///
/// `Literal` stores the canonical token with escape sequences intact, so a value
/// such as `lucene\-replicator` round-trips exactly. Comparison and wildcard
/// evaluation work on the unescaped character sequence instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CpeAttribute {
    Any,
    Na,
    Literal(String),
}

impl CpeAttribute {
    /// Build a literal attribute from a plain (unescaped) string, escaping
    /// whatever would otherwise parse as syntax.
    pub fn literal(plain: &str) -> CpeAttribute {
        let mut out = String::with_capacity(plain.len());
        for c in plain.chars() {
            if matches!(c, '\\' | '*' | '?' | ':') {
                out.push('\\');
            }
            out.push(c);
        }
        if out.is_empty() {
            return CpeAttribute::Any;
        }
        if out == "-" {
            out = "\\-".to_string();
        }
        CpeAttribute::Literal(out)
    }

    /// The concrete version string carried by this attribute, if it is a plain
    /// literal without wildcards. Used when deciding whether a version range
    /// applies to a component.
    pub fn plain_literal(&self) -> Option<String> {
        match self {
            CpeAttribute::Literal(tok) => {
                let segs = segments(tok).ok()?;
                if segs.iter().any(|s| matches!(s, Seg::Star | Seg::Quest)) {
                    None
                } else {
                    Some(segs.iter().map(|s| s.ch()).collect())
                }
            }
            _ => None,
        }
    }

    fn token(&self) -> String {
        match self {
            CpeAttribute::Any => "*".to_string(),
            CpeAttribute::Na => "-".to_string(),
            CpeAttribute::Literal(tok) => tok.clone(),
        }
    }
}

/// Set relation between a source and a target attribute (or full name).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchRelation {
    Equal,
    Subset,
    Superset,
    Disjoint,
}

/// How a name-level match treats an NA component version.
///
/// Strict attribute comparison makes NA vs a concrete criterion version
/// DISJOINT, which would hide vulnerabilities from components that declare
/// their version as `-`. The default treats such a version as unknown (ANY);
/// `Strict` keeps the letter of the relation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NaVersionPolicy {
    TreatNaVersionAsUnknown,
    Strict,
}

/// A well-formed CPE name: the eleven attributes of a 2.3 binding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wfn {
    pub part: CpeAttribute,
    pub vendor: CpeAttribute,
    pub product: CpeAttribute,
    pub version: CpeAttribute,
    pub update: CpeAttribute,
    pub edition: CpeAttribute,
    pub language: CpeAttribute,
    pub sw_edition: CpeAttribute,
    pub target_sw: CpeAttribute,
    pub target_hw: CpeAttribute,
    pub other: CpeAttribute,
}

impl Wfn {
    /// A name with every attribute ANY — matches anything.
    pub fn any() -> Wfn {
        Wfn {
            part: CpeAttribute::Any,
            vendor: CpeAttribute::Any,
            product: CpeAttribute::Any,
            version: CpeAttribute::Any,
            update: CpeAttribute::Any,
            edition: CpeAttribute::Any,
            language: CpeAttribute::Any,
            sw_edition: CpeAttribute::Any,
            target_sw: CpeAttribute::Any,
            target_hw: CpeAttribute::Any,
            other: CpeAttribute::Any,
        }
    }

    /// Build an application name (`part=a`) from plain vendor/product/version
    /// strings, the shape used when reconstructing an identifier from component
    /// metadata.
    pub fn application(vendor: Option<&str>, product: &str, version: Option<&str>) -> Wfn {
        Wfn {
            part: CpeAttribute::Literal("a".to_string()),
            vendor: vendor
                .map(CpeAttribute::literal)
                .unwrap_or(CpeAttribute::Any),
            product: CpeAttribute::literal(product),
            version: version
                .map(CpeAttribute::literal)
                .unwrap_or(CpeAttribute::Any),
            ..Wfn::any()
        }
    }

    pub fn attributes(&self) -> [&CpeAttribute; 11] {
        [
            &self.part,
            &self.vendor,
            &self.product,
            &self.version,
            &self.update,
            &self.edition,
            &self.language,
            &self.sw_edition,
            &self.target_sw,
            &self.target_hw,
            &self.other,
        ]
    }
}

impl fmt::Display for Wfn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_cpe(self))
    }
}

impl FromStr for Wfn {
    type Err = MalformedCpe;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_cpe(s)
    }
}

impl Serialize for Wfn {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_cpe(self))
    }
}

impl<'de> Deserialize<'de> for Wfn {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_cpe(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedCpe {
    #[error("CPE string must begin with `cpe:2.3:`: `{0}`")]
    Prefix(String),
    #[error("expected 13 colon-separated fields, found {0}")]
    FieldCount(usize),
    #[error("unterminated escape sequence in `{0}`")]
    DanglingEscape(String),
    #[error("wildcards are only permitted at the start or end of a value: `{0}`")]
    WildcardPlacement(String),
    #[error("part must be `a`, `o` or `h`, got `{0}`")]
    BadPart(String),
}

/// A token split into unescaped characters and wildcard metacharacters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Seg {
    Star,
    Quest,
    Ch(char),
}

impl Seg {
    fn ch(&self) -> char {
        match self {
            Seg::Star => '*',
            Seg::Quest => '?',
            Seg::Ch(c) => *c,
        }
    }
    fn is_wild(&self) -> bool {
        matches!(self, Seg::Star | Seg::Quest)
    }
}

fn segments(token: &str) -> Result<Vec<Seg>, MalformedCpe> {
    let mut segs = Vec::with_capacity(token.len());
    let mut chars = token.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some(esc) => segs.push(Seg::Ch(esc)),
                None => return Err(MalformedCpe::DanglingEscape(token.to_string())),
            },
            '*' => segs.push(Seg::Star),
            '?' => segs.push(Seg::Quest),
            other => segs.push(Seg::Ch(other)),
        }
    }
    Ok(segs)
}

/// Enforce the permitted wildcard shape: an optional prefix (one `*` or a run of
/// `?`), a non-empty wildcard-free body, and an optional suffix of the same form.
fn check_wildcard_placement(token: &str, segs: &[Seg]) -> Result<(), MalformedCpe> {
    let err = || MalformedCpe::WildcardPlacement(token.to_string());
    let mut i = 0;
    if segs.get(i) == Some(&Seg::Star) {
        i += 1;
    } else {
        while segs.get(i) == Some(&Seg::Quest) {
            i += 1;
        }
    }
    let body_start = i;
    while i < segs.len() && !segs[i].is_wild() {
        i += 1;
    }
    if i == body_start {
        return Err(err());
    }
    if i < segs.len() {
        if segs[i] == Seg::Star {
            i += 1;
        } else {
            while i < segs.len() && segs[i] == Seg::Quest {
                i += 1;
            }
        }
    }
    if i != segs.len() {
        return Err(err());
    }
    Ok(())
}

/// Parse a single attribute token: `*` or an empty field mean ANY, `-` means NA,
/// anything else is a literal whose wildcard placement gets validated.
pub fn parse_attribute(token: &str) -> Result<CpeAttribute, MalformedCpe> {
    match token {
        "" | "*" => Ok(CpeAttribute::Any),
        "-" => Ok(CpeAttribute::Na),
        _ => {
            let segs = segments(token)?;
            check_wildcard_placement(token, &segs)?;
            Ok(CpeAttribute::Literal(token.to_string()))
        }
    }
}

/// Split on colons that are not preceded by a backslash.
pub(crate) fn split_fields(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' => escaped = true,
            ':' => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parse a CPE 2.3 formatted string into a well-formed name.
pub fn parse_cpe(s: &str) -> Result<Wfn, MalformedCpe> {
    let rest = s
        .strip_prefix(PREFIX)
        .ok_or_else(|| MalformedCpe::Prefix(s.to_string()))?;
    let fields = split_fields(rest);
    if fields.len() != 11 {
        return Err(MalformedCpe::FieldCount(fields.len() + 2));
    }
    let mut attrs = Vec::with_capacity(11);
    for field in &fields {
        attrs.push(parse_attribute(field)?);
    }
    if let CpeAttribute::Literal(tok) = &attrs[0] {
        if !matches!(tok.as_str(), "a" | "o" | "h") {
            return Err(MalformedCpe::BadPart(tok.clone()));
        }
    }
    let mut it = attrs.into_iter();
    Ok(Wfn {
        part: it.next().unwrap(),
        vendor: it.next().unwrap(),
        product: it.next().unwrap(),
        version: it.next().unwrap(),
        update: it.next().unwrap(),
        edition: it.next().unwrap(),
        language: it.next().unwrap(),
        sw_edition: it.next().unwrap(),
        target_sw: it.next().unwrap(),
        target_hw: it.next().unwrap(),
        other: it.next().unwrap(),
    })
}

/// Render a well-formed name back to its canonical formatted string. Blank ANY
/// fields come out as `*`; everything else round-trips byte for byte.
pub fn format_cpe(wfn: &Wfn) -> String {
    let tokens: Vec<String> = wfn.attributes().iter().map(|a| a.token()).collect();
    format!("{PREFIX}{}", tokens.join(":"))
}

fn lower_chars(segs: &[Seg]) -> Vec<char> {
    segs.iter().map(|s| s.ch().to_ascii_lowercase()).collect()
}

/// Case-insensitive equality that keeps wildcards distinct from the same
/// characters in escaped (literal) form: `1\*` and `1*` are different tokens.
fn seg_eq_fold(a: &[Seg], b: &[Seg]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x, y) {
            (Seg::Ch(c), Seg::Ch(d)) => c.eq_ignore_ascii_case(d),
            _ => x == y,
        })
}

fn glob_match(pattern: &[Seg], target: &[char]) -> bool {
    fn rec(pat: &[Seg], p: usize, txt: &[char], t: usize) -> bool {
        if p == pat.len() {
            return t == txt.len();
        }
        match pat[p] {
            Seg::Star => (t..=txt.len()).any(|k| rec(pat, p + 1, txt, k)),
            Seg::Quest => t < txt.len() && rec(pat, p + 1, txt, t + 1),
            Seg::Ch(c) => {
                t < txt.len() && txt[t] == c.to_ascii_lowercase() && rec(pat, p + 1, txt, t + 1)
            }
        }
    }
    let pattern: Vec<Seg> = pattern
        .iter()
        .map(|s| match s {
            Seg::Ch(c) => Seg::Ch(c.to_ascii_lowercase()),
            w => *w,
        })
        .collect();
    rec(&pattern, 0, target, 0)
}

/// Compare two attributes and report the set relation of the source against the
/// target, following the CPE name-matching relation table:
///
/// | source \ target | ANY      | NA       | literal                        |
/// |-----------------|----------|----------|--------------------------------|
/// | ANY             | EQUAL    | SUPERSET | SUPERSET                       |
/// | NA              | SUBSET   | EQUAL    | DISJOINT                       |
/// | literal         | SUBSET   | DISJOINT | case-insensitive / wildcards   |
///
/// Two literals are EQUAL when their unescaped forms match case-insensitively.
/// Otherwise, if exactly one side carries wildcards, that side is evaluated as a
/// glob against the other: a matching source is a SUPERSET, a matching target
/// makes the source a SUBSET (keeping the relation antisymmetric). The relation
/// between two distinct wildcard patterns is not defined by the matching
/// standard and is reported as DISJOINT.
pub fn compare_attribute(source: &CpeAttribute, target: &CpeAttribute) -> MatchRelation {
    use CpeAttribute::*;
    match (source, target) {
        (Any, Any) => MatchRelation::Equal,
        (Any, Na) => MatchRelation::Superset,
        (Any, Literal(_)) => MatchRelation::Superset,
        (Na, Any) => MatchRelation::Subset,
        (Na, Na) => MatchRelation::Equal,
        (Na, Literal(_)) => MatchRelation::Disjoint,
        (Literal(_), Any) => MatchRelation::Subset,
        (Literal(_), Na) => MatchRelation::Disjoint,
        (Literal(a), Literal(b)) => {
            let sa = segments(a).unwrap_or_default();
            let sb = segments(b).unwrap_or_default();
            if seg_eq_fold(&sa, &sb) {
                return MatchRelation::Equal;
            }
            let a_wild = sa.iter().any(Seg::is_wild);
            let b_wild = sb.iter().any(Seg::is_wild);
            match (a_wild, b_wild) {
                (true, false) if glob_match(&sa, &lower_chars(&sb)) => MatchRelation::Superset,
                (false, true) if glob_match(&sb, &lower_chars(&sa)) => MatchRelation::Subset,
                _ => MatchRelation::Disjoint,
            }
        }
    }
}

/// Name-level match: true when no attribute pair is DISJOINT, i.e. the component
/// could be an instance of the criterion. Under
/// [`NaVersionPolicy::TreatNaVersionAsUnknown`] a component version of NA is
/// compared as ANY before the attribute relation is taken.
pub fn cpe_names_match(component: &Wfn, criterion: &Wfn, policy: NaVersionPolicy) -> bool {
    let comp_attrs = component.attributes();
    let crit_attrs = criterion.attributes();
    for (i, (comp, crit)) in comp_attrs.iter().zip(crit_attrs.iter()).enumerate() {
        let effective = if ATTRIBUTE_NAMES[i] == "version"
            && policy == NaVersionPolicy::TreatNaVersionAsUnknown
            && **comp == CpeAttribute::Na
        {
            &CpeAttribute::Any
        } else {
            *comp
        };
        if compare_attribute(effective, crit) == MatchRelation::Disjoint {
            return false;
        }
    }
    true
}
