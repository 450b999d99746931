//! Component identifier handling: CPE 2.3 formatted strings and package URLs.
//!
//! Both identifier schemes get a parser, a canonical formatter and the matching
//! predicate a vulnerability lookup needs: set-relation comparison for CPE
//! attributes ([`compare_attribute`]) and version-free coordinate equality for
//! purls ([`purl_coordinates_match`]).

mod cpe;
mod purl;

pub use cpe::{
    compare_attribute, cpe_names_match, format_cpe, parse_attribute, parse_cpe, CpeAttribute,
    MalformedCpe, MatchRelation, NaVersionPolicy, Wfn,
};
pub use purl::{canonicalize_purl, parse_purl, purl_coordinates_match, MalformedPurl, Purl};
