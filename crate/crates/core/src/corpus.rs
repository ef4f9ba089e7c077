//! Canonical domain records shared by every other module.
//!
//! Field names on the wire follow the stored schema (`yearPublished`,
//! `authorIds`, `typeOfPaper`, ...). Author and venue display names are
//! copied into each publication at ingest time; ids remain the identity.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Earliest year accepted on a publication.
pub const MIN_YEAR: i32 = 1936;
/// Upper guard on publication years.
pub const MAX_YEAR: i32 = 2100;

/// Name of the bucket that collects records lacking a dimension value.
pub const OTHERS: &str = "Others";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} value {value:?}")]
pub struct UnknownValue {
    pub kind: &'static str,
    pub value: String,
}

macro_rules! string_enum {
    (
        $(#[$meta:meta])*
        $name:ident, $kind:literal {
            $($variant:ident => $text:literal),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = UnknownValue;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let needle = s.trim();
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str().eq_ignore_ascii_case(needle))
                    .ok_or_else(|| UnknownValue { kind: $kind, value: s.to_string() })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(deserializer)?;
                raw.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_enum! {
    /// BibTeX entry class of a publication.
    DocumentType, "typeOfPaper" {
        Inproceedings => "inproceedings",
        Article => "article",
        Incollection => "incollection",
        Proceedings => "proceedings",
        Book => "book",
        Phdthesis => "phdthesis",
        Mastersthesis => "mastersthesis",
    }
}

/// High-level research area. A publication may carry several.
///
/// [`FieldOfStudy::Unassigned`] is never stored or parsed; it stands in for an
/// empty field set when aggregating, so those records land in the "Others"
/// bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldOfStudy {
    ComputerScience,
    Mathematics,
    Engineering,
    Medicine,
    Psychology,
    Physics,
    Business,
    MaterialsScience,
    Biology,
    Economics,
    Sociology,
    EnvironmentalScience,
    Chemistry,
    Geology,
    Geography,
    PoliticalScience,
    Philosophy,
    Art,
    History,
    Unassigned,
}

impl FieldOfStudy {
    /// The assignable values, in the order used by suggestion lists.
    pub const ASSIGNABLE: &'static [FieldOfStudy] = &[
        FieldOfStudy::ComputerScience,
        FieldOfStudy::Mathematics,
        FieldOfStudy::Engineering,
        FieldOfStudy::Medicine,
        FieldOfStudy::Psychology,
        FieldOfStudy::Physics,
        FieldOfStudy::Business,
        FieldOfStudy::MaterialsScience,
        FieldOfStudy::Biology,
        FieldOfStudy::Economics,
        FieldOfStudy::Sociology,
        FieldOfStudy::EnvironmentalScience,
        FieldOfStudy::Chemistry,
        FieldOfStudy::Geology,
        FieldOfStudy::Geography,
        FieldOfStudy::PoliticalScience,
        FieldOfStudy::Philosophy,
        FieldOfStudy::Art,
        FieldOfStudy::History,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldOfStudy::ComputerScience => "Computer Science",
            FieldOfStudy::Mathematics => "Mathematics",
            FieldOfStudy::Engineering => "Engineering",
            FieldOfStudy::Medicine => "Medicine",
            FieldOfStudy::Psychology => "Psychology",
            FieldOfStudy::Physics => "Physics",
            FieldOfStudy::Business => "Business",
            FieldOfStudy::MaterialsScience => "Materials Science",
            FieldOfStudy::Biology => "Biology",
            FieldOfStudy::Economics => "Economics",
            FieldOfStudy::Sociology => "Sociology",
            FieldOfStudy::EnvironmentalScience => "Environmental Science",
            FieldOfStudy::Chemistry => "Chemistry",
            FieldOfStudy::Geology => "Geology",
            FieldOfStudy::Geography => "Geography",
            FieldOfStudy::PoliticalScience => "Political Science",
            FieldOfStudy::Philosophy => "Philosophy",
            FieldOfStudy::Art => "Art",
            FieldOfStudy::History => "History",
            FieldOfStudy::Unassigned => OTHERS,
        }
    }
}

impl FromStr for FieldOfStudy {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let needle = s.trim();
        Self::ASSIGNABLE
            .iter()
            .copied()
            .find(|v| v.as_str().eq_ignore_ascii_case(needle))
            .ok_or_else(|| UnknownValue {
                kind: "fieldsOfStudy",
                value: s.to_string(),
            })
    }
}

impl fmt::Display for FieldOfStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for FieldOfStudy {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for FieldOfStudy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// One publication record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Publication {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub abstract_text: Option<String>,
    #[serde(default)]
    pub year_published: Option<i32>,
    #[serde(default)]
    pub author_ids: Vec<String>,
    /// Display names, parallel to `author_ids`.
    #[serde(default, rename = "authors")]
    pub author_names: Vec<String>,
    #[serde(default)]
    pub venue_id: Option<String>,
    #[serde(default, rename = "venue")]
    pub venue_name: Option<String>,
    #[serde(default)]
    pub publisher: Option<String>,
    pub type_of_paper: DocumentType,
    #[serde(default)]
    pub fields_of_study: BTreeSet<FieldOfStudy>,
    #[serde(default, rename = "inCitations")]
    pub in_citation_ids: Vec<String>,
    #[serde(default)]
    pub in_citations_count: u64,
    #[serde(default, rename = "outCitations")]
    pub out_citation_ids: Vec<String>,
    #[serde(default)]
    pub out_citations_count: u64,
    #[serde(default)]
    pub open_access: Option<bool>,
    #[serde(default)]
    pub dblp_id: Option<String>,
    #[serde(default)]
    pub doi: Option<String>,
    #[serde(default)]
    pub url: Option<String>,
}

impl Publication {
    /// A minimal record with every optional field empty.
    pub fn new(id: impl Into<String>, title: impl Into<String>, type_of_paper: DocumentType) -> Self {
        Publication {
            id: id.into(),
            title: title.into(),
            abstract_text: None,
            year_published: None,
            author_ids: Vec::new(),
            author_names: Vec::new(),
            venue_id: None,
            venue_name: None,
            publisher: None,
            type_of_paper,
            fields_of_study: BTreeSet::new(),
            in_citation_ids: Vec::new(),
            in_citations_count: 0,
            out_citation_ids: Vec::new(),
            out_citations_count: 0,
            open_access: None,
            dblp_id: None,
            doi: None,
            url: None,
        }
    }

    /// Field values for aggregation; an empty set yields the unassigned sentinel.
    pub fn fields_or_unassigned(&self) -> impl Iterator<Item = FieldOfStudy> + '_ {
        let sentinel = self.fields_of_study.is_empty().then_some(FieldOfStudy::Unassigned);
        self.fields_of_study.iter().copied().chain(sentinel)
    }

    /// `open` / `closed`, or nothing when access is unknown.
    pub fn access_type(&self) -> Option<&'static str> {
        self.open_access.map(|open| if open { "open" } else { "closed" })
    }

    /// Text used for topic modeling.
    pub fn topic_text(&self) -> String {
        match &self.abstract_text {
            Some(abs) if !abs.is_empty() => format!("{} {}", self.title, abs),
            _ => self.title.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    pub id: String,
    #[serde(rename = "fullname")]
    pub full_name: String,
    /// Four-digit disambiguation counter, e.g. `0001`.
    #[serde(default)]
    pub number: Option<String>,
    #[serde(default)]
    pub orcid: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Venue {
    pub id: String,
    pub names: Vec<String>,
}

impl Venue {
    pub fn display_name(&self) -> Option<&str> {
        self.names.first().map(String::as_str)
    }
}

/// A broken record-level rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub rule: String,
}

impl Violation {
    fn new(field: &'static str, rule: impl Into<String>) -> Self {
        Violation { field, rule: rule.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Checks record-level invariants. Returns an empty list for a valid record.
pub fn validate(publication: &Publication) -> Vec<Violation> {
    let mut out = Vec::new();
    if publication.id.trim().is_empty() {
        out.push(Violation::new("id", "must be non-empty"));
    }
    if publication.title.trim().is_empty() {
        out.push(Violation::new("title", "must be non-empty"));
    }
    if publication.author_names.len() != publication.author_ids.len() {
        out.push(Violation::new(
            "authors",
            format!(
                "{} names for {} author ids",
                publication.author_names.len(),
                publication.author_ids.len()
            ),
        ));
    }
    if !publication.in_citation_ids.is_empty()
        && publication.in_citations_count != publication.in_citation_ids.len() as u64
    {
        out.push(Violation::new(
            "inCitationsCount",
            format!(
                "count {} does not match {} listed ids",
                publication.in_citations_count,
                publication.in_citation_ids.len()
            ),
        ));
    }
    if !publication.out_citation_ids.is_empty()
        && publication.out_citations_count != publication.out_citation_ids.len() as u64
    {
        out.push(Violation::new(
            "outCitationsCount",
            format!(
                "count {} does not match {} listed ids",
                publication.out_citations_count,
                publication.out_citation_ids.len()
            ),
        ));
    }
    if let Some(year) = publication.year_published {
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            out.push(Violation::new(
                "yearPublished",
                format!("{year} outside [{MIN_YEAR}, {MAX_YEAR}]"),
            ));
        }
    }
    if publication.fields_of_study.contains(&FieldOfStudy::Unassigned) {
        out.push(Violation::new("fieldsOfStudy", "unassigned sentinel cannot be stored"));
    }
    out
}

pub fn validate_author(author: &Author) -> Vec<Violation> {
    let mut out = Vec::new();
    if author.id.trim().is_empty() {
        out.push(Violation::new("id", "must be non-empty"));
    }
    if author.full_name.trim().is_empty() {
        out.push(Violation::new("fullname", "must be non-empty"));
    }
    if let Some(number) = &author.number {
        if number.len() != 4 || !number.bytes().all(|b| b.is_ascii_digit()) {
            out.push(Violation::new("number", format!("{number:?} is not a four-digit counter")));
        }
    }
    out
}

pub fn validate_venue(venue: &Venue) -> Vec<Violation> {
    let mut out = Vec::new();
    if venue.id.trim().is_empty() {
        out.push(Violation::new("id", "must be non-empty"));
    }
    if venue.names.is_empty() {
        out.push(Violation::new("names", "must be non-empty"));
    }
    for name in &venue.names {
        if crate::ingest::normalize_venue_name(name) != *name {
            out.push(Violation::new("names", format!("{name:?} carries a trailing counter")));
        }
    }
    out
}
