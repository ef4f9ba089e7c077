//! The eight-slot filter surface and its boolean semantics.
//!
//! Slots combine with AND. Values inside one textual slot combine with OR and
//! match whole values case-insensitively. The two numeric slots are inclusive
//! ranges; a record without the filtered number never matches that slot.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use regex::RegexBuilder;
use serde::{Deserialize, Serialize};

use crate::corpus::{DocumentType, FieldOfStudy, Publication, UnknownValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Range {
    pub min: i64,
    pub max: i64,
}

impl Range {
    pub fn new(min: i64, max: i64) -> Self {
        Range { min, max }
    }

    pub fn contains(&self, value: i64) -> bool {
        self.min <= value && value <= self.max
    }
}

/// Wire form: a JSON object with up to eight keys; an absent key, or an
/// empty value list, leaves the slot inactive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub authors: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venues: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publishers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types_of_paper: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields_of_study: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access_types: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year_range: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation_range: Option<Range>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("{slot} range has min {min} greater than max {max}")]
    InvertedRange { slot: &'static str, min: i64, max: i64 },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error(transparent)]
    UnknownValue(#[from] UnknownValue),
}

impl FilterSet {
    pub fn validate(&self) -> Result<(), FilterError> {
        for (slot, range) in [("year_range", self.year_range), ("citation_range", self.citation_range)] {
            if let Some(r) = range {
                if r.min > r.max {
                    return Err(FilterError::InvertedRange { slot, min: r.min, max: r.max });
                }
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.text_slots().all(|(_, v)| active(v).is_none())
            && self.year_range.is_none()
            && self.citation_range.is_none()
    }

    pub fn slot(&self, slot: TextSlot) -> Option<&[String]> {
        let values = match slot {
            TextSlot::Authors => &self.authors,
            TextSlot::Venues => &self.venues,
            TextSlot::Publishers => &self.publishers,
            TextSlot::TypesOfPaper => &self.types_of_paper,
            TextSlot::FieldsOfStudy => &self.fields_of_study,
            TextSlot::AccessTypes => &self.access_types,
        };
        active(values)
    }

    fn text_slots(&self) -> impl Iterator<Item = (TextSlot, &Option<Vec<String>>)> {
        [
            (TextSlot::Authors, &self.authors),
            (TextSlot::Venues, &self.venues),
            (TextSlot::Publishers, &self.publishers),
            (TextSlot::TypesOfPaper, &self.types_of_paper),
            (TextSlot::FieldsOfStudy, &self.fields_of_study),
            (TextSlot::AccessTypes, &self.access_types),
        ]
        .into_iter()
    }

    /// Lower-cased, sorted and de-duplicated copy; empty lists dropped.
    pub fn canonical(&self) -> FilterSet {
        let canon = |values: &Option<Vec<String>>| {
            active(values).map(|vs| {
                let mut out: Vec<String> = vs.iter().map(|v| fold(v)).collect();
                out.sort();
                out.dedup();
                out
            })
        };
        FilterSet {
            authors: canon(&self.authors),
            venues: canon(&self.venues),
            publishers: canon(&self.publishers),
            types_of_paper: canon(&self.types_of_paper),
            fields_of_study: canon(&self.fields_of_study),
            access_types: canon(&self.access_types),
            year_range: self.year_range,
            citation_range: self.citation_range,
        }
    }

    pub fn compile(&self) -> Result<CompiledFilter, FilterError> {
        self.validate()?;
        let set = |values: &Option<Vec<String>>| {
            active(values).map(|vs| vs.iter().map(|v| fold(v)).collect::<HashSet<String>>())
        };
        Ok(CompiledFilter {
            authors: set(&self.authors),
            venues: set(&self.venues),
            publishers: set(&self.publishers),
            types_of_paper: set(&self.types_of_paper),
            fields_of_study: set(&self.fields_of_study),
            access_types: set(&self.access_types),
            year_range: self.year_range,
            citation_range: self.citation_range,
        })
    }
}

fn active(values: &Option<Vec<String>>) -> Option<&[String]> {
    values.as_deref().filter(|v| !v.is_empty())
}

fn fold(value: &str) -> String {
    value.trim().to_lowercase()
}

/// A [`FilterSet`] prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledFilter {
    authors: Option<HashSet<String>>,
    venues: Option<HashSet<String>>,
    publishers: Option<HashSet<String>>,
    types_of_paper: Option<HashSet<String>>,
    fields_of_study: Option<HashSet<String>>,
    access_types: Option<HashSet<String>>,
    year_range: Option<Range>,
    citation_range: Option<Range>,
}

impl CompiledFilter {
    pub fn matches(&self, p: &Publication) -> bool {
        fn any_of<'a>(set: &Option<HashSet<String>>, mut values: impl Iterator<Item = &'a str>) -> bool {
            match set {
                None => true,
                Some(set) => values.any(|v| set.contains(&fold(v))),
            }
        }

        if let Some(r) = self.year_range {
            match p.year_published {
                Some(y) if r.contains(i64::from(y)) => {}
                _ => return false,
            }
        }
        if let Some(r) = self.citation_range {
            let count = i64::try_from(p.in_citations_count).unwrap_or(i64::MAX);
            if !r.contains(count) {
                return false;
            }
        }
        any_of(&self.types_of_paper, std::iter::once(p.type_of_paper.as_str()))
            && any_of(&self.access_types, p.access_type().into_iter())
            && any_of(&self.venues, p.venue_name.as_deref().into_iter())
            && any_of(&self.publishers, p.publisher.as_deref().into_iter())
            && any_of(&self.fields_of_study, p.fields_of_study.iter().map(|f| f.as_str()))
            && any_of(&self.authors, p.author_names.iter().map(String::as_str))
    }

    pub fn year_range(&self) -> Option<Range> {
        self.year_range
    }

    pub fn text_values(&self, slot: TextSlot) -> Option<&HashSet<String>> {
        match slot {
            TextSlot::Authors => self.authors.as_ref(),
            TextSlot::Venues => self.venues.as_ref(),
            TextSlot::Publishers => self.publishers.as_ref(),
            TextSlot::TypesOfPaper => self.types_of_paper.as_ref(),
            TextSlot::FieldsOfStudy => self.fields_of_study.as_ref(),
            TextSlot::AccessTypes => self.access_types.as_ref(),
        }
    }
}

/// Evaluates `filter_set` against one record.
pub fn matches(publication: &Publication, filter_set: &FilterSet) -> Result<bool, FilterError> {
    Ok(filter_set.compile()?.matches(publication))
}

/// The six textual filter slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextSlot {
    Authors,
    Venues,
    Publishers,
    TypesOfPaper,
    FieldsOfStudy,
    AccessTypes,
}

impl TextSlot {
    pub const ALL: [TextSlot; 6] = [
        TextSlot::Authors,
        TextSlot::Venues,
        TextSlot::Publishers,
        TextSlot::TypesOfPaper,
        TextSlot::FieldsOfStudy,
        TextSlot::AccessTypes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TextSlot::Authors => "authors",
            TextSlot::Venues => "venues",
            TextSlot::Publishers => "publishers",
            TextSlot::TypesOfPaper => "types_of_paper",
            TextSlot::FieldsOfStudy => "fields_of_study",
            TextSlot::AccessTypes => "access_types",
        }
    }

    /// Pre-set values offered in a drop-down, for the enumerated slots.
    pub fn fixed_values(self) -> Option<Vec<&'static str>> {
        match self {
            TextSlot::TypesOfPaper => Some(DocumentType::ALL.iter().map(|d| d.as_str()).collect()),
            TextSlot::FieldsOfStudy => Some(FieldOfStudy::ASSIGNABLE.iter().map(|f| f.as_str()).collect()),
            TextSlot::AccessTypes => Some(vec!["open", "closed"]),
            _ => None,
        }
    }
}

impl FromStr for TextSlot {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TextSlot::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownValue { kind: "filter field", value: s.to_string() })
    }
}

impl fmt::Display for TextSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The entity a dashboard aggregates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Paper,
    Author,
    Venue,
    TypeOfPaper,
    FieldOfStudy,
    Publisher,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Paper,
        Dimension::Author,
        Dimension::Venue,
        Dimension::TypeOfPaper,
        Dimension::FieldOfStudy,
        Dimension::Publisher,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Paper => "paper",
            Dimension::Author => "author",
            Dimension::Venue => "venue",
            Dimension::TypeOfPaper => "type_of_paper",
            Dimension::FieldOfStudy => "field_of_study",
            Dimension::Publisher => "publisher",
        }
    }
}

impl FromStr for Dimension {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| UnknownValue { kind: "dimension", value: s.to_string() })
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ranks stored values of `slot` that match `pattern` (case-insensitive
/// regular expression). `counts` maps each stored display value to the number
/// of publications carrying it; enumerated slots ignore it and filter their
/// fixed list instead, keeping declaration order.
pub fn suggest(
    slot: TextSlot,
    pattern: &str,
    limit: usize,
    counts: &BTreeMap<String, u64>,
) -> Result<Vec<String>, FilterError> {
    let re = RegexBuilder::new(pattern)
        .case_insensitive(true)
        .size_limit(1 << 20)
        .build()
        .map_err(|e| FilterError::InvalidPattern(e.to_string()))?;
    if let Some(fixed) = slot.fixed_values() {
        return Ok(fixed
            .into_iter()
            .filter(|v| re.is_match(v))
            .take(limit)
            .map(str::to_string)
            .collect());
    }
    let mut hits: Vec<(&String, u64)> = counts
        .iter()
        .filter(|(value, _)| re.is_match(value))
        .map(|(value, n)| (value, *n))
        .collect();
    hits.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(hits.into_iter().take(limit).map(|(v, _)| v.clone()).collect())
}

/// Cache key for an aggregation query. Two semantically equal queries give
/// the same key; `operation` should already carry any extra parameters in a
/// canonical order.
pub fn canonical_key(
    operation: &str,
    dimension: Option<Dimension>,
    metric: Option<&str>,
    filter_set: &FilterSet,
) -> String {
    let filter = serde_json::to_string(&filter_set.canonical()).expect("filter serializes");
    format!(
        "{operation}|{}|{}|{filter}",
        dimension.map_or("-", Dimension::as_str),
        metric.unwrap_or("-")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(authors: &[&str], venue: Option<&str>, year: Option<i32>, cites: u64) -> Publication {
        let mut p = Publication::new("p", "t", DocumentType::Inproceedings);
        p.author_ids = authors.iter().map(|a| format!("id-{a}")).collect();
        p.author_names = authors.iter().map(|a| a.to_string()).collect();
        p.venue_name = venue.map(str::to_string);
        p.year_published = year;
        p.in_citations_count = cites;
        p
    }

    fn words(v: &[&str]) -> Option<Vec<String>> {
        Some(v.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn example_query_semantics() {
        let fs = FilterSet {
            authors: words(&["Jan Philip Wahle", "Terry Ruas"]),
            venues: words(&["ACL"]),
            year_range: Some(Range::new(2020, 2020)),
            ..Default::default()
        };
        let f = fs.compile().unwrap();
        assert!(f.matches(&paper(&["Terry Ruas", "X"], Some("ACL"), Some(2020), 0)));
        assert!(f.matches(&paper(&["jan philip wahle"], Some("acl"), Some(2020), 0)));
        assert!(!f.matches(&paper(&["Terry Ruas"], Some("EMNLP"), Some(2020), 0)));
        assert!(!f.matches(&paper(&["Terry Ruas"], Some("ACL"), Some(2021), 0)));
        assert!(!f.matches(&paper(&["Someone"], Some("ACL"), Some(2020), 0)));
        assert!(!f.matches(&paper(&["Terry Ruas"], Some("ACL"), None, 0)));
    }

    #[test]
    fn empty_filter_matches_everything() {
        let f = FilterSet::default().compile().unwrap();
        assert!(f.matches(&paper(&[], None, None, 0)));
        let f = FilterSet { authors: Some(vec![]), ..Default::default() };
        assert!(f.is_empty());
        assert!(f.compile().unwrap().matches(&paper(&[], None, None, 0)));
    }

    #[test]
    fn citation_range_is_inclusive() {
        let fs = FilterSet { citation_range: Some(Range::new(10, 10)), ..Default::default() };
        assert!(matches(&paper(&[], None, None, 10), &fs).unwrap());
        assert!(!matches(&paper(&[], None, None, 11), &fs).unwrap());
        assert!(!matches(&paper(&[], None, None, 9), &fs).unwrap());
    }

    #[test]
    fn textual_match_is_whole_value() {
        let fs = FilterSet { venues: words(&["CVPR"]), ..Default::default() };
        assert!(!matches(&paper(&[], Some("CVPR Workshops"), None, 0), &fs).unwrap());
    }

    #[test]
    fn access_types_follow_open_access_flag() {
        let fs = FilterSet { access_types: words(&["open"]), ..Default::default() };
        let mut p = paper(&[], None, None, 0);
        assert!(!matches(&p, &fs).unwrap());
        p.open_access = Some(true);
        assert!(matches(&p, &fs).unwrap());
        p.open_access = Some(false);
        assert!(!matches(&p, &fs).unwrap());
    }

    #[test]
    fn inverted_range_is_rejected() {
        let fs = FilterSet { year_range: Some(Range::new(2021, 2020)), ..Default::default() };
        assert!(matches!(fs.compile(), Err(FilterError::InvertedRange { .. })));
    }

    #[test]
    fn wire_form_round_trips() {
        let raw = r#"{"authors":["A"],"year_range":{"min":2000,"max":2010}}"#;
        let fs: FilterSet = serde_json::from_str(raw).unwrap();
        assert_eq!(fs.year_range, Some(Range::new(2000, 2010)));
        assert_eq!(serde_json::to_string(&fs).unwrap(), raw);
        assert!(serde_json::from_str::<FilterSet>(r#"{"title":["x"]}"#).is_err());
    }

    #[test]
    fn suggest_ranks_by_count_then_name() {
        let counts: BTreeMap<String, u64> = [("CVPR", 5), ("CVPR Workshops", 2), ("ICCV", 9), ("ACVx", 1)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(suggest(TextSlot::Venues, "^CV", 10, &counts).unwrap(), vec!["CVPR", "CVPR Workshops"]);
        assert_eq!(suggest(TextSlot::Venues, "cv", 2, &counts).unwrap(), vec!["ICCV", "CVPR"]);
        assert!(suggest(TextSlot::Authors, "zzz", 10, &counts).unwrap().is_empty());
        assert!(matches!(suggest(TextSlot::Venues, "(", 10, &counts), Err(FilterError::InvalidPattern(_))));
    }

    #[test]
    fn suggest_fixed_lists() {
        let none = BTreeMap::new();
        let types = suggest(TextSlot::TypesOfPaper, ".*", 10, &none).unwrap();
        assert_eq!(types.len(), 7);
        for t in ["article", "inproceedings", "book", "incollection", "phdthesis", "mastersthesis", "proceedings"] {
            assert!(types.contains(&t.to_string()));
        }
        assert_eq!(suggest(TextSlot::AccessTypes, "^o", 10, &none).unwrap(), vec!["open"]);
        assert_eq!(suggest(TextSlot::FieldsOfStudy, "science", 3, &none).unwrap().len(), 3);
    }

    #[test]
    fn canonical_key_properties() {
        let a = FilterSet { authors: words(&["A", "B"]), ..Default::default() };
        let b = FilterSet { authors: words(&["b", "a", "A"]), ..Default::default() };
        assert_eq!(canonical_key("grid", Some(Dimension::Author), Some("papers"), &a),
                   canonical_key("grid", Some(Dimension::Author), Some("papers"), &b));
        let y1 = FilterSet { year_range: Some(Range::new(2000, 2001)), ..Default::default() };
        let y2 = FilterSet { year_range: Some(Range::new(2000, 2002)), ..Default::default() };
        assert_ne!(canonical_key("grid", None, None, &y1), canonical_key("grid", None, None, &y2));
        assert_ne!(canonical_key("top_k", None, Some("papers"), &a), canonical_key("top_k", None, Some("citations"), &a));
        let empty_list = FilterSet { venues: Some(vec![]), ..Default::default() };
        assert_eq!(canonical_key("x", None, None, &empty_list), canonical_key("x", None, None, &FilterSet::default()));
    }
}
