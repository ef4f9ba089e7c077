//! Loads line-delimited corpus files into the store.
//!
//! Each input line is one record. A `collection` key selects `publications`
//! (the default), `authors` or `venues`. Publication keys follow the stored
//! schema (`yearPublished`, `authorIds`, `venueId`, `typeOfPaper`, ...); raw
//! DBLP venue keys `booktitle` and `journal` are also understood. Keys not in
//! the schema are dropped. Bad records are counted and skipped, never fatal.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, BufRead, Read};
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::corpus::{validate, Author, DocumentType, FieldOfStudy, Publication, Venue};
use crate::store::{Store, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("record uses both booktitle and journal")]
    BothFieldsPresent,
    #[error("unresolved reference {0:?}")]
    UnresolvedReference(String),
    #[error("cannot read source: {0}")]
    Io(#[from] io::Error),
    #[error("cannot read csv source: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Why a single record was skipped. `reason()` is the report key.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("invalid {field}: {value}")]
    InvalidValue { field: &'static str, value: String },
    #[error("record uses both booktitle and journal")]
    BothVenueFields,
    #[error("unresolved reference {0:?}")]
    UnresolvedReference(String),
    #[error("invalid record: {0}")]
    Violation(String),
}

impl RecordError {
    pub fn reason(&self) -> String {
        match self {
            RecordError::Malformed(_) => "malformed record".into(),
            RecordError::Missing(field) => format!("missing {field}"),
            RecordError::InvalidValue { field, .. } => format!("invalid {field}"),
            RecordError::BothVenueFields => "both booktitle and journal".into(),
            RecordError::UnresolvedReference(_) => "unresolved reference".into(),
            RecordError::Violation(rule) => format!("violation: {rule}"),
        }
    }
}

impl From<IngestError> for RecordError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::BothFieldsPresent => RecordError::BothVenueFields,
            IngestError::UnresolvedReference(id) => RecordError::UnresolvedReference(id),
            other => RecordError::Malformed(other.to_string()),
        }
    }
}

/// Raw key-value fields from one input line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawRecord(pub Map<String, Value>);

impl RawRecord {
    pub fn from_json_line(line: &str) -> Result<RawRecord, RecordError> {
        match serde_json::from_str::<Value>(line) {
            Ok(Value::Object(map)) => Ok(RawRecord(map)),
            Ok(_) => Err(RecordError::Malformed("line is not a JSON object".into())),
            Err(e) => Err(RecordError::Malformed(e.to_string())),
        }
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key).filter(|v| !v.is_null())
    }

    fn text(&self, key: &'static str) -> Result<Option<String>, RecordError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) if s.trim().is_empty() => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.trim().to_string())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(other) => Err(RecordError::InvalidValue { field: key, value: other.to_string() }),
        }
    }

    fn list(&self, key: &'static str) -> Result<Vec<String>, RecordError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.trim().to_string()),
                    Value::Number(n) => Ok(n.to_string()),
                    other => Err(RecordError::InvalidValue { field: key, value: other.to_string() }),
                })
                .collect(),
            Some(other) => Err(RecordError::InvalidValue { field: key, value: other.to_string() }),
        }
    }

    fn integer(&self, key: &'static str) -> Result<Option<i64>, RecordError> {
        let invalid = |v: &Value| RecordError::InvalidValue { field: key, value: v.to_string() };
        match self.get(key) {
            None => Ok(None),
            Some(v @ Value::Number(n)) => n.as_i64().map(Some).ok_or_else(|| invalid(v)),
            Some(Value::String(s)) if s.trim().is_empty() => Ok(None),
            Some(v @ Value::String(s)) => s.trim().parse().map(Some).map_err(|_| invalid(v)),
            Some(v) => Err(invalid(v)),
        }
    }

    fn boolean(&self, key: &'static str) -> Result<Option<bool>, RecordError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(*b)),
            Some(Value::String(s)) if s.eq_ignore_ascii_case("true") => Ok(Some(true)),
            Some(Value::String(s)) if s.eq_ignore_ascii_case("false") => Ok(Some(false)),
            Some(other) => Err(RecordError::InvalidValue { field: key, value: other.to_string() }),
        }
    }
}

/// Conferences name their venue in `booktitle`, journals in `journal`; a
/// record never legitimately carries both.
pub fn merge_venue_fields(booktitle: Option<&str>, journal: Option<&str>) -> Result<Option<String>, IngestError> {
    fn clean(s: Option<&str>) -> Option<&str> {
        s.map(str::trim).filter(|s| !s.is_empty())
    }
    match (clean(booktitle), clean(journal)) {
        (Some(_), Some(_)) => Err(IngestError::BothFieldsPresent),
        (Some(v), None) | (None, Some(v)) => Ok(Some(v.to_string())),
        (None, None) => Ok(None),
    }
}

fn trailing_counter() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\s+\(\d+\)$").expect("valid regex"))
}

/// Strips the volume counter DBLP appends to venue names, e.g.
/// `"HCI (42)"` becomes `"HCI"`. Interior parentheses are kept.
pub fn normalize_venue_name(raw: &str) -> String {
    let mut name = raw.trim_end();
    while let Some(m) = trailing_counter().find(name) {
        name = name[..m.start()].trim_end();
    }
    name.to_string()
}

/// Copies author and venue display names into `publication`.
pub fn denormalize_names(
    mut publication: Publication,
    authors: &HashMap<String, Author>,
    venues: &HashMap<String, Venue>,
) -> Result<Publication, IngestError> {
    publication.author_names = publication
        .author_ids
        .iter()
        .map(|id| {
            authors
                .get(id)
                .map(|a| a.full_name.clone())
                .ok_or_else(|| IngestError::UnresolvedReference(id.clone()))
        })
        .collect::<Result<_, _>>()?;
    if let Some(id) = &publication.venue_id {
        let venue = venues.get(id).ok_or_else(|| IngestError::UnresolvedReference(id.clone()))?;
        publication.venue_name = venue.display_name().map(str::to_string);
    }
    Ok(publication)
}

/// One parsed line.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedRecord {
    /// A publication plus the raw venue name from `venue`/`booktitle`/`journal`
    /// when no `venueId` was given.
    Publication(Publication, Option<String>),
    Author(Author),
    Venue(Venue),
}

pub fn parse_record(raw: &RawRecord) -> Result<ParsedRecord, RecordError> {
    match raw.text("collection")?.as_deref() {
        None | Some("publications") | Some("publication") => parse_publication(raw),
        Some("authors") | Some("author") => parse_author(raw).map(ParsedRecord::Author),
        Some("venues") | Some("venue") => parse_venue(raw).map(ParsedRecord::Venue),
        Some(other) => Err(RecordError::InvalidValue { field: "collection", value: other.to_string() }),
    }
}

fn parse_enum<T: FromStr>(field: &'static str, value: &str) -> Result<T, RecordError> {
    value.parse().map_err(|_| RecordError::InvalidValue { field, value: value.to_string() })
}

fn parse_publication(raw: &RawRecord) -> Result<ParsedRecord, RecordError> {
    let id = raw.text("id")?.ok_or(RecordError::Missing("id"))?;
    let title = raw.text("title")?.ok_or(RecordError::Missing("title"))?;

    let merged = merge_venue_fields(raw.text("booktitle")?.as_deref(), raw.text("journal")?.as_deref())?;
    let raw_venue = merged.or(raw.text("venue")?).map(|v| normalize_venue_name(&v));

    let type_of_paper = match raw.text("typeOfPaper")? {
        Some(t) => parse_enum::<DocumentType>("typeOfPaper", &t)?,
        // DBLP keeps conference venues in booktitle and journals in journal.
        None if raw.get("booktitle").is_some() => DocumentType::Inproceedings,
        None if raw.get("journal").is_some() => DocumentType::Article,
        None => return Err(RecordError::Missing("typeOfPaper")),
    };

    let mut p = Publication::new(id, title, type_of_paper);
    p.abstract_text = raw.text("abstractText")?;
    p.year_published = raw
        .integer("yearPublished")?
        .map(|y| i32::try_from(y).map_err(|_| RecordError::InvalidValue { field: "yearPublished", value: y.to_string() }))
        .transpose()?;
    p.author_ids = raw.list("authorIds")?;
    if p.author_ids.is_empty() {
        p.author_names = raw.list("authors")?;
    }
    p.venue_id = raw.text("venueId")?;
    p.publisher = raw.text("publisher")?;
    p.fields_of_study = raw
        .list("fieldsOfStudy")?
        .iter()
        .map(|f| parse_enum::<FieldOfStudy>("fieldsOfStudy", f))
        .collect::<Result<BTreeSet<_>, _>>()?;
    p.in_citation_ids = raw.list("inCitations")?;
    p.out_citation_ids = raw.list("outCitations")?;
    let count = |key: &'static str, ids: &[String]| -> Result<u64, RecordError> {
        match raw.integer(key)? {
            Some(n) => u64::try_from(n).map_err(|_| RecordError::InvalidValue { field: key, value: n.to_string() }),
            None => Ok(ids.len() as u64),
        }
    };
    p.in_citations_count = count("inCitationsCount", &p.in_citation_ids)?;
    p.out_citations_count = count("outCitationsCount", &p.out_citation_ids)?;
    p.open_access = raw.boolean("openAccess")?;
    p.dblp_id = raw.text("dblpId")?;
    p.doi = raw.text("doi")?;
    p.url = raw.text("url")?;
    Ok(ParsedRecord::Publication(p, raw_venue))
}

fn parse_author(raw: &RawRecord) -> Result<Author, RecordError> {
    Ok(Author {
        id: raw.text("id")?.ok_or(RecordError::Missing("id"))?,
        full_name: raw.text("fullname")?.ok_or(RecordError::Missing("fullname"))?,
        number: raw.text("number")?,
        orcid: raw.text("orcid")?,
    })
}

fn parse_venue(raw: &RawRecord) -> Result<Venue, RecordError> {
    let id = raw.text("id")?.ok_or(RecordError::Missing("id"))?;
    let mut names: Vec<String> = Vec::new();
    for n in raw.list("names")? {
        let n = normalize_venue_name(&n);
        if !n.is_empty() && !names.contains(&n) {
            names.push(n);
        }
    }
    if names.is_empty() {
        return Err(RecordError::Missing("names"));
    }
    Ok(Venue { id, names })
}

/// Deterministic id for an author known only by name.
pub fn author_id_for_name(name: &str) -> String {
    format!("author:{name}")
}

/// Deterministic id for a venue known only by name.
pub fn venue_id_for_name(name: &str) -> String {
    format!("venue:{name}")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records_read: u64,
    pub records_accepted: u64,
    pub records_rejected: u64,
    pub rejection_reasons: BTreeMap<String, u64>,
    /// Accepted records whose id appeared earlier in the same source.
    pub overwrites: u64,
}

impl IngestReport {
    fn reject(&mut self, e: &RecordError) {
        self.records_rejected += 1;
        *self.rejection_reasons.entry(e.reason()).or_insert(0) += 1;
    }

    /// Associative merge of two partial reports.
    pub fn merge(mut self, other: IngestReport) -> IngestReport {
        self.records_read += other.records_read;
        self.records_accepted += other.records_accepted;
        self.records_rejected += other.records_rejected;
        self.overwrites += other.overwrites;
        for (k, v) in other.rejection_reasons {
            *self.rejection_reasons.entry(k).or_insert(0) += v;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Jsonl,
    Csv,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" | "json" => Ok(InputFormat::Jsonl),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown input format {other:?}")),
        }
    }
}

/// Reads every record from `source` in the given format.
pub fn read_records(source: impl Read, format: InputFormat) -> Result<Vec<Result<RawRecord, RecordError>>, IngestError> {
    match format {
        InputFormat::Jsonl => {
            let mut out = Vec::new();
            for line in io::BufReader::new(source).lines() {
                let line = line?;
                if !line.trim().is_empty() {
                    out.push(line);
                }
            }
            Ok(out.par_iter().map(|l| RawRecord::from_json_line(l)).collect())
        }
        InputFormat::Csv => read_csv(source),
    }
}

const CSV_LIST_COLUMNS: &[&str] = &["authorIds", "authors", "fieldsOfStudy", "inCitations", "outCitations", "names"];
const CSV_NUMBER_COLUMNS: &[&str] = &["yearPublished", "inCitationsCount", "outCitationsCount"];

/// Maps CSV columns onto the same raw shape as JSONL. List cells hold either
/// a JSON array or `;`-separated values.
fn read_csv(source: impl Read) -> Result<Vec<Result<RawRecord, RecordError>>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(source);
    let headers = reader.headers()?.clone();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                out.push(Err(RecordError::Malformed(e.to_string())));
                continue;
            }
        };
        let mut map = Map::new();
        for (key, cell) in headers.iter().zip(row.iter()) {
            if cell.is_empty() {
                continue;
            }
            let value = if CSV_LIST_COLUMNS.contains(&key) {
                if cell.trim_start().starts_with('[') {
                    serde_json::from_str(cell).unwrap_or_else(|_| Value::String(cell.to_string()))
                } else {
                    Value::Array(cell.split(';').map(|s| Value::String(s.trim().to_string())).collect())
                }
            } else if CSV_NUMBER_COLUMNS.contains(&key) {
                cell.trim().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::String(cell.to_string()))
            } else if key == "openAccess" {
                match cell.trim() {
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    other => Value::String(other.to_string()),
                }
            } else {
                Value::String(cell.to_string())
            };
            map.insert(key.to_string(), value);
        }
        out.push(Ok(RawRecord(map)));
    }
    Ok(out)
}

/// Validates, normalizes, denormalizes and persists every record from
/// `source` in one write batch. Duplicate ids are upserted last-wins.
pub fn load_corpus(source: impl Read, format: InputFormat, store: &Store) -> Result<IngestReport, IngestError> {
    let raw = read_records(source, format)?;
    load_records(raw, store)
}

pub fn load_records(raw: Vec<Result<RawRecord, RecordError>>, store: &Store) -> Result<IngestReport, IngestError> {
    let parsed: Vec<Result<ParsedRecord, RecordError>> =
        raw.into_par_iter().map(|r| r.and_then(|raw| parse_record(&raw))).collect();

    let mut report = IngestReport { records_read: parsed.len() as u64, ..Default::default() };
    let mut authors: Vec<Author> = Vec::new();
    let mut venues: Vec<Venue> = Vec::new();
    let mut pubs: Vec<(Publication, Option<String>)> = Vec::new();
    for p in parsed {
        match p {
            Ok(ParsedRecord::Author(a)) => authors.push(a),
            Ok(ParsedRecord::Venue(v)) => venues.push(v),
            Ok(ParsedRecord::Publication(p, name)) => pubs.push((p, name)),
            Err(e) => report.reject(&e),
        }
    }

    store.write(|batch| {
        let mut seen = BTreeSet::new();
        let mut accept = |report: &mut IngestReport, kind: &str, id: &str| {
            report.records_accepted += 1;
            if !seen.insert(format!("{kind}/{id}")) {
                report.overwrites += 1;
            }
        };

        for a in authors {
            let id = a.id.clone();
            match batch.upsert_author(a) {
                Ok(_) => accept(&mut report, "a", &id),
                Err(StoreError::Invalid(v)) => report.reject(&RecordError::Violation(v[0].to_string())),
                Err(e) => return Err(IngestError::from(e)),
            }
        }
        for v in venues {
            let id = v.id.clone();
            match batch.upsert_venue(v) {
                Ok(_) => accept(&mut report, "v", &id),
                Err(StoreError::Invalid(v)) => report.reject(&RecordError::Violation(v[0].to_string())),
                Err(e) => return Err(IngestError::from(e)),
            }
        }

        let mut author_lookup: HashMap<String, Author> =
            batch.view().authors().map(|a| (a.id.clone(), a.clone())).collect();
        let mut venue_lookup: HashMap<String, Venue> =
            batch.view().venues().map(|v| (v.id.clone(), v.clone())).collect();

        for (mut p, raw_venue) in pubs {
            if p.author_ids.is_empty() && !p.author_names.is_empty() {
                for name in std::mem::take(&mut p.author_names) {
                    let aid = author_id_for_name(&name);
                    if !author_lookup.contains_key(&aid) {
                        let author = Author { id: aid.clone(), full_name: name, number: None, orcid: None };
                        batch.upsert_author(author.clone())?;
                        author_lookup.insert(aid.clone(), author);
                    }
                    p.author_ids.push(aid);
                }
            }
            if p.venue_id.is_none() {
                if let Some(name) = raw_venue.filter(|n| !n.is_empty()) {
                    let vid = venue_id_for_name(&name);
                    if !venue_lookup.contains_key(&vid) {
                        let venue = Venue { id: vid.clone(), names: vec![name] };
                        batch.upsert_venue(venue.clone())?;
                        venue_lookup.insert(vid.clone(), venue);
                    }
                    p.venue_id = Some(vid);
                }
            }
            let p = match denormalize_names(p, &author_lookup, &venue_lookup) {
                Ok(p) => p,
                Err(e) => {
                    report.reject(&RecordError::from(e));
                    continue;
                }
            };
            if let Some(first) = validate(&p).first() {
                report.reject(&RecordError::Violation(first.to_string()));
                continue;
            }
            let id = p.id.clone();
            batch.upsert_publication(p)?;
            accept(&mut report, "p", &id);
        }
        Ok(())
    })?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const AUTHORS: &str = r#"{"collection":"authors","id":"a1","fullname":"Saif M. Mohammad","number":"0001"}
{"collection":"authors","id":"a2","fullname":"Terry Ruas"}"#;

    fn ingest(lines: &str) -> (Store, IngestReport) {
        let store = Store::in_memory();
        let report = load_corpus(lines.as_bytes(), InputFormat::Jsonl, &store).unwrap();
        (store, report)
    }

    #[test]
    fn venue_field_merge() {
        assert_eq!(merge_venue_fields(Some("EMNLP"), None).unwrap().as_deref(), Some("EMNLP"));
        assert_eq!(merge_venue_fields(None, Some("TACL")).unwrap().as_deref(), Some("TACL"));
        assert_eq!(merge_venue_fields(None, None).unwrap(), None);
        assert!(matches!(merge_venue_fields(Some("X"), Some("Y")), Err(IngestError::BothFieldsPresent)));
    }

    #[test]
    fn venue_counters_are_stripped() {
        assert_eq!(normalize_venue_name("HCI (42)"), "HCI");
        assert_eq!(normalize_venue_name("ECCV (13)"), "ECCV");
        assert_eq!(normalize_venue_name("iConference (1)"), "iConference");
        assert_eq!(normalize_venue_name("TOOLS (48)"), "TOOLS");
        assert_eq!(normalize_venue_name("CVPR"), "CVPR");
        assert_eq!(normalize_venue_name("ACL (demo)"), "ACL (demo)");
        assert_eq!(normalize_venue_name("Reports (2) on things"), "Reports (2) on things");
        assert_eq!(normalize_venue_name("X (1) (2)"), "X");
        assert_eq!(normalize_venue_name("(42)"), "(42)");
    }

    #[test]
    fn denormalization() {
        let authors = HashMap::from([(
            "a1".to_string(),
            Author { id: "a1".into(), full_name: "Saif M. Mohammad".into(), number: None, orcid: None },
        )]);
        let venues = HashMap::new();
        let mut p = Publication::new("p", "t", DocumentType::Article);
        p.author_ids = vec!["a1".into()];
        let out = denormalize_names(p.clone(), &authors, &venues).unwrap();
        assert_eq!(out.author_names, ["Saif M. Mohammad"]);

        p.author_ids.clear();
        assert!(denormalize_names(p.clone(), &authors, &venues).unwrap().author_names.is_empty());

        p.author_ids = vec!["zz".into()];
        match denormalize_names(p, &authors, &venues) {
            Err(IngestError::UnresolvedReference(id)) => assert_eq!(id, "zz"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn three_valid_lines() {
        let lines = r#"{"id":"p1","title":"A","typeOfPaper":"article"}
{"id":"p2","title":"B","typeOfPaper":"book"}
{"id":"p3","title":"C","typeOfPaper":"inproceedings"}"#;
        let (store, report) = ingest(lines);
        assert_eq!((report.records_accepted, report.records_rejected), (3, 0));
        assert_eq!(store.snapshot().len(), 3);
    }

    #[test]
    fn missing_title_is_counted() {
        let lines = r#"{"id":"p1","title":"A","typeOfPaper":"article"}
{"id":"p2","typeOfPaper":"article"}
{"id":"p3","title":"C","typeOfPaper":"article"}"#;
        let (_, report) = ingest(lines);
        assert_eq!(report.records_read, 3);
        assert_eq!((report.records_accepted, report.records_rejected), (2, 1));
        assert_eq!(report.rejection_reasons.get("missing title"), Some(&1));
    }

    #[test]
    fn unknown_keys_are_dropped() {
        let (store, report) = ingest(r#"{"id":"p1","title":"A","typeOfPaper":"article","pages":"1-10"}"#);
        assert_eq!(report.records_accepted, 1);
        let stored = serde_json::to_value(store.snapshot().publication("p1").unwrap()).unwrap();
        assert!(stored.get("pages").is_none());
    }

    #[test]
    fn full_record_is_denormalized() {
        let lines = format!(
            "{AUTHORS}\n{}\n{}",
            r#"{"collection":"venues","id":"v1","names":["ACL (2)"]}"#,
            r#"{"id":"p1","title":"NLP Scholar","yearPublished":2020,"authorIds":["a1","a2"],"venueId":"v1","typeOfPaper":"inproceedings","fieldsOfStudy":["Computer Science"],"inCitationsCount":9,"outCitationsCount":34,"openAccess":true}"#
        );
        let (store, report) = ingest(&lines);
        assert_eq!(report.records_rejected, 0, "{report:?}");
        let snap = store.snapshot();
        let p = snap.publication("p1").unwrap();
        assert_eq!(p.author_names, ["Saif M. Mohammad", "Terry Ruas"]);
        assert_eq!(p.venue_name.as_deref(), Some("ACL"));
        assert_eq!(p.in_citations_count, 9);
    }

    #[test]
    fn raw_venue_fields_create_venues() {
        let lines = r#"{"id":"p1","title":"A","booktitle":"HCI (42)"}
{"id":"p2","title":"B","journal":"TACL","typeOfPaper":"article"}
{"id":"p3","title":"C","booktitle":"X","journal":"Y"}"#;
        let (store, report) = ingest(lines);
        assert_eq!(report.rejection_reasons.get("both booktitle and journal"), Some(&1));
        let snap = store.snapshot();
        let p1 = snap.publication("p1").unwrap();
        assert_eq!(p1.venue_name.as_deref(), Some("HCI"));
        assert_eq!(p1.type_of_paper, DocumentType::Inproceedings);
        assert_eq!(snap.venue(&venue_id_for_name("HCI")).unwrap().names, ["HCI"]);
    }

    #[test]
    fn dangling_references_and_bad_enums_are_rejected() {
        let lines = r#"{"id":"p1","title":"A","typeOfPaper":"article","authorIds":["zz"]}
{"id":"p2","title":"B","typeOfPaper":"webpage"}
{"id":"p3","title":"C","typeOfPaper":"article","fieldsOfStudy":["Astrology"]}
{"id":"p4","title":"D","typeOfPaper":"article","yearPublished":1800}
{"id":"p5","title":"E","typeOfPaper":"article","inCitations":["a","b","c"],"inCitationsCount":2}
not json"#;
        let (store, report) = ingest(lines);
        assert_eq!(report.records_accepted, 0);
        assert_eq!(report.records_rejected, 6);
        assert_eq!(report.rejection_reasons.get("unresolved reference"), Some(&1));
        assert_eq!(report.rejection_reasons.get("invalid typeOfPaper"), Some(&1));
        assert_eq!(report.rejection_reasons.get("invalid fieldsOfStudy"), Some(&1));
        assert_eq!(report.rejection_reasons.get("malformed record"), Some(&1));
        assert!(store.snapshot().is_empty());
    }

    #[test]
    fn duplicates_are_last_wins() {
        let lines = r#"{"id":"p1","title":"first","typeOfPaper":"article"}
{"id":"p1","title":"second","typeOfPaper":"article"}"#;
        let (store, report) = ingest(lines);
        assert_eq!(report.overwrites, 1);
        assert_eq!(store.snapshot().publication("p1").unwrap().title, "second");
    }

    #[test]
    fn loading_twice_is_idempotent() {
        let lines = format!("{AUTHORS}\n{}", r#"{"id":"p1","title":"A","booktitle":"HCI (1)","authorIds":["a2"]}"#);
        let store = Store::in_memory();
        load_corpus(lines.as_bytes(), InputFormat::Jsonl, &store).unwrap();
        let once: Vec<Publication> = store.snapshot().publications().cloned().collect();
        let venues_once = store.snapshot().venues().count();
        load_corpus(lines.as_bytes(), InputFormat::Jsonl, &store).unwrap();
        let twice: Vec<Publication> = store.snapshot().publications().cloned().collect();
        assert_eq!(once, twice);
        assert_eq!(venues_once, store.snapshot().venues().count());
    }

    #[test]
    fn csv_adapter() {
        let csv = "id,title,yearPublished,typeOfPaper,fieldsOfStudy,openAccess,pages\n\
                   p1,\"Title, with comma\",2019,article,Computer Science;Mathematics,true,1-2\n\
                   p2,,2019,article,,,\n";
        let store = Store::in_memory();
        let report = load_corpus(csv.as_bytes(), InputFormat::Csv, &store).unwrap();
        assert_eq!((report.records_accepted, report.records_rejected), (1, 1));
        let snap = store.snapshot();
        let p = snap.publication("p1").unwrap();
        assert_eq!(p.title, "Title, with comma");
        assert_eq!(p.fields_of_study.len(), 2);
        assert_eq!(p.open_access, Some(true));
    }

    #[test]
    fn report_merge_is_associative() {
        let r = |a, b, reason: &str| IngestReport {
            records_read: a + b,
            records_accepted: a,
            records_rejected: b,
            rejection_reasons: BTreeMap::from([(reason.to_string(), b)]),
            overwrites: 0,
        };
        let (x, y, z) = (r(1, 2, "m"), r(3, 1, "n"), r(0, 4, "m"));
        assert_eq!(x.clone().merge(y.clone()).merge(z.clone()), x.merge(y.merge(z)));
    }
}
