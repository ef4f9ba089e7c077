//! Aggregation requests and results, independent of HTTP.
//!
//! The same [`AggregateRequest`] drives `POST /aggregate/{operation}`,
//! `GET /export` and the `query`/`export` CLI subcommands.

use std::fmt;
use std::str::FromStr;

use insights_core::aggregate::{
    activity_window, citation_bins, citations_per_year, co_occurrence, count_per_year, distribution,
    entity_values, grid_rows, top_k, Activity, AggregateError, BinCounts, CitationBin, CitationDirection,
    DistributionSummary, GridRow, Metric, TopEntry, YearSeries,
};
use insights_core::queryfilter::{canonical_key, Dimension, FilterSet};
use insights_core::store::{Snapshot, StoreError};
use insights_core::Publication;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    PerYear,
    Grid,
    Distribution,
    TopK,
    Bins,
    CoOccurrence,
    Activity,
}

impl Operation {
    pub const ALL: [Operation; 7] = [
        Operation::PerYear,
        Operation::Grid,
        Operation::Distribution,
        Operation::TopK,
        Operation::Bins,
        Operation::CoOccurrence,
        Operation::Activity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Operation::PerYear => "per_year",
            Operation::Grid => "grid",
            Operation::Distribution => "distribution",
            Operation::TopK => "top_k",
            Operation::Bins => "bins",
            Operation::CoOccurrence => "co_occurrence",
            Operation::Activity => "activity",
        }
    }
}

impl FromStr for Operation {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operation::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| QueryError::Malformed(format!("unknown operation {s:?}")))
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("{0}")]
    Malformed(String),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn default_k() -> usize {
    10
}

/// Parameters of one aggregation. Fields an operation does not use are
/// ignored, but still rejected if unknown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregateRequest {
    pub filter: FilterSet,
    pub dimension: Dimension,
    pub metric: Metric,
    pub direction: CitationDirection,
    pub k: usize,
    /// The entity co-occurrence is computed around.
    pub selected: Option<String>,
    pub window: Option<[i32; 2]>,
    pub full_range: Option<[i32; 2]>,
    pub exclude_others: bool,
}

impl Default for AggregateRequest {
    fn default() -> Self {
        AggregateRequest {
            filter: FilterSet::default(),
            dimension: Dimension::Paper,
            metric: Metric::Papers,
            direction: CitationDirection::Incoming,
            k: default_k(),
            selected: None,
            window: None,
            full_range: None,
            exclude_others: false,
        }
    }
}

impl AggregateRequest {
    pub fn parse(body: &[u8]) -> Result<AggregateRequest, QueryError> {
        if body.iter().all(u8::is_ascii_whitespace) {
            return Ok(AggregateRequest::default());
        }
        serde_json::from_slice(body).map_err(|e| QueryError::Malformed(format!("invalid request: {e}")))
    }

    /// Cache key; equal for semantically equal requests.
    pub fn cache_key(&self, op: Operation) -> String {
        let direction = match self.direction {
            CitationDirection::Incoming => "in",
            CitationDirection::Outgoing => "out",
        };
        let extra = match op {
            Operation::PerYear => format!("dir={direction}"),
            Operation::Grid | Operation::Bins => String::new(),
            Operation::Distribution => format!("dir={direction};ex={}", self.exclude_others),
            Operation::TopK => format!("k={};ex={}", self.k, self.exclude_others),
            Operation::CoOccurrence => format!("sel={}", serde_json::to_string(&self.selected).expect("string")),
            Operation::Activity => format!("win={:?};full={:?}", self.window, self.full_range),
        };
        canonical_key(&format!("{op}[{extra}]"), Some(self.dimension), Some(self.metric.as_str()), &self.filter)
    }
}

/// One row of the raw-record grid shown for the paper dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRow {
    pub id: String,
    pub title: String,
    pub year: Option<i32>,
    pub venue: Option<String>,
    pub type_of_paper: String,
    pub in_citations: u64,
    pub out_citations: u64,
}

impl PaperRow {
    fn of(p: &Publication) -> PaperRow {
        PaperRow {
            id: p.id.clone(),
            title: p.title.clone(),
            year: p.year_published,
            venue: p.venue_name.clone(),
            type_of_paper: p.type_of_paper.as_str().to_string(),
            in_citations: p.in_citations_count,
            out_citations: p.out_citations_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AggregateOutput {
    PerYear(YearSeries),
    Grid(Vec<GridRow>),
    Papers(Vec<PaperRow>),
    /// `None` when the selection is empty.
    Distribution(Option<DistributionSummary>),
    TopK(Vec<TopEntry>),
    Bins(BinCounts),
    CoOccurrence(std::collections::BTreeMap<String, u64>),
    Activity(Activity),
}

fn row(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn struct_rows<T: Serialize>(items: &[T]) -> Vec<Map<String, Value>> {
    items
        .iter()
        .map(|i| match serde_json::to_value(i).expect("row serializes") {
            Value::Object(m) => m,
            _ => unreachable!("rows are structs"),
        })
        .collect()
}

impl AggregateOutput {
    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("aggregate output serializes")
    }

    /// Column names of [`AggregateOutput::rows`], present even when there
    /// are no rows.
    pub fn columns(&self) -> Vec<&'static str> {
        match self {
            AggregateOutput::PerYear(_) => vec!["year", "value"],
            AggregateOutput::Grid(_) => vec!["name", "first_year", "last_year", "papers", "citations", "avg_citations"],
            AggregateOutput::Papers(_) => {
                vec!["id", "title", "year", "venue", "type_of_paper", "in_citations", "out_citations"]
            }
            AggregateOutput::Distribution(_) => vec!["min", "q1", "median", "q3", "max", "avg", "n"],
            AggregateOutput::TopK(_) => vec!["name", "label", "value"],
            AggregateOutput::Bins(_) => vec!["bin", "count"],
            AggregateOutput::CoOccurrence(_) => vec!["name", "count"],
            AggregateOutput::Activity(_) => vec!["active_count", "new_count"],
        }
    }

    /// Flat table form used by exports. Every row carries every column.
    pub fn rows(&self) -> Vec<Map<String, Value>> {
        let mut rows = match self {
            AggregateOutput::PerYear(s) => {
                let mut rows: Vec<_> =
                    s.years.iter().map(|(y, c)| row([("year", Value::from(*y)), ("value", Value::from(*c))])).collect();
                if s.na > 0 {
                    rows.push(row([("year", Value::from("NA")), ("value", Value::from(s.na))]));
                }
                rows
            }
            AggregateOutput::Grid(g) => struct_rows(g),
            AggregateOutput::Papers(p) => struct_rows(p),
            AggregateOutput::Distribution(d) => struct_rows(d.as_slice()),
            AggregateOutput::TopK(t) => struct_rows(t),
            AggregateOutput::Bins(b) => CitationBin::ALL
                .iter()
                .map(|bin| row([("bin", Value::from(bin.label())), ("count", Value::from(b.get(*bin)))]))
                .collect(),
            AggregateOutput::CoOccurrence(m) => {
                m.iter().map(|(n, c)| row([("name", Value::from(n.as_str())), ("count", Value::from(*c))])).collect()
            }
            AggregateOutput::Activity(a) => struct_rows(std::slice::from_ref(a)),
        };
        let columns = self.columns();
        for r in &mut rows {
            for c in &columns {
                r.entry(c.to_string()).or_insert(Value::Null);
            }
        }
        rows
    }
}

fn pair(v: Option<[i32; 2]>, name: &str) -> Result<(i32, i32), QueryError> {
    v.map(|[a, b]| (a, b)).ok_or_else(|| QueryError::Malformed(format!("activity requires {name}")))
}

/// Runs `op` over the publications of `snapshot` selected by the request's
/// filter.
pub fn run(snapshot: &Snapshot, op: Operation, req: &AggregateRequest) -> Result<AggregateOutput, QueryError> {
    let pubs = snapshot.select(&req.filter)?;
    let dim = req.dimension;
    Ok(match op {
        Operation::PerYear => AggregateOutput::PerYear(match req.metric {
            Metric::Papers => count_per_year(&pubs, dim),
            Metric::Citations => citations_per_year(&pubs, req.direction),
        }),
        Operation::Grid if dim == Dimension::Paper => {
            AggregateOutput::Papers(pubs.iter().map(|p| PaperRow::of(p)).collect())
        }
        Operation::Grid => AggregateOutput::Grid(grid_rows(&pubs, dim)?),
        Operation::Distribution => {
            let values = entity_values(&pubs, dim, req.metric, req.direction, req.exclude_others);
            AggregateOutput::Distribution(match distribution(&values) {
                Ok(d) => Some(d),
                Err(AggregateError::EmptyInput) => None,
                Err(e) => return Err(e.into()),
            })
        }
        Operation::TopK => AggregateOutput::TopK(top_k(&pubs, dim, req.metric, req.k, req.exclude_others)?),
        Operation::Bins => AggregateOutput::Bins(citation_bins(&pubs)),
        Operation::CoOccurrence => {
            let selected =
                req.selected.as_deref().ok_or_else(|| QueryError::Malformed("co_occurrence requires selected".into()))?;
            AggregateOutput::CoOccurrence(co_occurrence(&pubs, dim, selected)?)
        }
        Operation::Activity => {
            let window = pair(req.window, "window")?;
            let full = pair(req.full_range, "full_range")?;
            AggregateOutput::Activity(activity_window(&pubs, dim, window, full)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use insights_core::{synth, Store};

    fn store() -> Store {
        let s = Store::in_memory();
        s.write(|b| {
            for p in synth::corpus(120, 4) {
                b.upsert_publication(p)?;
            }
            Ok::<_, StoreError>(())
        })
        .unwrap();
        s
    }

    #[test]
    fn every_operation_has_complete_rows() {
        let s = store();
        let snap = s.snapshot();
        let req = AggregateRequest {
            dimension: Dimension::Author,
            selected: Some(synth::AUTHORS[0].to_string()),
            window: Some([2010, synth::YEARS.1]),
            full_range: Some([synth::YEARS.0, synth::YEARS.1]),
            ..Default::default()
        };
        for op in Operation::ALL {
            let out = run(&snap, op, &req).unwrap();
            let cols = out.columns();
            for r in out.rows() {
                assert_eq!(r.len(), cols.len(), "{op}");
            }
        }
    }

    #[test]
    fn k_zero_is_rejected() {
        let s = store();
        let req = AggregateRequest { k: 0, ..Default::default() };
        assert!(matches!(run(&s.snapshot(), Operation::TopK, &req), Err(QueryError::Aggregate(AggregateError::InvalidK))));
    }

    #[test]
    fn cache_keys_ignore_filter_spelling() {
        let a: AggregateRequest = serde_json::from_str(r#"{"filter":{"authors":["B","a"]},"k":3}"#).unwrap();
        let b: AggregateRequest = serde_json::from_str(r#"{"filter":{"authors":["A","b","a"]},"k":3}"#).unwrap();
        assert_eq!(a.cache_key(Operation::TopK), b.cache_key(Operation::TopK));
        let c = AggregateRequest { k: 4, ..a.clone() };
        assert_ne!(a.cache_key(Operation::TopK), c.cache_key(Operation::TopK));
        assert_ne!(a.cache_key(Operation::TopK), a.cache_key(Operation::Grid));
    }

    #[test]
    fn unknown_fields_are_malformed() {
        assert!(AggregateRequest::parse(br#"{"dimensoin":"author"}"#).is_err());
        assert!(AggregateRequest::parse(br#"{"filter":{"year_range":{"min":3,"max":1}}}"#).is_ok());
        assert_eq!(AggregateRequest::parse(b"").unwrap(), AggregateRequest::default());
    }
}
