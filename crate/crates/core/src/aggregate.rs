//! Aggregations behind the dashboards: per-year counts, entity grids,
//! distributions, top-k rankings, citation bins, co-occurrence and activity
//! windows.
//!
//! Every function is pure over a borrowed slice of publications. Callers
//! filter first (see [`crate::store::Snapshot::select`]). Multi-valued
//! dimensions (authors, fields of study) count a publication once per value.
//! Records without a value for the dimension fall into an "Others" bucket
//! wherever entities are listed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Publication, UnknownValue, OTHERS};
use crate::queryfilter::Dimension;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AggregateError {
    #[error("empty input")]
    EmptyInput,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("operation does not support dimension {0}")]
    UnsupportedDimension(Dimension),
    #[error("invalid year window: {0}")]
    InvalidWindow(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Citations,
    #[default]
    Papers,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Citations => "citations",
            Metric::Papers => "papers",
        }
    }
}

impl FromStr for Metric {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "citations" => Ok(Metric::Citations),
            "papers" => Ok(Metric::Papers),
            _ => Err(UnknownValue { kind: "metric", value: s.to_string() }),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Incoming citations (received) or outgoing (references made).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CitationDirection {
    #[default]
    Incoming,
    Outgoing,
}

impl CitationDirection {
    pub fn count(self, p: &Publication) -> u64 {
        match self {
            CitationDirection::Incoming => p.in_citations_count,
            CitationDirection::Outgoing => p.out_citations_count,
        }
    }
}

/// Distinct values of `dimension` on one publication. Empty when the record
/// has none (it then belongs to "Others").
pub fn dimension_values(p: &Publication, dimension: Dimension) -> Vec<&str> {
    let mut out: Vec<&str> = match dimension {
        Dimension::Paper => vec![p.id.as_str()],
        Dimension::Author => p.author_names.iter().map(String::as_str).collect(),
        Dimension::Venue => p.venue_name.as_deref().into_iter().collect(),
        Dimension::TypeOfPaper => vec![p.type_of_paper.as_str()],
        Dimension::FieldOfStudy => p.fields_of_study.iter().map(|f| f.as_str()).collect(),
        Dimension::Publisher => p.publisher.as_deref().into_iter().collect(),
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// Like [`dimension_values`] but substitutes "Others" for a missing value.
fn values_or_others(p: &Publication, dimension: Dimension) -> Vec<&str> {
    let values = dimension_values(p, dimension);
    if values.is_empty() {
        vec![OTHERS]
    } else {
        values
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearSeries {
    pub years: BTreeMap<i32, u64>,
    /// Records without a year.
    pub na: u64,
}

impl YearSeries {
    pub fn total(&self) -> u64 {
        self.years.values().sum::<u64>() + self.na
    }
}

/// Number of unique dimension elements per year. For papers this is the
/// publication count; for other dimensions distinct values are counted, so
/// an author with three papers in one year counts once for that year.
pub fn count_per_year(pubs: &[&Publication], dimension: Dimension) -> YearSeries {
    if dimension == Dimension::Paper {
        let mut series = YearSeries::default();
        for p in pubs {
            match p.year_published {
                Some(y) => *series.years.entry(y).or_insert(0) += 1,
                None => series.na += 1,
            }
        }
        return series;
    }
    let mut per_year: BTreeMap<Option<i32>, BTreeSet<&str>> = BTreeMap::new();
    for p in pubs {
        let values = dimension_values(p, dimension);
        if !values.is_empty() {
            per_year.entry(p.year_published).or_default().extend(values);
        }
    }
    let mut series = YearSeries::default();
    for (year, values) in per_year {
        match year {
            Some(y) => {
                series.years.insert(y, values.len() as u64);
            }
            None => series.na = values.len() as u64,
        }
    }
    series
}

/// Citation totals per year of the citing or cited publication.
pub fn citations_per_year(pubs: &[&Publication], direction: CitationDirection) -> YearSeries {
    let mut series = YearSeries::default();
    for p in pubs {
        let n = direction.count(p);
        match p.year_published {
            Some(y) => *series.years.entry(y).or_insert(0) += n,
            None => series.na += n,
        }
    }
    series
}

/// Rounds a citations/papers ratio half-up to two decimals, exactly, using
/// integer arithmetic.
pub fn round_avg(citations: u64, papers: u64) -> f64 {
    if papers == 0 {
        return 0.0;
    }
    let (c, p) = (u128::from(citations), u128::from(papers));
    let hundredths = (200 * c + p) / (2 * p);
    hundredths as f64 / 100.0
}

/// `124.54`, `2,128.51`: the display form used by tables.
pub fn format_avg(citations: u64, papers: u64) -> String {
    let hundredths = if papers == 0 {
        0
    } else {
        (200 * u128::from(citations) + u128::from(papers)) / (2 * u128::from(papers))
    };
    let whole = (hundredths / 100).to_string();
    let mut grouped = String::new();
    for (i, ch) in whole.chars().enumerate() {
        if i > 0 && (whole.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!("{grouped}.{:02}", hundredths % 100)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub name: String,
    pub first_year: Option<i32>,
    pub last_year: Option<i32>,
    pub papers: u64,
    pub citations: u64,
    /// Full precision; see [`GridRow::avg_display`] for the table form.
    pub avg_citations: f64,
}

impl GridRow {
    pub fn new(name: impl Into<String>, first_year: Option<i32>, last_year: Option<i32>, papers: u64, citations: u64) -> Self {
        let avg_citations = if papers == 0 { 0.0 } else { citations as f64 / papers as f64 };
        GridRow { name: name.into(), first_year, last_year, papers, citations, avg_citations }
    }

    pub fn avg_rounded(&self) -> f64 {
        round_avg(self.citations, self.papers)
    }

    pub fn avg_display(&self) -> String {
        format_avg(self.citations, self.papers)
    }
}

#[derive(Debug, Default)]
struct EntityTotals {
    papers: u64,
    citations: u64,
    first: Option<i32>,
    last: Option<i32>,
}

impl EntityTotals {
    fn add(&mut self, p: &Publication) {
        self.papers += 1;
        self.citations += p.in_citations_count;
        if let Some(y) = p.year_published {
            self.first = Some(self.first.map_or(y, |f| f.min(y)));
            self.last = Some(self.last.map_or(y, |l| l.max(y)));
        }
    }
}

fn entity_totals<'a>(pubs: &[&'a Publication], dimension: Dimension) -> HashMap<&'a str, EntityTotals> {
    let mut totals: HashMap<&str, EntityTotals> = HashMap::new();
    for p in pubs {
        for v in values_or_others(p, dimension) {
            totals.entry(v).or_default().add(p);
        }
    }
    totals
}

/// One row per distinct dimension value, sorted by name with "Others" last.
pub fn grid_rows(pubs: &[&Publication], dimension: Dimension) -> Result<Vec<GridRow>, AggregateError> {
    if dimension == Dimension::Paper {
        return Err(AggregateError::UnsupportedDimension(dimension));
    }
    let mut rows: Vec<GridRow> = entity_totals(pubs, dimension)
        .into_iter()
        .map(|(name, t)| GridRow::new(name, t.first, t.last, t.papers, t.citations))
        .collect();
    rows.sort_by(|a, b| (a.name == OTHERS).cmp(&(b.name == OTHERS)).then_with(|| a.name.cmp(&b.name)));
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub avg: f64,
    pub n: usize,
}

/// Five-number summary plus mean. Quartiles interpolate linearly at
/// position `p * (n - 1)` of the sorted values.
pub fn distribution(values: &[f64]) -> Result<DistributionSummary, AggregateError> {
    if values.is_empty() {
        return Err(AggregateError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let at = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    };
    Ok(DistributionSummary {
        min: sorted[0],
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
        max: sorted[sorted.len() - 1],
        avg: sorted.iter().sum::<f64>() / sorted.len() as f64,
        n: sorted.len(),
    })
}

/// Per-entity metric values, the population behind a boxplot. For the paper
/// dimension each publication contributes its own citation count in
/// `direction` (or 1 for the papers metric).
pub fn entity_values(
    pubs: &[&Publication],
    dimension: Dimension,
    metric: Metric,
    direction: CitationDirection,
    exclude_others: bool,
) -> Vec<f64> {
    if dimension == Dimension::Paper {
        return pubs
            .iter()
            .map(|p| match metric {
                Metric::Citations => direction.count(p) as f64,
                Metric::Papers => 1.0,
            })
            .collect();
    }
    let mut totals: Vec<(&str, EntityTotals)> = entity_totals(pubs, dimension).into_iter().collect();
    totals.sort_by(|a, b| a.0.cmp(b.0));
    totals
        .into_iter()
        .filter(|(name, _)| !(exclude_others && *name == OTHERS))
        .map(|(_, t)| match metric {
            Metric::Citations => t.citations as f64,
            Metric::Papers => t.papers as f64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopEntry {
    /// Entity key; for papers this is the publication id.
    pub name: String,
    /// Display label when it differs from `name` (paper titles).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub value: u64,
}

/// Entities ranked by `metric` descending, ties by name ascending.
pub fn top_k(
    pubs: &[&Publication],
    dimension: Dimension,
    metric: Metric,
    k: usize,
    exclude_others: bool,
) -> Result<Vec<TopEntry>, AggregateError> {
    if k == 0 {
        return Err(AggregateError::InvalidK);
    }
    let mut entries: Vec<TopEntry> = if dimension == Dimension::Paper {
        pubs.iter()
            .map(|p| TopEntry {
                name: p.id.clone(),
                label: Some(p.title.clone()),
                value: match metric {
                    Metric::Citations => p.in_citations_count,
                    Metric::Papers => 1,
                },
            })
            .collect()
    } else {
        entity_totals(pubs, dimension)
            .into_iter()
            .filter(|(name, _)| !(exclude_others && *name == OTHERS))
            .map(|(name, t)| TopEntry {
                name: name.to_string(),
                label: None,
                value: match metric {
                    Metric::Citations => t.citations,
                    Metric::Papers => t.papers,
                },
            })
            .collect()
    };
    entries.sort_by(|a, b| b.value.cmp(&a.value).then_with(|| a.name.cmp(&b.name)));
    entries.truncate(k);
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CitationBin {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1-9")]
    Ones,
    #[serde(rename = "10-99")]
    Tens,
    #[serde(rename = "100-999")]
    Hundreds,
    #[serde(rename = "1000+")]
    Thousands,
}

impl CitationBin {
    pub const ALL: [CitationBin; 5] =
        [CitationBin::Zero, CitationBin::Ones, CitationBin::Tens, CitationBin::Hundreds, CitationBin::Thousands];

    pub fn of(count: u64) -> CitationBin {
        match count {
            0 => CitationBin::Zero,
            1..=9 => CitationBin::Ones,
            10..=99 => CitationBin::Tens,
            100..=999 => CitationBin::Hundreds,
            _ => CitationBin::Thousands,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CitationBin::Zero => "0",
            CitationBin::Ones => "1-9",
            CitationBin::Tens => "10-99",
            CitationBin::Hundreds => "100-999",
            CitationBin::Thousands => "1000+",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinCounts {
    #[serde(rename = "0")]
    pub zero: u64,
    #[serde(rename = "1-9")]
    pub ones: u64,
    #[serde(rename = "10-99")]
    pub tens: u64,
    #[serde(rename = "100-999")]
    pub hundreds: u64,
    #[serde(rename = "1000+")]
    pub thousands: u64,
}

impl BinCounts {
    pub fn get(&self, bin: CitationBin) -> u64 {
        match bin {
            CitationBin::Zero => self.zero,
            CitationBin::Ones => self.ones,
            CitationBin::Tens => self.tens,
            CitationBin::Hundreds => self.hundreds,
            CitationBin::Thousands => self.thousands,
        }
    }

    fn bump(&mut self, bin: CitationBin) {
        match bin {
            CitationBin::Zero => self.zero += 1,
            CitationBin::Ones => self.ones += 1,
            CitationBin::Tens => self.tens += 1,
            CitationBin::Hundreds => self.hundreds += 1,
            CitationBin::Thousands => self.thousands += 1,
        }
    }

    pub fn total(&self) -> u64 {
        CitationBin::ALL.iter().map(|b| self.get(*b)).sum()
    }
}

/// Sorts publications into incoming-citation bins.
pub fn citation_bins(pubs: &[&Publication]) -> BinCounts {
    let mut bins = BinCounts::default();
    for p in pubs {
        bins.bump(CitationBin::of(p.in_citations_count));
    }
    bins
}

/// For publications carrying `selected`, how often each other value of the
/// dimension appears alongside it.
pub fn co_occurrence(
    pubs: &[&Publication],
    dimension: Dimension,
    selected: &str,
) -> Result<BTreeMap<String, u64>, AggregateError> {
    if !matches!(dimension, Dimension::Author | Dimension::FieldOfStudy) {
        return Err(AggregateError::UnsupportedDimension(dimension));
    }
    let mut out = BTreeMap::new();
    for p in pubs {
        let values = dimension_values(p, dimension);
        if values.contains(&selected) {
            for v in values.into_iter().filter(|v| *v != selected) {
                *out.entry(v.to_string()).or_insert(0) += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activity {
    /// Entities with at least one publication inside the window.
    pub active_count: u64,
    /// Entities present over the full range but absent before the window.
    pub new_count: u64,
}

/// Active and newly appearing entities in `window`, using the inverted span
/// `[full_range.0, window.0 - 1]` to decide what is new.
pub fn activity_window(
    pubs: &[&Publication],
    dimension: Dimension,
    window: (i32, i32),
    full_range: (i32, i32),
) -> Result<Activity, AggregateError> {
    let (y0, y2) = full_range;
    let (y1, w2) = window;
    if !(y0 <= y1 && y1 <= w2) || w2 != y2 {
        return Err(AggregateError::InvalidWindow(format!(
            "window [{y1}, {w2}] must end the full range [{y0}, {y2}]"
        )));
    }
    let mut active = BTreeSet::new();
    let mut total = BTreeSet::new();
    let mut before = BTreeSet::new();
    for p in pubs {
        let Some(y) = p.year_published else { continue };
        if !(y0..=y2).contains(&y) {
            continue;
        }
        let values = dimension_values(p, dimension);
        if y >= y1 {
            active.extend(values.iter().copied());
        } else {
            before.extend(values.iter().copied());
        }
        total.extend(values);
    }
    Ok(Activity {
        active_count: active.len() as u64,
        new_count: (total.len() - before.len()) as u64,
    })
}
