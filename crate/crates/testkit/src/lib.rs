//! Slow, obviously-correct reference implementations. Nothing here shares
//! code with the library paths it checks; each oracle works from the field
//! definitions directly.

use std::collections::{BTreeMap, BTreeSet};

use insights_core::corpus::Publication;
use insights_core::queryfilter::FilterSet;

/// Filter evaluation by direct string comparison, one slot at a time.
pub fn filter_matches(p: &Publication, f: &FilterSet) -> bool {
    fn any_equal(wanted: &Option<Vec<String>>, have: &[String]) -> bool {
        match wanted {
            None => true,
            Some(w) if w.is_empty() => true,
            Some(w) => have.iter().any(|h| w.iter().any(|x| x.to_lowercase() == h.to_lowercase())),
        }
    }
    let venue: Vec<String> = p.venue_name.iter().cloned().collect();
    let publisher: Vec<String> = p.publisher.iter().cloned().collect();
    let ty = vec![p.type_of_paper.to_string()];
    let fields: Vec<String> = p.fields_of_study.iter().map(|f| f.to_string()).collect();
    let access: Vec<String> = match p.open_access {
        Some(true) => vec!["open".to_string()],
        Some(false) => vec!["closed".to_string()],
        None => vec![],
    };
    let year_ok = match (f.year_range, p.year_published) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(r), Some(y)) => r.min <= y as i64 && y as i64 <= r.max,
    };
    let cites_ok = match f.citation_range {
        None => true,
        Some(r) => r.min <= p.in_citations_count as i64 && p.in_citations_count as i64 <= r.max,
    };
    any_equal(&f.authors, &p.author_names)
        && any_equal(&f.venues, &venue)
        && any_equal(&f.publishers, &publisher)
        && any_equal(&f.types_of_paper, &ty)
        && any_equal(&f.fields_of_study, &fields)
        && any_equal(&f.access_types, &access)
        && year_ok
        && cites_ok
}

pub fn filter_ids(pubs: &[Publication], f: &FilterSet) -> BTreeSet<String> {
    pubs.iter().filter(|p| filter_matches(p, f)).map(|p| p.id.clone()).collect()
}

/// Dimension values as plain strings; empty when the record has none.
pub fn values(p: &Publication, dimension: &str) -> Vec<String> {
    let mut v: Vec<String> = match dimension {
        "paper" => vec![p.id.clone()],
        "author" => p.author_names.clone(),
        "venue" => p.venue_name.iter().cloned().collect(),
        "type_of_paper" => vec![p.type_of_paper.to_string()],
        "field_of_study" => p.fields_of_study.iter().map(|f| f.to_string()).collect(),
        "publisher" => p.publisher.iter().cloned().collect(),
        other => panic!("unknown dimension {other}"),
    };
    v.sort();
    v.dedup();
    v
}

fn values_or_others(p: &Publication, dimension: &str) -> Vec<String> {
    let v = values(p, dimension);
    if v.is_empty() {
        vec!["Others".to_string()]
    } else {
        v
    }
}

/// Distinct dimension values per year; `None` keys collect records without
/// a year. Records lacking a value contribute nothing.
pub fn count_per_year(pubs: &[Publication], dimension: &str) -> BTreeMap<Option<i32>, u64> {
    let years: BTreeSet<Option<i32>> = pubs.iter().map(|p| p.year_published).collect();
    let mut out = BTreeMap::new();
    for y in years {
        let distinct: BTreeSet<String> =
            pubs.iter().filter(|p| p.year_published == y).flat_map(|p| values(p, dimension)).collect();
        if !distinct.is_empty() {
            out.insert(y, distinct.len() as u64);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub first_year: Option<i32>,
    pub last_year: Option<i32>,
    pub papers: u64,
    pub citations: u64,
}

/// One row per entity, "Others" included, sorted by name with "Others" last.
pub fn grid(pubs: &[Publication], dimension: &str) -> Vec<Row> {
    let names: BTreeSet<String> = pubs.iter().flat_map(|p| values_or_others(p, dimension)).collect();
    let mut rows: Vec<Row> = names
        .into_iter()
        .map(|name| {
            let mine: Vec<&Publication> =
                pubs.iter().filter(|p| values_or_others(p, dimension).contains(&name)).collect();
            let years: Vec<i32> = mine.iter().filter_map(|p| p.year_published).collect();
            Row {
                first_year: years.iter().min().copied(),
                last_year: years.iter().max().copied(),
                papers: mine.len() as u64,
                citations: mine.iter().map(|p| p.in_citations_count).sum(),
                name,
            }
        })
        .collect();
    if let Some(i) = rows.iter().position(|r| r.name == "Others") {
        let others = rows.remove(i);
        rows.push(others);
    }
    rows
}

/// `(name, value)` ranked by value descending, then name, truncated to `k`.
pub fn top_k(pubs: &[Publication], dimension: &str, citations: bool, k: usize, exclude_others: bool) -> Vec<(String, u64)> {
    let mut all: Vec<(String, u64)> = if dimension == "paper" {
        pubs.iter().map(|p| (p.id.clone(), if citations { p.in_citations_count } else { 1 })).collect()
    } else {
        grid(pubs, dimension)
            .into_iter()
            .filter(|r| !(exclude_others && r.name == "Others"))
            .map(|r| (r.name, if citations { r.citations } else { r.papers }))
            .collect()
    };
    // Selection sort keeps the tie rule explicit.
    let mut out = Vec::new();
    while out.len() < k && !all.is_empty() {
        let mut best = 0;
        for i in 1..all.len() {
            let (ref n, v) = all[i];
            let (ref bn, bv) = all[best];
            if v > bv || (v == bv && n < bn) {
                best = i;
            }
        }
        out.push(all.remove(best));
    }
    out
}

/// Bin counts in label order `0, 1-9, 10-99, 100-999, 1000+`.
pub fn citation_bins(pubs: &[Publication]) -> [u64; 5] {
    let mut out = [0; 5];
    for p in pubs {
        let c = p.in_citations_count;
        let i = if c == 0 {
            0
        } else if c < 10 {
            1
        } else if c < 100 {
            2
        } else if c < 1000 {
            3
        } else {
            4
        };
        out[i] += 1;
    }
    out
}

pub fn co_occurrence(pubs: &[Publication], dimension: &str, selected: &str) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for p in pubs {
        let v = values(p, dimension);
        if v.iter().any(|x| x == selected) {
            for x in v {
                if x != selected {
                    *out.entry(x).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

/// `(active, new)` for the window `[w1, y2]` inside `[y0, y2]`.
pub fn activity(pubs: &[Publication], dimension: &str, y0: i32, w1: i32, y2: i32) -> (u64, u64) {
    let entities_in = |lo: i32, hi: i32| -> BTreeSet<String> {
        pubs.iter()
            .filter(|p| p.year_published.is_some_and(|y| lo <= y && y <= hi))
            .flat_map(|p| values(p, dimension))
            .collect()
    };
    let active = entities_in(w1, y2);
    let before = entities_in(y0, w1 - 1);
    let new = active.iter().filter(|e| !before.contains(*e)).count();
    (active.len() as u64, new as u64)
}

/// Quartile by linear interpolation between closest ranks at `p * (n - 1)`.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (v.len() - 1) as f64 * p;
    let lower = h as usize;
    if lower + 1 >= v.len() {
        return v[v.len() - 1];
    }
    v[lower] + (h - lower as f64) * (v[lower + 1] - v[lower])
}

/// Edit distance by the full dynamic-programming table over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let width = b.len() + 1;
    let mut table = vec![0usize; (a.len() + 1) * width];
    for i in 0..=a.len() {
        table[i * width] = i;
    }
    for j in 0..=b.len() {
        table[j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = usize::from(a[i - 1] != b[j - 1]);
            let up = table[(i - 1) * width + j] + 1;
            let left = table[i * width + j - 1] + 1;
            let diag = table[(i - 1) * width + j - 1] + sub;
            table[i * width + j] = up.min(left).min(diag);
        }
    }
    table[a.len() * width + b.len()]
}

pub fn similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        1.0
    } else {
        1.0 - levenshtein(a, b) as f64 / longest as f64
    }
}

/// Best match among `(id, text)` candidates by brute force: highest
/// similarity at or above `threshold`, ties to the smallest id. Inputs are
/// compared lowercased with whitespace collapsed.
pub fn best_match(query: &str, candidates: &[(String, String)], threshold: f64) -> Option<(String, f64)> {
    let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    let q = norm(query);
    let mut best: Option<(String, f64)> = None;
    for (id, text) in candidates {
        let s = similarity(&q, &norm(text));
        if s + 1e-12 < threshold {
            continue;
        }
        best = match best {
            Some((bid, bs)) if bs > s || (bs == s && bid <= *id) => Some((bid, bs)),
            _ => Some((id.clone(), s)),
        };
    }
    best
}

/// `frequency * sum_t p(t|w) ln(p(t|w) / p(t))` from explicit inputs.
pub fn saliency(frequency: f64, p_topic_given_word: &[f64], p_topic: &[f64]) -> f64 {
    let mut s = 0.0;
    for t in 0..p_topic.len() {
        if p_topic_given_word[t] > 0.0 {
            s += p_topic_given_word[t] * (p_topic_given_word[t] / p_topic[t]).ln();
        }
    }
    frequency * s
}

/// Half-up rounding to two decimals via decimal string arithmetic.
pub fn avg_two_decimals(citations: u64, papers: u64) -> String {
    let thousandths = citations * 1000 / papers;
    let hundredths = thousandths / 10 + if thousandths % 10 >= 5 { 1 } else { 0 };
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}
