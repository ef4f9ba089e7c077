//! Fuzzy record linkage: reference titles to corpus publications, extracted
//! author names to corpus authors, and a resampled estimate of how often
//! the matching is wrong.
//!
//! Similarity is `1 - levenshtein(a, b) / max(len(a), len(b))` over Unicode
//! scalar values, after case folding (optional) and whitespace collapsing.
//! Hyphens and other punctuation are ordinary characters.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Author, Publication};
use crate::store::{Store, StoreError};

/// Slack on the similarity threshold so that exact rational boundaries such
/// as 4/5 = 0.8 are not lost to floating-point rounding.
const THRESHOLD_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkerConfig {
    pub min_similarity: f64,
    pub case_fold: bool,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        LinkerConfig { min_similarity: 0.8, case_fold: true }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinkerError {
    #[error("min_similarity {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("need at least {needed} labeled pairs, have {available}")]
    InsufficientData { needed: usize, available: usize },
}

impl LinkerConfig {
    pub fn new(min_similarity: f64) -> Result<Self, LinkerError> {
        let cfg = LinkerConfig { min_similarity, ..Default::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LinkerError> {
        if (0.0..=1.0).contains(&self.min_similarity) {
            Ok(())
        } else {
            Err(LinkerError::InvalidThreshold(self.min_similarity))
        }
    }

    fn accepts(&self, similarity: f64) -> bool {
        similarity + THRESHOLD_EPSILON >= self.min_similarity
    }
}

/// Normalized Levenshtein similarity in `[0, 1]`; two empty strings are
/// identical.
pub fn normalized_levenshtein(a: &str, b: &str) -> f64 {
    let (la, lb) = (a.chars().count(), b.chars().count());
    similarity_from(strsim::levenshtein(a, b), la.max(lb))
}

fn similarity_from(distance: usize, longest: usize) -> f64 {
    if longest == 0 {
        1.0
    } else {
        1.0 - distance as f64 / longest as f64
    }
}

/// Case folding and whitespace collapsing applied before matching.
pub fn normalize_for_matching(text: &str, case_fold: bool) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if case_fold {
        collapsed.to_lowercase()
    } else {
        collapsed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub id: String,
    pub similarity: f64,
}

/// Candidate strings bucketed by length so a lookup only scores entries that
/// could reach the threshold: `sim >= s` implies
/// `s * len(query) <= len(candidate) <= len(query) / s`.
#[derive(Debug, Clone)]
pub struct NameIndex {
    case_fold: bool,
    entries: Vec<(String, String)>,
    by_len: BTreeMap<usize, Vec<usize>>,
    exact: HashMap<String, Vec<usize>>,
}

/// Index over corpus titles.
pub type TitleIndex = NameIndex;
/// Index over corpus author names.
pub type AuthorIndex = NameIndex;

impl NameIndex {
    /// `items` yields `(id, text)` pairs.
    pub fn build<I, S, T>(items: I, case_fold: bool) -> NameIndex
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut index = NameIndex { case_fold, entries: Vec::new(), by_len: BTreeMap::new(), exact: HashMap::new() };
        for (id, text) in items {
            let norm = normalize_for_matching(text.as_ref(), case_fold);
            let slot = index.entries.len();
            index.by_len.entry(norm.chars().count()).or_default().push(slot);
            index.exact.entry(norm.clone()).or_default().push(slot);
            index.entries.push((id.into(), norm));
        }
        index
    }

    pub fn titles<'a>(pubs: impl IntoIterator<Item = &'a Publication>, cfg: &LinkerConfig) -> TitleIndex {
        NameIndex::build(pubs.into_iter().map(|p| (p.id.clone(), p.title.as_str())), cfg.case_fold)
    }

    pub fn authors<'a>(authors: impl IntoIterator<Item = &'a Author>, cfg: &LinkerConfig) -> AuthorIndex {
        NameIndex::build(authors.into_iter().map(|a| (a.id.clone(), a.full_name.as_str())), cfg.case_fold)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Highest-similarity entry for `query`, ignoring the threshold. Ties go
    /// to the lexicographically smallest id.
    pub fn best(&self, query: &str, min_similarity: f64) -> Option<Match> {
        let norm = normalize_for_matching(query, self.case_fold);
        if let Some(slots) = self.exact.get(&norm) {
            let id = slots.iter().map(|&i| &self.entries[i].0).min()?;
            return Some(Match { id: id.clone(), similarity: 1.0 });
        }
        let len = norm.chars().count();
        let s = min_similarity.clamp(0.0, 1.0);
        let lo = ((s * len as f64) - 1e-9).ceil().max(0.0) as usize;
        let hi = if s > 0.0 { ((len as f64 / s) + 1e-9).floor() as usize } else { usize::MAX };

        let mut best: Option<(f64, &str)> = None;
        for slots in self.by_len.range(lo..=hi).map(|(_, v)| v) {
            for &i in slots {
                let (id, text) = &self.entries[i];
                let longest = len.max(text.chars().count());
                let sim = similarity_from(strsim::levenshtein(&norm, text), longest);
                let better = match best {
                    None => true,
                    Some((b, bid)) => sim > b || (sim == b && id.as_str() < bid),
                };
                if better {
                    best = Some((sim, id));
                }
            }
        }
        best.map(|(similarity, id)| Match { id: id.to_string(), similarity })
    }

    /// Best entry at or above the configured threshold.
    pub fn lookup(&self, query: &str, cfg: &LinkerConfig) -> Option<Match> {
        self.best(query, cfg.min_similarity).filter(|m| cfg.accepts(m.similarity))
    }
}

/// Id of the corpus publication whose title best matches `reference_title`.
pub fn match_reference(reference_title: &str, corpus_titles: &TitleIndex, cfg: &LinkerConfig) -> Option<String> {
    corpus_titles.lookup(reference_title, cfg).map(|m| m.id)
}

/// Reference titles extracted from one publication's bibliography.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitingReferences {
    pub id: String,
    pub references: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationGraph {
    pub edges: BTreeSet<(String, String)>,
    pub unmatched_references: u64,
    pub total_references: u64,
    /// References that matched the citing publication itself.
    pub self_references: u64,
    /// References that resolved to an edge already present.
    pub duplicate_references: u64,
}

impl CitationGraph {
    /// Share of references pointing outside the corpus.
    pub fn external_fraction(&self) -> f64 {
        if self.total_references == 0 {
            0.0
        } else {
            self.unmatched_references as f64 / self.total_references as f64
        }
    }
}

/// Links every reference title to a corpus publication and rewrites the
/// in/out citation lists and counts of `publications` from the resulting
/// edge set. Publications absent from `references` end up with no outgoing
/// edges.
pub fn build_citation_graph(
    publications: &mut [Publication],
    references: &[CitingReferences],
    cfg: &LinkerConfig,
) -> CitationGraph {
    let index = NameIndex::titles(publications.iter(), cfg);
    let per_citer: Vec<(Vec<(String, String)>, u64, u64, u64)> = references
        .par_iter()
        .map(|citing| {
            let mut edges = Vec::new();
            let (mut unmatched, mut selfs) = (0, 0);
            for title in &citing.references {
                match match_reference(title, &index, cfg) {
                    None => unmatched += 1,
                    Some(id) if id == citing.id => selfs += 1,
                    Some(id) => edges.push((citing.id.clone(), id)),
                }
            }
            (edges, unmatched, selfs, citing.references.len() as u64)
        })
        .collect();

    let mut graph = CitationGraph::default();
    for (edges, unmatched, selfs, total) in per_citer {
        graph.unmatched_references += unmatched;
        graph.self_references += selfs;
        graph.total_references += total;
        for e in edges {
            if !graph.edges.insert(e) {
                graph.duplicate_references += 1;
            }
        }
    }

    let mut incoming: HashMap<&str, Vec<String>> = HashMap::new();
    let mut outgoing: HashMap<&str, Vec<String>> = HashMap::new();
    for (from, to) in &graph.edges {
        outgoing.entry(from).or_default().push(to.clone());
        incoming.entry(to).or_default().push(from.clone());
    }
    for p in publications.iter_mut() {
        p.in_citation_ids = incoming.remove(p.id.as_str()).unwrap_or_default();
        p.out_citation_ids = outgoing.remove(p.id.as_str()).unwrap_or_default();
        p.in_citations_count = p.in_citation_ids.len() as u64;
        p.out_citations_count = p.out_citation_ids.len() as u64;
    }
    graph
}

/// Builds the graph over every stored publication and writes the updated
/// citation fields back in one batch.
pub fn link_store(store: &Store, references: &[CitingReferences], cfg: &LinkerConfig) -> Result<CitationGraph, StoreError> {
    store.write(|batch| {
        let mut pubs: Vec<Publication> = batch.view().publications().cloned().collect();
        let graph = build_citation_graph(&mut pubs, references, cfg);
        for p in pubs {
            batch.upsert_publication(p)?;
        }
        Ok(graph)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorMatch {
    pub name: String,
    /// `None` when no author reaches the threshold.
    pub author_id: Option<String>,
    /// Similarity of the best candidate, matched or not.
    pub similarity: f64,
}

pub fn match_author_names(extracted_names: &[String], corpus_authors: &AuthorIndex, cfg: &LinkerConfig) -> Vec<AuthorMatch> {
    extracted_names
        .par_iter()
        .map(|name| match corpus_authors.best(name, 0.0) {
            Some(m) if cfg.accepts(m.similarity) => {
                AuthorMatch { name: name.clone(), author_id: Some(m.id), similarity: m.similarity }
            }
            Some(m) => AuthorMatch { name: name.clone(), author_id: None, similarity: m.similarity },
            None => AuthorMatch { name: name.clone(), author_id: None, similarity: 0.0 },
        })
        .collect()
}

/// A linkage decision with its ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledMatch {
    pub predicted: Option<String>,
    pub truth: String,
}

impl LabeledMatch {
    pub fn is_mismatch(&self) -> bool {
        self.predicted.as_deref() != Some(self.truth.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResampleConfig {
    pub sample_size: usize,
    pub draws: usize,
    pub seed: u64,
    pub with_replacement: bool,
}

impl Default for ResampleConfig {
    fn default() -> Self {
        ResampleConfig { sample_size: 100, draws: 20, seed: 0, with_replacement: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchEstimate {
    pub mean_rate: f64,
    pub rates: Vec<f64>,
}

/// Draws `draws` samples of `sample_size` pairs and reports each sample's
/// mismatch fraction and their mean.
pub fn estimate_mismatch_rate(pairs: &[LabeledMatch], cfg: &ResampleConfig) -> Result<MismatchEstimate, LinkerError> {
    let needed = if cfg.with_replacement { 1 } else { cfg.sample_size };
    if pairs.len() < needed || cfg.sample_size == 0 || cfg.draws == 0 {
        return Err(LinkerError::InsufficientData { needed: needed.max(1), available: pairs.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rates: Vec<f64> = (0..cfg.draws)
        .map(|_| {
            let wrong = if cfg.with_replacement {
                (0..cfg.sample_size).filter(|_| pairs[rng.random_range(0..pairs.len())].is_mismatch()).count()
            } else {
                rand::seq::index::sample(&mut rng, pairs.len(), cfg.sample_size)
                    .into_iter()
                    .filter(|&i| pairs[i].is_mismatch())
                    .count()
            };
            wrong as f64 / cfg.sample_size as f64
        })
        .collect();
    let mean_rate = rates.iter().sum::<f64>() / rates.len() as f64;
    Ok(MismatchEstimate { mean_rate, rates })
}
