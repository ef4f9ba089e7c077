//! Seeded synthetic corpora, filters and ingest files for tests, examples
//! and benchmarks.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::corpus::{DocumentType, FieldOfStudy, Publication};
use crate::ingest::{author_id_for_name, venue_id_for_name};
use crate::linker::CitingReferences;
use crate::queryfilter::{FilterSet, Range};

pub const AUTHORS: &[&str] = &[
    "Ada Lovelace", "Alan Turing", "Barbara Liskov", "Claude Shannon", "Donald Knuth", "Edsger Dijkstra",
    "Frances Allen", "Grace Hopper", "Hedy Lamarr", "Ivan Sutherland", "John McCarthy", "Ken Thompson",
    "Leslie Lamport", "Margaret Hamilton", "Niklaus Wirth", "Olga Taussky", "Peter Naur", "Radia Perlman",
    "Shafi Goldwasser", "Tim Berners-Lee", "Ursula Franklin", "Vint Cerf", "Whitfield Diffie", "Yann LeCun",
];

pub const VENUES: &[&str] = &[
    "ACL", "CVPR", "ICML", "NeurIPS", "SIGMOD", "VLDB", "KDD", "CHI", "ICSE", "POPL", "STOC", "EMNLP",
];

pub const PUBLISHERS: &[&str] = &["ACM", "IEEE", "Springer", "Elsevier", "MIT Press", "AAAI"];

pub const WORDS: &[&str] = &[
    "learning", "neural", "network", "graph", "query", "database", "vision", "language", "model", "parsing",
    "retrieval", "distributed", "systems", "privacy", "security", "compiler", "optimization", "sampling",
    "inference", "topic", "citation", "analysis", "benchmark", "robust", "efficient", "scalable", "stream",
    "index", "semantic", "embedding", "transfer", "reinforcement", "policy", "kernel", "sparse", "tensor",
    "clustering", "ranking", "recommendation", "dialogue", "translation", "speech", "image", "video", "detection",
    "segmentation", "tracking", "protocol", "consensus", "verification",
];

/// Year range the generator draws from.
pub const YEARS: (i32, i32) = (1990, 2022);

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str], max: usize) -> Vec<&'a str> {
    let n = rng.random_range(0..=max);
    let mut out: Vec<&str> = pool.choose_multiple(rng, n).copied().collect();
    out.sort();
    out
}

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    (0..words).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// Citation counts with a heavy tail so every bin gets populated.
fn citation_count(rng: &mut ChaCha8Rng) -> u64 {
    match rng.random_range(0..10) {
        0..=2 => 0,
        3..=6 => rng.random_range(1..10),
        7 | 8 => rng.random_range(10..1000),
        _ => rng.random_range(1000..20000),
    }
}

/// `n` denormalized publications with ids `p000000`, `p000001`, ...
pub fn corpus(n: usize, seed: u64) -> Vec<Publication> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let ty = *DocumentType::ALL.choose(&mut rng).unwrap();
            let mut p = Publication::new(format!("p{i:06}"), sentence(&mut rng, 6), ty);
            if rng.random_bool(0.8) {
                p.abstract_text = Some(sentence(&mut rng, 30));
            }
            if rng.random_bool(0.95) {
                p.year_published = Some(rng.random_range(YEARS.0..=YEARS.1));
            }
            for name in pick(&mut rng, AUTHORS, 4) {
                p.author_ids.push(author_id_for_name(name));
                p.author_names.push(name.to_string());
            }
            if rng.random_bool(0.9) {
                let v = *VENUES.choose(&mut rng).unwrap();
                p.venue_id = Some(venue_id_for_name(v));
                p.venue_name = Some(v.to_string());
            }
            if rng.random_bool(0.8) {
                p.publisher = Some(PUBLISHERS.choose(&mut rng).unwrap().to_string());
            }
            let n_fields = rng.random_range(0..=2);
            p.fields_of_study = FieldOfStudy::ASSIGNABLE.choose_multiple(&mut rng, n_fields).copied().collect();
            p.in_citations_count = citation_count(&mut rng);
            p.out_citations_count = citation_count(&mut rng);
            p.open_access = match rng.random_range(0..3) {
                0 => None,
                1 => Some(true),
                _ => Some(false),
            };
            p
        })
        .collect()
}

/// A random filter over the generator's value pools. Each slot is active
/// with probability one half; text slots occasionally include a value that
/// matches nothing, and casing is randomized.
pub fn filter(rng: &mut ChaCha8Rng) -> FilterSet {
    fn slot(rng: &mut ChaCha8Rng, pool: &[&str]) -> Option<Vec<String>> {
        if !rng.random_bool(0.5) {
            return None;
        }
        let mut values: Vec<String> = pick(rng, pool, 3).into_iter().map(str::to_string).collect();
        if rng.random_bool(0.1) {
            values.push("No Such Value".into());
        }
        for v in &mut values {
            if rng.random_bool(0.3) {
                *v = v.to_uppercase();
            }
        }
        Some(values)
    }
    let types: Vec<&str> = DocumentType::ALL.iter().map(|t| t.as_str()).collect();
    let fields: Vec<&str> = FieldOfStudy::ASSIGNABLE.iter().map(|f| f.as_str()).collect();
    let range = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| {
        rng.random_bool(0.5).then(|| {
            let a = rng.random_range(lo..=hi);
            let b = rng.random_range(lo..=hi);
            Range::new(a.min(b), a.max(b))
        })
    };
    FilterSet {
        authors: slot(rng, AUTHORS),
        venues: slot(rng, VENUES),
        publishers: slot(rng, PUBLISHERS),
        types_of_paper: slot(rng, &types),
        fields_of_study: slot(rng, &fields),
        access_types: slot(rng, &["open", "closed"]),
        year_range: range(rng, YEARS.0 as i64 - 2, YEARS.1 as i64 + 2),
        citation_range: range(rng, 0, 2000),
    }
}

pub fn filters(n: usize, seed: u64) -> Vec<FilterSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| filter(&mut rng)).collect()
}

/// Raw JSONL ingest input: one author line per pool name followed by `n`
/// publication lines that reference authors by id and venues by name.
pub fn jsonl(n: usize, seed: u64) -> String {
    let mut out = String::new();
    for name in AUTHORS {
        out.push_str(&json!({"collection": "authors", "id": author_id_for_name(name), "fullname": name}).to_string());
        out.push('\n');
    }
    for p in corpus(n, seed) {
        let mut line = json!({
            "id": p.id,
            "title": p.title,
            "typeOfPaper": p.type_of_paper.as_str(),
            "authorIds": p.author_ids,
            "fieldsOfStudy": p.fields_of_study,
            "inCitationsCount": p.in_citations_count,
            "outCitationsCount": p.out_citations_count,
        });
        let obj = line.as_object_mut().unwrap();
        if let Some(a) = p.abstract_text {
            obj.insert("abstractText".into(), a.into());
        }
        if let Some(y) = p.year_published {
            obj.insert("yearPublished".into(), y.into());
        }
        if let Some(v) = p.venue_name {
            obj.insert("venue".into(), v.into());
        }
        if let Some(pb) = p.publisher {
            obj.insert("publisher".into(), pb.into());
        }
        if let Some(o) = p.open_access {
            obj.insert("openAccess".into(), o.into());
        }
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// Distinct random titles of `words` words each.
pub fn titles(n: usize, words: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let t = sentence(&mut rng, words);
        if seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

/// A corpus whose reference lists point only at its own titles, with no
/// self-citations, plus the reference lists.
pub fn closed_citation_corpus(n: usize, max_refs: usize, seed: u64) -> (Vec<Publication>, Vec<CitingReferences>) {
    let titles = titles(n, 8, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let pubs: Vec<Publication> = titles
        .iter()
        .enumerate()
        .map(|(i, t)| Publication::new(format!("c{i:05}"), t.clone(), DocumentType::Article))
        .collect();
    let refs = (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.shuffle(&mut rng);
            others.truncate(rng.random_range(0..=max_refs.min(n.saturating_sub(1))));
            CitingReferences { id: pubs[i].id.clone(), references: others.iter().map(|&j| titles[j].clone()).collect() }
        })
        .collect();
    (pubs, refs)
}

/// Substitutes `floor(fraction * len)` distinct character positions with
/// other lowercase letters.
pub fn perturb(text: &str, fraction: f64, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    let edits = (fraction * chars.len() as f64).floor() as usize;
    for i in rand::seq::index::sample(rng, chars.len(), edits.min(chars.len())) {
        let original = chars[i];
        loop {
            let c = (b'a' + rng.random_range(0..26u8)) as char;
            if c != original.to_ascii_lowercase() {
                chars[i] = c;
                break;
            }
        }
    }
    chars.into_iter().collect()
}

/// Applies one random insertion, deletion or substitution of a lowercase
/// letter.
pub fn single_edit(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    let letter = |rng: &mut ChaCha8Rng| (b'a' + rng.random_range(0..26u8)) as char;
    match rng.random_range(0..3) {
        0 => {
            let at = rng.random_range(0..=chars.len());
            chars.insert(at, letter(rng));
        }
        1 if !chars.is_empty() => {
            let at = rng.random_range(0..chars.len());
            chars.remove(at);
        }
        _ if !chars.is_empty() => {
            let at = rng.random_range(0..chars.len());
            let original = chars[at];
            while chars[at] == original {
                chars[at] = letter(rng);
            }
        }
        _ => chars.push(letter(rng)),
    }
    chars.into_iter().collect()
}
