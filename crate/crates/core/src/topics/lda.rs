//! LDA by collapsed Gibbs sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{preprocess, TopicError, TopicModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub k: usize,
    pub seed: u64,
    pub iterations: usize,
    /// Document-topic prior; `None` means `1 / k`.
    pub alpha: Option<f64>,
    /// Topic-word prior.
    pub beta: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { k: 10, seed: 0, iterations: 200, alpha: None, beta: 0.01 }
    }
}

impl TrainConfig {
    pub fn with_k(k: usize, seed: u64) -> Self {
        TrainConfig { k, seed, ..Default::default() }
    }
}

/// Preprocesses each document and trains on the resulting tokens.
pub fn train<S: AsRef<str>>(documents: &[S], cfg: &TrainConfig) -> Result<TopicModel, TopicError> {
    if cfg.k == 0 {
        return Err(TopicError::InvalidK);
    }
    if documents.len() < cfg.k {
        return Err(TopicError::TooFewDocuments { needed: cfg.k, available: documents.len() });
    }
    let tokens: Vec<Vec<String>> = documents.iter().map(|d| preprocess(d.as_ref())).collect();
    train_tokens(&tokens, cfg)
}

/// Trains on already tokenized documents. Empty documents are kept and get
/// the prior as their topic mixture.
pub fn train_tokens(documents: &[Vec<String>], cfg: &TrainConfig) -> Result<TopicModel, TopicError> {
    let k = cfg.k;
    if k == 0 {
        return Err(TopicError::InvalidK);
    }
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in documents {
        for w in doc {
            *counts.entry(w.as_str()).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(TopicError::EmptyVocabulary);
    }
    let non_empty = documents.iter().filter(|d| !d.is_empty()).count();
    if non_empty < k {
        return Err(TopicError::TooFewDocuments { needed: k, available: non_empty });
    }

    let vocab: Vec<String> = counts.keys().map(|s| s.to_string()).collect();
    let term_frequency: Vec<u64> = counts.values().copied().collect();
    let v = vocab.len();
    let ids: Vec<Vec<usize>> = documents
        .iter()
        .map(|d| d.iter().map(|w| vocab.binary_search(w).expect("term in vocab")).collect())
        .collect();

    let alpha = cfg.alpha.unwrap_or(1.0 / k as f64);
    let beta = cfg.beta;
    let v_beta = v as f64 * beta;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut n_dt = vec![vec![0u32; k]; ids.len()];
    let mut n_tw = vec![vec![0u32; v]; k];
    let mut n_t = vec![0u64; k];
    let mut z: Vec<Vec<usize>> = ids
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            doc.iter()
                .map(|&w| {
                    let t = rng.random_range(0..k);
                    n_dt[d][t] += 1;
                    n_tw[t][w] += 1;
                    n_t[t] += 1;
                    t
                })
                .collect()
        })
        .collect();

    let mut weights = vec![0.0f64; k];
    for _ in 0..cfg.iterations {
        for (d, doc) in ids.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = z[d][i];
                n_dt[d][old] -= 1;
                n_tw[old][w] -= 1;
                n_t[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    total += (n_dt[d][t] as f64 + alpha) * (n_tw[t][w] as f64 + beta) / (n_t[t] as f64 + v_beta);
                    weights[t] = total;
                }
                let u = rng.random::<f64>() * total;
                let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                z[d][i] = new;
                n_dt[d][new] += 1;
                n_tw[new][w] += 1;
                n_t[new] += 1;
            }
        }
    }

    let phi: Vec<Vec<f64>> = (0..k)
        .map(|t| normalized((0..v).map(|w| (n_tw[t][w] as f64 + beta) / (n_t[t] as f64 + v_beta)).collect()))
        .collect();
    let theta: Vec<Vec<f64>> = ids
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            let len = doc.len() as f64;
            normalized((0..k).map(|t| (n_dt[d][t] as f64 + alpha) / (len + k as f64 * alpha)).collect())
        })
        .collect();

    let total_tokens: f64 = term_frequency.iter().sum::<u64>() as f64;
    let mut prevalence = vec![0.0; k];
    for (row, doc) in theta.iter().zip(&ids) {
        for t in 0..k {
            prevalence[t] += row[t] * doc.len() as f64;
        }
    }
    let prevalence = normalized(prevalence.into_iter().map(|m| m / total_tokens).collect());

    let model = TopicModel { k, vocab, phi, theta, term_frequency, topic_prevalence: prevalence, seed: cfg.seed };
    debug_assert!(model.validate().is_ok());
    Ok(model)
}

fn normalized(mut row: Vec<f64>) -> Vec<f64> {
    let sum: f64 = row.iter().sum();
    for p in &mut row {
        *p /= sum;
    }
    row
}
