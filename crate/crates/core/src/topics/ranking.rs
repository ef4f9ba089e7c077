//! Term saliency and per-topic relevance.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{TopicError, TopicModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub term: String,
    pub score: f64,
}

/// Descending score, ties by term.
fn rank(scores: &mut [TermScore]) {
    scores.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal).then_with(|| a.term.cmp(&b.term)));
}

/// p(t | w) by Bayes rule: `phi[t][w] * p(t)`, normalized over topics.
pub fn p_topic_given_word(model: &TopicModel, w: usize) -> Vec<f64> {
    let joint: Vec<f64> = (0..model.k).map(|t| model.phi[t][w] * model.topic_prevalence[t]).collect();
    let sum: f64 = joint.iter().sum();
    if sum > 0.0 {
        joint.into_iter().map(|p| p / sum).collect()
    } else {
        model.topic_prevalence.clone()
    }
}

fn saliency_of(model: &TopicModel, w: usize) -> f64 {
    let kl: f64 = p_topic_given_word(model, w)
        .iter()
        .zip(&model.topic_prevalence)
        .filter(|(ptw, _)| **ptw > 0.0)
        .map(|(ptw, pt)| ptw * (ptw / pt).ln())
        .sum();
    // KL divergence is non-negative; clamp summation round-off.
    model.term_frequency[w] as f64 * kl.max(0.0)
}

/// `frequency(w) * KL(p(t|w) || p(t))` in nats for every term with non-zero
/// frequency, in vocabulary order.
pub fn saliency(model: &TopicModel) -> Vec<TermScore> {
    (0..model.vocab.len())
        .filter(|&w| model.term_frequency[w] > 0)
        .map(|w| TermScore { term: model.vocab[w].clone(), score: saliency_of(model, w) })
        .collect()
}

pub fn top_salient_terms(model: &TopicModel, n: usize) -> Vec<TermScore> {
    let mut scores = saliency(model);
    rank(&mut scores);
    scores.truncate(n);
    scores
}

/// `lambda * p(w|t) + (1 - lambda) * p(w|t) / p(w)`.
pub fn relevance_score(p_w_given_t: f64, p_w: f64, lambda: f64) -> f64 {
    lambda * p_w_given_t + (1.0 - lambda) * (p_w_given_t / p_w)
}

/// p(w|t) / p(w).
pub fn lift(model: &TopicModel, topic: usize, w: usize) -> f64 {
    let p_w = model.term_frequency[w] as f64 / model.total_tokens() as f64;
    model.phi[topic][w] / p_w
}

/// All terms with non-zero corpus frequency ranked by relevance to `topic`.
pub fn relevance(model: &TopicModel, topic: usize, lambda: f64) -> Result<Vec<TermScore>, TopicError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(TopicError::InvalidLambda(lambda));
    }
    if topic >= model.k {
        return Err(TopicError::UnknownTopic { topic, k: model.k });
    }
    let total = model.total_tokens() as f64;
    let mut scores: Vec<TermScore> = (0..model.vocab.len())
        .filter(|&w| model.term_frequency[w] > 0)
        .map(|w| {
            let p_w = model.term_frequency[w] as f64 / total;
            TermScore { term: model.vocab[w].clone(), score: relevance_score(model.phi[topic][w], p_w, lambda) }
        })
        .collect();
    rank(&mut scores);
    Ok(scores)
}
