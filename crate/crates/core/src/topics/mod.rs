//! Topic modeling: preprocessing, LDA training, term ranking, the
//! intertopic distance map, and a background job manager.

mod jobs;
mod lda;
mod mds;
pub mod porter;
pub mod preprocess;
mod ranking;

use serde::{Deserialize, Serialize};

pub use jobs::{
    summarize, DocumentSource, JobError, JobId, JobManager, JobRequest, JobSnapshot, JobStatus, LambdaRanking,
    TopicRelevance, TopicResult, LAMBDA_GRID, TOP_TERMS,
};
pub use lda::{train, train_tokens, TrainConfig};
pub use mds::{intertopic_coordinates, jensen_shannon, IntertopicMap, TopicPoint};
pub use preprocess::preprocess;
pub use ranking::{lift, p_topic_given_word, relevance, relevance_score, saliency, top_salient_terms, TermScore};

/// Tolerance on every row-sum invariant.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopicError {
    #[error("need at least {needed} non-empty documents, have {available}")]
    TooFewDocuments { needed: usize, available: usize },
    #[error("no terms left after preprocessing")]
    EmptyVocabulary,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("lambda {0} outside [0, 1]")]
    InvalidLambda(f64),
    #[error("topic {topic} out of range for k = {k}")]
    UnknownTopic { topic: usize, k: usize },
    #[error("intertopic map needs k >= 2")]
    NeedTwoTopics,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unknown job {0}")]
    UnknownJob(String),
    #[error("document source: {0}")]
    Source(String),
}

impl TopicError {
    /// Stable snake_case identifier for API payloads.
    pub fn code(&self) -> &'static str {
        match self {
            TopicError::TooFewDocuments { .. } => "too_few_documents",
            TopicError::EmptyVocabulary => "empty_vocabulary",
            TopicError::InvalidK => "invalid_k",
            TopicError::InvalidLambda(_) => "invalid_lambda",
            TopicError::UnknownTopic { .. } => "unknown_topic",
            TopicError::NeedTwoTopics => "need_two_topics",
            TopicError::InvalidModel(_) => "invalid_model",
            TopicError::UnknownJob(_) => "unknown_job",
            TopicError::Source(_) => "source_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub k: usize,
    pub vocab: Vec<String>,
    /// `k x |vocab|`, row t is p(w | t).
    pub phi: Vec<Vec<f64>>,
    /// `D x k`, row d is p(t | d).
    pub theta: Vec<Vec<f64>>,
    pub term_frequency: Vec<u64>,
    /// p(t), the share of token mass assigned to each topic.
    pub topic_prevalence: Vec<f64>,
    pub seed: u64,
}

fn check_distribution(row: &[f64], what: &str) -> Result<(), TopicError> {
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(TopicError::InvalidModel(format!("{what} has a negative or non-finite entry")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(TopicError::InvalidModel(format!("{what} sums to {sum}")));
    }
    Ok(())
}

impl TopicModel {
    /// Assembles a model from parts, checking shapes and normalization.
    pub fn new(
        vocab: Vec<String>,
        phi: Vec<Vec<f64>>,
        theta: Vec<Vec<f64>>,
        term_frequency: Vec<u64>,
        topic_prevalence: Vec<f64>,
        seed: u64,
    ) -> Result<TopicModel, TopicError> {
        let model = TopicModel { k: phi.len(), vocab, phi, theta, term_frequency, topic_prevalence, seed };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        if self.k == 0 {
            return Err(TopicError::InvalidK);
        }
        if self.vocab.is_empty() {
            return Err(TopicError::EmptyVocabulary);
        }
        let v = self.vocab.len();
        if self.phi.len() != self.k || self.phi.iter().any(|r| r.len() != v) {
            return Err(TopicError::InvalidModel("phi shape".into()));
        }
        if self.theta.iter().any(|r| r.len() != self.k) {
            return Err(TopicError::InvalidModel("theta shape".into()));
        }
        if self.term_frequency.len() != v || self.topic_prevalence.len() != self.k {
            return Err(TopicError::InvalidModel("term_frequency or topic_prevalence length".into()));
        }
        for (t, row) in self.phi.iter().enumerate() {
            check_distribution(row, &format!("phi[{t}]"))?;
        }
        for (d, row) in self.theta.iter().enumerate() {
            check_distribution(row, &format!("theta[{d}]"))?;
        }
        check_distribution(&self.topic_prevalence, "topic_prevalence")
    }

    pub fn total_tokens(&self) -> u64 {
        self.term_frequency.iter().sum()
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.vocab.binary_search_by(|v| v.as_str().cmp(term)).ok().or_else(|| self.vocab.iter().position(|v| v == term))
    }
}
