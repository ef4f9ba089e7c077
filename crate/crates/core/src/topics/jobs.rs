//! Background topic-model jobs. A manager queues requests, a fixed pool of
//! workers trains one job each at a time, and results are kept for polling.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex, RwLock};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use crossbeam_channel::{unbounded, Sender};
use serde::{Deserialize, Serialize};

use super::{
    intertopic_coordinates, relevance, top_salient_terms, train, IntertopicMap, TermScore, TopicError, TopicModel,
    TrainConfig,
};
use crate::queryfilter::FilterSet;
use crate::store::Store;

/// Number of terms reported per ranking.
pub const TOP_TERMS: usize = 30;

/// λ values at which per-topic relevance rankings are precomputed.
pub const LAMBDA_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Supplies the texts a job trains on.
pub trait DocumentSource: Send + Sync {
    fn documents(&self, filter: &FilterSet) -> Result<Vec<String>, TopicError>;
}

/// Title plus abstract of every matching publication, in id order.
impl DocumentSource for Store {
    fn documents(&self, filter: &FilterSet) -> Result<Vec<String>, TopicError> {
        let snapshot = self.snapshot();
        let pubs = snapshot.select(filter).map_err(|e| TopicError::Source(e.to_string()))?;
        Ok(pubs.iter().map(|p| p.topic_text()).collect())
    }
}

impl DocumentSource for Vec<String> {
    fn documents(&self, _filter: &FilterSet) -> Result<Vec<String>, TopicError> {
        Ok(self.clone())
    }
}

pub type JobId = String;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JobRequest {
    pub filter: FilterSet,
    pub k: usize,
    pub seed: u64,
}

impl Default for JobRequest {
    fn default() -> Self {
        JobRequest { filter: FilterSet::default(), k: 10, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Queued,
    Training,
    Done,
    Failed,
}

impl JobStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, JobStatus::Done | JobStatus::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRanking {
    pub lambda: f64,
    pub terms: Vec<TermScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRelevance {
    pub topic: usize,
    pub prevalence: f64,
    pub rankings: Vec<LambdaRanking>,
}

/// Everything the topic view needs, as one self-contained payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicResult {
    pub k: usize,
    pub documents: usize,
    pub top_salient_terms: Vec<TermScore>,
    pub topics: Vec<TopicRelevance>,
    /// Absent when k = 1.
    pub intertopic: Option<IntertopicMap>,
}

/// Builds the job payload from a trained model.
pub fn summarize(model: &TopicModel, n_terms: usize) -> TopicResult {
    let topics = (0..model.k)
        .map(|t| TopicRelevance {
            topic: t,
            prevalence: model.topic_prevalence[t],
            rankings: LAMBDA_GRID
                .iter()
                .map(|&lambda| {
                    let mut terms = relevance(model, t, lambda).expect("topic and lambda in range");
                    terms.truncate(n_terms);
                    LambdaRanking { lambda, terms }
                })
                .collect(),
        })
        .collect();
    TopicResult {
        k: model.k,
        documents: model.theta.len(),
        top_salient_terms: top_salient_terms(model, n_terms),
        topics,
        intertopic: intertopic_coordinates(model).ok(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobError {
    pub code: String,
    pub message: String,
}

impl From<TopicError> for JobError {
    fn from(e: TopicError) -> Self {
        JobError { code: e.code().to_string(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSnapshot {
    pub id: JobId,
    pub k: usize,
    pub filter: FilterSet,
    pub status: JobStatus,
    /// Every status the job has held, oldest first.
    pub history: Vec<JobStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Arc<TopicResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<JobError>,
}

struct Shared {
    jobs: RwLock<HashMap<JobId, JobSnapshot>>,
    changed: Mutex<()>,
    signal: Condvar,
}

impl Shared {
    /// Moves a job to `status`. Terminal jobs are never touched again.
    fn transition(&self, id: &str, status: JobStatus, result: Option<Arc<TopicResult>>, error: Option<JobError>) {
        {
            let mut jobs = self.jobs.write().expect("job table poisoned");
            let Some(job) = jobs.get_mut(id) else { return };
            if job.status.is_terminal() {
                return;
            }
            job.status = status;
            job.history.push(status);
            job.result = result;
            job.error = error;
        }
        let _guard = self.changed.lock().expect("job signal poisoned");
        self.signal.notify_all();
    }
}

struct Task {
    id: JobId,
    request: JobRequest,
}

pub struct JobManager {
    shared: Arc<Shared>,
    sender: Option<Sender<Task>>,
    workers: Vec<JoinHandle<()>>,
    next_id: AtomicU64,
}

impl JobManager {
    /// Starts `workers` threads (at least one). `base` supplies every
    /// training setting other than `k` and `seed`.
    pub fn new(source: Arc<dyn DocumentSource>, workers: usize, base: TrainConfig) -> JobManager {
        let shared = Arc::new(Shared { jobs: RwLock::new(HashMap::new()), changed: Mutex::new(()), signal: Condvar::new() });
        let (sender, receiver) = unbounded::<Task>();
        let workers = (0..workers.max(1))
            .map(|_| {
                let receiver = receiver.clone();
                let shared = shared.clone();
                let source = source.clone();
                std::thread::spawn(move || {
                    for task in receiver {
                        shared.transition(&task.id, JobStatus::Training, None, None);
                        let cfg = TrainConfig { k: task.request.k, seed: task.request.seed, ..base };
                        let outcome = source
                            .documents(&task.request.filter)
                            .and_then(|docs| train(&docs, &cfg))
                            .map(|model| Arc::new(summarize(&model, TOP_TERMS)));
                        match outcome {
                            Ok(result) => shared.transition(&task.id, JobStatus::Done, Some(result), None),
                            Err(e) => shared.transition(&task.id, JobStatus::Failed, None, Some(e.into())),
                        }
                    }
                })
            })
            .collect();
        JobManager { shared, sender: Some(sender), workers, next_id: AtomicU64::new(1) }
    }

    pub fn submit(&self, request: JobRequest) -> Result<JobId, TopicError> {
        if request.k == 0 {
            return Err(TopicError::InvalidK);
        }
        let id = format!("job-{}", self.next_id.fetch_add(1, Ordering::Relaxed));
        let snapshot = JobSnapshot {
            id: id.clone(),
            k: request.k,
            filter: request.filter.clone(),
            status: JobStatus::Queued,
            history: vec![JobStatus::Queued],
            result: None,
            error: None,
        };
        self.shared.jobs.write().expect("job table poisoned").insert(id.clone(), snapshot);
        self.sender
            .as_ref()
            .expect("manager running")
            .send(Task { id: id.clone(), request })
            .expect("workers alive");
        Ok(id)
    }

    pub fn poll(&self, id: &str) -> Result<JobSnapshot, TopicError> {
        self.shared
            .jobs
            .read()
            .expect("job table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| TopicError::UnknownJob(id.to_string()))
    }

    /// Blocks until the job is terminal or `timeout` passes, then returns
    /// its latest state.
    pub fn wait(&self, id: &str, timeout: Duration) -> Result<JobSnapshot, TopicError> {
        let deadline = Instant::now() + timeout;
        let mut guard = self.shared.changed.lock().expect("job signal poisoned");
        loop {
            let job = self.poll(id)?;
            let now = Instant::now();
            if job.status.is_terminal() || now >= deadline {
                return Ok(job);
            }
            guard = self.shared.signal.wait_timeout(guard, deadline - now).expect("job signal poisoned").0;
        }
    }
}

impl Drop for JobManager {
    fn drop(&mut self) {
        self.sender.take();
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Arc<dyn DocumentSource> {
        let mut docs = Vec::new();
        for _ in 0..10 {
            docs.push("kitten whiskers purring feline".to_string());
            docs.push("puppy barking canine leash".to_string());
        }
        Arc::new(docs)
    }

    fn quick() -> TrainConfig {
        TrainConfig { iterations: 20, ..Default::default() }
    }

    #[test]
    fn lifecycle() {
        let mgr = JobManager::new(corpus(), 2, quick());
        let id = mgr.submit(JobRequest { k: 2, ..Default::default() }).unwrap();
        let job = mgr.wait(&id, Duration::from_secs(30)).unwrap();
        assert_eq!(job.status, JobStatus::Done);
        assert_eq!(job.history, [JobStatus::Queued, JobStatus::Training, JobStatus::Done]);
        let result = job.result.unwrap();
        assert_eq!(result.topics.len(), 2);
        assert_eq!(result.topics[0].rankings.len(), LAMBDA_GRID.len());
        assert!(result.intertopic.is_some());
    }

    #[test]
    fn failure_is_reported() {
        let mgr = JobManager::new(Arc::new(Vec::<String>::new()), 1, quick());
        let id = mgr.submit(JobRequest::default()).unwrap();
        let job = mgr.wait(&id, Duration::from_secs(30)).unwrap();
        assert_eq!(job.status, JobStatus::Failed);
        assert_eq!(job.error.unwrap().code, "too_few_documents");
    }

    #[test]
    fn unknown_job() {
        let mgr = JobManager::new(corpus(), 1, quick());
        assert_eq!(mgr.poll("nope"), Err(TopicError::UnknownJob("nope".into())));
    }
}
