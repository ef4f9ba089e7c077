//! Submits topic-model jobs over a filtered store and waits for them.
//!
//!     cargo run -p insights-core --example topic_jobs

use std::sync::Arc;
use std::time::Duration;

use insights_core::store::StoreError;
use insights_core::topics::{JobManager, JobRequest, TrainConfig};
use insights_core::{synth, FilterSet, Range, Store};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let store = Arc::new(Store::in_memory());
    store.write(|b| {
        for p in synth::corpus(400, 3) {
            b.upsert_publication(p)?;
        }
        Ok::<_, StoreError>(())
    })?;

    let jobs = JobManager::new(store, 2, TrainConfig { iterations: 100, ..Default::default() });
    let recent = FilterSet { year_range: Some(Range::new(2010, 2022)), ..Default::default() };
    let ids = [
        jobs.submit(JobRequest { filter: recent, k: 5, seed: 1 })?,
        jobs.submit(JobRequest { filter: FilterSet::default(), k: 8, seed: 1 })?,
        // Fails: the filter selects nothing.
        jobs.submit(JobRequest { filter: serde_json::from_str(r#"{"venues": ["nowhere"]}"#)?, k: 5, seed: 1 })?,
    ];
    for id in &ids {
        let job = jobs.wait(id, Duration::from_secs(120))?;
        match (&job.result, &job.error) {
            (Some(r), _) => println!("{id}: {:?} over {} documents, top term {:?}", job.history, r.documents, r.top_salient_terms.first().map(|t| &t.term)),
            (_, Some(e)) => println!("{id}: {:?} failed with {}: {}", job.history, e.code, e.message),
            _ => println!("{id}: still {:?}", job.status),
        }
    }
    Ok(())
}
