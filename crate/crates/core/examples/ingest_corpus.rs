//! Loads a small JSONL corpus plus a CSV file into a persisted store and
//! prints the ingest reports.
//!
//!     cargo run -p insights-core --example ingest_corpus

use std::error::Error;
use std::io::Cursor;

use insights_core::ingest::{load_corpus, InputFormat};
use insights_core::{synth, Store};

fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join("insights-ingest-example");
    let _ = std::fs::remove_dir_all(&dir);
    let store = Store::open(&dir)?;

    let jsonl = synth::jsonl(1_000, 1);
    let report = load_corpus(Cursor::new(jsonl), InputFormat::Jsonl, &store)?;
    println!("jsonl: {}", serde_json::to_string_pretty(&report)?);

    // Venue counters like "(2)" are stripped and the document type is
    // inferred from booktitle/journal when typeOfPaper is absent.
    let csv = "id,title,booktitle,journal,authors,yearPublished\n\
               x1,Deep Residual Learning,CVPR (2),,Kaiming He;Jian Sun,2016\n\
               x2,Attention Is All You Need,,NeurIPS,Ashish Vaswani,2017\n\
               x3,No Venue At All,,,Someone,2018\n";
    let report = load_corpus(Cursor::new(csv), InputFormat::Csv, &store)?;
    println!("csv: {}", serde_json::to_string_pretty(&report)?);

    let reopened = Store::open(&dir)?;
    let snap = reopened.snapshot();
    let x1 = snap.publication("x1").ok_or("x1 missing")?;
    println!(
        "after restart: {} publications, {} authors; x1 venue {:?}, type {}",
        snap.len(),
        snap.authors().count(),
        x1.venue_name,
        x1.type_of_paper
    );
    Ok(())
}
