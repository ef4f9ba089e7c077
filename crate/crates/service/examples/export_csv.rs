//! Writes CSV and JSON exports of a venue grid and a citation-bin chart.
//!
//!     cargo run -p insights-service --example export_csv

use anyhow::Result;
use insights_core::store::StoreError;
use insights_core::{synth, Store};
use insights_service::api::{run, AggregateRequest, Operation};
use insights_service::export::{render, ExportFormat};

fn main() -> Result<()> {
    let store = Store::in_memory();
    store.write(|b| {
        for p in synth::corpus(1_000, 5) {
            b.upsert_publication(p)?;
        }
        Ok::<_, StoreError>(())
    })?;
    let snap = store.snapshot();
    let dir = std::env::temp_dir().join("insights-export-example");
    std::fs::create_dir_all(&dir)?;

    let venues: AggregateRequest = serde_json::from_str(r#"{"dimension": "venue"}"#)?;
    for (op, req) in [(Operation::Grid, venues), (Operation::Bins, AggregateRequest::default())] {
        let out = run(&snap, op, &req)?;
        for format in [ExportFormat::Csv, ExportFormat::Json] {
            let path = dir.join(format!("{op}.{}", format.extension()));
            std::fs::write(&path, render(&out, format))?;
            println!("wrote {}", path.display());
        }
    }
    print!("{}", std::fs::read_to_string(dir.join("bins.csv"))?);
    Ok(())
}
