//! Prints decade-by-decade tables: papers per document type, and the top
//! venues by average citations excluding the "Others" bucket.
//!
//!     cargo run -p insights-core --example scientometrics_tables

use insights_core::aggregate::{format_avg, grid_rows};
use insights_core::corpus::OTHERS;
use insights_core::store::StoreError;
use insights_core::{synth, Dimension, FilterSet, Range, Store};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let store = Store::in_memory();
    store.write(|b| {
        for p in synth::corpus(5_000, 9) {
            b.upsert_publication(p)?;
        }
        Ok::<_, StoreError>(())
    })?;
    let snap = store.snapshot();

    // One filtered query per period.
    for (from, to) in [(1990, 1999), (2000, 2009), (2010, 2022)] {
        let filter = FilterSet { year_range: Some(Range::new(from, to)), ..Default::default() };
        let pubs = snap.select(&filter)?;
        println!("{from}-{to}: {} publications", pubs.len());
        for row in grid_rows(&pubs, Dimension::TypeOfPaper)? {
            let share = 100.0 * row.papers as f64 / pubs.len() as f64;
            println!("  {:<14} {:>5} ({share:>5.1}%)", row.name, row.papers);
        }
        let mut venues: Vec<_> = grid_rows(&pubs, Dimension::Venue)?.into_iter().filter(|r| r.name != OTHERS).collect();
        venues.sort_by(|a, b| b.avg_citations.total_cmp(&a.avg_citations).then_with(|| a.name.cmp(&b.name)));
        for row in venues.iter().take(3) {
            println!("  top venue {:<10} avg {:>9}", row.name, format_avg(row.citations, row.papers));
        }
    }
    Ok(())
}
