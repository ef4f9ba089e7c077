//! Builds a FilterSet, selects from the store and runs each aggregation.
//!
//!     cargo run -p insights-core --example filter_and_aggregate

use std::error::Error;

use insights_core::aggregate::{
    activity_window, citation_bins, co_occurrence, count_per_year, distribution, entity_values, grid_rows, top_k,
    CitationDirection, Metric,
};
use insights_core::queryfilter::{suggest, TextSlot};
use insights_core::store::StoreError;
use insights_core::{synth, Dimension, FilterSet, Range, Store};

fn main() -> Result<(), Box<dyn Error>> {
    let store = Store::in_memory();
    store.write(|b| {
        for p in synth::corpus(2_000, 7) {
            b.upsert_publication(p)?;
        }
        Ok::<_, StoreError>(())
    })?;
    let snap = store.snapshot();

    // Values inside a slot are OR-ed, slots are AND-ed.
    let filter: FilterSet = serde_json::from_str(
        r#"{"fields_of_study": ["Computer Science", "Mathematics"], "year_range": {"min": 2005, "max": 2020}}"#,
    )?;
    let pubs = snap.select(&filter)?;
    println!("selected {} of {} publications", pubs.len(), snap.len());

    let per_year = count_per_year(&pubs, Dimension::Author);
    println!("distinct authors per year: {:?}", per_year.years);

    for row in grid_rows(&pubs, Dimension::Venue)?.iter().take(5) {
        println!("{:<12} {:>4} papers {:>7} citations  avg {}", row.name, row.papers, row.citations, row.avg_display());
    }

    for e in top_k(&pubs, Dimension::Author, Metric::Citations, 3, true)? {
        println!("top author {} with {} citations", e.name, e.value);
    }

    let values = entity_values(&pubs, Dimension::Venue, Metric::Citations, CitationDirection::Incoming, false);
    println!("venue citation quartiles: {:?}", distribution(&values)?);
    println!("citation bins: {}", serde_json::to_string(&citation_bins(&pubs))?);

    let co = co_occurrence(&pubs, Dimension::Author, synth::AUTHORS[0])?;
    println!("co-authors of {}: {co:?}", synth::AUTHORS[0]);

    let (first, last) = synth::YEARS;
    let a = activity_window(&pubs, Dimension::Author, (2015, last), (first, last))?;
    println!("authors active since 2015: {}, new since 2015: {}", a.active_count, a.new_count);

    let narrower = FilterSet { citation_range: Some(Range::new(100, i64::MAX)), ..filter };
    println!("with >= 100 citations: {}", snap.select(&narrower)?.len());

    let hints = suggest(TextSlot::Authors, "^al", 5, snap.value_counts(TextSlot::Authors))?;
    println!("author suggestions for ^al: {hints:?}");
    Ok(())
}
