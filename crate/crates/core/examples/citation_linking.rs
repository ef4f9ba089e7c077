//! Links noisy reference titles to corpus publications and rebuilds the
//! citation counts.
//!
//!     cargo run -p insights-core --example citation_linking

use insights_core::linker::{build_citation_graph, LinkerConfig, TitleIndex};
use insights_core::synth;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let (mut pubs, mut refs) = synth::closed_citation_corpus(300, 10, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for r in &mut refs {
        for title in &mut r.references {
            *title = synth::perturb(title, 0.03, &mut rng);
        }
    }
    // References to works outside the corpus stay unmatched.
    refs[0].references.push("An Entirely Unrelated Book About Gardening".into());

    let cfg = LinkerConfig::default();
    let index = TitleIndex::titles(&pubs, &cfg);
    let sample = &refs[1].references[0];
    println!("{sample:?} -> {:?}", index.lookup(sample, &cfg));

    let graph = build_citation_graph(&mut pubs, &refs, &cfg);
    let ins: u64 = pubs.iter().map(|p| p.in_citations_count).sum();
    let outs: u64 = pubs.iter().map(|p| p.out_citations_count).sum();
    println!(
        "{} references, {} edges, {} unmatched ({:.1}% external); in {ins} = out {outs}",
        graph.total_references,
        graph.edges.len(),
        graph.unmatched_references,
        100.0 * graph.external_fraction()
    );
    let most = pubs.iter().max_by_key(|p| p.in_citations_count).unwrap();
    println!("most cited: {} ({} citations)", most.title, most.in_citations_count);
}
