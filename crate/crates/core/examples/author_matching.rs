//! Matches extracted author names against known authors and estimates the
//! mismatch rate by resampling a labelled set.
//!
//!     cargo run -p insights-core --example author_matching

use insights_core::linker::{
    estimate_mismatch_rate, match_author_names, AuthorIndex, LabeledMatch, LinkerConfig, ResampleConfig,
};
use insights_core::{synth, Author};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let authors: Vec<Author> = synth::AUTHORS
        .iter()
        .map(|n| Author { id: format!("author:{n}"), full_name: n.to_string(), number: None, orcid: None })
        .collect();
    let cfg = LinkerConfig::default();
    let index = AuthorIndex::authors(&authors, &cfg);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let names: Vec<String> = synth::AUTHORS.iter().map(|n| synth::perturb(n, 0.15, &mut rng)).collect();
    let matches = match_author_names(&names, &index, &cfg);
    for m in matches.iter().take(6) {
        println!("{:<22} -> {:<30} {:.3}", m.name, m.author_id.as_deref().unwrap_or("-"), m.similarity);
    }

    let labelled: Vec<LabeledMatch> = matches
        .iter()
        .zip(synth::AUTHORS)
        .map(|(m, truth)| LabeledMatch { predicted: m.author_id.clone(), truth: format!("author:{truth}") })
        .collect();
    let estimate =
        estimate_mismatch_rate(&labelled, &ResampleConfig { sample_size: 20, ..Default::default() }).unwrap();
    println!("estimated mismatch rate {:.3} over {} draws", estimate.mean_rate, estimate.rates.len());
}
