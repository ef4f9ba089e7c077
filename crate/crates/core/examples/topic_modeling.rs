//! Trains an LDA model and prints salient terms, relevance rankings at a few
//! lambda values and the intertopic map.
//!
//!     cargo run -p insights-core --example topic_modeling

use insights_core::topics::{intertopic_coordinates, preprocess, relevance, top_salient_terms, train, TrainConfig};

fn main() {
    let texts = [
        "Neural networks learn representations with gradient descent and backpropagation",
        "Convolutional neural networks classify images with deep learning",
        "Citation analysis measures scholarly impact through citation counts",
        "Bibliometric indicators such as citation counts rank venues and authors",
        "Topic models like latent Dirichlet allocation discover themes in documents",
        "Dirichlet priors shape the topics a latent Dirichlet allocation model finds",
    ];
    let docs: Vec<String> = texts.iter().cycle().take(60).map(|s| s.to_string()).collect();
    println!("tokens of the first document: {:?}", preprocess(&docs[0]));

    let model = train(&docs, &TrainConfig::with_k(3, 11)).expect("training succeeds");
    let salient: Vec<String> = top_salient_terms(&model, 8).into_iter().map(|t| t.term).collect();
    println!("most salient terms: {salient:?}");
    for t in 0..model.k {
        for lambda in [1.0, 0.6, 0.0] {
            let terms: Vec<String> = relevance(&model, t, lambda).unwrap().into_iter().take(5).map(|s| s.term).collect();
            println!("topic {t} lambda {lambda}: {terms:?}");
        }
    }
    for p in intertopic_coordinates(&model).unwrap().points {
        println!("topic {} at ({:+.3}, {:+.3}) prevalence {:.2}", p.topic, p.x, p.y, p.size);
    }
}
