//! Scholarly metadata analytics.
//!
//! Publications, authors and venues are ingested from JSONL or CSV into a
//! denormalized [`store::Store`]. Reference titles are fuzzily linked into an
//! internal citation graph, faceted [`queryfilter::FilterSet`]s select record
//! subsets, [`aggregate`] computes the chart and table series, and
//! [`topics`] trains LDA models and ranks terms.

pub mod aggregate;
pub mod corpus;
pub mod ingest;
pub mod linker;
pub mod queryfilter;
pub mod store;
pub mod synth;
pub mod topics;

pub use corpus::{Author, DocumentType, FieldOfStudy, Publication, Venue};
pub use queryfilter::{Dimension, FilterSet, Range};
pub use store::Store;
