use std::io::Cursor;

use insights_core::corpus::{validate, DocumentType, FieldOfStudy};
use insights_core::ingest::{load_corpus, normalize_venue_name, InputFormat};
use insights_core::store::{Collection, Record, Snapshot, Store};
use insights_core::{synth, Publication};
use proptest::prelude::*;

fn contents(s: &Snapshot) -> (Vec<Publication>, Vec<String>, Vec<String>) {
    (
        s.publications().cloned().collect(),
        s.authors().map(|a| serde_json::to_string(a).unwrap()).collect(),
        s.venues().map(|v| serde_json::to_string(v).unwrap()).collect(),
    )
}

#[test]
fn synthetic_jsonl_ingests_cleanly_and_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth::jsonl(500, 12);
    let want = synth::corpus(500, 12);
    {
        let store = Store::open(dir.path()).unwrap();
        let report = load_corpus(Cursor::new(input.as_bytes()), InputFormat::Jsonl, &store).unwrap();
        assert_eq!(report.records_rejected, 0, "{:?}", report.rejection_reasons);
        assert_eq!(report.records_accepted, 500 + synth::AUTHORS.len() as u64);
        let snap = store.snapshot();
        assert_eq!(snap.publications().cloned().collect::<Vec<_>>(), want);
    }
    let reopened = Store::open(dir.path()).unwrap();
    let snap = reopened.snapshot();
    assert_eq!(snap.publications().cloned().collect::<Vec<_>>(), want);
    assert!(snap.indexes_consistent());
    assert!(snap.publications().all(|p| p.author_ids.len() == p.author_names.len()));
}

#[test]
fn loading_twice_equals_loading_once() {
    let input = synth::jsonl(300, 2);
    let once = Store::in_memory();
    load_corpus(Cursor::new(input.as_bytes()), InputFormat::Jsonl, &once).unwrap();
    let twice = Store::in_memory();
    load_corpus(Cursor::new(input.as_bytes()), InputFormat::Jsonl, &twice).unwrap();
    load_corpus(Cursor::new(input.as_bytes()), InputFormat::Jsonl, &twice).unwrap();
    assert_eq!(contents(&once.snapshot()), contents(&twice.snapshot()));
}

#[test]
fn csv_with_author_names_only() {
    let csv = "id,title,booktitle,authors,yearPublished,fieldsOfStudy\n\
               p1,Deep Residual Learning,CVPR (2),Kaiming He;Jian Sun,2016,Computer Science\n\
               p2,Another Paper,,Jian Sun,2017,\n";
    let store = Store::in_memory();
    let report = load_corpus(Cursor::new(csv), InputFormat::Csv, &store).unwrap();
    assert_eq!(report.records_accepted, 1);
    assert_eq!(report.rejection_reasons.get("missing typeOfPaper"), Some(&1), "{report:?}");
    let snap = store.snapshot();
    let p = snap.publication("p1").unwrap();
    assert_eq!(p.author_names, ["Kaiming He", "Jian Sun"]);
    assert_eq!(p.venue_name.as_deref(), Some("CVPR"));
    assert_eq!(p.type_of_paper, DocumentType::Inproceedings);
    assert!(snap.author("author:Jian Sun").is_some());
}

#[test]
fn crud_by_collection() {
    let store = Store::in_memory();
    let p = synth::corpus(1, 0).remove(0);
    assert!(!store.upsert(Record::Publication(p.clone())).unwrap());
    assert!(store.upsert(Record::Publication(p.clone())).unwrap());
    assert!(store.delete(Collection::Publications, &p.id).unwrap());
    assert!(!store.delete(Collection::Publications, &p.id).unwrap());
    let mut bad = p;
    bad.title.clear();
    assert!(store.upsert(Record::Publication(bad)).is_err());
    assert!(store.snapshot().is_empty());
}

proptest! {
    #[test]
    fn venue_normalization_is_idempotent(name in "[A-Za-z ]{0,10}( \\([0-9]{1,3}\\)){0,3} {0,2}") {
        let once = normalize_venue_name(&name);
        prop_assert_eq!(normalize_venue_name(&once), once.clone());
        prop_assert!(!once.ends_with(' '));
    }

    #[test]
    fn publication_serde_round_trip(seed in any::<u64>()) {
        for p in synth::corpus(20, seed) {
            prop_assert!(validate(&p).is_empty());
            let json = serde_json::to_string(&p).unwrap();
            prop_assert_eq!(serde_json::from_str::<Publication>(&json).unwrap(), p);
        }
    }

    #[test]
    fn enumerations_are_closed(s in "\\PC{0,16}") {
        let known_type = DocumentType::ALL.iter().any(|t| t.as_str().eq_ignore_ascii_case(s.trim()));
        prop_assert_eq!(s.parse::<DocumentType>().is_ok(), known_type);
        let known_field = FieldOfStudy::ASSIGNABLE.iter().any(|f| f.as_str().eq_ignore_ascii_case(s.trim()));
        prop_assert_eq!(s.parse::<FieldOfStudy>().is_ok(), known_field);
        prop_assert!("Others".parse::<FieldOfStudy>().is_err());
    }
}
