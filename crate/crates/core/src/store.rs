//! Read-optimized persistence for publications, authors and venues, plus a
//! keyed cache of serialized aggregation results.
//!
//! Readers take an immutable [`Snapshot`]; a writer clones the current
//! snapshot, mutates it inside a [`WriteBatch`] and swaps it in on commit.
//! Readers therefore observe either the pre-batch or the post-batch state.
//! Any commit drops every cache entry.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};
use std::time::SystemTime;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::corpus::{
    validate, validate_author, validate_venue, Author, DocumentType, FieldOfStudy, Publication, Venue, Violation,
};
use crate::queryfilter::{CompiledFilter, FilterError, FilterSet, TextSlot};

const PUBLICATIONS_FILE: &str = "publications.jsonl";
const AUTHORS_FILE: &str = "authors.jsonl";
const VENUES_FILE: &str = "venues.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("storage failure: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt record in {file} line {line}: {message}")]
    Corrupt { file: String, line: usize, message: String },
    #[error("invalid record: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// A record of any of the three collections.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Publication(Publication),
    Author(Author),
    Venue(Venue),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Collection {
    Publications,
    Authors,
    Venues,
}

impl Collection {
    pub fn as_str(self) -> &'static str {
        match self {
            Collection::Publications => "publications",
            Collection::Authors => "authors",
            Collection::Venues => "venues",
        }
    }

    pub fn parse(s: &str) -> Option<Collection> {
        match s {
            "publications" => Some(Collection::Publications),
            "authors" => Some(Collection::Authors),
            "venues" => Some(Collection::Venues),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Indexes {
    by_year: BTreeMap<Option<i32>, BTreeSet<String>>,
    by_type: BTreeMap<DocumentType, BTreeSet<String>>,
    by_field: BTreeMap<FieldOfStudy, BTreeSet<String>>,
    by_venue: HashMap<String, BTreeSet<String>>,
    by_author: HashMap<String, BTreeSet<String>>,
}

fn fold(s: &str) -> String {
    s.trim().to_lowercase()
}

fn remove_from<K: Ord>(map: &mut BTreeMap<K, BTreeSet<String>>, key: K, id: &str) {
    if let Some(set) = map.get_mut(&key) {
        set.remove(id);
        if set.is_empty() {
            map.remove(&key);
        }
    }
}

fn remove_from_hash(map: &mut HashMap<String, BTreeSet<String>>, key: &str, id: &str) {
    if let Some(set) = map.get_mut(key) {
        set.remove(id);
        if set.is_empty() {
            map.remove(key);
        }
    }
}

impl Indexes {
    fn insert(&mut self, p: &Publication) {
        let id = &p.id;
        self.by_year.entry(p.year_published).or_default().insert(id.clone());
        self.by_type.entry(p.type_of_paper).or_default().insert(id.clone());
        for f in p.fields_or_unassigned() {
            self.by_field.entry(f).or_default().insert(id.clone());
        }
        if let Some(v) = &p.venue_name {
            self.by_venue.entry(fold(v)).or_default().insert(id.clone());
        }
        for a in &p.author_names {
            self.by_author.entry(fold(a)).or_default().insert(id.clone());
        }
    }

    fn remove(&mut self, p: &Publication) {
        let id = p.id.as_str();
        remove_from(&mut self.by_year, p.year_published, id);
        remove_from(&mut self.by_type, p.type_of_paper, id);
        for f in p.fields_or_unassigned() {
            remove_from(&mut self.by_field, f, id);
        }
        if let Some(v) = &p.venue_name {
            remove_from_hash(&mut self.by_venue, &fold(v), id);
        }
        for a in &p.author_names {
            remove_from_hash(&mut self.by_author, &fold(a), id);
        }
    }
}

/// An immutable view of the store at one generation.
#[derive(Debug, Default)]
pub struct Snapshot {
    generation: u64,
    publications: BTreeMap<String, Arc<Publication>>,
    authors: BTreeMap<String, Arc<Author>>,
    venues: BTreeMap<String, Arc<Venue>>,
    indexes: Indexes,
    value_counts: OnceLock<HashMap<TextSlot, BTreeMap<String, u64>>>,
}

impl Clone for Snapshot {
    fn clone(&self) -> Self {
        Snapshot {
            generation: self.generation,
            publications: self.publications.clone(),
            authors: self.authors.clone(),
            venues: self.venues.clone(),
            indexes: self.indexes.clone(),
            value_counts: OnceLock::new(),
        }
    }
}

impl Snapshot {
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.publications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.publications.is_empty()
    }

    pub fn publication(&self, id: &str) -> Option<&Publication> {
        self.publications.get(id).map(Arc::as_ref)
    }

    pub fn author(&self, id: &str) -> Option<&Author> {
        self.authors.get(id).map(Arc::as_ref)
    }

    pub fn venue(&self, id: &str) -> Option<&Venue> {
        self.venues.get(id).map(Arc::as_ref)
    }

    /// All publications in id order.
    pub fn publications(&self) -> impl Iterator<Item = &Publication> {
        self.publications.values().map(Arc::as_ref)
    }

    pub fn authors(&self) -> impl Iterator<Item = &Author> {
        self.authors.values().map(Arc::as_ref)
    }

    pub fn venues(&self) -> impl Iterator<Item = &Venue> {
        self.venues.values().map(Arc::as_ref)
    }

    /// Publications satisfying `predicate`, each once, in id order.
    pub fn scan<'a, F>(&'a self, predicate: F) -> impl Iterator<Item = &'a Publication> + 'a
    where
        F: Fn(&Publication) -> bool + 'a,
    {
        self.publications().filter(move |p| predicate(p))
    }

    /// Publications matching `filter`, in id order. Indexed slots narrow the
    /// candidate set before the compiled predicate runs.
    pub fn select(&self, filter: &FilterSet) -> Result<Vec<&Publication>, StoreError> {
        let compiled = filter.compile()?;
        Ok(self.select_compiled(&compiled))
    }

    pub fn select_compiled(&self, compiled: &CompiledFilter) -> Vec<&Publication> {
        match self.candidates(compiled) {
            None => self.publications().filter(|p| compiled.matches(p)).collect(),
            Some(ids) => ids
                .into_iter()
                .filter_map(|id| self.publication(id))
                .filter(|p| compiled.matches(p))
                .collect(),
        }
    }

    fn candidates(&self, compiled: &CompiledFilter) -> Option<BTreeSet<&str>> {
        let ix = &self.indexes;
        let mut sets: Vec<BTreeSet<&str>> = Vec::new();
        fn union<'a>(sets: &mut Vec<BTreeSet<&'a str>>, groups: Vec<Option<&'a BTreeSet<String>>>) {
            sets.push(groups.into_iter().flatten().flat_map(|s| s.iter().map(String::as_str)).collect());
        }
        if let Some(r) = compiled.year_range() {
            let lo = i32::try_from(r.min.max(i64::from(i32::MIN))).unwrap_or(i32::MIN);
            let hi = i32::try_from(r.max.min(i64::from(i32::MAX))).unwrap_or(i32::MAX);
            union(&mut sets, ix.by_year.range(Some(lo)..=Some(hi)).map(|(_, s)| Some(s)).collect());
        }
        if let Some(values) = compiled.text_values(TextSlot::TypesOfPaper) {
            let groups = values
                .iter()
                .filter_map(|v| v.parse::<DocumentType>().ok())
                .map(|t| ix.by_type.get(&t))
                .collect();
            union(&mut sets, groups);
        }
        if let Some(values) = compiled.text_values(TextSlot::FieldsOfStudy) {
            let groups = values
                .iter()
                .filter_map(|v| v.parse::<FieldOfStudy>().ok())
                .map(|f| ix.by_field.get(&f))
                .collect();
            union(&mut sets, groups);
        }
        if let Some(values) = compiled.text_values(TextSlot::Venues) {
            union(&mut sets, values.iter().map(|v| ix.by_venue.get(v)).collect());
        }
        if let Some(values) = compiled.text_values(TextSlot::Authors) {
            union(&mut sets, values.iter().map(|v| ix.by_author.get(v)).collect());
        }
        sets.sort_by_key(BTreeSet::len);
        let mut iter = sets.into_iter();
        let first = iter.next()?;
        Some(iter.fold(first, |acc, s| acc.intersection(&s).copied().collect()))
    }

    /// Number of publications carrying each display value of a free-text
    /// slot (authors, venues, publishers). Computed once per snapshot.
    pub fn value_counts(&self, slot: TextSlot) -> &BTreeMap<String, u64> {
        static EMPTY: BTreeMap<String, u64> = BTreeMap::new();
        let all = self.value_counts.get_or_init(|| {
            let mut authors = BTreeMap::new();
            let mut venues = BTreeMap::new();
            let mut publishers = BTreeMap::new();
            for p in self.publications() {
                let distinct: BTreeSet<&String> = p.author_names.iter().collect();
                for a in distinct {
                    *authors.entry(a.clone()).or_insert(0) += 1;
                }
                if let Some(v) = &p.venue_name {
                    *venues.entry(v.clone()).or_insert(0) += 1;
                }
                if let Some(v) = &p.publisher {
                    *publishers.entry(v.clone()).or_insert(0) += 1;
                }
            }
            HashMap::from([
                (TextSlot::Authors, authors),
                (TextSlot::Venues, venues),
                (TextSlot::Publishers, publishers),
            ])
        });
        all.get(&slot).unwrap_or(&EMPTY)
    }

    /// Recomputes every index from the records and compares with the
    /// maintained ones.
    pub fn indexes_consistent(&self) -> bool {
        let mut fresh = Indexes::default();
        for p in self.publications() {
            fresh.insert(p);
        }
        fresh.by_year == self.indexes.by_year
            && fresh.by_type == self.indexes.by_type
            && fresh.by_field == self.indexes.by_field
            && fresh.by_venue == self.indexes.by_venue
            && fresh.by_author == self.indexes.by_author
    }
}

/// Mutations staged against a private copy of the current snapshot.
pub struct WriteBatch {
    next: Snapshot,
}

impl WriteBatch {
    /// The staged state, including writes made so far in this batch.
    pub fn view(&self) -> &Snapshot {
        &self.next
    }

    /// Returns whether a record with this id existed.
    pub fn upsert_publication(&mut self, p: Publication) -> Result<bool, StoreError> {
        let violations = validate(&p);
        if !violations.is_empty() {
            return Err(StoreError::Invalid(violations));
        }
        let snap = &mut self.next;
        let previous = snap.publications.remove(&p.id);
        if let Some(old) = &previous {
            snap.indexes.remove(old);
        }
        snap.indexes.insert(&p);
        snap.publications.insert(p.id.clone(), Arc::new(p));
        Ok(previous.is_some())
    }

    pub fn delete_publication(&mut self, id: &str) -> Option<Publication> {
        let snap = &mut self.next;
        let old = snap.publications.remove(id)?;
        snap.indexes.remove(&old);
        Some(Arc::unwrap_or_clone(old))
    }

    pub fn upsert_author(&mut self, a: Author) -> Result<bool, StoreError> {
        let violations = validate_author(&a);
        if !violations.is_empty() {
            return Err(StoreError::Invalid(violations));
        }
        Ok(self.next.authors.insert(a.id.clone(), Arc::new(a)).is_some())
    }

    pub fn delete_author(&mut self, id: &str) -> Option<Author> {
        self.next.authors.remove(id).map(Arc::unwrap_or_clone)
    }

    pub fn upsert_venue(&mut self, v: Venue) -> Result<bool, StoreError> {
        let violations = validate_venue(&v);
        if !violations.is_empty() {
            return Err(StoreError::Invalid(violations));
        }
        Ok(self.next.venues.insert(v.id.clone(), Arc::new(v)).is_some())
    }

    pub fn delete_venue(&mut self, id: &str) -> Option<Venue> {
        self.next.venues.remove(id).map(Arc::unwrap_or_clone)
    }

    pub fn upsert(&mut self, record: Record) -> Result<bool, StoreError> {
        match record {
            Record::Publication(p) => self.upsert_publication(p),
            Record::Author(a) => self.upsert_author(a),
            Record::Venue(v) => self.upsert_venue(v),
        }
    }

    pub fn delete(&mut self, collection: Collection, id: &str) -> bool {
        match collection {
            Collection::Publications => self.delete_publication(id).is_some(),
            Collection::Authors => self.delete_author(id).is_some(),
            Collection::Venues => self.delete_venue(id).is_some(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CacheEntry {
    pub key: String,
    pub value: Arc<[u8]>,
    pub created_at: SystemTime,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

#[derive(Debug, Default)]
struct ResultCache {
    entries: Mutex<HashMap<String, CacheEntry>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

/// Handle to the three collections, their indexes and the result cache.
#[derive(Debug)]
pub struct Store {
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
    cache: ResultCache,
    cache_enabled: AtomicBool,
    dir: Option<PathBuf>,
}

impl Default for Store {
    fn default() -> Self {
        Store::in_memory()
    }
}

impl Store {
    pub fn in_memory() -> Store {
        Store {
            current: RwLock::new(Arc::new(Snapshot::default())),
            writer: Mutex::new(()),
            cache: ResultCache::default(),
            cache_enabled: AtomicBool::new(true),
            dir: None,
        }
    }

    /// Opens (or creates) a store persisted under `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Store, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut snap = Snapshot::default();
        for p in read_jsonl::<Publication>(&dir.join(PUBLICATIONS_FILE))? {
            snap.indexes.insert(&p);
            snap.publications.insert(p.id.clone(), Arc::new(p));
        }
        for a in read_jsonl::<Author>(&dir.join(AUTHORS_FILE))? {
            snap.authors.insert(a.id.clone(), Arc::new(a));
        }
        for v in read_jsonl::<Venue>(&dir.join(VENUES_FILE))? {
            snap.venues.insert(v.id.clone(), Arc::new(v));
        }
        let mut store = Store::in_memory();
        store.current = RwLock::new(Arc::new(snap));
        store.dir = Some(dir);
        Ok(store)
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("store lock poisoned").clone()
    }

    /// Runs `f` as one exclusive write batch. Nothing is visible to readers
    /// unless `f` succeeds and the batch is persisted.
    pub fn write<T, E>(&self, f: impl FnOnce(&mut WriteBatch) -> Result<T, E>) -> Result<T, E>
    where
        E: From<StoreError>,
    {
        let _writer = self.writer.lock().expect("writer lock poisoned");
        let mut batch = WriteBatch { next: (*self.snapshot()).clone() };
        let out = f(&mut batch)?;
        let mut next = batch.next;
        next.generation += 1;
        if let Some(dir) = &self.dir {
            persist(dir, &next).map_err(StoreError::from)?;
        }
        let mut entries = self.cache.entries.lock().expect("cache lock poisoned");
        *self.current.write().expect("store lock poisoned") = Arc::new(next);
        entries.clear();
        Ok(out)
    }

    /// Single-record write. Returns whether the id existed before.
    pub fn upsert(&self, record: Record) -> Result<bool, StoreError> {
        self.write(|b| b.upsert(record))
    }

    pub fn delete(&self, collection: Collection, id: &str) -> Result<bool, StoreError> {
        self.write(|b| Ok::<_, StoreError>(b.delete(collection, id)))
    }

    pub fn set_cache_enabled(&self, enabled: bool) {
        self.cache_enabled.store(enabled, Ordering::SeqCst);
        if !enabled {
            self.cache.entries.lock().expect("cache lock poisoned").clear();
        }
    }

    pub fn cache_get(&self, key: &str) -> Option<Arc<[u8]>> {
        if !self.cache_enabled.load(Ordering::SeqCst) {
            return None;
        }
        let hit = self.cache.entries.lock().expect("cache lock poisoned").get(key).map(|e| e.value.clone());
        let counter = if hit.is_some() { &self.cache.hits } else { &self.cache.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        hit
    }

    /// Stores a result computed against `generation`. It is dropped if a
    /// write has landed since, so a stale result never enters the cache.
    pub fn cache_put(&self, generation: u64, key: impl Into<String>, value: impl Into<Arc<[u8]>>) -> bool {
        if !self.cache_enabled.load(Ordering::SeqCst) {
            return false;
        }
        let mut entries = self.cache.entries.lock().expect("cache lock poisoned");
        if self.snapshot().generation != generation {
            return false;
        }
        let key = key.into();
        entries.insert(key.clone(), CacheEntry { key, value: value.into(), created_at: SystemTime::now() });
        true
    }

    pub fn cache_stats(&self) -> CacheStats {
        CacheStats {
            hits: self.cache.hits.load(Ordering::Relaxed),
            misses: self.cache.misses.load(Ordering::Relaxed),
            entries: self.cache.entries.lock().expect("cache lock poisoned").len(),
        }
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
            file: path.display().to_string(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

fn write_jsonl<'a, T: Serialize + 'a>(path: &Path, records: impl Iterator<Item = &'a T>) -> io::Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        for r in records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    fs::rename(tmp, path)
}

fn persist(dir: &Path, snap: &Snapshot) -> io::Result<()> {
    write_jsonl(&dir.join(PUBLICATIONS_FILE), snap.publications.values().map(Arc::as_ref))?;
    write_jsonl(&dir.join(AUTHORS_FILE), snap.authors.values().map(Arc::as_ref))?;
    write_jsonl(&dir.join(VENUES_FILE), snap.venues.values().map(Arc::as_ref))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queryfilter::Range;

    fn paper(id: &str, year: Option<i32>) -> Publication {
        let mut p = Publication::new(id, format!("title {id}"), DocumentType::Article);
        p.year_published = year;
        p
    }

    #[test]
    fn upsert_reports_previous_existence() {
        let store = Store::in_memory();
        assert!(!store.upsert(Record::Publication(paper("a", Some(2020)))).unwrap());
        let mut second = paper("a", Some(2021));
        second.title = "second".into();
        assert!(store.upsert(Record::Publication(second.clone())).unwrap());
        assert_eq!(store.snapshot().publication("a"), Some(&second));
        assert!(store.snapshot().indexes_consistent());
    }

    #[test]
    fn invalid_records_are_refused() {
        let store = Store::in_memory();
        let mut p = paper("a", Some(1800));
        p.author_ids.push("x".into());
        match store.upsert(Record::Publication(p)) {
            Err(StoreError::Invalid(v)) => assert_eq!(v.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(store.snapshot().is_empty());
    }

    #[test]
    fn scan_is_ordered_and_filtered() {
        let store = Store::in_memory();
        store
            .write(|b| {
                for (id, y) in [("c", Some(2020)), ("a", Some(2019)), ("b", Some(2020))] {
                    b.upsert_publication(paper(id, y))?;
                }
                Ok::<_, StoreError>(())
            })
            .unwrap();
        let snap = store.snapshot();
        let all: Vec<_> = snap.scan(|_| true).map(|p| p.id.as_str()).collect();
        assert_eq!(all, ["a", "b", "c"]);
        let y2020: Vec<_> = snap.scan(|p| p.year_published == Some(2020)).map(|p| p.id.as_str()).collect();
        assert_eq!(y2020, ["b", "c"]);
        assert_eq!(Store::in_memory().snapshot().scan(|_| true).count(), 0);
    }

    #[test]
    fn select_uses_indexes_and_agrees_with_scan() {
        let store = Store::in_memory();
        store
            .write(|b| {
                for i in 0..50 {
                    let mut p = paper(&format!("p{i:02}"), if i % 7 == 0 { None } else { Some(2000 + i % 5) });
                    p.author_ids = vec![format!("a{}", i % 3)];
                    p.author_names = vec![format!("Author {}", i % 3)];
                    p.venue_name = Some(if i % 2 == 0 { "ACL".into() } else { "CVPR".into() });
                    b.upsert_publication(p)?;
                }
                Ok::<_, StoreError>(())
            })
            .unwrap();
        let snap = store.snapshot();
        let fs = FilterSet {
            authors: Some(vec!["author 1".into(), "Author 2".into()]),
            venues: Some(vec!["acl".into()]),
            year_range: Some(Range::new(2001, 2003)),
            ..Default::default()
        };
        let compiled = fs.compile().unwrap();
        let via_index: Vec<_> = snap.select(&fs).unwrap().into_iter().map(|p| p.id.clone()).collect();
        let via_scan: Vec<_> = snap.scan(|p| compiled.matches(p)).map(|p| p.id.clone()).collect();
        assert!(!via_scan.is_empty());
        assert_eq!(via_index, via_scan);
    }

    #[test]
    fn cache_lifecycle() {
        let store = Store::in_memory();
        assert!(store.cache_get("k").is_none());
        let generation = store.snapshot().generation();
        assert!(store.cache_put(generation, "k", b"v".to_vec()));
        assert_eq!(store.cache_get("k").as_deref(), Some(&b"v"[..]));
        store.upsert(Record::Publication(paper("a", None))).unwrap();
        assert!(store.cache_get("k").is_none());
        assert!(!store.cache_put(generation, "k", b"stale".to_vec()));
        let stats = store.cache_stats();
        assert_eq!((stats.hits, stats.misses), (1, 2));
    }

    #[test]
    fn failed_batch_leaves_store_untouched() {
        let store = Store::in_memory();
        let res: Result<(), StoreError> = store.write(|b| {
            b.upsert_publication(paper("a", None))?;
            b.upsert_publication(paper("", None))?;
            Ok(())
        });
        assert!(res.is_err());
        assert!(store.snapshot().is_empty());
        assert_eq!(store.snapshot().generation(), 0);
    }

    #[test]
    fn survives_restart() {
        let dir = tempfile::tempdir().unwrap();
        {
            let store = Store::open(dir.path()).unwrap();
            store.upsert(Record::Publication(paper("a", Some(2020)))).unwrap();
            store
                .upsert(Record::Author(Author { id: "x".into(), full_name: "X Y".into(), number: None, orcid: None }))
                .unwrap();
            store.upsert(Record::Venue(Venue { id: "v".into(), names: vec!["ACL".into()] })).unwrap();
        }
        let store = Store::open(dir.path()).unwrap();
        let snap = store.snapshot();
        assert_eq!(snap.len(), 1);
        assert_eq!(snap.author("x").unwrap().full_name, "X Y");
        assert_eq!(snap.venue("v").unwrap().display_name(), Some("ACL"));
        assert!(snap.indexes_consistent());
    }

    #[test]
    fn delete_updates_indexes() {
        let store = Store::in_memory();
        store.upsert(Record::Publication(paper("a", Some(2020)))).unwrap();
        assert!(store.delete(Collection::Publications, "a").unwrap());
        assert!(!store.delete(Collection::Publications, "a").unwrap());
        assert!(store.snapshot().indexes_consistent());
        assert!(store.snapshot().indexes.by_year.is_empty());
    }
}
