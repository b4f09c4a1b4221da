//! Embedded, incrementally updatable data backend.
//!
//! Houses all entities (interactions, resources, tag assignments) plus the
//! secondary indices the recommendation engine queries: popularity counters,
//! user/resource interaction sets, tag multisets and an inverted term index
//! with TF-IDF similarity.
//!
//! Concurrency contract: many concurrent readers, writes serialized through a
//! single writer path. A write is durable in memory and visible to readers as
//! soon as the write call returns, which keeps visibility well inside the
//! configured refresh bound (at most 1 second). Readers operate on a consistent
//! snapshot; torn index states are not observable.

pub mod ingest;
mod snapshot;
pub mod text;
mod types;

use std::collections::{BTreeMap, BTreeSet};

use parking_lot::{RwLock, RwLockReadGuard};

pub use ingest::{IngestReport, RecordError};
pub use snapshot::SnapshotManifest;
pub use types::{DatasetStats, Interaction, InteractionKind, Resource, TagAssignment};

use crate::error::{Error, Result};
use text::TermVector;

/// Store tuning knobs.
#[derive(Debug, Clone)]
pub struct StoreConfig {
    /// Upper bound, in milliseconds, on how long a completed write may stay
    /// invisible to readers. Capped at 1000 ms.
    pub refresh_bound_ms: u64,
}

impl StoreConfig {
    pub const MAX_REFRESH_BOUND_MS: u64 = 1000;

    pub fn new(refresh_bound_ms: u64) -> Result<Self> {
        if refresh_bound_ms > Self::MAX_REFRESH_BOUND_MS {
            return Err(Error::validation(format!(
                "refresh bound must be <= {} ms, got {}",
                Self::MAX_REFRESH_BOUND_MS,
                refresh_bound_ms
            )));
        }
        Ok(StoreConfig { refresh_bound_ms })
    }
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            refresh_bound_ms: Self::MAX_REFRESH_BOUND_MS,
        }
    }
}

/// Acknowledgment returned by every successful write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ack {
    /// Store version after the write; increments by one per applied write.
    pub store_version: u64,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct ResourceRecord {
    pub(crate) meta: Option<Resource>,
    pub(crate) token_counts: BTreeMap<String, u64>,
    pub(crate) popularity: u64,
    pub(crate) users: BTreeSet<String>,
    pub(crate) tag_counts: BTreeMap<String, u64>,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct UserRecord {
    /// Indices into the interaction log, in insertion order.
    pub(crate) history: Vec<usize>,
    /// Distinct resources the user interacted with (the CF item set).
    pub(crate) distinct: BTreeSet<String>,
    /// Tag use counts; every application event counts.
    pub(crate) tag_counts: BTreeMap<String, u64>,
}

/// Full store state. Engine operations read it through a lock guard so one
/// request sees one consistent version throughout.
#[derive(Debug, Default)]
pub struct StoreState {
    version: u64,
    interactions: Vec<Interaction>,
    tag_log: Vec<TagAssignment>,
    resources: BTreeMap<String, ResourceRecord>,
    users: BTreeMap<String, UserRecord>,
    /// term -> resources whose indexed text contains the term.
    postings: BTreeMap<String, BTreeSet<String>>,
    /// tag -> users who applied it at least once.
    tag_users: BTreeMap<String, BTreeSet<String>>,
    /// (user, resource, tag) -> application count; length is the number of
    /// distinct tag assignments.
    tag_triples: BTreeMap<(String, String, String), u64>,
}

impl StoreState {
    fn apply_interaction(&mut self, i: Interaction) {
        let idx = self.interactions.len();
        let rec = self.resources.entry(i.resource_id.clone()).or_default();
        rec.popularity += 1;
        rec.users.insert(i.user_id.clone());

        let user = self.users.entry(i.user_id.clone()).or_default();
        user.history.push(idx);
        user.distinct.insert(i.resource_id.clone());

        self.interactions.push(i);
        self.version += 1;
    }

    fn apply_resource(&mut self, r: Resource) {
        let new_counts = text::term_counts(&r.combined_text());
        let rec = self.resources.entry(r.resource_id.clone()).or_default();
        let old_counts = std::mem::take(&mut rec.token_counts);
        rec.token_counts = new_counts;

        // Reindex: drop postings for terms no longer present, add new ones.
        for term in old_counts.keys() {
            if !rec.token_counts.contains_key(term) {
                if let Some(set) = self.postings.get_mut(term) {
                    set.remove(&r.resource_id);
                    if set.is_empty() {
                        self.postings.remove(term);
                    }
                }
            }
        }
        for term in rec.token_counts.keys() {
            self.postings
                .entry(term.clone())
                .or_default()
                .insert(r.resource_id.clone());
        }
        rec.meta = Some(r);
        self.version += 1;
    }

    fn apply_tag(&mut self, t: TagAssignment) {
        self.resources
            .entry(t.resource_id.clone())
            .or_default()
            .tag_counts
            .entry(t.tag.clone())
            .and_modify(|c| *c += 1)
            .or_insert(1);

        let user = self.users.entry(t.user_id.clone()).or_default();
        *user.tag_counts.entry(t.tag.clone()).or_insert(0) += 1;

        self.tag_users
            .entry(t.tag.clone())
            .or_default()
            .insert(t.user_id.clone());

        *self
            .tag_triples
            .entry((t.user_id.clone(), t.resource_id.clone(), t.tag.clone()))
            .or_insert(0) += 1;

        self.tag_log.push(t);
        self.version += 1;
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn n_resources(&self) -> u64 {
        self.resources.len() as u64
    }

    pub fn has_resource(&self, resource_id: &str) -> bool {
        self.resources.contains_key(resource_id)
    }

    /// Explicit metadata; `None` for unknown ids and for interaction-only stubs.
    pub fn resource_meta(&self, resource_id: &str) -> Option<&Resource> {
        self.resources.get(resource_id).and_then(|r| r.meta.as_ref())
    }

    pub fn resource_ids(&self) -> impl Iterator<Item = &str> {
        self.resources.keys().map(String::as_str)
    }

    pub fn user_ids(&self) -> impl Iterator<Item = &str> {
        self.users.keys().map(String::as_str)
    }

    pub fn popularity(&self, resource_id: &str) -> u64 {
        self.resources
            .get(resource_id)
            .map(|r| r.popularity)
            .unwrap_or(0)
    }

    /// Distinct resources the user interacted with; empty set for unknown users.
    pub fn distinct_resources(&self, user_id: &str) -> BTreeSet<String> {
        self.users
            .get(user_id)
            .map(|u| u.distinct.clone())
            .unwrap_or_default()
    }

    pub(crate) fn distinct_resources_ref(&self, user_id: &str) -> Option<&BTreeSet<String>> {
        self.users.get(user_id).map(|u| &u.distinct)
    }

    pub fn user_tag_counts(&self, user_id: &str) -> BTreeMap<String, u64> {
        self.users
            .get(user_id)
            .map(|u| u.tag_counts.clone())
            .unwrap_or_default()
    }

    pub(crate) fn user_tag_counts_ref(&self, user_id: &str) -> Option<&BTreeMap<String, u64>> {
        self.users.get(user_id).map(|u| &u.tag_counts)
    }

    pub(crate) fn users_of_resource(&self, resource_id: &str) -> Option<&BTreeSet<String>> {
        self.resources.get(resource_id).map(|r| &r.users)
    }

    pub(crate) fn users_of_tag(&self, tag: &str) -> Option<&BTreeSet<String>> {
        self.tag_users.get(tag)
    }

    /// Resources whose indexed text contains `term`.
    pub fn posting(&self, term: &str) -> Option<&BTreeSet<String>> {
        self.postings.get(term)
    }

    pub fn document_frequency(&self, term: &str) -> u64 {
        self.postings.get(term).map(|s| s.len() as u64).unwrap_or(0)
    }

    pub fn history(&self, user_id: &str) -> Vec<Interaction> {
        let Some(user) = self.users.get(user_id) else {
            return Vec::new();
        };
        let mut out: Vec<Interaction> = user
            .history
            .iter()
            .map(|&idx| self.interactions[idx].clone())
            .collect();
        // Stable sort keeps insertion order among equal timestamps.
        out.sort_by_key(|i| i.timestamp_ms);
        out
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    /// Raw tag application log, in insertion order.
    pub fn tag_log(&self) -> &[TagAssignment] {
        &self.tag_log
    }

    /// Explicit (non-stub) resource metadata, in id order.
    pub fn resource_metas(&self) -> impl Iterator<Item = &Resource> {
        self.resources.values().filter_map(|r| r.meta.as_ref())
    }

    /// TF-IDF vector of a resource's indexed text. Empty for stubs, unknown
    /// ids and resources whose text produced no index terms.
    pub fn resource_vector(&self, resource_id: &str) -> TermVector {
        let Some(rec) = self.resources.get(resource_id) else {
            return TermVector::empty();
        };
        self.vector_from_counts(&rec.token_counts)
    }

    /// TF-IDF vector for arbitrary query text against the current corpus.
    pub fn query_vector(&self, query: &str) -> TermVector {
        self.vector_from_counts(&text::term_counts(query))
    }

    fn vector_from_counts(&self, counts: &BTreeMap<String, u64>) -> TermVector {
        if counts.is_empty() {
            return TermVector::empty();
        }
        let n_docs = self.resources.len() as u64;
        TermVector::from_counts(counts, n_docs, |term| self.document_frequency(term))
    }

    /// Cosine between a prepared query vector and one resource, without
    /// materializing the resource vector.
    pub fn cosine_to_resource(&self, query: &TermVector, resource_id: &str) -> f64 {
        self.scorer(query).cosine(resource_id)
    }

    /// Request-scoped scorer that ranks many resources against one query
    /// vector, caching idf values across calls.
    pub fn scorer<'a>(&'a self, query: &'a TermVector) -> ResourceScorer<'a> {
        ResourceScorer {
            state: self,
            query,
            n_docs: self.resources.len() as u64,
            idf_cache: std::collections::HashMap::new(),
        }
    }

    pub fn text_similarity(&self, a: &str, b: &str) -> Result<f64> {
        for id in [a, b] {
            if !self.resources.contains_key(id) {
                return Err(Error::not_found("resource", id));
            }
        }
        Ok(self.resource_vector(a).cosine(&self.resource_vector(b)))
    }

    pub fn compute_stats(&self) -> DatasetStats {
        DatasetStats::from_counts(
            self.interactions.len() as u64,
            self.users.len() as u64,
            self.resources.len() as u64,
            self.tag_triples.len() as u64,
        )
    }
}

/// Scores resources against one query vector over a fixed state snapshot.
///
/// Terms accumulate in document term order, so values are reproducible bit
/// for bit; the idf cache only avoids recomputing per-term logarithms.
pub struct ResourceScorer<'a> {
    state: &'a StoreState,
    query: &'a TermVector,
    n_docs: u64,
    idf_cache: std::collections::HashMap<&'a str, f64>,
}

impl ResourceScorer<'_> {
    /// Cosine in [0, 1]; 0 for stubs, unknown ids and empty queries.
    pub fn cosine(&mut self, resource_id: &str) -> f64 {
        if self.query.norm() == 0.0 {
            return 0.0;
        }
        let Some(rec) = self.state.resources.get(resource_id) else {
            return 0.0;
        };
        if rec.token_counts.is_empty() {
            return 0.0;
        }
        let mut dot = 0.0;
        let mut norm_sq = 0.0;
        for (term, tf) in &rec.token_counts {
            let idf = *self
                .idf_cache
                .entry(term.as_str())
                .or_insert_with(|| text::idf(self.n_docs, self.state.document_frequency(term)));
            let w = *tf as f64 * idf;
            norm_sq += w * w;
            if let Some(q) = self.query.weights().get(term) {
                dot += w * q;
            }
        }
        if norm_sq == 0.0 || dot == 0.0 {
            return 0.0;
        }
        (dot / (norm_sq.sqrt() * self.query.norm())).clamp(0.0, 1.0)
    }
}

/// Thread-safe store handle.
pub struct Store {
    state: RwLock<StoreState>,
    config: StoreConfig,
}

impl Default for Store {
    fn default() -> Self {
        Store::new(StoreConfig::default())
    }
}

impl Store {
    pub fn new(config: StoreConfig) -> Self {
        Store {
            state: RwLock::new(StoreState::default()),
            config,
        }
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    /// Consistent read snapshot; engine operations hold one guard per request.
    pub fn read(&self) -> RwLockReadGuard<'_, StoreState> {
        self.state.read()
    }

    pub fn version(&self) -> u64 {
        self.state.read().version
    }

    pub fn add_interaction(&self, interaction: Interaction) -> Result<Ack> {
        interaction.validate()?;
        let mut state = self.state.write();
        state.apply_interaction(interaction);
        Ok(Ack {
            store_version: state.version,
        })
    }

    pub fn add_resource(&self, resource: Resource) -> Result<Ack> {
        resource.validate()?;
        let mut state = self.state.write();
        state.apply_resource(resource);
        Ok(Ack {
            store_version: state.version,
        })
    }

    pub fn add_tag_assignment(&self, tag: TagAssignment) -> Result<Ack> {
        tag.validate()?;
        let mut state = self.state.write();
        state.apply_tag(tag);
        Ok(Ack {
            store_version: state.version,
        })
    }

    /// Chronologically ordered interaction history (ascending timestamp,
    /// insertion order among ties). Empty for unknown users.
    pub fn get_user_history(&self, user_id: &str) -> Vec<Interaction> {
        self.state.read().history(user_id)
    }

    /// Cosine similarity of the two resources' TF-IDF vectors.
    pub fn text_similarity(&self, a: &str, b: &str) -> Result<f64> {
        self.state.read().text_similarity(a, b)
    }

    pub fn compute_stats(&self) -> DatasetStats {
        self.state.read().compute_stats()
    }

    pub fn has_resource(&self, resource_id: &str) -> bool {
        self.state.read().has_resource(resource_id)
    }

    pub fn popularity(&self, resource_id: &str) -> u64 {
        self.state.read().popularity(resource_id)
    }

    pub fn distinct_resources(&self, user_id: &str) -> BTreeSet<String> {
        self.state.read().distinct_resources(user_id)
    }

    pub fn user_tag_counts(&self, user_id: &str) -> BTreeMap<String, u64> {
        self.state.read().user_tag_counts(user_id)
    }

    pub fn user_ids(&self) -> Vec<String> {
        self.state.read().user_ids().map(str::to_owned).collect()
    }

    pub fn resource_ids(&self) -> Vec<String> {
        self.state.read().resource_ids().map(str::to_owned).collect()
    }

    /// One consistent copy of the full dataset (interaction log, explicit
    /// resources, tag log), e.g. for offline evaluation of the live store.
    pub fn export_dataset(&self) -> (Vec<Interaction>, Vec<Resource>, Vec<TagAssignment>) {
        let state = self.state.read();
        (
            state.interactions().to_vec(),
            state.resource_metas().cloned().collect(),
            state.tag_log().to_vec(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn click(u: &str, r: &str, ts: i64) -> Interaction {
        Interaction::click(u, r, ts)
    }

    #[test]
    fn popularity_counts_every_event_distinct_pairs_deduped() {
        let store = Store::default();
        store.add_interaction(click("u1", "r1", 1)).unwrap();
        store.add_interaction(click("u2", "r1", 2)).unwrap();
        store.add_interaction(click("u1", "r2", 3)).unwrap();
        assert_eq!(store.popularity("r1"), 2);
        assert_eq!(store.popularity("r2"), 1);

        // Same click twice: popularity 2, distinct-pair index holds one entry.
        store.add_interaction(click("u3", "r3", 4)).unwrap();
        store.add_interaction(click("u3", "r3", 4)).unwrap();
        assert_eq!(store.popularity("r3"), 2);
        assert_eq!(store.distinct_resources("u3").len(), 1);
    }

    #[test]
    fn stats_average_from_seven_interactions_three_users() {
        let store = Store::default();
        for (u, r, ts) in [
            ("u1", "r1", 1),
            ("u1", "r2", 2),
            ("u1", "r3", 3),
            ("u2", "r1", 4),
            ("u2", "r2", 5),
            ("u3", "r1", 6),
            ("u3", "r1", 7),
        ] {
            store.add_interaction(click(u, r, ts)).unwrap();
        }
        let stats = store.compute_stats();
        assert_eq!(stats.n_interactions, 7);
        assert_eq!(stats.n_users, 3);
        assert!((stats.avg_interactions_per_user - 2.33).abs() < 0.01);
    }

    #[test]
    fn add_resource_indexes_tokens_and_replaces() {
        let store = Store::default();
        store
            .add_resource(Resource::new("r1", "", "algebra lineal basica", []))
            .unwrap();
        {
            let state = store.read();
            for term in ["algebra", "lineal", "basica"] {
                assert!(state.posting(term).unwrap().contains("r1"), "{term}");
            }
        }

        // Replace: only latest tokens indexed.
        store
            .add_resource(Resource::new("r1", "", "geometria plana", []))
            .unwrap();
        {
            let state = store.read();
            assert!(state.posting("algebra").is_none());
            assert!(state.posting("geometria").unwrap().contains("r1"));
            assert_eq!(state.n_resources(), 1);
        }

        // Empty description: resource exists, contributes no postings.
        store.add_resource(Resource::new("r2", "", "", [])).unwrap();
        let state = store.read();
        assert!(state.has_resource("r2"));
        assert!(state.resource_vector("r2").is_empty());
    }

    #[test]
    fn add_resource_rejects_empty_id() {
        let store = Store::default();
        assert!(store.add_resource(Resource::new("", "t", "d", [])).is_err());
    }

    #[test]
    fn tags_lowercase_and_collapse() {
        let store = Store::default();
        store
            .add_tag_assignment(TagAssignment::new("u1", "r1", "Mapa", 1).unwrap())
            .unwrap();
        store
            .add_tag_assignment(TagAssignment::new("u1", "r1", "mapa", 2).unwrap())
            .unwrap();
        let tags = store.user_tag_counts("u1");
        assert_eq!(tags.get("mapa"), Some(&2));
        assert_eq!(store.compute_stats().n_tag_assignments, 1);
    }

    #[test]
    fn two_taggers_yield_avg_two_tags_per_resource() {
        let store = Store::default();
        store
            .add_tag_assignment(TagAssignment::new("u1", "r1", "mapa", 1).unwrap())
            .unwrap();
        store
            .add_tag_assignment(TagAssignment::new("u2", "r1", "rio", 2).unwrap())
            .unwrap();
        let stats = store.compute_stats();
        assert_eq!(stats.n_resources, 1);
        assert!((stats.avg_tags_per_resource - 2.0).abs() < 1e-12);
    }

    #[test]
    fn history_sorted_with_insertion_tie_break() {
        let store = Store::default();
        store.add_interaction(click("u1", "a", 3)).unwrap();
        store.add_interaction(click("u1", "b", 1)).unwrap();
        store.add_interaction(click("u1", "c", 2)).unwrap();
        let hist = store.get_user_history("u1");
        let order: Vec<&str> = hist.iter().map(|i| i.resource_id.as_str()).collect();
        assert_eq!(order, vec!["b", "c", "a"]);

        assert!(store.get_user_history("nobody").is_empty());

        // Equal timestamps preserve insertion order.
        store.add_interaction(click("u2", "x", 5)).unwrap();
        store.add_interaction(click("u2", "y", 5)).unwrap();
        let hist = store.get_user_history("u2");
        let order: Vec<&str> = hist.iter().map(|i| i.resource_id.as_str()).collect();
        assert_eq!(order, vec!["x", "y"]);
    }

    #[test]
    fn text_similarity_identical_disjoint_and_unknown() {
        let store = Store::default();
        store
            .add_resource(Resource::new("a", "", "rio mapa mundo", []))
            .unwrap();
        store
            .add_resource(Resource::new("b", "", "rio mapa mundo", []))
            .unwrap();
        store
            .add_resource(Resource::new("c", "", "fotosintesis celula", []))
            .unwrap();
        assert!((store.text_similarity("a", "b").unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(store.text_similarity("a", "c").unwrap(), 0.0);
        assert!(matches!(
            store.text_similarity("a", "zz"),
            Err(Error::NotFound { .. })
        ));
    }

    #[test]
    fn stub_resources_have_empty_vectors_and_count_in_stats() {
        let store = Store::default();
        store.add_interaction(click("u1", "ghost", 1)).unwrap();
        assert!(store.has_resource("ghost"));
        assert!(store.read().resource_vector("ghost").is_empty());
        assert_eq!(store.compute_stats().n_resources, 1);

        // Later metadata upgrade keeps popularity.
        store
            .add_resource(Resource::new("ghost", "t", "texto util aqui", []))
            .unwrap();
        assert_eq!(store.popularity("ghost"), 1);
        assert!(!store.read().resource_vector("ghost").is_empty());
    }

    #[test]
    fn refresh_bound_capped() {
        assert!(StoreConfig::new(1000).is_ok());
        assert!(StoreConfig::new(1001).is_err());
    }

    #[test]
    fn store_version_increments_per_write() {
        let store = Store::default();
        let a1 = store.add_interaction(click("u", "r", 1)).unwrap();
        let a2 = store.add_resource(Resource::new("r", "", "", [])).unwrap();
        assert_eq!(a1.store_version + 1, a2.store_version);
        assert_eq!(store.version(), a2.store_version);
    }
}
