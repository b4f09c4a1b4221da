//! Ranked recommendation lists for the seven supported use cases.
//!
//! Every operation is read-only: it takes one consistent store snapshot and
//! one immutable profile snapshot at request start, so arbitrarily many
//! requests can run concurrently and repeated runs on the same state produce
//! byte-identical output.
//!
//! Ranking rules shared by all lists:
//! - candidate scores are accumulated in neighborhood rank order,
//! - zero-score entries are dropped (an algorithm that cannot score a user
//!   yields an empty list, which is what coverage measures),
//! - ties break by higher popularity first, then lexicographic resource id.

pub mod goal;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use goal::GoalSpec;

use crate::error::{Error, Result};
use crate::profiles::{builtin, AlgorithmId, ProfileRegistry, RecommendationProfile, Signal};
use crate::store::text::TermVector;
use crate::store::{Store, StoreState};

/// One ranked recommendation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub resource_id: String,
    pub score: f64,
    /// 1-based position.
    pub rank: u32,
}

/// An ordered recommendation list, tagged with the algorithm and the profile
/// version that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub algorithm_id: AlgorithmId,
    pub profile_version: u64,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    fn new(algorithm_id: AlgorithmId, profile_version: u64) -> Self {
        RankedList {
            algorithm_id,
            profile_version,
            entries: Vec::new(),
        }
    }

    pub fn resource_ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.resource_id.as_str()).collect()
    }

    /// Checks the structural invariants every list must satisfy.
    pub fn check_invariants(&self, k: u32) -> Result<()> {
        if self.entries.len() > k as usize {
            return Err(Error::validation(format!(
                "list has {} entries, requested k = {k}",
                self.entries.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, entry) in self.entries.iter().enumerate() {
            if entry.rank != i as u32 + 1 {
                return Err(Error::validation(format!(
                    "rank {} at position {i}",
                    entry.rank
                )));
            }
            if !entry.score.is_finite() || entry.score < 0.0 {
                return Err(Error::validation(format!("bad score {}", entry.score)));
            }
            if i > 0 && self.entries[i - 1].score < entry.score {
                return Err(Error::validation("scores increase with rank".to_owned()));
            }
            if !seen.insert(entry.resource_id.as_str()) {
                return Err(Error::validation(format!(
                    "duplicate resource {}",
                    entry.resource_id
                )));
            }
        }
        Ok(())
    }
}

/// Engine output: the ranked list plus the cold-start marker.
///
/// `cold_start` is set when the target entity carries no usable signal for the
/// chosen algorithm (unknown user, no interactions, no tags, no indexable
/// text). It implies an empty list and tells callers to fall back to the
/// most-popular list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub list: RankedList,
    pub cold_start: bool,
}

/// One CF neighbor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub user_id: String,
    pub similarity: f64,
}

/// Top-n most similar users, ordered by similarity (descending, user id
/// breaking ties), excluding the target user, all similarities > 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Neighborhood {
    pub members: Vec<Neighbor>,
}

impl Neighborhood {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}

/// Stateless recommendation engine over a store and a profile registry.
#[derive(Clone)]
pub struct Engine {
    store: Arc<Store>,
    profiles: Arc<ProfileRegistry>,
}

impl Engine {
    pub fn new(store: Arc<Store>, profiles: Arc<ProfileRegistry>) -> Self {
        Engine { store, profiles }
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    pub fn profiles(&self) -> &Arc<ProfileRegistry> {
        &self.profiles
    }

    fn profile(&self, id: &str) -> Result<Arc<RecommendationProfile>> {
        self.profiles.get_profile(id)
    }

    /// UC1: most-popular baseline. Identical output for every caller.
    pub fn recommend_popular(&self, k: Option<u32>) -> Result<Recommendation> {
        let profile = self.profile(builtin::POPULAR)?;
        let k = resolve_k(k, &profile)?;
        let state = self.store.read();
        Ok(Recommendation {
            list: popular_list(&state, k, &profile),
            cold_start: false,
        })
    }

    /// UC2 (signal = interactions) / UC3 (signal = tags): user-based CF.
    ///
    /// The request signal picks the profile (`cf-default` or `cf-tags`); with
    /// no explicit signal the `cf-default` profile decides.
    pub fn recommend_cf(
        &self,
        user_id: &str,
        k: Option<u32>,
        requested_signal: Option<Signal>,
    ) -> Result<Recommendation> {
        let profile_id = match requested_signal {
            Some(Signal::Tags) => builtin::CF_TAGS,
            Some(Signal::Interactions) => builtin::CF_DEFAULT,
            None => builtin::CF_DEFAULT,
        };
        let profile = self.profile(profile_id)?;
        let signal = requested_signal.unwrap_or(profile.signal);
        let k = resolve_k(k, &profile)?;
        let state = self.store.read();
        Ok(cf_recommendation(&state, user_id, k, signal, &profile))
    }

    /// UC4: content-based filtering against the user's centroid text profile.
    pub fn recommend_cbf(&self, user_id: &str, k: Option<u32>) -> Result<Recommendation> {
        let profile = self.profile(builtin::CBF_DEFAULT)?;
        let k = resolve_k(k, &profile)?;
        let state = self.store.read();
        Ok(cbf_recommendation(&state, user_id, k, &profile, true))
    }

    /// UC4 variant keeping zero-score candidates, for inspection.
    pub fn recommend_cbf_unsuppressed(&self, user_id: &str, k: Option<u32>) -> Result<Recommendation> {
        let profile = self.profile(builtin::CBF_DEFAULT)?;
        let k = resolve_k(k, &profile)?;
        let state = self.store.read();
        Ok(cbf_recommendation(&state, user_id, k, &profile, false))
    }

    /// UC5: most text-similar resources to `resource_id`.
    pub fn similar_resources(&self, resource_id: &str, k: Option<u32>) -> Result<Recommendation> {
        let profile = self.profile(builtin::SIMILAR_DEFAULT)?;
        let k = resolve_k(k, &profile)?;
        let state = self.store.read();
        if !state.has_resource(resource_id) {
            return Err(Error::not_found("resource", resource_id));
        }
        let target = state.resource_vector(resource_id);
        let mut list = RankedList::new(profile.algorithm_id, profile.version);
        let cold_start = target.is_empty();
        if !cold_start {
            let mut scorer = state.scorer(&target);
            let scored = overlap_candidates(&state, &target, |id| id != resource_id)
                .into_iter()
                .map(|id| {
                    let score = scorer.cosine(&id);
                    (id, score)
                })
                .collect::<Vec<_>>();
            list.entries = rank_top_k(&state, scored, k, true);
        }
        Ok(Recommendation { list, cold_start })
    }

    /// UC6: CF restricted to users who also interacted with `resource_id`.
    pub fn recommend_contextual(
        &self,
        user_id: &str,
        resource_id: &str,
        k: Option<u32>,
    ) -> Result<Recommendation> {
        let profile = self.profile(builtin::CONTEXTUAL_DEFAULT)?;
        let k = resolve_k(k, &profile)?;
        let state = self.store.read();
        if !state.has_resource(resource_id) {
            return Err(Error::not_found("resource", resource_id));
        }
        Ok(contextual_recommendation(
            &state,
            user_id,
            resource_id,
            k,
            &profile,
        ))
    }

    /// UC7: goal-driven re-ranking of a CF base list (most-popular fallback).
    pub fn recommend_goal(
        &self,
        user_id: &str,
        goal: &GoalSpec,
        k: Option<u32>,
        lambda: Option<f64>,
    ) -> Result<Recommendation> {
        let profile = self.profile(builtin::GOAL_DEFAULT)?;
        let k = resolve_k(k, &profile)?;
        let lambda = match lambda {
            Some(l) if !(0.0..=1.0).contains(&l) => {
                return Err(Error::validation(format!("lambda must be in [0, 1], got {l}")))
            }
            Some(l) => l,
            None => profile.lambda,
        };
        let state = self.store.read();
        Ok(goal_recommendation(&state, user_id, goal, k, lambda, &profile))
    }

    /// Cosine over binary distinct-interaction sets.
    pub fn user_similarity_interactions(&self, u: &str, v: &str) -> f64 {
        let state = self.store.read();
        let (Some(iu), Some(iv)) = (
            state.distinct_resources_ref(u),
            state.distinct_resources_ref(v),
        ) else {
            return 0.0;
        };
        interaction_cosine(iu, iv)
    }

    /// Cosine over tag-frequency vectors.
    pub fn user_similarity_tags(&self, u: &str, v: &str) -> f64 {
        let state = self.store.read();
        let (Some(tu), Some(tv)) = (state.user_tag_counts_ref(u), state.user_tag_counts_ref(v))
        else {
            return 0.0;
        };
        tag_cosine(tu, tv)
    }

    /// Instrumentation: the neighborhood a CF request for `user_id` would use,
    /// sized by the signal's profile.
    pub fn neighborhood(&self, user_id: &str, signal: Signal) -> Result<Neighborhood> {
        let profile_id = match signal {
            Signal::Interactions => builtin::CF_DEFAULT,
            Signal::Tags => builtin::CF_TAGS,
        };
        let profile = self.profile(profile_id)?;
        let state = self.store.read();
        Ok(top_n_neighbors(&state, user_id, signal, profile.n as usize))
    }

    /// Instrumentation: neighborhood with an explicit size.
    pub fn neighborhood_with_n(&self, user_id: &str, signal: Signal, n: u32) -> Neighborhood {
        let state = self.store.read();
        top_n_neighbors(&state, user_id, signal, n as usize)
    }

    /// Text complexity in [0, 1]: mean words per sentence plus mean characters
    /// per word over the description, min-max normalized across the catalog.
    /// Resources without description text score 0.
    pub fn complexity_score(&self, resource_id: &str) -> Result<f64> {
        let state = self.store.read();
        if !state.has_resource(resource_id) {
            return Err(Error::not_found("resource", resource_id));
        }
        let bounds = complexity_bounds(&state);
        Ok(normalized_complexity(&state, resource_id, bounds))
    }
}

fn resolve_k(k: Option<u32>, profile: &RecommendationProfile) -> Result<u32> {
    let k = k.unwrap_or(profile.k_default);
    if k == 0 {
        return Err(Error::validation("k must be >= 1"));
    }
    Ok(k)
}

/// Sorts candidates by (score desc, popularity desc, resource id asc), keeps
/// the top k and assigns contiguous ranks. `suppress_zero` drops score-0
/// entries first.
fn rank_top_k(
    state: &StoreState,
    mut scored: Vec<(String, f64)>,
    k: u32,
    suppress_zero: bool,
) -> Vec<RankedEntry> {
    if suppress_zero {
        scored.retain(|(_, s)| *s > 0.0);
    }
    let k = k as usize;
    let compare = |a: &(String, f64), b: &(String, f64)| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then_with(|| state.popularity(&b.0).cmp(&state.popularity(&a.0)))
            .then_with(|| a.0.cmp(&b.0))
    };
    // The comparator is a strict total order (ids are unique), so partial
    // selection picks a uniquely determined top-k set.
    if scored.len() > 4 * k {
        scored.select_nth_unstable_by(k - 1, compare);
        scored.truncate(k);
    }
    scored.sort_by(compare);
    scored.truncate(k);
    scored
        .into_iter()
        .enumerate()
        .map(|(i, (resource_id, score))| RankedEntry {
            resource_id,
            score,
            rank: i as u32 + 1,
        })
        .collect()
}

fn popular_list(state: &StoreState, k: u32, profile: &RecommendationProfile) -> RankedList {
    let scored = state
        .resource_ids()
        .map(|id| (id.to_owned(), state.popularity(id) as f64))
        .collect::<Vec<_>>();
    let mut list = RankedList::new(profile.algorithm_id, profile.version);
    list.entries = rank_top_k(state, scored, k, true);
    list
}

/// |A ∩ B| / sqrt(|A| * |B|) over distinct-resource sets.
fn interaction_cosine(
    a: &std::collections::BTreeSet<String>,
    b: &std::collections::BTreeSet<String>,
) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let overlap = a.intersection(b).count() as f64;
    overlap / ((a.len() as f64) * (b.len() as f64)).sqrt()
}

/// Cosine over tag use-count vectors; iteration stays in tag order so sums are
/// reproducible bit for bit.
fn tag_cosine(a: &BTreeMap<String, u64>, b: &BTreeMap<String, u64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(tag, ca)| b.get(tag).map(|cb| (*ca as f64) * (*cb as f64)))
        .sum();
    if dot == 0.0 {
        return 0.0;
    }
    dot / (count_norm(a) * count_norm(b))
}

fn count_norm(counts: &BTreeMap<String, u64>) -> f64 {
    counts
        .values()
        .map(|c| (*c as f64) * (*c as f64))
        .sum::<f64>()
        .sqrt()
}

/// Top-n users by the chosen similarity, similarity > 0, target excluded.
fn top_n_neighbors(state: &StoreState, user_id: &str, signal: Signal, n: usize) -> Neighborhood {
    let mut sims: Vec<(String, f64)> = match signal {
        Signal::Interactions => {
            let Some(target) = state.distinct_resources_ref(user_id) else {
                return Neighborhood::default();
            };
            if target.is_empty() {
                return Neighborhood::default();
            }
            // Only users sharing at least one resource can have sim > 0.
            let mut overlap: BTreeMap<&str, u64> = BTreeMap::new();
            for resource in target {
                if let Some(users) = state.users_of_resource(resource) {
                    for v in users {
                        if v != user_id {
                            *overlap.entry(v.as_str()).or_insert(0) += 1;
                        }
                    }
                }
            }
            let target_len = target.len() as f64;
            overlap
                .into_iter()
                .map(|(v, shared)| {
                    let v_len = state
                        .distinct_resources_ref(v)
                        .map(|s| s.len())
                        .unwrap_or(0) as f64;
                    let sim = shared as f64 / (target_len * v_len).sqrt();
                    (v.to_owned(), sim)
                })
                .collect()
        }
        Signal::Tags => {
            let Some(target) = state.user_tag_counts_ref(user_id) else {
                return Neighborhood::default();
            };
            if target.is_empty() {
                return Neighborhood::default();
            }
            // Dot products accumulate in tag order for every candidate.
            let mut dots: BTreeMap<&str, f64> = BTreeMap::new();
            for (tag, count) in target {
                if let Some(users) = state.users_of_tag(tag) {
                    for v in users {
                        if v == user_id {
                            continue;
                        }
                        let v_count = state
                            .user_tag_counts_ref(v)
                            .and_then(|t| t.get(tag))
                            .copied()
                            .unwrap_or(0);
                        *dots.entry(v.as_str()).or_insert(0.0) +=
                            (*count as f64) * (v_count as f64);
                    }
                }
            }
            let target_norm = count_norm(target);
            dots.into_iter()
                .filter(|(_, dot)| *dot > 0.0)
                .map(|(v, dot)| {
                    let v_norm = state
                        .user_tag_counts_ref(v)
                        .map(count_norm)
                        .unwrap_or(0.0);
                    (v.to_owned(), dot / (target_norm * v_norm))
                })
                .collect()
        }
    };

    sims.retain(|(_, sim)| *sim > 0.0);
    sims.sort_by(|(ua, sa), (ub, sb)| {
        sb.partial_cmp(sa)
            .expect("similarities are finite")
            .then_with(|| ua.cmp(ub))
    });
    sims.truncate(n);
    Neighborhood {
        members: sims
            .into_iter()
            .map(|(user_id, similarity)| Neighbor {
                user_id,
                similarity,
            })
            .collect(),
    }
}

/// Resources whose indexed text shares at least one term with `query`; all
/// other resources have cosine 0 and never survive zero-score suppression.
fn overlap_candidates(
    state: &StoreState,
    query: &TermVector,
    keep: impl Fn(&str) -> bool,
) -> std::collections::BTreeSet<String> {
    let mut candidates = std::collections::BTreeSet::new();
    for term in query.weights().keys() {
        if let Some(posting) = state.posting(term) {
            for id in posting {
                if keep(id) {
                    candidates.insert(id.clone());
                }
            }
        }
    }
    candidates
}

/// Similarity-sum scoring of neighborhood items, excluding everything in
/// `excluded`. Accumulation order follows neighborhood rank.
fn score_neighborhood_items(
    state: &StoreState,
    neighborhood: &Neighborhood,
    excluded: &std::collections::BTreeSet<String>,
) -> Vec<(String, f64)> {
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for neighbor in &neighborhood.members {
        if let Some(items) = state.distinct_resources_ref(&neighbor.user_id) {
            for item in items {
                if !excluded.contains(item) {
                    *scores.entry(item.clone()).or_insert(0.0) += neighbor.similarity;
                }
            }
        }
    }
    scores.into_iter().collect()
}

fn cf_recommendation(
    state: &StoreState,
    user_id: &str,
    k: u32,
    signal: Signal,
    profile: &RecommendationProfile,
) -> Recommendation {
    let cold_start = match signal {
        Signal::Interactions => state
            .distinct_resources_ref(user_id)
            .map_or(true, |s| s.is_empty()),
        Signal::Tags => state
            .user_tag_counts_ref(user_id)
            .map_or(true, |t| t.is_empty()),
    };
    let mut list = RankedList::new(profile.algorithm_id, profile.version);
    if !cold_start {
        let neighborhood = top_n_neighbors(state, user_id, signal, profile.n as usize);
        let own = state.distinct_resources(user_id);
        let scored = score_neighborhood_items(state, &neighborhood, &own);
        list.entries = rank_top_k(state, scored, k, true);
    }
    Recommendation { list, cold_start }
}

fn contextual_recommendation(
    state: &StoreState,
    user_id: &str,
    context_resource: &str,
    k: u32,
    profile: &RecommendationProfile,
) -> Recommendation {
    let own = state.distinct_resources(user_id);
    let cold_start = own.is_empty();
    let mut list = RankedList::new(profile.algorithm_id, profile.version);
    if !cold_start {
        // Neighborhood restricted to users who interacted with the context
        // resource.
        let mut sims: Vec<(String, f64)> = Vec::new();
        if let Some(context_users) = state.users_of_resource(context_resource) {
            for v in context_users {
                if v == user_id {
                    continue;
                }
                if let Some(theirs) = state.distinct_resources_ref(v) {
                    let sim = interaction_cosine(&own, theirs);
                    if sim > 0.0 {
                        sims.push((v.clone(), sim));
                    }
                }
            }
        }
        sims.sort_by(|(ua, sa), (ub, sb)| {
            sb.partial_cmp(sa)
                .expect("similarities are finite")
                .then_with(|| ua.cmp(ub))
        });
        sims.truncate(profile.n as usize);
        let neighborhood = Neighborhood {
            members: sims
                .into_iter()
                .map(|(user_id, similarity)| Neighbor {
                    user_id,
                    similarity,
                })
                .collect(),
        };

        let mut excluded = own;
        excluded.insert(context_resource.to_owned());
        let scored = score_neighborhood_items(state, &neighborhood, &excluded);
        list.entries = rank_top_k(state, scored, k, true);
    }
    Recommendation { list, cold_start }
}

fn cbf_recommendation(
    state: &StoreState,
    user_id: &str,
    k: u32,
    profile: &RecommendationProfile,
    suppress_zero: bool,
) -> Recommendation {
    let own = state.distinct_resources(user_id);
    let vectors: Vec<TermVector> = own.iter().map(|r| state.resource_vector(r)).collect();
    let centroid = TermVector::centroid(vectors.iter());
    let cold_start = centroid.is_empty();
    let mut list = RankedList::new(profile.algorithm_id, profile.version);
    if !cold_start {
        let mut scorer = state.scorer(&centroid);
        let scored: Vec<(String, f64)> = if suppress_zero {
            // Only resources sharing a term with the centroid can score.
            overlap_candidates(state, &centroid, |id| !own.contains(id))
                .into_iter()
                .map(|id| {
                    let score = scorer.cosine(&id);
                    (id, score)
                })
                .collect()
        } else {
            state
                .resource_ids()
                .map(|id| id.to_owned())
                .collect::<Vec<_>>()
                .into_iter()
                .filter(|id| !own.contains(id))
                .map(|id| {
                    let score = scorer.cosine(&id);
                    (id, score)
                })
                .collect()
        };
        list.entries = rank_top_k(state, scored, k, suppress_zero);
    }
    Recommendation { list, cold_start }
}

fn goal_recommendation(
    state: &StoreState,
    user_id: &str,
    goal: &GoalSpec,
    k: u32,
    lambda: f64,
    profile: &RecommendationProfile,
) -> Recommendation {
    let base_size = k.saturating_mul(profile.headroom.max(1));
    // Base list: CF on the goal profile's signal, most-popular as fallback.
    let base = cf_recommendation(state, user_id, base_size, profile.signal, profile);
    let mut cold_start = base.cold_start;
    let mut base_entries = base.list.entries;
    if base_entries.is_empty() {
        base_entries = popular_list(state, base_size, profile).entries;
        if !base_entries.is_empty() {
            cold_start = false;
        }
    }

    let mut list = RankedList::new(profile.algorithm_id, profile.version);
    if !base_entries.is_empty() {
        let bounds = complexity_bounds(state);
        let base_scores: Vec<f64> = base_entries.iter().map(|e| e.score).collect();
        let features: Vec<f64> = base_entries
            .iter()
            .map(|e| goal_feature(state, goal, &e.resource_id, bounds))
            .collect();
        let blended = goal::blend_scores(&base_scores, &features, lambda);
        let scored: Vec<(String, f64)> = base_entries
            .into_iter()
            .map(|e| e.resource_id)
            .zip(blended)
            .collect();
        // No zero suppression after blending: the base entries already carry
        // evidence; a blended 0 only marks the weakest candidate.
        list.entries = rank_top_k(state, scored, k, false);
    }
    Recommendation { list, cold_start }
}

fn goal_feature(
    state: &StoreState,
    goal: &GoalSpec,
    resource_id: &str,
    complexity_bounds: Option<(f64, f64)>,
) -> f64 {
    match goal {
        GoalSpec::Harder => normalized_complexity(state, resource_id, complexity_bounds),
        GoalSpec::Easier => 1.0 - normalized_complexity(state, resource_id, complexity_bounds),
        GoalSpec::Topic(term) => {
            let category_hit = state
                .resource_meta(resource_id)
                .map(|meta| {
                    meta.categories
                        .iter()
                        .any(|c| c.to_lowercase() == term.to_lowercase())
                })
                .unwrap_or(false);
            if category_hit {
                1.0
            } else {
                state
                    .query_vector(term)
                    .cosine(&state.resource_vector(resource_id))
            }
        }
    }
}

/// Raw complexity of a description: mean words per sentence plus mean
/// alphanumeric characters per word. `None` when there are no words.
fn complexity_raw(description: &str) -> Option<f64> {
    let mut n_sentences = 0usize;
    let mut n_words = 0usize;
    let mut n_chars = 0usize;
    for sentence in description.split(['.', '!', '?']) {
        let words: Vec<&str> = sentence.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        n_sentences += 1;
        n_words += words.len();
        n_chars += words
            .iter()
            .map(|w| w.chars().filter(|c| c.is_alphanumeric()).count())
            .sum::<usize>();
    }
    if n_words == 0 {
        return None;
    }
    Some(n_words as f64 / n_sentences as f64 + n_chars as f64 / n_words as f64)
}

/// (min, max) of raw complexity over resources with description text.
fn complexity_bounds(state: &StoreState) -> Option<(f64, f64)> {
    let mut bounds: Option<(f64, f64)> = None;
    for id in state.resource_ids() {
        let Some(raw) = state
            .resource_meta(id)
            .and_then(|m| complexity_raw(&m.description))
        else {
            continue;
        };
        bounds = Some(match bounds {
            None => (raw, raw),
            Some((lo, hi)) => (lo.min(raw), hi.max(raw)),
        });
    }
    bounds
}

/// Min-max normalized complexity; 0 for empty descriptions, 1.0 for every
/// document when all raw values coincide.
fn normalized_complexity(
    state: &StoreState,
    resource_id: &str,
    bounds: Option<(f64, f64)>,
) -> f64 {
    let raw = state
        .resource_meta(resource_id)
        .and_then(|m| complexity_raw(&m.description));
    match (raw, bounds) {
        (Some(raw), Some((lo, hi))) if hi > lo => (raw - lo) / (hi - lo),
        (Some(_), Some(_)) => 1.0,
        _ => 0.0,
    }
}
