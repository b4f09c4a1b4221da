//! Engine output checked against naive reference implementations built only
//! on the store's public read API: an O(U^2 * R) CF reference, pairwise-cosine
//! rankings and a hand-coded TF-IDF oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;

use learnrec_core::engine::{Engine, GoalSpec};
use learnrec_core::profiles::{builtin, ProfileRegistry, RecommendationProfile, Signal};
use learnrec_core::store::{Interaction, Resource, Store, TagAssignment};

const TAG_NAMES: [&str; 5] = ["alfa", "beta", "gamma", "delta", "eps"];

// ---------------------------------------------------------------------------
// Naive reference implementations
// ---------------------------------------------------------------------------

fn naive_interaction_sim(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let shared = a.intersection(b).count();
    shared as f64 / ((a.len() as f64) * (b.len() as f64)).sqrt()
}

fn naive_tag_sim(a: &BTreeMap<String, u64>, b: &BTreeMap<String, u64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut dot = 0.0;
    for (tag, ca) in a {
        if let Some(cb) = b.get(tag) {
            dot += (*ca as f64) * (*cb as f64);
        }
    }
    if dot == 0.0 {
        return 0.0;
    }
    let norm = |m: &BTreeMap<String, u64>| {
        m.values()
            .map(|c| (*c as f64) * (*c as f64))
            .sum::<f64>()
            .sqrt()
    };
    dot / (norm(a) * norm(b))
}

fn naive_neighbors(store: &Store, user: &str, signal: Signal, n: usize) -> Vec<(String, f64)> {
    let mut sims = Vec::new();
    for v in store.user_ids() {
        if v == user {
            continue;
        }
        let sim = match signal {
            Signal::Interactions => naive_interaction_sim(
                &store.distinct_resources(user),
                &store.distinct_resources(&v),
            ),
            Signal::Tags => {
                naive_tag_sim(&store.user_tag_counts(user), &store.user_tag_counts(&v))
            }
        };
        if sim > 0.0 {
            sims.push((v, sim));
        }
    }
    sims.sort_by(|(ua, sa), (ub, sb)| sb.partial_cmp(sa).unwrap().then_with(|| ua.cmp(ub)));
    sims.truncate(n);
    sims
}

fn naive_rank(
    store: &Store,
    mut scored: Vec<(String, f64)>,
    k: usize,
) -> Vec<(String, f64)> {
    scored.retain(|(_, s)| *s > 0.0);
    scored.sort_by(|(ida, sa), (idb, sb)| {
        sb.partial_cmp(sa)
            .unwrap()
            .then_with(|| store.popularity(idb).cmp(&store.popularity(ida)))
            .then_with(|| ida.cmp(idb))
    });
    scored.truncate(k);
    scored
}

/// Full O(U^2 * R) user-based CF reference.
fn naive_cf(store: &Store, user: &str, k: usize, signal: Signal, n: usize) -> Vec<(String, f64)> {
    let neighbors = naive_neighbors(store, user, signal, n);
    let own = store.distinct_resources(user);
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for (v, sim) in &neighbors {
        for item in store.distinct_resources(v) {
            if !own.contains(&item) {
                *scores.entry(item).or_insert(0.0) += sim;
            }
        }
    }
    naive_rank(store, scores.into_iter().collect(), k)
}

/// Context-restricted CF reference.
fn naive_contextual(
    store: &Store,
    user: &str,
    context: &str,
    k: usize,
    n: usize,
) -> Vec<(String, f64)> {
    let own = store.distinct_resources(user);
    let mut sims = Vec::new();
    for v in store.user_ids() {
        if v == user {
            continue;
        }
        let theirs = store.distinct_resources(&v);
        if !theirs.contains(context) {
            continue;
        }
        let sim = naive_interaction_sim(&own, &theirs);
        if sim > 0.0 {
            sims.push((v, sim));
        }
    }
    sims.sort_by(|(ua, sa), (ub, sb)| sb.partial_cmp(sa).unwrap().then_with(|| ua.cmp(ub)));
    sims.truncate(n);

    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for (v, sim) in &sims {
        for item in store.distinct_resources(v) {
            if item != context && !own.contains(&item) {
                *scores.entry(item).or_insert(0.0) += sim;
            }
        }
    }
    naive_rank(store, scores.into_iter().collect(), k)
}

// ---------------------------------------------------------------------------
// Random store construction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct RawData {
    clicks: Vec<(u8, u8, i64)>,
    tags: Vec<(u8, u8, u8, i64)>,
    texts: Vec<(u8, String)>,
}

fn raw_data() -> impl Strategy<Value = RawData> {
    let click = (0u8..10, 0u8..12, 0i64..500);
    let tag = (0u8..10, 0u8..12, 0u8..5, 0i64..500);
    let text = (0u8..12, "[a-f]{2,6}( [a-f]{2,6}){0,5}");
    (
        prop::collection::vec(click, 0..60),
        prop::collection::vec(tag, 0..30),
        prop::collection::vec(text, 0..6),
    )
        .prop_map(|(clicks, tags, texts)| RawData {
            clicks,
            tags,
            texts,
        })
}

fn build_store(raw: &RawData) -> Store {
    let store = Store::default();
    for (r, text) in &raw.texts {
        store
            .add_resource(Resource::new(format!("r{r:02}"), "", text.clone(), []))
            .unwrap();
    }
    for (u, r, ts) in &raw.clicks {
        store
            .add_interaction(Interaction::click(
                format!("u{u:02}"),
                format!("r{r:02}"),
                *ts,
            ))
            .unwrap();
    }
    for (u, r, t, ts) in &raw.tags {
        store
            .add_tag_assignment(
                TagAssignment::new(
                    format!("u{u:02}"),
                    format!("r{r:02}"),
                    TAG_NAMES[*t as usize],
                    *ts,
                )
                .unwrap(),
            )
            .unwrap();
    }
    store
}

fn engine_with_n(store: Arc<Store>, n: u32) -> Engine {
    let profiles = ProfileRegistry::with_builtins();
    for id in [builtin::CF_DEFAULT, builtin::CF_TAGS, builtin::CONTEXTUAL_DEFAULT] {
        let mut p = RecommendationProfile::clone(&profiles.get_profile(id).unwrap());
        p.n = n;
        profiles.set_profile(p).unwrap();
    }
    Engine::new(store, Arc::new(profiles))
}

fn assert_lists_match(
    label: &str,
    got: &[learnrec_core::RankedEntry],
    want: &[(String, f64)],
) {
    let got_ids: Vec<&str> = got.iter().map(|e| e.resource_id.as_str()).collect();
    let want_ids: Vec<&str> = want.iter().map(|(id, _)| id.as_str()).collect();
    assert_eq!(got_ids, want_ids, "{label}: order diverged");
    for (entry, (_, score)) in got.iter().zip(want) {
        assert!(
            (entry.score - score).abs() <= 1e-9,
            "{label}: score {} vs reference {score}",
            entry.score
        );
    }
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cf_matches_naive_reference(raw in raw_data(), user in 0u8..10, k in 1usize..15, n in 1u32..12) {
        let store = Arc::new(build_store(&raw));
        let engine = engine_with_n(Arc::clone(&store), n);
        let user = format!("u{user:02}");

        for signal in [Signal::Interactions, Signal::Tags] {
            let got = engine.recommend_cf(&user, Some(k as u32), Some(signal)).unwrap();
            let want = naive_cf(&store, &user, k, signal, n as usize);
            assert_lists_match("cf", &got.list.entries, &want);
            got.list.check_invariants(k as u32).unwrap();

            // Never recommend the user's own history.
            let own = store.distinct_resources(&user);
            for entry in &got.list.entries {
                prop_assert!(!own.contains(&entry.resource_id));
            }
        }
    }

    #[test]
    fn contextual_matches_naive_reference(raw in raw_data(), user in 0u8..10, context in 0u8..12, k in 1usize..15, n in 1u32..12) {
        let store = Arc::new(build_store(&raw));
        let context = format!("r{context:02}");
        if !store.has_resource(&context) {
            return Ok(());
        }
        let engine = engine_with_n(Arc::clone(&store), n);
        let user = format!("u{user:02}");

        let got = engine.recommend_contextual(&user, &context, Some(k as u32)).unwrap();
        let want = naive_contextual(&store, &user, &context, k, n as usize);
        assert_lists_match("contextual", &got.list.entries, &want);

        let own = store.distinct_resources(&user);
        for entry in &got.list.entries {
            prop_assert!(entry.resource_id != context);
            prop_assert!(!own.contains(&entry.resource_id));
        }
    }

    #[test]
    fn ranked_lists_satisfy_invariants_everywhere(raw in raw_data(), user in 0u8..10, k in 1u32..10) {
        let store = Arc::new(build_store(&raw));
        let engine = engine_with_n(Arc::clone(&store), 20);
        let user = format!("u{user:02}");

        let recs = vec![
            engine.recommend_popular(Some(k)).unwrap(),
            engine.recommend_cf(&user, Some(k), Some(Signal::Interactions)).unwrap(),
            engine.recommend_cf(&user, Some(k), Some(Signal::Tags)).unwrap(),
            engine.recommend_cbf(&user, Some(k)).unwrap(),
            engine.recommend_goal(&user, &GoalSpec::Harder, Some(k), None).unwrap(),
        ];
        for rec in &recs {
            rec.list.check_invariants(k).unwrap();
            if rec.cold_start {
                prop_assert!(rec.list.entries.is_empty());
            }
        }

        // Determinism: a second run is identical.
        let again = engine.recommend_cf(&user, Some(k), Some(Signal::Interactions)).unwrap();
        prop_assert_eq!(&again, &recs[1]);
    }

    #[test]
    fn neighborhood_grows_monotonically(raw in raw_data(), user in 0u8..10, n in 1u32..8) {
        let store = Arc::new(build_store(&raw));
        let engine = engine_with_n(Arc::clone(&store), 20);
        let user = format!("u{user:02}");

        for signal in [Signal::Interactions, Signal::Tags] {
            let small = engine.neighborhood_with_n(&user, signal, n);
            let large = engine.neighborhood_with_n(&user, signal, n + 4);
            prop_assert!(large.len() >= small.len());
            // Enlarging n never removes a neighbor.
            prop_assert_eq!(&large.members[..small.len()], &small.members[..]);

            // n past the user count equals the unbounded reference.
            let unbounded = engine.neighborhood_with_n(&user, signal, 100);
            let want = match signal {
                Signal::Interactions => naive_neighbors(&store, &user, Signal::Interactions, 100),
                Signal::Tags => naive_neighbors(&store, &user, Signal::Tags, 100),
            };
            let got: Vec<(String, f64)> = unbounded
                .members
                .iter()
                .map(|m| (m.user_id.clone(), m.similarity))
                .collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn goal_lambda_zero_matches_base(raw in raw_data(), user in 0u8..10, k in 1u32..10) {
        let store = Arc::new(build_store(&raw));
        let engine = engine_with_n(Arc::clone(&store), 20);
        let user = format!("u{user:02}");

        let goal = engine.recommend_goal(&user, &GoalSpec::Harder, Some(k), Some(0.0)).unwrap();
        let cf = engine.recommend_cf(&user, Some(k), Some(Signal::Interactions)).unwrap();
        let base = if cf.list.entries.is_empty() {
            engine.recommend_popular(Some(k)).unwrap()
        } else {
            cf
        };
        let base_ids: Vec<&str> = base.list.entries.iter().map(|e| e.resource_id.as_str()).collect();
        let goal_ids: Vec<&str> = goal.list.entries.iter().map(|e| e.resource_id.as_str()).collect();
        prop_assert_eq!(goal_ids, base_ids);
    }
}

// ---------------------------------------------------------------------------
// Hand-coded TF-IDF / cosine oracle
// ---------------------------------------------------------------------------

fn oracle_tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_owned)
        .collect()
}

fn oracle_vectors(corpus: &[(&str, &str)]) -> BTreeMap<String, BTreeMap<String, f64>> {
    let n = corpus.len() as f64;
    let mut df: BTreeMap<String, f64> = BTreeMap::new();
    for (_, text) in corpus {
        for term in oracle_tokens(text).into_iter().collect::<BTreeSet<_>>() {
            *df.entry(term).or_insert(0.0) += 1.0;
        }
    }
    corpus
        .iter()
        .map(|(id, text)| {
            let mut tf: BTreeMap<String, f64> = BTreeMap::new();
            for term in oracle_tokens(text) {
                *tf.entry(term).or_insert(0.0) += 1.0;
            }
            let vector: BTreeMap<String, f64> = tf
                .into_iter()
                .map(|(term, count)| {
                    let idf = ((1.0 + n) / (1.0 + df[&term])).ln() + 1.0;
                    (term, count * idf)
                })
                .collect();
            ((*id).to_owned(), vector)
        })
        .collect()
}

fn oracle_cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a
        .iter()
        .filter_map(|(t, w)| b.get(t).map(|v| w * v))
        .sum();
    let norm = |m: &BTreeMap<String, f64>| m.values().map(|w| w * w).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

const TOY_CORPUS: [(&str, &str); 3] = [
    ("d1", "el rio atraviesa la cordillera y el valle"),
    ("d2", "mapa del valle y mapa de la cordillera"),
    ("d3", "la fotosintesis transforma la luz en energia"),
];

fn toy_store() -> Store {
    let store = Store::default();
    for (id, text) in TOY_CORPUS {
        store
            .add_resource(Resource::new(id, "", text, []))
            .unwrap();
    }
    store
}

#[test]
fn text_similarity_matches_tfidf_oracle() {
    let store = toy_store();
    let vectors = oracle_vectors(&TOY_CORPUS);
    for (a, _) in TOY_CORPUS {
        for (b, _) in TOY_CORPUS {
            let want = oracle_cosine(&vectors[a], &vectors[b]);
            let got = store.text_similarity(a, b).unwrap();
            assert!(
                (got - want).abs() <= 1e-9,
                "similarity({a},{b}) = {got}, oracle {want}"
            );
        }
    }
}

#[test]
fn text_similarity_symmetric_bounded_property() {
    let store = toy_store();
    for (a, _) in TOY_CORPUS {
        for (b, _) in TOY_CORPUS {
            let ab = store.text_similarity(a, b).unwrap();
            let ba = store.text_similarity(b, a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&ab));
        }
        assert!((store.text_similarity(a, a).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn cbf_matches_centroid_cosine_oracle() {
    // Two-topic history: the centroid mixes geography and biology.
    let store = Store::default();
    let corpus: [(&str, &str); 5] = [
        ("d1", "el rio atraviesa la cordillera y el valle"),
        ("d2", "mapa del valle y mapa de la cordillera"),
        ("d3", "la fotosintesis transforma la luz en energia"),
        ("d4", "la celula usa la energia de la fotosintesis"),
        ("d5", "el imperio romano construyo calzadas"),
    ];
    for (id, text) in corpus {
        store.add_resource(Resource::new(id, "", text, [])).unwrap();
    }
    store.add_interaction(Interaction::click("u", "d1", 1)).unwrap();
    store.add_interaction(Interaction::click("u", "d3", 2)).unwrap();

    let vectors = oracle_vectors(&corpus);
    // Oracle centroid over the clicked documents.
    let mut centroid: BTreeMap<String, f64> = BTreeMap::new();
    for doc in ["d1", "d3"] {
        for (term, w) in &vectors[doc] {
            *centroid.entry(term.clone()).or_insert(0.0) += w;
        }
    }
    for w in centroid.values_mut() {
        *w /= 2.0;
    }
    let mut want: Vec<(String, f64)> = ["d2", "d4", "d5"]
        .iter()
        .map(|id| ((*id).to_owned(), oracle_cosine(&centroid, &vectors[*id])))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    want.sort_by(|(ida, sa), (idb, sb)| sb.partial_cmp(sa).unwrap().then_with(|| ida.cmp(idb)));

    let profiles = Arc::new(ProfileRegistry::with_builtins());
    let engine = Engine::new(Arc::new(store), profiles);
    let got = engine.recommend_cbf("u", Some(5)).unwrap();
    assert_lists_match("cbf", &got.list.entries, &want);
}

#[test]
fn similar_resources_matches_pairwise_oracle() {
    let corpus: [(&str, &str); 5] = [
        ("d1", "rio cordillera valle mapa"),
        ("d2", "mapa valle cordillera"),
        ("d3", "rio energia luz"),
        ("d4", "fotosintesis luz energia celula"),
        ("d5", "imperio romano"),
    ];
    let store = Store::default();
    for (id, text) in corpus {
        store.add_resource(Resource::new(id, "", text, [])).unwrap();
    }
    let vectors = oracle_vectors(&corpus);
    let mut want: Vec<(String, f64)> = ["d2", "d3", "d4", "d5"]
        .iter()
        .map(|id| ((*id).to_owned(), oracle_cosine(&vectors["d1"], &vectors[*id])))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    want.sort_by(|(ida, sa), (idb, sb)| sb.partial_cmp(sa).unwrap().then_with(|| ida.cmp(idb)));

    let engine = Engine::new(
        Arc::new(store),
        Arc::new(ProfileRegistry::with_builtins()),
    );
    let got = engine.similar_resources("d1", Some(5)).unwrap();
    assert_lists_match("similar", &got.list.entries, &want);
}
