//! Synthetic implicit-feedback dataset generation with latent topics.
//!
//! Each user and resource gets a latent topic. Users click own-topic resources
//! with probability `p_topic_click` (uniformly otherwise) and draw tags from
//! their topic's vocabulary with probability `q_topic_tag`. Per-user activity
//! is heavy-tailed (Pareto with shape `activity_tail`), so most users are
//! one-click users and interaction sparsity is tunable. Output is a pure
//! function of the configuration.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Pareto;

use crate::error::{Error, Result};
use crate::store::{Interaction, Resource, SnapshotManifest, Store, TagAssignment};

/// Fraction of clicks that also emit a tag assignment.
const TAG_RATE: f64 = 0.5;
/// Per-user click cap; keeps pathological Pareto draws bounded.
const MAX_CLICKS_PER_USER: u64 = 200;
/// Words per topic vocabulary (resource descriptions).
const TOPIC_WORDS: usize = 40;
/// Tags per topic vocabulary.
const TOPIC_TAGS: usize = 8;
/// Timestamp window of the generated log, in milliseconds.
const TIME_SPAN_MS: i64 = 90 * 24 * 3600 * 1000;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_users: u32,
    pub n_resources: u32,
    pub n_topics: u32,
    /// Probability that a click targets the user's own topic.
    pub p_topic_click: f64,
    /// Probability that a tag comes from the user's own topic vocabulary.
    pub q_topic_tag: f64,
    /// Pareto shape of the per-user activity distribution; smaller is heavier.
    pub activity_tail: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 2000,
            n_resources: 300,
            n_topics: 10,
            p_topic_click: 0.6,
            q_topic_tag: 0.95,
            activity_tail: 1.1,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_resources == 0 || self.n_topics == 0 {
            return Err(Error::validation(
                "n_users, n_resources and n_topics must be >= 1",
            ));
        }
        if self.n_topics > self.n_resources {
            return Err(Error::validation(
                "need at least one resource per topic",
            ));
        }
        for (name, p) in [
            ("p_topic_click", self.p_topic_click),
            ("q_topic_tag", self.q_topic_tag),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        if self.q_topic_tag < self.p_topic_click {
            return Err(Error::validation(
                "q_topic_tag must be >= p_topic_click (tags carry the stronger topical signal)",
            ));
        }
        if !(self.activity_tail > 0.0) {
            return Err(Error::validation("activity_tail must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct SyntheticDataset {
    pub interactions: Vec<Interaction>,
    pub resources: Vec<Resource>,
    pub tags: Vec<TagAssignment>,
}

impl SyntheticDataset {
    /// Loads the dataset into a fresh store.
    pub fn into_store(self) -> Store {
        let store = Store::default();
        for r in self.resources {
            store.add_resource(r).expect("generated resources are valid");
        }
        for i in self.interactions {
            store
                .add_interaction(i)
                .expect("generated interactions are valid");
        }
        for t in self.tags {
            store
                .add_tag_assignment(t)
                .expect("generated tags are valid");
        }
        store
    }
}

fn topic_word(topic: u32, word: usize) -> String {
    format!("tema{topic:02}palabra{word:02}")
}

fn topic_tag(topic: u32, tag: usize) -> String {
    format!("tag-t{topic:02}-{tag}")
}

/// Generates a dataset; identical configuration yields identical output.
pub fn generate_synthetic(config: &SynthConfig) -> Result<SyntheticDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_topics = config.n_topics;

    // Resources: round-robin topics keep them balanced.
    let mut resources = Vec::with_capacity(config.n_resources as usize);
    let mut resource_topics = Vec::with_capacity(config.n_resources as usize);
    for idx in 0..config.n_resources {
        let topic = idx % n_topics;
        resource_topics.push(topic);
        let n_words = rng.gen_range(6..=14);
        let mut description = String::new();
        for w in 0..n_words {
            if w > 0 {
                description.push(if w % 5 == 0 { '.' } else { ' ' });
                if w % 5 == 0 {
                    description.push(' ');
                }
            }
            description.push_str(&topic_word(topic, rng.gen_range(0..TOPIC_WORDS)));
        }
        resources.push(Resource::new(
            format!("r{idx:05}"),
            format!("Recurso {idx}"),
            description,
            vec![format!("topic-{topic:02}")],
        ));
    }
    let by_topic: Vec<Vec<usize>> = (0..n_topics)
        .map(|t| {
            resource_topics
                .iter()
                .enumerate()
                .filter(|(_, rt)| **rt == t)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let pareto =
        Pareto::new(1.0, config.activity_tail).map_err(|e| Error::validation(e.to_string()))?;

    let mut interactions = Vec::new();
    let mut tags = Vec::new();
    for user_idx in 0..config.n_users {
        let user_id = format!("u{user_idx:05}");
        let user_topic = rng.gen_range(0..n_topics);
        let n_clicks = (pareto.sample(&mut rng) as u64).clamp(1, MAX_CLICKS_PER_USER);

        for _ in 0..n_clicks {
            let resource_idx = if rng.gen_bool(config.p_topic_click) {
                let own = &by_topic[user_topic as usize];
                own[rng.gen_range(0..own.len())]
            } else {
                rng.gen_range(0..config.n_resources as usize)
            };
            let ts = rng.gen_range(0..TIME_SPAN_MS);
            interactions.push(Interaction::click(
                user_id.clone(),
                resources[resource_idx].resource_id.clone(),
                ts,
            ));

            if rng.gen_bool(TAG_RATE) {
                let tag_topic = if rng.gen_bool(config.q_topic_tag) {
                    user_topic
                } else {
                    rng.gen_range(0..n_topics)
                };
                let tag = topic_tag(tag_topic, rng.gen_range(0..TOPIC_TAGS));
                tags.push(
                    TagAssignment::new(
                        user_id.clone(),
                        resources[resource_idx].resource_id.clone(),
                        &tag,
                        ts + 1,
                    )
                    .expect("generated tags are valid"),
                );
            }
        }
    }

    Ok(SyntheticDataset {
        interactions,
        resources,
        tags,
    })
}

/// Generates a dataset and writes it as a snapshot directory (the three
/// ingestion files plus the count manifest).
pub fn generate_to_dir(config: &SynthConfig, dir: &Path) -> Result<SnapshotManifest> {
    let dataset = generate_synthetic(config)?;
    dataset.into_store().write_snapshot(dir)
}
