//! Core of a learning-resource recommender for social learning platforms:
//! an embedded index store, a multi-strategy recommendation engine, a
//! hot-swappable profile registry and an offline evaluation harness.

pub mod engine;
pub mod error;
pub mod evaluator;
pub mod profiles;
pub mod store;

pub use engine::{Engine, GoalSpec, Neighborhood, RankedEntry, RankedList, Recommendation};
pub use error::{Error, Result};
pub use evaluator::{EvalConfig, EvaluationReport, MetricKs, SynthConfig};
pub use profiles::{AlgorithmId, ProfileRegistry, RecommendationProfile, Signal};
pub use store::{
    DatasetStats, IngestReport, Interaction, Resource, Store, StoreConfig, TagAssignment,
};
