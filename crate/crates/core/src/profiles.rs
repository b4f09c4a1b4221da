//! Named, versioned parameter bundles controlling the recommendation
//! algorithms, hot-swappable at runtime.
//!
//! Updates are serialized and atomic; a request started after `set_profile`
//! returns observes the new profile. Reads hand out the current snapshot
//! without blocking behind writers beyond an `Arc` clone.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven supported recommendation use cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AlgorithmId {
    /// UC1: non-personalized most-popular baseline (MP).
    #[serde(rename = "uc1")]
    Popular,
    /// UC2: user-based CF over interaction histories (CF_i).
    #[serde(rename = "uc2")]
    CfInteractions,
    /// UC3: user-based CF over shared social tags (CF_t).
    #[serde(rename = "uc3")]
    CfTags,
    /// UC4: content-based filtering against the user's text profile (CBF).
    #[serde(rename = "uc4")]
    Cbf,
    /// UC5: alternative resources for one resource (item-to-item CBF).
    #[serde(rename = "uc5")]
    SimilarResources,
    /// UC6: CF restricted to users who share a context resource.
    #[serde(rename = "uc6")]
    Contextual,
    /// UC7: goal-driven re-ranking with feature boosting.
    #[serde(rename = "uc7")]
    Goal,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 7] = [
        AlgorithmId::Popular,
        AlgorithmId::CfInteractions,
        AlgorithmId::CfTags,
        AlgorithmId::Cbf,
        AlgorithmId::SimilarResources,
        AlgorithmId::Contextual,
        AlgorithmId::Goal,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmId::Popular => "uc1",
            AlgorithmId::CfInteractions => "uc2",
            AlgorithmId::CfTags => "uc3",
            AlgorithmId::Cbf => "uc4",
            AlgorithmId::SimilarResources => "uc5",
            AlgorithmId::Contextual => "uc6",
            AlgorithmId::Goal => "uc7",
        }
    }

    /// Table-style row label.
    pub fn label(&self) -> &'static str {
        match self {
            AlgorithmId::Popular => "UC1:MP",
            AlgorithmId::CfInteractions => "UC2:CF_i",
            AlgorithmId::CfTags => "UC3:CF_t",
            AlgorithmId::Cbf => "UC4:CBF",
            AlgorithmId::SimilarResources => "UC5:SIM",
            AlgorithmId::Contextual => "UC6:CTX",
            AlgorithmId::Goal => "UC7:GOAL",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "uc1" | "mp" | "popular" => Ok(AlgorithmId::Popular),
            "uc2" | "cf_i" | "cf-interactions" => Ok(AlgorithmId::CfInteractions),
            "uc3" | "cf_t" | "cf-tags" => Ok(AlgorithmId::CfTags),
            "uc4" | "cbf" => Ok(AlgorithmId::Cbf),
            "uc5" | "similar" => Ok(AlgorithmId::SimilarResources),
            "uc6" | "contextual" => Ok(AlgorithmId::Contextual),
            "uc7" | "goal" => Ok(AlgorithmId::Goal),
            other => Err(Error::validation(format!("unknown algorithm id `{other}`"))),
        }
    }
}

/// Which signal drives user-user similarity in CF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    #[default]
    Interactions,
    Tags,
}

impl FromStr for Signal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "interactions" => Ok(Signal::Interactions),
            "tags" => Ok(Signal::Tags),
            other => Err(Error::validation(format!("unknown signal `{other}`"))),
        }
    }
}

fn default_headroom() -> u32 {
    RecommendationProfile::DEFAULT_HEADROOM
}

/// A named, versioned algorithm parameterization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationProfile {
    pub profile_id: String,
    pub algorithm_id: AlgorithmId,
    /// Neighborhood size for CF-style algorithms.
    pub n: u32,
    /// List length used when a request does not specify k.
    pub k_default: u32,
    /// Goal-boost blend weight in [0, 1].
    pub lambda: f64,
    pub signal: Signal,
    /// Base-list oversampling factor for goal re-ranking.
    #[serde(default = "default_headroom")]
    pub headroom: u32,
    /// Assigned by the registry; strictly increases across successful updates.
    #[serde(default)]
    pub version: u64,
}

impl RecommendationProfile {
    pub const DEFAULT_NEIGHBORHOOD: u32 = 20;
    pub const DEFAULT_K: u32 = 20;
    pub const DEFAULT_LAMBDA: f64 = 0.5;
    pub const DEFAULT_HEADROOM: u32 = 5;

    pub fn new(profile_id: impl Into<String>, algorithm_id: AlgorithmId) -> Self {
        RecommendationProfile {
            profile_id: profile_id.into(),
            algorithm_id,
            n: Self::DEFAULT_NEIGHBORHOOD,
            k_default: Self::DEFAULT_K,
            lambda: Self::DEFAULT_LAMBDA,
            signal: Signal::Interactions,
            headroom: Self::DEFAULT_HEADROOM,
            version: 0,
        }
    }

    pub fn with_signal(mut self, signal: Signal) -> Self {
        self.signal = signal;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.profile_id.trim().is_empty() {
            return Err(Error::validation("profile_id must be non-empty"));
        }
        if self.n < 1 {
            return Err(Error::validation("neighborhood size n must be >= 1"));
        }
        if self.k_default < 1 {
            return Err(Error::validation("k_default must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::validation(format!(
                "lambda must be in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.headroom < 1 {
            return Err(Error::validation("headroom must be >= 1"));
        }
        Ok(())
    }
}

/// Profile ids the registry seeds at startup, one per served use case.
pub mod builtin {
    pub const POPULAR: &str = "uc1-popular";
    pub const CF_DEFAULT: &str = "cf-default";
    pub const CF_TAGS: &str = "cf-tags";
    pub const CBF_DEFAULT: &str = "cbf-default";
    pub const SIMILAR_DEFAULT: &str = "similar-default";
    pub const CONTEXTUAL_DEFAULT: &str = "contextual-default";
    pub const GOAL_DEFAULT: &str = "goal-default";
}

type ProfileTable = BTreeMap<String, Arc<RecommendationProfile>>;

/// Versioned registry of recommendation profiles.
///
/// Writes take the lock exclusively: validation, version assignment and the
/// table swap happen as one atomic step, so observed versions are strictly
/// monotone and a rejected update leaves the table untouched.
pub struct ProfileRegistry {
    table: RwLock<Arc<ProfileTable>>,
    next_version: parking_lot::Mutex<u64>,
}

impl Default for ProfileRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl ProfileRegistry {
    pub fn empty() -> Self {
        ProfileRegistry {
            table: RwLock::new(Arc::new(BTreeMap::new())),
            next_version: parking_lot::Mutex::new(1),
        }
    }

    /// Registry seeded with one default profile per use case.
    pub fn with_builtins() -> Self {
        let registry = Self::empty();
        let seeds = [
            RecommendationProfile::new(builtin::POPULAR, AlgorithmId::Popular),
            RecommendationProfile::new(builtin::CF_DEFAULT, AlgorithmId::CfInteractions),
            RecommendationProfile::new(builtin::CF_TAGS, AlgorithmId::CfTags)
                .with_signal(Signal::Tags),
            RecommendationProfile::new(builtin::CBF_DEFAULT, AlgorithmId::Cbf),
            RecommendationProfile::new(builtin::SIMILAR_DEFAULT, AlgorithmId::SimilarResources),
            RecommendationProfile::new(builtin::CONTEXTUAL_DEFAULT, AlgorithmId::Contextual),
            RecommendationProfile::new(builtin::GOAL_DEFAULT, AlgorithmId::Goal),
        ];
        for profile in seeds {
            registry
                .set_profile(profile)
                .expect("builtin profiles are valid");
        }
        registry
    }

    /// Most recently assigned version; 0 before any update.
    pub fn current_version(&self) -> u64 {
        *self.next_version.lock() - 1
    }

    /// Current snapshot of one profile.
    pub fn get_profile(&self, profile_id: &str) -> Result<Arc<RecommendationProfile>> {
        self.table
            .read()
            .get(profile_id)
            .cloned()
            .ok_or_else(|| Error::not_found("profile", profile_id))
    }

    /// All profiles in id order.
    pub fn list(&self) -> Vec<Arc<RecommendationProfile>> {
        self.table.read().values().cloned().collect()
    }

    /// Validates and atomically installs `profile`, returning its new version.
    /// The caller-supplied `version` field is ignored.
    pub fn set_profile(&self, mut profile: RecommendationProfile) -> Result<u64> {
        profile.validate()?;
        let mut next = self.next_version.lock();
        let version = *next;
        profile.version = version;

        let mut table = self.table.write();
        let mut updated = ProfileTable::clone(&table);
        updated.insert(profile.profile_id.clone(), Arc::new(profile));
        *table = Arc::new(updated);
        *next += 1;
        Ok(version)
    }

    /// Loads profiles from a JSON array, installing each in order.
    pub fn apply_json(&self, json: &str) -> Result<usize> {
        let profiles: Vec<RecommendationProfile> = serde_json::from_str(json)
            .map_err(|e| Error::Format(format!("invalid profiles JSON: {e}")))?;
        let count = profiles.len();
        for profile in profiles {
            self.set_profile(profile)?;
        }
        Ok(count)
    }

    pub fn to_json(&self) -> String {
        let snapshot = self.list();
        let profiles: Vec<&RecommendationProfile> = snapshot.iter().map(Arc::as_ref).collect();
        serde_json::to_string_pretty(&profiles).expect("profiles serialize")
    }
}
