//! Wire types of the REST surface.

use serde::{Deserialize, Serialize};

use learnrec_core::engine::{RankedEntry, Recommendation};
use learnrec_core::profiles::{AlgorithmId, Signal};
use learnrec_core::evaluator::EvaluationReport;

/// Body of every successful recommendation response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecommendationResponse {
    pub items: Vec<RankedEntry>,
    pub algorithm_id: AlgorithmId,
    pub profile_version: u64,
    pub cold_start: bool,
    pub elapsed_ms: f64,
}

impl RecommendationResponse {
    pub fn from_engine(rec: Recommendation, elapsed_ms: f64) -> Self {
        RecommendationResponse {
            algorithm_id: rec.list.algorithm_id,
            profile_version: rec.list.profile_version,
            items: rec.list.entries,
            cold_start: rec.cold_start,
            elapsed_ms,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

/// PUT /admin/profiles/{id} payload; the path segment names the profile.
#[derive(Debug, Clone, Deserialize)]
pub struct ProfilePut {
    pub algorithm_id: AlgorithmId,
    pub n: u32,
    pub k_default: u32,
    pub lambda: f64,
    pub signal: Signal,
    #[serde(default)]
    pub headroom: Option<u32>,
}

/// POST /eval/run payload. Without `dataset` the current store contents are
/// evaluated; with it, the referenced snapshot files are loaded server-side.
#[derive(Debug, Clone, Deserialize)]
pub struct EvalRunRequest {
    pub algorithms: Vec<String>,
    #[serde(default = "default_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub dataset: Option<DatasetRefs>,
}

fn default_fraction() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize)]
pub struct DatasetRefs {
    pub interactions: String,
    #[serde(default)]
    pub resources: Option<String>,
    #[serde(default)]
    pub tags: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRunAccepted {
    pub run_id: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRunStatus {
    pub run_id: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<EvaluationReport>,
    /// CSV rendering of the report, byte-identical to the CLI output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HealthBody {
    pub status: &'static str,
    pub store_version: u64,
    pub refresh_bound_ms: u64,
}
