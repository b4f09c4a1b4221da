//! Snapshot persistence: a directory holding the three ingestion files plus a
//! manifest with counts. Reloading a snapshot reproduces identical dataset
//! statistics; interaction-only stub resources are reconstructed by replay and
//! are intentionally not written out as explicit resources.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ingest::{INTERACTIONS_HEADER, TAGS_HEADER};
use super::{Store, StoreConfig};
use crate::error::{Error, Result};

pub const INTERACTIONS_FILE: &str = "interactions.csv";
pub const RESOURCES_FILE: &str = "resources.jsonl";
pub const TAGS_FILE: &str = "tags.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub format_version: u32,
    pub n_interactions: u64,
    pub n_users: u64,
    pub n_resources: u64,
    pub n_tag_assignments: u64,
}

impl Store {
    /// Writes the store contents into `dir` (created if missing) and returns
    /// the manifest. Output is deterministic for a given store state.
    pub fn write_snapshot(&self, dir: &Path) -> Result<SnapshotManifest> {
        fs::create_dir_all(dir)?;
        let state = self.state.read();

        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(INTERACTIONS_HEADER)
            .map_err(|e| Error::Format(e.to_string()))?;
        for i in state.interactions() {
            writer
                .write_record([
                    i.user_id.as_str(),
                    i.resource_id.as_str(),
                    &i.timestamp_ms.to_string(),
                    i.kind.as_str(),
                ])
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Format(e.to_string()))?;
        fs::write(dir.join(INTERACTIONS_FILE), bytes)?;

        let mut jsonl = String::new();
        for id in state.resource_ids().map(str::to_owned).collect::<Vec<_>>() {
            if let Some(meta) = state.resource_meta(&id) {
                jsonl.push_str(&serde_json::to_string(meta).expect("resource serializes"));
                jsonl.push('\n');
            }
        }
        fs::write(dir.join(RESOURCES_FILE), jsonl)?;

        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(TAGS_HEADER)
            .map_err(|e| Error::Format(e.to_string()))?;
        for t in state.tag_log() {
            writer
                .write_record([
                    t.user_id.as_str(),
                    t.resource_id.as_str(),
                    t.tag.as_str(),
                    &t.timestamp_ms.to_string(),
                ])
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Format(e.to_string()))?;
        fs::write(dir.join(TAGS_FILE), bytes)?;

        let stats = state.compute_stats();
        let manifest = SnapshotManifest {
            format_version: 1,
            n_interactions: stats.n_interactions,
            n_users: stats.n_users,
            n_resources: stats.n_resources,
            n_tag_assignments: stats.n_tag_assignments,
        };
        fs::write(
            dir.join(MANIFEST_FILE),
            serde_json::to_vec_pretty(&manifest).expect("manifest serializes"),
        )?;
        Ok(manifest)
    }

    /// Loads a snapshot directory and verifies the manifest counts.
    pub fn load_snapshot(dir: &Path, config: StoreConfig) -> Result<(Store, SnapshotManifest)> {
        let manifest: SnapshotManifest =
            serde_json::from_slice(&fs::read(dir.join(MANIFEST_FILE))?)
                .map_err(|e| Error::Format(format!("invalid manifest: {e}")))?;
        if manifest.format_version != 1 {
            return Err(Error::Format(format!(
                "unsupported snapshot format version {}",
                manifest.format_version
            )));
        }

        let store = Store::new(config);
        let strict = |name: &str, report: super::IngestReport| -> Result<()> {
            if report.rejected > 0 {
                return Err(Error::Format(format!(
                    "snapshot file {name} has {} invalid records (first: line {}: {})",
                    report.rejected, report.errors[0].line, report.errors[0].message
                )));
            }
            Ok(())
        };
        strict(
            RESOURCES_FILE,
            store.ingest_resources_jsonl(&fs::read_to_string(dir.join(RESOURCES_FILE))?)?,
        )?;
        strict(
            INTERACTIONS_FILE,
            store.ingest_interactions_csv(&fs::read_to_string(dir.join(INTERACTIONS_FILE))?)?,
        )?;
        strict(
            TAGS_FILE,
            store.ingest_tags_csv(&fs::read_to_string(dir.join(TAGS_FILE))?)?,
        )?;

        let stats = store.compute_stats();
        let counts_match = stats.n_interactions == manifest.n_interactions
            && stats.n_users == manifest.n_users
            && stats.n_resources == manifest.n_resources
            && stats.n_tag_assignments == manifest.n_tag_assignments;
        if !counts_match {
            return Err(Error::Format(format!(
                "snapshot counts diverge from manifest: got ({}, {}, {}, {}), manifest ({}, {}, {}, {})",
                stats.n_interactions,
                stats.n_users,
                stats.n_resources,
                stats.n_tag_assignments,
                manifest.n_interactions,
                manifest.n_users,
                manifest.n_resources,
                manifest.n_tag_assignments,
            )));
        }
        Ok((store, manifest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{Interaction, Resource, TagAssignment};

    fn sample_store() -> Store {
        let store = Store::default();
        store
            .add_resource(Resource::new(
                "r1",
                "Mapa físico",
                "rios y montañas de españa",
                vec!["geografía".to_owned()],
            ))
            .unwrap();
        store.add_interaction(Interaction::click("u1", "r1", 10)).unwrap();
        store.add_interaction(Interaction::click("u1", "r2", 11)).unwrap();
        store.add_interaction(Interaction::click("u2", "r1", 12)).unwrap();
        store
            .add_tag_assignment(TagAssignment::new("u1", "r1", "Mapa", 13).unwrap())
            .unwrap();
        store
            .add_tag_assignment(TagAssignment::new("u1", "r1", "mapa", 14).unwrap())
            .unwrap();
        store
    }

    #[test]
    fn snapshot_roundtrip_reproduces_stats() {
        let dir = tempfile::tempdir().unwrap();
        let store = sample_store();
        let manifest = store.write_snapshot(dir.path()).unwrap();
        assert_eq!(manifest.n_interactions, 3);
        assert_eq!(manifest.n_resources, 2); // r2 is a stub
        assert_eq!(manifest.n_tag_assignments, 1);

        let (reloaded, m2) = Store::load_snapshot(dir.path(), StoreConfig::default()).unwrap();
        assert_eq!(m2, manifest);
        assert_eq!(reloaded.compute_stats(), store.compute_stats());
        // Stub stays a stub, tag counts preserved.
        assert!(reloaded.read().resource_meta("r2").is_none());
        assert_eq!(reloaded.user_tag_counts("u1").get("mapa"), Some(&2));
    }

    #[test]
    fn snapshot_write_is_deterministic() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        sample_store().write_snapshot(d1.path()).unwrap();
        sample_store().write_snapshot(d2.path()).unwrap();
        for f in [INTERACTIONS_FILE, RESOURCES_FILE, TAGS_FILE, MANIFEST_FILE] {
            assert_eq!(
                std::fs::read(d1.path().join(f)).unwrap(),
                std::fs::read(d2.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn manifest_mismatch_detected() {
        let dir = tempfile::tempdir().unwrap();
        let store = sample_store();
        let mut manifest = store.write_snapshot(dir.path()).unwrap();
        manifest.n_users += 1;
        std::fs::write(
            dir.path().join(MANIFEST_FILE),
            serde_json::to_vec(&manifest).unwrap(),
        )
        .unwrap();
        assert!(Store::load_snapshot(dir.path(), StoreConfig::default()).is_err());
    }
}
