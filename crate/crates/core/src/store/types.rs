use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A timestamped user action on a learning resource; the unit of implicit feedback.
///
/// `kind` is an open vocabulary. Only `click` is in active use, but ingestion
/// accepts any non-empty lowercase token so historical datasets with richer
/// event types replay without loss. All kinds count as feedback events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub user_id: String,
    pub resource_id: String,
    pub timestamp_ms: i64,
    pub kind: InteractionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InteractionKind(String);

impl InteractionKind {
    pub fn click() -> Self {
        InteractionKind("click".to_owned())
    }

    /// Parses a kind token: trimmed, lowercased, non-empty.
    pub fn parse(raw: &str) -> Result<Self> {
        let kind = raw.trim().to_lowercase();
        if kind.is_empty() {
            return Err(Error::validation("interaction kind must be non-empty"));
        }
        Ok(InteractionKind(kind))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for InteractionKind {
    fn default() -> Self {
        InteractionKind::click()
    }
}

impl Interaction {
    pub fn click(user_id: impl Into<String>, resource_id: impl Into<String>, ts: i64) -> Self {
        Interaction {
            user_id: user_id.into(),
            resource_id: resource_id.into(),
            timestamp_ms: ts,
            kind: InteractionKind::click(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.user_id.trim().is_empty() {
            return Err(Error::validation("interaction user_id must be non-empty"));
        }
        if self.resource_id.trim().is_empty() {
            return Err(Error::validation(
                "interaction resource_id must be non-empty",
            ));
        }
        if self.timestamp_ms < 0 {
            return Err(Error::validation(format!(
                "interaction timestamp must be >= 0, got {}",
                self.timestamp_ms
            )));
        }
        Ok(())
    }
}

/// A learning resource with the textual metadata that feeds the term index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub resource_id: String,
    pub title: String,
    pub description: String,
    pub categories: BTreeSet<String>,
}

impl Resource {
    pub fn new(
        resource_id: impl Into<String>,
        title: impl Into<String>,
        description: impl Into<String>,
        categories: impl IntoIterator<Item = String>,
    ) -> Self {
        Resource {
            resource_id: resource_id.into(),
            title: title.into(),
            description: description.into(),
            categories: categories.into_iter().collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resource_id.trim().is_empty() {
            return Err(Error::validation("resource_id must be non-empty"));
        }
        Ok(())
    }

    /// All indexed text: title, description and categories, space-joined.
    pub fn combined_text(&self) -> String {
        let mut text = String::with_capacity(
            self.title.len() + self.description.len() + 16 * self.categories.len(),
        );
        text.push_str(&self.title);
        text.push(' ');
        text.push_str(&self.description);
        for c in &self.categories {
            text.push(' ');
            text.push_str(c);
        }
        text
    }
}

/// A (user, resource, tag, timestamp) tuple; the social signal for tag-based CF.
///
/// Tags normalize to lowercase trimmed strings on construction. Repeated
/// applications of the same (user, resource, tag) triple collapse in the store
/// to one assignment with a use count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagAssignment {
    pub user_id: String,
    pub resource_id: String,
    pub tag: String,
    pub timestamp_ms: i64,
}

impl TagAssignment {
    /// Builds a normalized assignment; fails if the tag is empty after trimming.
    pub fn new(
        user_id: impl Into<String>,
        resource_id: impl Into<String>,
        tag: &str,
        timestamp_ms: i64,
    ) -> Result<Self> {
        let t = TagAssignment {
            user_id: user_id.into(),
            resource_id: resource_id.into(),
            tag: tag.trim().to_lowercase(),
            timestamp_ms,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.user_id.trim().is_empty() {
            return Err(Error::validation("tag user_id must be non-empty"));
        }
        if self.resource_id.trim().is_empty() {
            return Err(Error::validation("tag resource_id must be non-empty"));
        }
        if self.tag.trim().is_empty() || self.tag != self.tag.trim().to_lowercase() {
            return Err(Error::validation(
                "tag must be non-empty, trimmed and lowercase",
            ));
        }
        if self.timestamp_ms < 0 {
            return Err(Error::validation(format!(
                "tag timestamp must be >= 0, got {}",
                self.timestamp_ms
            )));
        }
        Ok(())
    }
}

/// Counter snapshot of the store plus the derived per-entity averages.
///
/// `n_tag_assignments` counts distinct (user, resource, tag) triples; repeated
/// applications of one triple raise its count but not this number. Averages are
/// 0 when the denominator is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_interactions: u64,
    pub n_users: u64,
    pub n_resources: u64,
    pub n_tag_assignments: u64,
    pub avg_interactions_per_user: f64,
    pub avg_interactions_per_resource: f64,
    pub avg_tags_per_resource: f64,
}

impl DatasetStats {
    pub fn from_counts(
        n_interactions: u64,
        n_users: u64,
        n_resources: u64,
        n_tag_assignments: u64,
    ) -> Self {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        DatasetStats {
            n_interactions,
            n_users,
            n_resources,
            n_tag_assignments,
            avg_interactions_per_user: ratio(n_interactions, n_users),
            avg_interactions_per_resource: ratio(n_interactions, n_resources),
            avg_tags_per_resource: ratio(n_tag_assignments, n_resources),
        }
    }
}
