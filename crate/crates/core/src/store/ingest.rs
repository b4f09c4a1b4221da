//! File-format ingestion: CSV for interactions and tags, JSON-lines for
//! resources. Valid records are applied, invalid ones itemized with line
//! numbers; a broken envelope (missing or wrong header, empty payload) fails
//! the whole request.

use serde::{Deserialize, Serialize};

use super::types::{Interaction, InteractionKind, Resource, TagAssignment};
use super::Store;
use crate::error::{Error, Result};

pub const INTERACTIONS_HEADER: [&str; 4] = ["user_id", "resource_id", "timestamp_ms", "kind"];
pub const TAGS_HEADER: [&str; 4] = ["user_id", "resource_id", "tag", "timestamp_ms"];

/// One rejected record.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RecordError {
    /// 1-based line number in the submitted payload.
    pub line: u64,
    pub message: String,
}

/// Outcome of a (partially accepted) ingestion request.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: u64,
    pub rejected: u64,
    pub errors: Vec<RecordError>,
}

impl IngestReport {
    fn reject(&mut self, line: u64, message: impl Into<String>) {
        self.rejected += 1;
        self.errors.push(RecordError {
            line,
            message: message.into(),
        });
    }
}

fn csv_reader(content: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(content.as_bytes())
}

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("unreadable header row: {e}")))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::Format(format!(
            "header row must be `{}`, got `{}`",
            expected.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord, fallback: u64) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(fallback)
}

/// Parses interaction rows; does not touch any store.
pub fn parse_interactions_csv(content: &str) -> Result<(Vec<Interaction>, IngestReport)> {
    let mut reader = csv_reader(content);
    check_header(&mut reader, &INTERACTIONS_HEADER)?;

    let mut rows = Vec::new();
    let mut report = IngestReport::default();
    for (i, result) in reader.records().enumerate() {
        let fallback = i as u64 + 2;
        match result {
            Err(e) => report.reject(fallback, format!("malformed row: {e}")),
            Ok(record) => {
                let line = record_line(&record, fallback);
                match parse_interaction_record(&record) {
                    Ok(interaction) => {
                        report.accepted += 1;
                        rows.push(interaction);
                    }
                    Err(e) => report.reject(line, e.to_string()),
                }
            }
        }
    }
    Ok((rows, report))
}

fn parse_interaction_record(record: &csv::StringRecord) -> Result<Interaction> {
    let ts: i64 = record[2]
        .parse()
        .map_err(|_| Error::validation(format!("invalid timestamp `{}`", &record[2])))?;
    let interaction = Interaction {
        user_id: record[0].to_owned(),
        resource_id: record[1].to_owned(),
        timestamp_ms: ts,
        kind: InteractionKind::parse(&record[3])?,
    };
    interaction.validate()?;
    Ok(interaction)
}

/// Parses tag rows; does not touch any store.
pub fn parse_tags_csv(content: &str) -> Result<(Vec<TagAssignment>, IngestReport)> {
    let mut reader = csv_reader(content);
    check_header(&mut reader, &TAGS_HEADER)?;

    let mut rows = Vec::new();
    let mut report = IngestReport::default();
    for (i, result) in reader.records().enumerate() {
        let fallback = i as u64 + 2;
        match result {
            Err(e) => report.reject(fallback, format!("malformed row: {e}")),
            Ok(record) => {
                let line = record_line(&record, fallback);
                let ts: std::result::Result<i64, _> = record[3].parse();
                let parsed = match ts {
                    Err(_) => Err(Error::validation(format!(
                        "invalid timestamp `{}`",
                        &record[3]
                    ))),
                    Ok(ts) => TagAssignment::new(&record[0], &record[1], &record[2], ts),
                };
                match parsed {
                    Ok(tag) => {
                        report.accepted += 1;
                        rows.push(tag);
                    }
                    Err(e) => report.reject(line, e.to_string()),
                }
            }
        }
    }
    Ok((rows, report))
}

/// Parses JSON-lines resources; blank lines are skipped.
pub fn parse_resources_jsonl(content: &str) -> Result<(Vec<Resource>, IngestReport)> {
    let mut rows = Vec::new();
    let mut report = IngestReport::default();
    for (i, raw) in content.lines().enumerate() {
        let line = i as u64 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Resource>(raw) {
            Err(e) => report.reject(line, format!("invalid resource object: {e}")),
            Ok(resource) => match resource.validate() {
                Ok(()) => {
                    report.accepted += 1;
                    rows.push(resource);
                }
                Err(e) => report.reject(line, e.to_string()),
            },
        }
    }
    Ok((rows, report))
}

impl Store {
    /// Parses and applies interaction rows. Valid rows are applied in file
    /// order under one write lock.
    pub fn ingest_interactions_csv(&self, content: &str) -> Result<IngestReport> {
        let (rows, report) = parse_interactions_csv(content)?;
        let mut state = self.state.write();
        for row in rows {
            state.apply_interaction(row);
        }
        Ok(report)
    }

    pub fn ingest_resources_jsonl(&self, content: &str) -> Result<IngestReport> {
        let (rows, report) = parse_resources_jsonl(content)?;
        let mut state = self.state.write();
        for row in rows {
            state.apply_resource(row);
        }
        Ok(report)
    }

    pub fn ingest_tags_csv(&self, content: &str) -> Result<IngestReport> {
        let (rows, report) = parse_tags_csv(content)?;
        let mut state = self.state.write();
        for row in rows {
            state.apply_tag(row);
        }
        Ok(report)
    }
}
