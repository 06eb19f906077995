//! Machine-readable run reports.
//!
//! JSON reports carry the run descriptor, four-stage wall-clock timings,
//! and optionally the concept payloads; CSV reports are one fixed
//! 13-column row per run. Indices in payloads are 1-based.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use pfca_core::{Concept, PrivacyConcept};

use crate::CliError;

pub const CSV_HEADER: [&str; 13] = [
    "dataset", "m", "n", "density", "algo", "backend", "workers", "concepts", "read_s",
    "encrypt_s", "process_s", "extract_s", "total_s",
];

/// Wall-clock seconds of the four pipeline stages. Built from shared
/// boundary instants, so the stages sum to the total up to float rounding.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StageTimings {
    pub read_s: f64,
    pub encrypt_s: f64,
    pub process_s: f64,
    pub extract_s: f64,
    pub total_s: f64,
}

impl StageTimings {
    pub fn from_boundaries(
        start: Instant,
        read_done: Instant,
        encrypt_done: Instant,
        process_done: Instant,
        extract_done: Instant,
    ) -> Self {
        Self {
            read_s: (read_done - start).as_secs_f64(),
            encrypt_s: (encrypt_done - read_done).as_secs_f64(),
            process_s: (process_done - encrypt_done).as_secs_f64(),
            extract_s: (extract_done - process_done).as_secs_f64(),
            total_s: (extract_done - start).as_secs_f64(),
        }
    }

    pub fn stage_sum(&self) -> f64 {
        self.read_s + self.encrypt_s + self.process_s + self.extract_s
    }
}

/// A concept payload entry with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptDto {
    pub extent: Vec<u32>,
    pub intent: Vec<u32>,
}

impl ConceptDto {
    pub fn from_concept(c: &Concept) -> Self {
        Self {
            extent: c.extent.iter().map(|i| i + 1).collect(),
            intent: c.intent.iter().map(|j| j + 1).collect(),
        }
    }
}

/// A privacy-concept payload entry: the known side plus the hidden side's
/// cardinality, 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyConceptDto {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intent_cardinality: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent_cardinality: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intent: Option<Vec<u32>>,
}

impl PrivacyConceptDto {
    pub fn from_privacy(pc: &PrivacyConcept) -> Self {
        match pc {
            PrivacyConcept::FInduced { extent, intent_size } => Self {
                extent: Some(extent.iter().map(|i| i + 1).collect()),
                intent_cardinality: Some(*intent_size),
                extent_cardinality: None,
                intent: None,
            },
            PrivacyConcept::GInduced { extent_size, intent } => Self {
                extent: None,
                intent_cardinality: None,
                extent_cardinality: Some(*extent_size),
                intent: Some(intent.iter().map(|j| j + 1).collect()),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: String,
    pub m: usize,
    pub n: usize,
    pub density: f64,
    pub algo: String,
    pub backend: String,
    pub workers: usize,
    pub concept_count: usize,
    pub timings: StageTimings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concepts: Option<Vec<ConceptDto>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub privacy_concepts: Option<Vec<PrivacyConceptDto>>,
}

impl RunReport {
    pub fn csv_record(&self) -> [String; 13] {
        [
            self.dataset.clone(),
            self.m.to_string(),
            self.n.to_string(),
            format!("{:.6}", self.density),
            self.algo.clone(),
            self.backend.clone(),
            self.workers.to_string(),
            self.concept_count.to_string(),
            format!("{:.6}", self.timings.read_s),
            format!("{:.6}", self.timings.encrypt_s),
            format!("{:.6}", self.timings.process_s),
            format!("{:.6}", self.timings.extract_s),
            format!("{:.6}", self.timings.total_s),
        ]
    }
}

/// Writes one report as JSON or CSV depending on the path extension
/// (`.csv` selects CSV; anything else JSON).
pub fn write_report(report: &RunReport, path: &Path) -> Result<(), CliError> {
    if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        write_csv(std::slice::from_ref(report), path)
    } else {
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

pub fn write_csv(reports: &[RunReport], path: &Path) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(CSV_HEADER)?;
    for report in reports {
        writer.write_record(report.csv_record())?;
    }
    writer.flush()?;
    Ok(())
}
