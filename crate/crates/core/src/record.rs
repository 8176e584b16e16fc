//! Canonical data model for benchmark instances and their sampled responses,
//! plus the JSONL load/save layer.
//!
//! One instance per line. Optional fields are omitted entirely when absent.
//! A dataset's metadata (model name, decoding parameters, source) travels as
//! an optional `{"metadata": {...}}` header line before the first instance.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::answer::{canonicalize_numeric, CanonicalAnswer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    Numeric,
    MultipleChoice,
}

/// One sampled reasoning path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub text: String,
    /// Per-token `(token_text, probability)` pairs in generation order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_probs: Option<Vec<(String, f64)>>,
    /// Half-open char range of the final answer within `text`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_span: Option<(usize, usize)>,
    /// Recorded probability that the model classifies its own prediction as true.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_true: Option<f64>,
}

impl Sample {
    pub fn from_text(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            token_probs: None,
            answer_span: None,
            p_true: None,
        }
    }

    fn validate(&self, id: &str) -> Result<()> {
        let fail = |reason: String| Error::SchemaViolation {
            id: id.to_string(),
            reason,
        };
        if let Some(probs) = &self.token_probs {
            if probs.is_empty() {
                return Err(fail("token_probs present but empty".into()));
            }
            for (tok, p) in probs {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(fail(format!("token prob {p} for {tok:?} outside (0, 1]")));
                }
            }
        }
        if let Some((start, end)) = self.answer_span {
            let len = self.text.chars().count();
            if start >= end || end > len {
                return Err(fail(format!(
                    "answer_span [{start}, {end}) invalid for text of {len} chars"
                )));
            }
        }
        if let Some(p) = self.p_true {
            if !(0.0..=1.0).contains(&p) {
                return Err(fail(format!("p_true {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// One benchmark question with its N sampled responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub question: String,
    /// Gold answer in canonical form (see `answer::canonicalize_numeric`);
    /// for multiple choice, one of the option labels.
    pub gold_answer: String,
    pub task_type: TaskType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<BTreeMap<String, String>>,
    pub samples: Vec<Sample>,
}

impl Instance {
    /// The gold answer as a `CanonicalAnswer`, comparable against extracted
    /// predictions.
    pub fn gold_canonical(&self) -> CanonicalAnswer {
        match self.task_type {
            TaskType::Numeric => CanonicalAnswer::numeric(self.gold_answer.clone()),
            TaskType::MultipleChoice => CanonicalAnswer::option(self.gold_answer.to_uppercase()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::SchemaViolation {
            id: self.id.clone(),
            reason,
        };
        if self.samples.is_empty() {
            return Err(fail("instance has no samples".into()));
        }
        match self.task_type {
            TaskType::Numeric => {
                if self.choices.is_some() {
                    return Err(fail("numeric task must not carry choices".into()));
                }
                let canon = canonicalize_numeric(&self.gold_answer);
                if canon.is_invalid() || canon.value != self.gold_answer {
                    return Err(fail(format!(
                        "gold_answer {:?} is not in canonical numeric form",
                        self.gold_answer
                    )));
                }
            }
            TaskType::MultipleChoice => {
                let choices = self
                    .choices
                    .as_ref()
                    .filter(|c| !c.is_empty())
                    .ok_or_else(|| fail("multiple_choice task requires non-empty choices".into()))?;
                if !choices.contains_key(&self.gold_answer) {
                    return Err(fail(format!(
                        "gold_answer {:?} is not an option label",
                        self.gold_answer
                    )));
                }
                let mut seen = BTreeSet::new();
                for label in choices.keys() {
                    if !seen.insert(label.to_uppercase()) {
                        return Err(fail(format!(
                            "option labels collide after case folding: {label:?}"
                        )));
                    }
                }
            }
        }
        for sample in &self.samples {
            sample.validate(&self.id)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub instances: Vec<Instance>,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataHeader {
    metadata: BTreeMap<String, String>,
}

/// Load a JSONL dataset, validating every instance.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut dataset = Dataset::default();
    let mut seen_ids = BTreeSet::new();
    let mut first_content_line = true;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        if first_content_line {
            first_content_line = false;
            if let Ok(header) = serde_json::from_str::<MetadataHeader>(&line) {
                dataset.metadata = header.metadata;
                continue;
            }
        }
        let instance: Instance =
            serde_json::from_str(&line).map_err(|source| Error::MalformedLine {
                path: path.to_path_buf(),
                line: line_no,
                source,
            })?;
        instance.validate()?;
        if !seen_ids.insert(instance.id.clone()) {
            return Err(Error::SchemaViolation {
                id: instance.id,
                reason: "duplicate instance id".into(),
            });
        }
        dataset.instances.push(instance);
    }

    if dataset.instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(dataset)
}

/// Write a dataset as JSONL; `load_dataset(save_dataset(d)) == d`.
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut writer = BufWriter::new(file);

    if !dataset.metadata.is_empty() {
        let header = MetadataHeader {
            metadata: dataset.metadata.clone(),
        };
        serde_json::to_writer(&mut writer, &header).map_err(|e| io_err(e.into()))?;
        writer.write_all(b"\n").map_err(io_err)?;
    }
    for instance in &dataset.instances {
        serde_json::to_writer(&mut writer, instance).map_err(|e| io_err(e.into()))?;
        writer.write_all(b"\n").map_err(io_err)?;
    }
    writer.flush().map_err(io_err)
}
