//! QA example ingestion and instruction-dataset construction.
//!
//! QA files are JSON lines with `id`, `question`, `q_entities` and
//! `answers`; instruction datasets are JSON lines with `kind`, `input` and
//! `target`.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kg::{serialize_plan, EntityId, KgError, KnowledgeGraph};
use crate::mining::{mine_shortest_relation_paths, planning_targets};
use crate::prompts::{paths_block, planning_prompt, reasoning_prompt};
use crate::retrieval::{retrieve_for_plans, RetrievalError};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("example `{id}`: none of {missing:?} resolve in the graph")]
    Unresolved { id: String, missing: Vec<String> },
    #[error(transparent)]
    Kg(#[from] KgError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAExample {
    pub id: String,
    pub question: String,
    #[serde(rename = "q_entities")]
    pub topic_entities: Vec<String>,
    pub answers: Vec<String>,
}

/// A [`QAExample`] with names mapped to graph ids. Names absent from the
/// graph are dropped and listed in `missing`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedExample {
    pub topic_entities: Vec<EntityId>,
    pub answer_entities: Vec<EntityId>,
    pub missing: Vec<String>,
}

impl ResolvedExample {
    /// Fails only when no topic entity or no answer resolves.
    pub fn resolve(example: &QAExample, g: &KnowledgeGraph) -> Result<Self, DatasetError> {
        let mut missing = Vec::new();
        let mut lookup = |names: &[String]| -> Vec<EntityId> {
            names
                .iter()
                .filter_map(|n| match g.vocab().entity_id(n) {
                    Some(e) => Some(e),
                    None => {
                        missing.push(n.clone());
                        None
                    }
                })
                .collect()
        };
        let topic_entities = lookup(&example.topic_entities);
        let answer_entities = lookup(&example.answers);
        if topic_entities.is_empty() || answer_entities.is_empty() {
            return Err(DatasetError::Unresolved {
                id: example.id.clone(),
                missing,
            });
        }
        Ok(ResolvedExample {
            topic_entities,
            answer_entities,
            missing,
        })
    }

    pub fn resolve_topics(example: &QAExample, g: &KnowledgeGraph) -> Result<Vec<EntityId>, DatasetError> {
        let topics: Vec<EntityId> = example
            .topic_entities
            .iter()
            .filter_map(|n| g.vocab().entity_id(n))
            .collect();
        if topics.is_empty() {
            return Err(DatasetError::Unresolved {
                id: example.id.clone(),
                missing: example.topic_entities.clone(),
            });
        }
        Ok(topics)
    }
}

pub fn load_qa<R: BufRead>(reader: R) -> Result<Vec<QAExample>, DatasetError> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let ex: QAExample = serde_json::from_str(&line).map_err(|e| DatasetError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if ex.id.is_empty() {
            return Err(DatasetError::Parse {
                line: lineno,
                message: "empty id".into(),
            });
        }
        if ex.topic_entities.is_empty() {
            return Err(DatasetError::Parse {
                line: lineno,
                message: format!("example `{}` has no q_entities", ex.id),
            });
        }
        if !ids.insert(ex.id.clone()) {
            return Err(DatasetError::DuplicateId {
                line: lineno,
                id: ex.id,
            });
        }
        out.push(ex);
    }
    Ok(out)
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write, T: Serialize>(mut out: W, items: &[T]) -> Result<(), DatasetError> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Planning,
    Reasoning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub kind: RecordKind,
    pub input: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedExample {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetBuild {
    pub records: Vec<InstructionRecord>,
    pub skipped: Vec<SkippedExample>,
}

impl DatasetBuild {
    fn collect(outcomes: Vec<(String, Result<Vec<InstructionRecord>, String>)>) -> Self {
        let mut build = DatasetBuild::default();
        for (id, outcome) in outcomes {
            match outcome {
                Ok(records) => build.records.extend(records),
                Err(reason) => build.skipped.push(SkippedExample { id, reason }),
            }
        }
        build
    }
}

const NO_PATH: &str = "no connecting path within max hops";

/// One planning record per mined plan of each example.
pub fn build_planning_dataset(examples: &[QAExample], g: &KnowledgeGraph, max_hops: usize) -> DatasetBuild {
    let outcomes = examples
        .par_iter()
        .map(|ex| {
            let outcome = match planning_targets(ex, g, max_hops) {
                Ok(pairs) if pairs.is_empty() => Err(NO_PATH.to_string()),
                Ok(pairs) => Ok(pairs
                    .into_iter()
                    .map(|(question, plan)| InstructionRecord {
                        kind: RecordKind::Planning,
                        input: planning_prompt(&question),
                        target: plan,
                    })
                    .collect()),
                Err(e) => Err(e.to_string()),
            };
            (ex.id.clone(), outcome)
        })
        .collect();
    DatasetBuild::collect(outcomes)
}

/// One reasoning record per example: the paths grounded from every mined
/// plan as context, the gold answers (newline-joined) as target.
pub fn build_reasoning_dataset(
    examples: &[QAExample],
    g: &KnowledgeGraph,
    max_hops: usize,
    cap: Option<usize>,
) -> DatasetBuild {
    let outcomes = examples
        .par_iter()
        .map(|ex| (ex.id.clone(), reasoning_record(ex, g, max_hops, cap)))
        .collect();
    DatasetBuild::collect(outcomes)
}

fn reasoning_record(
    ex: &QAExample,
    g: &KnowledgeGraph,
    max_hops: usize,
    cap: Option<usize>,
) -> Result<Vec<InstructionRecord>, String> {
    let resolved = ResolvedExample::resolve(ex, g).map_err(|e| e.to_string())?;
    let mined = mine_shortest_relation_paths(g, &resolved.topic_entities, &resolved.answer_entities, max_hops)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| NO_PATH.to_string())?;
    let results =
        retrieve_for_plans(g, &resolved.topic_entities, mined.plans(), cap).map_err(|e| e.to_string())?;
    let paths: Vec<_> = results.iter().flat_map(|r| r.paths.iter()).collect();
    if paths.is_empty() {
        return Err("no reasoning paths retrieved".into());
    }
    let block = paths_block(paths, g.vocab()).map_err(|e| e.to_string())?;
    Ok(vec![InstructionRecord {
        kind: RecordKind::Reasoning,
        input: reasoning_prompt(&ex.question, &block),
        target: ex.answers.join("\n"),
    }])
}

/// Serialized mined plans per example, for inspection and planner training.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinedRecord {
    pub id: String,
    pub question: String,
    pub hop_count: Option<usize>,
    pub plans: Vec<String>,
}

pub fn mine_examples(examples: &[QAExample], g: &KnowledgeGraph, max_hops: usize) -> Vec<MinedRecord> {
    examples
        .par_iter()
        .map(|ex| {
            let mined = ResolvedExample::resolve(ex, g).ok().and_then(|r| {
                mine_shortest_relation_paths(g, &r.topic_entities, &r.answer_entities, max_hops)
                    .ok()
                    .flatten()
            });
            let (hop_count, plans) = match mined {
                Some(m) => (
                    Some(m.hop_count()),
                    m.plans()
                        .iter()
                        .map(|z| serialize_plan(z, g.vocab()).expect("mined relations resolve"))
                        .collect(),
                ),
                None => (None, Vec::new()),
            };
            MinedRecord {
                id: ex.id.clone(),
                question: ex.question.clone(),
                hop_count,
                plans,
            }
        })
        .collect()
}
