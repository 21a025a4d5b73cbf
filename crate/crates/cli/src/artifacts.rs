//! On-disk records passed between stages, plus file helpers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read};
use std::path::Path;
use std::time::Duration;

use kgreason_core::datasets::{load_qa, write_jsonl, QAExample};
use kgreason_core::kg::io::{read_snapshot, read_triples, SNAPSHOT_MAGIC};
use kgreason_core::kg::{parse_plan, serialize_plan, KnowledgeGraph, ReasoningPath};
use kgreason_core::retrieval::RetrievalResult;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub plan: String,
    /// Planner log-probability; absent for remote plans.
    pub logprob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub id: String,
    pub question: String,
    pub plans: Vec<PlanEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub entities: Vec<String>,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanPaths {
    pub plan: String,
    pub truncated: bool,
    pub paths: Vec<PathRecord>,
}

/// Retrieval output for one question. Timings are left out so reruns are
/// byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievedRecord {
    pub id: String,
    pub question: String,
    pub results: Vec<PlanPaths>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub answers: Vec<String>,
    pub scores: Vec<f64>,
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::input(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::input(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::input(path, e))
}

/// Loads a binary snapshot or, failing the magic check, a TSV triple file.
pub fn load_graph(path: &Path) -> Result<KnowledgeGraph, CliError> {
    let mut head = [0u8; 8];
    let n = open(path)?.read(&mut head).map_err(|e| CliError::input(path, e))?;
    let file = open(path)?;
    let g = if n == SNAPSHOT_MAGIC.len() && &head == SNAPSHOT_MAGIC {
        read_snapshot(BufReader::new(file))
    } else {
        read_triples(BufReader::new(file), false)
    };
    g.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn load_examples(path: &Path) -> Result<Vec<QAExample>, CliError> {
    load_qa(BufReader::new(open(path)?)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| CliError::input(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| CliError::Data(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.push(item);
    }
    Ok(out)
}

pub fn save_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CliError> {
    write_jsonl(create(path)?, items).map_err(|e| CliError::input(path, e))
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    std::io::Write::write_all(&mut out, b"\n").map_err(|e| CliError::input(path, e))?;
    std::io::Write::flush(&mut out).map_err(|e| CliError::input(path, e))
}

impl RetrievedRecord {
    pub fn from_results(
        id: &str,
        question: &str,
        results: &[RetrievalResult],
        g: &KnowledgeGraph,
    ) -> Result<Self, CliError> {
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            let mut paths = Vec::with_capacity(r.paths.len());
            for p in &r.paths {
                paths.push(PathRecord {
                    entities: p
                        .entities()
                        .iter()
                        .map(|&e| g.entity_name(e).map(str::to_string))
                        .collect::<Result<_, _>>()?,
                    relations: p
                        .relations()
                        .iter()
                        .map(|&r| g.relation_name(r).map(str::to_string))
                        .collect::<Result<_, _>>()?,
                });
            }
            out.push(PlanPaths {
                plan: serialize_plan(&r.plan, g.vocab())?,
                truncated: r.truncated,
                paths,
            });
        }
        Ok(RetrievedRecord {
            id: id.to_string(),
            question: question.to_string(),
            results: out,
        })
    }

    /// Rebuilds retrieval results against `g`; timings and expansion counts
    /// are not stored and come back as zero.
    pub fn to_results(&self, g: &KnowledgeGraph) -> Result<Vec<RetrievalResult>, CliError> {
        self.results
            .iter()
            .map(|pp| {
                let paths = pp
                    .paths
                    .iter()
                    .map(|p| {
                        let entities = p.entities.iter().map(|n| g.entity(n)).collect::<Result<_, _>>()?;
                        let relations = p.relations.iter().map(|n| g.relation(n)).collect::<Result<_, _>>()?;
                        Ok(ReasoningPath::new(entities, relations)?)
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(RetrievalResult {
                    plan: parse_plan(&pp.plan, g.vocab())?,
                    paths,
                    truncated: pp.truncated,
                    elapsed: Duration::ZERO,
                    expanded_nodes: 0,
                })
            })
            .collect()
    }
}
