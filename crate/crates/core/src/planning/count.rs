//! Count-based planner with add-alpha smoothing and context backoff.
//!
//! Next-step counts are kept at three context levels:
//!
//! 1. the question's full feature set plus the plan prefix,
//! 2. each single question word plus the prefix (pooled over the words of
//!    the question being decoded),
//! 3. the prefix alone.
//!
//! Decoding uses the first level with any observations for the current
//! context and falls back to the uniform distribution when none has. The
//! smoothed estimate is `(c + alpha) / (total + alpha * (R + 1))` over the
//! `R` relations plus STOP.
//!
//! # File format
//!
//! Line-based UTF-8, tab-separated:
//!
//! ```text
//! kgreason-count-planner<TAB>1
//! alpha<TAB><f64>
//! max_len<TAB><usize>
//! relation<TAB><id><TAB><name>              (one per relation)
//! exact<TAB><feature key><TAB><prefix><TAB><next><TAB><count>
//! word<TAB><word><TAB><prefix><TAB><next><TAB><count>
//! prefix<TAB><prefix><TAB><next><TAB><count>
//! ```
//!
//! `<prefix>` is space-separated relation ids or `-` when empty; `<next>` is
//! a relation id or `STOP`. Count lines are sorted, so a given planner always
//! dumps to the same bytes.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{PlannerModel, PlanningError, ScoredPlan};
use crate::kg::{KgError, RelationId, RelationPath, Vocabulary};

const FORMAT_HEADER: &str = "kgreason-count-planner";
const FORMAT_VERSION: u32 = 1;
const STOP: u32 = u32::MAX;

/// Words dropped from question features.
pub const STOP_WORDS: &[&str] = &[
    "a", "about", "an", "and", "are", "as", "at", "be", "by", "did", "do", "does", "for", "from", "has",
    "have", "how", "in", "is", "it", "of", "on", "or", "that", "the", "this", "to", "was", "were",
    "what", "when", "where", "which", "who", "whom", "whose", "why", "with",
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuestionFeatures {
    /// Sorted, deduplicated content words.
    pub words: Vec<String>,
    pub key: String,
}

pub fn question_features(question: &str) -> QuestionFeatures {
    let mut words: Vec<String> = question
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .filter(|w| !STOP_WORDS.contains(&w.as_str()))
        .collect();
    words.sort();
    words.dedup();
    let key = words.join(" ");
    QuestionFeatures { words, key }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    pub alpha: f64,
    pub max_len: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            alpha: 0.1,
            max_len: 4,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Counts {
    next: BTreeMap<u32, u64>,
    total: u64,
}

impl Counts {
    fn add(&mut self, symbol: u32, n: u64) {
        *self.next.entry(symbol).or_default() += n;
        self.total += n;
    }

    fn merge(&mut self, other: &Counts) {
        for (&s, &n) in &other.next {
            self.add(s, n);
        }
    }
}

type PrefixTable = BTreeMap<Vec<RelationId>, Counts>;

#[derive(Debug, Clone, PartialEq)]
pub struct CountPlanner {
    relation_names: Vec<String>,
    config: PlannerConfig,
    exact: BTreeMap<String, PrefixTable>,
    by_word: BTreeMap<String, PrefixTable>,
    by_prefix: PrefixTable,
}

fn validate_config(config: &PlannerConfig) -> Result<(), PlanningError> {
    if !(config.alpha.is_finite() && config.alpha > 0.0) {
        return Err(PlanningError::InvalidConfig(format!(
            "alpha must be positive and finite, got {}",
            config.alpha
        )));
    }
    if config.max_len == 0 {
        return Err(PlanningError::InvalidConfig("max_len must be positive".into()));
    }
    Ok(())
}

/// Accumulates every `(context, prefix, next)` transition of every training
/// pair, including the STOP after the last relation.
pub fn fit_count_planner(
    pairs: &[(String, RelationPath)],
    vocab: &Vocabulary,
    config: PlannerConfig,
) -> Result<CountPlanner, PlanningError> {
    validate_config(&config)?;
    if pairs.is_empty() {
        return Err(PlanningError::EmptyTrainingSet);
    }
    let mut planner = CountPlanner {
        relation_names: vocab.relations().iter().map(|(_, n)| n.to_string()).collect(),
        config,
        exact: BTreeMap::new(),
        by_word: BTreeMap::new(),
        by_prefix: BTreeMap::new(),
    };
    for (question, plan) in pairs {
        for &r in plan.relations() {
            if r.index() >= planner.relation_names.len() {
                return Err(KgError::UnknownRelationId(r.0).into());
            }
        }
        let features = question_features(question);
        let rels = plan.relations();
        for i in 0..=rels.len() {
            let prefix = &rels[..i];
            let next = rels.get(i).map_or(STOP, |r| r.0);
            planner.observe(&features, prefix, next, 1);
        }
    }
    Ok(planner)
}

impl CountPlanner {
    fn observe(&mut self, features: &QuestionFeatures, prefix: &[RelationId], next: u32, n: u64) {
        self.exact
            .entry(features.key.clone())
            .or_default()
            .entry(prefix.to_vec())
            .or_default()
            .add(next, n);
        for w in &features.words {
            self.by_word
                .entry(w.clone())
                .or_default()
                .entry(prefix.to_vec())
                .or_default()
                .add(next, n);
        }
        self.by_prefix.entry(prefix.to_vec()).or_default().add(next, n);
    }

    pub fn config(&self) -> PlannerConfig {
        self.config
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    /// Observations backing the distribution for `(features, prefix)`, or
    /// `None` when decoding falls back to uniform.
    fn context_counts(&self, features: &QuestionFeatures, prefix: &[RelationId]) -> Option<Counts> {
        if let Some(c) = self.exact.get(&features.key).and_then(|t| t.get(prefix)) {
            return Some(c.clone());
        }
        let mut pooled = Counts::default();
        for w in &features.words {
            if let Some(c) = self.by_word.get(w).and_then(|t| t.get(prefix)) {
                pooled.merge(c);
            }
        }
        if pooled.total > 0 {
            return Some(pooled);
        }
        self.by_prefix.get(prefix).cloned()
    }

    /// True when every step of `plan`, including its closing STOP, was
    /// observed in training at the context level decoding uses; plans that
    /// need smoothing mass anywhere are unsupported. A plan at `max_len`
    /// still needs its STOP observed.
    pub fn is_supported(&self, question: &str, plan: &RelationPath) -> bool {
        let features = question_features(question);
        let rels = plan.relations();
        (0..=rels.len()).all(|i| {
            let next = rels.get(i).map_or(STOP, |r| r.0);
            self.context_counts(&features, &rels[..i])
                .is_some_and(|c| c.next.get(&next).is_some_and(|&n| n > 0))
        })
    }

    /// Keeps the evidence-backed plans of a beam, in order. When none is
    /// supported the beam is returned unchanged.
    pub fn retain_supported(&self, question: &str, plans: Vec<ScoredPlan>) -> Vec<ScoredPlan> {
        let kept: Vec<ScoredPlan> = plans
            .iter()
            .filter(|p| self.is_supported(question, &p.plan))
            .cloned()
            .collect();
        if kept.is_empty() {
            plans
        } else {
            kept
        }
    }

    pub fn save<W: Write>(&self, mut out: W) -> Result<(), PlanningError> {
        writeln!(out, "{FORMAT_HEADER}\t{FORMAT_VERSION}")?;
        writeln!(out, "alpha\t{}", self.config.alpha)?;
        writeln!(out, "max_len\t{}", self.config.max_len)?;
        for (i, name) in self.relation_names.iter().enumerate() {
            writeln!(out, "relation\t{i}\t{name}")?;
        }
        for (level, table) in [("exact", &self.exact), ("word", &self.by_word)] {
            for (key, prefixes) in table {
                for (prefix, counts) in prefixes {
                    for (&next, &n) in &counts.next {
                        writeln!(out, "{level}\t{key}\t{}\t{}\t{n}", fmt_prefix(prefix), fmt_symbol(next))?;
                    }
                }
            }
        }
        for (prefix, counts) in &self.by_prefix {
            for (&next, &n) in &counts.next {
                writeln!(out, "prefix\t{}\t{}\t{n}", fmt_prefix(prefix), fmt_symbol(next))?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a planner dump, remapping relation ids onto `vocab` by name.
    pub fn load<R: BufRead>(input: R, vocab: &Vocabulary) -> Result<Self, PlanningError> {
        let mut alpha = None;
        let mut max_len = None;
        let mut remap: Vec<RelationId> = Vec::new();
        let mut planner = CountPlanner {
            relation_names: vocab.relations().iter().map(|(_, n)| n.to_string()).collect(),
            config: PlannerConfig::default(),
            exact: BTreeMap::new(),
            by_word: BTreeMap::new(),
            by_prefix: BTreeMap::new(),
        };
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let err = |message: String| PlanningError::Format { line: lineno, message };
            let fields: Vec<&str> = line.split('\t').collect();
            if lineno == 1 {
                if fields != [FORMAT_HEADER, &FORMAT_VERSION.to_string()] {
                    return Err(err(format!("expected `{FORMAT_HEADER}\t{FORMAT_VERSION}` header")));
                }
                continue;
            }
            let parse_symbol = |s: &str| -> Result<u32, PlanningError> {
                if s == "STOP" {
                    return Ok(STOP);
                }
                let old: usize = s.parse().map_err(|_| err(format!("bad symbol `{s}`")))?;
                remap
                    .get(old)
                    .map(|r| r.0)
                    .ok_or_else(|| err(format!("relation id {old} not declared")))
            };
            let parse_prefix = |s: &str| -> Result<Vec<RelationId>, PlanningError> {
                if s == "-" {
                    return Ok(Vec::new());
                }
                s.split(' ')
                    .map(|tok| parse_symbol(tok).map(RelationId))
                    .collect()
            };
            let parse_count = |s: &str| -> Result<u64, PlanningError> {
                s.parse().map_err(|_| err(format!("bad count `{s}`")))
            };
            match fields.as_slice() {
                ["alpha", v] => alpha = Some(v.parse::<f64>().map_err(|_| err("bad alpha".into()))?),
                ["max_len", v] => max_len = Some(v.parse::<usize>().map_err(|_| err("bad max_len".into()))?),
                ["relation", id, name] => {
                    if id.parse::<usize>().ok() != Some(remap.len()) {
                        return Err(err("relation ids must be dense and ordered".into()));
                    }
                    let r = vocab
                        .relation_id(name)
                        .ok_or_else(|| KgError::UnknownRelationName(name.to_string()))?;
                    remap.push(r);
                }
                [level @ ("exact" | "word"), key, prefix, next, n] => {
                    let prefix = parse_prefix(prefix)?;
                    let next = parse_symbol(next)?;
                    let n = parse_count(n)?;
                    let table = if *level == "exact" {
                        &mut planner.exact
                    } else {
                        &mut planner.by_word
                    };
                    table
                        .entry(key.to_string())
                        .or_default()
                        .entry(prefix)
                        .or_default()
                        .add(next, n);
                }
                ["prefix", prefix, next, n] => {
                    let prefix = parse_prefix(prefix)?;
                    let next = parse_symbol(next)?;
                    let n = parse_count(n)?;
                    planner.by_prefix.entry(prefix).or_default().add(next, n);
                }
                _ => return Err(err(format!("unrecognized record `{line}`"))),
            }
        }
        planner.config = PlannerConfig {
            alpha: alpha.ok_or(PlanningError::Format {
                line: 0,
                message: "missing alpha".into(),
            })?,
            max_len: max_len.ok_or(PlanningError::Format {
                line: 0,
                message: "missing max_len".into(),
            })?,
        };
        validate_config(&planner.config)?;
        Ok(planner)
    }
}

fn fmt_prefix(prefix: &[RelationId]) -> String {
    if prefix.is_empty() {
        "-".to_string()
    } else {
        prefix.iter().map(|r| r.0.to_string()).collect::<Vec<_>>().join(" ")
    }
}

fn fmt_symbol(s: u32) -> String {
    if s == STOP {
        "STOP".to_string()
    } else {
        s.to_string()
    }
}

impl PlannerModel for CountPlanner {
    type Context = QuestionFeatures;

    fn num_relations(&self) -> usize {
        self.relation_names.len()
    }

    fn encode(&self, question: &str) -> QuestionFeatures {
        question_features(question)
    }

    fn next_step_logprobs(&self, ctx: &QuestionFeatures, prefix: &[RelationId]) -> Vec<f64> {
        let support = self.num_relations() + 1;
        let Some(counts) = self.context_counts(ctx, prefix) else {
            return vec![-(support as f64).ln(); support];
        };
        let alpha = self.config.alpha;
        let denom = (counts.total as f64 + alpha * support as f64).ln();
        let mut out = vec![alpha.ln() - denom; support];
        for (&sym, &n) in &counts.next {
            let idx = if sym == STOP { support - 1 } else { sym as usize };
            out[idx] = (n as f64 + alpha).ln() - denom;
        }
        out
    }
}
