//! Answer extraction from retrieved reasoning paths and the reasoning-side
//! objectives.

use std::collections::{HashMap, HashSet};
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

use crate::kg::{EntityId, KgError, ReasoningPath, RelationPath, Vocabulary};
use crate::llm::{generate, GenerationClient, GenerationRequest, LlmError};
use crate::prompts::{self, paths_block};
use crate::retrieval::RetrievalResult;
use crate::text::normalize_answer;

/// Majority-vote answer count used when none is given.
pub const DEFAULT_VOTE_TOP_N: NonZeroUsize = match NonZeroUsize::new(5) {
    Some(n) => n,
    None => unreachable!(),
};

#[derive(Debug, thiserror::Error)]
pub enum ReasoningError {
    #[error("reasoning objective needs at least one plan")]
    NoPlans,
    #[error(transparent)]
    Kg(#[from] KgError),
    #[error(transparent)]
    Llm(#[from] LlmError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    Entity(EntityId),
    Text(String),
}

impl Answer {
    pub fn display(&self, vocab: &Vocabulary) -> String {
        match self {
            Answer::Entity(e) => vocab
                .entity_name(*e)
                .map(str::to_string)
                .unwrap_or_else(|| e.to_string()),
            Answer::Text(t) => t.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAnswer {
    pub answer: Answer,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnswerSource {
    All,
    Vote,
    Llm,
}

/// Ranked answers, scores non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerSet {
    pub answers: Vec<ScoredAnswer>,
    pub source: AnswerSource,
}

impl AnswerSet {
    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn names(&self, vocab: &Vocabulary) -> Vec<String> {
        self.answers.iter().map(|a| a.answer.display(vocab)).collect()
    }
}

/// Every distinct terminal entity, scored by how many paths end there;
/// ordered by count descending then entity id ascending.
pub fn answers_all(results: &[RetrievalResult]) -> AnswerSet {
    let mut tally: HashMap<EntityId, usize> = HashMap::new();
    for t in results.iter().flat_map(RetrievalResult::terminals) {
        *tally.entry(t).or_default() += 1;
    }
    let mut ranked: Vec<(EntityId, usize)> = tally.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    AnswerSet {
        answers: ranked
            .into_iter()
            .map(|(e, n)| ScoredAnswer {
                answer: Answer::Entity(e),
                score: n as f64,
            })
            .collect(),
        source: AnswerSource::All,
    }
}

/// The `n` most frequent terminal entities.
pub fn answers_vote(results: &[RetrievalResult], n: NonZeroUsize) -> AnswerSet {
    let mut set = answers_all(results);
    set.answers.truncate(n.get());
    set.source = AnswerSource::Vote;
    set
}

/// Splits an LLM answer list on newlines and commas, strips list markers
/// (`-`, `*`, `1.`) and drops duplicates under answer normalization.
pub fn parse_answer_list(completion: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for item in completion.lines().flat_map(|l| l.split(',')) {
        let item = strip_list_marker(item.trim()).trim();
        if item.is_empty() {
            continue;
        }
        if seen.insert(normalize_answer(item)) {
            out.push(item.to_string());
        }
    }
    out
}

fn strip_list_marker(item: &str) -> &str {
    if let Some(rest) = item.strip_prefix(['-', '*']) {
        return rest;
    }
    let digits = item.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        if let Some(rest) = item[digits..].strip_prefix('.') {
            return rest;
        }
    }
    item
}

fn all_paths(results: &[RetrievalResult]) -> impl Iterator<Item = &ReasoningPath> {
    results.iter().flat_map(|r| r.paths.iter())
}

pub fn reasoning_prompt(question: &str, results: &[RetrievalResult], vocab: &Vocabulary) -> Result<String, KgError> {
    Ok(prompts::reasoning_prompt(question, &paths_block(all_paths(results), vocab)?))
}

pub fn explanation_prompt(
    question: &str,
    results: &[RetrievalResult],
    examples_block: &str,
    vocab: &Vocabulary,
) -> Result<String, KgError> {
    Ok(prompts::explanation_prompt(
        question,
        &paths_block(all_paths(results), vocab)?,
        examples_block,
    ))
}

/// Asks `client` to answer from the retrieved paths; answers are ranked in
/// the order the model lists them.
pub fn llm_reason<C: GenerationClient + ?Sized>(
    client: &C,
    question: &str,
    results: &[RetrievalResult],
    vocab: &Vocabulary,
) -> Result<AnswerSet, ReasoningError> {
    let prompt = reasoning_prompt(question, results, vocab)?;
    let completions = generate(client, &GenerationRequest::new(prompt))?;
    let parsed = completions.first().map(|c| parse_answer_list(c)).unwrap_or_default();
    if parsed.is_empty() {
        log::warn!("no answers parsed from reasoner completion {:?}", completions.first());
    }
    Ok(AnswerSet {
        answers: parsed
            .into_iter()
            .enumerate()
            .map(|(rank, text)| ScoredAnswer {
                answer: Answer::Text(text),
                score: 1.0 / (rank + 1) as f64,
            })
            .collect(),
        source: AnswerSource::Llm,
    })
}

/// `log P(a | q, z, G)` given the reasoning paths grounded from one plan.
pub trait PathAnswerScorer {
    fn answer_logprob(&self, question: &str, paths: &[ReasoningPath], answer: EntityId) -> f64;
}

/// Smoothed relative frequency of the answer among path terminals:
/// `(count(a) + alpha) / (N + alpha * |T ∪ {a}|)` for `N` paths with
/// distinct terminals `T`.
#[derive(Debug, Clone, Copy)]
pub struct FrequencyScorer {
    pub alpha: f64,
}

impl Default for FrequencyScorer {
    fn default() -> Self {
        FrequencyScorer { alpha: 0.1 }
    }
}

impl PathAnswerScorer for FrequencyScorer {
    fn answer_logprob(&self, _question: &str, paths: &[ReasoningPath], answer: EntityId) -> f64 {
        let mut terminals: HashSet<EntityId> = paths.iter().map(ReasoningPath::terminal).collect();
        let hits = paths.iter().filter(|p| p.terminal() == answer).count();
        terminals.insert(answer);
        let denom = paths.len() as f64 + self.alpha * terminals.len() as f64;
        ((hits as f64 + self.alpha) / denom).ln()
    }
}

/// Answer log-likelihood with plans contributing independently: the sum of
/// per-plan `log P(a | q, z, G)`.
pub fn reasoning_loss<S: PathAnswerScorer + ?Sized>(
    scorer: &S,
    question: &str,
    answer: EntityId,
    plans_with_paths: &[(RelationPath, Vec<ReasoningPath>)],
) -> Result<f64, ReasoningError> {
    if plans_with_paths.is_empty() {
        return Err(ReasoningError::NoPlans);
    }
    Ok(plans_with_paths
        .iter()
        .map(|(_, paths)| scorer.answer_logprob(question, paths, answer))
        .sum())
}

/// Answer log-likelihood with every plan's paths scored as one context.
pub fn pooled_reasoning_loss<S: PathAnswerScorer + ?Sized>(
    scorer: &S,
    question: &str,
    answer: EntityId,
    plans_with_paths: &[(RelationPath, Vec<ReasoningPath>)],
) -> Result<f64, ReasoningError> {
    if plans_with_paths.is_empty() {
        return Err(ReasoningError::NoPlans);
    }
    let pooled: Vec<ReasoningPath> = plans_with_paths.iter().flat_map(|(_, p)| p.iter().cloned()).collect();
    Ok(scorer.answer_logprob(question, &pooled, answer))
}

/// Joint objective to maximize: reasoning log-likelihood minus planning loss.
pub fn combined_objective(planning_loss: f64, reasoning_log_likelihood: f64) -> f64 {
    reasoning_log_likelihood - planning_loss
}
