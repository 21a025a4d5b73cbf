//! Hits@1 and set-F1 scoring with answer-count and hop breakdowns.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::datasets::QAExample;
use crate::text::normalize_answer;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("question `{0}` has no gold answers")]
    EmptyGold(String),
    #[error("predictions for unknown question ids: {0:?}")]
    UnknownIds(Vec<String>),
}

fn normalized_set(items: &[String]) -> HashSet<String> {
    items.iter().map(|s| normalize_answer(s)).collect()
}

/// 1.0 when the first prediction matches a gold answer, else 0.0.
pub fn hits_at_1(predicted: &[String], gold: &[String]) -> f64 {
    match predicted.first() {
        Some(top) => {
            let top = normalize_answer(top);
            f64::from(u8::from(gold.iter().any(|g| normalize_answer(g) == top)))
        }
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Set precision, recall and F1 after normalization.
pub fn f1_set(predicted: &[String], gold: &[String]) -> Result<Prf, EvalError> {
    let gold = normalized_set(gold);
    if gold.is_empty() {
        return Err(EvalError::EmptyGold(String::new()));
    }
    let pred = normalized_set(predicted);
    let overlap = pred.intersection(&gold).count() as f64;
    let precision = if pred.is_empty() { 0.0 } else { overlap / pred.len() as f64 };
    let recall = overlap / gold.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Prf { precision, recall, f1 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub id: String,
    pub hit: bool,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketMetrics {
    pub label: String,
    pub count: usize,
    pub hits_at_1: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub questions: usize,
    pub hits_at_1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_question: Vec<QuestionScore>,
    pub answer_count_buckets: Vec<BucketMetrics>,
    pub hop_buckets: Option<Vec<BucketMetrics>>,
}

pub const ANSWER_COUNT_LABELS: [&str; 4] = ["#Ans = 1", "2 <= #Ans <= 4", "5 <= #Ans <= 9", "#Ans >= 10"];
pub const HOP_LABELS: [&str; 3] = ["1 hop", "2 hop", ">= 3 hop"];

/// Index into [`ANSWER_COUNT_LABELS`].
pub fn answer_count_bucket(n_answers: usize) -> usize {
    match n_answers {
        0 | 1 => 0,
        2..=4 => 1,
        5..=9 => 2,
        _ => 3,
    }
}

/// Index into [`HOP_LABELS`]; zero-hop questions share the 1-hop bucket.
pub fn hop_bucket(hops: usize) -> usize {
    match hops {
        0 | 1 => 0,
        2 => 1,
        _ => 2,
    }
}

fn bucket_metrics(label: &str, members: &[&QuestionScore]) -> BucketMetrics {
    let n = members.len();
    let mean = |f: &dyn Fn(&QuestionScore) -> f64| {
        if n == 0 {
            0.0
        } else {
            members.iter().map(|q| f(q)).sum::<f64>() / n as f64
        }
    };
    BucketMetrics {
        label: label.to_string(),
        count: n,
        hits_at_1: mean(&|q| f64::from(u8::from(q.hit))),
        precision: mean(&|q| q.precision),
        recall: mean(&|q| q.recall),
        f1: mean(&|q| q.f1),
    }
}

/// Scores a run. Questions without a prediction count as empty predictions;
/// predictions for ids absent from `gold` are an error.
pub fn evaluate_run(
    predictions: &HashMap<String, Vec<String>>,
    gold: &[QAExample],
    hop_labels: Option<&HashMap<String, usize>>,
) -> Result<EvalReport, EvalError> {
    let known: HashSet<&str> = gold.iter().map(|g| g.id.as_str()).collect();
    let mut unknown: Vec<String> = predictions
        .keys()
        .filter(|id| !known.contains(id.as_str()))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        unknown.sort();
        return Err(EvalError::UnknownIds(unknown));
    }

    let empty = Vec::new();
    let mut per_question = Vec::with_capacity(gold.len());
    let mut answer_members: [Vec<usize>; 4] = Default::default();
    let mut hop_members: [Vec<usize>; 3] = Default::default();
    for (i, ex) in gold.iter().enumerate() {
        let predicted = predictions.get(&ex.id).unwrap_or(&empty);
        let prf = f1_set(predicted, &ex.answers).map_err(|_| EvalError::EmptyGold(ex.id.clone()))?;
        per_question.push(QuestionScore {
            id: ex.id.clone(),
            hit: hits_at_1(predicted, &ex.answers) == 1.0,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
        });
        answer_members[answer_count_bucket(normalized_set(&ex.answers).len())].push(i);
        if let Some(h) = hop_labels.and_then(|labels| labels.get(&ex.id)) {
            hop_members[hop_bucket(*h)].push(i);
        }
    }

    let all: Vec<&QuestionScore> = per_question.iter().collect();
    let overall = bucket_metrics("all", &all);
    let collect = |labels: &[&str], members: &[Vec<usize>]| -> Vec<BucketMetrics> {
        labels
            .iter()
            .zip(members)
            .map(|(label, idx)| {
                let m: Vec<&QuestionScore> = idx.iter().map(|&i| &per_question[i]).collect();
                bucket_metrics(label, &m)
            })
            .collect()
    };
    let answer_count_buckets = collect(&ANSWER_COUNT_LABELS, &answer_members);
    let hop_buckets = hop_labels.map(|_| collect(&HOP_LABELS, &hop_members));

    Ok(EvalReport {
        questions: gold.len(),
        hits_at_1: overall.hits_at_1,
        macro_precision: overall.precision,
        macro_recall: overall.recall,
        macro_f1: overall.f1,
        per_question,
        answer_count_buckets,
        hop_buckets,
    })
}

/// Aligned plain-text summary of a report.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let row = |out: &mut String, label: &str, n: usize, h: f64, p: f64, r: f64, f: f64| {
        let _ = writeln!(
            out,
            "{label:<18} {n:>7} {:>8.2} {:>9.2} {:>8.2} {:>8.2}",
            h * 100.0,
            p * 100.0,
            r * 100.0,
            f * 100.0
        );
    };
    let _ = writeln!(out, "{:<18} {:>7} {:>8} {:>9} {:>8} {:>8}", "bucket", "n", "Hits@1", "Precision", "Recall", "F1");
    row(
        &mut out,
        "all",
        report.questions,
        report.hits_at_1,
        report.macro_precision,
        report.macro_recall,
        report.macro_f1,
    );
    let buckets = report
        .answer_count_buckets
        .iter()
        .chain(report.hop_buckets.iter().flatten());
    for b in buckets {
        row(&mut out, &b.label, b.count, b.hits_at_1, b.precision, b.recall, b.f1);
    }
    out
}
