//! Stage implementations shared by the single-stage subcommands and the
//! pipeline.

use std::collections::HashMap;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::Path;
use std::time::Instant;

use kgreason_core::datasets::{
    build_planning_dataset, build_reasoning_dataset, mine_examples, write_jsonl, MinedRecord, QAExample,
    ResolvedExample,
};
use kgreason_core::evaluation::{evaluate_run, render_table, EvalReport};
use kgreason_core::kg::io::{write_snapshot, write_triples};
use kgreason_core::kg::{parse_plan, serialize_plan, KnowledgeGraph, RelationPath};
use kgreason_core::llm::{GenerationClient, HttpClient};
use kgreason_core::planning::{
    fit_count_planner, generate_plans, llm_generate_plans, planning_loss, BeamConfig, CountPlanner, PlannerConfig,
};
use kgreason_core::reasoning::{answers_all, answers_vote, llm_reason, AnswerSet};
use kgreason_core::retrieval::{retrieve_for_plans, totals};
use kgreason_core::synthetic::{template_world, zipf_triples, ZipfGraphConfig};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{ReasonerMode, SynthArgs, SynthKind};
use crate::artifacts::{create, PlanEntry, PlanRecord, PredictionRecord, RetrievedRecord};
use crate::error::CliError;

pub const TOY_QUESTION: &str = "Who is the child of Alice";

pub fn toy_graph() -> KnowledgeGraph {
    KnowledgeGraph::from_triples([("Alice", "marry_to", "Bob"), ("Bob", "father_of", "Charlie")])
}

pub fn toy_examples() -> Vec<QAExample> {
    vec![QAExample {
        id: "toy-1".into(),
        question: TOY_QUESTION.into(),
        topic_entities: vec!["Alice".into()],
        answers: vec!["Charlie".into()],
    }]
}

fn write_graph_tsv(g: &KnowledgeGraph, path: &Path) -> Result<(), CliError> {
    write_triples(g, create(path)?).map_err(|e| CliError::input(path, e))
}

pub fn synth(args: &SynthArgs, seed: u64) -> Result<Value, CliError> {
    let graph_path = args.out_dir.join("graph.tsv");
    let qa_path = args.out_dir.join("qa.jsonl");
    match args.kind {
        SynthKind::Toy => {
            write_graph_tsv(&toy_graph(), &graph_path)?;
            crate::artifacts::save_jsonl(&qa_path, &toy_examples())?;
            Ok(json!({"kind": "toy", "graph": graph_path, "qa": qa_path, "triples": 2, "questions": 1}))
        }
        SynthKind::Zipf => {
            if args.entities == 0 || args.relations == 0 {
                return Err(CliError::Config("zipf graphs need entities and relations".into()));
            }
            let cfg = ZipfGraphConfig {
                triples: args.triples,
                entities: args.entities,
                relations: args.relations,
                exponent: args.exponent,
            };
            let mut out = create(&graph_path)?;
            let mut failed = None;
            zipf_triples(&cfg, seed, |s, r, o| {
                if failed.is_none() {
                    failed = writeln!(out, "{s}\t{r}\t{o}").err();
                }
            });
            if let Some(e) = failed {
                return Err(CliError::input(&graph_path, e));
            }
            out.flush().map_err(|e| CliError::input(&graph_path, e))?;
            Ok(json!({"kind": "zipf", "graph": graph_path, "triples": cfg.triples, "seed": seed}))
        }
        SynthKind::Movies => {
            let world = template_world(args.entities, args.questions, seed);
            write_graph_tsv(&world.graph, &graph_path)?;
            crate::artifacts::save_jsonl(&qa_path, &world.examples)?;
            Ok(json!({
                "kind": "movies",
                "graph": graph_path,
                "qa": qa_path,
                "triples": world.graph.num_triples(),
                "questions": world.examples.len(),
                "seed": seed,
            }))
        }
    }
}

pub fn save_snapshot(g: &KnowledgeGraph, path: &Path) -> Result<(), CliError> {
    let mut out = create(path)?;
    write_snapshot(g, &mut out).map_err(|e| CliError::input(path, e))?;
    out.flush().map_err(|e| CliError::input(path, e))
}

pub fn graph_summary(g: &KnowledgeGraph) -> Value {
    let s = g.stats();
    json!({"entities": s.entities, "relations": s.relations, "triples": s.triples})
}

pub fn mine(g: &KnowledgeGraph, examples: &[QAExample], max_hops: usize) -> (Vec<MinedRecord>, Value) {
    let mined = mine_examples(examples, g, max_hops);
    let with_plans = mined.iter().filter(|m| !m.plans.is_empty()).count();
    let plans: usize = mined.iter().map(|m| m.plans.len()).sum();
    let summary = json!({
        "examples": mined.len(),
        "mined": with_plans,
        "unmined": mined.len() - with_plans,
        "plans": plans,
    });
    (mined, summary)
}

pub fn build_datasets(
    g: &KnowledgeGraph,
    examples: &[QAExample],
    max_hops: usize,
    cap: Option<usize>,
    out_dir: &Path,
) -> Result<Value, CliError> {
    let planning = build_planning_dataset(examples, g, max_hops);
    let reasoning = build_reasoning_dataset(examples, g, max_hops, cap);
    let save = |name: &str, f: &dyn Fn(&mut dyn Write) -> Result<(), CliError>| -> Result<(), CliError> {
        let path = out_dir.join(name);
        let mut out = create(&path)?;
        f(&mut out)?;
        out.flush().map_err(|e| CliError::input(&path, e))
    };
    save("planning.jsonl", &|w| Ok(write_jsonl(w, &planning.records)?))?;
    save("reasoning.jsonl", &|w| Ok(write_jsonl(w, &reasoning.records)?))?;
    #[derive(Serialize)]
    struct Skip<'a> {
        dataset: &'a str,
        id: &'a str,
        reason: &'a str,
    }
    let skipped: Vec<Skip> = planning
        .skipped
        .iter()
        .map(|s| ("planning", s))
        .chain(reasoning.skipped.iter().map(|s| ("reasoning", s)))
        .map(|(dataset, s)| Skip {
            dataset,
            id: &s.id,
            reason: &s.reason,
        })
        .collect();
    save("skipped.jsonl", &|w| Ok(write_jsonl(w, &skipped)?))?;
    Ok(json!({
        "examples": examples.len(),
        "planning_records": planning.records.len(),
        "reasoning_records": reasoning.records.len(),
        "planning_skipped": planning.skipped.len(),
        "reasoning_skipped": reasoning.skipped.len(),
    }))
}

/// Fits a count planner on every (question, mined plan) pair and reports the
/// mean training planning loss.
pub fn train_planner(
    g: &KnowledgeGraph,
    mined: &[MinedRecord],
    config: PlannerConfig,
) -> Result<(CountPlanner, Value), CliError> {
    let mut pairs = Vec::new();
    let mut supervision: Vec<(&str, Vec<RelationPath>)> = Vec::new();
    for m in mined.iter().filter(|m| !m.plans.is_empty()) {
        let plans = m
            .plans
            .iter()
            .map(|p| parse_plan(p, g.vocab()))
            .collect::<Result<Vec<_>, _>>()?;
        pairs.extend(plans.iter().map(|z| (m.question.clone(), z.clone())));
        supervision.push((&m.question, plans));
    }
    let planner = fit_count_planner(&pairs, g.vocab(), config)?;
    let mut loss = 0.0;
    for (q, plans) in &supervision {
        loss += planning_loss(&planner, q, plans)?;
    }
    let mean_loss = loss / supervision.len() as f64;
    let summary = json!({
        "questions": supervision.len(),
        "pairs": pairs.len(),
        "alpha": config.alpha,
        "max_len": config.max_len,
        "mean_planning_loss": mean_loss,
    });
    Ok((planner, summary))
}

pub fn save_planner(planner: &CountPlanner, path: &Path) -> Result<(), CliError> {
    let mut out = create(path)?;
    planner.save(&mut out)?;
    out.flush().map_err(|e| CliError::input(path, e))
}

pub fn load_planner(path: &Path, g: &KnowledgeGraph) -> Result<CountPlanner, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::input(path, e))?;
    CountPlanner::load(std::io::BufReader::new(file), g.vocab())
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn count_plans(
    g: &KnowledgeGraph,
    planner: &CountPlanner,
    ex: &QAExample,
    beam: &BeamConfig,
    keep_unsupported: bool,
) -> Result<PlanRecord, CliError> {
    let mut plans = generate_plans(planner, &ex.question, beam);
    if !keep_unsupported {
        plans = planner.retain_supported(&ex.question, plans);
    }
    Ok(PlanRecord {
        id: ex.id.clone(),
        question: ex.question.clone(),
        plans: plans
            .iter()
            .map(|p| {
                Ok(PlanEntry {
                    plan: serialize_plan(&p.plan, g.vocab())?,
                    logprob: Some(p.logprob),
                })
            })
            .collect::<Result<_, CliError>>()?,
    })
}

pub fn plan_with_counts(
    g: &KnowledgeGraph,
    planner: &CountPlanner,
    examples: &[QAExample],
    beam: &BeamConfig,
    keep_unsupported: bool,
) -> Result<Vec<PlanRecord>, CliError> {
    beam.validate()?;
    examples
        .par_iter()
        .map(|ex| count_plans(g, planner, ex, beam, keep_unsupported))
        .collect()
}

/// Remote plans; questions with no parseable completion fall back to the
/// count planner when one is given.
pub fn plan_with_llm<C: GenerationClient + ?Sized>(
    g: &KnowledgeGraph,
    client: &C,
    examples: &[QAExample],
    beam: &BeamConfig,
    fallback: Option<&CountPlanner>,
) -> Result<Vec<PlanRecord>, CliError> {
    beam.validate()?;
    examples
        .par_iter()
        .map(|ex| {
            let plans = llm_generate_plans(client, &ex.question, beam.k, g.vocab())?;
            match fallback {
                Some(planner) if plans.is_empty() => {
                    log::warn!("{}: no parseable remote plan, using the count planner", ex.id);
                    count_plans(g, planner, ex, beam, false)
                }
                _ => Ok(PlanRecord {
                    id: ex.id.clone(),
                    question: ex.question.clone(),
                    plans: plans
                        .iter()
                        .map(|z| {
                            Ok(PlanEntry {
                                plan: serialize_plan(z, g.vocab())?,
                                logprob: None,
                            })
                        })
                        .collect::<Result<_, CliError>>()?,
                }),
            }
        })
        .collect()
}

pub fn plans_summary(plans: &[PlanRecord]) -> Value {
    json!({
        "questions": plans.len(),
        "plans": plans.iter().map(|p| p.plans.len()).sum::<usize>(),
        "without_plans": plans.iter().filter(|p| p.plans.is_empty()).count(),
    })
}

/// Grounds each question's plans from its topic entities. Questions without
/// plans or resolvable topics get an empty result list.
pub fn retrieve(
    g: &KnowledgeGraph,
    examples: &[QAExample],
    plans: &[PlanRecord],
    cap: Option<usize>,
) -> Result<(Vec<RetrievedRecord>, Value), CliError> {
    let by_id: HashMap<&str, &PlanRecord> = plans.iter().map(|p| (p.id.as_str(), p)).collect();
    let rows: Vec<(RetrievedRecord, usize)> = examples
        .par_iter()
        .map(|ex| {
            let Some(rec) = by_id.get(ex.id.as_str()) else {
                log::warn!("{}: no plans", ex.id);
                return Ok((RetrievedRecord::from_results(&ex.id, &ex.question, &[], g)?, 0));
            };
            let topics = match ResolvedExample::resolve_topics(ex, g) {
                Ok(t) => t,
                Err(e) => {
                    log::warn!("{e}");
                    return Ok((RetrievedRecord::from_results(&ex.id, &ex.question, &[], g)?, 0));
                }
            };
            let zs = rec
                .plans
                .iter()
                .map(|p| parse_plan(&p.plan, g.vocab()))
                .collect::<Result<Vec<_>, _>>()?;
            let results = retrieve_for_plans(g, &topics, &zs, cap)?;
            let truncated = totals(&results).truncated_plans;
            Ok((RetrievedRecord::from_results(&ex.id, &ex.question, &results, g)?, truncated))
        })
        .collect::<Result<_, CliError>>()?;
    let paths: usize = rows
        .iter()
        .map(|(r, _)| r.results.iter().map(|p| p.paths.len()).sum::<usize>())
        .sum();
    let truncated: usize = rows.iter().map(|(_, t)| t).sum();
    let records: Vec<RetrievedRecord> = rows.into_iter().map(|(r, _)| r).collect();
    let summary = json!({
        "questions": records.len(),
        "paths": paths,
        "truncated_plans": truncated,
        "mean_paths": if records.is_empty() { 0.0 } else { paths as f64 / records.len() as f64 },
    });
    Ok((records, summary))
}

fn prediction(id: &str, set: &AnswerSet, g: &KnowledgeGraph) -> PredictionRecord {
    PredictionRecord {
        id: id.to_string(),
        answers: set.names(g.vocab()),
        scores: set.answers.iter().map(|a| a.score).collect(),
    }
}

pub fn answer(
    g: &KnowledgeGraph,
    retrieved: &[RetrievedRecord],
    mode: ReasonerMode,
    top_n: usize,
    client: Option<&dyn GenerationClient>,
) -> Result<(Vec<PredictionRecord>, Value), CliError> {
    let n = NonZeroUsize::new(top_n).ok_or_else(|| CliError::Config("top_n must be positive".into()))?;
    if mode == ReasonerMode::Llm && client.is_none() {
        return Err(CliError::Config("llm reasoner needs a generation client".into()));
    }
    let preds: Vec<PredictionRecord> = retrieved
        .par_iter()
        .map(|rec| {
            let results = rec.to_results(g)?;
            let set = match mode {
                ReasonerMode::All => answers_all(&results),
                ReasonerMode::Vote => answers_vote(&results, n),
                ReasonerMode::Llm => llm_reason(client.expect("checked above"), &rec.question, &results, g.vocab())?,
            };
            Ok(prediction(&rec.id, &set, g))
        })
        .collect::<Result<_, CliError>>()?;
    let summary = json!({
        "questions": preds.len(),
        "answered": preds.iter().filter(|p| !p.answers.is_empty()).count(),
        "mode": mode,
    });
    Ok((preds, summary))
}

/// Scores predictions; with a graph, questions are also bucketed by their
/// mined shortest-path length.
pub fn evaluate(
    examples: &[QAExample],
    predictions: &[PredictionRecord],
    hops_from: Option<(&KnowledgeGraph, usize)>,
) -> Result<EvalReport, CliError> {
    let mut preds: HashMap<String, Vec<String>> = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if preds.insert(p.id.clone(), p.answers.clone()).is_some() {
            return Err(CliError::Data(format!("duplicate prediction for `{}`", p.id)));
        }
    }
    let hops: Option<HashMap<String, usize>> = hops_from.map(|(g, max_hops)| {
        mine_examples(examples, g, max_hops)
            .into_iter()
            .filter_map(|m| m.hop_count.map(|h| (m.id, h)))
            .collect()
    });
    Ok(evaluate_run(&preds, examples, hops.as_ref())?)
}

pub fn report_summary(report: &EvalReport) -> Value {
    json!({
        "questions": report.questions,
        "hits_at_1": report.hits_at_1,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "macro_f1": report.macro_f1,
    })
}

pub fn print_table(report: &EvalReport) {
    eprint!("{}", render_table(report));
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub k: usize,
    pub questions: usize,
    pub mean_paths: f64,
    pub mean_retrieval_ms: f64,
}

/// Generates the top `max_k` plans once per question and grounds the first
/// K of them for each K, so path counts can only grow with K.
pub fn retrieval_stats(
    g: &KnowledgeGraph,
    planner: &CountPlanner,
    examples: &[QAExample],
    max_k: usize,
    max_len: usize,
    cap: Option<usize>,
) -> Result<Vec<StatsRow>, CliError> {
    let beam = BeamConfig::new(max_k.max(3), max_k, max_len)?;
    let prepared: Vec<(Vec<_>, Vec<RelationPath>)> = examples
        .par_iter()
        .filter_map(|ex| {
            let topics = ResolvedExample::resolve_topics(ex, g).ok()?;
            let plans = generate_plans(planner, &ex.question, &beam).into_iter().map(|p| p.plan).collect();
            Some((topics, plans))
        })
        .collect();
    let mut rows = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        let mut paths = 0usize;
        let mut elapsed = 0.0f64;
        for (topics, plans) in &prepared {
            let started = Instant::now();
            let results = retrieve_for_plans(g, topics, &plans[..k.min(plans.len())], cap)?;
            elapsed += started.elapsed().as_secs_f64() * 1e3;
            paths += totals(&results).paths;
        }
        let n = prepared.len().max(1) as f64;
        rows.push(StatsRow {
            k,
            questions: prepared.len(),
            mean_paths: paths as f64 / n,
            mean_retrieval_ms: elapsed / n,
        });
    }
    Ok(rows)
}

pub fn llm_client() -> Result<HttpClient, CliError> {
    Ok(HttpClient::from_env()?)
}
