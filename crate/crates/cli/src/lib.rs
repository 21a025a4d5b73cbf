//! Command-line driver: every pipeline stage as a subcommand, with all
//! intermediate artifacts written to files.

pub mod args;
pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

use std::path::Path;

use kgreason_core::llm::GenerationClient;
use kgreason_core::planning::{BeamConfig, PlannerConfig};
use serde_json::{json, Value};

use crate::args::{Cli, Command, PlannerMode, ReasonerMode};
use crate::artifacts::{load_examples, load_graph, read_jsonl, save_json, save_jsonl};
use crate::commands as cmd;
pub use crate::config::RunConfig;
pub use crate::error::CliError;

/// Runs one subcommand and returns its machine-readable summary.
pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Synth(a) => cmd::synth(a, seed),
        Command::Index(a) => {
            let g = if a.inverse_edges {
                let file = std::fs::File::open(&a.graph).map_err(|e| CliError::input(&a.graph, e))?;
                kgreason_core::kg::io::read_triples(std::io::BufReader::new(file), true)?
            } else {
                load_graph(&a.graph)?
            };
            let mut summary = cmd::graph_summary(&g);
            if let Some(out) = &a.out {
                cmd::save_snapshot(&g, out)?;
                summary["snapshot"] = json!(out);
            }
            Ok(summary)
        }
        Command::Mine(a) => {
            let g = load_graph(&a.graph)?;
            let examples = load_examples(&a.qa)?;
            let (mined, summary) = cmd::mine(&g, &examples, a.max_hops);
            save_jsonl(&a.out, &mined)?;
            Ok(summary)
        }
        Command::BuildDataset(a) => {
            let g = load_graph(&a.graph)?;
            let examples = load_examples(&a.qa)?;
            cmd::build_datasets(&g, &examples, a.max_hops, a.cap.get(), &a.out_dir)
        }
        Command::TrainPlanner(a) => {
            let g = load_graph(&a.graph)?;
            let mined = read_jsonl(&a.mined)?;
            let (planner, summary) = cmd::train_planner(
                &g,
                &mined,
                PlannerConfig {
                    alpha: a.alpha,
                    max_len: a.max_len,
                },
            )?;
            cmd::save_planner(&planner, &a.out)?;
            Ok(summary)
        }
        Command::Plan(a) => {
            let g = load_graph(&a.graph)?;
            let examples = load_examples(&a.qa)?;
            let beam = BeamConfig {
                beam_width: a.beam.beam_width,
                k: a.beam.k,
                max_len: a.beam.max_len,
            };
            let planner = a.planner.as_deref().map(|p| cmd::load_planner(p, &g)).transpose()?;
            let plans = match a.mode {
                PlannerMode::Count => {
                    let planner = planner
                        .as_ref()
                        .ok_or_else(|| CliError::Config("count mode needs --planner".into()))?;
                    cmd::plan_with_counts(&g, planner, &examples, &beam, a.keep_unsupported)?
                }
                PlannerMode::Llm => cmd::plan_with_llm(&g, &cmd::llm_client()?, &examples, &beam, planner.as_ref())?,
            };
            save_jsonl(&a.out, &plans)?;
            Ok(cmd::plans_summary(&plans))
        }
        Command::Retrieve(a) => {
            let g = load_graph(&a.graph)?;
            let examples = load_examples(&a.qa)?;
            let plans = read_jsonl(&a.plans)?;
            let (records, summary) = cmd::retrieve(&g, &examples, &plans, a.cap.get())?;
            save_jsonl(&a.out, &records)?;
            Ok(summary)
        }
        Command::Answer(a) => {
            let g = load_graph(&a.graph)?;
            let retrieved = read_jsonl(&a.retrieved)?;
            let client = match a.mode {
                ReasonerMode::Llm => Some(cmd::llm_client()?),
                _ => None,
            };
            let (preds, summary) = cmd::answer(
                &g,
                &retrieved,
                a.mode,
                a.top_n,
                client.as_ref().map(|c| c as &dyn GenerationClient),
            )?;
            save_jsonl(&a.out, &preds)?;
            Ok(summary)
        }
        Command::Eval(a) => {
            let examples = load_examples(&a.qa)?;
            let preds = read_jsonl(&a.predictions)?;
            let g = a.graph.as_deref().map(load_graph).transpose()?;
            let report = cmd::evaluate(&examples, &preds, g.as_ref().map(|g| (g, a.max_hops)))?;
            cmd::print_table(&report);
            if let Some(out) = &a.out {
                save_json(out, &report)?;
            }
            Ok(cmd::report_summary(&report))
        }
        Command::RetrievalStats(a) => {
            if a.max_k == 0 {
                return Err(CliError::Config("max_k must be positive".into()));
            }
            let g = load_graph(&a.graph)?;
            let examples = load_examples(&a.qa)?;
            let planner = cmd::load_planner(&a.planner, &g)?;
            let rows = cmd::retrieval_stats(&g, &planner, &examples, a.max_k, a.max_len, a.cap.get())?;
            eprintln!("{:>3} {:>10} {:>12} {:>10}", "K", "questions", "mean paths", "mean ms");
            for r in &rows {
                eprintln!("{:>3} {:>10} {:>12.2} {:>10.3}", r.k, r.questions, r.mean_paths, r.mean_retrieval_ms);
            }
            if let Some(out) = &a.out {
                save_jsonl(out, &rows)?;
            }
            Ok(json!({ "rows": rows }))
        }
        Command::Pipeline(a) => run_pipeline(&RunConfig::resolve(a, cli.seed)?),
    }
}

/// index, mine, train, plan, retrieve, answer and eval, each writing its
/// artifact under `cfg.output_dir`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Value, CliError> {
    cfg.validate()?;
    let out = |name: &str| cfg.output_dir.join(name);
    let g = load_graph(&cfg.graph)?;
    cmd::save_snapshot(&g, &out("graph.snap"))?;
    let index = cmd::graph_summary(&g);

    let train_examples = load_examples(cfg.training_qa())?;
    let (mined, mine_summary) = cmd::mine(&g, &train_examples, cfg.max_hops);
    save_jsonl(&out("mined.jsonl"), &mined)?;

    let planner_cfg = PlannerConfig {
        alpha: cfg.alpha,
        max_len: cfg.beam.max_len,
    };
    let trained = match cmd::train_planner(&g, &mined, planner_cfg) {
        Ok(t) => Some(t),
        // a remote planner can run without training data
        Err(e) if cfg.planner_mode == PlannerMode::Llm => {
            log::warn!("no fallback planner: {e}");
            None
        }
        Err(e) => return Err(e),
    };
    let train_summary = match &trained {
        Some((planner, summary)) => {
            cmd::save_planner(planner, &out("planner.txt"))?;
            summary.clone()
        }
        None => Value::Null,
    };
    let planner = trained.map(|(p, _)| p);

    let examples = load_examples(&cfg.qa)?;
    let client = if cfg.planner_mode == PlannerMode::Llm || cfg.reasoner_mode == ReasonerMode::Llm {
        Some(cmd::llm_client()?)
    } else {
        None
    };
    let plans = match cfg.planner_mode {
        PlannerMode::Count => cmd::plan_with_counts(
            &g,
            planner.as_ref().expect("count mode trains a planner"),
            &examples,
            &cfg.beam,
            cfg.keep_unsupported,
        )?,
        PlannerMode::Llm => {
            cmd::plan_with_llm(&g, client.as_ref().expect("client built"), &examples, &cfg.beam, planner.as_ref())?
        }
    };
    save_jsonl(&out("plans.jsonl"), &plans)?;

    let (retrieved, retrieve_summary) = cmd::retrieve(&g, &examples, &plans, cfg.cap())?;
    save_jsonl(&out("retrieved.jsonl"), &retrieved)?;

    let (preds, answer_summary) = cmd::answer(
        &g,
        &retrieved,
        cfg.reasoner_mode,
        cfg.top_n,
        client.as_ref().map(|c| c as &dyn GenerationClient),
    )?;
    save_jsonl(&out("predictions.jsonl"), &preds)?;

    let report = cmd::evaluate(&examples, &preds, Some((&g, cfg.max_hops)))?;
    save_json(&out("report.json"), &report)?;
    cmd::print_table(&report);

    Ok(json!({
        "output_dir": cfg.output_dir,
        "seed": cfg.seed,
        "index": index,
        "mine": mine_summary,
        "train": train_summary,
        "plan": cmd::plans_summary(&plans),
        "retrieve": retrieve_summary,
        "answer": answer_summary,
        "eval": cmd::report_summary(&report),
    }))
}

/// Convenience for callers that only have a config path.
pub fn run_pipeline_file(path: &Path) -> Result<Value, CliError> {
    let cfg = RunConfig::from_toml_file(path)?;
    run_pipeline(&cfg)
}
