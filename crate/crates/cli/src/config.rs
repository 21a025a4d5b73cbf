//! Run configuration for the `pipeline` command.

use std::path::{Path, PathBuf};

use kgreason_core::planning::BeamConfig;
use serde::{Deserialize, Serialize};

use crate::args::{PipelineArgs, PlannerMode, ReasonerMode};
use crate::error::CliError;

/// Every field has a default except the two input paths. A
/// `retrieval_cap` of 0 keeps every path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub graph: PathBuf,
    pub qa: PathBuf,
    pub train_qa: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub max_hops: usize,
    pub beam: BeamConfig,
    pub retrieval_cap: usize,
    pub planner_mode: PlannerMode,
    pub reasoner_mode: ReasonerMode,
    pub top_n: usize,
    pub alpha: f64,
    pub keep_unsupported: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph: PathBuf::new(),
            qa: PathBuf::new(),
            train_qa: None,
            output_dir: PathBuf::from("kgreason-run"),
            max_hops: kgreason_core::mining::DEFAULT_MAX_HOPS,
            beam: BeamConfig::default(),
            retrieval_cap: 3000,
            planner_mode: PlannerMode::Count,
            reasoner_mode: ReasonerMode::Vote,
            top_n: 5,
            alpha: 0.1,
            keep_unsupported: false,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // relative paths are taken from the config file's directory
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.graph, &mut cfg.qa, &mut cfg.output_dir] {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(t) = cfg.train_qa.as_mut().filter(|t| t.is_relative()) {
            *t = base.join(&*t);
        }
        Ok(cfg)
    }

    /// Config file (if any) overlaid with explicit flags.
    pub fn resolve(args: &PipelineArgs, seed: Option<u64>) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(path) => Self::from_toml_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! overlay {
            ($($flag:ident => $field:expr),* $(,)?) => {
                $(if let Some(v) = args.$flag.clone() { $field = v; })*
            };
        }
        overlay!(
            graph => cfg.graph,
            qa => cfg.qa,
            output_dir => cfg.output_dir,
            max_hops => cfg.max_hops,
            k => cfg.beam.k,
            beam_width => cfg.beam.beam_width,
            max_len => cfg.beam.max_len,
            retrieval_cap => cfg.retrieval_cap,
            planner_mode => cfg.planner_mode,
            reasoner_mode => cfg.reasoner_mode,
            top_n => cfg.top_n,
            alpha => cfg.alpha,
        );
        if args.train_qa.is_some() {
            cfg.train_qa = args.train_qa.clone();
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, p) in [("graph", Some(&self.graph)), ("qa", Some(&self.qa)), ("train_qa", self.train_qa.as_ref())] {
            let Some(p) = p else { continue };
            if p.as_os_str().is_empty() {
                return Err(CliError::Config(format!("`{name}` is required")));
            }
            if !p.exists() {
                return Err(CliError::input(p, "no such file"));
            }
        }
        self.beam.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.top_n == 0 {
            return Err(CliError::Config("top_n must be positive".into()));
        }
        if self.planner_mode == PlannerMode::Llm || self.reasoner_mode == ReasonerMode::Llm {
            if std::env::var_os(kgreason_core::llm::ENV_ENDPOINT).is_none() {
                return Err(CliError::Config(format!(
                    "llm mode needs {} to be set",
                    kgreason_core::llm::ENV_ENDPOINT
                )));
            }
        }
        Ok(())
    }

    pub fn cap(&self) -> Option<usize> {
        (self.retrieval_cap > 0).then_some(self.retrieval_cap)
    }

    pub fn training_qa(&self) -> &Path {
        self.train_qa.as_deref().unwrap_or(&self.qa)
    }
}
