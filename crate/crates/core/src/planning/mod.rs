//! Plan generation: the planner contract, a count-based planner, beam
//! decoding of top-K plans and the planning loss.
//!
//! A planner factorizes `P(z | q)` over relation steps followed by an
//! explicit STOP symbol:
//!
//! ```text
//! log P(z | q) = sum_i log P(r_i | r_<i, q) + log P(STOP | z, q)
//! ```
//!
//! Every scoring path in this module (beam search, loss, re-scoring) adds the
//! step terms left to right starting from `0.0`, so scores computed by
//! different routes are bit-identical.

mod beam;
mod count;
mod llm;

pub use beam::{generate_plans, BeamConfig, ScoredPlan};
pub use count::{fit_count_planner, question_features, CountPlanner, PlannerConfig, QuestionFeatures, STOP_WORDS};
pub use llm::{llm_generate_plans, plan_request};

use crate::kg::{KgError, RelationId, RelationPath};

#[derive(Debug, thiserror::Error)]
pub enum PlanningError {
    #[error("planner training set is empty")]
    EmptyTrainingSet,
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("planning loss needs at least one supervision plan")]
    EmptySupervision,
    #[error("planner file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Kg(#[from] KgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Conditional next-step distribution over relations plus STOP.
pub trait PlannerModel {
    /// Per-question state, computed once and reused for every step.
    type Context;

    fn num_relations(&self) -> usize;

    fn encode(&self, question: &str) -> Self::Context;

    /// Log-probabilities indexed by relation id, with STOP at index
    /// [`num_relations`](Self::num_relations). The exponentials sum to one.
    fn next_step_logprobs(&self, ctx: &Self::Context, prefix: &[RelationId]) -> Vec<f64>;

    fn stop_index(&self) -> usize {
        self.num_relations()
    }
}

/// `log P(z | q)` including the terminal STOP.
pub fn score_plan<M: PlannerModel>(model: &M, ctx: &M::Context, plan: &RelationPath) -> f64 {
    let rels = plan.relations();
    let mut score = 0.0;
    for i in 0..rels.len() {
        score += model.next_step_logprobs(ctx, &rels[..i])[rels[i].index()];
    }
    score + model.next_step_logprobs(ctx, rels)[model.stop_index()]
}

/// Negative mean log-likelihood of the supervision plans under `model`.
pub fn planning_loss<M: PlannerModel>(
    model: &M,
    question: &str,
    plans: &[RelationPath],
) -> Result<f64, PlanningError> {
    if plans.is_empty() {
        return Err(PlanningError::EmptySupervision);
    }
    let ctx = model.encode(question);
    let total: f64 = plans.iter().map(|z| score_plan(model, &ctx, z)).sum();
    Ok(-total / plans.len() as f64)
}

/// Every step is uniform over relations and STOP; the untrained baseline.
#[derive(Debug, Clone, Copy)]
pub struct UniformPlanner {
    pub num_relations: usize,
}

impl PlannerModel for UniformPlanner {
    type Context = ();

    fn num_relations(&self) -> usize {
        self.num_relations
    }

    fn encode(&self, _question: &str) {}

    fn next_step_logprobs(&self, _ctx: &(), _prefix: &[RelationId]) -> Vec<f64> {
        vec![-((self.num_relations + 1) as f64).ln(); self.num_relations + 1]
    }
}
