use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{PlannerModel, PlanningError};
use crate::kg::{RelationId, RelationPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BeamConfig {
    pub beam_width: usize,
    pub k: usize,
    pub max_len: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            beam_width: 3,
            k: 3,
            max_len: 4,
        }
    }
}

impl BeamConfig {
    pub fn new(beam_width: usize, k: usize, max_len: usize) -> Result<Self, PlanningError> {
        let cfg = BeamConfig {
            beam_width,
            k,
            max_len,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PlanningError> {
        if self.k == 0 || self.beam_width == 0 || self.max_len == 0 {
            return Err(PlanningError::InvalidConfig(
                "beam_width, k and max_len must be positive".into(),
            ));
        }
        if self.k > self.beam_width {
            return Err(PlanningError::InvalidConfig(format!(
                "k ({}) exceeds beam_width ({})",
                self.k, self.beam_width
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPlan {
    pub plan: RelationPath,
    pub logprob: f64,
}

/// Higher score first, then lexicographically smaller relation sequence.
fn rank(a: &(Vec<RelationId>, f64), b: &(Vec<RelationId>, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Beam search over relation steps; returns at most `cfg.k` plans ranked by
/// `log P(z | q)`.
///
/// A hypothesis is finished by scoring STOP after it; hypotheses of length
/// `max_len` are always finished. Partial hypotheses beyond `beam_width` are
/// pruned at every step.
pub fn generate_plans<M: PlannerModel>(model: &M, question: &str, cfg: &BeamConfig) -> Vec<ScoredPlan> {
    let ctx = model.encode(question);
    let stop = model.stop_index();
    let n_rel = model.num_relations();

    let mut live: Vec<(Vec<RelationId>, f64)> = vec![(Vec::new(), 0.0)];
    let mut finished: Vec<(Vec<RelationId>, f64)> = Vec::new();

    while !live.is_empty() {
        let mut candidates = Vec::with_capacity(live.len() * n_rel);
        for (seq, score) in live {
            let dist = model.next_step_logprobs(&ctx, &seq);
            if seq.len() < cfg.max_len {
                for (r, &lp) in dist[..n_rel].iter().enumerate() {
                    let mut next = seq.clone();
                    next.push(RelationId(r as u32));
                    candidates.push((next, score + lp));
                }
            }
            let stop_score = score + dist[stop];
            finished.push((seq, stop_score));
        }
        finished.sort_by(rank);
        finished.truncate(cfg.k);

        candidates.sort_by(rank);
        candidates.truncate(cfg.beam_width);
        // extensions can only lose probability mass
        if let (Some(kth), Some(best)) = (finished.get(cfg.k - 1), candidates.first()) {
            if kth.1 > best.1 {
                break;
            }
        }
        live = candidates;
    }

    finished
        .into_iter()
        .filter(|(_, s)| *s > f64::NEG_INFINITY)
        .map(|(seq, logprob)| ScoredPlan {
            plan: RelationPath(seq),
            logprob,
        })
        .collect()
}
