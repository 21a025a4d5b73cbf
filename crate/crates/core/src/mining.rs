//! Shortest relation-path supervision.
//!
//! For a question with topic entities `T` and answers `A`, the supervision
//! set is every distinct relation sequence realized by a shortest walk from
//! `T` to `A`, where "shortest" is the global minimum hop distance over all
//! topic/answer pairs. Each sequence carries the same posterior weight.

use std::collections::BTreeMap;

use crate::datasets::{DatasetError, QAExample, ResolvedExample};
use crate::kg::{serialize_plan, EntityId, KgError, KnowledgeGraph, RelationId, RelationPath};

pub const DEFAULT_MAX_HOPS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct MinedPlans {
    plans: Vec<RelationPath>,
    hop_count: usize,
}

impl MinedPlans {
    /// Sorts and deduplicates `plans`; `None` when empty or of mixed length.
    pub fn new(mut plans: Vec<RelationPath>) -> Option<Self> {
        plans.sort();
        plans.dedup();
        let hop_count = plans.first()?.len();
        if plans.iter().any(|z| z.len() != hop_count) {
            return None;
        }
        Some(MinedPlans { plans, hop_count })
    }

    /// Distinct plans in lexicographic relation-id order.
    pub fn plans(&self) -> &[RelationPath] {
        &self.plans
    }

    pub fn hop_count(&self) -> usize {
        self.hop_count
    }

    /// Uniform posterior mass of each plan.
    pub fn posterior_weight(&self) -> f64 {
        1.0 / self.plans.len() as f64
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}

const UNSEEN: u32 = u32::MAX;

/// Mines the distinct shortest relation sequences from `topic_entities` to
/// `answer_entities`, or `None` when no answer lies within `max_hops`.
pub fn mine_shortest_relation_paths(
    g: &KnowledgeGraph,
    topic_entities: &[EntityId],
    answer_entities: &[EntityId],
    max_hops: usize,
) -> Result<Option<MinedPlans>, KgError> {
    for &e in topic_entities.iter().chain(answer_entities) {
        g.check_entity(e)?;
    }
    if topic_entities.is_empty() || answer_entities.is_empty() {
        return Ok(None);
    }
    let n = g.vocab().num_entities();
    let mut is_answer = vec![false; n];
    for &a in answer_entities {
        is_answer[a.index()] = true;
    }

    // multi-source BFS; layers[k] holds the entities at distance k
    let mut dist = vec![UNSEEN; n];
    let mut layers: Vec<Vec<EntityId>> = vec![Vec::new()];
    for &t in topic_entities {
        if dist[t.index()] == UNSEEN {
            dist[t.index()] = 0;
            layers[0].push(t);
        }
    }
    let mut hit = layers[0].iter().any(|e| is_answer[e.index()]);
    while !hit && layers.len() <= max_hops {
        let depth = layers.len() as u32;
        let mut next = Vec::new();
        for &e in layers.last().unwrap() {
            for (_, t) in g.out_edges(e) {
                if dist[t.index()] == UNSEEN {
                    dist[t.index()] = depth;
                    hit |= is_answer[t.index()];
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    if !hit {
        return Ok(None);
    }
    let d = layers.len() - 1;

    // keep only entities on some shortest walk to an answer
    let mut useful = vec![false; n];
    for &e in &layers[d] {
        useful[e.index()] = is_answer[e.index()];
    }
    for k in (0..d).rev() {
        for &e in &layers[k] {
            let k1 = k as u32 + 1;
            useful[e.index()] = g
                .out_edges(e)
                .any(|(_, t)| dist[t.index()] == k1 && useful[t.index()]);
        }
    }

    // expand relation prefixes layer by layer, grouping entities by prefix
    let mut groups: BTreeMap<Vec<RelationId>, Vec<EntityId>> = BTreeMap::new();
    groups.insert(
        Vec::new(),
        layers[0].iter().copied().filter(|e| useful[e.index()]).collect(),
    );
    for k in 0..d {
        let k1 = k as u32 + 1;
        let mut next: BTreeMap<Vec<RelationId>, Vec<EntityId>> = BTreeMap::new();
        for (prefix, members) in &groups {
            for &e in members {
                for (r, t) in g.out_edges(e) {
                    if dist[t.index()] == k1 && useful[t.index()] {
                        let mut extended = prefix.clone();
                        extended.push(r);
                        next.entry(extended).or_default().push(t);
                    }
                }
            }
        }
        for members in next.values_mut() {
            members.sort_unstable();
            members.dedup();
        }
        groups = next;
    }

    Ok(MinedPlans::new(groups.into_keys().map(RelationPath).collect()))
}

/// `(question, serialized plan)` training pairs, one per mined plan.
pub fn planning_targets(
    example: &QAExample,
    g: &KnowledgeGraph,
    max_hops: usize,
) -> Result<Vec<(String, String)>, DatasetError> {
    let resolved = ResolvedExample::resolve(example, g)?;
    let mined = mine_shortest_relation_paths(g, &resolved.topic_entities, &resolved.answer_entities, max_hops)?;
    let Some(mined) = mined else {
        return Ok(Vec::new());
    };
    mined
        .plans()
        .iter()
        .map(|z| Ok((example.question.clone(), serialize_plan(z, g.vocab())?)))
        .collect()
}
