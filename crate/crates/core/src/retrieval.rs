//! Constrained breadth-first grounding of relation paths.
//!
//! Starting from the topic entities, the search expands a partial path at
//! depth `i` only along relation `z[i]`, so every returned reasoning path
//! follows the plan exactly. Entities may repeat within a path; the plan
//! length bounds the depth.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::kg::{EntityId, KgError, KnowledgeGraph, ReasoningPath, RelationPath};

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("retrieval needs at least one topic entity")]
    NoTopicEntities,
    #[error(transparent)]
    Kg(#[from] KgError),
}

#[derive(Debug, Clone, Serialize)]
pub struct RetrievalResult {
    pub plan: RelationPath,
    pub paths: Vec<ReasoningPath>,
    /// Set when `cap` stopped the search before every path was emitted.
    pub truncated: bool,
    pub elapsed: Duration,
    /// Partial paths popped from the queue, including completed ones.
    pub expanded_nodes: usize,
}

impl RetrievalResult {
    pub fn terminals(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.paths.iter().map(ReasoningPath::terminal)
    }
}

/// Deduplicated topic entities in ascending id order.
fn seed_entities(g: &KnowledgeGraph, topics: &[EntityId]) -> Result<Vec<EntityId>, RetrievalError> {
    if topics.is_empty() {
        return Err(RetrievalError::NoTopicEntities);
    }
    let mut seeds = topics
        .iter()
        .map(|&e| g.check_entity(e))
        .collect::<Result<Vec<_>, _>>()?;
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}

/// Grounds `plan` from `topic_entities`.
///
/// Paths come out in breadth-first discovery order with ascending-id
/// tie-breaks, which is lexicographic order over entity sequences. With a
/// `cap`, the first `cap` paths of that order are kept.
pub fn retrieve_paths(
    g: &KnowledgeGraph,
    topic_entities: &[EntityId],
    plan: &RelationPath,
    cap: Option<usize>,
) -> Result<RetrievalResult, RetrievalError> {
    let started = Instant::now();
    let seeds = seed_entities(g, topic_entities)?;
    for &r in plan.relations() {
        g.check_relation(r)?;
    }
    let cap = cap.unwrap_or(usize::MAX);
    let depth = plan.len();

    // arena of (entity, parent index); level k occupies nodes[level_start..]
    const ROOT: u32 = u32::MAX;
    let mut nodes: Vec<(EntityId, u32)> = seeds.iter().map(|&e| (e, ROOT)).collect();
    let mut level = 0..nodes.len();
    let mut expanded = 0usize;
    let mut truncated = false;

    if depth == 0 && nodes.len() > cap {
        nodes.truncate(cap);
        level = 0..cap;
        truncated = true;
    }

    for (step, &relation) in plan.relations().iter().enumerate() {
        let last = step + 1 == depth;
        let next_start = nodes.len();
        'frontier: for idx in level.clone() {
            expanded += 1;
            let (entity, _) = nodes[idx];
            for &t in g.neighbors_unchecked(entity, relation) {
                if last && nodes.len() - next_start == cap {
                    truncated = true;
                    break 'frontier;
                }
                nodes.push((t, idx as u32));
            }
        }
        level = next_start..nodes.len();
    }

    expanded += level.len();
    let paths = level
        .map(|leaf| {
            let mut entities = Vec::with_capacity(depth + 1);
            let mut cursor = leaf as u32;
            while cursor != ROOT {
                let (e, parent) = nodes[cursor as usize];
                entities.push(e);
                cursor = parent;
            }
            entities.reverse();
            ReasoningPath::new(entities, plan.relations().to_vec()).expect("depth matches plan")
        })
        .collect();

    Ok(RetrievalResult {
        plan: plan.clone(),
        paths,
        truncated,
        elapsed: started.elapsed(),
        expanded_nodes: expanded,
    })
}

/// One [`RetrievalResult`] per plan, in plan order.
pub fn retrieve_for_plans(
    g: &KnowledgeGraph,
    topic_entities: &[EntityId],
    plans: &[RelationPath],
    cap: Option<usize>,
) -> Result<Vec<RetrievalResult>, RetrievalError> {
    plans
        .iter()
        .map(|z| retrieve_paths(g, topic_entities, z, cap))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RetrievalTotals {
    pub paths: usize,
    pub expanded_nodes: usize,
    pub elapsed: Duration,
    pub truncated_plans: usize,
}

pub fn totals(results: &[RetrievalResult]) -> RetrievalTotals {
    results.iter().fold(RetrievalTotals::default(), |acc, r| RetrievalTotals {
        paths: acc.paths + r.paths.len(),
        expanded_nodes: acc.expanded_nodes + r.expanded_nodes,
        elapsed: acc.elapsed + r.elapsed,
        truncated_plans: acc.truncated_plans + usize::from(r.truncated),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::RelationId;

    fn toy() -> KnowledgeGraph {
        KnowledgeGraph::from_triples([
            ("Alice", "marry_to", "Bob"),
            ("Bob", "father_of", "Charlie"),
        ])
    }

    fn plan(g: &KnowledgeGraph, names: &[&str]) -> RelationPath {
        RelationPath(names.iter().map(|n| g.relation(n).unwrap()).collect())
    }

    #[test]
    fn grounds_the_example_plan() {
        let g = toy();
        let alice = g.entity("Alice").unwrap();
        let res = retrieve_paths(&g, &[alice], &plan(&g, &["marry_to", "father_of"]), None).unwrap();
        assert_eq!(res.paths.len(), 1);
        let text = crate::kg::serialize_reasoning_path(&res.paths[0], g.vocab()).unwrap();
        assert_eq!(text, "Alice -> marry_to -> Bob -> father_of -> Charlie");
        assert!(!res.truncated);
        assert_eq!(res.expanded_nodes, 3);
    }

    #[test]
    fn empty_plan_yields_topic_entities() {
        let g = toy();
        let a = g.entity("Alice").unwrap();
        let b = g.entity("Bob").unwrap();
        let res = retrieve_paths(&g, &[b, a, b], &RelationPath::empty(), None).unwrap();
        let starts: Vec<_> = res.paths.iter().map(|p| p.start()).collect();
        assert_eq!(starts, vec![a, b]);
        assert!(res.paths.iter().all(|p| p.is_empty()));
    }

    #[test]
    fn errors() {
        let g = toy();
        assert!(matches!(
            retrieve_paths(&g, &[], &RelationPath::empty(), None),
            Err(RetrievalError::NoTopicEntities)
        ));
        assert!(matches!(
            retrieve_paths(&g, &[EntityId(42)], &RelationPath::empty(), None),
            Err(RetrievalError::Kg(KgError::UnknownEntityId(42)))
        ));
        assert!(matches!(
            retrieve_paths(&g, &[EntityId(0)], &RelationPath(vec![RelationId(9)]), None),
            Err(RetrievalError::Kg(KgError::UnknownRelationId(9)))
        ));
    }

    #[test]
    fn cap_keeps_discovery_prefix() {
        let g = KnowledgeGraph::from_triples([
            ("a", "r", "x1"),
            ("a", "r", "x2"),
            ("a", "r", "x3"),
            ("x1", "s", "y"),
            ("x2", "s", "y"),
            ("x3", "s", "y"),
        ]);
        let a = g.entity("a").unwrap();
        let z = plan(&g, &["r", "s"]);
        let full = retrieve_paths(&g, &[a], &z, None).unwrap();
        assert_eq!(full.paths.len(), 3);
        let capped = retrieve_paths(&g, &[a], &z, Some(2)).unwrap();
        assert!(capped.truncated);
        assert_eq!(capped.paths, full.paths[..2]);
        let exact = retrieve_paths(&g, &[a], &z, Some(3)).unwrap();
        assert!(!exact.truncated);
        assert_eq!(exact.paths, full.paths);
        let zero = retrieve_paths(&g, &[a], &RelationPath::empty(), Some(0)).unwrap();
        assert!(zero.truncated && zero.paths.is_empty());
    }

    #[test]
    fn cycles_are_allowed() {
        let g = KnowledgeGraph::from_triples([("a", "r", "b"), ("b", "r", "a")]);
        let a = g.entity("a").unwrap();
        let z = plan(&g, &["r", "r", "r"]);
        let res = retrieve_paths(&g, &[a], &z, None).unwrap();
        assert_eq!(res.paths.len(), 1);
        assert_eq!(res.paths[0].entities(), &[a, EntityId(1), a, EntityId(1)]);
    }

    #[test]
    fn plan_lists() {
        let g = toy();
        let a = g.entity("Alice").unwrap();
        let z = plan(&g, &["marry_to", "father_of"]);
        let res = retrieve_for_plans(&g, &[a], &[z.clone(), z], None).unwrap();
        assert_eq!(res.len(), 2);
        assert_eq!(res[0].paths, res[1].paths);
        assert!(retrieve_for_plans(&g, &[a], &[], None).unwrap().is_empty());
        assert_eq!(totals(&res).paths, 2);
    }
}
