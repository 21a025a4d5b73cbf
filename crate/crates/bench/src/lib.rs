//! Seeded inputs shared by the benchmarks.

use kgreason_core::kg::{EntityId, KnowledgeGraph, RelationPath};
use kgreason_core::planning::{fit_count_planner, CountPlanner, PlannerConfig};
use kgreason_core::synthetic::{rng, template_world, TemplateWorld};
use rand::seq::IndexedRandom;
use rand::Rng;

/// `n` (topic, 2-hop plan) queries read off real walks in `g`.
pub fn two_hop_queries(g: &KnowledgeGraph, n: usize, seed: u64) -> Vec<(EntityId, RelationPath)> {
    let mut r = rng(seed);
    let entities = g.stats().entities as u32;
    let mut out = Vec::with_capacity(n);
    while out.len() < n && entities > 0 {
        let start = EntityId(r.random_range(0..entities));
        let first: Vec<_> = g.out_edges(start).collect();
        let Some(&(r1, mid)) = first.choose(&mut r) else { continue };
        let second: Vec<_> = g.out_edges(mid).collect();
        let Some(&(r2, _)) = second.choose(&mut r) else { continue };
        out.push((start, RelationPath(vec![r1, r2])));
    }
    out
}

/// A template world plus a count planner fitted on its questions' own
/// template paths.
pub fn planner_world(entities: usize, questions: usize, seed: u64) -> (TemplateWorld, CountPlanner) {
    let world = template_world(entities, questions, seed);
    let pairs: Vec<_> = world
        .examples
        .iter()
        .zip(&world.template_of)
        .map(|(ex, &t)| {
            let rels = kgreason_core::synthetic::MOVIE_TEMPLATES[t]
                .relations
                .iter()
                .map(|r| world.graph.relation(r).expect("template relation"))
                .collect();
            (ex.question.clone(), RelationPath(rels))
        })
        .collect();
    let planner = fit_count_planner(&pairs, world.graph.vocab(), PlannerConfig::default()).expect("non-empty corpus");
    (world, planner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_usable() {
        let (world, planner) = planner_world(100, 20, 1);
        assert_eq!(world.examples.len(), 20);
        assert!(planner.config().alpha > 0.0);
        let q = two_hop_queries(&world.graph, 10, 2);
        assert_eq!(q.len(), 10);
    }
}
