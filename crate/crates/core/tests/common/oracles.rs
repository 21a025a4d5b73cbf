//! Brute-force reference implementations. These work on raw id triples and
//! never call into the graph index, retrieval or mining code they check.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use kgreason_core::kg::{KnowledgeGraph, RelationId};
use kgreason_core::planning::PlannerModel;

pub type RawTriple = (u32, u32, u32);

/// Maps named triples to ids through `g`'s vocabulary (duplicates kept).
pub fn raw_ids(g: &KnowledgeGraph, named: &[(String, String, String)]) -> Vec<RawTriple> {
    let v = g.vocab();
    named
        .iter()
        .map(|(s, r, o)| {
            (
                v.entity_id(s).unwrap().0,
                v.relation_id(r).unwrap().0,
                v.entity_id(o).unwrap().0,
            )
        })
        .collect()
}

/// Objects reached from `e` over `r` by scanning every triple.
pub fn scan_neighbors(triples: &[RawTriple], e: u32, r: u32) -> BTreeSet<u32> {
    triples
        .iter()
        .filter(|t| t.0 == e && t.1 == r)
        .map(|t| t.2)
        .collect()
}

/// Every walk of exactly `plan.len()` hops from a topic whose relation
/// sequence equals `plan`, as entity sequences.
pub fn plan_walks(triples: &[RawTriple], topics: &[u32], plan: &[u32]) -> BTreeSet<Vec<u32>> {
    fn extend(triples: &[RawTriple], walk: &mut Vec<u32>, plan: &[u32], out: &mut BTreeSet<Vec<u32>>) {
        if walk.len() == plan.len() + 1 {
            out.insert(walk.clone());
            return;
        }
        let here = *walk.last().unwrap();
        let rel = plan[walk.len() - 1];
        for t in triples {
            if t.0 == here && t.1 == rel {
                walk.push(t.2);
                extend(triples, walk, plan, out);
                walk.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for &e in topics {
        extend(triples, &mut vec![e], plan, &mut out);
    }
    out
}

/// All length-`len` walks from `topics` with no relation constraint, as
/// `(relation sequence, end entity)` pairs.
pub fn all_walk_ends(triples: &[RawTriple], topics: &[u32], len: usize) -> BTreeSet<(Vec<u32>, u32)> {
    let distinct: BTreeSet<RawTriple> = triples.iter().copied().collect();
    let mut frontier: BTreeSet<(Vec<u32>, u32)> = topics.iter().map(|&e| (Vec::new(), e)).collect();
    for _ in 0..len {
        let mut next = BTreeSet::new();
        for (rels, end) in &frontier {
            for t in &distinct {
                if t.0 == *end {
                    let mut r = rels.clone();
                    r.push(t.1);
                    next.insert((r, t.2));
                }
            }
        }
        frontier = next;
    }
    frontier
}

/// Shortest connecting length and the distinct relation sequences of that
/// length ending in an answer, found by growing walk length from zero.
pub fn shortest_sequences(
    triples: &[RawTriple],
    topics: &[u32],
    answers: &[u32],
    max_hops: usize,
) -> Option<(usize, BTreeSet<Vec<u32>>)> {
    for len in 0..=max_hops {
        let seqs: BTreeSet<Vec<u32>> = all_walk_ends(triples, topics, len)
            .into_iter()
            .filter(|(_, end)| answers.contains(end))
            .map(|(rels, _)| rels)
            .collect();
        if !seqs.is_empty() {
            return Some((len, seqs));
        }
    }
    None
}

/// Terminal-entity tally, ranked by count descending then id ascending.
pub fn tally_ranking(terminals: &[u32]) -> Vec<(u32, usize)> {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &t in terminals {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut v: Vec<(u32, usize)> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

/// Scores every plan up to `max_len` relations and returns the top `k` by
/// (score desc, sequence asc). Steps are summed left to right from 0.0.
pub fn exhaustive_top_k<M: PlannerModel>(model: &M, question: &str, max_len: usize, k: usize) -> Vec<(Vec<RelationId>, f64)> {
    let ctx = model.encode(question);
    let n = model.num_relations();
    let mut all: Vec<(Vec<RelationId>, f64)> = Vec::new();
    let mut layer: Vec<(Vec<RelationId>, f64)> = vec![(Vec::new(), 0.0)];
    for depth in 0..=max_len {
        let mut next = Vec::new();
        for (seq, score) in &layer {
            let dist = model.next_step_logprobs(&ctx, seq);
            all.push((seq.clone(), score + dist[n]));
            if depth < max_len {
                for r in 0..n {
                    let mut s = seq.clone();
                    s.push(RelationId(r as u32));
                    next.push((s, score + dist[r]));
                }
            }
        }
        layer = next;
    }
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Number of candidate plans with at most `max_len` relations over `n`.
pub fn candidate_count(n: usize, max_len: usize) -> usize {
    (0..=max_len).map(|l| n.pow(l as u32)).sum()
}
