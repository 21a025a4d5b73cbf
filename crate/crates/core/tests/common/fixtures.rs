//! Shared planner fixtures.
#![allow(dead_code)]

use std::collections::HashMap;

use kgreason_core::kg::{KnowledgeGraph, RelationId, RelationPath, Vocabulary};
use kgreason_core::planning::{fit_count_planner, planning_loss, CountPlanner, PlannerConfig, PlannerModel};
use kgreason_core::synthetic::rng;
use rand::Rng;

pub fn vocab(n: usize) -> Vocabulary {
    let names: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    KnowledgeGraph::from_triples(names.iter().map(|r| ("a", r.as_str(), "b")))
        .vocab()
        .clone()
}

pub fn p(rels: &[u32]) -> RelationPath {
    RelationPath(rels.iter().map(|&r| RelationId(r)).collect())
}

/// Six questions with 1, 2, 3, 4, 5 and 5 equal-length plans: 20 pairs.
pub fn toy_corpus() -> Vec<(String, RelationPath)> {
    let groups: Vec<(&str, Vec<Vec<u32>>)> = vec![
        ("alpha films", vec![vec![0]]),
        ("bravo spouse", vec![vec![1, 0], vec![1, 2]]),
        ("charlie genre", vec![vec![2], vec![3], vec![0]]),
        ("delta writer", vec![vec![0, 1], vec![0, 2], vec![1, 1], vec![3, 0]]),
        ("echo language", vec![vec![2, 2, 1], vec![2, 2, 3], vec![2, 0, 1], vec![1, 1, 1], vec![3, 3, 3]]),
        ("foxtrot votes", vec![vec![3], vec![2], vec![1], vec![0], vec![4]]),
    ];
    groups
        .into_iter()
        .flat_map(|(q, plans)| plans.into_iter().map(move |z| (q.to_string(), p(&z))))
        .collect()
}

pub fn conditional_entropy(corpus: &[(String, RelationPath)]) -> f64 {
    let mut joint: HashMap<(&str, &RelationPath), usize> = HashMap::new();
    let mut marginal: HashMap<&str, usize> = HashMap::new();
    for (q, z) in corpus {
        *joint.entry((q.as_str(), z)).or_default() += 1;
        *marginal.entry(q.as_str()).or_default() += 1;
    }
    let n = corpus.len() as f64;
    -joint
        .iter()
        .map(|(&(q, _), &c)| {
            let p_qz = c as f64 / n;
            let p_z_given_q = c as f64 / marginal[q] as f64;
            p_qz * p_z_given_q.ln()
        })
        .sum::<f64>()
}

pub fn corpus_loss<M: PlannerModel>(m: &M, corpus: &[(String, RelationPath)]) -> f64 {
    let mut by_q: Vec<(&str, Vec<RelationPath>)> = Vec::new();
    for (q, z) in corpus {
        match by_q.iter_mut().find(|(k, _)| *k == q) {
            Some((_, v)) => v.push(z.clone()),
            None => by_q.push((q, vec![z.clone()])),
        }
    }
    by_q.iter()
        .map(|(q, plans)| plans.len() as f64 / corpus.len() as f64 * planning_loss(m, q, plans).unwrap())
        .sum()
}

pub fn random_planner(seed: u64) -> (CountPlanner, Vec<String>, usize) {
    let mut r = rng(seed);
    let n_rel = r.random_range(1..=4);
    let max_len = r.random_range(1..=3);
    let words = ["film", "actor", "spouse", "genre", "year", "city"];
    let questions: Vec<String> = (0..4)
        .map(|_| {
            (0..r.random_range(1..=3))
                .map(|_| words[r.random_range(0..words.len())])
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let pairs: Vec<(String, RelationPath)> = (0..r.random_range(1..=15))
        .map(|_| {
            let q = questions[r.random_range(0..questions.len())].clone();
            let len = r.random_range(0..=max_len);
            (q, RelationPath((0..len).map(|_| RelationId(r.random_range(0..n_rel as u32))).collect()))
        })
        .collect();
    let alpha = [0.05, 0.1, 0.5, 1.0][r.random_range(0..4)];
    let m = fit_count_planner(&pairs, &vocab(n_rel), PlannerConfig { alpha, max_len }).unwrap();
    let mut probes = questions;
    probes.push("unseen words only".into());
    (m, probes, max_len)
}
