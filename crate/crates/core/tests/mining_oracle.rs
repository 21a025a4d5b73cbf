mod common;

use std::collections::BTreeSet;

use common::oracles::{all_walk_ends, raw_ids, shortest_sequences};
use kgreason_core::datasets::QAExample;
use kgreason_core::kg::{EntityId, KnowledgeGraph, RelationPath};
use kgreason_core::mining::{mine_shortest_relation_paths, planning_targets};
use kgreason_core::retrieval::retrieve_paths;
use kgreason_core::synthetic::{graph_from_owned, random_triples, rng};
use rand::Rng;

#[test]
fn mined_plans_equal_oracle_and_are_faithful_and_minimal() {
    let mut r = rng(99);
    let mut connected = 0;
    for _ in 0..100 {
        let named = random_triples(&mut r, 50, 5, 300);
        let g = graph_from_owned(&named);
        let raw = raw_ids(&g, &named);
        let n = g.stats().entities as u32;
        for _ in 0..5 {
            let topics: Vec<u32> = (0..r.random_range(1..=2)).map(|_| r.random_range(0..n)).collect();
            let answers: Vec<u32> = (0..r.random_range(1..=3)).map(|_| r.random_range(0..n)).collect();
            let t_ids: Vec<EntityId> = topics.iter().map(|&e| EntityId(e)).collect();
            let a_ids: Vec<EntityId> = answers.iter().map(|&e| EntityId(e)).collect();
            let mined = mine_shortest_relation_paths(&g, &t_ids, &a_ids, 3).unwrap();
            let oracle = shortest_sequences(&raw, &topics, &answers, 3);
            match (mined, oracle) {
                (None, None) => {}
                (Some(m), Some((len, seqs))) => {
                    connected += 1;
                    assert_eq!(m.hop_count(), len);
                    let got: BTreeSet<Vec<u32>> =
                        m.plans().iter().map(|z| z.relations().iter().map(|x| x.0).collect()).collect();
                    assert_eq!(got, seqs);
                    assert_eq!(m.len(), seqs.len());
                    assert!((m.posterior_weight() * m.len() as f64 - 1.0).abs() < 1e-12);
                    for z in m.plans() {
                        let res = retrieve_paths(&g, &t_ids, z, None).unwrap();
                        assert!(res.terminals().any(|t| a_ids.contains(&t)), "plan not faithful");
                    }
                    // no shorter connecting walk
                    for shorter in 0..len {
                        assert!(all_walk_ends(&raw, &topics, shorter)
                            .iter()
                            .all(|(_, end)| !answers.contains(end)));
                    }
                }
                (m, o) => panic!("mismatch: mined {m:?} oracle {o:?}"),
            }
        }
    }
    assert!(connected > 100, "fixture family too sparse: {connected}");
}

fn diamond() -> KnowledgeGraph {
    KnowledgeGraph::from_triples([
        ("Alice", "r1", "X"),
        ("X", "r3", "Z"),
        ("Alice", "r2", "Y"),
        ("Y", "r4", "Z"),
    ])
}

#[test]
fn planning_targets_for_fixtures() {
    let toy = KnowledgeGraph::from_triples([
        ("Alice", "marry_to", "Bob"),
        ("Bob", "father_of", "Charlie"),
        ("Dana", "likes", "Eve"),
    ]);
    let ex = QAExample {
        id: "q".into(),
        question: "Who is the child of Alice".into(),
        topic_entities: vec!["Alice".into()],
        answers: vec!["Charlie".into()],
    };
    assert_eq!(
        planning_targets(&ex, &toy, 4).unwrap(),
        vec![(
            "Who is the child of Alice".to_string(),
            "<PATH> marry_to <SEP> father_of </PATH>".to_string()
        )]
    );
    let disconnected = QAExample {
        topic_entities: vec!["Dana".into()],
        ..ex.clone()
    };
    assert!(planning_targets(&disconnected, &toy, 4).unwrap().is_empty());

    let g = diamond();
    let ex = QAExample {
        id: "d".into(),
        question: "q".into(),
        topic_entities: vec!["Alice".into()],
        answers: vec!["Z".into()],
    };
    let targets = planning_targets(&ex, &g, 4).unwrap();
    assert_eq!(
        targets.iter().map(|t| t.1.as_str()).collect::<Vec<_>>(),
        vec!["<PATH> r1 <SEP> r3 </PATH>", "<PATH> r2 <SEP> r4 </PATH>"]
    );
    let mined = mine_shortest_relation_paths(&g, &[g.entity("Alice").unwrap()], &[g.entity("Z").unwrap()], 4)
        .unwrap()
        .unwrap();
    assert_eq!(mined.posterior_weight(), 0.5);
    let _: &[RelationPath] = mined.plans();
}
