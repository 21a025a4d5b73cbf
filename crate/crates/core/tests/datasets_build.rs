mod common;

use std::io::Cursor;

use common::oracles::plan_walks;
use kgreason_core::datasets::{build_planning_dataset, build_reasoning_dataset, load_qa, mine_examples, write_jsonl, QAExample, RecordKind};
use kgreason_core::kg::parse_plan;
use kgreason_core::mining::mine_shortest_relation_paths;
use kgreason_core::prompts::planning_prompt;
use kgreason_core::synthetic::{rng, template_world};
use rand::Rng;
use serde_json::Value;

/// Field extraction through the untyped JSON model only.
fn reference_parse(text: &str) -> Vec<(String, String, Vec<String>, Vec<String>)> {
    let strings = |v: &Value| -> Vec<String> { v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect() };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (
                v["id"].as_str().unwrap().to_string(),
                v["question"].as_str().unwrap().to_string(),
                strings(&v["q_entities"]),
                strings(&v["answers"]),
            )
        })
        .collect()
}

fn random_text<R: Rng>(r: &mut R) -> String {
    const POOL: &[&str] = &["a", "Zoë", "\"quoted\"", "back\\slash", "tab\t", "日本", " ", "m.0x1", "é", "\n"];
    (0..r.random_range(1..6)).map(|_| POOL[r.random_range(0..POOL.len())]).collect()
}

#[test]
fn qa_loader_agrees_with_reference_parser() {
    let mut r = rng(100);
    let mut text = String::new();
    for i in 0..100 {
        let list = |r: &mut rand::rngs::StdRng, lo: usize| -> Vec<String> { (0..r.random_range(lo..4)).map(|_| random_text(r)).collect() };
        let v = serde_json::json!({
            "id": format!("rec-{i}"),
            "question": random_text(&mut r),
            "q_entities": list(&mut r, 1),
            "answers": list(&mut r, 0),
            "extra": i,
        });
        text.push_str(&v.to_string());
        text.push('\n');
        if i % 17 == 0 {
            text.push('\n');
        }
    }
    let loaded = load_qa(Cursor::new(text.as_bytes())).unwrap();
    let reference = reference_parse(&text);
    assert_eq!(loaded.len(), 100);
    for (ex, (id, q, t, a)) in loaded.iter().zip(&reference) {
        assert_eq!((&ex.id, &ex.question, &ex.topic_entities, &ex.answers), (id, q, t, a));
    }
    // writing and reloading is lossless
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &loaded).unwrap();
    assert_eq!(load_qa(Cursor::new(buf)).unwrap(), loaded);
}

#[test]
fn planning_dataset_matches_mined_plans() {
    let world = template_world(150, 60, 12);
    let g = &world.graph;
    let build = build_planning_dataset(&world.examples, g, 3);
    let mut expected = 0;
    let mut cursor = 0;
    for ex in &world.examples {
        let topics: Vec<_> = ex.topic_entities.iter().map(|n| g.entity(n).unwrap()).collect();
        let answers: Vec<_> = ex.answers.iter().map(|n| g.entity(n).unwrap()).collect();
        let Some(mined) = mine_shortest_relation_paths(g, &topics, &answers, 3).unwrap() else {
            assert!(build.skipped.iter().any(|s| s.id == ex.id));
            continue;
        };
        expected += mined.len();
        for plan in mined.plans() {
            let rec = &build.records[cursor];
            cursor += 1;
            assert_eq!(rec.kind, RecordKind::Planning);
            assert_eq!(rec.input, planning_prompt(&ex.question));
            let parsed = parse_plan(&rec.target, g.vocab()).unwrap();
            assert_eq!(&parsed, plan);
            // the target grounds to at least one gold answer
            let raw: Vec<(u32, u32, u32)> = g.triples().map(|t| (t.subject.0, t.relation.0, t.object.0)).collect();
            let t_ids: Vec<u32> = topics.iter().map(|e| e.0).collect();
            let p_ids: Vec<u32> = parsed.relations().iter().map(|r| r.0).collect();
            let ends: Vec<u32> = plan_walks(&raw, &t_ids, &p_ids).into_iter().map(|w| *w.last().unwrap()).collect();
            assert!(answers.iter().any(|a| ends.contains(&a.0)));
        }
    }
    assert_eq!(build.records.len(), expected);
    assert!(expected >= world.examples.len() - build.skipped.len());
}

#[test]
fn builds_are_deterministic_across_thread_counts() {
    let world = template_world(120, 40, 5);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let p = build_planning_dataset(&world.examples, &world.graph, 3);
            let r = build_reasoning_dataset(&world.examples, &world.graph, 3, Some(50));
            let m = mine_examples(&world.examples, &world.graph, 3);
            let mut bytes = Vec::new();
            write_jsonl(&mut bytes, &p.records).unwrap();
            write_jsonl(&mut bytes, &r.records).unwrap();
            write_jsonl(&mut bytes, &m).unwrap();
            bytes
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(4));
}

#[test]
fn reasoning_records_list_grounded_paths_and_answers() {
    let g = kgreason_core::KnowledgeGraph::from_triples([
        ("Alice", "marry_to", "Bob"),
        ("Bob", "father_of", "Charlie"),
    ]);
    let ex = QAExample {
        id: "toy".into(),
        question: "Who is the child of Alice".into(),
        topic_entities: vec!["Alice".into()],
        answers: vec!["Charlie".into()],
    };
    let build = build_reasoning_dataset(&[ex], &g, 4, None);
    assert!(build.skipped.is_empty());
    let rec = &build.records[0];
    assert_eq!(rec.kind, RecordKind::Reasoning);
    assert!(rec.input.contains("Alice -> marry_to -> Bob -> father_of -> Charlie"));
    assert_eq!(rec.target, "Charlie");
}
