//! Seeded synthetic graphs and template-generated questions.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Zipf};

use crate::datasets::QAExample;
use crate::kg::{GraphBuilder, KnowledgeGraph, RelationPath};
use crate::retrieval::retrieve_paths;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Small random multigraph: up to `max_entities` entities named `e{i}`,
/// up to `max_relations` relations named `r{j}` and up to `max_triples`
/// raw triples (duplicates possible).
pub fn random_triples<R: Rng>(
    rng: &mut R,
    max_entities: usize,
    max_relations: usize,
    max_triples: usize,
) -> Vec<(String, String, String)> {
    let n_e = rng.random_range(2..=max_entities.max(2));
    let n_r = rng.random_range(1..=max_relations.max(1));
    let n_t = rng.random_range(0..=max_triples);
    (0..n_t)
        .map(|_| {
            (
                format!("e{}", rng.random_range(0..n_e)),
                format!("r{}", rng.random_range(0..n_r)),
                format!("e{}", rng.random_range(0..n_e)),
            )
        })
        .collect()
}

pub fn graph_from_owned(triples: &[(String, String, String)]) -> KnowledgeGraph {
    KnowledgeGraph::from_triples(triples.iter().map(|(s, r, o)| (s.as_str(), r.as_str(), o.as_str())))
}

#[derive(Debug, Clone, Copy)]
pub struct ZipfGraphConfig {
    pub triples: usize,
    pub entities: usize,
    pub relations: usize,
    /// Zipf exponent of the relation-frequency distribution.
    pub exponent: f64,
}

impl Default for ZipfGraphConfig {
    fn default() -> Self {
        ZipfGraphConfig {
            triples: 1_000_000,
            entities: 100_000,
            relations: 200,
            exponent: 1.1,
        }
    }
}

/// Emits `cfg.triples` raw triples with uniform endpoints and Zipf-ranked
/// relations.
pub fn zipf_triples(cfg: &ZipfGraphConfig, seed: u64, mut emit: impl FnMut(&str, &str, &str)) {
    let mut rng = rng(seed);
    let zipf = Zipf::new(cfg.relations as f64, cfg.exponent).expect("valid zipf parameters");
    let entity_names: Vec<String> = (0..cfg.entities).map(|i| format!("m.{i:x}")).collect();
    let relation_names: Vec<String> = (0..cfg.relations).map(|i| format!("rel.{i}")).collect();
    for _ in 0..cfg.triples {
        let s = rng.random_range(0..cfg.entities);
        let o = rng.random_range(0..cfg.entities);
        let r = zipf.sample(&mut rng) as usize - 1;
        emit(&entity_names[s], &relation_names[r], &entity_names[o]);
    }
}

pub fn zipf_graph(cfg: &ZipfGraphConfig, seed: u64) -> KnowledgeGraph {
    let mut builder = GraphBuilder::new();
    zipf_triples(cfg, seed, |s, r, o| {
        builder.add(s, r, o);
    });
    builder.build()
}

/// A question pattern (with `{}` marking the topic entity) and the relation
/// path that answers it.
#[derive(Debug, Clone)]
pub struct QuestionTemplate {
    pub pattern: &'static str,
    pub relations: &'static [&'static str],
}

pub const MOVIE_RELATIONS: [&str; 9] = [
    "directed_by",
    "written_by",
    "starred_actors",
    "release_year",
    "in_language",
    "has_tags",
    "has_genre",
    "has_imdb_votes",
    "has_imdb_rating",
];

pub const MOVIE_TEMPLATES: &[QuestionTemplate] = &[
    QuestionTemplate { pattern: "who directed {}", relations: &["directed_by"] },
    QuestionTemplate { pattern: "which actors appear in {}", relations: &["starred_actors"] },
    QuestionTemplate { pattern: "what language is {} spoken in", relations: &["in_language"] },
    QuestionTemplate { pattern: "what genre describes {}", relations: &["has_genre"] },
    QuestionTemplate { pattern: "which writers collaborated with the director of {}", relations: &["directed_by", "written_by"] },
    QuestionTemplate { pattern: "what year saw releases featuring stars of {}", relations: &["starred_actors", "release_year"] },
    QuestionTemplate { pattern: "which tags label films penned by writers of {}", relations: &["written_by", "has_tags"] },
    QuestionTemplate { pattern: "what ratings got movies by directors sharing genre with {}", relations: &["has_genre", "directed_by", "has_imdb_rating"] },
];

#[derive(Debug, Clone)]
pub struct TemplateWorld {
    pub graph: KnowledgeGraph,
    pub examples: Vec<QAExample>,
    /// Template index each example was generated from.
    pub template_of: Vec<usize>,
}

/// Random movie-style graph over [`MOVIE_RELATIONS`] plus `n_questions`
/// questions instantiated from [`MOVIE_TEMPLATES`], each with at least one
/// answer reachable along its template path.
pub fn template_world(n_entities: usize, n_questions: usize, seed: u64) -> TemplateWorld {
    let mut rng = rng(seed);
    let mut builder = GraphBuilder::new();
    let names: Vec<String> = (0..n_entities).map(|i| format!("ent{i}")).collect();
    for s in &names {
        for rel in MOVIE_RELATIONS {
            if rng.random_bool(0.35) {
                for _ in 0..rng.random_range(1..=2) {
                    let o = names.choose(&mut rng).unwrap();
                    builder.add(s, rel, o);
                }
            }
        }
    }
    let graph = builder.build();

    let mut examples = Vec::with_capacity(n_questions);
    let mut template_of = Vec::with_capacity(n_questions);
    while examples.len() < n_questions {
        let t = rng.random_range(0..MOVIE_TEMPLATES.len());
        let template = &MOVIE_TEMPLATES[t];
        let topic = graph.entity(names.choose(&mut rng).unwrap()).unwrap();
        let plan = RelationPath(
            template
                .relations
                .iter()
                .map(|r| graph.relation(r).unwrap())
                .collect(),
        );
        let res = retrieve_paths(&graph, &[topic], &plan, None).unwrap();
        let mut answers: Vec<_> = res.terminals().collect();
        answers.sort_unstable();
        answers.dedup();
        if answers.is_empty() {
            continue;
        }
        let topic_name = graph.entity_name(topic).unwrap().to_string();
        examples.push(QAExample {
            id: format!("syn-{}", examples.len()),
            question: template.pattern.replace("{}", &topic_name),
            topic_entities: vec![topic_name],
            answers: answers
                .iter()
                .map(|&a| graph.entity_name(a).unwrap().to_string())
                .collect(),
        });
        template_of.push(t);
    }
    TemplateWorld {
        graph,
        examples,
        template_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generators_are_deterministic() {
        let a = random_triples(&mut rng(7), 50, 5, 300);
        let b = random_triples(&mut rng(7), 50, 5, 300);
        assert_eq!(a, b);
        let cfg = ZipfGraphConfig {
            triples: 2_000,
            entities: 300,
            relations: 10,
            exponent: 1.2,
        };
        let g = zipf_graph(&cfg, 1);
        let h = zipf_graph(&cfg, 1);
        assert!(g.triples().eq(h.triples()));
        // rank-1 relation dominates
        let r0 = g.relation("rel.0").unwrap();
        let r9 = g.relation("rel.9").unwrap();
        assert!(g.relation_count(r0) > g.relation_count(r9));
    }

    #[test]
    fn template_questions_have_answers() {
        let world = template_world(200, 30, 3);
        assert_eq!(world.examples.len(), 30);
        assert!(world.examples.iter().all(|e| !e.answers.is_empty()));
        assert_eq!(world.graph.stats().relations, MOVIE_RELATIONS.len());
    }
}
