use serde::{Deserialize, Serialize};

use super::vocab::{EntityId, RelationId, Vocabulary};
use super::KgError;

/// Suffix appended to relation names for opt-in inverse edges.
pub const INVERSE_SUFFIX: &str = "_inv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: EntityId,
    pub relation: RelationId,
    pub object: EntityId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub entities: usize,
    pub relations: usize,
    pub triples: usize,
}

/// Accumulates named triples and freezes them into a [`KnowledgeGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    vocab: Vocabulary,
    raw: Vec<(u32, u32, u32)>,
    add_inverse: bool,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Also emit `(object, relation + "_inv", subject)` for every triple.
    pub fn with_inverse_edges(mut self, enabled: bool) -> Self {
        self.add_inverse = enabled;
        self
    }

    pub fn add(&mut self, subject: &str, relation: &str, object: &str) -> Triple {
        let s = self.vocab.intern_entity(subject);
        let r = self.vocab.intern_relation(relation);
        let o = self.vocab.intern_entity(object);
        self.raw.push((s.0, r.0, o.0));
        Triple {
            subject: s,
            relation: r,
            object: o,
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn build(self) -> KnowledgeGraph {
        let GraphBuilder {
            mut vocab,
            mut raw,
            add_inverse,
        } = self;
        if add_inverse {
            let forward = vocab.num_relations();
            let inverse: Vec<u32> = (0..forward as u32)
                .map(|r| {
                    let name = format!(
                        "{}{}",
                        vocab.relation_name(RelationId(r)).unwrap(),
                        INVERSE_SUFFIX
                    );
                    vocab.intern_relation(&name).0
                })
                .collect();
            let n = raw.len();
            raw.reserve(n);
            for i in 0..n {
                let (s, r, o) = raw[i];
                raw.push((o, inverse[r as usize], s));
            }
        }
        KnowledgeGraph::from_sorted_parts(vocab, raw)
    }
}

/// Immutable triple store with a compressed (subject, relation) adjacency index.
///
/// Edges are stored once, sorted by `(subject, relation, object)`; the
/// out-edges of a subject form one contiguous block and the objects reached
/// over a single relation form a sorted sub-slice of that block.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    vocab: Vocabulary,
    offsets: Vec<usize>,
    edge_relations: Vec<RelationId>,
    edge_objects: Vec<EntityId>,
    relation_counts: Vec<usize>,
}

impl KnowledgeGraph {
    /// `raw` need not be sorted or distinct.
    pub(crate) fn from_sorted_parts(vocab: Vocabulary, mut raw: Vec<(u32, u32, u32)>) -> Self {
        raw.sort_unstable();
        raw.dedup();

        let n_entities = vocab.num_entities();
        let mut offsets = vec![0usize; n_entities + 1];
        let mut relation_counts = vec![0usize; vocab.num_relations()];
        for &(s, r, _) in &raw {
            offsets[s as usize + 1] += 1;
            relation_counts[r as usize] += 1;
        }
        for i in 0..n_entities {
            offsets[i + 1] += offsets[i];
        }
        let edge_relations = raw.iter().map(|&(_, r, _)| RelationId(r)).collect();
        let edge_objects = raw.iter().map(|&(_, _, o)| EntityId(o)).collect();
        KnowledgeGraph {
            vocab,
            offsets,
            edge_relations,
            edge_objects,
            relation_counts,
        }
    }

    pub fn from_triples<'a, I>(triples: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let mut builder = GraphBuilder::new();
        for (s, r, o) in triples {
            builder.add(s, r, o);
        }
        builder.build()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            entities: self.vocab.num_entities(),
            relations: self.vocab.num_relations(),
            triples: self.edge_objects.len(),
        }
    }

    pub fn num_triples(&self) -> usize {
        self.edge_objects.len()
    }

    pub fn relation_count(&self, r: RelationId) -> usize {
        self.relation_counts.get(r.index()).copied().unwrap_or(0)
    }

    pub fn check_entity(&self, e: EntityId) -> Result<EntityId, KgError> {
        if e.index() < self.vocab.num_entities() {
            Ok(e)
        } else {
            Err(KgError::UnknownEntityId(e.0))
        }
    }

    pub fn check_relation(&self, r: RelationId) -> Result<RelationId, KgError> {
        if r.index() < self.vocab.num_relations() {
            Ok(r)
        } else {
            Err(KgError::UnknownRelationId(r.0))
        }
    }

    pub fn entity(&self, name: &str) -> Result<EntityId, KgError> {
        self.vocab
            .entity_id(name)
            .ok_or_else(|| KgError::UnknownEntityName(name.to_string()))
    }

    pub fn relation(&self, name: &str) -> Result<RelationId, KgError> {
        self.vocab
            .relation_id(name)
            .ok_or_else(|| KgError::UnknownRelationName(name.to_string()))
    }

    pub fn entity_name(&self, e: EntityId) -> Result<&str, KgError> {
        self.vocab
            .entity_name(e)
            .ok_or(KgError::UnknownEntityId(e.0))
    }

    pub fn relation_name(&self, r: RelationId) -> Result<&str, KgError> {
        self.vocab
            .relation_name(r)
            .ok_or(KgError::UnknownRelationId(r.0))
    }

    /// Objects `t` with `(e, r, t)` in the graph, ascending by id.
    pub fn neighbors(&self, e: EntityId, r: RelationId) -> Result<&[EntityId], KgError> {
        self.check_entity(e)?;
        self.check_relation(r)?;
        Ok(self.neighbors_unchecked(e, r))
    }

    /// Like [`neighbors`](Self::neighbors) for ids already known to resolve.
    #[inline]
    pub fn neighbors_unchecked(&self, e: EntityId, r: RelationId) -> &[EntityId] {
        let (lo, hi) = (self.offsets[e.index()], self.offsets[e.index() + 1]);
        let rels = &self.edge_relations[lo..hi];
        let start = rels.partition_point(|&x| x < r);
        let end = start + rels[start..].partition_point(|&x| x == r);
        &self.edge_objects[lo + start..lo + end]
    }

    /// All out-edges of `e` as `(relation, object)`, sorted.
    pub fn out_edges(&self, e: EntityId) -> impl Iterator<Item = (RelationId, EntityId)> + '_ {
        let (lo, hi) = match self.offsets.get(e.index() + 1) {
            Some(&hi) => (self.offsets[e.index()], hi),
            None => (0, 0),
        };
        self.edge_relations[lo..hi]
            .iter()
            .copied()
            .zip(self.edge_objects[lo..hi].iter().copied())
    }

    pub fn out_degree(&self, e: EntityId) -> usize {
        match self.offsets.get(e.index() + 1) {
            Some(&hi) => hi - self.offsets[e.index()],
            None => 0,
        }
    }

    pub fn contains(&self, t: &Triple) -> bool {
        t.subject.index() < self.vocab.num_entities()
            && self
                .neighbors_unchecked(t.subject, t.relation)
                .binary_search(&t.object)
                .is_ok()
    }

    /// Distinct triples in `(subject, relation, object)` order.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        (0..self.vocab.num_entities()).flat_map(move |s| {
            let subject = EntityId(s as u32);
            self.out_edges(subject)
                .map(move |(relation, object)| Triple {
                    subject,
                    relation,
                    object,
                })
        })
    }
}
