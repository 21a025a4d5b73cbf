use serde::{Deserialize, Serialize};

use super::graph::{KnowledgeGraph, Triple};
use super::vocab::{EntityId, RelationId, Vocabulary};
use super::KgError;

pub const PATH_START: &str = "<PATH>";
pub const PATH_SEP: &str = "<SEP>";
pub const PATH_END: &str = "</PATH>";
pub const HOP_ARROW: &str = " -> ";

/// An ordered relation sequence; the plan a planner emits.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationPath(pub Vec<RelationId>);

impl RelationPath {
    pub fn new(relations: Vec<RelationId>) -> Self {
        RelationPath(relations)
    }

    pub fn empty() -> Self {
        RelationPath(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn relations(&self) -> &[RelationId] {
        &self.0
    }
}

impl From<Vec<RelationId>> for RelationPath {
    fn from(v: Vec<RelationId>) -> Self {
        RelationPath(v)
    }
}

/// A grounded instance `e0 -r1-> e1 ... -rl-> el` of a relation path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReasoningPath {
    entities: Vec<EntityId>,
    relations: Vec<RelationId>,
}

impl ReasoningPath {
    pub fn new(entities: Vec<EntityId>, relations: Vec<RelationId>) -> Result<Self, KgError> {
        if entities.len() != relations.len() + 1 {
            return Err(KgError::MalformedPath {
                entities: entities.len(),
                relations: relations.len(),
            });
        }
        Ok(ReasoningPath {
            entities,
            relations,
        })
    }

    pub fn single(e: EntityId) -> Self {
        ReasoningPath {
            entities: vec![e],
            relations: Vec::new(),
        }
    }

    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn relations(&self) -> &[RelationId] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn start(&self) -> EntityId {
        self.entities[0]
    }

    pub fn terminal(&self) -> EntityId {
        *self.entities.last().unwrap()
    }

    pub fn hops(&self) -> impl Iterator<Item = Triple> + '_ {
        self.relations.iter().enumerate().map(|(i, &r)| Triple {
            subject: self.entities[i],
            relation: r,
            object: self.entities[i + 1],
        })
    }

    /// Every hop is an edge of `g`.
    pub fn is_grounded_in(&self, g: &KnowledgeGraph) -> bool {
        self.hops().all(|t| g.contains(&t))
    }
}

/// `<PATH> r1 <SEP> r2 ... </PATH>`; the empty plan is `<PATH> </PATH>`.
pub fn serialize_plan(z: &RelationPath, vocab: &Vocabulary) -> Result<String, KgError> {
    let mut out = String::from(PATH_START);
    for (i, &r) in z.0.iter().enumerate() {
        let name = vocab
            .relation_name(r)
            .ok_or(KgError::UnknownRelationId(r.0))?;
        out.push(' ');
        if i > 0 {
            out.push_str(PATH_SEP);
            out.push(' ');
        }
        out.push_str(name);
    }
    out.push(' ');
    out.push_str(PATH_END);
    Ok(out)
}

/// Inverse of [`serialize_plan`]. Whitespace around tokens is tolerated;
/// unknown relation names and empty segments are rejected.
pub fn parse_plan(text: &str, vocab: &Vocabulary) -> Result<RelationPath, KgError> {
    let text = text.trim();
    let inner = text
        .strip_prefix(PATH_START)
        .ok_or_else(|| KgError::PlanSyntax(format!("missing {PATH_START}")))?
        .strip_suffix(PATH_END)
        .ok_or_else(|| KgError::PlanSyntax(format!("missing {PATH_END}")))?
        .trim();
    if inner.is_empty() {
        return Ok(RelationPath::empty());
    }
    if inner.contains(PATH_START) || inner.contains(PATH_END) {
        return Err(KgError::PlanSyntax("nested path sentinel".into()));
    }
    inner
        .split(PATH_SEP)
        .map(|segment| {
            let name = segment.trim();
            if name.is_empty() {
                return Err(KgError::PlanSyntax("empty relation segment".into()));
            }
            vocab
                .relation_id(name)
                .ok_or_else(|| KgError::UnknownRelationName(name.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(RelationPath)
}

/// `e0 -> r1 -> e1 -> ... -> rl -> el`.
pub fn serialize_reasoning_path(w: &ReasoningPath, vocab: &Vocabulary) -> Result<String, KgError> {
    let mut out = String::new();
    let first = w.entities[0];
    out.push_str(
        vocab
            .entity_name(first)
            .ok_or(KgError::UnknownEntityId(first.0))?,
    );
    for (r, e) in w.relations.iter().zip(&w.entities[1..]) {
        out.push_str(HOP_ARROW);
        out.push_str(
            vocab
                .relation_name(*r)
                .ok_or(KgError::UnknownRelationId(r.0))?,
        );
        out.push_str(HOP_ARROW);
        out.push_str(
            vocab
                .entity_name(*e)
                .ok_or(KgError::UnknownEntityId(e.0))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        let g = KnowledgeGraph::from_triples([
            ("Alice", "marry_to", "Bob"),
            ("Bob", "father_of", "Charlie"),
        ]);
        g.vocab().clone()
    }

    #[test]
    fn plan_format() {
        let v = vocab();
        let z = RelationPath(vec![RelationId(0), RelationId(1)]);
        let text = serialize_plan(&z, &v).unwrap();
        assert_eq!(text, "<PATH> marry_to <SEP> father_of </PATH>");
        assert_eq!(parse_plan(&text, &v).unwrap(), z);
        assert_eq!(serialize_plan(&RelationPath::empty(), &v).unwrap(), "<PATH> </PATH>");
        assert_eq!(parse_plan("<PATH> </PATH>", &v).unwrap(), RelationPath::empty());
        assert_eq!(
            serialize_plan(&RelationPath(vec![RelationId(1)]), &v).unwrap(),
            "<PATH> father_of </PATH>"
        );
    }

    #[test]
    fn parse_rejects_bad_input() {
        let v = vocab();
        assert!(matches!(parse_plan("marry_to </PATH>", &v), Err(KgError::PlanSyntax(_))));
        assert!(matches!(parse_plan("<PATH> marry_to", &v), Err(KgError::PlanSyntax(_))));
        assert!(matches!(
            parse_plan("<PATH> marry_to <SEP> born_in </PATH>", &v),
            Err(KgError::UnknownRelationName(n)) if n == "born_in"
        ));
        assert!(matches!(
            parse_plan("<PATH> marry_to <SEP> <SEP> father_of </PATH>", &v),
            Err(KgError::PlanSyntax(_))
        ));
        assert!(matches!(parse_plan("<PATH> <SEP> </PATH>", &v), Err(KgError::PlanSyntax(_))));
        assert!(matches!(
            serialize_plan(&RelationPath(vec![RelationId(5)]), &v),
            Err(KgError::UnknownRelationId(5))
        ));
    }

    #[test]
    fn reasoning_path_text() {
        let v = vocab();
        let w = ReasoningPath::new(
            vec![EntityId(0), EntityId(1), EntityId(2)],
            vec![RelationId(0), RelationId(1)],
        )
        .unwrap();
        assert_eq!(
            serialize_reasoning_path(&w, &v).unwrap(),
            "Alice -> marry_to -> Bob -> father_of -> Charlie"
        );
        assert_eq!(
            serialize_reasoning_path(&ReasoningPath::single(EntityId(0)), &v).unwrap(),
            "Alice"
        );
        assert!(ReasoningPath::new(vec![EntityId(0)], vec![RelationId(0)]).is_err());
    }
}
