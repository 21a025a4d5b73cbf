//! Interned knowledge-graph storage and the relation-path / reasoning-path
//! data model.

mod graph;
pub mod io;
mod path;
mod vocab;

pub use graph::{GraphBuilder, GraphStats, KnowledgeGraph, Triple, INVERSE_SUFFIX};
pub use path::{
    parse_plan, serialize_plan, serialize_reasoning_path, ReasoningPath, RelationPath, HOP_ARROW,
    PATH_END, PATH_SEP, PATH_START,
};
pub use vocab::{EntityId, Interner, RelationId, Vocabulary};

#[derive(Debug, thiserror::Error)]
pub enum KgError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown entity id {0}")]
    UnknownEntityId(u32),
    #[error("unknown relation id {0}")]
    UnknownRelationId(u32),
    #[error("unknown entity `{0}`")]
    UnknownEntityName(String),
    #[error("unknown relation `{0}`")]
    UnknownRelationName(String),
    #[error("malformed plan: {0}")]
    PlanSyntax(String),
    #[error("reasoning path needs one more entity than relations (got {entities} and {relations})")]
    MalformedPath { entities: usize, relations: usize },
    #[error("corrupt snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
