//! Knowledge-graph question answering by planning relation paths,
//! grounding them with constrained breadth-first search and reasoning over
//! the retrieved paths.
//!
//! - [`kg`]: interned triple store, relation/reasoning paths and their text forms
//! - [`retrieval`]: plan grounding
//! - [`mining`]: shortest relation-path supervision
//! - [`planning`]: planner contract, count planner, beam search, planning loss
//! - [`reasoning`]: answer extraction and reasoning objectives
//! - [`datasets`]: QA ingestion and instruction datasets
//! - [`evaluation`]: Hits@1 / F1 and breakdown tables
//! - [`llm`]: text-generation client contract, HTTP client and mock

pub mod datasets;
pub mod evaluation;
pub mod kg;
pub mod llm;
pub mod mining;
pub mod planning;
pub mod prompts;
pub mod reasoning;
pub mod retrieval;
pub mod synthetic;
pub mod text;

pub use datasets::{InstructionRecord, QAExample, RecordKind};
pub use evaluation::EvalReport;
pub use kg::{EntityId, GraphStats, KgError, KnowledgeGraph, ReasoningPath, RelationId, RelationPath, Vocabulary};
pub use mining::{mine_shortest_relation_paths, MinedPlans};
pub use planning::{BeamConfig, CountPlanner, PlannerModel};
pub use reasoning::{AnswerSet, AnswerSource};
pub use retrieval::{retrieve_for_plans, retrieve_paths, RetrievalResult};
