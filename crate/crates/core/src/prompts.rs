//! Instruction templates for the planning and reasoning LLM calls.
//!
//! Section blocks are separated by one blank line; slot contents are
//! substituted verbatim.

use crate::kg::{serialize_reasoning_path, KgError, ReasoningPath, Vocabulary};

pub const PLANNING_INSTRUCTION: &str =
    "Please generate a valid relation path that can be helpful for answering the following question: ";

pub const REASONING_INSTRUCTION: &str = "Based on the reasoning paths, please answer the given question. Please keep the answer as simple as possible and return all the possible answers as a list.";

pub const EXPLANATION_INSTRUCTION: &str =
    "Based on the reasoning paths, please answer the given question and explain why.";

pub fn planning_prompt(question: &str) -> String {
    format!("{PLANNING_INSTRUCTION}{question}")
}

pub fn reasoning_prompt(question: &str, paths_block: &str) -> String {
    format!("{REASONING_INSTRUCTION}\n\nReasoning Paths:\n{paths_block}\n\nQuestion:\n{question}")
}

pub fn explanation_prompt(question: &str, paths_block: &str, examples_block: &str) -> String {
    format!(
        "{EXPLANATION_INSTRUCTION}\n\nHere are some examples:\n{examples_block}\n\nReasoning Paths:\n{paths_block}\n\nQuestion:\n{question}"
    )
}

/// One serialized path per line; repeated lines are kept once, first
/// occurrence wins.
pub fn paths_block<'a, I>(paths: I, vocab: &Vocabulary) -> Result<String, KgError>
where
    I: IntoIterator<Item = &'a ReasoningPath>,
{
    let mut seen = std::collections::HashSet::new();
    let mut lines = Vec::new();
    for w in paths {
        let line = serialize_reasoning_path(w, vocab)?;
        if seen.insert(line.clone()) {
            lines.push(line);
        }
    }
    Ok(lines.join("\n"))
}
