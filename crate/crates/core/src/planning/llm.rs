use crate::kg::{parse_plan, RelationPath, Vocabulary};
use crate::llm::{generate, GenerationClient, GenerationRequest, LlmError};
use crate::prompts::planning_prompt;

/// Request for `k` plan completions at temperature 0.
pub fn plan_request(question: &str, k: usize) -> GenerationRequest {
    GenerationRequest {
        prompt: planning_prompt(question),
        num_completions: k,
        max_new_tokens: 128,
        temperature: 0.0,
        stop_sequences: Vec::new(),
    }
}

/// Asks `client` for `k` plans. Completions that do not parse as a plan
/// over `vocab` are dropped; duplicates keep their first position.
pub fn llm_generate_plans<C: GenerationClient + ?Sized>(
    client: &C,
    question: &str,
    k: usize,
    vocab: &Vocabulary,
) -> Result<Vec<RelationPath>, LlmError> {
    let completions = generate(client, &plan_request(question, k))?;
    let mut plans: Vec<RelationPath> = Vec::new();
    for text in completions {
        match parse_plan(&text, vocab) {
            Ok(z) if !plans.contains(&z) => plans.push(z),
            Ok(_) => {}
            Err(e) => log::debug!("dropping planner completion {text:?}: {e}"),
        }
    }
    Ok(plans)
}
