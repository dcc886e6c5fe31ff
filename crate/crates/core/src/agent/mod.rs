//! Model-facing harness: task prompts, the tool-use loop, a replay client and
//! tool-use metrics.

pub mod action;
pub mod client;
pub mod prompts;
pub mod react;
pub mod toolmetrics;
pub mod tools;

pub use action::{parse_action, ActionParseError, Slot, Tool, ToolArgs, ToolCall};
pub use client::{complete_with_retry, ChatClient, ChatConfig, ChatMessage, ChatRequest, MockClient, Role, TransportError};
pub use prompts::{build_task_prompt, PromptConfig, TaskSpec};
pub use react::{detect_dead_loop, run_react_episode, ActionKey, DeadLoop, DeadLoopRule, Episode, EpisodeLimits, Outcome, Step};
pub use toolmetrics::{delivery_rate, parameter_accuracy, slot_score, ToolUseSummary};
pub use tools::{dispatch_tool, Notebook, ToolEnv};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::dataset::{BusinessPool, FilterError};
use crate::plan::{parse_itinerary, Itinerary, PlanSource};
use crate::querygen::PreferenceQuery;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("unknown task {0}; tasks are 1 to 4")]
    UnknownTask(u8),
    #[error("task {0} runs as a tool-use episode, not a single prompt")]
    NotSingleShot(u8),
    #[error("prompt is {bytes} bytes, over the {limit}-byte context limit")]
    ContextOverflow { bytes: usize, limit: usize },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("plan extraction failed: {0}")]
    Extraction(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// One request/response pair, kept verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub purpose: String,
    pub request: ChatRequest,
    pub response: Result<String, TransportError>,
}

pub(crate) fn converse(
    client: &dyn ChatClient,
    chat: &ChatConfig,
    purpose: &str,
    prompt: String,
    exchanges: &mut Vec<Exchange>,
) -> Result<String, AgentError> {
    let request = chat.request(prompt);
    let response = complete_with_retry(client, &request);
    exchanges.push(Exchange { purpose: purpose.into(), request, response: response.clone() });
    Ok(response?)
}

/// The outermost `[...]` span of a model response.
pub fn json_array_span(text: &str) -> Option<&str> {
    let start = text.find('[')?;
    let end = text.rfind(']')?;
    (end > start).then(|| &text[start..=end])
}

/// Sends the extraction prompt for `plan_text` and parses the returned document.
pub fn extract_plan(
    client: &dyn ChatClient,
    chat: &ChatConfig,
    plan_text: &str,
    source: PlanSource,
    query_ref: &str,
    exchanges: &mut Vec<Exchange>,
) -> Result<(Value, Itinerary), AgentError> {
    let reply = converse(client, chat, "extraction", prompts::extraction_prompt(plan_text), exchanges)?;
    let span = json_array_span(&reply).ok_or_else(|| AgentError::Extraction("no JSON array in the reply".into()))?;
    let doc: Value = serde_json::from_str(span).map_err(|e| AgentError::Extraction(e.to_string()))?;
    let it = parse_itinerary(&doc, source, query_ref).map_err(|e| AgentError::Extraction(e.to_string()))?;
    Ok((doc, it))
}

/// Result of a single-prompt task run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRun {
    pub task: u8,
    pub query_ref: String,
    pub exchanges: Vec<Exchange>,
    pub plan: Option<Value>,
    pub error: Option<String>,
}

/// Runs task 1, 2 or 3 for one query: planning prompt, then extraction.
/// `pool` must already be filtered for task 3.
pub fn run_single_shot(
    spec: &TaskSpec,
    q: &PreferenceQuery,
    pool: &BusinessPool,
    client: &dyn ChatClient,
    chat: &ChatConfig,
    cfg: &PromptConfig,
) -> Result<TaskRun, AgentError> {
    let source = PlanSource::llm_task(spec.task).ok_or(AgentError::UnknownTask(spec.task))?;
    let prompt = build_task_prompt(spec, q, pool, cfg)?;
    let mut exchanges = Vec::new();
    let outcome = converse(client, chat, "plan", prompt, &mut exchanges)
        .and_then(|text| extract_plan(client, chat, &text, source, &q.id, &mut exchanges));
    let (plan, error) = match outcome {
        Ok((doc, _)) => (Some(doc), None),
        Err(e @ (AgentError::Extraction(_) | AgentError::Transport(_))) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(TaskRun { task: spec.task, query_ref: q.id.clone(), exchanges, plan, error })
}
