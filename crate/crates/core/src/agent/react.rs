//! The thought/action/observation loop and dead-loop detection.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::sync::LazyLock;

use regex::Regex;

use super::action::{parse_action, Tool, ToolArgs, ToolCall};
use super::client::{ChatClient, ChatConfig};
use super::prompts::{react_prompt, DEFAULT_CONTEXT_LIMIT};
use super::tools::{dispatch_tool, Notebook, ToolEnv};
use super::{converse, AgentError, Exchange};
use crate::dataset::{BusinessPool, FilterConfig};
use crate::querygen::{render_query_text, PreferenceQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeadLoopRule {
    /// Identical consecutive calls that make an argument dead loop.
    pub argument_repeats: usize,
    /// Longest cycle of distinct calls checked for an order dead loop.
    pub max_cycle: usize,
    /// Full repetitions of a cycle that make an order dead loop.
    pub cycle_periods: usize,
}

impl Default for DeadLoopRule {
    fn default() -> Self {
        DeadLoopRule { argument_repeats: 3, max_cycle: 4, cycle_periods: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeLimits {
    pub max_steps: usize,
    pub dead_loop: DeadLoopRule,
    pub context_limit_bytes: usize,
    pub filter: FilterConfig,
    pub cluster_seed: u64,
}

impl Default for EpisodeLimits {
    fn default() -> Self {
        EpisodeLimits {
            max_steps: 30,
            dead_loop: DeadLoopRule::default(),
            context_limit_bytes: DEFAULT_CONTEXT_LIMIT,
            filter: FilterConfig::default(),
            cluster_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Delivered,
    OrderDeadLoop,
    ArgumentDeadLoop,
    StepLimit,
    FailedTransport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeadLoop {
    Order,
    Argument,
}

/// What dead-loop detection compares: a canonical call, or the raw text of
/// an action that failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKey {
    Call(ToolArgs),
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub index: usize,
    pub thought: String,
    pub action: String,
    pub call: Option<ToolCall>,
    pub observation: String,
}

impl Step {
    pub fn key(&self) -> ActionKey {
        match &self.call {
            Some(c) => ActionKey::Call(c.args.canonical()),
            None => ActionKey::Invalid(self.action.split_whitespace().collect::<Vec<_>>().join(" ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub query_ref: String,
    pub query_text: String,
    pub steps: Vec<Step>,
    pub notebook: Notebook,
    pub exchanges: Vec<Exchange>,
    pub outcome: Outcome,
    pub plan: Option<Value>,
    pub error: Option<String>,
}

impl Episode {
    pub fn keys(&self) -> Vec<ActionKey> {
        self.steps.iter().map(Step::key).collect()
    }

    pub fn calls(&self) -> impl Iterator<Item = &ToolCall> {
        self.steps.iter().filter_map(|s| s.call.as_ref())
    }
}

fn tail_dead_loop(keys: &[ActionKey], rule: &DeadLoopRule) -> Option<DeadLoop> {
    let r = rule.argument_repeats;
    if r >= 1 && keys.len() >= r && keys[keys.len() - r..].iter().all(|k| *k == keys[keys.len() - 1]) {
        return Some(DeadLoop::Argument);
    }
    for len in 2..=rule.max_cycle {
        let span = len * rule.cycle_periods;
        if rule.cycle_periods == 0 || keys.len() < span {
            continue;
        }
        let tail = &keys[keys.len() - span..];
        let cycle = &tail[..len];
        let distinct = cycle.iter().enumerate().all(|(i, k)| !cycle[..i].contains(k));
        if distinct && tail.chunks(len).all(|c| c == cycle) {
            return Some(DeadLoop::Order);
        }
    }
    None
}

/// The first dead loop in a sequence of actions, if any. An argument loop
/// wins when both kinds complete on the same step.
pub fn detect_dead_loop(keys: &[ActionKey], rule: &DeadLoopRule) -> Option<DeadLoop> {
    (1..=keys.len()).find_map(|end| tail_dead_loop(&keys[..end], rule))
}

static THOUGHT_MARK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^\s*thought(\s*\d+)?\s*:\s*").unwrap());
static ACTION_MARK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^\s*action(\s*\d+)?\s*:").unwrap());

fn split_turn(text: &str, call: Option<&ToolCall>) -> (String, String) {
    let (thought, action) = match ACTION_MARK.find_iter(text).last() {
        Some(m) => (&text[..m.start()], text[m.end()..].trim().to_string()),
        None => match call {
            Some(c) => (text.find(&c.raw).map_or(text, |i| &text[..i]), c.raw.clone()),
            None => (text, text.trim().to_string()),
        },
    };
    let thought = THOUGHT_MARK.replace(thought.trim(), "").trim().to_string();
    let action = call.map_or(action, |c| c.raw.clone());
    (thought, action)
}

/// Runs one tool-use episode for `q` against `pool`.
pub fn run_react_episode(q: &PreferenceQuery, pool: &BusinessPool, client: &dyn ChatClient, chat: &ChatConfig, limits: &EpisodeLimits) -> Episode {
    let query_text = render_query_text(q);
    let env = ToolEnv { pool, filter: limits.filter, cluster_seed: limits.cluster_seed, client, chat };
    let mut ep = Episode {
        query_ref: q.id.clone(),
        query_text: query_text.clone(),
        steps: Vec::new(),
        notebook: Notebook::default(),
        exchanges: Vec::new(),
        outcome: Outcome::StepLimit,
        plan: None,
        error: None,
    };
    let mut scratchpad = String::new();
    let fail = |ep: &mut Episode, e: AgentError| {
        ep.outcome = Outcome::FailedTransport;
        ep.error = Some(e.to_string());
    };
    for index in 1..=limits.max_steps.max(1) {
        let prompt = match react_prompt(&query_text, &scratchpad, limits.context_limit_bytes) {
            Ok(p) => p,
            Err(e) => {
                fail(&mut ep, e);
                return ep;
            }
        };
        let text = match converse(client, chat, "react", prompt, &mut ep.exchanges) {
            Ok(t) => t,
            Err(e) => {
                fail(&mut ep, e);
                return ep;
            }
        };
        let parsed = parse_action(&text);
        let (thought, action) = split_turn(&text, parsed.as_ref().ok());
        let (call, observation) = match parsed {
            Ok(call) => match dispatch_tool(&call, &env, &mut ep.notebook, &q.id, &mut ep.exchanges) {
                Ok(d) => {
                    if call.tool() == Tool::Planner && d.plan.is_some() {
                        ep.plan = d.plan;
                    }
                    (Some(call), d.observation)
                }
                Err(e) => {
                    ep.steps.push(Step { index, thought, action, call: Some(call), observation: String::new() });
                    fail(&mut ep, e);
                    return ep;
                }
            },
            Err(e) => (None, format!("Error: {e}")),
        };
        scratchpad.push_str(&format!("\nThought {index}: {thought}\nAction {index}: {action}\nObservation {index}: {observation}"));
        ep.steps.push(Step { index, thought, action, call, observation });
        if ep.plan.is_some() {
            ep.outcome = Outcome::Delivered;
            return ep;
        }
        match tail_dead_loop(&ep.keys(), &limits.dead_loop) {
            Some(DeadLoop::Argument) => {
                ep.outcome = Outcome::ArgumentDeadLoop;
                return ep;
            }
            Some(DeadLoop::Order) => {
                ep.outcome = Outcome::OrderDeadLoop;
                return ep;
            }
            None => {}
        }
    }
    ep
}
