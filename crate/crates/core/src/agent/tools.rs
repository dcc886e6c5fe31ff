//! The five agent tools and the notebook they write to.

use serde::{Deserialize, Serialize};

use super::action::{Slot, ToolArgs, ToolCall};
use super::client::{ChatClient, ChatConfig};
use super::prompts::{fill_template, render_businesses, ROUTE_TEMPLATE};
use super::{converse, extract_plan, AgentError, Exchange};
use crate::clustering::{cluster_summary_text, kmeans_clusters};
use crate::dataset::{satisfies, Business, BusinessPool, Category, FilterConfig, Preference};
use crate::plan::PlanSource;

pub const NO_MATCHES: &str = "No matching businesses were found.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotebookEntry {
    pub description: String,
    pub business_ids: Vec<String>,
    pub content: String,
}

/// Observations gathered by an episode, fed to the planner.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notebook {
    pub entries: Vec<NotebookEntry>,
}

impl Notebook {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Businesses recorded so far, first appearance order, no repeats.
    pub fn businesses<'p>(&self, pool: &'p BusinessPool) -> Vec<&'p Business> {
        let mut out: Vec<&Business> = Vec::new();
        for id in self.entries.iter().flat_map(|e| &e.business_ids) {
            if let Some(b) = pool.get(id) {
                if !out.iter().any(|x| x.id == b.id) {
                    out.push(b);
                }
            }
        }
        out
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|e| format!("{}:\n{}", e.description, e.content.trim_end())).collect::<Vec<_>>().join("\n\n")
    }
}

/// What a tool needs from the episode.
pub struct ToolEnv<'a> {
    pub pool: &'a BusinessPool,
    pub filter: FilterConfig,
    pub cluster_seed: u64,
    pub client: &'a dyn ChatClient,
    pub chat: &'a ChatConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dispatch {
    pub observation: String,
    /// Set when the planner produced a parseable plan document.
    pub plan: Option<serde_json::Value>,
}

fn text(observation: impl Into<String>) -> Dispatch {
    Dispatch { observation: observation.into(), plan: None }
}

fn collect<T: Copy>(slots: &[Slot<T>], wrap: fn(T) -> Preference, out: &mut Vec<Preference>, bad: &mut Vec<String>) {
    for s in slots {
        match s {
            Slot::Value(v) => out.push(wrap(*v)),
            Slot::Unrecognized(raw) => bad.push(raw.clone()),
        }
    }
}

fn search(call: &ToolCall, env: &ToolEnv<'_>, notebook: &mut Notebook) -> Dispatch {
    let mut prefs = Vec::new();
    let mut bad = Vec::new();
    let (category, budget) = match &call.args {
        ToolArgs::AccommodationSearch { budget, preferences } => {
            collect(preferences, Preference::Hotel, &mut prefs, &mut bad);
            (Category::Hotel, budget)
        }
        ToolArgs::AttractionSearch { budget, preferences } => {
            collect(preferences, Preference::Orientation, &mut prefs, &mut bad);
            (Category::Attraction, budget)
        }
        ToolArgs::RestaurantSearch { budget, cuisine, preferences } => {
            collect(std::slice::from_ref(cuisine), Preference::Cuisine, &mut prefs, &mut bad);
            collect(preferences, Preference::Restaurant, &mut prefs, &mut bad);
            (Category::Restaurant, budget)
        }
        _ => unreachable!("search tools only"),
    };
    collect(std::slice::from_ref(budget), Preference::Budget, &mut prefs, &mut bad);
    if !bad.is_empty() {
        return text(format!("Unrecognized argument(s): {}", bad.join("; ")));
    }
    let hits: Vec<&Business> = env
        .pool
        .of(category)
        .filter(|b| prefs.iter().all(|&p| satisfies(b, p, &env.filter).unwrap_or(false)))
        .collect();
    if hits.is_empty() {
        return text(NO_MATCHES);
    }
    let content = render_businesses(hits.iter().copied());
    notebook.entries.push(NotebookEntry {
        description: call.raw.clone(),
        business_ids: hits.iter().map(|b| b.id.clone()).collect(),
        content: content.clone(),
    });
    text(content)
}

fn clusters(env: &ToolEnv<'_>, notebook: &mut Notebook) -> Dispatch {
    let items: Vec<&Business> =
        notebook.businesses(env.pool).into_iter().filter(|b| b.category != Category::Restaurant).collect();
    if items.is_empty() {
        return text("Error: no hotels or attractions have been collected yet.");
    }
    let assignment = kmeans_clusters(&items, env.cluster_seed);
    let summary = cluster_summary_text(&assignment, &items);
    notebook.entries.push(NotebookEntry {
        description: "BusinessClusterSearch[]".into(),
        business_ids: Vec::new(),
        content: summary.clone(),
    });
    text(summary)
}

fn planner(query: &str, env: &ToolEnv<'_>, notebook: &Notebook, query_ref: &str, exchanges: &mut Vec<Exchange>) -> Result<Dispatch, AgentError> {
    if notebook.is_empty() {
        return Ok(text("Error: the notebook is empty; collect information before calling Planner."));
    }
    let prompt = fill_template(ROUTE_TEMPLATE, &notebook.render(), query);
    let plan_text = converse(env.client, env.chat, "planner", prompt, exchanges)?;
    match extract_plan(env.client, env.chat, &plan_text, PlanSource::LlmTask4, query_ref, exchanges) {
        Ok((doc, _)) => Ok(Dispatch { observation: plan_text, plan: Some(doc) }),
        Err(AgentError::Extraction(reason)) => Ok(text(format!("Error: the plan could not be extracted ({reason}).\n{plan_text}"))),
        Err(e) => Err(e),
    }
}

/// Executes one tool call. Tool-level problems come back as observation
/// text; only transport failures are errors.
pub fn dispatch_tool(
    call: &ToolCall,
    env: &ToolEnv<'_>,
    notebook: &mut Notebook,
    query_ref: &str,
    exchanges: &mut Vec<Exchange>,
) -> Result<Dispatch, AgentError> {
    match &call.args {
        ToolArgs::BusinessClusterSearch => Ok(clusters(env, notebook)),
        ToolArgs::Planner { query } => planner(query, env, notebook, query_ref, exchanges),
        _ => Ok(search(call, env, notebook)),
    }
}
