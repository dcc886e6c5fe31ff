//! Parsing one model turn into a tool call.

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;
use thiserror::Error;

use crate::dataset::vocab::{Budget, Cuisine, HotelQuality, Orientation, RestaurantQuality};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tool {
    AccommodationSearch,
    AttractionSearch,
    RestaurantSearch,
    BusinessClusterSearch,
    Planner,
}

impl Tool {
    pub const ALL: [Tool; 5] =
        [Tool::AccommodationSearch, Tool::AttractionSearch, Tool::RestaurantSearch, Tool::BusinessClusterSearch, Tool::Planner];

    pub fn name(self) -> &'static str {
        match self {
            Tool::AccommodationSearch => "AccommodationSearch",
            Tool::AttractionSearch => "AttractionSearch",
            Tool::RestaurantSearch => "RestaurantSearch",
            Tool::BusinessClusterSearch => "BusinessClusterSearch",
            Tool::Planner => "Planner",
        }
    }

    pub fn is_search(self) -> bool {
        matches!(self, Tool::AccommodationSearch | Tool::AttractionSearch | Tool::RestaurantSearch)
    }
}

/// An argument mapped onto the vocabulary, or kept verbatim when no term matched.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot<T> {
    Value(T),
    Unrecognized(String),
}

impl<T: Copy> Slot<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Slot::Value(v) => Some(*v),
            Slot::Unrecognized(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "tool")]
pub enum ToolArgs {
    AccommodationSearch { budget: Slot<Budget>, preferences: Vec<Slot<HotelQuality>> },
    AttractionSearch { budget: Slot<Budget>, preferences: Vec<Slot<Orientation>> },
    RestaurantSearch { budget: Slot<Budget>, cuisine: Slot<Cuisine>, preferences: Vec<Slot<RestaurantQuality>> },
    BusinessClusterSearch,
    Planner { query: String },
}

impl ToolArgs {
    pub fn tool(&self) -> Tool {
        match self {
            ToolArgs::AccommodationSearch { .. } => Tool::AccommodationSearch,
            ToolArgs::AttractionSearch { .. } => Tool::AttractionSearch,
            ToolArgs::RestaurantSearch { .. } => Tool::RestaurantSearch,
            ToolArgs::BusinessClusterSearch => Tool::BusinessClusterSearch,
            ToolArgs::Planner { .. } => Tool::Planner,
        }
    }

    /// Order-insensitive form used to compare calls.
    pub fn canonical(&self) -> ToolArgs {
        let mut c = self.clone();
        match &mut c {
            ToolArgs::AccommodationSearch { preferences, .. } => preferences.sort(),
            ToolArgs::AttractionSearch { preferences, .. } => preferences.sort(),
            ToolArgs::RestaurantSearch { preferences, .. } => preferences.sort(),
            ToolArgs::Planner { query } => *query = query.split_whitespace().collect::<Vec<_>>().join(" "),
            ToolArgs::BusinessClusterSearch => {}
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolCall {
    pub args: ToolArgs,
    pub raw: String,
}

impl ToolCall {
    pub fn tool(&self) -> Tool {
        self.args.tool()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionParseError {
    #[error("no action found; call exactly one tool such as AccommodationSearch[...]")]
    NoAction,
    #[error("unknown tool {0:?}")]
    UnknownTool(String),
    #[error("unbalanced brackets in {0:?}")]
    MalformedBrackets(String),
    #[error("only one tool call is allowed per action, found {0}")]
    MultipleCalls(usize),
    #[error("{tool} expects {expected}, got {raw:?}")]
    WrongArity { tool: &'static str, expected: &'static str, raw: String },
}

static TOOL_CALL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(AccommodationSearch|AttractionSearch|RestaurantSearch|BusinessClusterSearch|Planner)\s*\[").unwrap()
});
static ANY_CALL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b([A-Z][A-Za-z]+)\s*\[").unwrap());
static ACTION_MARK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^\s*action(\s*\d+)?\s*:").unwrap());

/// Byte offset of the `]` closing the `[` at `open`.
fn matching_bracket(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s[open..].char_indices() {
        match c {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits on commas outside brackets, trimming each piece.
fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    let last = cur.trim();
    if !last.is_empty() || !parts.is_empty() {
        parts.push(last.to_string());
    }
    parts
}

fn strip_quotes(s: &str) -> &str {
    s.trim().trim_matches(|c| c == '"' || c == '\'').trim()
}

/// The vocabulary term whose label occurs in `text` as whole words; the
/// longest label wins.
fn keyword<T: Copy>(text: &str, all: &[T], label: impl Fn(T) -> &'static str) -> Slot<T> {
    let t = strip_quotes(text);
    let lower = format!(" {} ", t.to_lowercase().replace(|c: char| !c.is_alphanumeric(), " "));
    all.iter()
        .copied()
        .filter(|&v| lower.contains(&format!(" {} ", label(v).to_lowercase())))
        .max_by_key(|&v| label(v).len())
        .map_or_else(|| Slot::Unrecognized(t.to_string()), Slot::Value)
}

fn list<T: Copy>(items: &[String], all: &[T], label: impl Fn(T) -> &'static str + Copy) -> Vec<Slot<T>> {
    items
        .iter()
        .flat_map(|item| {
            let inner = item.trim();
            let inner = inner.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(inner);
            split_top_level(inner)
        })
        .filter(|s| !strip_quotes(s).is_empty())
        .map(|s| keyword(&s, all, label))
        .collect()
}

fn parse_args(tool: Tool, inner: &str) -> Result<ToolArgs, ActionParseError> {
    let parts = split_top_level(inner);
    let arity = |expected| ActionParseError::WrongArity { tool: tool.name(), expected, raw: inner.to_string() };
    let budget = |s: &String| keyword(s, Budget::ALL, Budget::label);
    Ok(match tool {
        Tool::BusinessClusterSearch => {
            if !inner.trim().is_empty() {
                return Err(arity("no arguments"));
            }
            ToolArgs::BusinessClusterSearch
        }
        Tool::Planner => {
            if inner.trim().is_empty() {
                return Err(arity("a query"));
            }
            ToolArgs::Planner { query: inner.trim().to_string() }
        }
        Tool::AccommodationSearch | Tool::AttractionSearch => {
            let Some((first, rest)) = parts.split_first() else { return Err(arity("a budget and a preference list")) };
            if tool == Tool::AccommodationSearch {
                ToolArgs::AccommodationSearch { budget: budget(first), preferences: list(rest, HotelQuality::ALL, HotelQuality::label) }
            } else {
                ToolArgs::AttractionSearch { budget: budget(first), preferences: list(rest, Orientation::ALL, Orientation::label) }
            }
        }
        Tool::RestaurantSearch => {
            if parts.len() < 2 {
                return Err(arity("a budget, a cuisine and a preference list"));
            }
            ToolArgs::RestaurantSearch {
                budget: budget(&parts[0]),
                cuisine: keyword(&parts[1], Cuisine::ALL, Cuisine::label),
                preferences: list(&parts[2..], RestaurantQuality::ALL, RestaurantQuality::label),
            }
        }
    })
}

/// Extracts the single tool call in a model turn. Text after an `Action:`
/// marker is preferred when one is present.
pub fn parse_action(model_text: &str) -> Result<ToolCall, ActionParseError> {
    let text = match ACTION_MARK.find_iter(model_text).last() {
        Some(m) => &model_text[m.end()..],
        None => model_text,
    };
    let calls: Vec<_> = TOOL_CALL.captures_iter(text).collect();
    match calls.len() {
        0 => {
            return Err(match ANY_CALL.captures(text) {
                Some(c) => ActionParseError::UnknownTool(c[1].to_string()),
                None => ActionParseError::NoAction,
            })
        }
        1 => {}
        n => return Err(ActionParseError::MultipleCalls(n)),
    }
    let whole = calls[0].get(0).unwrap();
    let name = &calls[0][1];
    let tool = Tool::ALL.into_iter().find(|t| t.name() == name).expect("regex alternatives are tool names");
    let open = whole.end() - 1;
    let close = matching_bracket(text, open).ok_or_else(|| ActionParseError::MalformedBrackets(text[whole.start()..].trim().to_string()))?;
    let raw = text[whole.start()..=close].to_string();
    let args = parse_args(tool, &text[open + 1..close])?;
    Ok(ToolCall { args, raw })
}
