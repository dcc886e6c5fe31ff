//! Prompt templates and given-information rendering.

use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::clustering::{cluster_summary_text, kmeans_clusters};
use crate::dataset::{Business, BusinessPool, Category};
use crate::plan::PoolMode;
use crate::querygen::{render_query_text, PreferenceQuery};

/// Single-shot planning prompt without a routing request.
pub const NO_ROUTE_TEMPLATE: &str = r#"You are a proficient travel planner. Based on the given information and query, you will generate a travel plan like the following example. Ensure that all recommendations and their addresses are organized in chronological order for each day. Give exactly 4 attraction recommendations for each day. Be considerate, concise and well-structured.

----- Example Starts -----

Query: I am planning a 2-day trip with an expensive budget. I would like to visit some history-oriented attractions. Please recommend Japanese restaurants with a good environment. For accommodation, I am looking for a hotel with good location, good quality, and good service.

Travel Plan:

Day X:

- Accommodation:
  - Name: XXXX
    Address: XXXX, XXXX

- Breakfast:
  - Name: XXXX
    Address: XXXX, XXXX

- Morning Attraction:
  - Name: XXXX
    Address: XXXX, XXXX

- Lunch:
  - Name: XXXX
    Address: XXXX, XXXX

- Afternoon Attraction:
  - Name: XXXX
    Address: XXXX, XXXX;
  - Name: XXXX
    Address: XXXX, XXXX

- Dinner:
  - Name: XXXX
    Address: XXXX, XXXX

- Night Attraction:
  - Name: XXXX

----- Example Ends -----

Given Information: {given_information}

Query: {query}

Travel Plan:"#;

/// Single-shot planning prompt that asks for route optimization.
pub const ROUTE_TEMPLATE: &str = r#"You are a proficient travel planner. Based on the given information and query, you will generate a travel plan like the following example. Ensure that all recommendations and their addresses are organized in chronological order for each day. Give exactly 4 attraction recommendations for each day. Be considerate, concise and well-structured. Please also optimize the routes for the trip. For each day, find attractions that are close to each other for the recommendations.

----- Example Starts -----

Query: I am planning a 2-day trip with an expensive budget. I would like to visit some history-oriented attractions. Please recommend Japanese restaurants with a good environment. For accommodation, I am looking for a hotel with good location, good quality, and good service.

Travel Plan:
Day X:

- Accommodation:
  - Name: XXXX
    Address: XXXX, XXXX

- Breakfast:
  - Name: XXXX
    Address: XXXX, XXXX

- Morning Attraction:
  - Name: XXXX
    Address: XXXX, XXXX

- Lunch:
  - Name: XXXX
    Address: XXXX, XXXX

- Afternoon Attraction:
  - Name: XXXX
    Address: XXXX, XXXX;
  - Name: XXXX
    Address: XXXX, XXXX

- Dinner:
  - Name: XXXX
    Address: XXXX, XXXX

- Night Attraction:
  - Name: XXXX

----- Example Ends -----

Given Information: {given_information}

Query: {query}

Travel Plan:"#;

/// Tool-use scratchpad prompt.
pub const REACT_TEMPLATE: &str = r#"Collect information for a query plan using interleaving 'Thought', 'Action', and 'Observation' steps. Ensure you gather valid information related to transportation, dining, attractions, and accommodation. All information should be written in Notebook, which will then be input into the Planner tool. Note that the nested use of tools is prohibited. Don't include phrases like "Action: ", "Action 5", "Thought 1", or "Thought: "in your response. 'Thought' can reason about the current situation, and 'Action' can have 5 different types:

(1) AccommodationSearch[Budget,Preference]:

Description: Find the accommodation that matches the preference.

Parameters:

Budget: The budget mentioned in the query.

Preference: A list of preferences mentioned in the query.

Example: AccommodationSearch[Moderate Budget,[Good Location, Good Service]] would return the moderate price hotel that has a good or excellent location, as well as a good or excellent service.

(2) AttractionSearch[Budget, Preference]:

Description: Find the attractions that matches the preference.

Parameters:

Budget: The budget mentioned in the query.

Preference: A list of preferences mentioned in the query.

Example: AttractionSearch[Cheap budget,[Nature Oriented]] would return the cheap price and nature - oriented attractions.

(3) RestaurantSearch[Budget, Cuisine, Preference]:

Description: Find the restaurants that matches the preference.

Parameters:

Budget: The budget mentioned in the query.

Cuisine: The cuisine mentioned in the query.

Preference: A list of preferences mentioned in the query.

Example: RestaurantSearch[Expensive budget, Vietnamese, [Good Flavor, Good Value]] would return the expensive restaurants that offer Vietnamese cuisine, with good or excellent flavor and good or excellent value.

(4) BusinessClusterSearch[]:

Description: A tool that finds the number of business clusters given the information that you've collected. The tool will choose what business to be considered and return their spatial clustering information.

Example: BusinessClusterSearch[] would return you a list of business clusters among some attractions and hotels that you've collected. The businesses in the same cluster indicates that they are closer to each other and prefered to be arranged for the same day of the travel.

(5) Planner[Query]

Description: A smart planning tool that crafts detailed plans based on user input and the information stored in Notebook.

Parameters:

Query: The query from user.

Example: Planner[Give me a 3-day trip plan in Philadelphia] would return a detailed 3-day trip plan.

You should use as many as possible steps to collect engough information to input to the Planner tool.

Each action only calls one function once. Do not add any description in the action. Do not start action with "1. ", state the action directly.

Query: {query}{scratchpad}"#;

/// Instruction for turning a free-text plan into the plan document.
pub const EXTRACTION_INSTRUCTION: &str = r#"Extract the travel itinerary and parse the businesses' information into the JSON format as below. Be faithful and concise. Correctly document the right number of the attractions. Only write down the name and address of the businesses. If certain recommendations (like meals or accommodations) are not provided, replace the information with "-" for name and address. If recommendations for a session of attraction is not provided, replace the information as an empty array."#;

/// Example document appended to [`EXTRACTION_INSTRUCTION`].
pub const EXTRACTION_SCHEMA: &str = r#"[
  {
    "accommodation": {"name": "XXXX", "address": "XXXX"},
    "breakfast": {"name": "XXXX", "address": "XXXX"},
    "morning_attractions": [{"name": "XXXX", "address": "XXXX"}],
    "lunch": {"name": "XXXX", "address": "XXXX"},
    "afternoon_attractions": [{"name": "XXXX", "address": "XXXX"}, {"name": "XXXX", "address": "XXXX"}],
    "dinner": {"name": "XXXX", "address": "XXXX"},
    "night_attractions": [{"name": "XXXX", "address": "XXXX"}]
  }
]"#;


pub const DEFAULT_CONTEXT_LIMIT: usize = 2 * 1024 * 1024;

/// The planning regime of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task: u8,
    pub pool_mode: PoolMode,
    pub route_optimization: bool,
    pub tool_use: bool,
}

impl TaskSpec {
    pub fn for_task(task: u8) -> Result<Self, AgentError> {
        let (pool_mode, route_optimization, tool_use) = match task {
            1 => (PoolMode::Full, false, false),
            2 => (PoolMode::Full, true, false),
            3 => (PoolMode::Filtered, true, false),
            4 => (PoolMode::Full, true, true),
            other => return Err(AgentError::UnknownTask(other)),
        };
        Ok(TaskSpec { task, pool_mode, route_optimization, tool_use })
    }

    pub fn template(&self) -> &'static str {
        if self.route_optimization {
            ROUTE_TEMPLATE
        } else {
            NO_ROUTE_TEMPLATE
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptConfig {
    pub context_limit_bytes: usize,
    pub cluster_seed: u64,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig { context_limit_bytes: DEFAULT_CONTEXT_LIMIT, cluster_seed: 0 }
    }
}

fn rating_word(r: u8) -> &'static str {
    match r {
        1 => "bad",
        2 => "poor",
        3 => "average",
        4 => "good",
        _ => "excellent",
    }
}

/// One line describing a business.
pub fn business_line(b: &Business) -> String {
    let mut parts = vec![format!("Name: {}", b.name), format!("Address: {}", b.address)];
    parts.push(format!("Latitude: {:.6}, Longitude: {:.6}", b.location.lat, b.location.lon));
    if let Some(t) = b.price {
        parts.push(format!("Price: {}", "$".repeat(t as usize)));
    }
    parts.push(format!("Stars: {}", b.stars));
    if !b.cuisines.is_empty() {
        parts.push(format!("Cuisine: {}", b.cuisines.join(", ")));
    }
    let ratings: Vec<String> = match b.category {
        Category::Attraction => b
            .attributes
            .entries()
            .into_iter()
            .map(|(name, v, _)| format!("{name} oriented level {v}"))
            .collect(),
        _ => b.attributes.entries().into_iter().map(|(name, v, _)| format!("{name} {}", rating_word(v))).collect(),
    };
    parts.push(format!("Ratings: {}", ratings.join(", ")));
    parts.join("; ")
}

/// Businesses grouped by category, one line each.
pub fn render_businesses<'a>(businesses: impl IntoIterator<Item = &'a Business>) -> String {
    let all: Vec<&Business> = businesses.into_iter().collect();
    let mut out = String::new();
    for (category, title) in [(Category::Hotel, "Hotels"), (Category::Restaurant, "Restaurants"), (Category::Attraction, "Attractions")] {
        let lines: Vec<String> = all.iter().filter(|b| b.category == category).map(|b| business_line(b)).collect();
        if !lines.is_empty() {
            out.push_str(&format!("{title}:\n{}\n", lines.join("\n")));
        }
    }
    out
}

/// Pool listing, followed by a cluster summary of its hotels and attractions
/// when `with_clusters` is set.
pub fn given_information(pool: &BusinessPool, with_clusters: bool, cluster_seed: u64) -> String {
    let mut out = render_businesses(pool.businesses());
    if with_clusters {
        let items: Vec<&Business> =
            pool.of(Category::Hotel).chain(pool.of(Category::Attraction)).collect();
        if !items.is_empty() {
            let clusters = kmeans_clusters(&items, cluster_seed);
            out.push_str(&format!("\nSpatial clusters:\n{}\n", cluster_summary_text(&clusters, &items)));
        }
    }
    out
}

pub fn fill_template(template: &str, given_information: &str, query: &str) -> String {
    template.replace("{given_information}", given_information).replace("{query}", query)
}

fn check_size(prompt: String, limit: usize) -> Result<String, AgentError> {
    if prompt.len() > limit {
        return Err(AgentError::ContextOverflow { bytes: prompt.len(), limit });
    }
    Ok(prompt)
}

/// Single-shot prompt for tasks 1-3. `pool` is the full pool for tasks 1
/// and 2 and the preference-filtered pool for task 3.
pub fn build_task_prompt(spec: &TaskSpec, q: &PreferenceQuery, pool: &BusinessPool, cfg: &PromptConfig) -> Result<String, AgentError> {
    if spec.tool_use {
        return Err(AgentError::NotSingleShot(spec.task));
    }
    let info = given_information(pool, spec.pool_mode == PoolMode::Filtered, cfg.cluster_seed);
    check_size(fill_template(spec.template(), &info, &render_query_text(q)), cfg.context_limit_bytes)
}

pub fn react_prompt(query_text: &str, scratchpad: &str, limit: usize) -> Result<String, AgentError> {
    check_size(REACT_TEMPLATE.replace("{query}", query_text).replace("{scratchpad}", scratchpad), limit)
}

pub fn extraction_prompt(plan_text: &str) -> String {
    format!("{EXTRACTION_INSTRUCTION}\n\n{EXTRACTION_SCHEMA}\n\nTravel Plan:\n{plan_text}")
}
