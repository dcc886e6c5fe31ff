use std::collections::BTreeSet;
use std::sync::LazyLock;

use itinbench::agent::prompts::DEFAULT_CONTEXT_LIMIT;
use itinbench::agent::{
    dispatch_tool, parameter_accuracy, parse_action, run_react_episode, run_single_shot, ChatConfig, EpisodeLimits,
    MockClient, Notebook, PromptConfig, TaskSpec, ToolEnv,
};
use itinbench::dataset::{filter_pool, FilterConfig};
use itinbench::querygen::sample_query;
use itinbench::solvers::greedy_plan;
use itinbench::synth::{synth_pool, SynthConfig};
use itinbench::{BusinessPool, Category, PreferenceQuery};
use proptest::prelude::*;

static POOL: LazyLock<BusinessPool> = LazyLock::new(|| synth_pool(&SynthConfig::default()).unwrap());

fn faithful_searches(q: &PreferenceQuery) -> [String; 3] {
    let hotel = q.hotel_prefs.iter().map(|h| format!("Good {h}")).collect::<Vec<_>>().join(", ");
    let food = q.restaurant_prefs.iter().map(|r| format!("Good {r}")).collect::<Vec<_>>().join(", ");
    [
        format!("AccommodationSearch[{} budget, [{hotel}]]", q.budget),
        format!("RestaurantSearch[{} budget, {} cuisine, [{food}]]", q.budget, q.cuisine),
        format!("AttractionSearch[{} budget, [{} Oriented]]", q.budget, q.orientation),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn faithful_searches_return_the_filtered_pool(seed in any::<u64>()) {
        let q = sample_query(seed);
        let client = MockClient::new(Vec::<String>::new());
        let chat = ChatConfig::default();
        let env = ToolEnv { pool: &POOL, filter: FilterConfig::default(), cluster_seed: 0, client: &client, chat: &chat };
        let filtered = filter_pool(&POOL, &q, &env.filter).unwrap();
        let mut notebook = Notebook::default();
        let mut exchanges = Vec::new();
        for (action, category) in faithful_searches(&q).iter().zip([Category::Hotel, Category::Restaurant, Category::Attraction]) {
            let call = parse_action(action).unwrap();
            dispatch_tool(&call, &env, &mut notebook, &q.id, &mut exchanges).unwrap();
            let got: BTreeSet<&str> = notebook.entries.last().unwrap().business_ids.iter().map(String::as_str).collect();
            let want: BTreeSet<&str> = filtered.of(category).map(|b| b.id.as_str()).collect();
            prop_assert_eq!(got, want);
        }
        prop_assert!(exchanges.is_empty());
    }

    #[test]
    fn partial_searches_stay_inside_the_pool(seed in any::<u64>()) {
        let q = sample_query(seed);
        let client = MockClient::new(Vec::<String>::new());
        let chat = ChatConfig::default();
        let env = ToolEnv { pool: &POOL, filter: FilterConfig::default(), cluster_seed: 0, client: &client, chat: &chat };
        let mut notebook = Notebook::default();
        let call = parse_action(&format!("RestaurantSearch[{} budget, {} cuisine, []]", q.budget, q.cuisine)).unwrap();
        dispatch_tool(&call, &env, &mut notebook, &q.id, &mut Vec::new()).unwrap();
        let strict: BTreeSet<String> = filter_pool(&POOL, &q, &env.filter).unwrap().of(Category::Restaurant).map(|b| b.id.clone()).collect();
        let loose: BTreeSet<String> = notebook.entries[0].business_ids.iter().cloned().collect();
        prop_assert!(strict.is_subset(&loose));
        prop_assert!(loose.iter().all(|id| POOL.get(id).is_some_and(|b| b.category == Category::Restaurant)));
    }
}

#[test]
fn single_shot_tasks_extract_a_plan() {
    let q = sample_query(3);
    let filtered = filter_pool(&POOL, &q, &FilterConfig::default()).unwrap();
    let doc = greedy_plan(&filtered, &q).unwrap().to_document();
    for task in 1..=3 {
        let spec = TaskSpec::for_task(task).unwrap();
        let client = MockClient::new(["Here is your plan.".to_string(), format!("```json\n{doc}\n```")]);
        let cfg = PromptConfig { context_limit_bytes: DEFAULT_CONTEXT_LIMIT, cluster_seed: 0 };
        let run = run_single_shot(&spec, &q, &POOL, &client, &ChatConfig::default(), &cfg).unwrap();
        assert_eq!(run.plan.as_ref(), Some(&doc), "task {task}");
        assert_eq!(run.exchanges.len(), 2);
        let prompt = client.requests()[0].messages.last().unwrap().content.clone();
        assert_eq!(prompt.contains("Spatial clusters:"), task == 3, "task {task}");
    }
    assert!(TaskSpec::for_task(5).is_err());
}

#[test]
fn parameter_accuracy_counts_slots() {
    let q = sample_query(11);
    let script: Vec<String> = faithful_searches(&q).iter().map(|a| format!("Thought: look.\nAction: {a}")).collect();
    let limits = EpisodeLimits { max_steps: 3, ..EpisodeLimits::default() };
    let ep = run_react_episode(&q, &POOL, &MockClient::new(script), &ChatConfig::default(), &limits);
    assert_eq!(ep.steps.len(), 3);
    assert_eq!(parameter_accuracy(&[ep], &[q]).unwrap(), 100.0);
}
