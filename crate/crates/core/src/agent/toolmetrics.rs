//! Tool-use metrics over episodes.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::action::{Slot, ToolArgs, ToolCall};
use super::react::{Episode, Outcome};
use crate::metrics::MetricError;
use crate::querygen::PreferenceQuery;

/// Matched expected values, and every given value that matched nothing.
fn list_score<T: Copy + PartialEq>(given: &[Slot<T>], expected: &[T]) -> (usize, usize) {
    let mut used = vec![false; expected.len()];
    let mut correct = 0;
    let mut extraneous = 0;
    for g in given {
        match g.value().and_then(|v| (0..expected.len()).find(|&i| !used[i] && expected[i] == v)) {
            Some(i) => {
                used[i] = true;
                correct += 1;
            }
            None => extraneous += 1,
        }
    }
    (correct, expected.len() + extraneous)
}

fn single<T: Copy + PartialEq>(given: &Slot<T>, expected: T) -> (usize, usize) {
    ((given.value() == Some(expected)) as usize, 1)
}

/// (correct slots, scored slots) for one call. Every expected value is a
/// slot; each extraneous value adds a missed slot. `None` for non-search tools.
pub fn slot_score(call: &ToolCall, q: &PreferenceQuery) -> Option<(usize, usize)> {
    let add = |a: (usize, usize), b: (usize, usize)| (a.0 + b.0, a.1 + b.1);
    Some(match &call.args {
        ToolArgs::AccommodationSearch { budget, preferences } => {
            add(single(budget, q.budget), list_score(preferences, &q.hotel_prefs))
        }
        ToolArgs::AttractionSearch { budget, preferences } => {
            add(single(budget, q.budget), list_score(preferences, &[q.orientation]))
        }
        ToolArgs::RestaurantSearch { budget, cuisine, preferences } => add(
            add(single(budget, q.budget), single(cuisine, q.cuisine)),
            list_score(preferences, &q.restaurant_prefs),
        ),
        ToolArgs::BusinessClusterSearch | ToolArgs::Planner { .. } => return None,
    })
}

/// Slot-level accuracy of search-tool arguments, in percent.
pub fn parameter_accuracy(episodes: &[Episode], queries: &[PreferenceQuery]) -> Result<f64, MetricError> {
    let by_id: HashMap<&str, &PreferenceQuery> = queries.iter().map(|q| (q.id.as_str(), q)).collect();
    let (mut correct, mut total) = (0, 0);
    for ep in episodes {
        let q = by_id
            .get(ep.query_ref.as_str())
            .ok_or_else(|| MetricError::Undefined { metric: "Parameter ACC", reason: format!("no query {}", ep.query_ref) })?;
        for (c, t) in ep.calls().filter_map(|call| slot_score(call, q)) {
            correct += c;
            total += t;
        }
    }
    if total == 0 {
        return Err(MetricError::Undefined { metric: "Parameter ACC", reason: "no search calls".into() });
    }
    Ok(correct as f64 / total as f64 * 100.0)
}

/// Share of episodes that delivered a plan, in percent.
pub fn delivery_rate(episodes: &[Episode]) -> Result<f64, MetricError> {
    if episodes.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    Ok(episodes.iter().filter(|e| e.outcome == Outcome::Delivered).count() as f64 / episodes.len() as f64 * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolUseSummary {
    pub episodes: usize,
    pub delivery_rate: Option<f64>,
    pub parameter_accuracy: Option<f64>,
    /// Outcome shares over all episodes, in percent.
    pub outcome_pct: Vec<(Outcome, f64)>,
    /// Order and argument shares among dead-looped episodes, in percent.
    pub order_share_of_dead_loops: Option<f64>,
    pub argument_share_of_dead_loops: Option<f64>,
}

impl ToolUseSummary {
    pub fn new(episodes: &[Episode], queries: &[PreferenceQuery]) -> Self {
        let n = episodes.len();
        let count = |o: Outcome| episodes.iter().filter(|e| e.outcome == o).count();
        let outcomes = [Outcome::Delivered, Outcome::OrderDeadLoop, Outcome::ArgumentDeadLoop, Outcome::StepLimit, Outcome::FailedTransport];
        let outcome_pct = outcomes.iter().map(|&o| (o, if n == 0 { 0.0 } else { count(o) as f64 / n as f64 * 100.0 })).collect();
        let (order, argument) = (count(Outcome::OrderDeadLoop), count(Outcome::ArgumentDeadLoop));
        let loops = order + argument;
        let share = |k: usize| (loops > 0).then(|| k as f64 / loops as f64 * 100.0);
        ToolUseSummary {
            episodes: n,
            delivery_rate: delivery_rate(episodes).ok(),
            parameter_accuracy: parameter_accuracy(episodes, queries).ok(),
            outcome_pct,
            order_share_of_dead_loops: share(order),
            argument_share_of_dead_loops: share(argument),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::action::parse_action;
    use crate::dataset::vocab::{Budget, HotelQuality};
    use crate::querygen::sample_query;

    fn query() -> PreferenceQuery {
        let mut q = sample_query(0);
        q.budget = Budget::Moderate;
        q.hotel_prefs = vec![HotelQuality::Location, HotelQuality::Service];
        q
    }

    #[test]
    fn full_and_partial_matches() {
        let q = query();
        let full = parse_action("AccommodationSearch[Moderate Budget,[Good Location, Good Service]]").unwrap();
        assert_eq!(slot_score(&full, &q), Some((3, 3)));
        let partial = parse_action("AccommodationSearch[Moderate Budget,[Good Location]]").unwrap();
        assert_eq!(slot_score(&partial, &q), Some((2, 3)));
        let extra = parse_action("AccommodationSearch[cheap,[Good Location, Good Service, Good Safety]]").unwrap();
        assert_eq!(slot_score(&extra, &q), Some((2, 4)));
        assert_eq!(slot_score(&parse_action("BusinessClusterSearch[]").unwrap(), &q), None);
    }
}
