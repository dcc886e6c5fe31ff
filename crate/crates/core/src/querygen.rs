//! Preference-bundle sampling and query text rendering.
//!
//! Day count, budget, orientation and cuisine are drawn uniformly. The number
//! of restaurant and hotel qualities is 1, 2 or 3 with weights 0.6/0.3/0.1,
//! members drawn without replacement. Counting every selection, a query
//! carries between 6 and 10 preferences.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::vocab::{Budget, Cuisine, HotelQuality, Orientation, Preference, RestaurantQuality};
use crate::dataset::Category;

pub const DAY_CHOICES: [u8; 3] = [2, 3, 4];
pub const PREF_COUNT_WEIGHTS: [f64; 3] = [0.6, 0.3, 0.1];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PreferenceQuery {
    pub id: String,
    pub days: u8,
    pub budget: Budget,
    pub orientation: Orientation,
    /// Sorted, duplicate-free.
    pub restaurant_prefs: Vec<RestaurantQuality>,
    pub cuisine: Cuisine,
    /// Sorted, duplicate-free.
    pub hotel_prefs: Vec<HotelQuality>,
    pub seed: u64,
}

impl PreferenceQuery {
    /// Days, budget, orientation and cuisine count once each.
    pub fn preference_count(&self) -> usize {
        4 + self.restaurant_prefs.len() + self.hotel_prefs.len()
    }

    /// Preferences that plan entries of `category` are checked against.
    pub fn preferences_for(&self, category: Category) -> Vec<Preference> {
        let mut out = vec![Preference::Budget(self.budget)];
        match category {
            Category::Hotel => out.extend(self.hotel_prefs.iter().map(|&q| Preference::Hotel(q))),
            Category::Restaurant => {
                out.push(Preference::Cuisine(self.cuisine));
                out.extend(self.restaurant_prefs.iter().map(|&q| Preference::Restaurant(q)));
            }
            Category::Attraction => out.push(Preference::Orientation(self.orientation)),
        }
        out
    }
}

pub fn query_id(seed: u64) -> String {
    format!("q{seed:04}")
}

fn sample_subset<T: Copy + Ord>(rng: &mut ChaCha8Rng, all: &[T], weights: &WeightedIndex<f64>) -> Vec<T> {
    let count = weights.sample(rng) + 1;
    let mut picked: Vec<T> = rand::seq::index::sample(rng, all.len(), count).into_iter().map(|i| all[i]).collect();
    picked.sort();
    picked
}

/// Deterministic query for `seed`.
pub fn sample_query(seed: u64) -> PreferenceQuery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = WeightedIndex::new(PREF_COUNT_WEIGHTS).expect("static weights");
    let days = DAY_CHOICES[rng.random_range(0..DAY_CHOICES.len())];
    let budget = *Budget::ALL.choose(&mut rng).unwrap();
    let orientation = *Orientation::ALL.choose(&mut rng).unwrap();
    let restaurant_prefs = sample_subset(&mut rng, RestaurantQuality::ALL, &weights);
    let cuisine = *Cuisine::ALL.choose(&mut rng).unwrap();
    let hotel_prefs = sample_subset(&mut rng, HotelQuality::ALL, &weights);
    PreferenceQuery { id: query_id(seed), days, budget, orientation, restaurant_prefs, cuisine, hotel_prefs, seed }
}

fn join_phrases(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

/// Renders the query as one English paragraph, each preference named once.
pub fn render_query_text(q: &PreferenceQuery) -> String {
    let article = if q.budget == Budget::Expensive { "an" } else { "a" };
    let restaurant =
        join_phrases(&q.restaurant_prefs.iter().map(|p| format!("good {p}")).collect::<Vec<_>>());
    let hotel_adjectives: Vec<String> =
        q.hotel_prefs.iter().filter(|&&p| p != HotelQuality::Location).map(|p| format!("good {p}")).collect();
    let mut hotel = if hotel_adjectives.is_empty() {
        "a hotel".to_string()
    } else {
        format!("a {} hotel", join_phrases(&hotel_adjectives))
    };
    if q.hotel_prefs.contains(&HotelQuality::Location) {
        hotel.push_str(" in a good location");
    }
    format!(
        "I want to go for a {days}-day trip with {article} {budget} budget. \
         I want to visit some {orientation}-oriented attractions. \
         Please find some {restaurant} restaurants that provide {cuisine} cuisine, \
         I want to stay in {hotel}.",
        days = q.days,
        budget = q.budget,
        orientation = q.orientation,
        cuisine = q.cuisine,
    )
}

/// A query as stored in the query file, with its rendered text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    #[serde(flatten)]
    pub query: PreferenceQuery,
    pub text: String,
}

impl From<PreferenceQuery> for QueryRecord {
    fn from(query: PreferenceQuery) -> Self {
        let text = render_query_text(&query);
        QueryRecord { query, text }
    }
}

/// Records for every seed in `seeds`, in order.
pub fn generate_queries(seeds: std::ops::Range<u64>) -> Vec<QueryRecord> {
    seeds.map(|s| sample_query(s).into()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(sample_query(7), sample_query(7));
        let distinct = (0..50).map(sample_query).map(|q| (q.days, q.budget, q.orientation, q.cuisine, q.restaurant_prefs, q.hotel_prefs));
        let set: std::collections::HashSet<_> = distinct.collect();
        assert!(set.len() > 40);
    }

    #[test]
    fn invariants_hold() {
        for seed in 0..2000 {
            let q = sample_query(seed);
            assert!((6..=10).contains(&q.preference_count()));
            assert!(DAY_CHOICES.contains(&q.days));
            let mut r = q.restaurant_prefs.clone();
            r.dedup();
            assert_eq!(r, q.restaurant_prefs);
            let mut h = q.hotel_prefs.clone();
            h.dedup();
            assert_eq!(h, q.hotel_prefs);
        }
    }

    #[test]
    fn extreme_counts() {
        let mut q = sample_query(0);
        q.restaurant_prefs = vec![RestaurantQuality::Flavor];
        q.hotel_prefs = vec![HotelQuality::Safety];
        assert_eq!(q.preference_count(), 6);
        q.restaurant_prefs = RestaurantQuality::ALL[..3].to_vec();
        q.hotel_prefs = HotelQuality::ALL[..3].to_vec();
        assert_eq!(q.preference_count(), 10);
    }

    #[test]
    fn reference_sentence() {
        let q = PreferenceQuery {
            id: "x".into(),
            days: 2,
            budget: Budget::Moderate,
            orientation: Orientation::History,
            restaurant_prefs: vec![RestaurantQuality::Environment],
            cuisine: Cuisine::French,
            hotel_prefs: vec![HotelQuality::Quality, HotelQuality::Location],
            seed: 0,
        };
        assert_eq!(
            render_query_text(&q),
            "I want to go for a 2-day trip with a moderate budget. I want to visit some history-oriented \
             attractions. Please find some good environment restaurants that provide French cuisine, I want \
             to stay in a good quality hotel in a good location."
        );
    }

    #[test]
    fn query_record_json_flattens() {
        let rec = QueryRecord::from(sample_query(3));
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["seed"], 3);
        assert!(v["text"].as_str().unwrap().starts_with("I want to go for a"));
        let back: QueryRecord = serde_json::from_value(v).unwrap();
        assert_eq!(back, rec);
    }
}
