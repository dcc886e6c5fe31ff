//! Synthetic city generator producing raw business and attribute records.
//!
//! The generated city guarantees that every sampled query is feasible: each
//! (budget, orientation), (budget, cuisine) and budget bucket holds enough
//! candidates that meet every quality preference. Locations are drawn around
//! a handful of neighborhood centers so spatial clusters exist.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::dataset::vocab::{Budget, Cuisine, HotelQuality, Orientation, RestaurantQuality};
use crate::dataset::{
    ingest_base, AttributeSource, BusinessPool, CategoryList, DatasetError, IngestConfig, OpenFlag, PriceField, RawBusiness,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub center: (f64, f64),
    /// Half-width in degrees of the box holding neighborhood centers.
    pub extent: f64,
    pub neighborhoods: usize,
    /// Half-width in degrees of a neighborhood.
    pub spread: f64,
    pub attractions_per_bucket: usize,
    pub extra_attractions: usize,
    pub strong_restaurants_per_bucket: usize,
    pub restaurants: usize,
    pub strong_hotels_per_budget: usize,
    pub extra_hotels: usize,
    /// Share of records whose ratings are given as extraction text.
    pub text_share: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 7,
            center: (39.9526, -75.1652),
            extent: 0.06,
            neighborhoods: 8,
            spread: 0.012,
            attractions_per_bucket: 20,
            extra_attractions: 40,
            strong_restaurants_per_bucket: 4,
            restaurants: 600,
            strong_hotels_per_budget: 5,
            extra_hotels: 90,
            text_share: 0.25,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SynthCity {
    pub businesses: Vec<RawBusiness>,
    pub attributes: Vec<AttributeSource>,
}

const STREETS: [&str; 10] =
    ["Market St", "Chestnut St", "Walnut St", "Spruce St", "Pine St", "Arch St", "Race St", "Vine St", "Broad St", "South St"];
const ATTRACTION_WORDS: [(&str, &str); 7] = [
    ("Museum", "Museums"),
    ("Park", "Parks"),
    ("Market Hall", "Local Flavor"),
    ("Zoo", "Zoos"),
    ("Walking Tour", "Tours"),
    ("Historic House", "Landmarks & Historical Buildings"),
    ("Gift Shop", "Souvenir Shops"),
];
const PLACE_WORDS: [&str; 12] =
    ["Liberty", "Delaware", "Schuylkill", "Rittenhouse", "Fairmount", "Penn", "Franklin", "Logan", "Washington", "Society", "Old City", "Fishtown"];

struct Gen {
    rng: ChaCha8Rng,
    cfg: SynthConfig,
    centers: Vec<(f64, f64)>,
    city: SynthCity,
}

impl Gen {
    fn location(&mut self) -> (f64, f64) {
        let (clat, clon) = self.centers[self.rng.random_range(0..self.centers.len())];
        let s = self.cfg.spread;
        (clat + self.rng.random_range(-s..s), clon + self.rng.random_range(-s..s))
    }

    fn tier(&mut self, budget: Budget) -> u8 {
        *budget.tiers().choose(&mut self.rng).unwrap()
    }

    fn price(&mut self, tier: u8) -> PriceField {
        if self.rng.random_bool(0.5) {
            PriceField::Tier(tier as i64)
        } else {
            PriceField::Symbols("$".repeat(tier as usize))
        }
    }

    fn push(&mut self, name: String, categories: Vec<String>, tier: Option<u8>, review_count: u64, ratings: Vec<(&'static str, u8)>, text: String, cuisines: [Option<String>; 2]) {
        let i = self.city.businesses.len();
        let id = format!("syn{i:05}");
        let (lat, lon) = self.location();
        let price = tier.map(|t| self.price(t));
        let address = format!("{} {}", 100 + self.rng.random_range(0..2900), STREETS[i % STREETS.len()]);
        let good_for_meal = cuisines[0].as_ref().map(|_| {
            json!({"breakfast": self.rng.random_bool(0.4), "lunch": self.rng.random_bool(0.7), "dinner": self.rng.random_bool(0.8)})
        });
        let [cuisine_1, cuisine_2] = cuisines;
        self.city.businesses.push(RawBusiness {
            business_id: id.clone(),
            name: Some(name),
            address: Some(address),
            city: Some("Philadelphia".into()),
            latitude: Some(lat),
            longitude: Some(lon),
            stars: Some(self.rng.random_range(2..=10) as f64 / 2.0),
            price,
            review_count: Some(review_count),
            is_open: Some(OpenFlag::Int(1)),
            categories: Some(CategoryList::Joined(categories.join(", "))),
            good_for_meal,
            cuisine_1,
            cuisine_2,
        });
        let source = if self.rng.random_bool(self.cfg.text_share) {
            AttributeSource { business_id: id, extraction: Some(text), values: Map::new() }
        } else {
            let values = ratings.into_iter().map(|(k, v)| (k.to_string(), Value::from(v))).collect();
            AttributeSource { business_id: id, extraction: None, values }
        };
        self.city.attributes.push(source);
    }

    fn attraction(&mut self, tier: Option<u8>, levels: [u8; 6]) {
        let i = self.city.businesses.len();
        let (word, category) = ATTRACTION_WORDS[self.rng.random_range(0..ATTRACTION_WORDS.len())];
        let place = PLACE_WORDS[self.rng.random_range(0..PLACE_WORDS.len())];
        let ratings: Vec<(&str, u8)> = Orientation::ALL.iter().map(|o| o.label()).zip(levels).collect();
        let text = ratings.iter().map(|(o, l)| format!("This place has a {o} oriented level {l}.")).collect::<Vec<_>>().join(" ");
        let categories = vec![category.to_string(), "Active Life".to_string()];
        let reviews = self.rng.random_range(10..3000);
        self.push(format!("{place} {word} {i}"), categories, tier, reviews, ratings, text, [None, None]);
    }

    fn restaurant(&mut self, tier: u8, ratings: [u8; 5], cuisines: [Option<String>; 2], review_count: u64) {
        let i = self.city.businesses.len();
        let place = PLACE_WORDS[self.rng.random_range(0..PLACE_WORDS.len())];
        let label = cuisines[0].clone().or(cuisines[1].clone()).unwrap_or_else(|| "Corner".into());
        let ratings: Vec<(&str, u8)> = RestaurantQuality::ALL.iter().map(|q| q.label()).zip(ratings).collect();
        let text = ratings.iter().map(|(q, r)| format!("This place has a rating of {r} for {q}.")).collect::<Vec<_>>().join(" ");
        let categories = vec!["Restaurants".to_string(), label.clone()];
        self.push(format!("{place} {label} Kitchen {i}"), categories, Some(tier), review_count, ratings, text, cuisines);
    }

    fn hotel(&mut self, tier: u8, ratings: [u8; 4]) {
        let i = self.city.businesses.len();
        let place = PLACE_WORDS[self.rng.random_range(0..PLACE_WORDS.len())];
        let ratings: Vec<(&str, u8)> = HotelQuality::ALL.iter().map(|q| q.label()).zip(ratings).collect();
        let text = ratings.iter().map(|(q, r)| format!("The hotel has a rating of {r} for {q}.")).collect::<Vec<_>>().join(" ");
        let categories = vec!["Hotels".to_string(), "Hotels & Travel".to_string(), "Event Planning & Services".to_string()];
        let reviews = self.rng.random_range(20..2000);
        self.push(format!("{place} Hotel {i}"), categories, Some(tier), reviews, ratings, text, [None, None]);
    }

    fn good<const N: usize>(&mut self, lo: u8) -> [u8; N] {
        std::array::from_fn(|_| self.rng.random_range(lo..=5))
    }
}

/// Raw records for one synthetic city.
pub fn synth_city(cfg: &SynthConfig) -> SynthCity {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let centers = (0..cfg.neighborhoods.max(1))
        .map(|_| {
            (cfg.center.0 + rng.random_range(-cfg.extent..cfg.extent), cfg.center.1 + rng.random_range(-cfg.extent..cfg.extent))
        })
        .collect();
    let mut g = Gen { rng, cfg: cfg.clone(), centers, city: SynthCity::default() };

    for budget in Budget::ALL {
        for (oi, _) in Orientation::ALL.iter().enumerate() {
            for _ in 0..cfg.attractions_per_bucket {
                let tier = g.tier(*budget);
                let mut levels: [u8; 6] = std::array::from_fn(|_| g.rng.random_range(0..=3));
                levels[oi] = g.rng.random_range(2..=3);
                g.attraction(Some(tier), levels);
            }
        }
    }
    for _ in 0..cfg.extra_attractions {
        let tier = g.rng.random_bool(0.5).then(|| g.rng.random_range(1..=4));
        let levels: [u8; 6] = std::array::from_fn(|_| g.rng.random_range(0..=1));
        g.attraction(tier, levels);
    }

    let mut strong = 0;
    for budget in Budget::ALL {
        for cuisine in Cuisine::ALL {
            for k in 0..cfg.strong_restaurants_per_bucket {
                let tier = g.tier(*budget);
                let ratings = g.good::<5>(4);
                let c = Some(cuisine.label().to_string());
                let other = Some(Cuisine::ALL[g.rng.random_range(0..Cuisine::ALL.len())].label().to_string());
                let cuisines = if k % 2 == 0 { [c, None] } else { [other, c] };
                let reviews = g.rng.random_range(1000..5000);
                g.restaurant(tier, ratings, cuisines, reviews);
                strong += 1;
            }
        }
    }
    for _ in strong..cfg.restaurants {
        let tier = g.rng.random_range(1..=4);
        let ratings = g.good::<5>(1);
        let c1 = Cuisine::ALL[g.rng.random_range(0..Cuisine::ALL.len())].label().to_string();
        let c2 = g.rng.random_bool(0.3).then(|| Cuisine::ALL[g.rng.random_range(0..Cuisine::ALL.len())].label().to_string());
        let reviews = g.rng.random_range(5..900);
        g.restaurant(tier, ratings, [Some(c1), c2], reviews);
    }

    for budget in Budget::ALL {
        for _ in 0..cfg.strong_hotels_per_budget {
            let tier = g.tier(*budget);
            let ratings = g.good::<4>(4);
            g.hotel(tier, ratings);
        }
    }
    for _ in 0..cfg.extra_hotels {
        let tier = g.rng.random_range(1..=4);
        let ratings = g.good::<4>(1);
        g.hotel(tier, ratings);
    }
    g.city
}

/// A synthetic city passed through the standard ingestion step.
pub fn synth_pool(cfg: &SynthConfig) -> Result<BusinessPool, DatasetError> {
    let city = synth_city(cfg);
    let attrs = city.attributes.into_iter().map(|a| (a.business_id.clone(), a)).collect();
    ingest_base(&city.businesses, &attrs, &IngestConfig::default()).map(|(pool, _)| pool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{filter_pool, Category, FilterConfig};
    use crate::querygen::sample_query;

    #[test]
    fn deterministic() {
        let a = synth_pool(&SynthConfig::default()).unwrap();
        let b = synth_pool(&SynthConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.count(Category::Restaurant), 500);
    }

    #[test]
    fn every_query_feasible_for_greedy() {
        let pool = synth_pool(&SynthConfig::default()).unwrap();
        for seed in 0..300 {
            let q = sample_query(seed);
            let f = filter_pool(&pool, &q, &FilterConfig::default()).unwrap();
            assert!(f.count(Category::Attraction) >= 4 * q.days as usize, "seed {seed}");
            assert!(f.count(Category::Restaurant) >= 3, "seed {seed}");
            assert!(f.count(Category::Hotel) >= 1, "seed {seed}");
        }
    }
}
