#![allow(dead_code)]

use std::collections::HashMap;

use itertools::Itertools;
use itinbench::dataset::vocab::{Budget, Cuisine, HotelQuality, Orientation, RestaurantQuality};
use itinbench::dataset::{AttractionRatings, AttributeRatings, HotelRatings, RestaurantRatings};
use itinbench::geo::haversine_km;
use itinbench::numeric::exact_sum;
use itinbench::plan::{DayPlan, Itinerary, PlanSource, SlotEntry};
use itinbench::solvers::RouteInstance;
use itinbench::{Business, BusinessPool, Category, GeoPoint, PreferenceQuery};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A business that satisfies every preference of [`fixture_query`].
pub fn business(id: &str, category: Category, lat: f64, lon: f64) -> Business {
    let attributes = match category {
        Category::Restaurant => AttributeRatings::Restaurant(RestaurantRatings::from_fn(|_| 5)),
        Category::Hotel => AttributeRatings::Hotel(HotelRatings::from_fn(|_| 5)),
        Category::Attraction => AttributeRatings::Attraction(AttractionRatings::from_fn(|_| 3)),
    };
    Business {
        id: id.into(),
        name: format!("Place {id}"),
        address: format!("{id} Market St"),
        location: GeoPoint::new(lat, lon).unwrap(),
        stars: 4.5,
        price: Some(2),
        category,
        cuisines: if category == Category::Restaurant { vec!["Thai".into()] } else { vec![] },
        good_for_meal: None,
        attributes,
    }
}

pub fn fixture_query(days: u8) -> PreferenceQuery {
    PreferenceQuery {
        id: "fixture".into(),
        days,
        budget: Budget::Moderate,
        orientation: Orientation::History,
        restaurant_prefs: vec![RestaurantQuality::Flavor],
        cuisine: Cuisine::Thai,
        hotel_prefs: vec![HotelQuality::Location],
        seed: 0,
    }
}

fn entry(pool: &BusinessPool, id: &str) -> SlotEntry {
    let b = pool.get(id).unwrap_or_else(|| panic!("fixture id {id}"));
    SlotEntry::named(b.name.clone(), b.address.clone())
}

/// A plan naming pool businesses by id. Meals repeat `meals` every day.
pub fn plan(pool: &BusinessPool, days: &[(&str, Vec<&str>)], meals: [&str; 3]) -> Itinerary {
    let days = days
        .iter()
        .map(|(hotel, attractions)| {
            let a: Vec<SlotEntry> = attractions.iter().map(|id| entry(pool, id)).collect();
            let m = a.len().min(1);
            let af = a.len().min(3);
            DayPlan {
                accommodation: entry(pool, hotel),
                breakfast: entry(pool, meals[0]),
                morning: a[..m].to_vec(),
                lunch: entry(pool, meals[1]),
                afternoon: a[m..af].to_vec(),
                dinner: entry(pool, meals[2]),
                night: a[af..].to_vec(),
            }
        })
        .collect();
    Itinerary { days, source: PlanSource::LlmTask2, query_ref: "fixture".into() }
}

pub fn philly_point(rng: &mut ChaCha8Rng) -> GeoPoint {
    GeoPoint::new(rng.random_range(39.90..40.06), rng.random_range(-75.28..-75.02)).unwrap()
}

/// 2-4 days, each with 1-6 attractions, at most `max_attractions` in total.
pub fn random_instance(rng: &mut ChaCha8Rng, max_attractions: usize) -> RouteInstance {
    loop {
        let days = rng.random_range(2..=4);
        let quotas: Vec<usize> = (0..days).map(|_| rng.random_range(1..=6)).collect();
        let n: usize = quotas.iter().sum();
        if n > max_attractions {
            continue;
        }
        let hotels: Vec<GeoPoint> = (0..days).map(|_| philly_point(rng)).collect();
        let attractions: Vec<GeoPoint> = (0..n).map(|_| philly_point(rng)).collect();
        return RouteInstance::new(&hotels, &attractions, quotas).unwrap();
    }
}

pub fn instance_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exhaustive minimum over every split of the attractions into days and
/// every order within each day, working from raw coordinates.
pub fn brute_force_total(hotels: &[GeoPoint], attractions: &[GeoPoint], quotas: &[usize]) -> f64 {
    let n = attractions.len();
    let mut day_best: HashMap<(usize, Vec<usize>), f64> = HashMap::new();
    let mut best = f64::INFINITY;
    let mut stack: Vec<(usize, Vec<usize>, Vec<f64>)> = vec![(0, (0..n).collect(), vec![])];
    while let Some((day, remaining, costs)) = stack.pop() {
        if day == quotas.len() {
            best = best.min(exact_sum(costs));
            continue;
        }
        for subset in remaining.iter().copied().combinations(quotas[day]) {
            let cost = *day_best.entry((day, subset.clone())).or_insert_with(|| {
                subset
                    .iter()
                    .permutations(subset.len())
                    .map(|perm| {
                        let stops: Vec<GeoPoint> = std::iter::once(hotels[day])
                            .chain(perm.iter().map(|&&i| attractions[i]))
                            .chain(std::iter::once(hotels[day]))
                            .collect();
                        exact_sum(stops.windows(2).map(|w| haversine_km(w[0], w[1])))
                    })
                    .fold(f64::INFINITY, f64::min)
            });
            let rest: Vec<usize> = remaining.iter().copied().filter(|i| !subset.contains(i)).collect();
            let mut next = costs.clone();
            next.push(cost);
            stack.push((day + 1, rest, next));
        }
    }
    best
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
