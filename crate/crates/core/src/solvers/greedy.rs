use serde::{Deserialize, Serialize};

use super::astar::astar_multiday;
use super::heldkarp::heldkarp_multiday;
use super::instance::RouteInstance;
use super::SolverError;
use crate::dataset::{Business, BusinessPool, Category};
use crate::geo::{haversine_km, GeoPoint};
use crate::numeric::exact_sum;
use crate::plan::{DayPlan, Itinerary, PlanSource, SlotEntry};
use crate::querygen::PreferenceQuery;

pub const ATTRACTIONS_PER_DAY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Greedy,
    HeldKarp,
    Astar,
}

impl SolverKind {
    pub fn source(self) -> PlanSource {
        match self {
            SolverKind::Greedy => PlanSource::Greedy,
            SolverKind::HeldKarp => PlanSource::HeldKarp,
            SolverKind::Astar => PlanSource::Astar,
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "greedy" => Ok(SolverKind::Greedy),
            "heldkarp" | "held-karp" => Ok(SolverKind::HeldKarp),
            "astar" | "a*" => Ok(SolverKind::Astar),
            other => Err(format!("unknown solver {other:?}")),
        }
    }
}

/// Hotel and per-day attractions chosen by the nearest-neighbor baseline.
#[derive(Debug, Clone)]
pub struct GreedySelection<'a> {
    pub hotel: &'a Business,
    pub days: Vec<Vec<&'a Business>>,
    pub restaurants: Vec<&'a Business>,
}

fn nearest<'a>(from: GeoPoint, candidates: &[&'a Business], used: &[bool]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, b) in candidates.iter().enumerate() {
        if used[i] {
            continue;
        }
        let d = haversine_km(from, b.location);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| i)
}

fn require(category: Category, needed: usize, available: usize) -> Result<(), SolverError> {
    if available < needed {
        return Err(SolverError::Infeasible { category, needed, available });
    }
    Ok(())
}

pub fn greedy_selection<'a>(filtered: &'a BusinessPool, q: &PreferenceQuery) -> Result<GreedySelection<'a>, SolverError> {
    let days = q.days as usize;
    let hotels: Vec<&Business> = filtered.of(Category::Hotel).collect();
    let attractions: Vec<&Business> = filtered.of(Category::Attraction).collect();
    let restaurants: Vec<&Business> = filtered.of(Category::Restaurant).collect();
    require(Category::Hotel, 1, hotels.len())?;
    require(Category::Attraction, ATTRACTIONS_PER_DAY * days, attractions.len())?;
    require(Category::Restaurant, 3, restaurants.len())?;

    let mut hotel = hotels[0];
    let mut best = f64::INFINITY;
    for &h in &hotels {
        let mean = exact_sum(attractions.iter().map(|a| haversine_km(h.location, a.location))) / attractions.len() as f64;
        if mean < best {
            best = mean;
            hotel = h;
        }
    }

    let mut used = vec![false; attractions.len()];
    let mut plan_days = Vec::with_capacity(days);
    for _ in 0..days {
        let mut here = hotel.location;
        let mut day = Vec::with_capacity(ATTRACTIONS_PER_DAY);
        for _ in 0..ATTRACTIONS_PER_DAY {
            let i = nearest(here, &attractions, &used).expect("enough attractions checked above");
            used[i] = true;
            here = attractions[i].location;
            day.push(attractions[i]);
        }
        plan_days.push(day);
    }
    Ok(GreedySelection { hotel, days: plan_days, restaurants })
}

/// Fills one day's slots: the first attraction in the morning, the next two
/// in the afternoon, the rest at night. Each meal is the nearest unused
/// restaurant to where the traveler is at that point of the day.
pub fn layout_day(hotel: &Business, attractions: &[&Business], restaurants: &[&Business]) -> DayPlan {
    let mut used = vec![false; restaurants.len()];
    let mut meal = |at: GeoPoint| match nearest(at, restaurants, &used) {
        Some(i) => {
            used[i] = true;
            SlotEntry::from_business(restaurants[i])
        }
        None => SlotEntry::missing(),
    };
    let morning = &attractions[..attractions.len().min(1)];
    let afternoon = &attractions[morning.len()..attractions.len().min(3)];
    let night = &attractions[morning.len() + afternoon.len()..];
    let after_morning = morning.last().map_or(hotel.location, |b| b.location);
    let after_afternoon = afternoon.last().map_or(after_morning, |b| b.location);
    let entries = |v: &[&Business]| v.iter().map(|b| SlotEntry::from_business(b)).collect();
    DayPlan {
        accommodation: SlotEntry::from_business(hotel),
        breakfast: meal(hotel.location),
        morning: entries(morning),
        lunch: meal(after_morning),
        afternoon: entries(afternoon),
        dinner: meal(after_afternoon),
        night: entries(night),
    }
}

/// Minimum-distance baseline over a preference-filtered pool.
pub fn greedy_plan(filtered: &BusinessPool, q: &PreferenceQuery) -> Result<Itinerary, SolverError> {
    plan_with_solver(SolverKind::Greedy, filtered, q)
}

/// Builds a plan from the greedy selection. The exact solvers keep the
/// selected hotel and attraction set and re-optimize the split into days and
/// the order within each day.
pub fn plan_with_solver(kind: SolverKind, filtered: &BusinessPool, q: &PreferenceQuery) -> Result<Itinerary, SolverError> {
    let sel = greedy_selection(filtered, q)?;
    let days: Vec<Vec<&Business>> = match kind {
        SolverKind::Greedy => sel.days.clone(),
        SolverKind::HeldKarp | SolverKind::Astar => {
            let pool: Vec<&Business> = sel.days.iter().flatten().copied().collect();
            let points: Vec<GeoPoint> = pool.iter().map(|b| b.location).collect();
            let hotels = vec![sel.hotel.location; sel.days.len()];
            let quotas = sel.days.iter().map(Vec::len).collect();
            let inst = RouteInstance::new(&hotels, &points, quotas)?;
            let sol = if kind == SolverKind::HeldKarp { heldkarp_multiday(&inst)? } else { astar_multiday(&inst)? };
            sol.day_orders.iter().map(|o| o.iter().map(|&i| pool[i]).collect()).collect()
        }
    };
    Ok(Itinerary {
        days: days.iter().map(|d| layout_day(sel.hotel, d, &sel.restaurants)).collect(),
        source: kind.source(),
        query_ref: q.id.clone(),
    })
}
