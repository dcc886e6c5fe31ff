use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::{Business, BusinessPool, Category};
use super::vocab::Preference;
use crate::querygen::PreferenceQuery;

/// Cutoffs for calling an attribute "good".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Minimum 1-5 rating for restaurant and hotel qualities.
    pub quality_threshold: u8,
    /// Minimum 0-3 level for an attraction orientation.
    pub orientation_threshold: u8,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { quality_threshold: 4, orientation_threshold: 2 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FilterError {
    #[error("query {query}: no {category} satisfies every preference")]
    Infeasible { query: String, category: Category },
}

/// Whether `business` meets `pref`; `None` when the preference does not
/// apply to the business's category.
pub fn satisfies(business: &Business, pref: Preference, cfg: &FilterConfig) -> Option<bool> {
    match (pref, business.category) {
        (Preference::Budget(b), _) => Some(b.accepts_tier(business.price)),
        (Preference::Cuisine(c), Category::Restaurant) => Some(business.cuisines.iter().any(|f| c.matches(f))),
        (Preference::Restaurant(q), Category::Restaurant) => {
            business.restaurant_ratings().map(|r| r.get(q) >= cfg.quality_threshold)
        }
        (Preference::Hotel(q), Category::Hotel) => business.hotel_ratings().map(|h| h.get(q) >= cfg.quality_threshold),
        (Preference::Orientation(o), Category::Attraction) => {
            business.attraction_ratings().map(|a| a.get(o) >= cfg.orientation_threshold)
        }
        _ => None,
    }
}

/// True when `business` meets every preference of `query` that applies to it.
pub(crate) fn meets_query(business: &Business, query: &PreferenceQuery, cfg: &FilterConfig) -> bool {
    query
        .preferences_for(business.category)
        .into_iter()
        .all(|p| satisfies(business, p, cfg).unwrap_or(false))
}

/// The sub-pool of businesses satisfying every applicable query preference.
pub fn filter_pool(pool: &BusinessPool, query: &PreferenceQuery, cfg: &FilterConfig) -> Result<BusinessPool, FilterError> {
    let filtered = pool.retain(|b| meets_query(b, query, cfg));
    for category in [Category::Hotel, Category::Restaurant, Category::Attraction] {
        if filtered.count(category) == 0 {
            return Err(FilterError::Infeasible { query: query.id.clone(), category });
        }
    }
    Ok(filtered)
}
