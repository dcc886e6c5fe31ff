use log::warn;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use super::reviews::parse_review_ratings;
use super::types::{AttractionRatings, AttributeRatings, Business, BusinessPool, Category, HotelRatings, RestaurantRatings};
use super::vocab::{HotelQuality, Orientation, RestaurantQuality};
use super::DatasetError;
use crate::geo::GeoPoint;

/// Yelp-style category list: either "A, B, C" or a JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategoryList {
    Joined(String),
    List(Vec<String>),
}

impl CategoryList {
    pub fn items(&self) -> Vec<String> {
        match self {
            CategoryList::Joined(s) => s.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect(),
            CategoryList::List(v) => v.iter().map(|c| c.trim().to_string()).collect(),
        }
    }
}

/// Price as a tier number or a run of dollar signs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriceField {
    Tier(i64),
    Symbols(String),
}

impl PriceField {
    fn tier(&self) -> Option<u8> {
        let t = match self {
            PriceField::Tier(t) => *t,
            PriceField::Symbols(s) if !s.is_empty() && s.chars().all(|c| c == '$') => s.len() as i64,
            PriceField::Symbols(s) => s.trim().parse().ok()?,
        };
        (1..=4).contains(&t).then_some(t as u8)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpenFlag {
    Int(i64),
    Bool(bool),
}

/// One line of the base business file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawBusiness {
    pub business_id: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub address: Option<String>,
    #[serde(default)]
    pub city: Option<String>,
    #[serde(default)]
    pub latitude: Option<f64>,
    #[serde(default)]
    pub longitude: Option<f64>,
    #[serde(default)]
    pub stars: Option<f64>,
    #[serde(default)]
    pub price: Option<PriceField>,
    #[serde(default)]
    pub review_count: Option<u64>,
    #[serde(default)]
    pub is_open: Option<OpenFlag>,
    #[serde(default)]
    pub categories: Option<CategoryList>,
    #[serde(default)]
    pub good_for_meal: Option<serde_json::Value>,
    #[serde(default)]
    pub cuisine_1: Option<String>,
    #[serde(default)]
    pub cuisine_2: Option<String>,
}

impl RawBusiness {
    fn is_unopened(&self) -> bool {
        matches!(self.is_open, Some(OpenFlag::Int(0)) | Some(OpenFlag::Bool(false)))
    }
}

/// Ratings for one business: either numeric columns or extraction text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSource {
    pub business_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction: Option<String>,
    #[serde(flatten)]
    pub values: serde_json::Map<String, serde_json::Value>,
}

impl AttributeSource {
    fn ratings(&self, category: Category) -> Result<AttributeRatings, String> {
        if let Some(text) = &self.extraction {
            return parse_review_ratings(text, category).map_err(|e| e.to_string());
        }
        let get = |name: &str| -> Result<u8, String> {
            let v = self.values.get(name).ok_or_else(|| format!("missing attribute {name}"))?;
            v.as_u64().filter(|&x| x <= u8::MAX as u64).map(|x| x as u8).ok_or_else(|| format!("{name} = {v} is not a small integer"))
        };
        let mut err = None;
        let mut take = |name: &str| {
            get(name).unwrap_or_else(|e| {
                err.get_or_insert(e);
                0
            })
        };
        let ratings = match category {
            Category::Restaurant => AttributeRatings::Restaurant(RestaurantRatings::from_fn(|q: RestaurantQuality| take(q.label()))),
            Category::Hotel => AttributeRatings::Hotel(HotelRatings::from_fn(|q: HotelQuality| take(q.label()))),
            Category::Attraction => AttributeRatings::Attraction(AttractionRatings::from_fn(|o: Orientation| take(o.label()))),
        };
        match err {
            Some(e) => Err(e),
            None => Ok(ratings),
        }
    }
}

/// Category keyword lists and limits for ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    /// Keep only records whose `city` matches (case-insensitive), when set.
    pub city: Option<String>,
    /// Pool label written to the output.
    pub city_label: String,
    pub hotel_keywords: Vec<String>,
    pub restaurant_keywords: Vec<String>,
    pub attraction_keywords: Vec<String>,
    /// Restaurants kept, by descending review count.
    pub restaurant_limit: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        IngestConfig {
            city: None,
            city_label: "Philadelphia".into(),
            hotel_keywords: s(&["Hotels"]),
            restaurant_keywords: s(&["Restaurants", "Food"]),
            attraction_keywords: s(&[
                "Museums",
                "Parks",
                "Local Flavor",
                "Zoos",
                "Tours",
                "Landmarks & Historical Buildings",
                "Souvenir Shops",
            ]),
            restaurant_limit: 500,
        }
    }
}

impl IngestConfig {
    /// Hotel beats restaurant beats attraction when a record matches several lists.
    fn classify(&self, categories: &[String]) -> Option<Category> {
        let hit = |keys: &[String]| categories.iter().any(|c| keys.iter().any(|k| k == c));
        if hit(&self.hotel_keywords) {
            Some(Category::Hotel)
        } else if hit(&self.restaurant_keywords) {
            Some(Category::Restaurant)
        } else if hit(&self.attraction_keywords) {
            Some(Category::Attraction)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub read: usize,
    pub unopened: usize,
    pub other_city: usize,
    pub uncategorized: usize,
    pub truncated_restaurants: usize,
    pub warnings: Vec<String>,
}

impl IngestReport {
    fn warn(&mut self, msg: String) {
        warn!("ingest: {msg}");
        self.warnings.push(msg);
    }
}

/// Builds a normalized pool from base records and their ratings.
///
/// Records lacking a name, coordinates, stars or ratings are skipped with a
/// warning. Every category must keep at least one business.
pub fn ingest_base(
    raw: &[RawBusiness],
    attributes: &HashMap<String, AttributeSource>,
    config: &IngestConfig,
) -> Result<(BusinessPool, IngestReport), DatasetError> {
    let mut report = IngestReport { read: raw.len(), ..Default::default() };
    let mut candidates: Vec<(usize, Category)> = Vec::new();

    for (i, r) in raw.iter().enumerate() {
        if r.is_unopened() {
            report.unopened += 1;
            continue;
        }
        if let Some(city) = &config.city {
            if !r.city.as_deref().is_some_and(|c| c.trim().eq_ignore_ascii_case(city)) {
                report.other_city += 1;
                continue;
            }
        }
        let cats = r.categories.as_ref().map(CategoryList::items).unwrap_or_default();
        match config.classify(&cats) {
            Some(c) => candidates.push((i, c)),
            None => report.uncategorized += 1,
        }
    }

    // Restaurant truncation happens before per-record validation so the limit
    // reflects popularity, not data completeness.
    let mut restaurants: Vec<usize> =
        candidates.iter().filter(|(_, c)| *c == Category::Restaurant).map(|(i, _)| *i).collect();
    restaurants.sort_by_key(|&i| std::cmp::Reverse(raw[i].review_count.unwrap_or(0)));
    let kept_restaurants: HashSet<usize> = restaurants.iter().take(config.restaurant_limit).copied().collect();
    report.truncated_restaurants = restaurants.len().saturating_sub(config.restaurant_limit);

    let mut seen = HashSet::new();
    let mut businesses = Vec::new();
    for (i, category) in candidates {
        if category == Category::Restaurant && !kept_restaurants.contains(&i) {
            continue;
        }
        let r = &raw[i];
        let id = &r.business_id;
        let Some(name) = r.name.as_deref().map(str::trim).filter(|n| !n.is_empty()) else {
            report.warn(format!("{id}: missing name"));
            continue;
        };
        let (Some(lat), Some(lon)) = (r.latitude, r.longitude) else {
            report.warn(format!("{id}: missing latitude/longitude"));
            continue;
        };
        let location = match GeoPoint::new(lat, lon) {
            Ok(p) => p,
            Err(e) => {
                report.warn(format!("{id}: {e}"));
                continue;
            }
        };
        let Some(stars) = r.stars.filter(|s| (1.0..=5.0).contains(s) && (s * 2.0).fract() == 0.0) else {
            report.warn(format!("{id}: stars missing or not on the 1-5 half-star scale"));
            continue;
        };
        let Some(source) = attributes.get(id) else {
            report.warn(format!("{id}: no review-derived ratings"));
            continue;
        };
        let ratings = match source.ratings(category) {
            Ok(a) => a,
            Err(e) => {
                report.warn(format!("{id}: {e}"));
                continue;
            }
        };
        if let Err(e) = ratings.validate(id) {
            report.warn(e.to_string());
            continue;
        }
        if !seen.insert(id.clone()) {
            report.warn(format!("{id}: duplicate business id"));
            continue;
        }
        let price = r.price.as_ref().and_then(PriceField::tier);
        if r.price.is_some() && price.is_none() {
            report.warn(format!("{id}: unrecognized price, treated as absent"));
        }
        let cuisines = if category == Category::Restaurant {
            [&r.cuisine_1, &r.cuisine_2]
                .into_iter()
                .flatten()
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty() && c != "-")
                .collect()
        } else {
            Vec::new()
        };
        businesses.push(Business {
            id: id.clone(),
            name: name.to_string(),
            address: r.address.clone().unwrap_or_default().trim().to_string(),
            location,
            stars,
            price,
            category,
            cuisines,
            good_for_meal: if category == Category::Restaurant { r.good_for_meal.clone() } else { None },
            attributes: ratings,
        });
    }

    for c in Category::ALL {
        if !businesses.iter().any(|b| b.category == c) {
            return Err(DatasetError::EmptyCategory(c));
        }
    }
    let pool = BusinessPool::new(config.city_label.clone(), businesses)?;
    Ok((pool, report))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>, DatasetError> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| DatasetError::Json { line: n + 1, source })?);
    }
    Ok(out)
}

pub fn read_businesses_jsonl(reader: impl BufRead) -> Result<Vec<RawBusiness>, DatasetError> {
    read_jsonl(reader)
}

/// Reads the attributes file into a map keyed by business id (last line wins).
pub fn read_attributes_jsonl(reader: impl BufRead) -> Result<HashMap<String, AttributeSource>, DatasetError> {
    let rows: Vec<AttributeSource> = read_jsonl(reader)?;
    Ok(rows.into_iter().map(|a| (a.business_id.clone(), a)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn raw(id: &str, cats: &str, reviews: u64) -> RawBusiness {
        serde_json::from_value(json!({
            "business_id": id, "name": format!("Biz {id}"), "address": "1 Main St",
            "latitude": 39.95, "longitude": -75.16, "stars": 4.0, "price": 2,
            "review_count": reviews, "is_open": 1, "categories": cats,
            "cuisine_1": "Japanese"
        }))
        .unwrap()
    }

    fn attrs_for(records: &[RawBusiness]) -> HashMap<String, AttributeSource> {
        records
            .iter()
            .map(|r| {
                let v = json!({
                    "business_id": r.business_id,
                    "flavor": 4, "freshness": 4, "service": 4, "environment": 4, "value": 4,
                    "quality": 4, "location": 4, "safety": 4,
                    "family": 2, "history": 2, "activity": 2, "nature": 2, "food": 2, "shopping": 2
                });
                (r.business_id.clone(), serde_json::from_value(v).unwrap())
            })
            .collect()
    }

    fn base() -> Vec<RawBusiness> {
        vec![raw("h1", "Hotels, Event Planning", 10), raw("r1", "Restaurants, Japanese", 50), raw("a1", "Museums", 5)]
    }

    #[test]
    fn hotels_and_travel_alone_is_not_a_hotel() {
        let mut records = base();
        records.push(raw("airport", "Hotels & Travel", 999));
        let attrs = attrs_for(&records);
        let (pool, report) = ingest_base(&records, &attrs, &IngestConfig::default()).unwrap();
        assert!(pool.get("airport").is_none());
        assert_eq!(report.uncategorized, 1);
        assert_eq!(pool.get("h1").unwrap().category, Category::Hotel);
        assert!(pool.get("h1").unwrap().cuisines.is_empty());
    }

    #[test]
    fn keeps_top_500_restaurants_by_reviews() {
        let mut records = base();
        records.retain(|r| r.business_id != "r1");
        for i in 0..600u64 {
            // distinct review counts, shuffled order
            let count = (i * 7919) % 600;
            records.push(raw(&format!("r{i}"), "Food", count));
        }
        let attrs = attrs_for(&records);
        let (pool, report) = ingest_base(&records, &attrs, &IngestConfig::default()).unwrap();
        let kept: Vec<_> = pool.of(Category::Restaurant).collect();
        assert_eq!(kept.len(), 500);
        assert_eq!(report.truncated_restaurants, 100);
        let counts: HashMap<&str, u64> =
            records.iter().map(|r| (r.business_id.as_str(), r.review_count.unwrap())).collect();
        assert!(kept.iter().all(|b| counts[b.id.as_str()] >= 100));
    }

    #[test]
    fn unopened_records_are_dropped() {
        let mut records = base();
        let mut closed = raw("a2", "Parks", 3);
        closed.is_open = Some(OpenFlag::Int(0));
        records.push(closed);
        let attrs = attrs_for(&records);
        let (pool, report) = ingest_base(&records, &attrs, &IngestConfig::default()).unwrap();
        assert!(pool.get("a2").is_none());
        assert_eq!(report.unopened, 1);
    }

    #[test]
    fn incomplete_records_are_skipped_with_warning() {
        let mut records = base();
        let mut no_coords = raw("a3", "Zoos", 1);
        no_coords.latitude = None;
        let mut no_name = raw("a4", "Zoos", 1);
        no_name.name = None;
        records.extend([no_coords, no_name]);
        let attrs = attrs_for(&records);
        let (pool, report) = ingest_base(&records, &attrs, &IngestConfig::default()).unwrap();
        assert_eq!(pool.len(), 3);
        assert_eq!(report.warnings.len(), 2);
    }

    #[test]
    fn empty_category_is_an_error() {
        let records: Vec<_> = base().into_iter().filter(|r| r.business_id != "a1").collect();
        let attrs = attrs_for(&records);
        assert!(matches!(
            ingest_base(&records, &attrs, &IngestConfig::default()),
            Err(DatasetError::EmptyCategory(Category::Attraction))
        ));
    }

    #[test]
    fn extraction_text_feeds_ratings() {
        let records = base();
        let mut attrs = attrs_for(&records);
        attrs.insert(
            "h1".into(),
            serde_json::from_value(json!({
                "business_id": "h1",
                "extraction": "The hotel has a rating of 4 for quality. The hotel has a rating of 5 for location. \
                               The hotel has a rating of 3 for service. The hotel has a rating of 4 for safety."
            }))
            .unwrap(),
        );
        let (pool, _) = ingest_base(&records, &attrs, &IngestConfig::default()).unwrap();
        assert_eq!(pool.get("h1").unwrap().hotel_ratings().unwrap().location, 5);
    }

    #[test]
    fn deterministic_and_price_symbols() {
        let mut records = base();
        records[0].price = Some(PriceField::Symbols("$$$".into()));
        let attrs = attrs_for(&records);
        let a = ingest_base(&records, &attrs, &IngestConfig::default()).unwrap().0;
        let b = ingest_base(&records, &attrs, &IngestConfig::default()).unwrap().0;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.get("h1").unwrap().price, Some(3));
    }

    #[test]
    fn city_filter() {
        let mut records = base();
        for r in &mut records {
            r.city = Some("Philadelphia".into());
        }
        let mut other = raw("a9", "Parks", 1);
        other.city = Some("Santa Barbara".into());
        records.push(other);
        let attrs = attrs_for(&records);
        let cfg = IngestConfig { city: Some("philadelphia".into()), ..Default::default() };
        let (pool, report) = ingest_base(&records, &attrs, &cfg).unwrap();
        assert_eq!(report.other_city, 1);
        assert!(pool.get("a9").is_none());
    }
}
