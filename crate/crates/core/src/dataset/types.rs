use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use super::vocab::{HotelQuality, Orientation, RestaurantQuality};
use super::DatasetError;
use crate::geo::GeoPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Restaurant,
    Hotel,
    Attraction,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Restaurant, Category::Hotel, Category::Attraction];

    pub fn plural(self) -> &'static str {
        match self {
            Category::Restaurant => "restaurants",
            Category::Hotel => "hotels",
            Category::Attraction => "attractions",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Restaurant => "restaurant",
            Category::Hotel => "hotel",
            Category::Attraction => "attraction",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestaurantRatings {
    pub flavor: u8,
    pub freshness: u8,
    pub service: u8,
    pub environment: u8,
    pub value: u8,
}

impl RestaurantRatings {
    pub fn get(&self, q: RestaurantQuality) -> u8 {
        match q {
            RestaurantQuality::Flavor => self.flavor,
            RestaurantQuality::Freshness => self.freshness,
            RestaurantQuality::Service => self.service,
            RestaurantQuality::Environment => self.environment,
            RestaurantQuality::Value => self.value,
        }
    }

    pub fn from_fn(mut f: impl FnMut(RestaurantQuality) -> u8) -> Self {
        use RestaurantQuality::*;
        RestaurantRatings {
            flavor: f(Flavor),
            freshness: f(Freshness),
            service: f(Service),
            environment: f(Environment),
            value: f(Value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HotelRatings {
    pub quality: u8,
    pub location: u8,
    pub service: u8,
    pub safety: u8,
}

impl HotelRatings {
    pub fn get(&self, q: HotelQuality) -> u8 {
        match q {
            HotelQuality::Quality => self.quality,
            HotelQuality::Location => self.location,
            HotelQuality::Service => self.service,
            HotelQuality::Safety => self.safety,
        }
    }

    pub fn from_fn(mut f: impl FnMut(HotelQuality) -> u8) -> Self {
        use HotelQuality::*;
        HotelRatings { quality: f(Quality), location: f(Location), service: f(Service), safety: f(Safety) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttractionRatings {
    pub family: u8,
    pub history: u8,
    pub activity: u8,
    pub nature: u8,
    pub food: u8,
    pub shopping: u8,
}

impl AttractionRatings {
    pub fn get(&self, o: Orientation) -> u8 {
        match o {
            Orientation::Family => self.family,
            Orientation::History => self.history,
            Orientation::Activity => self.activity,
            Orientation::Nature => self.nature,
            Orientation::Food => self.food,
            Orientation::Shopping => self.shopping,
        }
    }

    pub fn from_fn(mut f: impl FnMut(Orientation) -> u8) -> Self {
        use Orientation::*;
        AttractionRatings {
            family: f(Family),
            history: f(History),
            activity: f(Activity),
            nature: f(Nature),
            food: f(Food),
            shopping: f(Shopping),
        }
    }
}

/// Review-derived ratings; the variant fixes the attribute set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttributeRatings {
    Restaurant(RestaurantRatings),
    Hotel(HotelRatings),
    Attraction(AttractionRatings),
}

impl AttributeRatings {
    pub fn category(&self) -> Category {
        match self {
            AttributeRatings::Restaurant(_) => Category::Restaurant,
            AttributeRatings::Hotel(_) => Category::Hotel,
            AttributeRatings::Attraction(_) => Category::Attraction,
        }
    }

    /// (attribute name, value, inclusive scale) for every attribute.
    pub fn entries(&self) -> Vec<(&'static str, u8, (u8, u8))> {
        match self {
            AttributeRatings::Restaurant(r) => {
                RestaurantQuality::ALL.iter().map(|&q| (q.label(), r.get(q), (1, 5))).collect()
            }
            AttributeRatings::Hotel(h) => HotelQuality::ALL.iter().map(|&q| (q.label(), h.get(q), (1, 5))).collect(),
            AttributeRatings::Attraction(a) => {
                Orientation::ALL.iter().map(|&o| (o.label(), a.get(o), (0, 3))).collect()
            }
        }
    }

    pub fn validate(&self, id: &str) -> Result<(), DatasetError> {
        for (attribute, value, (lo, hi)) in self.entries() {
            if value < lo || value > hi {
                return Err(DatasetError::OutOfScale { id: id.to_string(), attribute: attribute.to_string(), value });
            }
        }
        Ok(())
    }
}

/// One point of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Business {
    pub id: String,
    pub name: String,
    pub address: String,
    pub location: GeoPoint,
    pub stars: f64,
    pub price: Option<u8>,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cuisines: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_for_meal: Option<serde_json::Value>,
    pub attributes: AttributeRatings,
}

impl Business {
    pub fn restaurant_ratings(&self) -> Option<&RestaurantRatings> {
        match &self.attributes {
            AttributeRatings::Restaurant(r) => Some(r),
            _ => None,
        }
    }

    pub fn hotel_ratings(&self) -> Option<&HotelRatings> {
        match &self.attributes {
            AttributeRatings::Hotel(h) => Some(h),
            _ => None,
        }
    }

    pub fn attraction_ratings(&self) -> Option<&AttractionRatings> {
        match &self.attributes {
            AttributeRatings::Attraction(a) => Some(a),
            _ => None,
        }
    }

    fn check(&self) -> Result<(), DatasetError> {
        if self.attributes.category() != self.category {
            return Err(DatasetError::AttributeMismatch { id: self.id.clone(), category: self.category });
        }
        if self.category != Category::Restaurant && !self.cuisines.is_empty() {
            return Err(DatasetError::UnexpectedCuisine(self.id.clone()));
        }
        if self.cuisines.len() > 2 {
            return Err(DatasetError::UnexpectedCuisine(self.id.clone()));
        }
        if let Some(t) = self.price {
            if !(1..=4).contains(&t) {
                return Err(DatasetError::OutOfScale { id: self.id.clone(), attribute: "price".into(), value: t });
            }
        }
        self.attributes.validate(&self.id)
    }
}

#[derive(Serialize, Deserialize)]
struct PoolRepr {
    city: String,
    businesses: Vec<Business>,
}

/// The candidate set a planner is given. Ids are unique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoolRepr", into = "PoolRepr")]
pub struct BusinessPool {
    city: String,
    businesses: Vec<Business>,
    index: HashMap<String, usize>,
}

impl TryFrom<PoolRepr> for BusinessPool {
    type Error = DatasetError;
    fn try_from(r: PoolRepr) -> Result<Self, Self::Error> {
        BusinessPool::new(r.city, r.businesses)
    }
}

impl From<BusinessPool> for PoolRepr {
    fn from(p: BusinessPool) -> Self {
        PoolRepr { city: p.city, businesses: p.businesses }
    }
}

impl BusinessPool {
    pub fn new(city: impl Into<String>, businesses: Vec<Business>) -> Result<Self, DatasetError> {
        let mut index = HashMap::with_capacity(businesses.len());
        for (i, b) in businesses.iter().enumerate() {
            b.check()?;
            if index.insert(b.id.clone(), i).is_some() {
                return Err(DatasetError::DuplicateId(b.id.clone()));
            }
        }
        Ok(BusinessPool { city: city.into(), businesses, index })
    }

    pub fn city(&self) -> &str {
        &self.city
    }

    pub fn businesses(&self) -> &[Business] {
        &self.businesses
    }

    pub fn len(&self) -> usize {
        self.businesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.businesses.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Business> {
        self.index.get(id).map(|&i| &self.businesses[i])
    }

    pub fn of(&self, category: Category) -> impl Iterator<Item = &Business> {
        self.businesses.iter().filter(move |b| b.category == category)
    }

    pub fn count(&self, category: Category) -> usize {
        self.of(category).count()
    }

    /// Sub-pool keeping businesses for which `keep` is true, order preserved.
    pub fn retain(&self, mut keep: impl FnMut(&Business) -> bool) -> BusinessPool {
        let businesses: Vec<Business> = self.businesses.iter().filter(|b| keep(b)).cloned().collect();
        let index = businesses.iter().enumerate().map(|(i, b)| (b.id.clone(), i)).collect();
        BusinessPool { city: self.city.clone(), businesses, index }
    }
}
