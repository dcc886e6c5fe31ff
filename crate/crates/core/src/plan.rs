//! Itinerary model, the plan-extraction document schema, and failure checks.
//!
//! A plan document is a JSON array of days. Each day is an object with the
//! keys `accommodation`, `breakfast`, `morning_attractions`, `lunch`,
//! `afternoon_attractions`, `dinner` and `night_attractions`; slot values are
//! `{name, address}` objects and attraction sessions are arrays of them.
//! A `"-"` name marks a missing recommendation.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::collections::HashMap;
use thiserror::Error;

use crate::dataset::{Business, BusinessPool, Category};

pub const MISSING_MARK: &str = "-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlanSource {
    #[serde(rename = "greedy")]
    Greedy,
    #[serde(rename = "astar")]
    Astar,
    #[serde(rename = "heldkarp")]
    HeldKarp,
    #[serde(rename = "llm-task1")]
    LlmTask1,
    #[serde(rename = "llm-task2")]
    LlmTask2,
    #[serde(rename = "llm-task3")]
    LlmTask3,
    #[serde(rename = "llm-task4")]
    LlmTask4,
}

impl PlanSource {
    pub fn llm_task(task: u8) -> Option<PlanSource> {
        match task {
            1 => Some(PlanSource::LlmTask1),
            2 => Some(PlanSource::LlmTask2),
            3 => Some(PlanSource::LlmTask3),
            4 => Some(PlanSource::LlmTask4),
            _ => None,
        }
    }
}

/// Outcome of resolving an entry against the pool.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "status", content = "id", rename_all = "snake_case")]
pub enum EntryStatus {
    #[default]
    Unchecked,
    Resolved(String),
    OutOfPool,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SlotEntry {
    /// `None` is a missing recommendation.
    pub name: Option<String>,
    pub address: Option<String>,
    #[serde(default)]
    pub status: EntryStatus,
}

impl SlotEntry {
    pub fn named(name: impl Into<String>, address: impl Into<String>) -> Self {
        SlotEntry { name: Some(name.into()), address: Some(address.into()), status: EntryStatus::Unchecked }
    }

    pub fn missing() -> Self {
        SlotEntry { name: None, address: None, status: EntryStatus::Missing }
    }

    pub fn from_business(b: &Business) -> Self {
        SlotEntry {
            name: Some(b.name.clone()),
            address: Some(b.address.clone()),
            status: EntryStatus::Resolved(b.id.clone()),
        }
    }

    pub fn resolved_id(&self) -> Option<&str> {
        match &self.status {
            EntryStatus::Resolved(id) => Some(id),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        self.name.is_none() || self.status == EntryStatus::Missing
    }

    pub fn is_out_of_pool(&self) -> bool {
        self.status == EntryStatus::OutOfPool
    }

    fn to_value(&self) -> Value {
        json!({
            "name": self.name.as_deref().unwrap_or(MISSING_MARK),
            "address": self.address.as_deref().unwrap_or(MISSING_MARK),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DayPlan {
    pub accommodation: SlotEntry,
    pub breakfast: SlotEntry,
    pub morning: Vec<SlotEntry>,
    pub lunch: SlotEntry,
    pub afternoon: Vec<SlotEntry>,
    pub dinner: SlotEntry,
    pub night: Vec<SlotEntry>,
}

impl DayPlan {
    /// Attractions in visiting order: morning, afternoon, night.
    pub fn attractions(&self) -> impl Iterator<Item = &SlotEntry> {
        self.morning.iter().chain(&self.afternoon).chain(&self.night)
    }

    pub fn meals(&self) -> [&SlotEntry; 3] {
        [&self.breakfast, &self.lunch, &self.dinner]
    }

    /// Every entry with the pool category it must resolve against.
    pub fn entries(&self) -> impl Iterator<Item = (Category, &SlotEntry)> {
        std::iter::once((Category::Hotel, &self.accommodation))
            .chain(self.meals().into_iter().map(|e| (Category::Restaurant, e)))
            .chain(self.attractions().map(|e| (Category::Attraction, e)))
    }

    fn entries_mut(&mut self) -> impl Iterator<Item = (Category, &mut SlotEntry)> {
        std::iter::once((Category::Hotel, &mut self.accommodation))
            .chain([&mut self.breakfast, &mut self.lunch, &mut self.dinner].into_iter().map(|e| (Category::Restaurant, e)))
            .chain(
                self.morning
                    .iter_mut()
                    .chain(self.afternoon.iter_mut())
                    .chain(self.night.iter_mut())
                    .map(|e| (Category::Attraction, e)),
            )
    }

    /// Attraction count, excluding entries marked missing.
    pub fn recommended_attractions(&self) -> usize {
        self.attractions().filter(|e| !e.is_missing()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Itinerary {
    pub days: Vec<DayPlan>,
    pub source: PlanSource,
    pub query_ref: String,
}

impl Itinerary {
    pub fn entries(&self) -> impl Iterator<Item = (Category, &SlotEntry)> {
        self.days.iter().flat_map(|d| d.entries())
    }

    pub fn has_missing(&self) -> bool {
        self.entries().any(|(_, e)| e.is_missing())
    }

    pub fn has_out_of_pool(&self) -> bool {
        self.entries().any(|(_, e)| e.is_out_of_pool())
    }

    /// The plan-extraction document for this itinerary.
    pub fn to_document(&self) -> Value {
        let entries = |v: &[SlotEntry]| Value::Array(v.iter().map(SlotEntry::to_value).collect());
        Value::Array(
            self.days
                .iter()
                .map(|d| {
                    json!({
                        "accommodation": d.accommodation.to_value(),
                        "breakfast": d.breakfast.to_value(),
                        "morning_attractions": entries(&d.morning),
                        "lunch": d.lunch.to_value(),
                        "afternoon_attractions": entries(&d.afternoon),
                        "dinner": d.dinner.to_value(),
                        "night_attractions": entries(&d.night),
                    })
                })
                .collect(),
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed plan document at {path}: {reason}")]
pub struct PlanParseError {
    pub path: String,
    pub reason: String,
}

fn err(path: impl Into<String>, reason: impl Into<String>) -> PlanParseError {
    PlanParseError { path: path.into(), reason: reason.into() }
}

fn text_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<String>, PlanParseError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => {
            let t = s.trim();
            Ok((!t.is_empty() && t != MISSING_MARK).then(|| t.to_string()))
        }
        Some(other) => Err(err(format!("{path}.{key}"), format!("expected a string, found {other}"))),
    }
}

fn parse_entry(v: Option<&Value>, path: &str) -> Result<SlotEntry, PlanParseError> {
    let obj = match v {
        None | Some(Value::Null) => return Ok(SlotEntry::missing()),
        Some(Value::Object(o)) => o,
        Some(other) => return Err(err(path, format!("expected an object with name and address, found {other}"))),
    };
    let name = text_field(obj, "name", path)?;
    let address = text_field(obj, "address", path)?;
    Ok(match name {
        Some(n) => SlotEntry { name: Some(n), address, status: EntryStatus::Unchecked },
        None => SlotEntry::missing(),
    })
}

fn parse_session(v: Option<&Value>, path: &str) -> Result<Vec<SlotEntry>, PlanParseError> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => {
            items.iter().enumerate().map(|(i, item)| parse_entry(Some(item), &format!("{path}[{i}]"))).collect()
        }
        Some(other) => Err(err(path, format!("expected an array of entries, found {other}"))),
    }
}

/// Parses a plan-extraction document (see module docs).
pub fn parse_itinerary(doc: &Value, source: PlanSource, query_ref: impl Into<String>) -> Result<Itinerary, PlanParseError> {
    let days = doc.as_array().ok_or_else(|| err("$", "expected a top-level array of days"))?;
    let mut out = Vec::with_capacity(days.len());
    for (i, day) in days.iter().enumerate() {
        let path = format!("$[{i}]");
        let obj = day.as_object().ok_or_else(|| err(&path, "expected a day object"))?;
        let slot = |key: &str| parse_entry(obj.get(key), &format!("{path}.{key}"));
        let session = |key: &str| parse_session(obj.get(key), &format!("{path}.{key}"));
        out.push(DayPlan {
            accommodation: slot("accommodation")?,
            breakfast: slot("breakfast")?,
            morning: session("morning_attractions")?,
            lunch: slot("lunch")?,
            afternoon: session("afternoon_attractions")?,
            dinner: slot("dinner")?,
            night: session("night_attractions")?,
        });
    }
    if out.is_empty() {
        return Err(err("$", "plan has no days"));
    }
    Ok(Itinerary { days: out, source, query_ref: query_ref.into() })
}

/// Case-folded, punctuation-free, whitespace-collapsed form of a name.
pub fn normalize_name(s: &str) -> String {
    let cleaned: String =
        s.chars().filter(|c| c.is_alphanumeric() || c.is_whitespace()).flat_map(char::to_lowercase).collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Name lookup over a pool, per category.
pub struct PoolIndex<'a> {
    pool: &'a BusinessPool,
    by_name: HashMap<(Category, String), Vec<usize>>,
}

impl<'a> PoolIndex<'a> {
    pub fn new(pool: &'a BusinessPool) -> Self {
        let mut by_name: HashMap<(Category, String), Vec<usize>> = HashMap::new();
        for (i, b) in pool.businesses().iter().enumerate() {
            by_name.entry((b.category, normalize_name(&b.name))).or_default().push(i);
        }
        PoolIndex { pool, by_name }
    }

    /// Same-named candidates are disambiguated by address, then by smallest id.
    pub fn resolve(&self, category: Category, name: &str, address: Option<&str>) -> Option<&'a Business> {
        let hits = self.by_name.get(&(category, normalize_name(name)))?;
        let all = self.pool.businesses();
        let smallest = |it: &mut dyn Iterator<Item = &'a Business>| it.min_by(|a, b| a.id.cmp(&b.id));
        if hits.len() > 1 {
            if let Some(addr) = address.map(normalize_name) {
                let mut same_addr = hits.iter().map(|&i| &all[i]).filter(|b| normalize_name(&b.address) == addr);
                if let Some(b) = smallest(&mut same_addr) {
                    return Some(b);
                }
            }
        }
        smallest(&mut hits.iter().map(|&i| &all[i]))
    }
}

/// Resolves every entry against `pool`, flagging missing and out-of-pool ones.
pub fn check_failures(it: &Itinerary, pool: &BusinessPool) -> Itinerary {
    let index = PoolIndex::new(pool);
    let mut out = it.clone();
    for day in &mut out.days {
        for (category, entry) in day.entries_mut() {
            entry.status = match entry.name.as_deref() {
                None => EntryStatus::Missing,
                Some(name) => match index.resolve(category, name, entry.address.as_deref()) {
                    Some(b) => EntryStatus::Resolved(b.id.clone()),
                    None => EntryStatus::OutOfPool,
                },
            };
        }
    }
    out
}

/// On-disk plan artifact: the extraction document plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub query_ref: String,
    pub source: PlanSource,
    pub pool_mode: PoolMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub plan: Value,
}

/// Which candidate pool a plan's generator saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolMode {
    Full,
    Filtered,
}

impl PlanFile {
    pub fn itinerary(&self) -> Result<Itinerary, PlanParseError> {
        parse_itinerary(&self.plan, self.source, &self.query_ref)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttractionRatings, AttributeRatings, HotelRatings, RestaurantRatings};
    use crate::geo::GeoPoint;

    fn entry(name: &str) -> Value {
        json!({"name": name, "address": "addr"})
    }

    fn day(att: usize) -> Value {
        json!({
            "accommodation": entry("Hotel A"),
            "breakfast": entry("Diner"),
            "morning_attractions": (0..att.min(1)).map(|i| entry(&format!("Sight {i}"))).collect::<Vec<_>>(),
            "lunch": entry("Cafe"),
            "afternoon_attractions": (1..att.min(3)).map(|i| entry(&format!("Sight {i}"))).collect::<Vec<_>>(),
            "dinner": entry("Bistro"),
            "night_attractions": (3..att).map(|i| entry(&format!("Sight {i}"))).collect::<Vec<_>>(),
        })
    }

    #[test]
    fn dash_marks_missing() {
        let mut d = day(4);
        d["breakfast"] = json!({"name": "-", "address": "-"});
        let it = parse_itinerary(&json!([d]), PlanSource::LlmTask1, "q").unwrap();
        assert!(it.days[0].breakfast.is_missing());
        assert_eq!(it.days[0].breakfast.status, EntryStatus::Missing);
    }

    #[test]
    fn empty_session_means_zero_attractions() {
        let mut d = day(4);
        d["afternoon_attractions"] = json!([]);
        let it = parse_itinerary(&json!([d]), PlanSource::LlmTask1, "q").unwrap();
        assert_eq!(it.days[0].afternoon.len(), 0);
        assert_eq!(it.days[0].attractions().count(), 2);
    }

    #[test]
    fn full_two_day_plan_counts() {
        let it = parse_itinerary(&json!([day(4), day(4)]), PlanSource::Greedy, "q").unwrap();
        assert_eq!(it.days.iter().map(|d| d.attractions().count()).sum::<usize>(), 8);
        let hotels = it.entries().filter(|(c, _)| *c == Category::Hotel).count();
        let meals = it.entries().filter(|(c, _)| *c == Category::Restaurant).count();
        assert_eq!((hotels, meals), (2, 6));
        let again = parse_itinerary(&it.to_document(), PlanSource::Greedy, "q").unwrap();
        assert_eq!(again, it);
    }

    #[test]
    fn malformed_reports_path() {
        let mut d = day(4);
        d["lunch"] = json!(42);
        let e = parse_itinerary(&json!([day(4), d]), PlanSource::LlmTask1, "q").unwrap_err();
        assert_eq!(e.path, "$[1].lunch");
        let e = parse_itinerary(&json!({"days": []}), PlanSource::LlmTask1, "q").unwrap_err();
        assert_eq!(e.path, "$");
        let mut d = day(2);
        d["morning_attractions"] = json!({"name": "x"});
        assert_eq!(parse_itinerary(&json!([d]), PlanSource::LlmTask1, "q").unwrap_err().path, "$[0].morning_attractions");
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_name("  Liberty   Bell "), "liberty bell");
        assert_eq!(normalize_name("Reading Terminal Market!"), "reading terminal market");
        assert_eq!(normalize_name("Pat's King of Steaks"), "pats king of steaks");
    }

    fn biz(id: &str, name: &str, category: Category) -> Business {
        let attributes = match category {
            Category::Hotel => AttributeRatings::Hotel(HotelRatings { quality: 4, location: 4, service: 4, safety: 4 }),
            Category::Restaurant => AttributeRatings::Restaurant(RestaurantRatings {
                flavor: 4,
                freshness: 4,
                service: 4,
                environment: 4,
                value: 4,
            }),
            Category::Attraction => AttributeRatings::Attraction(AttractionRatings {
                family: 1,
                history: 1,
                activity: 1,
                nature: 1,
                food: 1,
                shopping: 1,
            }),
        };
        Business {
            id: id.into(),
            name: name.into(),
            address: format!("{id} street"),
            location: GeoPoint::new(39.95, -75.15).unwrap(),
            stars: 4.0,
            price: Some(2),
            category,
            cuisines: vec![],
            good_for_meal: None,
            attributes,
        }
    }

    fn pool() -> BusinessPool {
        BusinessPool::new(
            "test",
            vec![
                biz("h", "Hotel A", Category::Hotel),
                biz("r1", "Diner", Category::Restaurant),
                biz("r2", "Cafe", Category::Restaurant),
                biz("r3", "Bistro", Category::Restaurant),
                biz("a0", "liberty bell ", Category::Attraction),
                biz("a1", "Sight 1", Category::Attraction),
                biz("a2", "Sight 2", Category::Attraction),
                biz("a3", "Sight 3", Category::Attraction),
            ],
        )
        .unwrap()
    }

    #[test]
    fn resolution_and_flags() {
        let mut d = day(4);
        d["morning_attractions"] = json!([entry("Liberty Bell")]);
        d["night_attractions"] = json!([entry("Philly Grand Museum")]);
        let it = parse_itinerary(&json!([d]), PlanSource::LlmTask2, "q").unwrap();
        let checked = check_failures(&it, &pool());
        let day = &checked.days[0];
        assert_eq!(day.morning[0].resolved_id(), Some("a0"));
        assert!(day.night[0].is_out_of_pool());
        assert!(checked.has_out_of_pool());
        assert!(!checked.has_missing());
        assert_eq!(check_failures(&checked, &pool()), checked);
    }

    #[test]
    fn one_missing_breakfast() {
        let mut d = day(4);
        d["morning_attractions"] = json!([entry("Sight 1")]);
        d["night_attractions"] = json!([entry("Sight 3")]);
        d["breakfast"] = json!({"name": "-", "address": "-"});
        let checked = check_failures(&parse_itinerary(&json!([d]), PlanSource::LlmTask2, "q").unwrap(), &pool());
        let missing = checked.entries().filter(|(_, e)| e.is_missing()).count();
        let oop = checked.entries().filter(|(_, e)| e.is_out_of_pool()).count();
        assert_eq!((missing, oop), (1, 0));
    }

    #[test]
    fn category_scoped_resolution() {
        // A restaurant name used as an accommodation is out of pool.
        let mut d = day(0);
        d["accommodation"] = entry("Diner");
        let checked = check_failures(&parse_itinerary(&json!([d]), PlanSource::LlmTask1, "q").unwrap(), &pool());
        assert!(checked.days[0].accommodation.is_out_of_pool());
    }

    #[test]
    fn duplicate_names_prefer_matching_address() {
        let mut dup = biz("a9", "Sight 1", Category::Attraction);
        dup.address = "elsewhere".into();
        let mut all = pool().businesses().to_vec();
        all.push(dup);
        let pool = BusinessPool::new("t", all).unwrap();
        let idx = PoolIndex::new(&pool);
        assert_eq!(idx.resolve(Category::Attraction, "sight 1", Some("Elsewhere")).unwrap().id, "a9");
        assert_eq!(idx.resolve(Category::Attraction, "sight 1", None).unwrap().id, "a1");
    }
}
