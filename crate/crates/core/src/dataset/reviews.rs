use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::LazyLock;
use thiserror::Error;

use super::types::{AttractionRatings, AttributeRatings, Category, HotelRatings, RestaurantRatings};
use super::vocab::{HotelQuality, Orientation, RestaurantQuality};

/// A user review. Only the usefulness score matters here; other fields pass through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRecord {
    #[serde(default)]
    pub review_id: String,
    pub business_id: String,
    pub useful: i64,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

/// Keeps reviews voted useful at least once, order preserved.
pub fn select_reviews(reviews: Vec<ReviewRecord>) -> Vec<ReviewRecord> {
    reviews.into_iter().filter(|r| r.useful >= 1).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReviewParseError {
    #[error("no rating found for {0}")]
    MissingAttribute(String),
    #[error("{attribute} = {value} is outside {lo}..={hi}")]
    OutOfScale { attribute: String, value: u32, lo: u8, hi: u8 },
}

// "... has a rating of 4 for quality." / "... rating of 2 for average service."
static RATING_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)rating\s+of\s+(\d+)\s+for\s+([a-z][a-z ]*)").unwrap());
// "This place has a family oriented level 3." / "an activity-oriented level 2"
static LEVEL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b([a-z]+)[\s-]+oriented\s+level\s+(\d+)").unwrap());

/// Parses extraction text into the rating set for `category`.
///
/// The first value found per attribute wins; sentences naming other
/// attributes are ignored.
pub fn parse_review_ratings(text: &str, category: Category) -> Result<AttributeRatings, ReviewParseError> {
    let mut found: Vec<(String, u32)> = Vec::new();
    match category {
        Category::Restaurant | Category::Hotel => {
            for cap in RATING_RE.captures_iter(text) {
                let value = cap[1].parse::<u32>().unwrap_or(u32::MAX);
                // The attribute is the last word of the phrase ("average service").
                if let Some(word) = cap[2].split_whitespace().last() {
                    found.push((word.to_ascii_lowercase(), value));
                }
            }
        }
        Category::Attraction => {
            for cap in LEVEL_RE.captures_iter(text) {
                let value = cap[2].parse::<u32>().unwrap_or(u32::MAX);
                found.push((cap[1].to_ascii_lowercase(), value));
            }
        }
    }

    let lookup = |name: &str, lo: u8, hi: u8| -> Result<u8, ReviewParseError> {
        let (_, v) = found
            .iter()
            .find(|(k, _)| k == name)
            .ok_or_else(|| ReviewParseError::MissingAttribute(name.to_string()))?;
        if *v < lo as u32 || *v > hi as u32 {
            return Err(ReviewParseError::OutOfScale { attribute: name.to_string(), value: *v, lo, hi });
        }
        Ok(*v as u8)
    };

    let (names, lo, hi): (Vec<&'static str>, u8, u8) = match category {
        Category::Restaurant => (RestaurantQuality::ALL.iter().map(|q| q.label()).collect(), 1, 5),
        Category::Hotel => (HotelQuality::ALL.iter().map(|q| q.label()).collect(), 1, 5),
        Category::Attraction => (Orientation::ALL.iter().map(|o| o.label()).collect(), 0, 3),
    };
    let mut values = HashMap::with_capacity(names.len());
    for name in names {
        values.insert(name, lookup(name, lo, hi)?);
    }
    let v = |name: &str| values[name];
    Ok(match category {
        Category::Restaurant => AttributeRatings::Restaurant(RestaurantRatings::from_fn(|q| v(q.label()))),
        Category::Hotel => AttributeRatings::Hotel(HotelRatings::from_fn(|q| v(q.label()))),
        Category::Attraction => AttributeRatings::Attraction(AttractionRatings::from_fn(|o| v(o.label()))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOTEL_EXAMPLE: &str = "The hotel has a rating of 4 for quality. Rooms are beautifully appointed.\n\
        The hotel has a rating of 5 for location. Located in the Comcast Center.\n\
        The hotel has a rating of 4 for service. Service is generally exceptional.\n\
        The hotel has a rating of 4 for safety. Most reviews do not raise safety concerns.";

    const ATTRACTION_EXAMPLE: &str = "This place has a family oriented level 3. Spruce Street Harbor Park is family-friendly.\n\
        This place has a history oriented level 1. It does not focus on history.\n\
        This place has an activity oriented level 2. Hammocks and games.\n\
        This place has a nature oriented level 2. Along the Delaware River.\n\
        This place has a food oriented level 3. Numerous food trucks.\n\
        This place has a shopping oriented level 1. Some vendors selling crafts.";

    #[test]
    fn hotel_sentences() {
        let r = parse_review_ratings(HOTEL_EXAMPLE, Category::Hotel).unwrap();
        assert_eq!(r, AttributeRatings::Hotel(HotelRatings { quality: 4, location: 5, service: 4, safety: 4 }));
    }

    #[test]
    fn adjective_before_attribute() {
        let text = "The hotel has a rating of 2 for quality. x. The hotel has a rating of 3 for location. \
                    The hotel has a rating of 2 for average service. The hotel has a rating of 2 for average safety.";
        let r = parse_review_ratings(text, Category::Hotel).unwrap();
        assert_eq!(r, AttributeRatings::Hotel(HotelRatings { quality: 2, location: 3, service: 2, safety: 2 }));
    }

    #[test]
    fn attraction_levels() {
        let r = parse_review_ratings(ATTRACTION_EXAMPLE, Category::Attraction).unwrap();
        let a = match r {
            AttributeRatings::Attraction(a) => a,
            other => panic!("{other:?}"),
        };
        assert_eq!((a.family, a.history, a.activity, a.nature, a.food, a.shopping), (3, 1, 2, 2, 3, 1));
    }

    #[test]
    fn restaurant_with_extra_sentences() {
        let text = "This place has a rating of 4 for flavor. This place has a rating of 4 for freshness. \
                    This place has a rating of 3 for service. This place has a rating of 5 for environment. \
                    This place has a rating of 3 for value. This place has a rating of 5 for parking.";
        let r = parse_review_ratings(text, Category::Restaurant).unwrap();
        assert_eq!(
            r,
            AttributeRatings::Restaurant(RestaurantRatings {
                flavor: 4,
                freshness: 4,
                service: 3,
                environment: 5,
                value: 3
            })
        );
    }

    #[test]
    fn missing_attribute_is_named() {
        let text = "The hotel has a rating of 4 for quality. The hotel has a rating of 5 for location. \
                    The hotel has a rating of 4 for service.";
        assert_eq!(
            parse_review_ratings(text, Category::Hotel),
            Err(ReviewParseError::MissingAttribute("safety".into()))
        );
    }

    #[test]
    fn out_of_scale_is_rejected() {
        let text = ATTRACTION_EXAMPLE.replace("food oriented level 3", "food oriented level 4");
        assert!(matches!(
            parse_review_ratings(&text, Category::Attraction),
            Err(ReviewParseError::OutOfScale { ref attribute, value: 4, .. }) if attribute == "food"
        ));
        let text = HOTEL_EXAMPLE.replace("rating of 5", "rating of 0");
        assert!(matches!(parse_review_ratings(&text, Category::Hotel), Err(ReviewParseError::OutOfScale { .. })));
    }

    fn review(useful: i64) -> ReviewRecord {
        ReviewRecord {
            review_id: format!("r{useful}"),
            business_id: "b".into(),
            useful,
            extra: Default::default(),
        }
    }

    #[test]
    fn review_usefulness_threshold() {
        let kept = select_reviews(vec![review(0), review(1), review(3)]);
        assert_eq!(kept.iter().map(|r| r.useful).collect::<Vec<_>>(), vec![1, 3]);
        assert!(select_reviews(vec![review(0), review(0)]).is_empty());
    }

    #[test]
    fn review_selection_count_matches_independent_tally() {
        let mut state = 12345u64;
        let reviews: Vec<_> = (0..10_000)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                review(((state >> 33) % 5) as i64 - 1)
            })
            .collect();
        let expected = reviews.iter().filter(|r| r.useful > 0).count();
        let ids: Vec<_> = reviews.iter().map(|r| r.useful).collect();
        let kept = select_reviews(reviews);
        assert_eq!(kept.len(), expected);
        // order preserved
        let filtered: Vec<_> = ids.into_iter().filter(|&u| u >= 1).collect();
        assert_eq!(kept.iter().map(|r| r.useful).collect::<Vec<_>>(), filtered);
    }
}
