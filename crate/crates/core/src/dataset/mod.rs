//! City POI dataset: ingestion, review-derived ratings and preference filtering.

mod filter;
mod ingest;
mod reviews;
mod types;
pub mod vocab;

pub use filter::{filter_pool, satisfies, FilterConfig, FilterError};
pub use ingest::{
    ingest_base, read_attributes_jsonl, read_businesses_jsonl, AttributeSource, CategoryList, IngestConfig, IngestReport,
    OpenFlag, PriceField,
    RawBusiness,
};
pub use reviews::{parse_review_ratings, select_reviews, ReviewParseError, ReviewRecord};
pub use types::{
    AttractionRatings, AttributeRatings, Business, BusinessPool, Category, HotelRatings, RestaurantRatings,
};
pub use vocab::{Budget, Cuisine, HotelQuality, Orientation, Preference, RestaurantQuality};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("duplicate business id {0}")]
    DuplicateId(String),
    #[error("business {id}: attribute set does not match category {category}")]
    AttributeMismatch { id: String, category: Category },
    #[error("business {id}: {attribute} = {value} is outside its scale")]
    OutOfScale { id: String, attribute: String, value: u8 },
    #[error("business {0}: only restaurants carry cuisines (at most two)")]
    UnexpectedCuisine(String),
    #[error("no {0} survived ingestion")]
    EmptyCategory(Category),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
