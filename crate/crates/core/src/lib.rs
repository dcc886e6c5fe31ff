//! Itinerary-planning benchmark toolkit.
//!
//! The crate covers the whole pipeline: ingesting a city's points of interest,
//! sampling preference queries, building itineraries with a greedy baseline or
//! exact multi-day route solvers, and scoring any itinerary (solver-built or
//! model-generated) on preference satisfaction and route quality.
//!
//! Batch stages (plan scoring, solver sweeps) run on a rayon pool when the
//! default `parallel` feature is enabled and fall back to plain iteration
//! otherwise; see [`exec`].

pub mod agent;
pub mod clustering;
pub mod dataset;
pub mod exec;
pub mod geo;
pub mod metrics;
pub mod numeric;
pub mod plan;
pub mod querygen;
pub mod solvers;
pub mod synth;

pub use dataset::{Business, BusinessPool, Category};
pub use geo::{DistanceMatrix, GeoPoint};
pub use plan::Itinerary;
pub use querygen::PreferenceQuery;
