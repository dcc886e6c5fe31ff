//! Itinerary construction and exact multi-day route optimization.
//!
//! Node layout in every [`RouteInstance`] matrix: indices `0..days` are the
//! per-day hotels, the attractions follow. Attraction indices in
//! [`RouteSolution::day_orders`] are relative to the attraction list.

mod astar;
mod day;
mod greedy;
mod heldkarp;
mod instance;
mod mst;

pub use astar::{astar_multiday, astar_multiday_with, AstarOptions, AstarOutcome, Heuristic};
pub use day::{optimize_day_route, MAX_DAY_ATTRACTIONS};
pub use greedy::{greedy_plan, greedy_selection, layout_day, plan_with_solver, GreedySelection, SolverKind};
pub use heldkarp::{heldkarp_multiday, CompletionTable};
pub use instance::{route_distance, RouteInstance, RouteSolution, DEFAULT_NODE_CAP};
pub use mst::{mst_lower_bound, prim_weight};

use thiserror::Error;

use crate::dataset::Category;
use crate::geo::GeoError;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("{attractions} attractions exceed the node cap of {cap}")]
    InfeasibleSize { attractions: usize, cap: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid route: {0}")]
    InvalidRoute(String),
    #[error("need {needed} {category} candidates, pool has {available}")]
    Infeasible { category: Category, needed: usize, available: usize },
    #[error(transparent)]
    Geo(#[from] GeoError),
}
