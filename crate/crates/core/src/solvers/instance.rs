use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::geo::{DistanceMatrix, GeoPoint};
use crate::numeric::exact_sum;

pub const DEFAULT_NODE_CAP: usize = 20;

/// A multi-day routing problem: each day leaves its hotel, visits its quota
/// of attractions and returns to the same hotel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteInstance {
    days: usize,
    quotas: Vec<usize>,
    matrix: DistanceMatrix,
    node_cap: usize,
}

impl RouteInstance {
    pub fn new(day_hotels: &[GeoPoint], attractions: &[GeoPoint], quotas: Vec<usize>) -> Result<Self, SolverError> {
        let points: Vec<GeoPoint> = day_hotels.iter().chain(attractions).copied().collect();
        let matrix = DistanceMatrix::from_points(&points)?;
        Self::from_matrix(day_hotels.len(), quotas, matrix)
    }

    /// `matrix` must list the `days` hotels first, then the attractions.
    pub fn from_matrix(days: usize, quotas: Vec<usize>, matrix: DistanceMatrix) -> Result<Self, SolverError> {
        if days == 0 {
            return Err(SolverError::InvalidInstance("no days".into()));
        }
        if quotas.len() != days {
            return Err(SolverError::InvalidInstance(format!("{} quotas for {days} days", quotas.len())));
        }
        if let Some(d) = quotas.iter().position(|&q| q == 0) {
            return Err(SolverError::InvalidInstance(format!("day {d} has a zero quota")));
        }
        let attractions = matrix.len().saturating_sub(days);
        if matrix.len() < days || quotas.iter().sum::<usize>() != attractions {
            return Err(SolverError::InvalidInstance(format!(
                "quotas sum to {} but there are {attractions} attractions",
                quotas.iter().sum::<usize>()
            )));
        }
        Ok(RouteInstance { days, quotas, matrix, node_cap: DEFAULT_NODE_CAP })
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn node_cap(&self) -> usize {
        self.node_cap
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn quotas(&self) -> &[usize] {
        &self.quotas
    }

    pub fn attraction_count(&self) -> usize {
        self.matrix.len() - self.days
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.matrix
    }

    #[inline]
    pub fn hotel_to(&self, day: usize, attraction: usize) -> f64 {
        self.matrix.get(day, self.days + attraction)
    }

    #[inline]
    pub fn between(&self, a: usize, b: usize) -> f64 {
        self.matrix.get(self.days + a, self.days + b)
    }

    pub(crate) fn check_cap(&self) -> Result<(), SolverError> {
        let n = self.attraction_count();
        if n > self.node_cap {
            return Err(SolverError::InfeasibleSize { attractions: n, cap: self.node_cap });
        }
        Ok(())
    }

    /// Leg lengths of `day`'s tour through `order`.
    pub(crate) fn day_legs<'a>(&'a self, day: usize, order: &'a [usize]) -> impl Iterator<Item = f64> + 'a {
        let first = order.first().map(|&a| self.hotel_to(day, a));
        let last = order.last().map(|&a| self.hotel_to(day, a));
        first.into_iter().chain(order.windows(2).map(|w| self.between(w[0], w[1]))).chain(last)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSolution {
    pub total_km: f64,
    pub day_orders: Vec<Vec<usize>>,
    pub optimal: bool,
}

/// Total kilometers of the given per-day visiting orders.
pub fn route_distance(inst: &RouteInstance, day_orders: &[Vec<usize>]) -> Result<f64, SolverError> {
    if day_orders.len() != inst.days() {
        return Err(SolverError::InvalidRoute(format!("{} day orders for {} days", day_orders.len(), inst.days())));
    }
    let n = inst.attraction_count();
    let mut seen = vec![false; n];
    for (d, order) in day_orders.iter().enumerate() {
        if order.len() != inst.quotas()[d] {
            return Err(SolverError::InvalidRoute(format!(
                "day {d} visits {} attractions, quota is {}",
                order.len(),
                inst.quotas()[d]
            )));
        }
        for &a in order {
            if a >= n || std::mem::replace(&mut seen[a], true) {
                return Err(SolverError::InvalidRoute(format!("attraction {a} out of range or repeated")));
            }
        }
    }
    Ok(exact_sum(day_orders.iter().enumerate().flat_map(|(d, o)| inst.day_legs(d, o))))
}
