//! Coordinates and great-circle distances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Earth radius (IUGG), kilometers.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Error, PartialEq)]
pub enum GeoError {
    #[error("invalid coordinate ({lat}, {lon}): {reason}")]
    InvalidCoordinate { lat: f64, lon: f64, reason: &'static str },
    #[error("distance matrix needs at least one point")]
    EmptyPointSet,
    #[error("distance matrix is not square, symmetric and zero on the diagonal: {0}")]
    MalformedMatrix(String),
}

/// A WGS84 latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        let bad = |reason| GeoError::InvalidCoordinate { lat, lon, reason };
        if !lat.is_finite() || !lon.is_finite() {
            return Err(bad("non-finite component"));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(bad("latitude outside [-90, 90]"));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(bad("longitude outside [-180, 180]"));
        }
        Ok(GeoPoint { lat, lon })
    }
}

/// Great-circle distance between two validated points, in kilometers.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    haversine_unchecked(a.lat, a.lon, b.lat, b.lon)
}

/// Great-circle distance over raw degrees. Longitudes need not be wrapped.
pub fn great_circle_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64, GeoError> {
    for (lat, lon) in [(lat1, lon1), (lat2, lon2)] {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(GeoError::InvalidCoordinate { lat, lon, reason: "non-finite component" });
        }
    }
    Ok(haversine_unchecked(lat1, lon1, lat2, lon2))
}

fn haversine_unchecked(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    if lat1 == lat2 && lon1 == lon2 {
        return 0.0;
    }
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Symmetric pairwise distances (km) over an ordered point list.
///
/// `points` may be empty for matrices built directly from distances
/// (synthetic solver instances); node `i` is then only an index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    points: Vec<GeoPoint>,
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_points(points: &[GeoPoint]) -> Result<Self, GeoError> {
        if points.is_empty() {
            return Err(GeoError::EmptyPointSet);
        }
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let km = haversine_km(points[i], points[j]);
                d[i * n + j] = km;
                d[j * n + i] = km;
            }
        }
        Ok(DistanceMatrix { points: points.to_vec(), n, d })
    }

    /// Builds a matrix from explicit rows, validating the metric shape.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeoError> {
        let n = rows.len();
        if n == 0 {
            return Err(GeoError::EmptyPointSet);
        }
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GeoError::MalformedMatrix(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            d.extend_from_slice(row);
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(GeoError::MalformedMatrix(format!("d[{i}][{i}] = {}", d[i * n + i])));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() || v < 0.0 || v != d[j * n + i] {
                    return Err(GeoError::MalformedMatrix(format!("d[{i}][{j}] = {v}")));
                }
            }
        }
        Ok(DistanceMatrix { points: Vec::new(), n, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

/// Convenience wrapper mirroring [`DistanceMatrix::from_points`].
pub fn build_distance_matrix(points: &[GeoPoint]) -> Result<DistanceMatrix, GeoError> {
    DistanceMatrix::from_points(points)
}
