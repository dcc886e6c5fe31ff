//! K-means over raw (lat, lon) pairs with k-means++ seeding.

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::dataset::Business;
use crate::geo::GeoPoint;
use crate::numeric::exact_sum;

pub const MAX_ITERATIONS: usize = 300;
pub const ITEMS_PER_CLUSTER: usize = 5;

/// Number of clusters used for `n` candidates.
pub fn cluster_count(n: usize) -> usize {
    (n / ITEMS_PER_CLUSTER).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<[f64; 2]>,
    /// Objective after the initial assignment and after every Lloyd step.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn sq_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

fn nearest(p: [f64; 2], centroids: &[[f64; 2]]) -> usize {
    let mut best = 0;
    for (c, &ctr) in centroids.iter().enumerate().skip(1) {
        if sq_dist(p, ctr) < sq_dist(p, centroids[best]) {
            best = c;
        }
    }
    best
}

fn objective(points: &[[f64; 2]], labels: &[usize], centroids: &[[f64; 2]]) -> f64 {
    exact_sum(points.iter().zip(labels).map(|(&p, &l)| sq_dist(p, centroids[l])))
}

fn plus_plus_init(points: &[[f64; 2]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let mut centroids = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|&p| sq_dist(p, centroids[0])).collect();
    while centroids.len() < k {
        let pick = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            Err(_) => rng.random_range(0..points.len()),
        };
        let c = points[pick];
        centroids.push(c);
        for (d, &p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, c));
        }
    }
    centroids
}

/// Lloyd's algorithm on `points` with `k` clusters.
///
/// Stops at a label fixpoint or after [`MAX_ITERATIONS`] update steps. A
/// cluster left empty by an update is reseeded at the point farthest from
/// its own centroid.
pub fn kmeans(points: &[[f64; 2]], k: usize, seed: u64) -> KMeansResult {
    assert!(!points.is_empty(), "k-means needs at least one point");
    let k = k.clamp(1, points.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut labels: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
    let mut trace = vec![objective(points, &labels, &centroids)];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            members[l].push(i);
        }
        for (c, m) in members.iter().enumerate() {
            if !m.is_empty() {
                let n = m.len() as f64;
                centroids[c] = [
                    exact_sum(m.iter().map(|&i| points[i][0])) / n,
                    exact_sum(m.iter().map(|&i| points[i][1])) / n,
                ];
            }
        }
        for c in 0..k {
            if members[c].is_empty() {
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        let da = sq_dist(points[a], centroids[labels[a]]);
                        let db = sq_dist(points[b], centroids[labels[b]]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("non-empty");
                centroids[c] = points[far];
            }
        }
        let next: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
        trace.push(objective(points, &next, &centroids));
        let fixed = next == labels;
        labels = next;
        if fixed {
            converged = true;
            break;
        }
    }
    KMeansResult { labels, centroids, objective_trace: trace, iterations, converged }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub k: usize,
    pub centroids: Vec<GeoPoint>,
    pub labels: BTreeMap<String, usize>,
    pub objective_trace: Vec<f64>,
}

impl ClusterAssignment {
    pub fn label(&self, id: &str) -> Option<usize> {
        self.labels.get(id).copied()
    }
}

/// Clusters `items` by location with `k = max(1, floor(n / 5))`.
pub fn kmeans_clusters(items: &[&Business], seed: u64) -> ClusterAssignment {
    let points: Vec<[f64; 2]> = items.iter().map(|b| [b.location.lat, b.location.lon]).collect();
    let k = cluster_count(items.len());
    let res = kmeans(&points, k, seed);
    ClusterAssignment {
        k,
        centroids: res.centroids.iter().map(|c| GeoPoint { lat: c[0], lon: c[1] }).collect(),
        labels: items.iter().zip(&res.labels).map(|(b, &l)| (b.id.clone(), l)).collect(),
        objective_trace: res.objective_trace,
    }
}

/// One `Cluster i: name, name, ...` line per cluster, names sorted.
pub fn cluster_summary_text(a: &ClusterAssignment, items: &[&Business]) -> String {
    let mut groups: Vec<Vec<&str>> = vec![Vec::new(); a.k];
    for b in items {
        if let Some(l) = a.label(&b.id) {
            groups[l].push(&b.name);
        }
    }
    groups
        .iter_mut()
        .enumerate()
        .map(|(i, names)| {
            names.sort_unstable();
            format!("Cluster {i}: {}", names.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn count_rule() {
        assert_eq!(cluster_count(12), 2);
        assert_eq!(cluster_count(3), 1);
        assert_eq!(cluster_count(0), 1);
        assert_eq!(cluster_count(25), 5);
    }

    #[test]
    fn single_cluster_labels_zero() {
        let pts = [[39.9, -75.1], [39.95, -75.2], [40.0, -75.15]];
        let r = kmeans(&pts, 1, 3);
        assert_eq!(r.labels, vec![0, 0, 0]);
        assert!(r.converged);
    }

    #[test]
    fn deterministic() {
        let pts: Vec<[f64; 2]> = (0..40).map(|i| [39.9 + (i % 7) as f64 * 0.01, -75.2 + (i % 5) as f64 * 0.013]).collect();
        assert_eq!(kmeans(&pts, 8, 11), kmeans(&pts, 8, 11));
    }

    #[test]
    fn converged_points_sit_nearest_their_centroid() {
        let pts: Vec<[f64; 2]> = (0..60).map(|i| [((i * 37) % 101) as f64 * 0.001, ((i * 53) % 97) as f64 * 0.001]).collect();
        let r = kmeans(&pts, 12, 5);
        assert!(r.converged);
        for (p, &l) in pts.iter().zip(&r.labels) {
            for c in &r.centroids {
                assert!(sq_dist(*p, r.centroids[l]) <= sq_dist(*p, *c));
            }
        }
    }

    proptest! {
        #[test]
        fn objective_never_increases(
            pts in prop::collection::vec((39.8f64..40.1, -75.3f64..-74.9), 1..60),
            seed in any::<u64>(),
        ) {
            let pts: Vec<[f64; 2]> = pts.into_iter().map(|(a, b)| [a, b]).collect();
            let r = kmeans(&pts, cluster_count(pts.len()), seed);
            for w in r.objective_trace.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-18, "{:?}", r.objective_trace);
            }
            prop_assert!(r.labels.iter().all(|&l| l < cluster_count(pts.len()).min(pts.len())));
        }
    }
}
