use std::collections::BTreeMap;

use itinbench::clustering::kmeans_clusters;
use itinbench::plan::{check_failures, Itinerary};
use itinbench::{Business, BusinessPool, Category, GeoPoint};
use serde_json::{json, Value};

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

fn coord(p: GeoPoint) -> Value {
    json!([p.lon, p.lat])
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull by monotone chain; collinear points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Route figure for one plan: a line per day, a point per venue and a hull
/// per spatial cluster of hotels and attractions.
pub fn plan_geojson(plan: &Itinerary, pool: &BusinessPool, cluster_seed: u64) -> Value {
    let plan = check_failures(plan, pool);
    let resolve = |e: &itinbench::plan::SlotEntry| e.resolved_id().and_then(|id| pool.get(id));
    let mut features = Vec::new();
    let mut venues: BTreeMap<&str, (&Business, Vec<usize>)> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();

    for (d, day) in plan.days.iter().enumerate() {
        for (_, entry) in day.entries() {
            if let Some(b) = resolve(entry) {
                let slot = venues.entry(b.id.as_str()).or_insert_with(|| {
                    order.push(b.id.as_str());
                    (b, Vec::new())
                });
                if !slot.1.contains(&(d + 1)) {
                    slot.1.push(d + 1);
                }
            }
        }
        let hotel = resolve(&day.accommodation);
        let mut stops: Vec<GeoPoint> = hotel.iter().map(|h| h.location).collect();
        stops.extend(day.attractions().filter_map(|e| resolve(e)).map(|b| b.location));
        stops.extend(hotel.iter().map(|h| h.location));
        if stops.len() >= 2 {
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": stops.iter().map(|&p| coord(p)).collect::<Vec<_>>()},
                "properties": {"kind": "route", "day": d + 1, "color": PALETTE[d % PALETTE.len()]},
            }));
        }
    }

    let clustered: Vec<&Business> =
        order.iter().map(|id| venues[id].0).filter(|b| b.category != Category::Restaurant).collect();
    let labels = (!clustered.is_empty()).then(|| kmeans_clusters(&clustered, cluster_seed));

    for id in &order {
        let (b, days) = &venues[id];
        let cluster = labels.as_ref().and_then(|l| l.label(&b.id));
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": coord(b.location)},
            "properties": {
                "kind": "venue",
                "id": b.id,
                "name": b.name,
                "address": b.address,
                "category": b.category,
                "days": days,
                "cluster": cluster,
            },
        }));
    }

    if let Some(labels) = &labels {
        for c in 0..labels.k {
            let members: Vec<[f64; 2]> = clustered
                .iter()
                .filter(|b| labels.label(&b.id) == Some(c))
                .map(|b| [b.location.lon, b.location.lat])
                .collect();
            let hull = convex_hull(&members);
            if hull.len() < 3 {
                continue;
            }
            let mut ring: Vec<Value> = hull.iter().map(|p| json!(p)).collect();
            ring.push(json!(hull[0]));
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {"kind": "cluster", "cluster": c, "members": members.len()},
            }));
        }
    }

    json!({"type": "FeatureCollection", "query_ref": plan.query_ref, "source": plan.source, "features": features})
}
