use itertools::Itertools;

use super::instance::{RouteInstance, RouteSolution};
use super::SolverError;
use crate::geo::GeoPoint;
use crate::numeric::exact_sum;

pub const MAX_DAY_ATTRACTIONS: usize = 8;

/// Shortest hotel-to-hotel tour through `attractions`, by exhaustive
/// permutation. The first permutation in lexicographic order wins ties.
pub fn optimize_day_route(hotel: GeoPoint, attractions: &[GeoPoint]) -> Result<RouteSolution, SolverError> {
    let n = attractions.len();
    if n == 0 || n > MAX_DAY_ATTRACTIONS {
        return Err(SolverError::InvalidInstance(format!(
            "a day needs 1 to {MAX_DAY_ATTRACTIONS} attractions, got {n}"
        )));
    }
    let inst = RouteInstance::new(&[hotel], attractions, vec![n])?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..n).permutations(n) {
        let cost = exact_sum(inst.day_legs(0, &perm));
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, perm));
        }
    }
    let (total_km, order) = best.expect("at least one permutation");
    Ok(RouteSolution { total_km, day_orders: vec![order], optimal: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::heldkarp_multiday;

    #[test]
    fn single_attraction_out_and_back() {
        let h = GeoPoint::new(39.95, -75.16).unwrap();
        let a = GeoPoint::new(39.96, -75.16).unwrap();
        let s = optimize_day_route(h, &[a]).unwrap();
        assert_eq!(s.day_orders, vec![vec![0]]);
        assert_eq!(s.total_km, 2.0 * crate::geo::haversine_km(h, a));
    }

    #[test]
    fn square_follows_perimeter() {
        let h = GeoPoint::new(0.0, 0.0).unwrap();
        let s = 0.01;
        // Corners listed so that index order zig-zags across the square.
        let corners = [
            GeoPoint::new(s, s).unwrap(),
            GeoPoint::new(-s, -s).unwrap(),
            GeoPoint::new(s, -s).unwrap(),
            GeoPoint::new(-s, s).unwrap(),
        ];
        let sol = optimize_day_route(h, &corners).unwrap();
        let o = &sol.day_orders[0];
        // Opposite corners (0,1) and (2,3) are never adjacent on the tour.
        for w in o.windows(2) {
            let pair = (w[0].min(w[1]), w[0].max(w[1]));
            assert!(pair != (0, 1) && pair != (2, 3), "{o:?}");
        }
    }

    #[test]
    fn empty_and_oversize_rejected() {
        let h = GeoPoint::new(0.0, 0.0).unwrap();
        assert!(optimize_day_route(h, &[]).is_err());
        assert!(optimize_day_route(h, &vec![h; 9]).is_err());
    }

    #[test]
    fn agrees_with_heldkarp_single_day() {
        let h = GeoPoint::new(39.95, -75.16).unwrap();
        let pts: Vec<GeoPoint> =
            (0..7).map(|i| GeoPoint::new(39.93 + (i * 7 % 5) as f64 * 0.01, -75.2 + (i * 3 % 7) as f64 * 0.012).unwrap()).collect();
        let day = optimize_day_route(h, &pts).unwrap();
        let hk = heldkarp_multiday(&RouteInstance::new(&[h], &pts, vec![7]).unwrap()).unwrap();
        assert!(day.total_km <= hk.total_km + 1e-12);
        assert!((day.total_km - hk.total_km).abs() <= 1e-12);
    }
}
