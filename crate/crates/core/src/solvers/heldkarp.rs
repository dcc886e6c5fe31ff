use super::instance::{route_distance, RouteInstance, RouteSolution};
use super::SolverError;

/// Exact cost-to-go for every (visited set, last attraction) state.
///
/// The day a state belongs to follows from how many attractions have been
/// visited, so the table is indexed by mask and position only.
pub struct CompletionTable {
    n: usize,
    prefix: Vec<usize>,
    day_of: Vec<usize>,
    f: Vec<f64>,
}

impl CompletionTable {
    pub fn build(inst: &RouteInstance) -> Result<Self, SolverError> {
        inst.check_cap()?;
        let n = inst.attraction_count();
        let mut prefix = vec![0];
        for &q in inst.quotas() {
            prefix.push(prefix.last().unwrap() + q);
        }
        let mut day_of = vec![0; n + 1];
        for d in 0..inst.days() {
            for slot in day_of.iter_mut().take(prefix[d + 1] + 1).skip(prefix[d] + 1) {
                *slot = d;
            }
        }
        let full = (1usize << n) - 1;
        let mut t = CompletionTable { n, prefix, day_of, f: vec![f64::INFINITY; (full + 1) * n] };
        for mask in (1..=full).rev() {
            let c = mask.count_ones() as usize;
            let d = t.day_of[c];
            let ends_day = c == t.prefix[d + 1];
            let next_day = if ends_day && mask != full { t.start_cost(inst, d + 1, mask) } else { 0.0 };
            let mut bits = mask;
            while bits != 0 {
                let pos = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let v = if ends_day { inst.hotel_to(d, pos) + next_day } else { t.extend_cost(inst, mask, pos).0 };
                t.f[mask * n + pos] = v;
            }
        }
        Ok(t)
    }

    fn successors(&self, mask: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| mask & (1 << j) == 0)
    }

    /// Best cost of leaving day `day`'s hotel with `mask` visited, and the
    /// lowest-index attraction achieving it.
    fn start_with_choice(&self, inst: &RouteInstance, day: usize, mask: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in self.successors(mask) {
            let v = inst.hotel_to(day, j) + self.f[(mask | 1 << j) * self.n + j];
            if v < best.0 {
                best = (v, j);
            }
        }
        best
    }

    fn start_cost(&self, inst: &RouteInstance, day: usize, mask: usize) -> f64 {
        self.start_with_choice(inst, day, mask).0
    }

    fn extend_cost(&self, inst: &RouteInstance, mask: usize, pos: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in self.successors(mask) {
            let v = inst.between(pos, j) + self.f[(mask | 1 << j) * self.n + j];
            if v < best.0 {
                best = (v, j);
            }
        }
        best
    }

    /// Remaining cost after visiting `mask`, standing at attraction `pos`.
    pub fn at_attraction(&self, mask: usize, pos: usize) -> f64 {
        self.f[mask * self.n + pos]
    }

    /// Remaining cost when day `day` is about to leave its hotel.
    pub fn at_day_start(&self, inst: &RouteInstance, day: usize, mask: usize) -> f64 {
        if mask.count_ones() as usize == self.n {
            0.0
        } else {
            self.start_cost(inst, day, mask)
        }
    }

    /// Optimal per-day orders, ties broken toward the lowest index.
    pub fn reconstruct(&self, inst: &RouteInstance) -> Vec<Vec<usize>> {
        let mut orders = vec![Vec::new(); inst.days()];
        let mut mask = 0usize;
        for (d, order) in orders.iter_mut().enumerate() {
            let (_, mut pos) = self.start_with_choice(inst, d, mask);
            mask |= 1 << pos;
            order.push(pos);
            while mask.count_ones() as usize != self.prefix[d + 1] {
                let (_, j) = self.extend_cost(inst, mask, pos);
                mask |= 1 << j;
                order.push(j);
                pos = j;
            }
        }
        orders
    }
}

/// Minimum total distance over every quota-respecting split of the
/// attractions into days and every visiting order within a day.
pub fn heldkarp_multiday(inst: &RouteInstance) -> Result<RouteSolution, SolverError> {
    let table = CompletionTable::build(inst)?;
    let day_orders = table.reconstruct(inst);
    let total_km = route_distance(inst, &day_orders)?;
    Ok(RouteSolution { total_km, day_orders, optimal: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{DistanceMatrix, GeoPoint};

    #[test]
    fn single_attraction() {
        let m = DistanceMatrix::from_rows(&[vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        let inst = RouteInstance::from_matrix(1, vec![1], m).unwrap();
        let s = heldkarp_multiday(&inst).unwrap();
        assert_eq!(s.total_km, 3.0);
        assert_eq!(s.day_orders, vec![vec![0]]);
    }

    #[test]
    fn groups_same_side_pairs() {
        let h = GeoPoint::new(39.95, -75.15).unwrap();
        let eps = 0.002;
        let a = [
            GeoPoint::new(39.95 + eps, -75.05).unwrap(),
            GeoPoint::new(39.95 + eps, -75.25).unwrap(),
            GeoPoint::new(39.95 - eps, -75.05).unwrap(),
            GeoPoint::new(39.95 - eps, -75.25).unwrap(),
        ];
        let inst = RouteInstance::new(&[h, h], &a, vec![2, 2]).unwrap();
        let s = heldkarp_multiday(&inst).unwrap();
        let mut days: Vec<Vec<usize>> = s.day_orders.iter().map(|o| {
            let mut o = o.clone();
            o.sort();
            o
        }).collect();
        days.sort();
        assert_eq!(days, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn over_cap() {
        let pts: Vec<GeoPoint> = (0..22).map(|i| GeoPoint::new(39.9 + i as f64 * 0.001, -75.1).unwrap()).collect();
        let inst = RouteInstance::new(&pts[..1], &pts[1..], vec![21]).unwrap();
        assert_eq!(
            heldkarp_multiday(&inst).unwrap_err(),
            SolverError::InfeasibleSize { attractions: 21, cap: 20 }
        );
    }
}
