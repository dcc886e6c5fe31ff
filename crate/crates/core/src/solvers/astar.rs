use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::heldkarp::CompletionTable;
use super::instance::{route_distance, RouteInstance, RouteSolution};
use super::mst::prim_weight;
use super::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Spanning tree over the current position, the unvisited attractions
    /// and the remaining hotels contracted into one node.
    #[default]
    Mst,
    /// Always zero (uniform-cost search).
    Zero,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AstarOptions {
    pub heuristic: Heuristic,
    /// Check the heuristic against exact completion costs on every expansion.
    pub audit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AstarOutcome {
    pub solution: RouteSolution,
    pub expanded: usize,
    /// Expansions where the heuristic exceeded the exact completion cost.
    pub audit_violations: Option<usize>,
}

const DAY_START: u8 = u8::MAX;
const GOAL: u8 = u8::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct State {
    mask: u32,
    pos: u8,
}

struct Entry {
    f: f64,
    g: f64,
    state: State,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // Max-heap: smallest f first, then deeper states, then lowest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.state.mask.count_ones().cmp(&other.state.mask.count_ones()))
            .then(other.state.mask.cmp(&self.state.mask))
            .then(other.state.pos.cmp(&self.state.pos))
    }
}

struct Search<'a> {
    inst: &'a RouteInstance,
    n: usize,
    prefix: Vec<usize>,
    heuristic: Heuristic,
}

impl Search<'_> {
    /// Day of a state: the day being walked, or the day about to start.
    fn day(&self, s: State) -> usize {
        let c = s.mask.count_ones() as usize;
        if s.pos == DAY_START {
            self.prefix.iter().position(|&p| p == c).expect("day boundary")
        } else {
            self.prefix.iter().position(|&p| p >= c).expect("within quota") - 1
        }
    }

    fn h(&self, s: State) -> f64 {
        if self.heuristic == Heuristic::Zero || s.pos == GOAL {
            return 0.0;
        }
        let day = self.day(s);
        let hotels = day..self.inst.days();
        let unvisited: Vec<usize> = (0..self.n).filter(|&j| s.mask & (1 << j) == 0).collect();
        // Node 0 is the contracted hotel set; an attraction position is node 1.
        let mut nodes = Vec::with_capacity(unvisited.len() + 1);
        if s.pos != DAY_START {
            nodes.push(s.pos as usize);
        }
        nodes.extend(unvisited);
        let to_hotels = |a: usize| hotels.clone().map(|d| self.inst.hotel_to(d, a)).fold(f64::INFINITY, f64::min);
        prim_weight(nodes.len() + 1, |a, b| match (a, b) {
            (0, 0) => 0.0,
            (0, x) | (x, 0) => to_hotels(nodes[x - 1]),
            (x, y) => self.inst.between(nodes[x - 1], nodes[y - 1]),
        })
    }

    fn successors(&self, s: State, mut emit: impl FnMut(State, f64)) {
        let full = (1u32 << self.n) - 1;
        let c = s.mask.count_ones() as usize;
        let day = self.day(s);
        if s.pos == DAY_START {
            for j in (0..self.n).filter(|&j| s.mask & (1 << j) == 0) {
                emit(State { mask: s.mask | 1 << j, pos: j as u8 }, self.inst.hotel_to(day, j));
            }
        } else if c == self.prefix[day + 1] {
            let back = self.inst.hotel_to(day, s.pos as usize);
            let pos = if s.mask == full { GOAL } else { DAY_START };
            emit(State { mask: s.mask, pos }, back);
        } else {
            for j in (0..self.n).filter(|&j| s.mask & (1 << j) == 0) {
                emit(State { mask: s.mask | 1 << j, pos: j as u8 }, self.inst.between(s.pos as usize, j));
            }
        }
    }

    fn exact_completion(&self, table: &CompletionTable, s: State) -> f64 {
        match s.pos {
            GOAL => 0.0,
            DAY_START => table.at_day_start(self.inst, self.day(s), s.mask as usize),
            p => table.at_attraction(s.mask as usize, p as usize),
        }
    }
}

/// Optimal multi-day route by A* with the default spanning-tree heuristic.
pub fn astar_multiday(inst: &RouteInstance) -> Result<RouteSolution, SolverError> {
    astar_multiday_with(inst, AstarOptions::default()).map(|o| o.solution)
}

pub fn astar_multiday_with(inst: &RouteInstance, opts: AstarOptions) -> Result<AstarOutcome, SolverError> {
    inst.check_cap()?;
    let n = inst.attraction_count();
    let mut prefix = vec![0];
    for &q in inst.quotas() {
        prefix.push(prefix.last().unwrap() + q);
    }
    let search = Search { inst, n, prefix, heuristic: opts.heuristic };
    let table = if opts.audit { Some(CompletionTable::build(inst)?) } else { None };
    let mut violations = 0;

    let start = State { mask: 0, pos: DAY_START };
    let mut best: HashMap<State, (f64, Option<State>)> = HashMap::new();
    best.insert(start, (0.0, None));
    let mut open = BinaryHeap::new();
    open.push(Entry { f: search.h(start), g: 0.0, state: start });
    let mut expanded = 0;
    let goal = loop {
        let Some(Entry { g, state, .. }) = open.pop() else {
            return Err(SolverError::InvalidInstance("search exhausted without reaching the goal".into()));
        };
        if g > best[&state].0 {
            continue;
        }
        if state.pos == GOAL {
            break state;
        }
        expanded += 1;
        if let Some(t) = &table {
            let exact = search.exact_completion(t, state);
            if search.h(state) > exact * (1.0 + 1e-12) + 1e-12 {
                violations += 1;
            }
        }
        search.successors(state, |next, w| {
            let ng = g + w;
            let better = best.get(&next).is_none_or(|&(old, _)| ng < old);
            if better {
                best.insert(next, (ng, Some(state)));
                open.push(Entry { f: ng + search.h(next), g: ng, state: next });
            }
        });
    };

    let mut path = vec![goal];
    while let Some(prev) = best[path.last().unwrap()].1 {
        path.push(prev);
    }
    path.reverse();
    let mut day_orders = vec![Vec::new(); inst.days()];
    let mut day = 0;
    for s in &path[1..] {
        match s.pos {
            DAY_START => day += 1,
            GOAL => {}
            p => day_orders[day].push(p as usize),
        }
    }
    let total_km = route_distance(inst, &day_orders)?;
    Ok(AstarOutcome {
        solution: RouteSolution { total_km, day_orders, optimal: true },
        expanded,
        audit_violations: table.map(|_| violations),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;
    use crate::solvers::heldkarp_multiday;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng) -> RouteInstance {
        let days = rng.random_range(1..=3);
        let quotas: Vec<usize> = (0..days).map(|_| rng.random_range(1..=3)).collect();
        let n: usize = quotas.iter().sum();
        let mut pt = || GeoPoint::new(rng.random_range(39.9..40.05), rng.random_range(-75.25..-75.05)).unwrap();
        let hotels: Vec<GeoPoint> = (0..days).map(|_| pt()).collect();
        let attractions: Vec<GeoPoint> = (0..n).map(|_| pt()).collect();
        RouteInstance::new(&hotels, &attractions, quotas).unwrap()
    }

    #[test]
    fn matches_heldkarp_and_heuristic_is_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let inst = random_instance(&mut rng);
            let hk = heldkarp_multiday(&inst).unwrap();
            let mst = astar_multiday_with(&inst, AstarOptions { heuristic: Heuristic::Mst, audit: true }).unwrap();
            let zero = astar_multiday_with(&inst, AstarOptions { heuristic: Heuristic::Zero, audit: false }).unwrap();
            assert_eq!(mst.audit_violations, Some(0));
            assert!((mst.solution.total_km - hk.total_km).abs() <= 1e-9 * hk.total_km);
            assert!((zero.solution.total_km - hk.total_km).abs() <= 1e-9 * hk.total_km);
            assert!(zero.expanded >= mst.expanded);
        }
    }

    #[test]
    fn single_attraction_same_as_heldkarp() {
        let h = GeoPoint::new(39.95, -75.16).unwrap();
        let a = GeoPoint::new(39.949, -75.15).unwrap();
        let inst = RouteInstance::new(&[h], &[a], vec![1]).unwrap();
        assert_eq!(astar_multiday(&inst).unwrap(), heldkarp_multiday(&inst).unwrap());
    }
}
