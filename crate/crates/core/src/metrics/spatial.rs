use serde::{Deserialize, Serialize};

use super::{undefined, MetricConfig, MetricError, PlanScore};
use crate::clustering::kmeans_clusters;
use crate::dataset::{Business, BusinessPool};
use crate::geo::haversine_km;
use crate::numeric::exact_sum;
use crate::plan::{DayPlan, Itinerary, SlotEntry};
use crate::solvers::{heldkarp_multiday, optimize_day_route, route_distance, RouteInstance, MAX_DAY_ATTRACTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayExclusion {
    HotelUnresolved,
    AttractionUnresolved,
    NoAttractions,
    TooManyAttractions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DayGap {
    Scored { c_km: f64, c_opt_km: f64 },
    Excluded { reason: DayExclusion },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum PlanExclusion {
    FailedCheck,
    NoAttractions,
    /// More attractions than the exact solver accepts.
    InfeasibleSize { attractions: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TotalGap {
    Scored { c_km: f64, c_opt_km: f64, runs: usize, optimal_runs: usize },
    Excluded { exclusion: PlanExclusion },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialScore {
    pub days: Vec<DayGap>,
    pub total: TotalGap,
}

fn resolve<'p>(entry: &SlotEntry, pool: &'p BusinessPool) -> Option<&'p Business> {
    entry.resolved_id().and_then(|id| pool.get(id))
}

/// Hotel and attractions of a day, when every one of them resolved.
fn resolved_day<'p>(day: &DayPlan, pool: &'p BusinessPool) -> Result<(&'p Business, Vec<&'p Business>), DayExclusion> {
    let hotel = resolve(&day.accommodation, pool).ok_or(DayExclusion::HotelUnresolved)?;
    let attractions =
        day.attractions().map(|e| resolve(e, pool)).collect::<Option<Vec<_>>>().ok_or(DayExclusion::AttractionUnresolved)?;
    Ok((hotel, attractions))
}

fn day_gap(day: &DayPlan, pool: &BusinessPool) -> DayGap {
    let (hotel, attractions) = match resolved_day(day, pool) {
        Ok(v) => v,
        Err(reason) => return DayGap::Excluded { reason },
    };
    let reason = match attractions.len() {
        0 => Some(DayExclusion::NoAttractions),
        n if n > MAX_DAY_ATTRACTIONS => Some(DayExclusion::TooManyAttractions),
        _ => None,
    };
    if let Some(reason) = reason {
        return DayGap::Excluded { reason };
    }
    let stops: Vec<_> = std::iter::once(hotel.location)
        .chain(attractions.iter().map(|a| a.location))
        .chain(std::iter::once(hotel.location))
        .collect();
    let c_km = exact_sum(stops.windows(2).map(|w| haversine_km(w[0], w[1])));
    let points: Vec<_> = attractions.iter().map(|a| a.location).collect();
    let opt = optimize_day_route(hotel.location, &points).expect("day size checked").total_km;
    DayGap::Scored { c_km, c_opt_km: opt.min(c_km) }
}

/// Number of maximal runs of equal labels.
pub(crate) fn count_runs<T: PartialEq>(seq: &[T]) -> usize {
    if seq.is_empty() {
        0
    } else {
        1 + seq.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

fn total_gap(plan: &Itinerary, pool: &BusinessPool, cfg: &MetricConfig) -> TotalGap {
    let excluded = |exclusion| TotalGap::Excluded { exclusion };
    let mut days = Vec::new();
    for day in &plan.days {
        match resolved_day(day, pool) {
            Ok((h, a)) if !a.is_empty() => days.push((h, a)),
            Ok(_) => {}
            Err(_) => return excluded(PlanExclusion::FailedCheck),
        }
    }
    let n: usize = days.iter().map(|(_, a)| a.len()).sum();
    if n == 0 {
        return excluded(PlanExclusion::NoAttractions);
    }
    if n > cfg.node_cap {
        return excluded(PlanExclusion::InfeasibleSize { attractions: n, cap: cfg.node_cap });
    }
    let hotels: Vec<_> = days.iter().map(|(h, _)| h.location).collect();
    let attractions: Vec<&Business> = days.iter().flat_map(|(_, a)| a.iter().copied()).collect();
    let points: Vec<_> = attractions.iter().map(|a| a.location).collect();
    let quotas: Vec<usize> = days.iter().map(|(_, a)| a.len()).collect();
    let inst = RouteInstance::new(&hotels, &points, quotas.clone()).expect("valid by construction").with_node_cap(cfg.node_cap);
    let mut stated = Vec::with_capacity(days.len());
    let mut next = 0;
    for q in quotas {
        stated.push((next..next + q).collect::<Vec<usize>>());
        next += q;
    }
    let c_km = route_distance(&inst, &stated).expect("stated order is a valid partition");
    let opt = heldkarp_multiday(&inst).expect("size checked");
    let (c_opt_km, optimal_orders) = if opt.total_km <= c_km { (opt.total_km, opt.day_orders) } else { (c_km, stated.clone()) };

    let mut items: Vec<&Business> = Vec::new();
    for b in days.iter().map(|(h, _)| *h).chain(attractions.iter().copied()) {
        if !items.iter().any(|x| x.id == b.id) {
            items.push(b);
        }
    }
    let clusters = kmeans_clusters(&items, cfg.cluster_seed);
    let runs_of = |orders: &[Vec<usize>]| -> usize {
        orders
            .iter()
            .map(|o| count_runs(&o.iter().map(|&i| clusters.label(&attractions[i].id)).collect::<Vec<_>>()))
            .sum()
    };
    TotalGap::Scored { c_km, c_opt_km, runs: runs_of(&stated), optimal_runs: runs_of(&optimal_orders) }
}

pub fn score_spatial(plan: &Itinerary, pool: &BusinessPool, cfg: &MetricConfig) -> SpatialScore {
    SpatialScore { days: plan.days.iter().map(|d| day_gap(d, pool)).collect(), total: total_gap(plan, pool, cfg) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgSummary {
    /// Mean of (attractions - quota) over all days.
    pub signed: f64,
    /// |mean per day - quota| / quota, in percent.
    pub pct: f64,
    pub mean_per_day: f64,
}

pub fn arg(batch: &[PlanScore], daily_quota: usize) -> Result<ArgSummary, MetricError> {
    if batch.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let days: usize = batch.iter().map(|p| p.attractions_per_day.len()).sum();
    if days == 0 {
        return Err(undefined("ARG", "no days"));
    }
    let total: usize = batch.iter().flat_map(|p| &p.attractions_per_day).sum();
    let beta = daily_quota as f64;
    let mean = total as f64 / days as f64;
    let signed = (total as i64 - (daily_quota * days) as i64) as f64 / days as f64;
    Ok(ArgSummary { signed, pct: (mean - beta).abs() / beta * 100.0, mean_per_day: mean })
}

fn spatial<'a>(batch: &'a [PlanScore], metric: &'static str) -> Result<Vec<&'a SpatialScore>, MetricError> {
    if batch.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    batch.iter().map(|p| p.spatial.as_ref().ok_or_else(|| undefined(metric, "route metrics were not scored"))).collect()
}

fn ratio(pairs: impl Iterator<Item = (f64, f64)> + Clone, metric: &'static str, what: &str) -> Result<f64, MetricError> {
    if pairs.clone().next().is_none() {
        return Err(undefined(metric, format!("no {what} could be scored")));
    }
    let excess = exact_sum(pairs.clone().flat_map(|(c, opt)| [c, -opt]));
    let base = exact_sum(pairs.map(|(_, opt)| opt));
    if base == 0.0 {
        return Err(undefined(metric, "optimal distance is zero"));
    }
    Ok(excess / base * 100.0)
}

/// Day-wise excess distance over each day's optimal order, in percent.
pub fn day_distance_gap(batch: &[PlanScore]) -> Result<f64, MetricError> {
    let scored = spatial(batch, "DG")?;
    let pairs = scored.iter().flat_map(|s| &s.days).filter_map(|d| match *d {
        DayGap::Scored { c_km, c_opt_km } => Some((c_km, c_opt_km)),
        DayGap::Excluded { .. } => None,
    });
    ratio(pairs, "DG", "day")
}

/// Plan-wise excess distance over the best multi-day route, in percent.
pub fn total_distance_gap(batch: &[PlanScore]) -> Result<f64, MetricError> {
    let scored = spatial(batch, "Total-DG")?;
    let pairs = scored.iter().filter_map(|s| match s.total {
        TotalGap::Scored { c_km, c_opt_km, .. } => Some((c_km, c_opt_km)),
        TotalGap::Excluded { .. } => None,
    });
    ratio(pairs, "Total-DG", "plan")
}

/// Extra cluster runs relative to the optimal route, in percent.
pub fn extra_cluster_jump(batch: &[PlanScore]) -> Result<f64, MetricError> {
    let scored = spatial(batch, "ECJ")?;
    let (mut runs, mut optimal, mut plans) = (0i64, 0i64, 0usize);
    for s in scored {
        if let TotalGap::Scored { runs: r, optimal_runs: o, .. } = s.total {
            runs += r as i64;
            optimal += o as i64;
            plans += 1;
        }
    }
    if plans == 0 {
        return Err(undefined("ECJ", "no plan could be scored"));
    }
    Ok((runs - optimal) as f64 / optimal as f64 * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_counting() {
        assert_eq!(count_runs::<u8>(&[]), 0);
        assert_eq!(count_runs(&[0, 1, 0]), 3);
        assert_eq!(count_runs(&[0, 0, 1]), 2);
        assert_eq!(count_runs(&[2, 2, 2, 2]), 1);
    }
}
