mod common;

use common::*;
use itertools::Itertools;
use itinbench::exec::Execution;
use itinbench::geo::haversine_km;
use itinbench::metrics::{
    day_distance_gap, micro_rate, total_distance_gap, DayExclusion, DayGap, EvaluationBatch, MetricConfig, MetricError,
    MetricReport, TotalGap,
};
use itinbench::plan::SlotEntry;
use itinbench::{BusinessPool, Category, GeoPoint};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn tour(hotel: GeoPoint, stops: &[GeoPoint]) -> f64 {
    let mut pts = vec![hotel];
    pts.extend_from_slice(stops);
    pts.push(hotel);
    pts.windows(2).map(|w| haversine_km(w[0], w[1])).sum()
}

fn random_pool(seed: u64, attractions: usize) -> BusinessPool {
    let mut rng = instance_rng(seed);
    let mut b = Vec::new();
    for i in 0..2 {
        let p = philly_point(&mut rng);
        b.push(business(&format!("h{i}"), Category::Hotel, p.lat, p.lon));
    }
    for i in 0..3 {
        let p = philly_point(&mut rng);
        b.push(business(&format!("r{i}"), Category::Restaurant, p.lat, p.lon));
    }
    for i in 0..attractions {
        let p = philly_point(&mut rng);
        b.push(business(&format!("a{i}"), Category::Attraction, p.lat, p.lon));
    }
    BusinessPool::new("Fixture", b).unwrap()
}

fn loc(pool: &BusinessPool, id: &str) -> GeoPoint {
    pool.get(id).unwrap().location
}

#[test]
fn day_and_total_gaps_match_exhaustive_search() {
    for seed in 0..20 {
        let pool = random_pool(seed, 8);
        let mut ids: Vec<String> = (0..8).map(|i| format!("a{i}")).collect();
        ids.shuffle(&mut instance_rng(seed + 100));
        let days = [("h0", ids[..3].iter().map(String::as_str).collect()), ("h1", ids[3..].iter().map(String::as_str).collect())];
        let p = plan(&pool, &days, ["r0", "r1", "r2"]);
        let q = fixture_query(2);
        let batch = EvaluationBatch::new([(p, &q, &pool)], MetricConfig::default()).unwrap();
        let scores = batch.score(Execution::Sequential);

        let mut c = 0.0;
        let mut c_day_opt = 0.0;
        for (hotel, stops) in &days {
            let pts: Vec<GeoPoint> = stops.iter().map(|id| loc(&pool, id)).collect();
            c += tour(loc(&pool, hotel), &pts);
            c_day_opt += pts.iter().permutations(pts.len()).map(|perm| {
                let perm: Vec<GeoPoint> = perm.into_iter().copied().collect();
                tour(loc(&pool, hotel), &perm)
            }).fold(f64::INFINITY, f64::min);
        }
        let hotels = [loc(&pool, "h0"), loc(&pool, "h1")];
        let attractions: Vec<GeoPoint> = ids.iter().map(|id| loc(&pool, id)).collect();
        let c_opt = brute_force_total(&hotels, &attractions, &[3, 5]);

        let dg = day_distance_gap(&scores).unwrap();
        let tdg = total_distance_gap(&scores).unwrap();
        assert!((dg - (c - c_day_opt) / c_day_opt * 100.0).abs() < 1e-9, "seed {seed}: DG {dg}");
        assert!((tdg - (c - c_opt) / c_opt * 100.0).abs() < 1e-9, "seed {seed}: Total-DG {tdg}");
        assert!(c_opt <= c_day_opt + 1e-9 && tdg >= dg - 1e-9);
    }
}

#[test]
fn unresolved_entries_exclude_their_day() {
    let pool = random_pool(1, 6);
    let mut p = plan(&pool, &[("h0", vec!["a0", "a1", "a2"]), ("h1", vec!["a3", "a4", "a5"])], ["r0", "r1", "r2"]);
    p.days[1].afternoon[0] = SlotEntry::named("Nowhere Park", "1 Nowhere Rd");
    let q = fixture_query(2);
    let batch = EvaluationBatch::new([(p, &q, &pool)], MetricConfig::default()).unwrap();
    let s = batch.score(Execution::Sequential).remove(0).spatial.unwrap();
    assert!(matches!(s.days[0], DayGap::Scored { .. }));
    assert_eq!(s.days[1], DayGap::Excluded { reason: DayExclusion::AttractionUnresolved });
    assert!(matches!(s.total, TotalGap::Excluded { .. }));
}

#[test]
fn empty_batch_is_an_error() {
    assert_eq!(micro_rate(&[]), Err(MetricError::EmptyBatch));
    assert_eq!(day_distance_gap(&[]), Err(MetricError::EmptyBatch));
}

fn random_batch_scores(seed: u64) -> Vec<itinbench::metrics::PlanScore> {
    let pool = random_pool(seed, 12);
    let mut rng = instance_rng(seed);
    let q = fixture_query(2);
    let plans: Vec<_> = (0..rng.random_range(2..7))
        .map(|_| {
            let mut ids: Vec<String> = (0..12).map(|i| format!("a{i}")).collect();
            ids.shuffle(&mut rng);
            let k = rng.random_range(1..6);
            let days = [
                ("h0", ids[..k].iter().map(String::as_str).collect()),
                ("h1", ids[k..k + rng.random_range(1..6)].iter().map(String::as_str).collect()),
            ];
            plan(&pool, &days, ["r0", "r1", "r2"])
        })
        .collect();
    let batch = EvaluationBatch::new(plans.into_iter().map(|p| (p, &q, &pool)), MetricConfig::default()).unwrap();
    batch.score(Execution::Parallel)
}

fn headline(r: &MetricReport) -> Vec<Option<f64>> {
    vec![r.oop, r.mi, r.micro, r.macro_, r.vr, r.arg_signed, r.arg_pct, r.dg, r.total_dg, r.ecj]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn batch_order_does_not_change_metrics(seed in 0u64..1000) {
        let scores = random_batch_scores(seed);
        let mut shuffled = scores.clone();
        shuffled.shuffle(&mut instance_rng(seed ^ 0xabc));
        let a = MetricReport::from_scores("a", scores, 4);
        let b = MetricReport::from_scores("a", shuffled, 4);
        prop_assert_eq!(headline(&a), headline(&b));
    }

    #[test]
    fn micro_pools_by_evaluable_count(s1 in 0u64..1000, s2 in 0u64..1000) {
        let (a, b) = (random_batch_scores(s1), random_batch_scores(s2));
        let ev = |x: &[itinbench::metrics::PlanScore]| x.iter().map(|p| p.verbal.evaluable).sum::<usize>() as f64;
        let joined: Vec<_> = a.iter().chain(&b).cloned().collect();
        let want = (micro_rate(&a).unwrap() * ev(&a) + micro_rate(&b).unwrap() * ev(&b)) / (ev(&a) + ev(&b));
        prop_assert!((micro_rate(&joined).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn gaps_are_nonnegative(seed in 0u64..1000) {
        let scores = random_batch_scores(seed);
        prop_assert!(day_distance_gap(&scores).unwrap() >= 0.0);
        prop_assert!(total_distance_gap(&scores).unwrap() >= 0.0);
    }
}
