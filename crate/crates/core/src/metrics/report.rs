use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

use super::spatial::{arg, day_distance_gap, extra_cluster_jump, total_distance_gap, DayGap, PlanExclusion, TotalGap};
use super::verbal::{failure_rates, macro_rate, micro_rate, validated_rate};
use super::{EvaluationBatch, MetricError, PlanScore};
use crate::exec::Execution;

/// Scoring conventions recorded in every report.
pub const CONVENTIONS: &[&str] = &[
    "macro and validated rates count a plan whose micro rate equals the threshold as passing",
    "DG, Total-DG and ECJ are ratios in percent",
    "ECJ counts maximal same-cluster runs of attraction visits within each day; re-entering a cluster starts a new run",
    "ECJ compares against the multi-day optimal route under one k-means labeling of the plan's hotels and attractions",
    "ARG is reported as the signed mean gap, the normalized magnitude and the mean count per day",
];

pub const UNDEFINED_CELL: &str = "-";

mod cell {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Value(f64),
        Marker(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => Repr::Value(*x),
            None => Repr::Marker(UNDEFINED_CELL.into()),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Value(x) => Some(x),
            Repr::Marker(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub label: String,
    pub plans: usize,
    #[serde(with = "cell")]
    pub oop: Option<f64>,
    #[serde(with = "cell")]
    pub mi: Option<f64>,
    #[serde(with = "cell")]
    pub micro: Option<f64>,
    #[serde(rename = "macro", with = "cell")]
    pub macro_: Option<f64>,
    #[serde(with = "cell")]
    pub vr: Option<f64>,
    #[serde(with = "cell")]
    pub arg_signed: Option<f64>,
    #[serde(with = "cell")]
    pub arg_pct: Option<f64>,
    #[serde(with = "cell")]
    pub arg_mean_per_day: Option<f64>,
    #[serde(with = "cell")]
    pub dg: Option<f64>,
    #[serde(with = "cell")]
    pub total_dg: Option<f64>,
    #[serde(with = "cell")]
    pub ecj: Option<f64>,
    /// Why each undefined column is undefined.
    pub undefined: BTreeMap<String, String>,
    pub days_scored: usize,
    pub days_excluded: usize,
    pub plans_route_scored: usize,
    pub plans_excluded_failed: usize,
    pub plans_excluded_infeasible_size: usize,
    pub plans_excluded_empty: usize,
    /// Plans whose day count differs from the query's.
    pub day_count_mismatches: usize,
    pub total_excess_km: f64,
    pub conventions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub records: Vec<PlanScore>,
}

pub const CSV_HEADER: [&str; 13] =
    ["Source", "Plans", "OOP", "MI", "Micro", "Macro", "VR", "ARG", "ARG mean", "ARG signed", "DG", "Total-DG", "ECJ"];

fn fmt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| UNDEFINED_CELL.to_string(), |x| format!("{x:.decimals$}"))
}

impl MetricReport {
    pub fn from_scores(label: impl Into<String>, mut records: Vec<PlanScore>, daily_quota: usize) -> Self {
        records.sort_by(|a, b| (&a.query_ref, a.source as u8).cmp(&(&b.query_ref, b.source as u8)));
        let mut undefined = BTreeMap::new();
        let mut keep = |name: &str, r: Result<f64, MetricError>| match r {
            Ok(v) => Some(v),
            Err(e) => {
                undefined.insert(name.to_string(), e.to_string());
                None
            }
        };
        let rates = failure_rates(&records);
        let oop = keep("OOP", rates.clone().map(|r| r.0));
        let mi = keep("MI", rates.map(|r| r.1));
        let micro = keep("Micro", micro_rate(&records));
        let macro_ = keep("Macro", macro_rate(&records));
        let vr = keep("VR", validated_rate(&records));
        let a = arg(&records, daily_quota);
        let arg_signed = keep("ARG signed", a.clone().map(|a| a.signed));
        let arg_pct = keep("ARG", a.clone().map(|a| a.pct));
        let arg_mean_per_day = keep("ARG mean", a.map(|a| a.mean_per_day));
        let dg = keep("DG", day_distance_gap(&records));
        let total_dg = keep("Total-DG", total_distance_gap(&records));
        let ecj = keep("ECJ", extra_cluster_jump(&records));

        let spatial: Vec<_> = records.iter().filter_map(|r| r.spatial.as_ref()).collect();
        let days = spatial.iter().flat_map(|s| &s.days);
        let days_scored = days.clone().filter(|d| matches!(d, DayGap::Scored { .. })).count();
        let days_excluded = days.count() - days_scored;
        let count = |f: fn(&TotalGap) -> bool| spatial.iter().filter(|s| f(&s.total)).count();
        let total_excess_km = crate::numeric::exact_sum(spatial.iter().flat_map(|s| match s.total {
            TotalGap::Scored { c_km, c_opt_km, .. } => vec![c_km, -c_opt_km],
            TotalGap::Excluded { .. } => vec![],
        }));
        MetricReport {
            label: label.into(),
            plans: records.len(),
            oop,
            mi,
            micro,
            macro_,
            vr,
            arg_signed,
            arg_pct,
            arg_mean_per_day,
            dg,
            total_dg,
            ecj,
            undefined,
            days_scored,
            days_excluded,
            plans_route_scored: count(|t| matches!(t, TotalGap::Scored { .. })),
            plans_excluded_failed: count(|t| matches!(t, TotalGap::Excluded { exclusion: PlanExclusion::FailedCheck })),
            plans_excluded_infeasible_size: count(|t| {
                matches!(t, TotalGap::Excluded { exclusion: PlanExclusion::InfeasibleSize { .. } })
            }),
            plans_excluded_empty: count(|t| matches!(t, TotalGap::Excluded { exclusion: PlanExclusion::NoAttractions })),
            day_count_mismatches: records.iter().filter(|r| r.day_count_delta != 0).count(),
            total_excess_km,
            conventions: CONVENTIONS.iter().map(|s| s.to_string()).collect(),
            config_hash: None,
            records,
        }
    }

    /// One table row in [`CSV_HEADER`] order; undefined cells are `-`.
    pub fn table_row(&self) -> Vec<String> {
        vec![
            self.label.clone(),
            self.plans.to_string(),
            fmt(self.oop, 1),
            fmt(self.mi, 1),
            fmt(self.micro, 1),
            fmt(self.macro_, 1),
            fmt(self.vr, 1),
            fmt(self.arg_pct, 1),
            fmt(self.arg_mean_per_day, 2),
            fmt(self.arg_signed, 2),
            fmt(self.dg, 1),
            fmt(self.total_dg, 1),
            fmt(self.ecj, 1),
        ]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Renders reports as CSV with a header row.
pub fn to_csv(reports: &[MetricReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record(r.table_row()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Scores every plan in the batch and aggregates the report.
pub fn build_report(label: impl Into<String>, batch: &EvaluationBatch<'_>, exec: Execution) -> MetricReport {
    let cfg = &batch.config;
    let mut report = MetricReport::from_scores(label, batch.score(exec), cfg.daily_quota);
    report.conventions.push(format!(
        "quality preferences need a rating of at least {} of 5, orientation preferences a level of at least {} of 3",
        cfg.filter.quality_threshold, cfg.filter.orientation_threshold
    ));
    report.conventions.push(format!(
        "macro threshold {}, daily quota {}, plan-wide node cap {}, cluster seed {}",
        cfg.macro_threshold, cfg.daily_quota, cfg.node_cap, cfg.cluster_seed
    ));
    report
}
