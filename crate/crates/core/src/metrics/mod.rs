//! Preference-satisfaction and route-quality scoring over plan batches.
//!
//! Plans are scored one at a time ([`score_plan`]); every batch metric is an
//! aggregate over the resulting [`PlanScore`] records, so it does not depend
//! on batch order. Rates are percentages.

mod report;
mod spatial;
mod verbal;

pub use report::{build_report, to_csv, MetricReport, CONVENTIONS, CSV_HEADER, UNDEFINED_CELL};
pub use spatial::{
    arg, day_distance_gap, extra_cluster_jump, score_spatial, total_distance_gap, ArgSummary, DayExclusion, DayGap,
    PlanExclusion, SpatialScore, TotalGap,
};
pub use verbal::{
    failure_rates, macro_rate, micro_rate, preference_satisfied, score_verbal, validated_rate, NotEvaluable,
    VerbalScore,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{BusinessPool, FilterConfig};
use crate::exec::Execution;
use crate::plan::{check_failures, Itinerary, PlanSource};
use crate::querygen::PreferenceQuery;
use crate::solvers::DEFAULT_NODE_CAP;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    /// Per-plan micro rate a plan needs to pass (inclusive).
    pub macro_threshold: f64,
    /// Expected attractions per day.
    pub daily_quota: usize,
    pub filter: FilterConfig,
    /// Largest attraction count scored plan-wide.
    pub node_cap: usize,
    /// Seed for the k-means labeling behind the cluster-jump metric.
    pub cluster_seed: u64,
    /// Skip the route metrics (verbal metrics only).
    pub verbal_only: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            macro_threshold: 0.75,
            daily_quota: 4,
            filter: FilterConfig::default(),
            node_cap: DEFAULT_NODE_CAP,
            cluster_seed: 0,
            verbal_only: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("empty batch")]
    EmptyBatch,
    #[error("{metric} is undefined: {reason}")]
    Undefined { metric: &'static str, reason: String },
    #[error("invalid metric config: {0}")]
    Config(String),
}

pub(crate) fn undefined(metric: &'static str, reason: impl Into<String>) -> MetricError {
    MetricError::Undefined { metric, reason: reason.into() }
}

/// One plan with the query it answers and the pool its generator saw.
#[derive(Debug, Clone)]
pub struct EvalItem<'a> {
    pub plan: Itinerary,
    pub query: &'a PreferenceQuery,
    pub pool: &'a BusinessPool,
}

#[derive(Debug, Clone)]
pub struct EvaluationBatch<'a> {
    pub items: Vec<EvalItem<'a>>,
    pub config: MetricConfig,
}

impl<'a> EvaluationBatch<'a> {
    /// Runs the failure checks on every plan against its own pool.
    pub fn new(
        plans: impl IntoIterator<Item = (Itinerary, &'a PreferenceQuery, &'a BusinessPool)>,
        config: MetricConfig,
    ) -> Result<Self, MetricError> {
        if !(config.macro_threshold > 0.0 && config.macro_threshold <= 1.0) {
            return Err(MetricError::Config(format!("macro threshold {} not in (0, 1]", config.macro_threshold)));
        }
        if config.daily_quota == 0 {
            return Err(MetricError::Config("daily quota must be at least 1".into()));
        }
        let items = plans
            .into_iter()
            .map(|(plan, query, pool)| EvalItem { plan: check_failures(&plan, pool), query, pool })
            .collect();
        Ok(EvaluationBatch { items, config })
    }

    pub fn score(&self, exec: Execution) -> Vec<PlanScore> {
        exec.map(&self.items, |item| score_plan(item, &self.config))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanScore {
    pub query_ref: String,
    pub source: PlanSource,
    /// Plan days minus requested days.
    pub day_count_delta: i64,
    /// Recommended (non-missing) attractions per plan day.
    pub attractions_per_day: Vec<usize>,
    pub verbal: VerbalScore,
    pub spatial: Option<SpatialScore>,
}

pub fn score_plan(item: &EvalItem<'_>, cfg: &MetricConfig) -> PlanScore {
    PlanScore {
        query_ref: item.plan.query_ref.clone(),
        source: item.plan.source,
        day_count_delta: item.plan.days.len() as i64 - item.query.days as i64,
        attractions_per_day: item.plan.days.iter().map(|d| d.recommended_attractions()).collect(),
        verbal: score_verbal(&item.plan, item.query, item.pool, cfg),
        spatial: (!cfg.verbal_only).then(|| score_spatial(&item.plan, item.pool, cfg)),
    }
}
