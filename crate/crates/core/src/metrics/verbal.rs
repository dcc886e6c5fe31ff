use serde::{Deserialize, Serialize};

use super::{undefined, MetricConfig, MetricError, PlanScore};
use crate::dataset::{satisfies, BusinessPool, Category, FilterConfig, Preference};
use crate::plan::{Itinerary, SlotEntry};
use crate::querygen::PreferenceQuery;

/// The entry cannot be checked against a preference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotEvaluable {
    /// Missing or out of pool.
    Flagged,
    /// The preference does not apply to this kind of business.
    NotApplicable,
}

pub fn preference_satisfied(
    entry: &SlotEntry,
    pref: Preference,
    pool: &BusinessPool,
    cfg: &FilterConfig,
) -> Result<bool, NotEvaluable> {
    let business = entry.resolved_id().and_then(|id| pool.get(id)).ok_or(NotEvaluable::Flagged)?;
    satisfies(business, pref, cfg).ok_or(NotEvaluable::NotApplicable)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VerbalScore {
    pub out_of_pool: bool,
    pub missing: bool,
    /// Satisfied (entry, preference) pairs among resolved entries.
    pub satisfied: usize,
    pub evaluable: usize,
    pub macro_pass: bool,
}

impl VerbalScore {
    pub fn micro(&self) -> Option<f64> {
        (self.evaluable > 0).then(|| self.satisfied as f64 / self.evaluable as f64)
    }

    pub fn validated(&self) -> bool {
        self.macro_pass && !self.missing && !self.out_of_pool
    }
}

pub fn score_verbal(plan: &Itinerary, q: &PreferenceQuery, pool: &BusinessPool, cfg: &MetricConfig) -> VerbalScore {
    let mut s = VerbalScore { out_of_pool: plan.has_out_of_pool(), missing: plan.has_missing(), ..Default::default() };
    let prefs = |c: Category| q.preferences_for(c);
    let (hotel, restaurant, attraction) = (prefs(Category::Hotel), prefs(Category::Restaurant), prefs(Category::Attraction));
    for (category, entry) in plan.entries() {
        let applicable = match category {
            Category::Hotel => &hotel,
            Category::Restaurant => &restaurant,
            Category::Attraction => &attraction,
        };
        for &pref in applicable {
            if let Ok(ok) = preference_satisfied(entry, pref, pool, &cfg.filter) {
                s.evaluable += 1;
                s.satisfied += ok as usize;
            }
        }
    }
    s.macro_pass = s.micro().is_some_and(|m| m >= cfg.macro_threshold);
    s
}

fn nonempty(batch: &[PlanScore]) -> Result<(), MetricError> {
    if batch.is_empty() {
        Err(MetricError::EmptyBatch)
    } else {
        Ok(())
    }
}

fn pct(count: usize, total: usize) -> f64 {
    count as f64 / total as f64 * 100.0
}

/// Share of plans with any out-of-pool entry and with any missing entry.
pub fn failure_rates(batch: &[PlanScore]) -> Result<(f64, f64), MetricError> {
    nonempty(batch)?;
    let oop = batch.iter().filter(|p| p.verbal.out_of_pool).count();
    let mi = batch.iter().filter(|p| p.verbal.missing).count();
    Ok((pct(oop, batch.len()), pct(mi, batch.len())))
}

fn require_evaluable(batch: &[PlanScore], metric: &'static str) -> Result<usize, MetricError> {
    nonempty(batch)?;
    let total: usize = batch.iter().map(|p| p.verbal.evaluable).sum();
    if total == 0 {
        return Err(undefined(metric, "no evaluable entries"));
    }
    Ok(total)
}

/// Satisfied pairs over evaluable pairs, pooled across the batch.
pub fn micro_rate(batch: &[PlanScore]) -> Result<f64, MetricError> {
    let total = require_evaluable(batch, "micro")?;
    Ok(pct(batch.iter().map(|p| p.verbal.satisfied).sum(), total))
}

/// Share of plans whose own micro rate reaches the threshold.
pub fn macro_rate(batch: &[PlanScore]) -> Result<f64, MetricError> {
    require_evaluable(batch, "macro")?;
    Ok(pct(batch.iter().filter(|p| p.verbal.macro_pass).count(), batch.len()))
}

/// Share of plans passing both failure checks and the macro threshold.
pub fn validated_rate(batch: &[PlanScore]) -> Result<f64, MetricError> {
    require_evaluable(batch, "validated")?;
    Ok(pct(batch.iter().filter(|p| p.verbal.validated()).count(), batch.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::PlanSource;

    fn plan(satisfied: usize, evaluable: usize, missing: bool, oop: bool) -> PlanScore {
        let mut v = VerbalScore { out_of_pool: oop, missing, satisfied, evaluable, macro_pass: false };
        v.macro_pass = v.micro().is_some_and(|m| m >= 0.75);
        PlanScore { query_ref: "q".into(), source: PlanSource::LlmTask1, day_count_delta: 0, attractions_per_day: vec![], verbal: v, spatial: None }
    }

    #[test]
    fn three_of_four() {
        assert_eq!(micro_rate(&[plan(3, 4, false, false)]).unwrap(), 75.0);
        assert_eq!(macro_rate(&[plan(3, 4, false, false)]).unwrap(), 100.0);
    }

    #[test]
    fn pooled_two_plan_fixture() {
        let b = [plan(5, 6, false, false), plan(2, 4, false, false)];
        assert_eq!(micro_rate(&b).unwrap(), 70.0);
        assert_eq!(macro_rate(&b).unwrap(), 50.0);
    }

    #[test]
    fn inclusive_boundary() {
        let b = [plan(4, 5, false, false), plan(3, 4, false, false), plan(3, 5, false, false)];
        assert!((macro_rate(&b).unwrap() - 200.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn failure_indicator_counts() {
        let b = [plan(4, 4, false, true), plan(4, 4, false, false), plan(4, 4, false, false), plan(4, 4, false, false)];
        assert_eq!(failure_rates(&b).unwrap(), (25.0, 0.0));
        assert_eq!(validated_rate(&b).unwrap(), 75.0);
    }

    #[test]
    fn validated_excludes_missing_meal() {
        let b = [plan(4, 4, true, false)];
        assert_eq!(macro_rate(&b).unwrap(), 100.0);
        assert_eq!(validated_rate(&b).unwrap(), 0.0);
    }

    #[test]
    fn undefined_cases() {
        assert_eq!(failure_rates(&[]), Err(MetricError::EmptyBatch));
        assert!(matches!(micro_rate(&[plan(0, 0, true, false)]), Err(MetricError::Undefined { .. })));
    }
}
