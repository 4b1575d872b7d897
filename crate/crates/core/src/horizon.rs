//! Confidence horizons in demands and in calendar time.
//!
//! With an extension coefficient `k`, past operation `T(t)` supports
//! `k * T(t)` further demands. The calendar horizon `h` is where the fleet
//! will have accumulated that much more, `T(t + h) = (k + 1) T(t)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::extent::Extent;
use crate::inference::{extension_coefficient, KnowledgeConstraint, OperationCount};
use crate::schedule::DeploymentSchedule;

/// Whether known future production changes enter the horizon computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Anticipation {
    /// Use the full schedule, including future rate changes.
    Aware,
    /// Extrapolate the production rate in effect at the evaluation time.
    Unaware,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonResult {
    pub k: Extent,
    pub t_past: OperationCount,
    /// Horizon in demands, `k * T_past`.
    pub horizon_demands: Extent,
    /// Horizon in calendar time from `t_now`.
    pub t_hor: Extent,
    pub anticipation: Anticipation,
}

impl From<f64> for Extent {
    fn from(v: f64) -> Self {
        Extent::Finite(v)
    }
}

/// Calendar-time extension coefficient under constant-rate fleet growth,
/// `sqrt(k + 1) - 1`.
pub fn k_linear(k: f64) -> f64 {
    k / ((k + 1.0).sqrt() + 1.0)
}

/// Solves `T(t) = target` for `t >= t0`, where `T` is the schedule's
/// cumulative operation and `T(t0) <= target`.
fn solve_operation_target(schedule: &DeploymentSchedule, t0: f64, target: f64) -> Extent {
    let op = |t: f64| schedule.cumulative_operation(t).demands();
    if op(t0) >= target {
        return Extent::Finite(t0);
    }
    let breakpoints = schedule.breakpoints();
    let last_break = breakpoints.last().copied().unwrap_or(0.0);

    let mut lo = 0.0;
    let mut hi = (t0 * 1e-6).max(1e-6);
    while op(t0 + hi) < target {
        let t = t0 + hi;
        if t > last_break && schedule.fleet_size(t) <= 0.0 && schedule.fleet_slope(t) <= 0.0 {
            // No vehicles left and none coming: operation has stopped growing.
            return Extent::Unbounded;
        }
        lo = hi;
        hi *= 2.0;
        if !(t0 + hi).is_finite() {
            return Extent::Unbounded;
        }
    }

    // Bisect over the breakpoints inside the bracket to isolate the
    // quadratic piece that holds the root.
    let (a, b) = (t0 + lo, t0 + hi);
    let inner: Vec<f64> = breakpoints
        .into_iter()
        .filter(|&p| p > a && p < b)
        .collect();
    let below = inner.partition_point(|&p| op(p) < target);
    let left = if below == 0 { a } else { inner[below - 1] };
    let right = if below == inner.len() {
        b
    } else {
        inner[below]
    };

    let gap = target - op(left);
    let slope = schedule.op_rate() * schedule.fleet_size(left);
    let curvature = schedule.op_rate() * schedule.fleet_slope(0.5 * (left + right));
    let step = if curvature == 0.0 {
        gap / slope
    } else {
        let disc = (slope * slope + 2.0 * curvature * gap).max(0.0);
        2.0 * gap / (slope + disc.sqrt())
    };
    let root = if step.is_finite() {
        (left + step).clamp(left, right)
    } else {
        right
    };
    Extent::Finite(root)
}

/// Calendar-time confidence horizon at `t_now` for extension coefficient `k`.
pub fn horizon_time(
    schedule: &DeploymentSchedule,
    t_now: f64,
    k: impl Into<Extent>,
    anticipation: Anticipation,
) -> Result<HorizonResult> {
    let k = k.into();
    if !(t_now.is_finite() && t_now >= 0.0) {
        return Err(invalid("t_now", format!("{t_now} is not a valid time")));
    }
    if let Extent::Finite(v) = k {
        if !(v.is_finite() && v >= 0.0) {
            return Err(invalid(
                "k",
                format!("{v} is not a nonnegative coefficient"),
            ));
        }
    }
    let t_past = schedule.cumulative_operation(t_now);
    if t_past.is_zero() {
        return Err(Error::DegenerateEvidence("no operation accumulated yet"));
    }
    let horizon_demands = k.map(|k| k * t_past.demands());
    let t_hor = match k {
        Extent::Unbounded => Extent::Unbounded,
        Extent::Finite(k) => {
            let target = (k + 1.0) * t_past.demands();
            let effective = match anticipation {
                Anticipation::Aware => schedule.clone(),
                Anticipation::Unaware => schedule.frozen_at(t_now),
            };
            solve_operation_target(&effective, t_now, target).map(|t| t - t_now)
        }
    };
    Ok(HorizonResult {
        k,
        t_past,
        horizon_demands,
        t_hor,
        anticipation,
    })
}

/// Closed-form horizon for production that starts at `t = 0` and is
/// multiplied by `factor` at `step_time`, evaluated at `t >= step_time`.
///
/// Solves `f u² - 2 (f - 1) s u + (f - 1) s² = (k + 1) [t² + (f - 1)(t - s)²]`
/// for `u = t + t_hor`; the production rate and operation rate cancel.
pub fn horizon_closed_form_step(t: f64, step_time: f64, factor: f64, k: f64) -> Result<f64> {
    if !(step_time.is_finite() && step_time >= 0.0) {
        return Err(invalid(
            "step_time",
            format!("{step_time} must be nonnegative"),
        ));
    }
    if !(t.is_finite() && t >= step_time && t > 0.0) {
        return Err(invalid(
            "t",
            format!("{t} must be positive and at least step_time"),
        ));
    }
    if !(factor.is_finite() && factor > 0.0) {
        return Err(invalid("factor", format!("{factor} must be positive")));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(invalid("k", format!("{k} must be nonnegative")));
    }
    let (f, s) = (factor, step_time);
    let rhs = (k + 1.0) * (t * t + (f - 1.0) * (t - s) * (t - s));
    let disc = f * rhs - (f - 1.0) * s * s;
    if disc < 0.0 {
        return Err(Error::NoSolution("negative discriminant in step horizon"));
    }
    let u = ((f - 1.0) * s + disc.sqrt()) / f;
    Ok(u - t)
}

/// [`horizon_closed_form_step`] for a doubling of the production rate.
pub fn horizon_closed_form_double_rate(t: f64, step_time: f64, k: f64) -> Result<f64> {
    horizon_closed_form_step(t, step_time, 2.0, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub fleet: f64,
    pub t_past: OperationCount,
    pub k: Extent,
    pub t_hor: std::result::Result<Extent, Error>,
}

impl TraceRow {
    /// `t_hor / t`, or `None` for rows whose horizon failed.
    pub fn ratio(&self) -> Option<Extent> {
        self.t_hor.as_ref().ok().map(|h| h.map(|h| h / self.t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTrace {
    pub rows: Vec<TraceRow>,
}

/// Evenly spaced times `start, start + step, ...` up to `end` inclusive.
pub fn uniform_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && start < end) {
        return Err(invalid(
            "grid",
            format!("start {start} must be below end {end}"),
        ));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(invalid("grid", format!("step {step} must be positive")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(invalid("t_grid", "times must be positive"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("t_grid", "times must be strictly increasing"));
    }
    Ok(())
}

fn trace_with<K>(
    schedule: &DeploymentSchedule,
    t_grid: &[f64],
    anticipation: Anticipation,
    k_for: K,
) -> Result<ScenarioTrace>
where
    K: Fn(OperationCount) -> Result<Extent> + Sync,
{
    check_grid(t_grid)?;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let t_past = schedule.cumulative_operation(t);
            let (k, t_hor) = match k_for(t_past) {
                Ok(k) => (
                    k,
                    horizon_time(schedule, t, k, anticipation).map(|r| r.t_hor),
                ),
                Err(e) => (Extent::Finite(f64::NAN), Err(e)),
            };
            TraceRow {
                t,
                fleet: schedule.fleet_size(t),
                t_past,
                k,
                t_hor,
            }
        })
        .collect();
    Ok(ScenarioTrace { rows })
}

/// Horizon evaluated on every time of `t_grid` for a fixed coefficient `k`.
/// Rows whose horizon cannot be computed carry the error and the trace
/// continues.
pub fn scenario_trace(
    schedule: &DeploymentSchedule,
    k: impl Into<Extent>,
    t_grid: &[f64],
    anticipation: Anticipation,
) -> Result<ScenarioTrace> {
    let k = k.into();
    trace_with(schedule, t_grid, anticipation, |_| Ok(k))
}

/// Like [`scenario_trace`], with `k` derived per row from the prior knowledge
/// and the operation accumulated so far.
pub fn scenario_trace_for_constraint(
    schedule: &DeploymentSchedule,
    constraint: &KnowledgeConstraint,
    confidence: f64,
    t_grid: &[f64],
    anticipation: Anticipation,
) -> Result<ScenarioTrace> {
    constraint.validate()?;
    if let KnowledgeConstraint::PfdZero { .. } = constraint {
        // Independent of the past operation.
        let k = extension_coefficient(constraint, confidence, OperationCount::new(1.0)?)?;
        return scenario_trace(schedule, k, t_grid, anticipation);
    }
    trace_with(schedule, t_grid, anticipation, |t_past| {
        extension_coefficient(constraint, confidence, t_past)
    })
}
