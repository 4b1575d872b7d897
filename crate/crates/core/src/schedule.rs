//! Fleet deployment schedules and the operation they accumulate.
//!
//! Vehicle counts are continuous (a fluid approximation). Production runs at
//! a piecewise-constant rate, every vehicle operates at the same rate from
//! the moment it is produced, and with a retirement age each vehicle leaves
//! the fleet exactly that long after it entered. The initial fleet counts as
//! produced at `t = 0`.
//!
//! Cumulative operation is evaluated from exact per-segment antiderivatives,
//! so it is piecewise quadratic in `t` between [`DeploymentSchedule::breakpoints`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::OperationCount;

/// Production at a constant `rate` (vehicles per unit time) from `start`
/// until the next segment begins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub start: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct DeploymentSchedule {
    initial_fleet: f64,
    op_rate: f64,
    retirement_age: Option<f64>,
    segments: Vec<Segment>,
}

/// On-disk form of a schedule, validated on conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(default)]
    initial_fleet: f64,
    op_rate: f64,
    retirement_age: Option<f64>,
    segments: Vec<Segment>,
}

impl TryFrom<RawSchedule> for DeploymentSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        DeploymentSchedule::new(
            raw.initial_fleet,
            raw.segments,
            raw.op_rate,
            raw.retirement_age,
        )
    }
}

impl From<DeploymentSchedule> for RawSchedule {
    fn from(s: DeploymentSchedule) -> Self {
        RawSchedule {
            initial_fleet: s.initial_fleet,
            op_rate: s.op_rate,
            retirement_age: s.retirement_age,
            segments: s.segments,
        }
    }
}

fn schedule_err(msg: String) -> Error {
    Error::InvalidSchedule(msg)
}

/// `∫₀ᵗ clamp(τ - start, 0, width) dτ`: the time integral of a unit-rate
/// production ramp that runs from `start` for `width`.
fn ramp_integral(t: f64, start: f64, width: f64) -> f64 {
    let d = t - start;
    if d <= 0.0 {
        0.0
    } else if d <= width {
        0.5 * d * d
    } else {
        width * (d - 0.5 * width)
    }
}

fn ramp(t: f64, start: f64, width: f64) -> f64 {
    (t - start).clamp(0.0, width)
}

impl DeploymentSchedule {
    pub fn new(
        initial_fleet: f64,
        segments: Vec<Segment>,
        op_rate: f64,
        retirement_age: Option<f64>,
    ) -> Result<Self> {
        if !(initial_fleet.is_finite() && initial_fleet >= 0.0) {
            return Err(schedule_err(format!(
                "initial_fleet: {initial_fleet} is not a finite nonnegative count"
            )));
        }
        if !(op_rate.is_finite() && op_rate > 0.0) {
            return Err(schedule_err(format!("op_rate: {op_rate} must be positive")));
        }
        if let Some(age) = retirement_age {
            if !(age.is_finite() && age > 0.0) {
                return Err(schedule_err(format!(
                    "retirement_age: {age} must be positive or null"
                )));
            }
        }
        let first = segments
            .first()
            .ok_or_else(|| schedule_err("segments: at least one segment is required".into()))?;
        if first.start != 0.0 {
            return Err(schedule_err(format!(
                "segments[0].start: first segment must start at 0, got {}",
                first.start
            )));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.rate.is_finite() && seg.rate >= 0.0) {
                return Err(schedule_err(format!(
                    "segments[{i}].rate: {} is not a finite nonnegative rate",
                    seg.rate
                )));
            }
            if !seg.start.is_finite() {
                return Err(schedule_err(format!("segments[{i}].start: not finite")));
            }
            if i > 0 && seg.start <= segments[i - 1].start {
                return Err(schedule_err(format!(
                    "segments[{i}].start: {} does not follow {}",
                    seg.start,
                    segments[i - 1].start
                )));
            }
        }
        Ok(DeploymentSchedule {
            initial_fleet,
            op_rate,
            retirement_age,
            segments,
        })
    }

    /// Production at constant `rate` from `t = 0`, no initial fleet, no retirement.
    pub fn linear(rate: f64, op_rate: f64) -> Result<Self> {
        Self::new(0.0, vec![Segment { start: 0.0, rate }], op_rate, None)
    }

    /// A fixed fleet of `n` vehicles with no production.
    pub fn constant_fleet(n: f64, op_rate: f64) -> Result<Self> {
        Self::new(
            n,
            vec![Segment {
                start: 0.0,
                rate: 0.0,
            }],
            op_rate,
            None,
        )
    }

    /// Production at `rate`, multiplied by `factor` from `step_time` on.
    pub fn step(rate: f64, step_time: f64, factor: f64, op_rate: f64) -> Result<Self> {
        Self::new(
            0.0,
            vec![
                Segment { start: 0.0, rate },
                Segment {
                    start: step_time,
                    rate: rate * factor,
                },
            ],
            op_rate,
            None,
        )
    }

    pub fn with_retirement(mut self, age: Option<f64>) -> Result<Self> {
        self.retirement_age = age;
        Self::new(
            self.initial_fleet,
            self.segments,
            self.op_rate,
            self.retirement_age,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| schedule_err(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn initial_fleet(&self) -> f64 {
        self.initial_fleet
    }

    pub fn op_rate(&self) -> f64 {
        self.op_rate
    }

    pub fn retirement_age(&self) -> Option<f64> {
        self.retirement_age
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Every segment multiplied by `c`, as is the initial fleet.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.initial_fleet * c,
            self.segments
                .iter()
                .map(|s| Segment {
                    start: s.start,
                    rate: s.rate * c,
                })
                .collect(),
            self.op_rate,
            self.retirement_age,
        )
    }

    /// The schedule as experienced up to `t`: the rate that produced the
    /// fleet just before `t` continues indefinitely, and changes starting at
    /// or after `t` are dropped.
    pub fn frozen_at(&self, t: f64) -> Self {
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .enumerate()
            .filter(|(i, s)| *i == 0 || s.start < t)
            .map(|(_, s)| *s)
            .collect();
        DeploymentSchedule {
            segments,
            ..self.clone()
        }
    }

    fn widths(&self) -> impl Iterator<Item = (&Segment, f64)> {
        self.segments.iter().enumerate().map(|(i, s)| {
            let width = self
                .segments
                .get(i + 1)
                .map_or(f64::INFINITY, |n| n.start - s.start);
            (s, width)
        })
    }

    /// Production rate in effect at `t` (zero before `t = 0`).
    pub fn rate_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.segments
            .iter()
            .rev()
            .find(|s| s.start <= t)
            .map_or(0.0, |s| s.rate)
    }

    /// Vehicles produced on `[0, t]`.
    pub fn cumulative_production(&self, t: f64) -> f64 {
        self.widths()
            .map(|(s, w)| s.rate * ramp(t, s.start, w))
            .sum()
    }

    /// `∫₀ᵗ cumulative_production(τ) dτ`, zero for `t <= 0`.
    fn production_integral(&self, t: f64) -> f64 {
        self.widths()
            .map(|(s, w)| s.rate * ramp_integral(t, s.start, w))
            .sum()
    }

    /// Vehicles in service at `t`.
    pub fn fleet_size(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self.retirement_age {
            None => self.initial_fleet + self.cumulative_production(t),
            Some(age) => {
                let initial = if t < age { self.initial_fleet } else { 0.0 };
                let alive = self.cumulative_production(t) - self.cumulative_production(t - age);
                initial + alive.max(0.0)
            }
        }
    }

    /// Rate of change of the fleet size on an open interval around `t` that
    /// contains no breakpoint.
    pub(crate) fn fleet_slope(&self, t: f64) -> f64 {
        match self.retirement_age {
            None => self.rate_at(t),
            Some(age) => self.rate_at(t) - self.rate_at(t - age),
        }
    }

    /// Total demands accumulated by the fleet on `[0, t]`.
    pub fn cumulative_operation(&self, t: f64) -> OperationCount {
        let t = t.max(0.0);
        let vehicle_time = match self.retirement_age {
            None => self.initial_fleet * t + self.production_integral(t),
            Some(age) => {
                self.initial_fleet * t.min(age) + self.production_integral(t)
                    - self.production_integral(t - age)
            }
        };
        let demands = (self.op_rate * vehicle_time).max(0.0);
        OperationCount::new(demands).unwrap_or(OperationCount::ZERO)
    }

    /// Sorted times where the cumulative-operation polynomial changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut points: Vec<f64> = self.segments.iter().skip(1).map(|s| s.start).collect();
        if let Some(age) = self.retirement_age {
            points.extend(self.segments.iter().map(|s| s.start + age));
        }
        points.retain(|&p| p > 0.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
    }
}
