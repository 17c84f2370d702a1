use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::ident::{StateVarName, Value};

/// Discrete time point.
pub type Time = i64;

/// Closed integer interval `[start, end]`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Interval {
    pub start: Time,
    pub end: Time,
}

impl Interval {
    pub fn new(start: Time, end: Time) -> Option<Self> {
        (start <= end).then_some(Interval { start, end })
    }

    /// Panics when `start > end`.
    pub fn of(start: Time, end: Time) -> Self {
        Interval::new(start, end).unwrap_or_else(|| panic!("empty interval [{start},{end}]"))
    }

    pub fn point(t: Time) -> Self {
        Interval { start: t, end: t }
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: Time) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn covers(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::new(self.start.max(other.start), self.end.min(other.end))
    }

    pub fn points(&self) -> impl Iterator<Item = Time> {
        self.start..=self.end
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Segment {
    pub interval: Interval,
    pub value: Value,
}

impl Segment {
    pub fn new(interval: Interval, value: Value) -> Self {
        Segment { interval, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrajectoryError {
    #[error("{var}: segment {seg} lies outside the horizon {horizon}")]
    OutsideHorizon {
        var: StateVarName,
        seg: Interval,
        horizon: Interval,
    },
    #[error("{var}: segments {a} and {b} overlap")]
    Overlap {
        var: StateVarName,
        a: Interval,
        b: Interval,
    },
    #[error("{var}: value `{value}` is not boolean")]
    NotBoolean { var: StateVarName, value: Value },
}

/// A piecewise-constant assignment of values to state variables over a
/// horizon.
///
/// Only explicitly given segments are stored. Uncovered time points take the
/// declared default of their variable. Timelines of the implicit
/// `active`/`usedObject` variables whose segments all carry the implicit
/// default are dropped on construction; they carry no information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    horizon: Interval,
    timelines: BTreeMap<StateVarName, Vec<Segment>>,
}

impl Trajectory {
    pub fn new(
        horizon: Interval,
        timelines: impl IntoIterator<Item = (StateVarName, Vec<Segment>)>,
    ) -> Result<Self, TrajectoryError> {
        let mut map = BTreeMap::new();
        for (var, mut segs) in timelines {
            segs.sort();
            for s in &segs {
                if !horizon.covers(&s.interval) {
                    return Err(TrajectoryError::OutsideHorizon {
                        var,
                        seg: s.interval,
                        horizon,
                    });
                }
                if var.functor.as_str() == super::ident::ACTIVE
                    && var.is_implicit()
                    && !matches!(s.value, Value::Bool(_))
                {
                    return Err(TrajectoryError::NotBoolean {
                        var,
                        value: s.value.clone(),
                    });
                }
            }
            for w in segs.windows(2) {
                if w[0].interval.overlaps(&w[1].interval) {
                    return Err(TrajectoryError::Overlap {
                        var,
                        a: w[0].interval,
                        b: w[1].interval,
                    });
                }
            }
            if let Some(def) = var.implicit_default() {
                if segs.iter().all(|s| s.value == def) {
                    continue;
                }
            }
            if segs.is_empty() {
                continue;
            }
            map.insert(var, segs);
        }
        Ok(Trajectory {
            horizon,
            timelines: map,
        })
    }

    /// A trajectory where every state variable keeps its default.
    pub fn defaults(horizon: Interval) -> Self {
        Trajectory {
            horizon,
            timelines: BTreeMap::new(),
        }
    }

    pub fn horizon(&self) -> Interval {
        self.horizon
    }

    pub fn timelines(&self) -> &BTreeMap<StateVarName, Vec<Segment>> {
        &self.timelines
    }

    pub fn explicit_segment_count(&self) -> usize {
        self.timelines.values().map(Vec::len).sum()
    }

    /// Explicit value at `t`, or `None` when the default applies.
    pub fn explicit_value(&self, var: &StateVarName, t: Time) -> Option<&Value> {
        self.timelines
            .get(var)?
            .iter()
            .find(|s| s.interval.contains(t))
            .map(|s| &s.value)
    }
}
