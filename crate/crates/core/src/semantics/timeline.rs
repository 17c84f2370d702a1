use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{Domain, Interval, Segment, StateVarName, Time, Trajectory, Value};

/// One maximal constant-value interval of a state variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TimelineVar {
    pub state_var: StateVarName,
    /// 1-based position of the segment within its timeline.
    pub index: usize,
    pub interval: Interval,
    pub value: Value,
}

/// Piecewise-constant timelines covering a horizon without gaps.
///
/// Every stored timeline is a sequence of maximal segments: adjacent
/// segments always carry different values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timelines {
    horizon: Interval,
    vars: BTreeMap<StateVarName, Vec<Segment>>,
}

fn push_merged(out: &mut Vec<Segment>, interval: Interval, value: Value) {
    if let Some(last) = out.last_mut() {
        if last.value == value && last.interval.end + 1 == interval.start {
            last.interval.end = interval.end;
            return;
        }
    }
    out.push(Segment::new(interval, value));
}

impl Timelines {
    pub fn empty(horizon: Interval) -> Self {
        Timelines {
            horizon,
            vars: BTreeMap::new(),
        }
    }

    /// Adds or replaces the timeline of `var` from one value per time point
    /// of the horizon, starting at `horizon.start`.
    ///
    /// Panics if `values.len()` differs from the horizon length.
    pub fn insert_points(&mut self, var: StateVarName, values: &[Value]) {
        assert_eq!(values.len(), self.horizon.len(), "one value per time point");
        let mut segs = Vec::new();
        for (i, v) in values.iter().enumerate() {
            let t = self.horizon.start + i as Time;
            push_merged(&mut segs, Interval::point(t), v.clone());
        }
        self.vars.insert(var, segs);
    }

    /// Adds or replaces a timeline given as gap-free, ordered segments.
    /// Adjacent equal segments are merged.
    pub fn insert_segments(&mut self, var: StateVarName, segments: impl IntoIterator<Item = Segment>) {
        let mut segs = Vec::new();
        for s in segments {
            push_merged(&mut segs, s.interval, s.value);
        }
        debug_assert!(
            segs.first().map(|s| s.interval.start) == Some(self.horizon.start)
                && segs.last().map(|s| s.interval.end) == Some(self.horizon.end)
                && segs.windows(2).all(|w| w[0].interval.end + 1 == w[1].interval.start),
            "timeline of {var} must cover the horizon without gaps"
        );
        self.vars.insert(var, segs);
    }

    pub fn horizon(&self) -> Interval {
        self.horizon
    }

    pub fn contains(&self, var: &StateVarName) -> bool {
        self.vars.contains_key(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &StateVarName> {
        self.vars.keys()
    }

    /// Maximal segments of `var`. Panics if `var` has no timeline; compiled
    /// constraints only read variables in their scope.
    pub fn segments(&self, var: &StateVarName) -> &[Segment] {
        self.vars
            .get(var)
            .unwrap_or_else(|| panic!("no timeline for {var}"))
    }

    fn index_at(&self, var: &StateVarName, t: Time) -> usize {
        let segs = self.segments(var);
        segs.partition_point(|s| s.interval.end < t)
    }

    pub fn value_at(&self, var: &StateVarName, t: Time) -> &Value {
        let i = self.index_at(var, t);
        &self.segments(var)[i].value
    }

    pub fn segment_at(&self, var: &StateVarName, t: Time) -> TimelineVar {
        let i = self.index_at(var, t);
        self.timeline_var(var, i)
    }

    pub fn timeline_var(&self, var: &StateVarName, i: usize) -> TimelineVar {
        let s = &self.segments(var)[i];
        TimelineVar {
            state_var: var.clone(),
            index: i + 1,
            interval: s.interval,
            value: s.value.clone(),
        }
    }

    /// All sub-variables, ordered by state variable then segment index.
    pub fn timeline_vars(&self) -> Vec<TimelineVar> {
        self.vars
            .keys()
            .flat_map(|v| (0..self.segments(v).len()).map(move |i| self.timeline_var(v, i)))
            .collect()
    }

    /// All sub-variables of one timeline.
    pub fn timeline_vars_of(&self, var: &StateVarName) -> Vec<TimelineVar> {
        (0..self.segments(var).len())
            .map(|i| self.timeline_var(var, i))
            .collect()
    }

    /// Segments of `var` with value `true`, as sub-variables.
    pub fn true_segments(&self, var: &StateVarName) -> Vec<TimelineVar> {
        (0..self.segments(var).len())
            .filter(|&i| self.segments(var)[i].value.is_true())
            .map(|i| self.timeline_var(var, i))
            .collect()
    }

    /// Segments of `var` that intersect `within`.
    pub fn overlapping(&self, var: &StateVarName, within: Interval) -> Vec<TimelineVar> {
        (0..self.segments(var).len())
            .filter(|&i| self.segments(var)[i].interval.overlaps(&within))
            .map(|i| self.timeline_var(var, i))
            .collect()
    }

    /// The common refinement of the given timelines restricted to `within`:
    /// the coarsest partition of `within` on whose parts every listed
    /// variable is constant.
    pub fn refinement<'a>(
        &self,
        vars: impl IntoIterator<Item = &'a StateVarName>,
        within: Interval,
    ) -> Vec<Interval> {
        let mut cuts = vec![within.start];
        for var in vars {
            for s in self.segments(var) {
                if s.interval.start > within.start && s.interval.start <= within.end {
                    cuts.push(s.interval.start);
                }
            }
        }
        cuts.sort_unstable();
        cuts.dedup();
        let mut out = Vec::with_capacity(cuts.len());
        for (i, &c) in cuts.iter().enumerate() {
            let end = cuts.get(i + 1).map(|n| n - 1).unwrap_or(within.end);
            out.push(Interval::of(c, end));
        }
        out
    }

    /// Restricts every timeline to `[horizon.start, end]`.
    pub fn prefix(&self, end: Time) -> Timelines {
        let horizon = Interval::of(self.horizon.start, end.min(self.horizon.end));
        let vars = self
            .vars
            .iter()
            .map(|(k, segs)| {
                let cut = segs
                    .iter()
                    .filter_map(|s| {
                        s.interval
                            .intersect(&horizon)
                            .map(|iv| Segment::new(iv, s.value.clone()))
                    })
                    .collect();
                (k.clone(), cut)
            })
            .collect();
        Timelines { horizon, vars }
    }

    /// Rebuilds a trajectory, eliding segments that carry the default.
    pub fn to_trajectory(&self, dom: &Domain) -> Trajectory {
        let timelines = self.vars.iter().map(|(var, segs)| {
            let def = dom.default_value(var);
            let kept = segs
                .iter()
                .filter(|s| Some(&s.value) != def.as_ref())
                .cloned()
                .collect();
            (var.clone(), kept)
        });
        Trajectory::new(self.horizon, timelines).expect("timelines are well formed")
    }
}

/// Materializes every declared state variable of `dom` (implicit ones
/// included) as maximal segments over the trajectory's horizon, filling
/// unspecified time points with the declared default. Timelines in `traj`
/// for variables the domain does not declare are skipped.
pub fn segment_trajectory(traj: &Trajectory, dom: &Domain) -> Timelines {
    let horizon = traj.horizon();
    let mut out = Timelines::empty(horizon);
    for decl in dom.all_state_vars() {
        let def = decl.default_value();
        let mut segs = Vec::new();
        let mut t = horizon.start;
        for s in traj.timelines().get(&decl.name).map(Vec::as_slice).unwrap_or(&[]) {
            if s.interval.start > t {
                segs.push(Segment::new(Interval::of(t, s.interval.start - 1), def.clone()));
            }
            segs.push(s.clone());
            t = s.interval.end + 1;
        }
        if t <= horizon.end {
            segs.push(Segment::new(Interval::of(t, horizon.end), def.clone()));
        }
        out.insert_segments(decl.name, segs);
    }
    out
}
