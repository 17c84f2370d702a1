//! Chronological depth-first search over time points.
//!
//! The search space is the set of trajectories in which
//! - an agent only activates a behavior it has some affordance for,
//! - `usedObject(b,a)` is `none` outside activations and, during one
//!   activation, a single constant value that is `none` or an afforded
//!   target,
//! - an agent runs at most one behavior per time point unless the domain
//!   allows concurrent behaviors,
//! - each `(agent, behavior)` pair has at most `k` activation segments and
//!   each other state variable at most `k` maximal segments.
//!
//! Only state variables some constraint reads are searched; all others keep
//! their defaults. Within those bounds the search is exhaustive, so failure
//! means no adherent trajectory exists.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Domain, Ident, Institution, Interval, StateVarName, Time, Value, POSITION};
use crate::semantics::{CompiledConstraint, TemporalClass, Timelines};
use crate::DerivedSets;

struct Pair {
    agent: usize,
    behavior: Ident,
    active: StateVarName,
    used: StateVarName,
    /// Values `usedObject` may take during an activation, `none` first.
    objects: Vec<Value>,
    allowed: bool,
}

struct Extra {
    var: StateVarName,
    values: Vec<Value>,
    default: Value,
    /// Pairs whose activation makes a built-in constraint read this variable.
    readers: Vec<usize>,
    /// Read by a constraint whose reading pattern is unknown.
    always: bool,
}

/// One activation that some cosafety constraint still needs.
#[derive(Clone)]
struct Requirement {
    agent: usize,
    behaviors: BTreeSet<Ident>,
    /// `None` accepts any used object.
    objects: Option<BTreeSet<Ident>>,
}

impl Requirement {
    fn accepts(&self, behavior: &Ident, used: &Value) -> bool {
        self.behaviors.contains(behavior)
            && match &self.objects {
                None => true,
                Some(os) => used.as_sym().is_some_and(|o| os.contains(o)),
            }
    }

    fn disjoint(&self, other: &Requirement) -> bool {
        if self.behaviors.is_disjoint(&other.behaviors) {
            return true;
        }
        match (&self.objects, &other.objects) {
            (Some(a), Some(b)) => a.is_disjoint(b),
            _ => false,
        }
    }

    fn size(&self) -> usize {
        self.behaviors.len() * self.objects.as_ref().map_or(usize::MAX / 4, BTreeSet::len)
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Active(usize),
    Used(usize),
    Extra(usize),
}

#[derive(Clone, Copy)]
enum Choice {
    Idle,
    Continue(usize),
    New(usize, usize),
}

pub(super) struct Search<'a> {
    horizon: Interval,
    k: usize,
    concurrent: bool,
    pairs: Vec<Pair>,
    /// Pair indices per relevant agent.
    agents: Vec<Vec<usize>>,
    extras: Vec<Extra>,
    requirements: Vec<Requirement>,
    constraints: &'a [CompiledConstraint],
    /// Decision units of one time point: agents, or pairs when behaviors may overlap.
    units: Vec<Vec<usize>>,
    slots: BTreeMap<StateVarName, Slot>,
    /// Safety constraints decidable once decision `i` of a time point is made;
    /// decisions are the units followed by the extra variables.
    checks: Vec<Vec<usize>>,
    /// Constraints evaluated only on complete trajectories.
    final_checks: Vec<usize>,
    /// Only activations that advance an open requirement are tried.
    progress_only: bool,
    // Mutable state.
    active: Vec<Vec<bool>>,
    used: Vec<Vec<Value>>,
    counts: Vec<usize>,
    total: usize,
    budget: usize,
    /// (pair, used object) of every activation started so far.
    started: Vec<(usize, Value)>,
    extra_vals: Vec<Vec<Value>>,
    extra_segments: Vec<usize>,
}

/// Qualifiers under which dropping an activation that advances no open
/// requirement never turns an adherent trajectory into a violating one.
fn monotone(q: &str) -> bool {
    matches!(
        q,
        "must" | "mustNot" | "use" | "at" | "atUsed" | "before" | "mustToward" | "mustEach"
    )
}

fn builtin_reader(q: &str) -> bool {
    matches!(q, "at" | "atUsed")
}

impl<'a> Search<'a> {
    pub(super) fn new(
        inst: &Institution,
        dom: &Domain,
        derived: &DerivedSets,
        constraints: &'a [CompiledConstraint],
        horizon: Interval,
        k: usize,
    ) -> Self {
        let scope: BTreeSet<StateVarName> = constraints
            .iter()
            .flat_map(|c| c.scope.iter().cloned())
            .collect();

        let mut agent_names: BTreeSet<Ident> = BTreeSet::new();
        let mut pair_keys: BTreeSet<(Ident, Ident)> = BTreeSet::new();
        for v in &scope {
            if v.is_implicit() {
                pair_keys.insert((v.args[1].clone(), v.args[0].clone()));
                agent_names.insert(v.args[1].clone());
            }
        }
        let agent_list: Vec<Ident> = agent_names.into_iter().collect();
        let mut agents = vec![Vec::new(); agent_list.len()];
        let mut pairs = Vec::new();
        for (a, b) in pair_keys {
            let ai = agent_list.binary_search(&a).expect("collected above");
            let used = StateVarName::used_object(&b, &a);
            let mut objects = vec![Value::None];
            if scope.contains(&used) {
                objects.extend(dom.affordances_of(&a, &b).cloned().map(Value::Sym));
            }
            let allowed = dom.affordances_of(&a, &b).next().is_some();
            agents[ai].push(pairs.len());
            pairs.push(Pair {
                agent: ai,
                allowed,
                active: StateVarName::active(&b, &a),
                used,
                behavior: b,
                objects,
            });
        }

        let mut extras = Vec::new();
        for v in scope.iter().filter(|v| !v.is_implicit()) {
            let decl = dom.state_var(v).expect("compiled constraints read declared variables");
            let mut readers = BTreeSet::new();
            let mut always = false;
            for c in constraints.iter().filter(|c| c.scope.contains(v)) {
                if !builtin_reader(c.source.qualifier.as_str()) || v.functor.as_str() != POSITION {
                    always = true;
                    continue;
                }
                let s = c.source.statement();
                let targets = derived.targets(inst, &s.object);
                for ag in derived.agents(&s.subject) {
                    if &v.args[0] != ag && !targets.contains(&v.args[0]) {
                        continue;
                    }
                    for b in derived.behaviors(&s.predicate) {
                        let key = StateVarName::active(b, ag);
                        if let Some(p) = pairs.iter().position(|p| p.active == key) {
                            readers.insert(p);
                        }
                    }
                }
            }
            extras.push(Extra {
                var: v.clone(),
                values: dom.values_of(&decl).into_iter().collect(),
                default: decl.default_value(),
                readers: readers.into_iter().collect(),
                always,
            });
        }

        let mut requirements = Vec::new();
        for c in constraints {
            let q = c.source.qualifier.as_str();
            if !matches!(q, "must" | "mustToward" | "mustEach") {
                continue;
            }
            let s = c.source.statement();
            let behaviors: BTreeSet<Ident> = derived.behaviors(&s.predicate).clone();
            let targets = derived.targets(inst, &s.object);
            for ag in derived.agents(&s.subject) {
                let Ok(ai) = agent_list.binary_search(ag) else {
                    continue;
                };
                match q {
                    "must" => requirements.push(Requirement {
                        agent: ai,
                        behaviors: behaviors.clone(),
                        objects: None,
                    }),
                    "mustToward" => requirements.push(Requirement {
                        agent: ai,
                        behaviors: behaviors.clone(),
                        objects: Some(targets.clone()),
                    }),
                    _ => {
                        for o in targets {
                            requirements.push(Requirement {
                                agent: ai,
                                behaviors: behaviors.clone(),
                                objects: Some([o.clone()].into()),
                            });
                        }
                    }
                }
            }
        }

        let concurrent = dom.concurrent_behaviors;
        let units: Vec<Vec<usize>> = if concurrent {
            (0..pairs.len()).map(|p| vec![p]).collect()
        } else {
            agents.clone()
        };
        let mut slots = BTreeMap::new();
        let mut decision_of = BTreeMap::new();
        for (ui, unit) in units.iter().enumerate() {
            for &p in unit {
                slots.insert(pairs[p].active.clone(), Slot::Active(p));
                slots.insert(pairs[p].used.clone(), Slot::Used(p));
                decision_of.insert(pairs[p].active.clone(), ui);
                decision_of.insert(pairs[p].used.clone(), ui);
            }
        }
        for (e, x) in extras.iter().enumerate() {
            slots.insert(x.var.clone(), Slot::Extra(e));
            decision_of.insert(x.var.clone(), units.len() + e);
        }
        let mut checks = vec![Vec::new(); units.len() + extras.len()];
        let mut final_checks = Vec::new();
        for (ci, c) in constraints.iter().enumerate() {
            let last = c.scope.iter().map(|v| decision_of[v]).max();
            match (c.class, last) {
                (TemporalClass::Safety, Some(d)) => checks[d].push(ci),
                _ => final_checks.push(ci),
            }
        }

        let n_pairs = pairs.len();
        let n_extras = extras.len();
        Search {
            units,
            slots,
            checks,
            final_checks,
            progress_only: constraints.iter().all(|c| monotone(c.source.qualifier.as_str())),
            horizon,
            k,
            concurrent,
            pairs,
            agents,
            extras,
            requirements,
            constraints,
            active: vec![Vec::new(); n_pairs],
            used: vec![Vec::new(); n_pairs],
            counts: vec![0; n_pairs],
            total: 0,
            budget: 0,
            started: Vec::new(),
            extra_vals: vec![Vec::new(); n_extras],
            extra_segments: vec![0; n_extras],
        }
    }

    /// Largest useful activation budget.
    pub(super) fn max_budget(&self) -> usize {
        let bound = self.pairs.iter().filter(|p| p.allowed).count() * self.k;
        if self.progress_only {
            bound.min(self.requirements.len())
        } else {
            bound
        }
    }

    fn satisfied(&self, r: &Requirement) -> bool {
        self.started
            .iter()
            .any(|(p, u)| self.pairs[*p].agent == r.agent && r.accepts(&self.pairs[*p].behavior, u))
    }

    /// Per agent, the size of a set of open requirements no two of which can
    /// share an activation.
    fn lower_bounds(&self) -> Vec<usize> {
        let mut open: Vec<&Requirement> = self
            .requirements
            .iter()
            .filter(|r| !self.satisfied(r))
            .collect();
        open.sort_by_key(|r| r.size());
        let mut chosen: Vec<Vec<&Requirement>> = vec![Vec::new(); self.agents.len()];
        for r in open {
            let c = &mut chosen[r.agent];
            if c.iter().all(|x| x.disjoint(r)) {
                c.push(r);
            }
        }
        chosen.iter().map(Vec::len).collect()
    }

    pub(super) fn initial_bound(&self) -> usize {
        self.lower_bounds().iter().sum()
    }

    fn prune(&self, ti: usize) -> bool {
        let lbs = self.lower_bounds();
        let need: usize = lbs.iter().sum();
        if need > self.budget - self.total {
            return true;
        }
        let points_left = self.horizon.len() - ti;
        !self.concurrent && lbs.iter().any(|&n| n > points_left)
    }

    fn progress(&self, p: usize, u: &Value) -> bool {
        let pair = &self.pairs[p];
        self.requirements.iter().any(|r| {
            r.agent == pair.agent && r.accepts(&pair.behavior, u) && !self.satisfied(r)
        })
    }

    fn was_active(&self, p: usize, ti: usize) -> bool {
        ti > 0 && self.active[p][ti - 1]
    }

    /// Ordered choices for the pairs in `unit`: progress-making new
    /// activations, idle, continuing, then other new activations.
    fn choices(&self, unit: &[usize], ti: usize) -> Vec<Choice> {
        let mut progress = Vec::new();
        let mut other = Vec::new();
        let mut cont = Vec::new();
        for &p in unit {
            let pair = &self.pairs[p];
            if self.was_active(p, ti) {
                cont.push(Choice::Continue(p));
                continue;
            }
            if !pair.allowed || self.counts[p] >= self.k || self.total >= self.budget {
                continue;
            }
            for (oi, u) in pair.objects.iter().enumerate() {
                if self.progress(p, u) {
                    progress.push(Choice::New(p, oi));
                } else if !self.progress_only {
                    other.push(Choice::New(p, oi));
                }
            }
        }
        let mut out = progress;
        out.push(Choice::Idle);
        out.extend(cont);
        out.extend(other);
        out
    }

    fn apply(&mut self, unit: &[usize], choice: Choice, ti: usize) {
        for &p in unit {
            self.active[p].push(false);
            self.used[p].push(Value::None);
        }
        match choice {
            Choice::Idle => {}
            Choice::Continue(p) => {
                let u = self.used[p][ti - 1].clone();
                self.active[p][ti] = true;
                self.used[p][ti] = u;
            }
            Choice::New(p, oi) => {
                let u = self.pairs[p].objects[oi].clone();
                self.active[p][ti] = true;
                self.used[p][ti] = u.clone();
                self.counts[p] += 1;
                self.total += 1;
                self.started.push((p, u));
            }
        }
    }

    fn undo(&mut self, unit: &[usize], choice: Choice) {
        for &p in unit {
            self.active[p].pop();
            self.used[p].pop();
        }
        if let Choice::New(p, _) = choice {
            self.counts[p] -= 1;
            self.total -= 1;
            self.started.pop();
        }
    }

    fn timelines(&self, ti: usize) -> Timelines {
        let end = self.horizon.start + ti as Time;
        let mut tl = Timelines::empty(Interval::of(self.horizon.start, end));
        for (p, pair) in self.pairs.iter().enumerate() {
            let act: Vec<Value> = self.active[p][..=ti].iter().map(|&b| Value::Bool(b)).collect();
            tl.insert_points(pair.active.clone(), &act);
            tl.insert_points(pair.used.clone(), &self.used[p][..=ti]);
        }
        for (e, extra) in self.extras.iter().enumerate() {
            tl.insert_points(extra.var.clone(), &self.extra_vals[e][..=ti]);
        }
        tl
    }

    /// Timelines up to time index `ti` of the variables `c` reads.
    fn scoped_timelines(&self, c: &CompiledConstraint, ti: usize) -> Timelines {
        let end = self.horizon.start + ti as Time;
        let mut tl = Timelines::empty(Interval::of(self.horizon.start, end));
        for v in &c.scope {
            match self.slots[v] {
                Slot::Active(p) => {
                    let act: Vec<Value> =
                        self.active[p][..=ti].iter().map(|&b| Value::Bool(b)).collect();
                    tl.insert_points(v.clone(), &act);
                }
                Slot::Used(p) => tl.insert_points(v.clone(), &self.used[p][..=ti]),
                Slot::Extra(e) => tl.insert_points(v.clone(), &self.extra_vals[e][..=ti]),
            }
        }
        tl
    }

    fn safe_after(&self, decision: usize, ti: usize) -> bool {
        self.checks[decision].iter().all(|&ci| {
            let c = &self.constraints[ci];
            c.evaluate(&self.scoped_timelines(c, ti)).satisfied
        })
    }

    /// Runs the search with a total activation budget; on success the
    /// state holds the found trajectory.
    pub(super) fn run(&mut self, budget: usize) -> bool {
        self.budget = budget;
        self.step(0)
    }

    fn step(&mut self, ti: usize) -> bool {
        if ti == self.horizon.len() {
            let tl = self.timelines(ti - 1);
            return self
                .final_checks
                .iter()
                .all(|&ci| self.constraints[ci].evaluate(&tl).satisfied);
        }
        if self.prune(ti) {
            return false;
        }
        self.unit(ti, 0)
    }

    fn unit(&mut self, ti: usize, ui: usize) -> bool {
        if ui == self.units.len() {
            return self.extra(ti, 0);
        }
        let unit = self.units[ui].clone();
        for choice in self.choices(&unit, ti) {
            self.apply(&unit, choice, ti);
            if self.safe_after(ui, ti) && self.unit(ti, ui + 1) {
                return true;
            }
            self.undo(&unit, choice);
        }
        false
    }

    fn extra(&mut self, ti: usize, ei: usize) -> bool {
        if ei == self.extras.len() {
            return self.step(ti + 1);
        }
        let x = &self.extras[ei];
        let prev = if ti == 0 {
            x.default.clone()
        } else {
            self.extra_vals[ei][ti - 1].clone()
        };
        let read = ti == 0 || x.always || x.readers.iter().any(|&p| self.active[p][ti]);
        let mut options = vec![prev.clone()];
        if read {
            options.extend(x.values.iter().filter(|v| **v != prev).cloned());
        }
        let decision = self.units.len() + ei;
        for v in options {
            let new_segment = ti == 0 || v != prev;
            if new_segment && self.extra_segments[ei] >= self.k {
                continue;
            }
            self.extra_vals[ei].push(v);
            if new_segment {
                self.extra_segments[ei] += 1;
            }
            if self.safe_after(decision, ti) && self.extra(ti, ei + 1) {
                return true;
            }
            if new_segment {
                self.extra_segments[ei] -= 1;
            }
            self.extra_vals[ei].pop();
        }
        false
    }

    pub(super) fn activations(&self) -> usize {
        self.total
    }

    /// The found trajectory as timelines of the searched variables.
    pub(super) fn result(&self) -> Timelines {
        self.timelines(self.horizon.len() - 1)
    }
}
