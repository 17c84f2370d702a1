//! Search for admissible groundings of an institution into a domain.
//!
//! Role assignments are enumerated first, in lexicographic order over the
//! sorted agents where each agent tries "unassigned" before the sorted
//! roles, and pruned by the cardinality bounds. For each role assignment
//! that meets every bound, the act and artifact relations are completed
//! according to a [`CoverPolicy`].
//!
//! Admissibility is monotone in the act and artifact relations, so a
//! relation pair is inclusion-minimal exactly when no single free pair can
//! be dropped without losing admissibility.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::admissibility::is_admissible;
use crate::model::{CardBounds, Domain, Grounding, Ident, Institution};

type Pairs = BTreeSet<(Ident, Ident)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverPolicy {
    /// Fixed pairs plus an inclusion-minimal set of free pairs.
    #[default]
    Minimal,
    /// Fixed pairs, or every pair when the relation is free.
    Maximal,
}

/// Relations fixed by the caller. A relation that is `Some` is used exactly
/// as given; a `None` relation is searched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fragment {
    pub roles: Option<Pairs>,
    pub acts: Option<Pairs>,
    pub arts: Option<Pairs>,
}

impl Fragment {
    /// Fixes each relation that is non-empty in `g`.
    pub fn from_grounding(g: &Grounding) -> Self {
        let fix = |p: &Pairs| (!p.is_empty()).then(|| p.clone());
        Fragment {
            roles: fix(&g.roles),
            acts: fix(&g.acts),
            arts: fix(&g.arts),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundingQuery<'a> {
    pub inst: &'a Institution,
    pub dom: &'a Domain,
    pub fixed: Fragment,
    pub limit: Option<usize>,
    pub policy: CoverPolicy,
}

impl<'a> GroundingQuery<'a> {
    pub fn new(inst: &'a Institution, dom: &'a Domain) -> Self {
        GroundingQuery {
            inst,
            dom,
            fixed: Fragment::default(),
            limit: None,
            policy: CoverPolicy::Minimal,
        }
    }

    pub fn fixing(mut self, fixed: Fragment) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn policy(mut self, policy: CoverPolicy) -> Self {
        self.policy = policy;
        self
    }
}

/// Odometer over role assignments with cardinality pruning.
struct RoleMaps {
    agents: Vec<Ident>,
    options: Vec<Option<Ident>>,
    bounds: BTreeMap<Ident, CardBounds>,
    stack: Vec<usize>,
    counts: BTreeMap<Ident, usize>,
    descending: bool,
    done: bool,
}

impl RoleMaps {
    fn new(inst: &Institution, dom: &Domain) -> Self {
        let options = std::iter::once(None)
            .chain(inst.roles.iter().cloned().map(Some))
            .collect();
        RoleMaps {
            agents: dom.agents.iter().cloned().collect(),
            options,
            bounds: inst
                .roles
                .iter()
                .map(|r| (r.clone(), inst.cardinality.bounds_for(r)))
                .collect(),
            stack: Vec::new(),
            counts: inst.roles.iter().map(|r| (r.clone(), 0)).collect(),
            descending: true,
            done: false,
        }
    }

    fn apply(&mut self, opt: usize, delta: isize) {
        if let Some(r) = &self.options[opt] {
            let c = self.counts.get_mut(r).expect("declared role");
            *c = c.checked_add_signed(delta).expect("count stays non-negative");
        }
    }

    fn feasible(&self) -> bool {
        let remaining = self.agents.len() - self.stack.len();
        let mut missing = 0usize;
        for (r, b) in &self.bounds {
            let c = self.counts[r];
            if !b.max.admits(c) {
                return false;
            }
            missing += (b.min as usize).saturating_sub(c);
        }
        missing <= remaining
    }

    fn current(&self) -> Pairs {
        self.stack
            .iter()
            .zip(&self.agents)
            .filter_map(|(&o, a)| self.options[o].clone().map(|r| (r, a.clone())))
            .collect()
    }
}

impl Iterator for RoleMaps {
    type Item = Pairs;

    fn next(&mut self) -> Option<Pairs> {
        loop {
            if self.done {
                return None;
            }
            if self.descending {
                if self.stack.len() == self.agents.len() {
                    self.descending = false;
                    // feasible() with no agents left means every minimum is met.
                    if self.feasible() {
                        return Some(self.current());
                    }
                    continue;
                }
                self.stack.push(0);
                self.apply(0, 1);
                self.descending = self.feasible();
            } else {
                let Some(i) = self.stack.pop() else {
                    self.done = true;
                    continue;
                };
                self.apply(i, -1);
                if i + 1 < self.options.len() {
                    self.stack.push(i + 1);
                    self.apply(i + 1, 1);
                    self.descending = self.feasible();
                }
            }
        }
    }
}

fn all_pairs(left: &BTreeSet<Ident>, right: &BTreeSet<Ident>) -> Pairs {
    left.iter()
        .flat_map(|l| right.iter().map(move |r| (l.clone(), r.clone())))
        .collect()
}

struct CoverSearch<'a> {
    inst: &'a Institution,
    dom: &'a Domain,
    roles: Pairs,
    fixed_acts: Option<&'a Pairs>,
    fixed_arts: Option<&'a Pairs>,
    seen: BTreeSet<(Pairs, Pairs)>,
    found: BTreeSet<(Pairs, Pairs)>,
}

impl CoverSearch<'_> {
    fn grounding(&self, acts: &Pairs, arts: &Pairs) -> Grounding {
        Grounding {
            roles: self.roles.clone(),
            acts: acts.clone(),
            arts: arts.clone(),
        }
    }

    fn admissible(&self, acts: &Pairs, arts: &Pairs) -> bool {
        is_admissible(self.inst, self.dom, &self.grounding(acts, arts)).admissible
    }

    fn is_minimal(&self, acts: &Pairs, arts: &Pairs) -> bool {
        let free_acts = acts
            .iter()
            .filter(|p| !self.fixed_acts.is_some_and(|f| f.contains(*p)));
        for p in free_acts {
            let mut fewer = acts.clone();
            fewer.remove(p);
            if self.admissible(&fewer, arts) {
                return false;
            }
        }
        let free_arts = arts
            .iter()
            .filter(|p| !self.fixed_arts.is_some_and(|f| f.contains(*p)));
        for p in free_arts {
            let mut fewer = arts.clone();
            fewer.remove(p);
            if self.admissible(acts, &fewer) {
                return false;
            }
        }
        true
    }

    fn search(&mut self, acts: Pairs, arts: Pairs) {
        if !self.seen.insert((acts.clone(), arts.clone())) {
            return;
        }
        let report = is_admissible(self.inst, self.dom, &self.grounding(&acts, &arts));
        let Some(first) = report.failed_obligations.first() else {
            if report.admissible && self.is_minimal(&acts, &arts) {
                self.found.insert((acts, arts));
            }
            return;
        };
        let s = first.norm.statement();
        let agent = &first.agent;
        let object_is_role = self.inst.roles.contains(&s.object);
        let targets: Vec<Ident> = if object_is_role {
            self.roles
                .iter()
                .filter(|(r, _)| r == &s.object)
                .map(|(_, a)| a.clone())
                .collect()
        } else {
            self.dom.objects.iter().cloned().collect()
        };
        for b in &self.dom.behaviors {
            let act_pair = (s.predicate.clone(), b.clone());
            if self.fixed_acts.is_some_and(|f| !f.contains(&act_pair)) {
                continue;
            }
            for o in &targets {
                if !self.dom.affords(agent, b, o) {
                    continue;
                }
                let art_pair = (s.object.clone(), o.clone());
                if !object_is_role && self.fixed_arts.is_some_and(|f| !f.contains(&art_pair)) {
                    continue;
                }
                let mut acts2 = acts.clone();
                acts2.insert(act_pair.clone());
                let mut arts2 = arts.clone();
                if !object_is_role {
                    arts2.insert(art_pair);
                }
                self.search(acts2, arts2);
            }
        }
    }
}

/// Lazily produces admissible groundings in a deterministic order.
pub struct AdmissibleGroundings<'a> {
    query: GroundingQuery<'a>,
    role_maps: Box<dyn Iterator<Item = Pairs> + 'a>,
    pending: VecDeque<Grounding>,
    emitted: usize,
}

impl<'a> AdmissibleGroundings<'a> {
    fn completions(&self, roles: Pairs) -> Vec<Grounding> {
        let q = &self.query;
        match q.policy {
            CoverPolicy::Maximal => {
                let g = Grounding {
                    roles,
                    acts: q
                        .fixed
                        .acts
                        .clone()
                        .unwrap_or_else(|| all_pairs(&q.inst.acts, &q.dom.behaviors)),
                    arts: q
                        .fixed
                        .arts
                        .clone()
                        .unwrap_or_else(|| all_pairs(&q.inst.arts, &q.dom.objects)),
                };
                if is_admissible(q.inst, q.dom, &g).admissible {
                    vec![g]
                } else {
                    Vec::new()
                }
            }
            CoverPolicy::Minimal => {
                let mut cs = CoverSearch {
                    inst: q.inst,
                    dom: q.dom,
                    roles: roles.clone(),
                    fixed_acts: q.fixed.acts.as_ref(),
                    fixed_arts: q.fixed.arts.as_ref(),
                    seen: BTreeSet::new(),
                    found: BTreeSet::new(),
                };
                cs.search(
                    q.fixed.acts.clone().unwrap_or_default(),
                    q.fixed.arts.clone().unwrap_or_default(),
                );
                cs.found
                    .into_iter()
                    .map(|(acts, arts)| Grounding {
                        roles: roles.clone(),
                        acts,
                        arts,
                    })
                    .collect()
            }
        }
    }
}

impl Iterator for AdmissibleGroundings<'_> {
    type Item = Grounding;

    fn next(&mut self) -> Option<Grounding> {
        if self.query.limit.is_some_and(|l| self.emitted >= l) {
            return None;
        }
        loop {
            if let Some(g) = self.pending.pop_front() {
                self.emitted += 1;
                return Some(g);
            }
            let roles = self.role_maps.next()?;
            self.pending = self.completions(roles).into();
        }
    }
}

pub fn enumerate_admissible(query: GroundingQuery<'_>) -> AdmissibleGroundings<'_> {
    let role_maps: Box<dyn Iterator<Item = Pairs>> = match &query.fixed.roles {
        Some(fixed) => {
            let g = Grounding {
                roles: fixed.clone(),
                ..Grounding::default()
            };
            let ok = crate::admissibility::cardinality_satisfied(query.inst, &g)
                .iter()
                .all(|c| c.ok);
            Box::new(ok.then(|| fixed.clone()).into_iter())
        }
        None => Box::new(RoleMaps::new(query.inst, query.dom)),
    };
    AdmissibleGroundings {
        query,
        role_maps,
        pending: VecDeque::new(),
        emitted: 0,
    }
}

pub fn find_grounding(query: GroundingQuery<'_>) -> Option<Grounding> {
    enumerate_admissible(query).next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{id, stmt, Affordance, Norm};

    fn toy() -> (Institution, Domain) {
        let mut inst = Institution::new(id("t"));
        inst.roles = [id("A"), id("B")].into();
        inst.acts = [id("Do")].into();
        inst.arts = [id("Thing")].into();
        inst.norms.insert(Norm::unary("must", stmt("A", "Do", "Thing")));
        inst.cardinality.bounds.insert(id("A"), CardBounds::new(1, 1));
        let mut dom = Domain::new(id("d"));
        dom.agents = [id("x"), id("y")].into();
        dom.behaviors = [id("b1"), id("b2")].into();
        dom.objects = [id("o")].into();
        dom.affordances.insert(Affordance::new(id("x"), id("b1"), id("o")));
        dom.affordances.insert(Affordance::new(id("y"), id("b2"), id("o")));
        (inst, dom)
    }

    #[test]
    fn role_maps_respect_cardinality() {
        let (inst, dom) = toy();
        let maps: Vec<_> = RoleMaps::new(&inst, &dom).collect();
        // Exactly one A among two agents; the other is unassigned or B.
        assert_eq!(maps.len(), 4);
        assert!(maps.iter().all(|m| m.iter().filter(|(r, _)| r.as_str() == "A").count() == 1));
    }

    #[test]
    fn minimal_covers_per_role_map() {
        let (inst, dom) = toy();
        let all: Vec<_> = enumerate_admissible(GroundingQuery::new(&inst, &dom)).collect();
        assert_eq!(all.len(), 4);
        for g in &all {
            assert!(is_admissible(&inst, &dom, g).admissible);
            assert_eq!(g.acts.len(), 1);
            assert_eq!(g.arts.len(), 1);
        }
        let first = &all[0];
        assert!(first.roles.contains(&(id("A"), id("y"))));
    }

    #[test]
    fn limit_and_fixed_roles() {
        let (inst, dom) = toy();
        assert!(find_grounding(GroundingQuery::new(&inst, &dom).limit(0)).is_none());
        let fixed = Fragment::from_grounding(&Grounding::new().with_role("A", "x").with_act("Do", "b2"));
        assert!(enumerate_admissible(GroundingQuery::new(&inst, &dom).fixing(fixed)).next().is_none());
    }

    #[test]
    fn maximal_policy() {
        let (inst, dom) = toy();
        let gs: Vec<_> = enumerate_admissible(GroundingQuery::new(&inst, &dom).policy(CoverPolicy::Maximal)).collect();
        assert_eq!(gs.len(), 4);
        assert!(gs.iter().all(|g| g.acts.len() == 2 && g.arts.len() == 1));
    }

    #[test]
    fn pigeonhole() {
        let (mut inst, dom) = toy();
        inst.cardinality.bounds.insert(id("A"), CardBounds::new(2, 2));
        inst.cardinality.bounds.insert(id("B"), CardBounds::new(1, 1));
        assert!(find_grounding(GroundingQuery::new(&inst, &dom)).is_none());
    }
}
