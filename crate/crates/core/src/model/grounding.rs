use std::collections::{BTreeMap, BTreeSet};

use super::domain::Domain;
use super::ident::Ident;
use super::institution::Institution;

/// Links an institution to a domain.
///
/// The role grounding is stored as a relation of `(role, agent)` pairs so
/// that a malformed, non-functional assignment can be represented and
/// reported; well-formed groundings map each agent to at most one role.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grounding {
    pub roles: BTreeSet<(Ident, Ident)>,
    pub acts: BTreeSet<(Ident, Ident)>,
    pub arts: BTreeSet<(Ident, Ident)>,
}

impl Grounding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_role(mut self, role: &str, agent: &str) -> Self {
        self.roles
            .insert((super::ident::id(role), super::ident::id(agent)));
        self
    }

    pub fn with_act(mut self, act: &str, behavior: &str) -> Self {
        self.acts
            .insert((super::ident::id(act), super::ident::id(behavior)));
        self
    }

    pub fn with_art(mut self, art: &str, object: &str) -> Self {
        self.arts
            .insert((super::ident::id(art), super::ident::id(object)));
        self
    }

    /// The role an agent is grounded to (the first one if the relation is
    /// not a function).
    pub fn role_of(&self, agent: &Ident) -> Option<&Ident> {
        self.roles.iter().find(|(_, a)| a == agent).map(|(r, _)| r)
    }

    pub fn agents_of<'a>(&'a self, role: &'a Ident) -> impl Iterator<Item = &'a Ident> + 'a {
        self.roles.iter().filter(move |(r, _)| r == role).map(|(_, a)| a)
    }

    pub fn behaviors_of<'a>(&'a self, act: &'a Ident) -> impl Iterator<Item = &'a Ident> + 'a {
        self.acts.iter().filter(move |(x, _)| x == act).map(|(_, b)| b)
    }

    pub fn objects_of<'a>(&'a self, art: &'a Ident) -> impl Iterator<Item = &'a Ident> + 'a {
        self.arts.iter().filter(move |(x, _)| x == art).map(|(_, o)| o)
    }

    /// Role assignment as a map, keeping only the first role per agent.
    pub fn role_map(&self) -> BTreeMap<&Ident, &Ident> {
        let mut m = BTreeMap::new();
        for (r, a) in &self.roles {
            m.entry(a).or_insert(r);
        }
        m
    }
}

/// Inverse images and projections of a grounding: `A_role`, `B_act`, `O_art`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivedSets {
    pub agents_by_role: BTreeMap<Ident, BTreeSet<Ident>>,
    pub behaviors_by_act: BTreeMap<Ident, BTreeSet<Ident>>,
    pub objects_by_art: BTreeMap<Ident, BTreeSet<Ident>>,
}

static EMPTY: BTreeSet<Ident> = BTreeSet::new();

impl DerivedSets {
    pub fn agents(&self, role: &Ident) -> &BTreeSet<Ident> {
        self.agents_by_role.get(role).unwrap_or(&EMPTY)
    }

    pub fn behaviors(&self, act: &Ident) -> &BTreeSet<Ident> {
        self.behaviors_by_act.get(act).unwrap_or(&EMPTY)
    }

    pub fn objects(&self, art: &Ident) -> &BTreeSet<Ident> {
        self.objects_by_art.get(art).unwrap_or(&EMPTY)
    }

    /// The set a statement's object slot ranges over: `O_art` for an
    /// artifact, `A_role` for a role.
    pub fn targets(&self, inst: &Institution, object: &Ident) -> &BTreeSet<Ident> {
        if inst.roles.contains(object) {
            self.agents(object)
        } else {
            self.objects(object)
        }
    }
}

/// Computes `A_role`, `B_act` and `O_art` for every role, act and artifact of
/// the institution. Pairs that name elements missing from the domain are
/// skipped.
pub fn derived_sets(inst: &Institution, dom: &Domain, g: &Grounding) -> DerivedSets {
    let mut d = DerivedSets::default();
    for r in &inst.roles {
        d.agents_by_role.insert(r.clone(), BTreeSet::new());
    }
    for a in &inst.acts {
        d.behaviors_by_act.insert(a.clone(), BTreeSet::new());
    }
    for a in &inst.arts {
        d.objects_by_art.insert(a.clone(), BTreeSet::new());
    }
    for (r, a) in &g.roles {
        if dom.agents.contains(a) {
            if let Some(s) = d.agents_by_role.get_mut(r) {
                s.insert(a.clone());
            }
        }
    }
    for (act, b) in &g.acts {
        if dom.behaviors.contains(b) {
            if let Some(s) = d.behaviors_by_act.get_mut(act) {
                s.insert(b.clone());
            }
        }
    }
    for (art, o) in &g.arts {
        if dom.objects.contains(o) {
            if let Some(s) = d.objects_by_art.get_mut(art) {
                s.insert(o.clone());
            }
        }
    }
    d
}
