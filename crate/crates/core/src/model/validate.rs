//! Structural well-formedness checks. Problems are returned as data, never as
//! errors, so that a caller can show all of them at once.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::domain::Domain;
use super::grounding::Grounding;
use super::ident::{Ident, RESERVED_WORDS};
use super::institution::{known_qualifier, Institution, MaxCard, Norm};
use super::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Problem {
    /// Where the problem is, e.g. `norms[must(Buyer,Pay,PayForm)].subject`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Problem>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Problem {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

fn check_disjoint<'a>(
    report: &mut ValidationReport,
    sets: &[(&str, &'a std::collections::BTreeSet<Ident>)],
) {
    let mut seen: BTreeMap<&'a Ident, &str> = BTreeMap::new();
    for (label, set) in sets {
        for x in set.iter() {
            if let Some(prev) = seen.insert(x, label) {
                report.push(
                    format!("{label}.{x}"),
                    format!("`{x}` is declared both in {prev} and in {label}"),
                );
            }
        }
    }
}

pub fn validate_institution(inst: &Institution) -> ValidationReport {
    let mut r = ValidationReport::default();
    for (label, set) in [("arts", &inst.arts), ("roles", &inst.roles), ("acts", &inst.acts)] {
        if set.is_empty() {
            r.push(label, format!("{label} must not be empty"));
        }
    }
    check_disjoint(
        &mut r,
        &[("arts", &inst.arts), ("roles", &inst.roles), ("acts", &inst.acts)],
    );
    for norm in &inst.norms {
        validate_norm(inst, norm, &mut r);
    }
    for (role, b) in &inst.cardinality.bounds {
        let path = format!("card.{role}");
        if !inst.roles.contains(role) {
            r.push(&path, format!("undeclared role `{role}`"));
        }
        if !b.is_ordered() {
            r.push(&path, format!("min > max ({} > {})", b.min, b.max));
        }
        if b.max == MaxCard::Finite(0) {
            r.push(&path, "max must be positive");
        }
    }
    r
}

fn validate_norm(inst: &Institution, norm: &Norm, r: &mut ValidationReport) {
    let path = format!("norms[{norm}]");
    if norm.statements.is_empty() {
        r.push(&path, "norm has no statements");
        return;
    }
    if let Some(sig) = known_qualifier(norm.qualifier.as_str()) {
        if sig.arity != norm.statements.len() {
            r.push(
                &path,
                format!(
                    "qualifier `{}` expects {} statement(s), found {}",
                    norm.qualifier,
                    sig.arity,
                    norm.statements.len()
                ),
            );
        }
        if sig.kind != norm.kind {
            r.push(&path, format!("qualifier `{}` has the wrong norm kind", norm.qualifier));
        }
    }
    for (i, s) in norm.statements.iter().enumerate() {
        let spath = if norm.statements.len() == 1 {
            path.clone()
        } else {
            format!("{path}.statements[{i}]")
        };
        if !inst.roles.contains(&s.subject) {
            r.push(format!("{spath}.subject"), format!("undeclared role `{}`", s.subject));
        }
        if !inst.acts.contains(&s.predicate) {
            r.push(format!("{spath}.predicate"), format!("undeclared act `{}`", s.predicate));
        }
        if !inst.arts.contains(&s.object) && !inst.roles.contains(&s.object) {
            r.push(
                format!("{spath}.object"),
                format!("undeclared artifact or role `{}`", s.object),
            );
        }
    }
}

pub fn validate_domain(dom: &Domain) -> ValidationReport {
    let mut r = ValidationReport::default();
    check_disjoint(
        &mut r,
        &[
            ("agents", &dom.agents),
            ("objects", &dom.objects),
            ("behaviors", &dom.behaviors),
        ],
    );
    for f in &dom.affordances {
        let path = format!("afford{f}");
        if !dom.agents.contains(&f.agent) {
            r.push(&path, format!("undeclared agent `{}`", f.agent));
        }
        if !dom.behaviors.contains(&f.behavior) {
            r.push(&path, format!("undeclared behavior `{}`", f.behavior));
        }
        if !dom.is_entity(&f.target) {
            r.push(&path, format!("undeclared object or agent `{}`", f.target));
        }
    }
    for (name, decl) in &dom.state_vars {
        let path = format!("statevar.{name}");
        if name.is_implicit() {
            r.push(&path, "active/usedObject variables are implicit and cannot be declared");
        }
        if let super::domain::ValueSet::Symbols(s) = &decl.values {
            if s.is_empty() {
                r.push(&path, "value set must not be empty");
            }
            for v in s {
                if RESERVED_WORDS.contains(&v.as_str()) {
                    r.push(&path, format!("`{v}` is reserved"));
                }
            }
        }
        if let Some(def) = &decl.default {
            if !dom.admits_value(decl, def) {
                r.push(&path, format!("default `{def}` is not in the value set"));
            }
        }
    }
    r
}

pub fn validate_grounding_structure(
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
) -> ValidationReport {
    let mut r = ValidationReport::default();
    let mut roles_per_agent: BTreeMap<&Ident, usize> = BTreeMap::new();
    for (role, agent) in &g.roles {
        *roles_per_agent.entry(agent).or_default() += 1;
        let path = format!("role {role} -> {agent}");
        if !inst.roles.contains(role) {
            r.push(&path, format!("undeclared role `{role}`"));
        }
        if !dom.agents.contains(agent) {
            r.push(&path, format!("undeclared agent `{agent}`"));
        }
    }
    for (agent, n) in roles_per_agent {
        if n > 1 {
            r.push(format!("roles.{agent}"), format!("agent {agent} grounded to {n} roles"));
        }
    }
    for (act, b) in &g.acts {
        let path = format!("act {act} -> {b}");
        if !inst.acts.contains(act) {
            r.push(&path, format!("undeclared act `{act}`"));
        }
        if !dom.behaviors.contains(b) {
            r.push(&path, format!("undeclared behavior {b}"));
        }
    }
    for (art, o) in &g.arts {
        let path = format!("art {art} -> {o}");
        if !inst.arts.contains(art) {
            r.push(&path, format!("undeclared artifact `{art}`"));
        }
        if !dom.objects.contains(o) {
            r.push(&path, format!("undeclared object `{o}`"));
        }
    }
    r
}

/// Checks that a trajectory only mentions declared state variables and only
/// uses values from their value sets.
pub fn validate_trajectory(traj: &Trajectory, dom: &Domain) -> ValidationReport {
    let mut r = ValidationReport::default();
    for (var, segs) in traj.timelines() {
        let path = format!("timeline {var}");
        let Some(decl) = dom.state_var(var) else {
            r.push(&path, format!("undeclared state variable {var}"));
            continue;
        };
        for s in segs {
            if !dom.admits_value(&decl, &s.value) {
                r.push(
                    format!("{path}{}", s.interval),
                    format!("value `{}` is not in vals({var})", s.value),
                );
            }
        }
    }
    r
}
