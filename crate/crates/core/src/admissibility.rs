//! Whether a grounding gives every obliged agent the means to act, and
//! whether each role is enacted by an allowed number of agents.

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    derived_sets, CardBounds, DerivedSets, Domain, Grounding, Ident, Institution, MaxCard, Norm,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdmissibilityError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(Ident),
    #[error("unknown act `{0}`")]
    UnknownAct(Ident),
    #[error("unknown artifact or role `{0}`")]
    UnknownObject(Ident),
    #[error("norm {0} is not an obligation")]
    NotObligation(Norm),
}

/// One obliged agent that has no affording (behavior, target) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FailedObligation {
    pub norm: Norm,
    pub agent: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardinalityCheck {
    pub role: Ident,
    pub ok: bool,
    pub actual: usize,
    pub min: u32,
    pub max: MaxCard,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub failed_obligations: Vec<FailedObligation>,
    pub cardinality_violations: Vec<CardinalityCheck>,
}

/// Result of checking one obligation: the agents of the subject role that
/// cannot execute it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Executability {
    pub executable: bool,
    pub failing_agents: Vec<Ident>,
}

fn capable_in(dom: &Domain, ds: &DerivedSets, inst: &Institution, agent: &Ident, act: &Ident, object: &Ident) -> bool {
    let targets = ds.targets(inst, object);
    ds.behaviors(act)
        .iter()
        .any(|b| targets.iter().any(|o| dom.affords(agent, b, o)))
}

/// Whether `agent` has an affordance `(agent, b, o)` with `b ∈ B_act` and
/// `o ∈ O_art`, or `o ∈ A_role` when `object` names a role.
pub fn capable(
    agent: &Ident,
    act: &Ident,
    object: &Ident,
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
) -> Result<bool, AdmissibilityError> {
    if !dom.agents.contains(agent) {
        return Err(AdmissibilityError::UnknownAgent(agent.clone()));
    }
    if !inst.acts.contains(act) {
        return Err(AdmissibilityError::UnknownAct(act.clone()));
    }
    if !inst.arts.contains(object) && !inst.roles.contains(object) {
        return Err(AdmissibilityError::UnknownObject(object.clone()));
    }
    let ds = derived_sets(inst, dom, g);
    Ok(capable_in(dom, &ds, inst, agent, act, object))
}

fn executable_in(inst: &Institution, dom: &Domain, ds: &DerivedSets, norm: &Norm) -> Executability {
    // Prohibitions constrain trajectories, not capabilities.
    if norm.is_prohibition() {
        return Executability {
            executable: true,
            failing_agents: Vec::new(),
        };
    }
    let s = norm.statement();
    let failing_agents: Vec<Ident> = ds
        .agents(&s.subject)
        .iter()
        .filter(|a| !capable_in(dom, ds, inst, a, &s.predicate, &s.object))
        .cloned()
        .collect();
    Executability {
        executable: failing_agents.is_empty(),
        failing_agents,
    }
}

/// Checks an obligation norm for every agent enacting its subject role.
pub fn executable(
    norm: &Norm,
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
) -> Result<Executability, AdmissibilityError> {
    if !norm.is_obligation() {
        return Err(AdmissibilityError::NotObligation(norm.clone()));
    }
    let s = norm.statement();
    if !inst.acts.contains(&s.predicate) {
        return Err(AdmissibilityError::UnknownAct(s.predicate.clone()));
    }
    if !inst.arts.contains(&s.object) && !inst.roles.contains(&s.object) {
        return Err(AdmissibilityError::UnknownObject(s.object.clone()));
    }
    let ds = derived_sets(inst, dom, g);
    Ok(executable_in(inst, dom, &ds, norm))
}

/// One entry per role of the institution, in role order.
pub fn cardinality_satisfied(inst: &Institution, g: &Grounding) -> Vec<CardinalityCheck> {
    inst.roles
        .iter()
        .map(|role| {
            let CardBounds { min, max } = inst.cardinality.bounds_for(role);
            let actual = g.agents_of(role).count();
            CardinalityCheck {
                role: role.clone(),
                ok: CardBounds { min, max }.admits(actual),
                actual,
                min,
                max,
            }
        })
        .collect()
}

pub fn is_admissible(inst: &Institution, dom: &Domain, g: &Grounding) -> AdmissibilityReport {
    let ds = derived_sets(inst, dom, g);
    let mut failed_obligations = Vec::new();
    for norm in inst.obligations() {
        for agent in executable_in(inst, dom, &ds, norm).failing_agents {
            failed_obligations.push(FailedObligation {
                norm: norm.clone(),
                agent,
            });
        }
    }
    let cardinality_violations: Vec<_> = cardinality_satisfied(inst, g)
        .into_iter()
        .filter(|c| !c.ok)
        .collect();
    AdmissibilityReport {
        admissible: failed_obligations.is_empty() && cardinality_violations.is_empty(),
        failed_obligations,
        cardinality_violations,
    }
}
