//! Synthesis of adherent trajectories.
//!
//! Given a grounding, [`plan`] searches for a trajectory over the requested
//! horizon that satisfies every compiled norm. Without a grounding it tries
//! the admissible groundings in enumeration order and returns the first one
//! that admits a plan. The search is complete within its segment bounds: `Unsat` means no
//! adherent trajectory exists inside them.

mod search;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::admissibility::AdmissibilityReport;
use crate::groundsearch::{enumerate_admissible, Fragment, GroundingQuery};
use crate::model::{
    derived_sets, Domain, Grounding, Institution, Interval, StateVarName, Trajectory,
    ValidationReport,
};
use crate::semantics::{CompileError, CompiledConstraint, Timelines};
use crate::verifier::{build_network, verify, VerificationReport, VerifyError};

use search::Search;

pub const DEFAULT_MAX_SEGMENTS: usize = 2;

#[derive(Debug, Clone)]
pub struct PlanRequest<'a> {
    pub inst: &'a Institution,
    pub dom: &'a Domain,
    /// Plan under exactly this grounding.
    pub grounding: Option<Grounding>,
    /// Relations every candidate grounding must reproduce when no grounding is given.
    pub fixed: Fragment,
    pub horizon: Interval,
    /// Activation segments per (agent, behavior) pair and segments per other variable.
    pub max_segments: usize,
}

impl<'a> PlanRequest<'a> {
    pub fn new(inst: &'a Institution, dom: &'a Domain, horizon: Interval) -> Self {
        PlanRequest {
            inst,
            dom,
            grounding: None,
            fixed: Fragment::default(),
            horizon,
            max_segments: DEFAULT_MAX_SEGMENTS,
        }
    }

    pub fn grounding(mut self, g: Grounding) -> Self {
        self.grounding = Some(g);
        self
    }

    pub fn fixing(mut self, fixed: Fragment) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn max_segments(mut self, k: usize) -> Self {
        self.max_segments = k;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub grounding: Grounding,
    pub trajectory: Trajectory,
    /// Verification of `trajectory`; always adherent.
    pub report: VerificationReport,
    /// Total activation segments in the plan.
    pub activations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanOutcome {
    Found(Plan),
    /// No adherent trajectory within the bounds, for any grounding tried.
    Unsat { groundings_tried: usize },
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            PlanOutcome::Found(p) => Some(p),
            PlanOutcome::Unsat { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("max segments must be at least 1")]
    ZeroBound,
    #[error("grounding is not admissible")]
    Inadmissible(AdmissibilityReport),
    #[error("invalid input:\n{0}")]
    Input(ValidationReport),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

impl From<VerifyError> for PlanError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Inadmissible(r) => PlanError::Inadmissible(r),
            VerifyError::Input(r) => PlanError::Input(r),
            VerifyError::Compile(c) => PlanError::Compile(c),
        }
    }
}

pub fn plan(req: &PlanRequest<'_>) -> Result<PlanOutcome, PlanError> {
    if req.max_segments == 0 {
        return Err(PlanError::ZeroBound);
    }
    match &req.grounding {
        Some(g) => Ok(match plan_under(req, g)? {
            Some(p) => PlanOutcome::Found(p),
            None => PlanOutcome::Unsat { groundings_tried: 1 },
        }),
        None => plan_with_grounding(req),
    }
}

/// Tries admissible groundings compatible with `req.fixed` in order.
pub fn plan_with_grounding(req: &PlanRequest<'_>) -> Result<PlanOutcome, PlanError> {
    if req.max_segments == 0 {
        return Err(PlanError::ZeroBound);
    }
    let query = GroundingQuery::new(req.inst, req.dom).fixing(req.fixed.clone());
    let mut tried = 0;
    let mut compiled = false;
    let mut missing = None;
    for g in enumerate_admissible(query) {
        tried += 1;
        // A grounding whose norms need undeclared state variables cannot be planned; skip it.
        match plan_under(req, &g) {
            Ok(Some(p)) => return Ok(PlanOutcome::Found(p)),
            Ok(None) => compiled = true,
            Err(e @ PlanError::Compile(CompileError::MissingStateVar { .. })) => {
                missing.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    match missing {
        Some(e) if !compiled => Err(e),
        _ => Ok(PlanOutcome::Unsat { groundings_tried: tried }),
    }
}

fn plan_under(req: &PlanRequest<'_>, g: &Grounding) -> Result<Option<Plan>, PlanError> {
    let network = build_network(req.inst, req.dom, g, req.horizon)?;
    let derived = derived_sets(req.inst, req.dom, g);
    let mut merged = Timelines::empty(req.horizon);
    let mut activations = 0;
    for component in components(&network, req.dom.concurrent_behaviors) {
        let mut search = Search::new(
            req.inst,
            req.dom,
            &derived,
            &component,
            req.horizon,
            req.max_segments,
        );
        let found = (search.initial_bound()..=search.max_budget()).any(|b| search.run(b));
        if !found {
            return Ok(None);
        }
        let tl = search.result();
        for v in tl.vars() {
            merged.insert_segments(v.clone(), tl.segments(v).iter().cloned());
        }
        activations += search.activations();
    }
    let trajectory = merged.to_trajectory(req.dom);
    let report = verify(req.inst, req.dom, g, &trajectory)?;
    debug_assert!(report.adherent, "every component passed its constraints");
    Ok(Some(Plan {
        grounding: g.clone(),
        trajectory,
        report,
        activations,
    }))
}

/// Splits the network into groups that read disjoint state variables.
/// Without concurrent behaviors all variables of one agent belong together.
fn components(network: &[CompiledConstraint], concurrent: bool) -> Vec<Vec<CompiledConstraint>> {
    let key = |v: &StateVarName| -> StateVarName {
        if !concurrent && v.is_implicit() {
            StateVarName::active(&v.args[1], &v.args[1])
        } else {
            v.clone()
        }
    };
    let mut parent: Vec<usize> = (0..network.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    let mut owner: BTreeMap<StateVarName, usize> = BTreeMap::new();
    for (i, c) in network.iter().enumerate() {
        for v in &c.scope {
            match owner.get(&key(v)) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                None => {
                    owner.insert(key(v), i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<CompiledConstraint>> = BTreeMap::new();
    for (i, c) in network.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(c.clone());
    }
    groups.into_values().collect()
}
