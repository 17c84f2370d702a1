//! Adherence of a trajectory to an institution under a grounding.
//!
//! The trajectory fixes every sub-variable, so the constraint network is
//! decided by evaluating each compiled constraint on the segmented
//! trajectory; no search is involved.

use serde::Serialize;
use thiserror::Error;

use crate::admissibility::{is_admissible, AdmissibilityReport};
use crate::model::{
    derived_sets, validate_grounding_structure, validate_trajectory, Domain, Grounding,
    Institution, Interval, Norm, Trajectory, ValidationReport,
};
use crate::semantics::{
    segment_trajectory, CompileContext, CompileError, CompiledConstraint, QualifierRegistry,
    TimelineVar, Timelines,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("grounding is not admissible")]
    Inadmissible(AdmissibilityReport),
    #[error("invalid input:\n{0}")]
    Input(ValidationReport),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NormStatus {
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormResult {
    pub norm: Norm,
    pub status: NormStatus,
    pub witness: Vec<TimelineVar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub adherent: bool,
    /// One entry per norm, in canonical norm order.
    pub per_norm: Vec<NormResult>,
}

impl VerificationReport {
    pub fn violated(&self) -> impl Iterator<Item = &NormResult> {
        self.per_norm
            .iter()
            .filter(|r| r.status == NormStatus::Violated)
    }
}

/// Compiles every norm with the built-in qualifiers.
pub fn build_network(
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
    horizon: Interval,
) -> Result<Vec<CompiledConstraint>, VerifyError> {
    build_network_with(&QualifierRegistry::with_builtins(), inst, dom, g, horizon)
}

pub fn build_network_with(
    registry: &QualifierRegistry,
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
    horizon: Interval,
) -> Result<Vec<CompiledConstraint>, VerifyError> {
    let structure = validate_grounding_structure(inst, dom, g);
    if !structure.is_valid() {
        return Err(VerifyError::Input(structure));
    }
    let report = is_admissible(inst, dom, g);
    if !report.admissible {
        return Err(VerifyError::Inadmissible(report));
    }
    let derived = derived_sets(inst, dom, g);
    let ctx = CompileContext {
        inst,
        dom,
        derived: &derived,
        horizon,
    };
    inst.norms
        .iter()
        .map(|n| registry.compile(n, &ctx).map_err(VerifyError::from))
        .collect()
}

/// Evaluates every constraint; all violations are reported.
pub fn evaluate_network(constraints: &[CompiledConstraint], tl: &Timelines) -> VerificationReport {
    let per_norm: Vec<NormResult> = constraints
        .iter()
        .map(|c| {
            let v = c.evaluate(tl);
            NormResult {
                norm: c.source.clone(),
                status: if v.satisfied {
                    NormStatus::Satisfied
                } else {
                    NormStatus::Violated
                },
                witness: v.witness,
            }
        })
        .collect();
    VerificationReport {
        adherent: per_norm.iter().all(|r| r.status == NormStatus::Satisfied),
        per_norm,
    }
}

pub fn verify(
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
    traj: &Trajectory,
) -> Result<VerificationReport, VerifyError> {
    verify_with(&QualifierRegistry::with_builtins(), inst, dom, g, traj)
}

pub fn verify_with(
    registry: &QualifierRegistry,
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
    traj: &Trajectory,
) -> Result<VerificationReport, VerifyError> {
    let input = validate_trajectory(traj, dom);
    if !input.is_valid() {
        return Err(VerifyError::Input(input));
    }
    let network = build_network_with(registry, inst, dom, g, traj.horizon())?;
    Ok(evaluate_network(&network, &segment_trajectory(traj, dom)))
}
