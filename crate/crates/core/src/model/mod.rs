//! Value types of the framework: institutions, domains, groundings and
//! trajectories, plus their structural validation.

mod domain;
mod grounding;
mod ident;
mod institution;
mod trajectory;
mod validate;

pub use domain::{Affordance, BuiltinValues, Domain, StateVarDecl, ValueSet};
pub use grounding::{derived_sets, DerivedSets, Grounding};
pub use ident::{
    id, is_identifier, Ident, IdentError, StateVarName, Value, ACTIVE, POSITION, RESERVED_WORDS,
    USED_OBJECT,
};
pub use institution::{
    known_qualifier, CardBounds, CardinalityNorm, Institution, MaxCard, Norm, NormKind,
    QualifierSignature, Statement,
};
pub use trajectory::{Interval, Segment, Time, Trajectory, TrajectoryError};
pub use validate::{
    validate_domain, validate_grounding_structure, validate_institution, validate_trajectory,
    Problem, ValidationReport,
};

/// Builds a statement from three identifier strings. Panics on invalid input.
pub fn stmt(subject: &str, predicate: &str, object: &str) -> Statement {
    Statement::new(id(subject), id(predicate), id(object))
}
