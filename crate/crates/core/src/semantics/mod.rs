//! Meaning of norms: each qualifier compiles a norm into a constraint over
//! the timelines of the state variables it reads.
//!
//! A [`QualifierRegistry`] maps qualifier names to compilers. The built-in
//! qualifiers are registered by [`QualifierRegistry::with_builtins`]; new
//! ones can be added with [`QualifierRegistry::register`].

mod builtins;
mod timeline;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::model::{DerivedSets, Domain, Ident, Institution, Interval, Norm, StateVarName};

pub use builtins::{
    compile_at, compile_at_used, compile_before, compile_must, compile_must_always,
    compile_must_each, compile_must_not, compile_must_toward, compile_use, BUILTIN_QUALIFIERS,
};
pub use timeline::{segment_trajectory, TimelineVar, Timelines};

/// How a constraint's verdict can be decided on a growing prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalClass {
    /// Once violated on a prefix, violated on every extension.
    Safety,
    /// Once satisfied on a prefix, satisfied on every extension.
    Cosafety,
    /// No prefix guarantee.
    General,
}

/// Outcome of evaluating one constraint, with the sub-variables that
/// establish it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub satisfied: bool,
    pub witness: Vec<TimelineVar>,
}

impl Verdict {
    pub fn new(satisfied: bool, mut witness: Vec<TimelineVar>) -> Self {
        witness.sort();
        witness.dedup();
        Verdict { satisfied, witness }
    }
}

pub trait Evaluator: Send + Sync {
    fn evaluate(&self, tl: &Timelines) -> Verdict;
}

impl<F> Evaluator for F
where
    F: Fn(&Timelines) -> Verdict + Send + Sync,
{
    fn evaluate(&self, tl: &Timelines) -> Verdict {
        self(tl)
    }
}

/// A norm compiled against one grounding.
#[derive(Clone)]
pub struct CompiledConstraint {
    pub source: Norm,
    /// State variables the evaluator reads.
    pub scope: BTreeSet<StateVarName>,
    pub class: TemporalClass,
    pub evaluator: Arc<dyn Evaluator>,
}

impl CompiledConstraint {
    pub fn evaluate(&self, tl: &Timelines) -> Verdict {
        self.evaluator.evaluate(tl)
    }
}

impl fmt::Debug for CompiledConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompiledConstraint")
            .field("source", &self.source)
            .field("scope", &self.scope)
            .field("class", &self.class)
            .finish_non_exhaustive()
    }
}

/// Everything a qualifier compiler may consult.
#[derive(Debug, Clone, Copy)]
pub struct CompileContext<'a> {
    pub inst: &'a Institution,
    pub dom: &'a Domain,
    pub derived: &'a DerivedSets,
    pub horizon: Interval,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("unknown qualifier `{0}`")]
    UnknownQualifier(Ident),
    #[error("qualifier `{qualifier}` expects {expected} statement(s), found {found}")]
    Arity {
        qualifier: Ident,
        expected: usize,
        found: usize,
    },
    #[error("norm {norm} needs a declared state variable {var}")]
    MissingStateVar { norm: Norm, var: StateVarName },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("qualifier `{0}` is already registered")]
pub struct DuplicateQualifier(pub Ident);

pub type CompileFn =
    dyn Fn(&Norm, &CompileContext<'_>) -> Result<CompiledConstraint, CompileError> + Send + Sync;

#[derive(Clone)]
pub struct QualifierSemantics {
    pub name: Ident,
    pub arity: usize,
    pub compile: Arc<CompileFn>,
}

impl QualifierSemantics {
    pub fn new(
        name: Ident,
        arity: usize,
        compile: impl Fn(&Norm, &CompileContext<'_>) -> Result<CompiledConstraint, CompileError>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        QualifierSemantics {
            name,
            arity,
            compile: Arc::new(compile),
        }
    }
}

impl fmt::Debug for QualifierSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QualifierSemantics({}/{})", self.name, self.arity)
    }
}

#[derive(Debug, Clone, Default)]
pub struct QualifierRegistry {
    entries: BTreeMap<Ident, QualifierSemantics>,
}

impl QualifierRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// must, mustAlways, mustNot, at, use, before, plus the extensions
    /// mustToward, mustEach and atUsed.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        for sem in builtins::all() {
            r.register(sem).expect("built-in names are distinct");
        }
        r
    }

    pub fn register(&mut self, sem: QualifierSemantics) -> Result<(), DuplicateQualifier> {
        if self.entries.contains_key(&sem.name) {
            return Err(DuplicateQualifier(sem.name));
        }
        self.entries.insert(sem.name.clone(), sem);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&QualifierSemantics> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Ident> {
        self.entries.keys()
    }

    pub fn compile(&self, norm: &Norm, ctx: &CompileContext<'_>) -> Result<CompiledConstraint, CompileError> {
        let sem = self
            .entries
            .get(&norm.qualifier)
            .ok_or_else(|| CompileError::UnknownQualifier(norm.qualifier.clone()))?;
        if sem.arity != norm.statements.len() {
            return Err(CompileError::Arity {
                qualifier: norm.qualifier.clone(),
                expected: sem.arity,
                found: norm.statements.len(),
            });
        }
        (sem.compile)(norm, ctx)
    }
}
