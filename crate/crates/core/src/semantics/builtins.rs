//! Built-in qualifiers.
//!
//! Every evaluator walks maximal segments; where several timelines are read
//! together it walks their common refinement, on whose parts all of them are
//! constant. That is equivalent to evaluating the formula at every time
//! point.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{
    CompileContext, CompileError, CompiledConstraint, Evaluator, QualifierSemantics, TemporalClass,
    TimelineVar, Timelines, Verdict,
};
use crate::model::{id, Ident, Norm, StateVarName, Statement, Value};

pub const BUILTIN_QUALIFIERS: [&str; 9] = [
    "must",
    "mustAlways",
    "mustNot",
    "use",
    "at",
    "before",
    "mustToward",
    "mustEach",
    "atUsed",
];

pub(super) fn all() -> Vec<QualifierSemantics> {
    vec![
        QualifierSemantics::new(id("must"), 1, compile_must),
        QualifierSemantics::new(id("mustAlways"), 1, compile_must_always),
        QualifierSemantics::new(id("mustNot"), 1, compile_must_not),
        QualifierSemantics::new(id("use"), 1, compile_use),
        QualifierSemantics::new(id("at"), 1, compile_at),
        QualifierSemantics::new(id("before"), 2, compile_before),
        QualifierSemantics::new(id("mustToward"), 1, compile_must_toward),
        QualifierSemantics::new(id("mustEach"), 1, compile_must_each),
        QualifierSemantics::new(id("atUsed"), 1, compile_at_used),
    ]
}

/// Grounded view of one statement: subject agents, behaviors, and the set
/// the object slot ranges over.
#[derive(Clone)]
struct Grounded {
    agents: Vec<Ident>,
    behaviors: Vec<Ident>,
    targets: BTreeSet<Ident>,
}

impl Grounded {
    fn of(s: &Statement, ctx: &CompileContext<'_>) -> Self {
        Grounded {
            agents: ctx.derived.agents(&s.subject).iter().cloned().collect(),
            behaviors: ctx.derived.behaviors(&s.predicate).iter().cloned().collect(),
            targets: ctx.derived.targets(ctx.inst, &s.object).clone(),
        }
    }

    fn pairs(&self) -> impl Iterator<Item = (&Ident, &Ident)> {
        self.agents
            .iter()
            .flat_map(move |a| self.behaviors.iter().map(move |b| (a, b)))
    }

    fn active_scope(&self) -> BTreeSet<StateVarName> {
        self.pairs().map(|(a, b)| StateVarName::active(b, a)).collect()
    }

    fn used_scope(&self) -> BTreeSet<StateVarName> {
        self.pairs()
            .map(|(a, b)| StateVarName::used_object(b, a))
            .collect()
    }

    fn admits(&self, v: &Value) -> bool {
        v.as_sym().is_some_and(|o| self.targets.contains(o))
    }
}

fn constraint(
    norm: &Norm,
    scope: BTreeSet<StateVarName>,
    class: TemporalClass,
    eval: impl Fn(&Timelines) -> Verdict + Send + Sync + 'static,
) -> CompiledConstraint {
    CompiledConstraint {
        source: norm.clone(),
        scope,
        class,
        evaluator: Arc::new(eval) as Arc<dyn Evaluator>,
    }
}

fn require_declared(
    norm: &Norm,
    ctx: &CompileContext<'_>,
    var: StateVarName,
) -> Result<StateVarName, CompileError> {
    if ctx.dom.state_var(&var).is_some() {
        Ok(var)
    } else {
        Err(CompileError::MissingStateVar {
            norm: norm.clone(),
            var,
        })
    }
}

/// Each subject agent activates some grounded behavior at least once. The
/// object slot is ignored.
pub fn compile_must(norm: &Norm, ctx: &CompileContext<'_>) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let scope = g.active_scope();
    Ok(constraint(norm, scope, TemporalClass::Cosafety, move |tl| {
        let mut ok = true;
        let mut found = Vec::new();
        let mut missing = Vec::new();
        for a in &g.agents {
            let hit = g.behaviors.iter().find_map(|b| {
                tl.true_segments(&StateVarName::active(b, a)).into_iter().next()
            });
            match hit {
                Some(w) => found.push(w),
                None => {
                    ok = false;
                    for b in &g.behaviors {
                        missing.extend(tl.timeline_vars_of(&StateVarName::active(b, a)));
                    }
                }
            }
        }
        Verdict::new(ok, if ok { found } else { missing })
    }))
}

/// At every time point each subject agent has some grounded behavior active.
pub fn compile_must_always(
    norm: &Norm,
    ctx: &CompileContext<'_>,
) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let scope = g.active_scope();
    Ok(constraint(norm, scope, TemporalClass::Safety, move |tl| {
        let mut covering = Vec::new();
        for a in &g.agents {
            let vars: Vec<_> = g.behaviors.iter().map(|b| StateVarName::active(b, a)).collect();
            for piece in tl.refinement(&vars, tl.horizon()) {
                let any = vars.iter().any(|v| tl.value_at(v, piece.start).is_true());
                if !any {
                    let w = vars.iter().map(|v| tl.segment_at(v, piece.start)).collect();
                    return Verdict::new(false, w);
                }
            }
            for v in &vars {
                covering.extend(tl.true_segments(v));
            }
        }
        Verdict::new(true, covering)
    }))
}

/// No subject agent ever activates a grounded behavior.
pub fn compile_must_not(
    norm: &Norm,
    ctx: &CompileContext<'_>,
) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let scope = g.active_scope();
    Ok(constraint(norm, scope.clone(), TemporalClass::Safety, move |tl| {
        let hits: Vec<_> = scope.iter().flat_map(|v| tl.true_segments(v)).collect();
        if hits.is_empty() {
            Verdict::new(true, scope.iter().flat_map(|v| tl.timeline_vars_of(v)).collect())
        } else {
            Verdict::new(false, hits)
        }
    }))
}

/// Whenever a subject agent runs a grounded behavior, the used object is a
/// grounded target.
pub fn compile_use(norm: &Norm, ctx: &CompileContext<'_>) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let mut scope = g.active_scope();
    scope.extend(g.used_scope());
    Ok(constraint(norm, scope, TemporalClass::Safety, move |tl| {
        let mut support = Vec::new();
        for (a, b) in g.pairs() {
            let act = StateVarName::active(b, a);
            let used = StateVarName::used_object(b, a);
            for seg in tl.true_segments(&act) {
                for u in tl.overlapping(&used, seg.interval) {
                    if !g.admits(&u.value) {
                        return Verdict::new(false, vec![seg, u]);
                    }
                    support.push(u);
                }
                support.push(seg);
            }
        }
        Verdict::new(true, support)
    }))
}

/// Whenever a subject agent runs a grounded behavior, it shares its position
/// with some grounded target.
pub fn compile_at(norm: &Norm, ctx: &CompileContext<'_>) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let mut scope = g.active_scope();
    for x in g.agents.iter().chain(&g.targets) {
        scope.insert(require_declared(norm, ctx, StateVarName::position(x))?);
    }
    let target_pos: Vec<StateVarName> = g.targets.iter().map(StateVarName::position).collect();
    Ok(constraint(norm, scope, TemporalClass::Safety, move |tl| {
        let mut support = Vec::new();
        for (a, b) in g.pairs() {
            let act = StateVarName::active(b, a);
            let pos = StateVarName::position(a);
            let read: Vec<&StateVarName> = std::iter::once(&pos).chain(&target_pos).collect();
            for seg in tl.true_segments(&act) {
                for piece in tl.refinement(read.iter().copied(), seg.interval) {
                    let here = tl.value_at(&pos, piece.start);
                    let hit = target_pos.iter().find(|p| tl.value_at(p, piece.start) == here);
                    match hit {
                        Some(p) => {
                            support.push(tl.segment_at(&pos, piece.start));
                            support.push(tl.segment_at(p, piece.start));
                        }
                        None => {
                            let mut w = vec![seg.clone(), tl.segment_at(&pos, piece.start)];
                            w.extend(target_pos.iter().map(|p| tl.segment_at(p, piece.start)));
                            return Verdict::new(false, w);
                        }
                    }
                }
                support.push(seg);
            }
        }
        Verdict::new(true, support)
    }))
}

/// Every activation of the first statement ends strictly before any
/// activation of the second statement starts.
pub fn compile_before(
    norm: &Norm,
    ctx: &CompileContext<'_>,
) -> Result<CompiledConstraint, CompileError> {
    let first = Grounded::of(&norm.statements[0], ctx);
    let second = Grounded::of(&norm.statements[1], ctx);
    let vars1 = first.active_scope();
    let vars2 = second.active_scope();
    let scope = vars1.union(&vars2).cloned().collect();
    Ok(constraint(norm, scope, TemporalClass::Safety, move |tl| {
        let s1: Vec<TimelineVar> = vars1.iter().flat_map(|v| tl.true_segments(v)).collect();
        let s2: Vec<TimelineVar> = vars2.iter().flat_map(|v| tl.true_segments(v)).collect();
        for x in &s1 {
            for y in &s2 {
                if x.interval.end >= y.interval.start {
                    return Verdict::new(false, vec![x.clone(), y.clone()]);
                }
            }
        }
        Verdict::new(true, s1.into_iter().chain(s2).collect())
    }))
}

/// Sub-variables of an activation of `(b, a)` during which the used object
/// satisfies `accept`, as (activation, usedObject) pairs.
fn activations_using(
    tl: &Timelines,
    a: &Ident,
    b: &Ident,
    accept: impl Fn(&Value) -> bool,
) -> Option<(TimelineVar, TimelineVar)> {
    let used = StateVarName::used_object(b, a);
    for seg in tl.true_segments(&StateVarName::active(b, a)) {
        if let Some(u) = tl
            .overlapping(&used, seg.interval)
            .into_iter()
            .find(|u| accept(&u.value))
        {
            return Some((seg, u));
        }
    }
    None
}

/// Everything read when looking for an activation of agent `a`: its
/// activation timelines and the used objects during activations.
fn activity_of(tl: &Timelines, g: &Grounded, a: &Ident) -> Vec<TimelineVar> {
    let mut w = Vec::new();
    for b in &g.behaviors {
        let used = StateVarName::used_object(b, a);
        let act = StateVarName::active(b, a);
        for seg in tl.true_segments(&act) {
            w.extend(tl.overlapping(&used, seg.interval));
        }
        w.extend(tl.timeline_vars_of(&act));
    }
    w
}

/// Like `must`, but the activation must use a grounded target as its object
/// (for a role object: an agent enacting that role).
pub fn compile_must_toward(
    norm: &Norm,
    ctx: &CompileContext<'_>,
) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let mut scope = g.active_scope();
    scope.extend(g.used_scope());
    Ok(constraint(norm, scope, TemporalClass::Cosafety, move |tl| {
        let mut found = Vec::new();
        for a in &g.agents {
            let hit = g
                .behaviors
                .iter()
                .find_map(|b| activations_using(tl, a, b, |v| g.admits(v)));
            match hit {
                Some((s, u)) => found.extend([s, u]),
                None => return Verdict::new(false, activity_of(tl, &g, a)),
            }
        }
        Verdict::new(true, found)
    }))
}

/// Each subject agent uses every grounded target in some activation.
pub fn compile_must_each(
    norm: &Norm,
    ctx: &CompileContext<'_>,
) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let mut scope = g.active_scope();
    scope.extend(g.used_scope());
    Ok(constraint(norm, scope, TemporalClass::Cosafety, move |tl| {
        let mut found = Vec::new();
        for a in &g.agents {
            for o in &g.targets {
                let want = Value::Sym(o.clone());
                let hit = g
                    .behaviors
                    .iter()
                    .find_map(|b| activations_using(tl, a, b, |v| *v == want));
                match hit {
                    Some((s, u)) => found.extend([s, u]),
                    None => return Verdict::new(false, activity_of(tl, &g, a)),
                }
            }
        }
        Verdict::new(true, found)
    }))
}

/// Whenever a subject agent runs a grounded behavior, its used object is a
/// grounded target and the agent stands at that target's position.
pub fn compile_at_used(
    norm: &Norm,
    ctx: &CompileContext<'_>,
) -> Result<CompiledConstraint, CompileError> {
    let g = Grounded::of(norm.statement(), ctx);
    let mut scope = g.active_scope();
    scope.extend(g.used_scope());
    for x in g.agents.iter().chain(&g.targets) {
        scope.insert(require_declared(norm, ctx, StateVarName::position(x))?);
    }
    let target_pos: Vec<StateVarName> = g.targets.iter().map(StateVarName::position).collect();
    Ok(constraint(norm, scope, TemporalClass::Safety, move |tl| {
        let mut support = Vec::new();
        for (a, b) in g.pairs() {
            let act = StateVarName::active(b, a);
            let used = StateVarName::used_object(b, a);
            let pos = StateVarName::position(a);
            let read: Vec<&StateVarName> =
                [&used, &pos].into_iter().chain(&target_pos).collect();
            for seg in tl.true_segments(&act) {
                for piece in tl.refinement(read.iter().copied(), seg.interval) {
                    let t = piece.start;
                    let u = tl.segment_at(&used, t);
                    let p = tl.segment_at(&pos, t);
                    let target = u
                        .value
                        .as_sym()
                        .filter(|o| g.targets.contains(*o))
                        .map(StateVarName::position);
                    match target {
                        Some(tp) if tl.value_at(&tp, t) == &p.value => {
                            support.push(tl.segment_at(&tp, t));
                            support.extend([u, p]);
                        }
                        Some(tp) => {
                            let w = vec![seg.clone(), u, p, tl.segment_at(&tp, t)];
                            return Verdict::new(false, w);
                        }
                        None => return Verdict::new(false, vec![seg.clone(), u]),
                    }
                }
                support.push(seg);
            }
        }
        Verdict::new(true, support)
    }))
}
