use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::ident::{Ident, StateVarName, Value};

/// `(agent, behavior, object-or-agent)`: the agent can execute the behavior
/// with that target.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Affordance {
    pub agent: Ident,
    pub behavior: Ident,
    pub target: Ident,
}

impl Affordance {
    pub fn new(agent: Ident, behavior: Ident, target: Ident) -> Self {
        Affordance {
            agent,
            behavior,
            target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BuiltinValues {
    Boolean,
    /// Objects plus `none`.
    ObjectRef,
    /// Agents plus `none`.
    AgentRef,
    /// Objects, agents and `none`.
    EntityRef,
}

impl BuiltinValues {
    pub fn keyword(self) -> &'static str {
        match self {
            BuiltinValues::Boolean => "boolean",
            BuiltinValues::ObjectRef => "object-ref",
            BuiltinValues::AgentRef => "agent-ref",
            BuiltinValues::EntityRef => "entity-ref",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "boolean" => BuiltinValues::Boolean,
            "object-ref" => BuiltinValues::ObjectRef,
            "agent-ref" => BuiltinValues::AgentRef,
            "entity-ref" => BuiltinValues::EntityRef,
            _ => return None,
        })
    }

    fn default_value(self) -> Value {
        match self {
            BuiltinValues::Boolean => Value::Bool(false),
            _ => Value::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueSet {
    Builtin(BuiltinValues),
    Symbols(BTreeSet<Ident>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarDecl {
    pub name: StateVarName,
    pub values: ValueSet,
    /// `None` means the value set's natural default: `false`/`none` for the
    /// builtins, the first symbol otherwise.
    pub default: Option<Value>,
}

impl StateVarDecl {
    pub fn symbols(name: StateVarName, values: impl IntoIterator<Item = Ident>) -> Self {
        StateVarDecl {
            name,
            values: ValueSet::Symbols(values.into_iter().collect()),
            default: None,
        }
    }

    pub fn with_default(mut self, v: Value) -> Self {
        self.default = Some(v);
        self
    }

    pub fn default_value(&self) -> Value {
        if let Some(v) = &self.default {
            return v.clone();
        }
        match &self.values {
            ValueSet::Builtin(b) => b.default_value(),
            ValueSet::Symbols(s) => s
                .iter()
                .next()
                .cloned()
                .map(Value::Sym)
                .unwrap_or(Value::None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: Ident,
    pub agents: BTreeSet<Ident>,
    pub objects: BTreeSet<Ident>,
    pub behaviors: BTreeSet<Ident>,
    pub affordances: BTreeSet<Affordance>,
    /// Explicitly declared state variables. `active(b,a)` and
    /// `usedObject(b,a)` are implicit and never stored here.
    pub state_vars: BTreeMap<StateVarName, StateVarDecl>,
    /// Whether one agent may run several behaviors at the same time point.
    pub concurrent_behaviors: bool,
}

impl Domain {
    pub fn new(name: Ident) -> Self {
        Domain {
            name,
            agents: BTreeSet::new(),
            objects: BTreeSet::new(),
            behaviors: BTreeSet::new(),
            affordances: BTreeSet::new(),
            state_vars: BTreeMap::new(),
            concurrent_behaviors: false,
        }
    }

    pub fn affords(&self, agent: &Ident, behavior: &Ident, target: &Ident) -> bool {
        // BTreeSet lookup needs an owned key; affordance sets are small.
        self.affordances
            .iter()
            .any(|f| &f.agent == agent && &f.behavior == behavior && &f.target == target)
    }

    pub fn affordances_of<'a>(
        &'a self,
        agent: &'a Ident,
        behavior: &'a Ident,
    ) -> impl Iterator<Item = &'a Ident> + 'a {
        self.affordances
            .iter()
            .filter(move |f| &f.agent == agent && &f.behavior == behavior)
            .map(|f| &f.target)
    }

    pub fn is_entity(&self, x: &Ident) -> bool {
        self.agents.contains(x) || self.objects.contains(x)
    }

    /// Declaration for any state variable, implicit ones included.
    pub fn state_var(&self, name: &StateVarName) -> Option<StateVarDecl> {
        if name.is_implicit() {
            let (b, a) = (&name.args[0], &name.args[1]);
            if !self.behaviors.contains(b) || !self.agents.contains(a) {
                return None;
            }
            let values = if name.functor.as_str() == super::ident::ACTIVE {
                BuiltinValues::Boolean
            } else {
                BuiltinValues::EntityRef
            };
            return Some(StateVarDecl {
                name: name.clone(),
                values: ValueSet::Builtin(values),
                default: None,
            });
        }
        self.state_vars.get(name).cloned()
    }

    /// Every state variable of the domain: the implicit `active`/`usedObject`
    /// pair for each behavior-agent combination plus the declared ones, in
    /// canonical order.
    pub fn all_state_vars(&self) -> Vec<StateVarDecl> {
        let implicit = 2 * self.behaviors.len() * self.agents.len();
        let mut out: Vec<StateVarDecl> = Vec::with_capacity(self.state_vars.len() + implicit);
        out.extend(self.state_vars.values().cloned());
        for b in &self.behaviors {
            for a in &self.agents {
                for (name, values) in [
                    (StateVarName::active(b, a), BuiltinValues::Boolean),
                    (StateVarName::used_object(b, a), BuiltinValues::EntityRef),
                ] {
                    out.push(StateVarDecl {
                        name,
                        values: ValueSet::Builtin(values),
                        default: None,
                    });
                }
            }
        }
        // Declared names are never implicit, so names are unique.
        out.sort_unstable_by(|x, y| x.name.cmp(&y.name));
        out
    }

    pub fn default_value(&self, name: &StateVarName) -> Option<Value> {
        self.state_var(name).map(|d| d.default_value())
    }

    /// Enumerates the finite value set of a declaration.
    pub fn values_of(&self, decl: &StateVarDecl) -> BTreeSet<Value> {
        match &decl.values {
            ValueSet::Symbols(s) => s.iter().cloned().map(Value::Sym).collect(),
            ValueSet::Builtin(b) => {
                let mut out = BTreeSet::new();
                match b {
                    BuiltinValues::Boolean => {
                        out.insert(Value::Bool(false));
                        out.insert(Value::Bool(true));
                    }
                    BuiltinValues::ObjectRef => {
                        out.insert(Value::None);
                        out.extend(self.objects.iter().cloned().map(Value::Sym));
                    }
                    BuiltinValues::AgentRef => {
                        out.insert(Value::None);
                        out.extend(self.agents.iter().cloned().map(Value::Sym));
                    }
                    BuiltinValues::EntityRef => {
                        out.insert(Value::None);
                        out.extend(self.objects.iter().cloned().map(Value::Sym));
                        out.extend(self.agents.iter().cloned().map(Value::Sym));
                    }
                }
                out
            }
        }
    }

    pub fn admits_value(&self, decl: &StateVarDecl, v: &Value) -> bool {
        match (&decl.values, v) {
            (ValueSet::Symbols(s), Value::Sym(x)) => s.contains(x),
            (ValueSet::Symbols(_), _) => false,
            (ValueSet::Builtin(BuiltinValues::Boolean), Value::Bool(_)) => true,
            (ValueSet::Builtin(BuiltinValues::Boolean), _) => false,
            (ValueSet::Builtin(_), Value::Bool(_)) => false,
            (ValueSet::Builtin(_), Value::None) => true,
            (ValueSet::Builtin(BuiltinValues::ObjectRef), Value::Sym(x)) => {
                self.objects.contains(x)
            }
            (ValueSet::Builtin(BuiltinValues::AgentRef), Value::Sym(x)) => self.agents.contains(x),
            (ValueSet::Builtin(BuiltinValues::EntityRef), Value::Sym(x)) => self.is_entity(x),
        }
    }
}

impl fmt::Display for Affordance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.agent, self.behavior, self.target)
    }
}
