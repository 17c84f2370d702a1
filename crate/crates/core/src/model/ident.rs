use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Words that can never be used as identifiers because they denote values.
pub const RESERVED_WORDS: [&str; 3] = ["true", "false", "none"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier `{0}`")]
pub struct IdentError(pub String);

/// A case-sensitive ASCII identifier: `[A-Za-z][A-Za-z0-9_-]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: impl Into<String>) -> Result<Self, IdentError> {
        let s = s.into();
        if is_identifier(&s) && !RESERVED_WORDS.contains(&s.as_str()) {
            Ok(Ident(Arc::from(s)))
        } else {
            Err(IdentError(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Shorthand used heavily by tests and fixtures built in code.
///
/// Panics on an invalid identifier.
pub fn id(s: &str) -> Ident {
    Ident::new(s).unwrap_or_else(|e| panic!("{e}"))
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl Serialize for Ident {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// Structured state-variable name: a functor applied to identifier arguments,
/// e.g. `active(give,nao)` or `position(mbot11)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVarName {
    pub functor: Ident,
    pub args: Vec<Ident>,
}

pub const ACTIVE: &str = "active";
pub const USED_OBJECT: &str = "usedObject";
pub const POSITION: &str = "position";

impl StateVarName {
    pub fn new(functor: Ident, args: Vec<Ident>) -> Self {
        StateVarName { functor, args }
    }

    pub fn active(behavior: &Ident, agent: &Ident) -> Self {
        StateVarName::new(id(ACTIVE), vec![behavior.clone(), agent.clone()])
    }

    pub fn used_object(behavior: &Ident, agent: &Ident) -> Self {
        StateVarName::new(id(USED_OBJECT), vec![behavior.clone(), agent.clone()])
    }

    pub fn position(entity: &Ident) -> Self {
        StateVarName::new(id(POSITION), vec![entity.clone()])
    }

    /// `true` for the `active(b,a)` and `usedObject(b,a)` families that every
    /// domain declares implicitly.
    pub fn is_implicit(&self) -> bool {
        self.args.len() == 2
            && (self.functor.as_str() == ACTIVE || self.functor.as_str() == USED_OBJECT)
    }

    /// Implicit default value, if this is an implicit variable.
    pub fn implicit_default(&self) -> Option<Value> {
        if !self.is_implicit() {
            return None;
        }
        if self.functor.as_str() == ACTIVE {
            Some(Value::Bool(false))
        } else {
            Some(Value::None)
        }
    }
}

impl fmt::Display for StateVarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.functor)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for StateVarName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A value a state variable can take.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    None,
    Sym(Ident),
}

impl Value {
    pub fn parse(s: &str) -> Option<Value> {
        match s {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            "none" => Some(Value::None),
            other => Ident::new(other).ok().map(Value::Sym),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    pub fn as_sym(&self) -> Option<&Ident> {
        match self {
            Value::Sym(s) => Some(s),
            _ => None,
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<Ident> for Value {
    fn from(i: Ident) -> Self {
        Value::Sym(i)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("true"),
            Value::Bool(false) => f.write_str("false"),
            Value::None => f.write_str("none"),
            Value::Sym(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
