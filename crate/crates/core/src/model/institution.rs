use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::ident::Ident;

/// `(subject role, predicate act, object artifact-or-role)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Statement {
    pub subject: Ident,
    pub predicate: Ident,
    pub object: Ident,
}

impl Statement {
    pub fn new(subject: Ident, predicate: Ident, object: Ident) -> Self {
        Statement {
            subject,
            predicate,
            object,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Obligation,
    Modal,
}

/// What the framework knows about a qualifier name before any semantics are
/// attached to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QualifierSignature {
    pub kind: NormKind,
    pub arity: usize,
    /// Prohibitions are obligation-kind but never checked for executability.
    pub prohibition: bool,
}

/// Signatures of the qualifiers shipped with the engine. Anything else is a
/// modal norm of unchecked arity whose meaning must come from a registered
/// semantics.
pub fn known_qualifier(name: &str) -> Option<QualifierSignature> {
    let obligation = |prohibition| QualifierSignature {
        kind: NormKind::Obligation,
        arity: 1,
        prohibition,
    };
    let modal = |arity| QualifierSignature {
        kind: NormKind::Modal,
        arity,
        prohibition: false,
    };
    Some(match name {
        "must" | "mustAlways" | "mustToward" | "mustEach" => obligation(false),
        "mustNot" => obligation(true),
        "at" | "use" | "atUsed" => modal(1),
        "before" => modal(2),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Norm {
    pub qualifier: Ident,
    pub statements: Vec<Statement>,
    pub kind: NormKind,
}

impl Norm {
    /// Builds a norm, deriving its kind from the qualifier. Arity is checked
    /// by validation, not here.
    pub fn new(qualifier: Ident, statements: Vec<Statement>) -> Self {
        let kind = known_qualifier(qualifier.as_str())
            .map(|s| s.kind)
            .unwrap_or(NormKind::Modal);
        Norm {
            qualifier,
            statements,
            kind,
        }
    }

    pub fn unary(qualifier: &str, s: Statement) -> Self {
        Norm::new(super::ident::id(qualifier), vec![s])
    }

    pub fn is_obligation(&self) -> bool {
        self.kind == NormKind::Obligation
    }

    pub fn is_prohibition(&self) -> bool {
        known_qualifier(self.qualifier.as_str()).is_some_and(|s| s.prohibition)
    }

    /// The statement of a unary norm.
    pub fn statement(&self) -> &Statement {
        &self.statements[0]
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.qualifier)?;
        if let [s] = self.statements.as_slice() {
            return write!(f, "{s}");
        }
        f.write_str("(")?;
        for (i, s) in self.statements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxCard {
    Finite(u32),
    Unbounded,
}

impl MaxCard {
    pub fn admits(self, n: usize) -> bool {
        match self {
            MaxCard::Finite(m) => n <= m as usize,
            MaxCard::Unbounded => true,
        }
    }
}

impl fmt::Display for MaxCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxCard::Finite(m) => write!(f, "{m}"),
            MaxCard::Unbounded => f.write_str("*"),
        }
    }
}

impl Serialize for MaxCard {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MaxCard::Finite(m) => s.serialize_u32(*m),
            MaxCard::Unbounded => s.serialize_str("*"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CardBounds {
    pub min: u32,
    pub max: MaxCard,
}

impl CardBounds {
    pub const DEFAULT: CardBounds = CardBounds {
        min: 0,
        max: MaxCard::Unbounded,
    };

    pub fn new(min: u32, max: u32) -> Self {
        CardBounds {
            min,
            max: MaxCard::Finite(max),
        }
    }

    pub fn at_least(min: u32) -> Self {
        CardBounds {
            min,
            max: MaxCard::Unbounded,
        }
    }

    pub fn admits(self, n: usize) -> bool {
        n >= self.min as usize && self.max.admits(n)
    }

    pub fn is_ordered(self) -> bool {
        match self.max {
            MaxCard::Finite(m) => self.min <= m,
            MaxCard::Unbounded => true,
        }
    }
}

/// Per-role minimum/maximum number of enacting agents. Roles without an entry
/// are bounded by `(0, *)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CardinalityNorm {
    pub bounds: BTreeMap<Ident, CardBounds>,
}

impl CardinalityNorm {
    pub fn bounds_for(&self, role: &Ident) -> CardBounds {
        self.bounds.get(role).copied().unwrap_or(CardBounds::DEFAULT)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Institution {
    pub name: Ident,
    pub arts: BTreeSet<Ident>,
    pub roles: BTreeSet<Ident>,
    pub acts: BTreeSet<Ident>,
    pub norms: BTreeSet<Norm>,
    pub cardinality: CardinalityNorm,
}

impl Institution {
    pub fn new(name: Ident) -> Self {
        Institution {
            name,
            arts: BTreeSet::new(),
            roles: BTreeSet::new(),
            acts: BTreeSet::new(),
            norms: BTreeSet::new(),
            cardinality: CardinalityNorm::default(),
        }
    }

    pub fn obligations(&self) -> impl Iterator<Item = &Norm> {
        self.norms.iter().filter(|n| n.is_obligation())
    }

    /// Whether the object slot of a statement names a role (rather than an
    /// artifact).
    pub fn object_is_role(&self, s: &Statement) -> bool {
        self.roles.contains(&s.object)
    }
}
