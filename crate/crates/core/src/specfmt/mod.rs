//! The line-oriented text formats for institutions (`.inst`), domains
//! (`.dom`), groundings (`.grd`) and trajectories (`.trj`).
//!
//! Every format has one declaration per line and `#` comments. Parsers
//! recover at line boundaries and report every error they find; serializers
//! produce a canonical, sorted rendering that parses back to an equal value.

mod domain;
mod grounding;
mod institution;
mod lexer;
mod trajectory;

pub use domain::{parse_domain, serialize_domain};
pub use grounding::{parse_grounding, serialize_grounding};
pub use institution::{parse_institution, serialize_institution};
pub use lexer::{ParseError, SourceSpan};
pub use trajectory::{parse_trajectory, serialize_trajectory};

/// The four file kinds, keyed by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Institution,
    Domain,
    Grounding,
    Trajectory,
}

impl FileKind {
    pub fn from_extension(ext: &str) -> Option<Self> {
        Some(match ext {
            "inst" => FileKind::Institution,
            "dom" => FileKind::Domain,
            "grd" => FileKind::Grounding,
            "trj" => FileKind::Trajectory,
            _ => return None,
        })
    }

    pub fn extension(self) -> &'static str {
        match self {
            FileKind::Institution => "inst",
            FileKind::Domain => "dom",
            FileKind::Grounding => "grd",
            FileKind::Trajectory => "trj",
        }
    }
}

/// Parses `text` as `kind` and renders it canonically.
pub fn reformat(kind: FileKind, file: &str, text: &str) -> Result<String, Vec<ParseError>> {
    Ok(match kind {
        FileKind::Institution => serialize_institution(&parse_institution(file, text)?),
        FileKind::Domain => serialize_domain(&parse_domain(file, text)?),
        FileKind::Grounding => serialize_grounding(&parse_grounding(file, text)?),
        FileKind::Trajectory => serialize_trajectory(&parse_trajectory(file, text)?),
    })
}
