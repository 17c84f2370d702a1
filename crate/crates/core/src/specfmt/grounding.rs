use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::{Grounding, Ident};

use super::lexer::{lines, ParseError, Res, Tok};

/// Parses `role R -> agent`, `act A -> behavior` and `art X -> object` lines.
///
/// Only local well-formedness is checked here; references are resolved
/// against an institution and a domain by `validate_grounding_structure`.
pub fn parse_grounding(file: &str, text: &str) -> Result<Grounding, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut g = Grounding::new();
    let mut role_of: BTreeMap<Ident, Ident> = BTreeMap::new();

    for mut line in lines(file, text) {
        let res: Res<()> = (|| {
            let (kw, kw_span) = line.ident()?;
            let (lhs, _) = line.ident()?;
            line.expect(Tok::Arrow)?;
            let (rhs, rhs_span) = line.ident()?;
            line.finish()?;
            match kw.as_str() {
                "role" => {
                    if let Some(prev) = role_of.get(&rhs) {
                        return Err(ParseError::new(
                            rhs_span,
                            format!("agent `{rhs}` is already grounded to role `{prev}`"),
                        ));
                    }
                    role_of.insert(rhs.clone(), lhs.clone());
                    g.roles.insert((lhs, rhs));
                }
                "act" | "art" => {
                    let set = if kw.as_str() == "act" {
                        &mut g.acts
                    } else {
                        &mut g.arts
                    };
                    if !set.insert((lhs.clone(), rhs.clone())) {
                        return Err(ParseError::new(
                            rhs_span,
                            format!("duplicate grounding {kw} {lhs} -> {rhs}"),
                        ));
                    }
                }
                other => {
                    return Err(ParseError::new(kw_span, format!("unknown keyword `{other}`"))
                        .expecting(&["role", "act", "art"]))
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            errors.push(e);
        }
    }
    if errors.is_empty() {
        Ok(g)
    } else {
        Err(errors)
    }
}

pub fn serialize_grounding(g: &Grounding) -> String {
    let mut out = String::new();
    for (r, a) in &g.roles {
        let _ = writeln!(out, "role {r} -> {a}");
    }
    for (x, b) in &g.acts {
        let _ = writeln!(out, "act {x} -> {b}");
    }
    for (x, o) in &g.arts {
        let _ = writeln!(out, "art {x} -> {o}");
    }
    out
}
