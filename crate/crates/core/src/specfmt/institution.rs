use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::model::{
    known_qualifier, validate_institution, CardBounds, Ident, Institution, MaxCard, Norm,
    Statement,
};

use super::lexer::{file_start, lines, Line, ParseError, Res, SourceSpan, Tok};

const KEYWORDS: &[&str] = &["institution", "arts", "roles", "acts", "norm", "card"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Category {
    Art,
    Role,
    Act,
}

impl Category {
    fn label(self) -> &'static str {
        match self {
            Category::Art => "artifact",
            Category::Role => "role",
            Category::Act => "act",
        }
    }
}

struct RawStatement {
    parts: [(Ident, SourceSpan); 3],
}

struct RawNorm {
    qualifier: (Ident, SourceSpan),
    statements: Vec<RawStatement>,
}

struct RawCard {
    role: (Ident, SourceSpan),
    min: u32,
    max: MaxCard,
    span: SourceSpan,
}

fn statement(line: &mut Line<'_>) -> Res<RawStatement> {
    line.expect(Tok::LParen)?;
    let s = line.ident()?;
    line.expect(Tok::Comma)?;
    let p = line.ident()?;
    line.expect(Tok::Comma)?;
    let o = line.ident()?;
    line.expect(Tok::RParen)?;
    Ok(RawStatement { parts: [s, p, o] })
}

fn card_number(line: &mut Line<'_>) -> Res<u32> {
    let (v, span) = line.int()?;
    u32::try_from(v).map_err(|_| ParseError::new(span, "cardinality is too large"))
}

pub fn parse_institution(file: &str, text: &str) -> Result<Institution, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut header: Option<(Ident, SourceSpan)> = None;
    let mut decls: Vec<(Category, Ident, SourceSpan)> = Vec::new();
    let mut norms: Vec<RawNorm> = Vec::new();
    let mut cards: Vec<RawCard> = Vec::new();

    for mut line in lines(file, text) {
        let res: Res<()> = (|| {
            let (kw, kw_span) = line.ident()?;
            match kw.as_str() {
                "institution" => {
                    let name = line.ident()?;
                    line.finish()?;
                    if header.is_some() {
                        return Err(ParseError::new(kw_span, "duplicate institution header"));
                    }
                    header = Some(name);
                }
                "arts" | "roles" | "acts" => {
                    let cat = match kw.as_str() {
                        "arts" => Category::Art,
                        "roles" => Category::Role,
                        _ => Category::Act,
                    };
                    for (i, s) in line.ident_list()? {
                        decls.push((cat, i, s));
                    }
                }
                "norm" => {
                    let qualifier = line.ident()?;
                    let mut statements = Vec::new();
                    loop {
                        statements.push(statement(&mut line)?);
                        line.eat(Tok::Comma);
                        if line.at_end() {
                            break;
                        }
                    }
                    norms.push(RawNorm {
                        qualifier,
                        statements,
                    });
                }
                "card" => {
                    let role = line.ident()?;
                    let min = card_number(&mut line)?;
                    let max = if line.eat(Tok::Star) {
                        MaxCard::Unbounded
                    } else {
                        MaxCard::Finite(card_number(&mut line)?)
                    };
                    line.finish()?;
                    cards.push(RawCard {
                        span: role.1.clone(),
                        role,
                        min,
                        max,
                    });
                }
                other => {
                    return Err(ParseError::new(kw_span, format!("unknown keyword `{other}`"))
                        .expecting(KEYWORDS))
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            errors.push(e);
        }
    }

    let Some((name, header_span)) = header else {
        errors.insert(
            0,
            ParseError::new(file_start(file), "missing institution header")
                .expecting(&["institution <name>"]),
        );
        return Err(errors);
    };

    let mut inst = Institution::new(name);
    let mut category: BTreeMap<Ident, Category> = BTreeMap::new();
    for (cat, ident, span) in decls {
        if let Some(prev) = category.get(&ident) {
            errors.push(ParseError::new(
                span,
                format!("duplicate declaration `{ident}` (already declared as {})", prev.label()),
            ));
            continue;
        }
        category.insert(ident.clone(), cat);
        match cat {
            Category::Art => inst.arts.insert(ident),
            Category::Role => inst.roles.insert(ident),
            Category::Act => inst.acts.insert(ident),
        };
    }

    let check = |ident: &(Ident, SourceSpan), allowed: &[Category], what: &str| {
        match category.get(&ident.0) {
            Some(c) if allowed.contains(c) => None,
            _ => Some(ParseError::new(
                ident.1.clone(),
                format!("undeclared {what} `{}`", ident.0),
            )),
        }
    };

    let mut seen_norms = BTreeSet::new();
    for raw in norms {
        let (q, qspan) = &raw.qualifier;
        if let Some(sig) = known_qualifier(q.as_str()) {
            if sig.arity != raw.statements.len() {
                errors.push(
                    ParseError::new(
                        qspan.clone(),
                        format!(
                            "qualifier `{q}` expects {} statement(s), found {}",
                            sig.arity,
                            raw.statements.len()
                        ),
                    )
                    .expecting(&[if sig.arity == 1 { "1 statement" } else { "2 statements" }]),
                );
                continue;
            }
        }
        let mut ok = true;
        for s in &raw.statements {
            for e in [
                check(&s.parts[0], &[Category::Role], "role"),
                check(&s.parts[1], &[Category::Act], "act"),
                check(&s.parts[2], &[Category::Art, Category::Role], "artifact or role"),
            ]
            .into_iter()
            .flatten()
            {
                errors.push(e);
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let norm = Norm::new(
            q.clone(),
            raw.statements
                .into_iter()
                .map(|s| {
                    let [a, b, c] = s.parts;
                    Statement::new(a.0, b.0, c.0)
                })
                .collect(),
        );
        if !seen_norms.insert(norm.clone()) {
            errors.push(ParseError::new(qspan.clone(), format!("duplicate norm {norm}")));
            continue;
        }
        inst.norms.insert(norm);
    }

    for c in cards {
        if let Some(e) = check(&c.role, &[Category::Role], "role") {
            errors.push(e);
            continue;
        }
        let bounds = CardBounds {
            min: c.min,
            max: c.max,
        };
        if !bounds.is_ordered() {
            errors.push(ParseError::new(
                c.span,
                format!("min > max ({} > {})", c.min, c.max),
            ));
            continue;
        }
        if c.max == MaxCard::Finite(0) {
            errors.push(ParseError::new(c.span, "max cardinality must be positive"));
            continue;
        }
        if inst.cardinality.bounds.insert(c.role.0.clone(), bounds).is_some() {
            errors.push(ParseError::new(
                c.span,
                format!("duplicate cardinality for role `{}`", c.role.0),
            ));
        }
    }

    if errors.is_empty() {
        // Anything the line-level checks did not catch (e.g. empty sets).
        for p in validate_institution(&inst).errors {
            errors.push(ParseError::new(header_span.clone(), p.to_string()));
        }
    }
    if errors.is_empty() {
        Ok(inst)
    } else {
        Err(errors)
    }
}

fn write_set<'a>(out: &mut String, kw: &str, items: impl IntoIterator<Item = &'a Ident>) {
    let items: Vec<_> = items.into_iter().map(Ident::as_str).collect();
    if !items.is_empty() {
        let _ = writeln!(out, "{kw} {}", items.join(" "));
    }
}

pub fn serialize_institution(inst: &Institution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "institution {}", inst.name);
    write_set(&mut out, "arts", &inst.arts);
    write_set(&mut out, "roles", &inst.roles);
    write_set(&mut out, "acts", &inst.acts);
    for n in &inst.norms {
        let _ = write!(out, "norm {}", n.qualifier);
        for s in &n.statements {
            let _ = write!(out, " ({}, {}, {})", s.subject, s.predicate, s.object);
        }
        out.push('\n');
    }
    for (role, b) in &inst.cardinality.bounds {
        let _ = writeln!(out, "card {role} {} {}", b.min, b.max);
    }
    out
}
