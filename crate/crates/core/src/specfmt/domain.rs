use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::model::{
    validate_domain, Affordance, BuiltinValues, Domain, Ident, StateVarDecl, StateVarName, Value,
    ValueSet,
};

use super::lexer::{file_start, lines, ParseError, Res, SourceSpan};

const KEYWORDS: &[&str] = &[
    "domain",
    "agents",
    "objects",
    "behaviors",
    "afford",
    "statevar",
    "concurrent-behaviors",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Category {
    Agent,
    Object,
    Behavior,
}

impl Category {
    fn label(self) -> &'static str {
        match self {
            Category::Agent => "agent",
            Category::Object => "object",
            Category::Behavior => "behavior",
        }
    }
}

struct RawStateVar {
    name: (StateVarName, SourceSpan),
    values: ValueSet,
    default: Option<(Value, SourceSpan)>,
}

pub fn parse_domain(file: &str, text: &str) -> Result<Domain, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut header: Option<(Ident, SourceSpan)> = None;
    let mut decls: Vec<(Category, Ident, SourceSpan)> = Vec::new();
    let mut affordances: Vec<[(Ident, SourceSpan); 3]> = Vec::new();
    let mut state_vars: Vec<RawStateVar> = Vec::new();
    let mut concurrent: Option<(bool, SourceSpan)> = None;

    for mut line in lines(file, text) {
        let res: Res<()> = (|| {
            let (kw, kw_span) = line.ident()?;
            match kw.as_str() {
                "domain" => {
                    let name = line.ident()?;
                    line.finish()?;
                    if header.is_some() {
                        return Err(ParseError::new(kw_span, "duplicate domain header"));
                    }
                    header = Some(name);
                }
                "agents" | "objects" | "behaviors" => {
                    let cat = match kw.as_str() {
                        "agents" => Category::Agent,
                        "objects" => Category::Object,
                        _ => Category::Behavior,
                    };
                    for (i, s) in line.ident_list()? {
                        decls.push((cat, i, s));
                    }
                }
                "afford" => {
                    let a = line.ident()?;
                    let b = line.ident()?;
                    let o = line.ident()?;
                    line.finish()?;
                    affordances.push([a, b, o]);
                }
                "statevar" => {
                    let name = line.state_var_name()?;
                    let (mode, mode_span) = line.ident()?;
                    let values = match mode.as_str() {
                        "values" => {
                            let mut set = BTreeSet::new();
                            while line.peek().is_some_and(|t| t.text != "default") {
                                let (v, vspan) = line.ident()?;
                                if !set.insert(v.clone()) {
                                    return Err(ParseError::new(
                                        vspan,
                                        format!("duplicate value `{v}`"),
                                    ));
                                }
                            }
                            if set.is_empty() {
                                return Err(line.err_here(
                                    "value set must not be empty",
                                    &["identifier"],
                                ));
                            }
                            ValueSet::Symbols(set)
                        }
                        "builtin" => {
                            let (k, kspan) = line.ident()?;
                            match BuiltinValues::from_keyword(k.as_str()) {
                                Some(b) => ValueSet::Builtin(b),
                                None => {
                                    return Err(ParseError::new(
                                        kspan,
                                        format!("unknown builtin value set `{k}`"),
                                    )
                                    .expecting(&[
                                        "boolean",
                                        "object-ref",
                                        "agent-ref",
                                        "entity-ref",
                                    ]))
                                }
                            }
                        }
                        other => {
                            return Err(ParseError::new(
                                mode_span,
                                format!("unexpected `{other}` in state variable declaration"),
                            )
                            .expecting(&["values", "builtin"]))
                        }
                    };
                    let default = match line.peek() {
                        Some(t) if t.text == "default" => {
                            line.pos += 1;
                            Some(line.value()?)
                        }
                        _ => None,
                    };
                    line.finish()?;
                    state_vars.push(RawStateVar {
                        name,
                        values,
                        default,
                    });
                }
                "concurrent-behaviors" => {
                    let (v, vspan) = line.ident()?;
                    line.finish()?;
                    let allowed = match v.as_str() {
                        "allowed" => true,
                        "forbidden" => false,
                        other => {
                            return Err(ParseError::new(vspan, format!("unexpected `{other}`"))
                                .expecting(&["allowed", "forbidden"]))
                        }
                    };
                    if concurrent.is_some() {
                        return Err(ParseError::new(kw_span, "duplicate concurrent-behaviors line"));
                    }
                    concurrent = Some((allowed, kw_span));
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
            ParseError::new(file_start(file), "missing domain header").expecting(&["domain <name>"]),
        );
        return Err(errors);
    };

    let mut dom = Domain::new(name);
    dom.concurrent_behaviors = concurrent.map(|c| c.0).unwrap_or(false);
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
            Category::Agent => dom.agents.insert(ident),
            Category::Object => dom.objects.insert(ident),
            Category::Behavior => dom.behaviors.insert(ident),
        };
    }

    for [a, b, o] in affordances {
        let mut ok = true;
        if category.get(&a.0) != Some(&Category::Agent) {
            errors.push(ParseError::new(a.1.clone(), format!("undeclared agent `{}`", a.0)));
            ok = false;
        }
        if category.get(&b.0) != Some(&Category::Behavior) {
            errors.push(ParseError::new(b.1.clone(), format!("undeclared behavior `{}`", b.0)));
            ok = false;
        }
        if !matches!(category.get(&o.0), Some(Category::Agent | Category::Object)) {
            errors.push(ParseError::new(
                o.1.clone(),
                format!("undeclared object or agent `{}`", o.0),
            ));
            ok = false;
        }
        if ok && !dom.affordances.insert(Affordance::new(a.0, b.0, o.0.clone())) {
            errors.push(ParseError::new(o.1, "duplicate affordance"));
        }
    }

    for sv in state_vars {
        let (name, span) = sv.name;
        if name.is_implicit() {
            errors.push(ParseError::new(
                span,
                format!("{name} is declared implicitly for every behavior and agent"),
            ));
            continue;
        }
        if dom.state_vars.contains_key(&name) {
            errors.push(ParseError::new(span, format!("duplicate state variable {name}")));
            continue;
        }
        let mut decl = StateVarDecl {
            name: name.clone(),
            values: sv.values,
            default: None,
        };
        if let Some((v, vspan)) = sv.default {
            if !dom.admits_value(&decl, &v) {
                errors.push(ParseError::new(
                    vspan,
                    format!("default `{v}` is not a value of {name}"),
                ));
                continue;
            }
            decl.default = Some(v);
        }
        dom.state_vars.insert(name, decl);
    }

    if errors.is_empty() {
        for p in validate_domain(&dom).errors {
            errors.push(ParseError::new(header_span.clone(), p.to_string()));
        }
    }
    if errors.is_empty() {
        Ok(dom)
    } else {
        Err(errors)
    }
}

pub fn serialize_domain(dom: &Domain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", dom.name);
    for (kw, set) in [
        ("agents", &dom.agents),
        ("objects", &dom.objects),
        ("behaviors", &dom.behaviors),
    ] {
        if !set.is_empty() {
            let items: Vec<_> = set.iter().map(Ident::as_str).collect();
            let _ = writeln!(out, "{kw} {}", items.join(" "));
        }
    }
    if dom.concurrent_behaviors {
        out.push_str("concurrent-behaviors allowed\n");
    }
    for f in &dom.affordances {
        let _ = writeln!(out, "afford {} {} {}", f.agent, f.behavior, f.target);
    }
    for decl in dom.state_vars.values() {
        let _ = write!(out, "statevar {}", decl.name);
        match &decl.values {
            ValueSet::Builtin(b) => {
                let _ = write!(out, " builtin {}", b.keyword());
            }
            ValueSet::Symbols(s) => {
                out.push_str(" values");
                for v in s {
                    let _ = write!(out, " {v}");
                }
            }
        }
        if let Some(d) = &decl.default {
            let _ = write!(out, " default {d}");
        }
        out.push('\n');
    }
    out
}
