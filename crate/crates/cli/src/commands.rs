use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use instnorm::admissibility::{is_admissible, AdmissibilityReport};
use instnorm::groundsearch::{enumerate_admissible, CoverPolicy, Fragment, GroundingQuery};
use instnorm::planner::{plan, PlanError, PlanOutcome, PlanRequest};
use instnorm::semantics::TimelineVar;
use instnorm::specfmt::{
    parse_domain, parse_grounding, parse_institution, parse_trajectory, reformat,
    serialize_grounding, serialize_trajectory, FileKind, ParseError,
};
use instnorm::verifier::{verify, NormStatus, VerificationReport, VerifyError};
use instnorm::{validate_grounding_structure, Domain, Grounding, Institution, Interval};
use serde_json::{json, Value};

use crate::args::{Command, SpecFiles};

pub const SCHEMA_VERSION: u32 = 1;

/// Result of a subcommand that ran to completion.
pub struct Outcome {
    /// False for a semantic negative: inadmissible, not adherent, unsat, no grounding.
    pub positive: bool,
    pub human: String,
    pub doc: Value,
}

/// Diagnostics for unreadable, malformed or inconsistent input.
pub struct InputError(pub Vec<String>);

type CmdResult = Result<Outcome, InputError>;

pub fn run(cmd: &Command) -> CmdResult {
    match cmd {
        Command::Check { spec, grounding } => check(spec, grounding),
        Command::Verify {
            spec,
            grounding,
            trajectory,
        } => verify_cmd(spec, grounding, trajectory),
        Command::Ground {
            spec,
            limit,
            maximal,
            fix,
        } => ground(spec, *limit, *maximal, fix.as_deref()),
        Command::Plan {
            spec,
            grounding,
            fix,
            horizon,
            max_segments,
        } => plan_cmd(spec, grounding.as_deref(), fix.as_deref(), horizon, *max_segments),
        Command::Fmt { file } => fmt_cmd(file),
    }
}

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Check { .. } => "check",
        Command::Verify { .. } => "verify",
        Command::Ground { .. } => "ground",
        Command::Plan { .. } => "plan",
        Command::Fmt { .. } => "fmt",
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(vec![format!("{}: {e}", path.display())]))
}

fn load<T>(path: &Path, parse: fn(&str, &str) -> Result<T, Vec<ParseError>>) -> Result<T, InputError> {
    let text = read(path)?;
    parse(&path.display().to_string(), &text)
        .map_err(|errs| InputError(errs.iter().map(ToString::to_string).collect()))
}

fn load_spec(spec: &SpecFiles) -> Result<(Institution, Domain), InputError> {
    Ok((
        load(&spec.institution, parse_institution)?,
        load(&spec.domain, parse_domain)?,
    ))
}

fn check_structure(inst: &Institution, dom: &Domain, g: &Grounding) -> Result<(), InputError> {
    let report = validate_grounding_structure(inst, dom, g);
    if report.is_valid() {
        Ok(())
    } else {
        Err(InputError(report.errors.iter().map(ToString::to_string).collect()))
    }
}

fn grounding_doc(g: &Grounding) -> Value {
    let pairs = |ps: &std::collections::BTreeSet<(instnorm::Ident, instnorm::Ident)>, k: &str, v: &str| {
        ps.iter()
            .map(|(a, b)| json!({ k: a.as_str(), v: b.as_str() }))
            .collect::<Vec<_>>()
    };
    json!({
        "roles": pairs(&g.roles, "role", "agent"),
        "acts": pairs(&g.acts, "act", "behavior"),
        "arts": pairs(&g.arts, "art", "object"),
    })
}

fn admissibility_doc(r: &AdmissibilityReport) -> Value {
    json!({
        "admissible": r.admissible,
        "failed_obligations": r.failed_obligations.iter().map(|f| json!({
            "norm": f.norm.to_string(),
            "agent": f.agent.as_str(),
        })).collect::<Vec<_>>(),
        "cardinality_violations": r.cardinality_violations.iter().map(|c| json!({
            "role": c.role.as_str(),
            "actual": c.actual,
            "min": c.min,
            "max": c.max.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn admissibility_human(r: &AdmissibilityReport) -> String {
    let mut out = String::from(if r.admissible { "admissible\n" } else { "not admissible\n" });
    for f in &r.failed_obligations {
        let _ = writeln!(out, "  obligation {} not executable by {}", f.norm, f.agent);
    }
    for c in &r.cardinality_violations {
        let _ = writeln!(out, "  cardinality {} has {} agent(s), needs [{},{}]", c.role, c.actual, c.min, c.max);
    }
    out
}

fn witness_item(w: &TimelineVar) -> String {
    format!("{}#{} {}={}", w.state_var, w.index, w.interval, w.value)
}

fn verification_doc(r: &VerificationReport) -> Value {
    json!({
        "adherent": r.adherent,
        "norms": r.per_norm.iter().map(|n| json!({
            "norm": n.norm.to_string(),
            "status": status_word(n.status),
            "witness": n.witness.iter().map(|w| json!({
                "var": w.state_var.to_string(),
                "index": w.index,
                "interval": [w.interval.start, w.interval.end],
                "value": w.value.to_string(),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn status_word(s: NormStatus) -> &'static str {
    match s {
        NormStatus::Satisfied => "SATISFIED",
        NormStatus::Violated => "VIOLATED",
    }
}

/// One line per norm, prefixed by `prefix`.
fn verification_lines(r: &VerificationReport, prefix: &str) -> String {
    let mut out = format!("{prefix}{}\n", if r.adherent { "adherent" } else { "not adherent" });
    for n in &r.per_norm {
        let _ = write!(out, "{prefix}  {} {}", status_word(n.status), n.norm);
        if n.status == NormStatus::Violated && !n.witness.is_empty() {
            let items: Vec<String> = n.witness.iter().map(witness_item).collect();
            let _ = write!(out, " witness {}", items.join(", "));
        }
        out.push('\n');
    }
    out
}

fn check(spec: &SpecFiles, grounding: &Path) -> CmdResult {
    let (inst, dom) = load_spec(spec)?;
    let g = load(grounding, parse_grounding)?;
    check_structure(&inst, &dom, &g)?;
    let report = is_admissible(&inst, &dom, &g);
    Ok(Outcome {
        positive: report.admissible,
        human: admissibility_human(&report),
        doc: json!({ "admissibility": admissibility_doc(&report) }),
    })
}

fn inadmissible(r: &AdmissibilityReport) -> Outcome {
    Outcome {
        positive: false,
        human: admissibility_human(r),
        doc: json!({ "admissibility": admissibility_doc(r) }),
    }
}

fn verify_cmd(spec: &SpecFiles, grounding: &Path, trajectory: &Path) -> CmdResult {
    let (inst, dom) = load_spec(spec)?;
    let g = load(grounding, parse_grounding)?;
    let traj = load(trajectory, parse_trajectory)?;
    match verify(&inst, &dom, &g, &traj) {
        Ok(report) => Ok(Outcome {
            positive: report.adherent,
            human: verification_lines(&report, ""),
            doc: json!({ "verification": verification_doc(&report) }),
        }),
        Err(VerifyError::Inadmissible(r)) => Ok(inadmissible(&r)),
        Err(VerifyError::Input(r)) => Err(InputError(r.errors.iter().map(ToString::to_string).collect())),
        Err(VerifyError::Compile(e)) => Err(InputError(vec![e.to_string()])),
    }
}

fn load_fragment(fix: Option<&Path>) -> Result<Fragment, InputError> {
    Ok(match fix {
        Some(p) => Fragment::from_grounding(&load(p, parse_grounding)?),
        None => Fragment::default(),
    })
}

fn ground(spec: &SpecFiles, limit: Option<usize>, maximal: bool, fix: Option<&Path>) -> CmdResult {
    let (inst, dom) = load_spec(spec)?;
    let mut query = GroundingQuery::new(&inst, &dom).fixing(load_fragment(fix)?);
    if let Some(n) = limit {
        query = query.limit(n);
    }
    if maximal {
        query = query.policy(CoverPolicy::Maximal);
    }
    let found: Vec<Grounding> = enumerate_admissible(query).collect();
    let mut human = String::new();
    for (i, g) in found.iter().enumerate() {
        if i > 0 {
            human.push('\n');
        }
        let _ = writeln!(human, "# grounding {}", i + 1);
        human.push_str(&serialize_grounding(g));
    }
    if found.is_empty() {
        human.push_str("no admissible grounding\n");
    } else {
        let _ = writeln!(human, "\n# {} admissible grounding(s)", found.len());
    }
    Ok(Outcome {
        positive: !found.is_empty(),
        human,
        doc: json!({
            "count": found.len(),
            "groundings": found.iter().map(grounding_doc).collect::<Vec<_>>(),
        }),
    })
}

fn plan_cmd(
    spec: &SpecFiles,
    grounding: Option<&Path>,
    fix: Option<&Path>,
    horizon: &[i64],
    max_segments: usize,
) -> CmdResult {
    let (inst, dom) = load_spec(spec)?;
    let [start, end] = horizon else {
        return Err(InputError(vec!["--horizon takes two time points".into()]));
    };
    let horizon = Interval::new(*start, *end)
        .ok_or_else(|| InputError(vec![format!("empty horizon [{start},{end}]")]))?;
    let mut req = PlanRequest::new(&inst, &dom, horizon)
        .max_segments(max_segments)
        .fixing(load_fragment(fix)?);
    if let Some(p) = grounding {
        let g = load(p, parse_grounding)?;
        check_structure(&inst, &dom, &g)?;
        req = req.grounding(g);
    }
    match plan(&req) {
        Ok(PlanOutcome::Found(p)) => {
            let mut human = String::from("# plan\n");
            for line in serialize_grounding(&p.grounding).lines() {
                let _ = writeln!(human, "# {line}");
            }
            let _ = writeln!(human, "# activations {}", p.activations);
            human.push_str(&verification_lines(&p.report, "# "));
            human.push_str(&serialize_trajectory(&p.trajectory));
            Ok(Outcome {
                positive: true,
                human,
                doc: json!({
                    "plan": {
                        "grounding": grounding_doc(&p.grounding),
                        "activations": p.activations,
                        "trajectory": serialize_trajectory(&p.trajectory),
                    },
                    "verification": verification_doc(&p.report),
                }),
            })
        }
        Ok(PlanOutcome::Unsat { groundings_tried }) => Ok(Outcome {
            positive: false,
            human: format!(
                "unsat: no adherent trajectory over {horizon} with at most {max_segments} segment(s) per variable ({groundings_tried} grounding(s) tried)\n"
            ),
            doc: json!({
                "unsat": {
                    "horizon": [horizon.start, horizon.end],
                    "max_segments": max_segments,
                    "groundings_tried": groundings_tried,
                },
            }),
        }),
        Err(PlanError::Inadmissible(r)) => Ok(inadmissible(&r)),
        Err(PlanError::Input(r)) => Err(InputError(r.errors.iter().map(ToString::to_string).collect())),
        Err(e) => Err(InputError(vec![e.to_string()])),
    }
}

fn fmt_cmd(file: &Path) -> CmdResult {
    let kind = file
        .extension()
        .and_then(|e| e.to_str())
        .and_then(FileKind::from_extension)
        .ok_or_else(|| {
            InputError(vec![format!(
                "{}: unknown file kind; expected .inst, .dom, .grd or .trj",
                file.display()
            )])
        })?;
    let text = read(file)?;
    let formatted = reformat(kind, &file.display().to_string(), &text)
        .map_err(|errs| InputError(errs.iter().map(ToString::to_string).collect()))?;
    Ok(Outcome {
        positive: true,
        doc: json!({ "kind": kind.extension(), "formatted": formatted }),
        human: formatted,
    })
}
