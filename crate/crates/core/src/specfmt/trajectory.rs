use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::{Interval, Segment, StateVarName, Trajectory, TrajectoryError, Value, ACTIVE};

use super::lexer::{file_start, lines, ParseError, Res, SourceSpan, Tok};

struct RawTimeline {
    name: (StateVarName, SourceSpan),
    segments: Vec<(Interval, SourceSpan, Value, SourceSpan)>,
}

pub fn parse_trajectory(file: &str, text: &str) -> Result<Trajectory, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut horizon: Option<(Interval, SourceSpan)> = None;
    let mut raws: Vec<RawTimeline> = Vec::new();

    for mut line in lines(file, text) {
        let res: Res<()> = (|| {
            let (kw, kw_span) = line.ident()?;
            match kw.as_str() {
                "horizon" => {
                    let (a, aspan) = line.int()?;
                    let (b, _) = line.int()?;
                    line.finish()?;
                    if horizon.is_some() {
                        return Err(ParseError::new(kw_span, "duplicate horizon header"));
                    }
                    let iv = Interval::new(a, b).ok_or_else(|| {
                        ParseError::new(aspan, format!("empty interval [{a},{b}]"))
                    })?;
                    horizon = Some((iv, kw_span));
                }
                "timeline" => {
                    let name = line.state_var_name()?;
                    line.expect(Tok::Colon)?;
                    let mut segments = Vec::new();
                    while !line.at_end() {
                        let (iv, ispan) = line.interval()?;
                        line.expect(Tok::Eq)?;
                        let (v, vspan) = line.value()?;
                        segments.push((iv, ispan, v, vspan));
                    }
                    if segments.is_empty() {
                        return Err(line.err_here("timeline has no segments", &["`[`"]));
                    }
                    raws.push(RawTimeline { name, segments });
                }
                other => {
                    return Err(ParseError::new(kw_span, format!("unknown keyword `{other}`"))
                        .expecting(&["horizon", "timeline"]))
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            errors.push(e);
        }
    }

    let Some((horizon, _)) = horizon else {
        errors.insert(
            0,
            ParseError::new(file_start(file), "missing horizon header").expecting(&["horizon <start> <end>"]),
        );
        return Err(errors);
    };

    let mut timelines: BTreeMap<StateVarName, Vec<Segment>> = BTreeMap::new();
    for raw in raws {
        let (name, nspan) = raw.name;
        if timelines.contains_key(&name) {
            errors.push(ParseError::new(nspan, format!("duplicate timeline {name}")));
            continue;
        }
        let mut ok = true;
        let mut sorted: Vec<_> = raw.segments;
        sorted.sort_by_key(|s| s.0);
        for (iv, ispan, v, vspan) in &sorted {
            if !horizon.covers(iv) {
                errors.push(ParseError::new(
                    ispan.clone(),
                    format!("segment {iv} lies outside the horizon {horizon}"),
                ));
                ok = false;
            }
            if name.is_implicit() && name.functor.as_str() == ACTIVE && !matches!(v, Value::Bool(_)) {
                errors.push(ParseError::new(
                    vspan.clone(),
                    format!("value `{v}` is not in vals({name}) = {{true, false}}"),
                ));
                ok = false;
            }
        }
        for w in sorted.windows(2) {
            if w[0].0.overlaps(&w[1].0) {
                errors.push(ParseError::new(
                    w[1].1.clone(),
                    format!("segment {} overlaps {}", w[1].0, w[0].0),
                ));
                ok = false;
            }
        }
        if ok {
            timelines.insert(
                name,
                sorted
                    .into_iter()
                    .map(|(iv, _, v, _)| Segment::new(iv, v))
                    .collect(),
            );
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    Trajectory::new(horizon, timelines).map_err(|e: TrajectoryError| {
        vec![ParseError::new(file_start(file), e.to_string())]
    })
}

pub fn serialize_trajectory(traj: &Trajectory) -> String {
    let mut out = String::new();
    let h = traj.horizon();
    let _ = writeln!(out, "horizon {} {}", h.start, h.end);
    for (name, segs) in traj.timelines() {
        let _ = write!(out, "timeline {name}:");
        for s in segs {
            let _ = write!(out, " {}={}", s.interval, s.value);
        }
        out.push('\n');
    }
    out
}
