//! Fixtures and brute-force oracles shared by the integration tests.
//!
//! The oracles evaluate the quantified definitions directly over raw time
//! points and explicit enumerations. They use only the data model, never the
//! timeline, admissibility, search or planning code under test.

#![allow(dead_code)]

pub mod families;
pub mod planning;
pub mod toys;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use instnorm::specfmt::{parse_domain, parse_grounding, parse_institution, parse_trajectory};
use instnorm::{
    id, Domain, Grounding, Ident, Institution, Interval, Norm, Segment, StateVarName, Time,
    Trajectory, Value,
};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read_fixture(rel: &str) -> String {
    let path = fixtures_dir().join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn institution(rel: &str) -> Institution {
    parse_institution(rel, &read_fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e:?}"))
}

pub fn domain(rel: &str) -> Domain {
    parse_domain(rel, &read_fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e:?}"))
}

pub fn grounding(rel: &str) -> Grounding {
    parse_grounding(rel, &read_fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e:?}"))
}

pub fn trajectory(rel: &str) -> Trajectory {
    parse_trajectory(rel, &read_fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e:?}"))
}

pub struct Trading {
    pub inst: Institution,
    pub cyclic: Institution,
    pub dom: Domain,
    pub g: Grounding,
}

pub fn trading() -> Trading {
    Trading {
        inst: institution("trading/trading.inst"),
        cyclic: institution("trading/cyclic.inst"),
        dom: domain("trading/shop.dom"),
        g: grounding("trading/g.grd"),
    }
}

pub struct Game {
    pub inst: Institution,
    pub dom: Domain,
    pub g: Grounding,
    pub g_prime: Grounding,
    pub swapped: Grounding,
}

pub fn game() -> Game {
    Game {
        inst: institution("game/game.inst"),
        dom: domain("game/peis.dom"),
        g: grounding("game/G.grd"),
        g_prime: grounding("game/Gprime.grd"),
        swapped: grounding("game/swapped.grd"),
    }
}

/// A trajectory given point by point. Missing variables keep their default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raw {
    pub horizon: Interval,
    pub values: BTreeMap<StateVarName, Vec<Value>>,
}

impl Raw {
    pub fn new(horizon: Interval) -> Self {
        Raw {
            horizon,
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, var: StateVarName, points: Vec<Value>) {
        assert_eq!(points.len(), self.horizon.len());
        self.values.insert(var, points);
    }

    pub fn at(&self, dom: &Domain, var: &StateVarName, t: Time) -> Value {
        match self.values.get(var) {
            Some(v) => v[(t - self.horizon.start) as usize].clone(),
            None => dom
                .default_value(var)
                .unwrap_or_else(|| panic!("undeclared {var}")),
        }
    }

    pub fn active(&self, dom: &Domain, b: &Ident, a: &Ident, t: Time) -> bool {
        self.at(dom, &StateVarName::active(b, a), t) == Value::Bool(true)
    }

    /// Run-length encoding into segments.
    pub fn to_trajectory(&self) -> Trajectory {
        let timelines = self.values.iter().map(|(var, points)| {
            let mut segs: Vec<Segment> = Vec::new();
            for (i, v) in points.iter().enumerate() {
                let t = self.horizon.start + i as Time;
                match segs.last_mut() {
                    Some(s) if &s.value == v => s.interval.end = t,
                    _ => segs.push(Segment::new(Interval::point(t), v.clone())),
                }
            }
            (var.clone(), segs)
        });
        Trajectory::new(self.horizon, timelines).expect("well-formed raw trajectory")
    }

    /// Point values of any trajectory, over the given variables.
    pub fn from_trajectory(traj: &Trajectory, dom: &Domain, vars: &[StateVarName]) -> Self {
        let mut raw = Raw::new(traj.horizon());
        for v in vars {
            let points = traj
                .horizon()
                .points()
                .map(|t| {
                    traj.explicit_value(v, t)
                        .cloned()
                        .unwrap_or_else(|| dom.default_value(v).expect("declared"))
                })
                .collect();
            raw.set(v.clone(), points);
        }
        raw
    }
}

/// Every sequence of `len` values drawn from `values`.
pub fn sequences(values: &[Value], len: usize) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

pub fn bools() -> Vec<Value> {
    vec![Value::Bool(false), Value::Bool(true)]
}

pub fn sym(s: &str) -> Value {
    Value::Sym(id(s))
}

/// Number of maximal constant runs.
pub fn runs(points: &[Value]) -> usize {
    points.windows(2).filter(|w| w[0] != w[1]).count() + usize::from(!points.is_empty())
}

pub mod oracle {
    use super::*;

    pub struct Sets {
        pub a: BTreeMap<Ident, BTreeSet<Ident>>,
        pub b: BTreeMap<Ident, BTreeSet<Ident>>,
        pub o: BTreeMap<Ident, BTreeSet<Ident>>,
    }

    impl Sets {
        pub fn of(inst: &Institution, g: &Grounding) -> Self {
            let collect = |keys: &BTreeSet<Ident>, rel: &BTreeSet<(Ident, Ident)>| {
                keys.iter()
                    .map(|k| {
                        let vs = rel.iter().filter(|(x, _)| x == k).map(|(_, y)| y.clone());
                        (k.clone(), vs.collect())
                    })
                    .collect()
            };
            Sets {
                a: collect(&inst.roles, &g.roles),
                b: collect(&inst.acts, &g.acts),
                o: collect(&inst.arts, &g.arts),
            }
        }

        pub fn agents(&self, role: &Ident) -> BTreeSet<Ident> {
            self.a.get(role).cloned().unwrap_or_default()
        }

        pub fn behaviors(&self, act: &Ident) -> BTreeSet<Ident> {
            self.b.get(act).cloned().unwrap_or_default()
        }

        /// Agents of a role object, objects of an artifact.
        pub fn targets(&self, object: &Ident) -> BTreeSet<Ident> {
            match self.a.get(object) {
                Some(agents) => agents.clone(),
                None => self.o.get(object).cloned().unwrap_or_default(),
            }
        }
    }

    /// Direct evaluation of a built-in norm over every time point.
    pub fn holds(norm: &Norm, inst: &Institution, dom: &Domain, g: &Grounding, raw: &Raw) -> bool {
        holds_with(norm, &Sets::of(inst, g), dom, raw)
    }

    pub fn holds_with(norm: &Norm, sets: &Sets, dom: &Domain, raw: &Raw) -> bool {
        let s = &norm.statements[0];
        let ags = sets.agents(&s.subject);
        let bs = sets.behaviors(&s.predicate);
        let ts = sets.targets(&s.object);
        let times: Vec<Time> = raw.horizon.points().collect();
        let act = |b: &Ident, a: &Ident, t: Time| raw.active(dom, b, a, t);
        let used = |b: &Ident, a: &Ident, t: Time| raw.at(dom, &StateVarName::used_object(b, a), t);
        let pos = |x: &Ident, t: Time| raw.at(dom, &StateVarName::position(x), t);
        let in_targets = |v: &Value| v.as_sym().is_some_and(|o| ts.contains(o));
        match norm.qualifier.as_str() {
            "must" => ags
                .iter()
                .all(|a| bs.iter().any(|b| times.iter().any(|&t| act(b, a, t)))),
            "mustAlways" => ags
                .iter()
                .all(|a| times.iter().all(|&t| bs.iter().any(|b| act(b, a, t)))),
            "mustNot" => ags
                .iter()
                .all(|a| bs.iter().all(|b| times.iter().all(|&t| !act(b, a, t)))),
            "use" => ags.iter().all(|a| {
                bs.iter()
                    .all(|b| times.iter().all(|&t| !act(b, a, t) || in_targets(&used(b, a, t))))
            }),
            "at" => ags.iter().all(|a| {
                bs.iter().all(|b| {
                    times
                        .iter()
                        .all(|&t| !act(b, a, t) || ts.iter().any(|o| pos(a, t) == pos(o, t)))
                })
            }),
            "atUsed" => ags.iter().all(|a| {
                bs.iter().all(|b| {
                    times.iter().all(|&t| {
                        !act(b, a, t)
                            || ts.iter().any(|o| {
                                used(b, a, t) == Value::Sym(o.clone()) && pos(a, t) == pos(o, t)
                            })
                    })
                })
            }),
            "mustToward" => ags.iter().all(|a| {
                bs.iter()
                    .any(|b| times.iter().any(|&t| act(b, a, t) && in_targets(&used(b, a, t))))
            }),
            "mustEach" => ags.iter().all(|a| {
                ts.iter().all(|o| {
                    bs.iter().any(|b| {
                        times
                            .iter()
                            .any(|&t| act(b, a, t) && used(b, a, t) == Value::Sym(o.clone()))
                    })
                })
            }),
            "before" => {
                let s2 = &norm.statements[1];
                let ags2 = sets.agents(&s2.subject);
                let bs2 = sets.behaviors(&s2.predicate);
                let mut ok = true;
                for a1 in &ags {
                    for a2 in &ags2 {
                        for b1 in &bs {
                            for b2 in &bs2 {
                                for &t1 in &times {
                                    for &t2 in &times {
                                        if act(b1, a1, t1) && act(b2, a2, t2) && t1 >= t2 {
                                            ok = false;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                ok
            }
            q => panic!("no oracle for qualifier {q}"),
        }
    }

    pub fn adherent(inst: &Institution, dom: &Domain, g: &Grounding, raw: &Raw) -> bool {
        let sets = Sets::of(inst, g);
        inst.norms.iter().all(|n| holds_with(n, &sets, dom, raw))
    }

    /// Every agent enacting the subject role can perform some grounded
    /// behavior on some grounded target.
    pub fn executable(norm: &Norm, inst: &Institution, dom: &Domain, g: &Grounding) -> bool {
        let sets = Sets::of(inst, g);
        let s = &norm.statements[0];
        sets.agents(&s.subject).iter().all(|a| {
            sets.behaviors(&s.predicate).iter().any(|b| {
                sets.targets(&s.object)
                    .iter()
                    .any(|o| dom.affords(a, b, o))
            })
        })
    }

    pub fn cardinality_ok(inst: &Institution, g: &Grounding) -> bool {
        let sets = Sets::of(inst, g);
        inst.roles.iter().all(|r| {
            let n = sets.agents(r).len();
            let bounds = inst.cardinality.bounds_for(r);
            let max_ok = match bounds.max {
                instnorm::MaxCard::Finite(m) => n <= m as usize,
                instnorm::MaxCard::Unbounded => true,
            };
            n >= bounds.min as usize && max_ok
        })
    }

    pub fn admissible(inst: &Institution, dom: &Domain, g: &Grounding) -> bool {
        let obligations_ok = inst
            .norms
            .iter()
            .filter(|n| n.is_obligation() && !n.is_prohibition())
            .all(|n| executable(n, inst, dom, g));
        obligations_ok && cardinality_ok(inst, g)
    }

    fn subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
        (0..1usize << items.len())
            .map(|mask| {
                items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect()
    }

    /// Every role map (each agent unassigned or given one role), act map and
    /// art map.
    pub fn all_groundings(inst: &Institution, dom: &Domain) -> Vec<Grounding> {
        let roles: Vec<Option<&Ident>> =
            std::iter::once(None).chain(inst.roles.iter().map(Some)).collect();
        let mut role_maps: Vec<BTreeSet<(Ident, Ident)>> = vec![BTreeSet::new()];
        for a in &dom.agents {
            role_maps = role_maps
                .into_iter()
                .flat_map(|m| {
                    roles.iter().map(move |r| {
                        let mut m = m.clone();
                        if let Some(r) = r {
                            m.insert(((*r).clone(), a.clone()));
                        }
                        m
                    })
                })
                .collect();
        }
        let act_pairs: Vec<(Ident, Ident)> = inst
            .acts
            .iter()
            .flat_map(|x| dom.behaviors.iter().map(move |b| (x.clone(), b.clone())))
            .collect();
        let art_pairs: Vec<(Ident, Ident)> = inst
            .arts
            .iter()
            .flat_map(|x| dom.objects.iter().map(move |o| (x.clone(), o.clone())))
            .collect();
        let act_maps = subsets(&act_pairs);
        let art_maps = subsets(&art_pairs);
        let mut out = Vec::new();
        for r in &role_maps {
            for ac in &act_maps {
                for ar in &art_maps {
                    out.push(Grounding {
                        roles: r.clone(),
                        acts: ac.clone(),
                        arts: ar.clone(),
                    });
                }
            }
        }
        out
    }

    /// Admissible groundings from which no single act or art pair can be
    /// removed without losing admissibility.
    pub fn minimal_admissible(inst: &Institution, dom: &Domain) -> BTreeSet<Grounding> {
        all_groundings(inst, dom)
            .into_iter()
            .filter(|g| admissible(inst, dom, g))
            .filter(|g| {
                let smaller_acts = g.acts.iter().map(|p| {
                    let mut h = g.clone();
                    h.acts.remove(p);
                    h
                });
                let smaller_arts = g.arts.iter().map(|p| {
                    let mut h = g.clone();
                    h.arts.remove(p);
                    h
                });
                smaller_acts
                    .chain(smaller_arts)
                    .all(|h| !admissible(inst, dom, &h))
            })
            .collect()
    }

    /// Per-point choice of one agent: idle, or one behavior with a used object.
    #[derive(Clone, PartialEq)]
    enum Step {
        Idle,
        Run(Ident, Value),
    }

    type Timelines = Vec<(StateVarName, Vec<Value>)>;

    /// Every trajectory of the planner's search space over `horizon`: an
    /// agent activates only behaviors it has an affordance for, one at a time
    /// unless the domain allows overlap, with a used object that is `none` or
    /// afforded and constant during an activation; at most `k` activations
    /// per (agent, behavior). Declared non-implicit variables keep their
    /// defaults.
    pub fn policy_space(dom: &Domain, horizon: Interval, k: usize) -> Vec<Raw> {
        let n = horizon.len();
        // Per agent, the alternative joint timelines of its implicit variables.
        let mut per_agent: Vec<Vec<Timelines>> = Vec::new();
        for a in &dom.agents {
            let options: Vec<(Ident, Vec<Value>)> = dom
                .behaviors
                .iter()
                .filter(|b| dom.affordances_of(a, b).next().is_some())
                .map(|b| {
                    let mut us = vec![Value::None];
                    us.extend(dom.affordances_of(a, b).cloned().map(Value::Sym));
                    (b.clone(), us)
                })
                .collect();
            let schedules = if dom.concurrent_behaviors {
                concurrent_schedules(a, &options, n, k)
            } else {
                exclusive_schedules(a, &options, n, k)
            };
            per_agent.push(schedules);
        }
        let mut out = vec![Raw::new(horizon)];
        for schedules in per_agent {
            out = out
                .into_iter()
                .flat_map(|raw| {
                    schedules.iter().map(move |s| {
                        let mut r = raw.clone();
                        for (var, pts) in s {
                            r.set(var.clone(), pts.clone());
                        }
                        r
                    })
                })
                .collect();
        }
        out
    }

    fn expand(a: &Ident, options: &[(Ident, Vec<Value>)], steps: &[Step]) -> Vec<(StateVarName, Vec<Value>)> {
        let mut out = Vec::new();
        for (b, _) in options {
            let act = steps
                .iter()
                .map(|s| Value::Bool(matches!(s, Step::Run(x, _) if x == b)))
                .collect();
            let used = steps
                .iter()
                .map(|s| match s {
                    Step::Run(x, u) if x == b => u.clone(),
                    _ => Value::None,
                })
                .collect();
            out.push((StateVarName::active(b, a), act));
            out.push((StateVarName::used_object(b, a), used));
        }
        out
    }

    fn valid_steps(steps: &[Step], k: usize, options: &[(Ident, Vec<Value>)]) -> bool {
        for w in steps.windows(2) {
            if let (Step::Run(b1, u1), Step::Run(b2, u2)) = (&w[0], &w[1]) {
                if b1 == b2 && u1 != u2 {
                    return false;
                }
            }
        }
        options.iter().all(|(b, _)| {
            let on: Vec<bool> = steps
                .iter()
                .map(|s| matches!(s, Step::Run(x, _) if x == b))
                .collect();
            let starts = (0..on.len()).filter(|&i| on[i] && (i == 0 || !on[i - 1])).count();
            starts <= k
        })
    }

    fn exclusive_schedules(
        a: &Ident,
        options: &[(Ident, Vec<Value>)],
        n: usize,
        k: usize,
    ) -> Vec<Vec<(StateVarName, Vec<Value>)>> {
        let mut choices = vec![Step::Idle];
        for (b, us) in options {
            for u in us {
                choices.push(Step::Run(b.clone(), u.clone()));
            }
        }
        let mut seqs: Vec<Vec<Step>> = vec![Vec::new()];
        for _ in 0..n {
            seqs = seqs
                .into_iter()
                .flat_map(|p| {
                    choices.iter().map(move |c| {
                        let mut p = p.clone();
                        p.push(c.clone());
                        p
                    })
                })
                .collect();
        }
        seqs.into_iter()
            .filter(|s| valid_steps(s, k, options))
            .map(|s| expand(a, options, &s))
            .collect()
    }

    fn concurrent_schedules(
        a: &Ident,
        options: &[(Ident, Vec<Value>)],
        n: usize,
        k: usize,
    ) -> Vec<Vec<(StateVarName, Vec<Value>)>> {
        let mut out: Vec<Vec<(StateVarName, Vec<Value>)>> = vec![Vec::new()];
        for opt in options {
            let single = exclusive_schedules(a, std::slice::from_ref(opt), n, k);
            out = out
                .into_iter()
                .flat_map(|acc| {
                    single.iter().map(move |s| {
                        let mut acc = acc.clone();
                        acc.extend(s.iter().cloned());
                        acc
                    })
                })
                .collect();
        }
        out
    }
}
