//! Random small planning problems and the exhaustive check behind them.

use instnorm::planner::{plan, PlanRequest};
use instnorm::specfmt::{parse_domain, parse_grounding, parse_institution};
use instnorm::verifier::verify;
use instnorm::{Domain, Grounding, Institution, Interval, Trajectory, Value};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use super::{oracle, Raw};

pub const NORM_POOL: [&str; 13] = [
    "must (R, X, P)",
    "must (S, Y, P)",
    "mustNot (S, X, P)",
    "use (R, X, P)",
    "use (S, Y, P)",
    "before (R, X, P) (S, Y, P)",
    "before (S, Y, P) (R, X, P)",
    "mustToward (R, X, P)",
    "mustEach (S, Y, P)",
    "mustAlways (R, Y, P)",
    "must (S, X, R)",
    "use (S, X, R)",
    "before (R, X, P) (R, Y, P)",
];

const AGENTS: [&str; 2] = ["a1", "a2"];
const BEHAVIORS: [&str; 2] = ["b1", "b2"];
const TARGETS: [&str; 3] = ["o1", "o2", "a1"];

#[derive(Debug, Clone)]
pub struct Toy {
    pub inst: Institution,
    pub dom: Domain,
    pub g: Grounding,
    pub horizon: Interval,
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct ToySeed {
    pub norms: Vec<usize>,
    pub affordances: u16,
    pub roles: [u8; 2],
    pub acts: [u8; 2],
    pub arts: u8,
    pub len: i64,
    pub k: usize,
    pub concurrent: bool,
}

pub fn seeds(max_len: i64) -> impl Strategy<Value = ToySeed> {
    (
        proptest::collection::vec(0..NORM_POOL.len(), 1..=4),
        any::<u16>(),
        [0u8..3, 0u8..3],
        [0u8..4, 0u8..4],
        0u8..4,
        1..=max_len,
        1usize..=2,
        proptest::bool::weighted(0.2),
    )
        .prop_map(|(norms, affordances, roles, acts, arts, len, k, concurrent)| ToySeed {
            norms,
            affordances,
            roles,
            acts,
            arts,
            len,
            k,
            concurrent,
        })
}

pub fn build(seed: &ToySeed) -> Toy {
    let mut inst = String::from("institution toy\nroles R S\nacts X Y\narts P\n");
    let mut norms = seed.norms.clone();
    norms.sort();
    norms.dedup();
    for i in norms {
        inst.push_str(&format!("norm {}\n", NORM_POOL[i]));
    }
    let mut dom = String::from("domain toy\nagents a1 a2\nobjects o1 o2\nbehaviors b1 b2\n");
    if seed.concurrent {
        dom.push_str("concurrent-behaviors allowed\n");
    }
    let mut bit = 0;
    for a in AGENTS {
        for b in BEHAVIORS {
            for o in TARGETS {
                if seed.affordances >> bit & 1 == 1 {
                    dom.push_str(&format!("afford {a} {b} {o}\n"));
                }
                bit += 1;
            }
        }
    }
    let mut grd = String::new();
    for (a, r) in AGENTS.iter().zip(seed.roles) {
        match r {
            1 => grd.push_str(&format!("role R -> {a}\n")),
            2 => grd.push_str(&format!("role S -> {a}\n")),
            _ => {}
        }
    }
    for (act, mask) in ["X", "Y"].iter().zip(seed.acts) {
        for (i, b) in BEHAVIORS.iter().enumerate() {
            if mask >> i & 1 == 1 {
                grd.push_str(&format!("act {act} -> {b}\n"));
            }
        }
    }
    for (i, o) in ["o1", "o2"].iter().enumerate() {
        if seed.arts >> i & 1 == 1 {
            grd.push_str(&format!("art P -> {o}\n"));
        }
    }
    Toy {
        inst: parse_institution("toy.inst", &inst).unwrap(),
        dom: parse_domain("toy.dom", &dom).unwrap(),
        g: parse_grounding("toy.grd", &grd).unwrap(),
        horizon: Interval::of(1, seed.len),
        k: seed.k,
    }
}

/// Whether some trajectory of the planner's search space is adherent.
pub fn exhaustively_solvable(toy: &Toy) -> bool {
    oracle::policy_space(&toy.dom, toy.horizon, toy.k)
        .iter()
        .any(|raw: &Raw| oracle::adherent(&toy.inst, &toy.dom, &toy.g, raw))
}

/// Exhaustively checks that no schedule of the buyer satisfies all of the
/// buyer's norms in the cyclic institution over `[1,4]`. Activations range
/// over all boolean sequences; used objects over sequences with at most two
/// runs. Returns the number of schedules checked.
pub fn cyclic_buyer_schedules_all_fail() -> usize {
    use instnorm::{id, StateVarName, Value};

    let t = super::trading();
    let horizon = Interval::of(1, 4);
    let sets = oracle::Sets::of(&t.cyclic, &t.g);
    let buyer_norms: Vec<_> = t
        .cyclic
        .norms
        .iter()
        .filter(|n| n.statements[0].subject == id("Buyer"))
        .collect();
    assert_eq!(buyer_norms.len(), 6);
    let nao = id("nao");
    let (give, take) = (id("give"), id("take"));
    let acts = super::sequences(&super::bools(), 4);
    let objects = [Value::None, super::sym("cash"), super::sym("battery")];
    let used: Vec<Vec<Value>> = super::sequences(&objects, 4)
        .into_iter()
        .filter(|s| super::runs(s) <= 2)
        .collect();
    assert_eq!(used.len(), 21);
    let mut checked = 0;
    for ag in &acts {
        for at in &acts {
            for ug in &used {
                for ut in &used {
                    let mut raw = Raw::new(horizon);
                    raw.set(StateVarName::active(&give, &nao), ag.clone());
                    raw.set(StateVarName::active(&take, &nao), at.clone());
                    raw.set(StateVarName::used_object(&give, &nao), ug.clone());
                    raw.set(StateVarName::used_object(&take, &nao), ut.clone());
                    let all = buyer_norms
                        .iter()
                        .all(|n| oracle::holds_with(n, &sets, &t.dom, &raw));
                    assert!(!all, "adherent buyer schedule: {raw:?}");
                    checked += 1;
                }
            }
        }
    }
    checked
}

/// Every activation has an affordance and every used object is afforded.
pub fn respects_affordances(dom: &Domain, traj: &Trajectory) -> bool {
    traj.timelines().iter().all(|(var, segs)| {
        if !var.is_implicit() || var.args.len() != 2 {
            return true;
        }
        let (b, a) = (&var.args[0], &var.args[1]);
        segs.iter().all(|s| match &s.value {
            Value::Sym(o) => dom.affords(a, b, o),
            Value::Bool(true) => dom.affordances_of(a, b).next().is_some(),
            _ => true,
        })
    })
}

/// Draws toy requests from a fixed seed until `wanted` of them have plans,
/// checking each plan with the verifier. Returns the number of plans
/// checked; panics on the first plan that fails.
pub fn seeded_solvable_suite(wanted: usize) -> usize {
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strategy = seeds(4);
    let mut solved = 0;
    let mut drawn = 0;
    while solved < wanted {
        drawn += 1;
        assert!(drawn < 20_000, "too few solvable requests generated");
        let seed = strategy.new_tree(&mut runner).unwrap().current();
        let toy = build(&seed);
        if !oracle::admissible(&toy.inst, &toy.dom, &toy.g) {
            continue;
        }
        let req = PlanRequest::new(&toy.inst, &toy.dom, toy.horizon)
            .grounding(toy.g.clone())
            .max_segments(toy.k);
        let Some(p) = plan(&req).unwrap().plan().cloned() else {
            continue;
        };
        let report = verify(&toy.inst, &toy.dom, &toy.g, &p.trajectory).unwrap();
        assert!(report.adherent, "{seed:?}");
        assert!(respects_affordances(&toy.dom, &p.trajectory), "{seed:?}");
        solved += 1;
    }
    solved
}
