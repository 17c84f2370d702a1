//! Exhaustive trajectory families over a two-agent toy domain, checked
//! against pointwise evaluation of the norm formulas.

use super::{bools, oracle, sequences, sym, Raw};
use instnorm::semantics::segment_trajectory;
use instnorm::specfmt::{parse_domain, parse_grounding, parse_institution};
use instnorm::verifier::{build_network, evaluate_network, verify, NormStatus};
use instnorm::{id, Domain, Grounding, Institution, Interval, StateVarName, Value};

pub const TEMPORAL_INST: &str = "\
institution toy
roles Lead Help
acts Go Fetch
arts Item
norm must (Lead, Go, Item)
norm mustAlways (Lead, Go, Item)
norm mustNot (Help, Fetch, Item)
norm use (Lead, Go, Item)
norm before (Lead, Go, Item) (Help, Fetch, Item)
norm before (Help, Fetch, Item) (Lead, Go, Item)
norm mustToward (Lead, Go, Item)
norm mustEach (Lead, Go, Item)
norm must (Help, Fetch, Lead)
norm use (Help, Go, Lead)
";

pub const SPATIAL_INST: &str = "\
institution place
roles Lead
acts Go
arts Item
norm at (Lead, Go, Item)
norm atUsed (Lead, Go, Item)
norm use (Lead, Go, Item)
";

pub const TOY_DOM: &str = "\
domain toy
agents ann bob
objects o1 o2 o3
behaviors b1 b2
afford ann b1 o1
afford ann b2 o2
afford bob b1 ann
afford bob b2 ann
statevar position(ann) values o1 o2 o3
statevar position(bob) values o1 o2 o3
statevar position(o1) values o1
statevar position(o2) values o2
statevar position(o3) values o3
";

pub const TEMPORAL_GRD: &str = "\
role Lead -> ann
role Help -> bob
act Go -> b1
act Fetch -> b2
art Item -> o1
";

pub const SPATIAL_GRD: &str = "\
role Lead -> ann
act Go -> b1
art Item -> o1
art Item -> o2
";

pub fn setup(inst: &str, grd: &str) -> (Institution, Domain, Grounding) {
    (
        parse_institution("inst", inst).unwrap(),
        parse_domain("dom", TOY_DOM).unwrap(),
        parse_grounding("grd", grd).unwrap(),
    )
}

/// Checks every raw trajectory of the family; returns the number of cases.
fn agree_on_family(
    inst: &Institution,
    dom: &Domain,
    g: &Grounding,
    family: &[(StateVarName, Vec<Vec<Value>>)],
) -> usize {
    let horizon = Interval::of(1, 4);
    let network = build_network(inst, dom, g, horizon).unwrap();
    let sets = oracle::Sets::of(inst, g);
    let mut cases = 0;
    let mut idx = vec![0usize; family.len()];
    loop {
        let mut raw = Raw::new(horizon);
        for (i, (var, seqs)) in family.iter().enumerate() {
            raw.set(var.clone(), seqs[idx[i]].clone());
        }
        let traj = raw.to_trajectory();
        let report = evaluate_network(&network, &segment_trajectory(&traj, dom));
        for (r, n) in report.per_norm.iter().zip(&inst.norms) {
            assert_eq!(&r.norm, n);
            let expected = oracle::holds_with(n, &sets, dom, &raw);
            assert_eq!(
                r.status == NormStatus::Satisfied,
                expected,
                "{n} on {:?}",
                raw.values
            );
        }
        if cases % 97 == 0 {
            assert_eq!(verify(inst, dom, g, &traj).unwrap(), report);
        }
        cases += 1;

        let mut k = 0;
        loop {
            if k == idx.len() {
                return cases;
            }
            idx[k] += 1;
            if idx[k] < family[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn temporal_family_cases() -> usize {
    let (inst, dom, g) = setup(TEMPORAL_INST, TEMPORAL_GRD);
    let used = [Value::None, sym("o1"), sym("o2")];
    let family = vec![
        (StateVarName::active(&id("b1"), &id("ann")), sequences(&bools(), 4)),
        (StateVarName::used_object(&id("b1"), &id("ann")), sequences(&used, 4)),
        (StateVarName::active(&id("b2"), &id("bob")), sequences(&bools(), 4)),
    ];
    agree_on_family(&inst, &dom, &g, &family)
}

pub fn spatial_family_cases() -> usize {
    let (inst, dom, g) = setup(SPATIAL_INST, SPATIAL_GRD);
    let used = [Value::None, sym("o1"), sym("o3")];
    let places = [sym("o1"), sym("o2"), sym("o3")];
    let family = vec![
        (StateVarName::active(&id("b1"), &id("ann")), sequences(&bools(), 4)),
        (StateVarName::used_object(&id("b1"), &id("ann")), sequences(&used, 4)),
        (StateVarName::position(&id("ann")), sequences(&places, 4)),
    ];
    agree_on_family(&inst, &dom, &g, &family)
}

