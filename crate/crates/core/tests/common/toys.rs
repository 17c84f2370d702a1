//! Small institutions and domains for exhaustive grounding checks.

use instnorm::specfmt::{parse_domain, parse_institution};
use instnorm::{Domain, Institution};

pub const CREW_INST: &str = "\
institution crew
roles Pilot Mech Spare
acts Fly Fix
arts Tool
norm must (Pilot, Fly, Tool)
norm mustToward (Mech, Fix, Tool)
norm mustNot (Spare, Fly, Tool)
norm use (Pilot, Fly, Tool)
norm must (Spare, Fix, Pilot)
card Pilot 1 1
card Mech 1 2
card Spare 0 *
";

pub const AGENTS: [&str; 4] = ["w", "x", "y", "z"];
pub const BEHAVIORS: [&str; 2] = ["fly", "fix"];
pub const TARGETS: [&str; 6] = ["t1", "t2", "w", "x", "y", "z"];

/// Affordance `i` of the full agent x behavior x target product.
pub fn affordance(i: usize) -> (&'static str, &'static str, &'static str) {
    let per_agent = BEHAVIORS.len() * TARGETS.len();
    (
        AGENTS[i / per_agent],
        BEHAVIORS[i % per_agent / TARGETS.len()],
        TARGETS[i % TARGETS.len()],
    )
}

pub const AFFORDANCE_COUNT: usize = 4 * 2 * 6;

pub fn crew_domain(agents: usize, affordances: &[usize]) -> Domain {
    let mut text = format!(
        "domain crew\nagents {}\nobjects t1 t2\nbehaviors fly fix\n",
        AGENTS[..agents].join(" ")
    );
    let unique: std::collections::BTreeSet<usize> = affordances.iter().copied().collect();
    for i in unique {
        let (a, b, o) = affordance(i);
        let target_ok = !AGENTS.contains(&o) || AGENTS[..agents].contains(&o);
        if AGENTS[..agents].contains(&a) && target_ok {
            text.push_str(&format!("afford {a} {b} {o}\n"));
        }
    }
    parse_domain("crew.dom", &text).expect("generated domain parses")
}

pub fn crew() -> Institution {
    parse_institution("crew.inst", CREW_INST).unwrap()
}

/// A hand-picked domain where some but not all groundings are admissible.
pub fn crew_reference_domain() -> Domain {
    parse_domain(
        "crew.dom",
        "\
domain crew
agents w x y z
objects t1 t2
behaviors fly fix
afford w fly t1
afford w fix t2
afford x fly t2
afford x fix w
afford y fix t1
afford y fix x
afford z fly t1
afford z fix z
",
    )
    .unwrap()
}
