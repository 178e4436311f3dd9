//! The two bundled gold-mining models.
//!
//! `gold-fragment` is the ten-state excerpt of the domain, completed with
//! `@default-stay`. `gold3` is the whole domain: agents `Ag` and `En` on
//! locations A, B, C and one piece of gold that lies at a location or is held.

use crate::error::{Error, Result};
use crate::expr::BoolExpr;
use crate::ids::{ActionId, NOOP};
use crate::model_file::write_model;
use crate::structure::{GameStructure, GameStructureBuilder, PlanRule};

pub const EXAMPLES: [&str; 2] = ["gold-fragment", "gold3"];

/// The goal and formula used with both bundled models.
pub const WIN_FORMULA: &str = "<<Ag>>[Ag: caps={Nav,Collect,Deposit}; goals={G_B}] F (G_B & Ag_B)";
pub const WIN_FORMULA_NO_COLLECT: &str = "<<Ag>>[Ag: caps={Nav,Deposit}; goals={G_B}] F (G_B & Ag_B)";

/// Name of the initial state of `gold3`.
pub const GOLD3_INITIAL: &str = "AgB_EnA_GC";

const CAPABILITIES: &str = "\
cap Nav {
  plan (Ag_B & G_C) [right] (G_B)
  plan (Ag_C & G_Ag) [left] (G_B)
}

cap Collect {
  plan (Ag_C & G_C) [pick] (G_B)
}

cap Deposit {
  plan (Ag_B & G_Ag) [drop] (G_B)
}
";

const FRAGMENT: &str = "\
# Ten states of the gold-mining domain. Agent order: Ag, En.
agents Ag En
props Ag_B Ag_C En_A En_B En_C G_B G_C G_Ag G_En
actions left right pick drop

state q0 Ag_B En_A G_C
state q1 Ag_C En_B G_C
state q2 Ag_C En_C G_Ag
state q3 Ag_B En_C G_Ag
state q4 Ag_B En_C G_B
state q5 Ag_C En_C G_C
state q6 Ag_C En_C G_En
state q7 Ag_C En_B G_En
state q8 Ag_C En_B G_B
state q9 Ag_B En_B G_C

trans q0 Ag=right En=right -> q1
trans q1 Ag=pick En=right -> q2
trans q2 Ag=left En=noOp -> q3
trans q3 Ag=drop En=noOp -> q4
trans q0 Ag=noOp En=noOp -> q0
trans q0 Ag=pick En=pick -> q0
trans q1 Ag=noOp En=right -> q5
trans q5 Ag=noOp En=pick -> q6
trans q6 Ag=noOp En=left -> q7
trans q7 Ag=noOp En=drop -> q8
trans q2 Ag=noOp En=noOp -> q2
trans q0 Ag=noOp En=right -> q9
trans q9 Ag=right En=right -> q5
trans q5 Ag=noOp En=left -> q1
trans q9 Ag=noOp En=left -> q0

@default-stay
";

/// Model text of a bundled example.
pub fn emit_example(name: &str) -> Result<String> {
    match name {
        "gold-fragment" => Ok(format!("{FRAGMENT}\n{CAPABILITIES}")),
        "gold3" => Ok(write_model(&gold3())),
        other => Err(Error::Unknown {
            kind: "example",
            name: other.to_string(),
        }),
    }
}

pub fn gold_fragment() -> GameStructure {
    crate::model_file::parse_model(&emit_example("gold-fragment").unwrap()).expect("bundled fragment is valid")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Gold {
    At(usize),
    HeldAg,
    HeldEn,
}

const LOCS: [&str; 3] = ["A", "B", "C"];

fn gold_name(g: Gold) -> String {
    match g {
        Gold::At(l) => LOCS[l].to_string(),
        Gold::HeldAg => "Ag".into(),
        Gold::HeldEn => "En".into(),
    }
}

fn state_name(ag: usize, en: usize, g: Gold) -> String {
    format!("Ag{}_En{}_G{}", LOCS[ag], LOCS[en], gold_name(g))
}

/// The full three-location domain with 45 states.
pub fn gold3() -> GameStructure {
    let mut b = GameStructureBuilder::new();
    let ag = b.agent("Ag");
    let en = b.agent("En");
    let ag_at: Vec<_> = LOCS.iter().map(|l| b.prop(&format!("Ag_{l}"))).collect();
    let en_at: Vec<_> = LOCS.iter().map(|l| b.prop(&format!("En_{l}"))).collect();
    let g_at: Vec<_> = LOCS.iter().map(|l| b.prop(&format!("G_{l}"))).collect();
    let g_ag = b.prop("G_Ag");
    let g_en = b.prop("G_En");
    let left = b.action("left");
    let right = b.action("right");
    let pick = b.action("pick");
    let drop = b.action("drop");

    let golds: Vec<Gold> = (0..3).map(Gold::At).chain([Gold::HeldAg, Gold::HeldEn]).collect();
    let mut all = Vec::new();
    for a in 0..3 {
        for e in 0..3 {
            for &g in &golds {
                let mut label = vec![ag_at[a], en_at[e]];
                label.push(match g {
                    Gold::At(l) => g_at[l],
                    Gold::HeldAg => g_ag,
                    Gold::HeldEn => g_en,
                });
                let id = b.state(&state_name(a, e, g), &label);
                all.push((id, a, e, g));
            }
        }
    }

    let moves = |pos: usize, holding: bool, gold_here: bool| -> Vec<ActionId> {
        let mut v = vec![NOOP];
        if pos > 0 {
            v.push(left);
        }
        if pos < 2 {
            v.push(right);
        }
        if gold_here {
            v.push(pick);
        }
        if holding {
            v.push(drop);
        }
        v
    };
    for &(id, a, e, g) in &all {
        let ag_moves = moves(a, g == Gold::HeldAg, g == Gold::At(a));
        let en_moves = moves(e, g == Gold::HeldEn, g == Gold::At(e));
        b.avail(id, ag, &ag_moves);
        b.avail(id, en, &en_moves);
        for &x in &ag_moves {
            for &y in &en_moves {
                let step = |pos: usize, act: ActionId| {
                    if act == left {
                        pos - 1
                    } else if act == right {
                        pos + 1
                    } else {
                        pos
                    }
                };
                let (na, ne) = (step(a, x), step(e, y));
                let ng = match (x == pick, y == pick) {
                    // Both grab at once: neither gets it.
                    (true, true) => g,
                    (true, false) => Gold::HeldAg,
                    (false, true) => Gold::HeldEn,
                    (false, false) if x == drop => Gold::At(a),
                    (false, false) if y == drop => Gold::At(e),
                    _ => g,
                };
                let target = all
                    .iter()
                    .find(|s| (s.1, s.2, s.3) == (na, ne, ng))
                    .expect("successor is a domain state")
                    .0;
                b.transition(id, vec![x, y], target).expect("deterministic rules");
            }
        }
    }

    let atom = BoolExpr::Atom;
    let goal = atom(g_at[1]);
    b.capability(
        "Nav",
        [
            PlanRule::new(atom(ag_at[1]).and(atom(g_at[2])), right, goal.clone()),
            PlanRule::new(atom(ag_at[2]).and(atom(g_ag)), left, goal.clone()),
        ],
    );
    b.capability("Collect", [PlanRule::new(atom(ag_at[2]).and(atom(g_at[2])), pick, goal.clone())]);
    b.capability("Deposit", [PlanRule::new(atom(ag_at[1]).and(atom(g_ag)), drop, goal)]);
    b.build()
}
