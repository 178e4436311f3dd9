//! Textbook ATL over the base model, for formulas without capability or goal
//! assignments.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::{Formula, PathOp};
use crate::ids::{AgentId, StateId};
use crate::stateset::StateSet;
use crate::structure::GameStructure;

/// States where `coalition` has moves such that every response of the other
/// agents leads into `target`.
pub fn pre(model: &GameStructure, coalition: &BTreeSet<AgentId>, target: &StateSet) -> StateSet {
    StateSet::from_predicate(model.num_states(), |q| {
        let q = StateId(q);
        let moves = model.joint_moves(q);
        let project = |m: &Vec<_>| -> Vec<_> { coalition.iter().map(|a| m[a.0]).collect() };
        let profiles: BTreeSet<Vec<_>> = moves.iter().map(project).collect();
        profiles.iter().any(|p| {
            moves
                .iter()
                .filter(|m| &project(m) == p)
                .all(|m| target.contains(model.transition(q, m).expect("total transitions").0))
        })
    })
}

/// Evaluates `f` under plain ATL semantics. Coalitions must carry no
/// assignments.
pub fn atl_evaluate(model: &GameStructure, f: &Formula) -> Result<StateSet> {
    let n = model.num_states();
    Ok(match f {
        Formula::True => StateSet::full(n),
        Formula::False => StateSet::empty(n),
        Formula::Atom(p) => StateSet::from_predicate(n, |q| model.holds(StateId(q), *p)),
        Formula::Not(g) => atl_evaluate(model, g)?.complement(),
        Formula::Or(a, b) => atl_evaluate(model, a)?.union(&atl_evaluate(model, b)?),
        Formula::And(a, b) => atl_evaluate(model, a)?.intersection(&atl_evaluate(model, b)?),
        Formula::Coalition(c) => {
            if !c.capabilities.is_empty() || !c.goals.is_empty() {
                return Err(Error::IllFormed("plain ATL takes no capability or goal assignments".into()));
            }
            match &c.path {
                PathOp::Next(g) => pre(model, &c.agents, &atl_evaluate(model, g)?),
                PathOp::Globally(g) => {
                    let safe = atl_evaluate(model, g)?;
                    let mut z = safe.clone();
                    loop {
                        let next = safe.intersection(&pre(model, &c.agents, &z));
                        if next == z {
                            break z;
                        }
                        z = next;
                    }
                }
                PathOp::Until(a, b) => {
                    let keep = atl_evaluate(model, a)?;
                    let mut z = atl_evaluate(model, b)?;
                    loop {
                        let next = z.union(&keep.intersection(&pre(model, &c.agents, &z)));
                        if next == z {
                            break z;
                        }
                        z = next;
                    }
                }
            }
        }
    })
}
