//! History-based game-tree search over the base model.
//!
//! Goals are tracked by marking each history, so this check does not use the
//! goal-extended model at all. It decides `X` and `U` within a step bound.

use std::collections::{BTreeMap, BTreeSet};

use crate::assignment::GoalSet;
use crate::checker::AgentRationality;
use crate::error::{Error, Result};
use crate::extension::{goals_true, Semantics};
use crate::formula::{Coalition, PathOp};
use crate::ids::{ActionId, AgentId, StateId};
use crate::stateset::StateSet;
use crate::structure::GameStructure;

/// The goal on a path, over base states.
#[derive(Debug, Clone)]
pub enum BoundedGoal {
    Next(StateSet),
    /// `keep U reach` within the given number of steps.
    Until(StateSet, StateSet, usize),
}

struct Search<'a> {
    model: &'a GameStructure,
    coalition: &'a BTreeSet<AgentId>,
    bdi: BTreeMap<AgentId, (AgentRationality, &'a crate::assignment::GoalBase)>,
    semantics: Semantics,
}

impl Search<'_> {
    fn active(&self, agent: AgentId, history: &[StateId]) -> GoalSet {
        let (_, goals) = &self.bdi[&agent];
        match self.semantics {
            Semantics::Maintenance => goals.all().minus(goals_true(self.model, goals, *history.last().unwrap())),
            Semantics::Achievement | Semantics::Priority => history
                .iter()
                .fold(goals.all(), |acc, &q| acc.minus(goals_true(self.model, goals, q))),
        }
    }

    /// Coalition profiles at the end of `history`, each with its successors.
    fn profiles(&self, history: &[StateId]) -> BTreeMap<Vec<ActionId>, BTreeSet<StateId>> {
        let q = *history.last().unwrap();
        let allowed: Vec<Vec<ActionId>> = self
            .model
            .agent_ids()
            .map(|a| match self.bdi.get(&a) {
                Some((rat, _)) => rat.rational_actions(self.model, q, self.active(a, history), self.semantics),
                None => self.model.available(a, q).to_vec(),
            })
            .collect();
        let mut out: BTreeMap<Vec<ActionId>, BTreeSet<StateId>> = BTreeMap::new();
        for (joint, &target) in self.model.transitions(q) {
            if joint.iter().zip(&allowed).all(|(a, s)| s.contains(a)) {
                let profile = self.coalition.iter().map(|c| joint[c.0]).collect();
                out.entry(profile).or_default().insert(target);
            }
        }
        out
    }

    fn until(&self, history: &mut Vec<StateId>, keep: &StateSet, reach: &StateSet, left: usize) -> bool {
        let q = *history.last().unwrap();
        if reach.contains(q.0) {
            return true;
        }
        if left == 0 || !keep.contains(q.0) {
            return false;
        }
        self.profiles(history).values().any(|succ| {
            succ.iter().all(|&s| {
                history.push(s);
                let ok = self.until(history, keep, reach, left - 1);
                history.pop();
                ok
            })
        })
    }
}

/// Decides the coalition clause at base state `start`, where every BDI agent
/// starts with its full goal base.
pub fn bounded_check(
    model: &GameStructure,
    c: &Coalition,
    goal: &BoundedGoal,
    start: StateId,
    semantics: Semantics,
) -> Result<bool> {
    let mut bdi = BTreeMap::new();
    for (agent, goals) in c.goals.iter() {
        let plans = model.plans_of(agent, &c.capabilities)?;
        bdi.insert(agent, (AgentRationality::new(model, agent, goals, &plans)?, goals));
        if semantics == Semantics::Priority && goals.priority().is_none() {
            return Err(Error::MissingPriority(model.agent_name(agent).to_string()));
        }
    }
    let search = Search {
        model,
        coalition: &c.agents,
        bdi,
        semantics,
    };
    // The clause is evaluated where goals are exactly the initial assignment.
    if search
        .bdi
        .values()
        .any(|(_, goals)| !goals_true(model, goals, start).is_empty())
    {
        return Ok(false);
    }
    let mut history = vec![start];
    Ok(match goal {
        BoundedGoal::Next(target) => search
            .profiles(&history)
            .values()
            .any(|succ| succ.iter().all(|s| target.contains(s.0))),
        BoundedGoal::Until(keep, reach, k) => search.until(&mut history, keep, reach, *k),
    })
}

/// Builds the bounded goal for a coalition node from its operand sets.
pub fn bounded_goal(c: &Coalition, operands: &[StateSet], horizon: usize) -> Option<BoundedGoal> {
    match &c.path {
        PathOp::Next(_) => Some(BoundedGoal::Next(operands[0].clone())),
        PathOp::Until(..) => Some(BoundedGoal::Until(operands[0].clone(), operands[1].clone(), horizon)),
        PathOp::Globally(_) => None,
    }
}
