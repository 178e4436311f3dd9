//! Goal-extended models `M_ϱ`.
//!
//! An extended state pairs a world state with one active goal set per agent
//! of `A_ϱ`. Achievement (and priority) models contain every goal tuple that
//! is consistent with the world state, so the states carrying the initial
//! assignment always exist. Maintenance models contain exactly one extended
//! state per world state.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::assignment::{GoalAssignment, GoalBase, GoalSet};
use crate::error::{CapacityError, Error, Result};
use crate::expr::ENTAILMENT_ATOM_LIMIT;
use crate::ids::{AgentId, StateId};
use crate::stateset::StateSet;
use crate::structure::GameStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Achievement,
    Maintenance,
    Priority,
}

impl Semantics {
    pub const ALL: [Semantics; 3] = [Semantics::Achievement, Semantics::Maintenance, Semantics::Priority];
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Achievement => "achievement",
            Semantics::Maintenance => "maintenance",
            Semantics::Priority => "priority",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "achievement" => Ok(Semantics::Achievement),
            "maintenance" => Ok(Semantics::Maintenance),
            "priority" => Ok(Semantics::Priority),
            other => Err(format!(
                "unknown semantics `{other}` (expected achievement, maintenance or priority)"
            )),
        }
    }
}

/// A world state plus one active goal set per agent of `A_ϱ`, in declared
/// agent order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedState {
    pub world: StateId,
    pub goals: Vec<GoalSet>,
}

#[derive(Debug, Clone)]
pub struct ExtendedModel<'m> {
    base: &'m GameStructure,
    semantics: Semantics,
    rho: GoalAssignment,
    agents: Vec<AgentId>,
    states: Vec<ExtendedState>,
    index: HashMap<ExtendedState, usize>,
    /// `succ[i][k]`: successor of state `i` under the `k`-th joint move of `D(ws(i))`.
    succ: Vec<Vec<usize>>,
    by_world: Vec<Vec<usize>>,
    /// `goal_truth[q][slot]`: goals of the `slot`-th agent true at world `q`.
    goal_truth: Vec<Vec<GoalSet>>,
}

/// Goals of `base` true at `world`, as a mask.
pub fn goals_true(model: &GameStructure, base: &GoalBase, world: StateId) -> GoalSet {
    let mut out = GoalSet::EMPTY;
    for (i, g) in base.goals().iter().enumerate() {
        if model.eval_unchecked(g, world) {
            out = out.union(GoalSet::singleton(i));
        }
    }
    out
}

/// Builds `M_ϱ`. The base structure must validate cleanly.
pub fn extend<'m>(base: &'m GameStructure, rho: &GoalAssignment, semantics: Semantics) -> Result<ExtendedModel<'m>> {
    let diags = base.validate();
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags));
    }
    let agents: Vec<AgentId> = rho.agents().into_iter().collect();
    for &agent in &agents {
        if agent.0 >= base.agents().len() {
            return Err(Error::Unknown {
                kind: "agent",
                name: format!("#{}", agent.0),
            });
        }
        let goals = rho.get(agent).expect("agent from the assignment");
        for g in goals.goals() {
            let atoms = g.atoms();
            if let Some(p) = atoms.iter().find(|p| p.0 >= base.props().len()) {
                return Err(Error::Unknown {
                    kind: "proposition",
                    name: format!("#{}", p.0),
                });
            }
            if atoms.len() > ENTAILMENT_ATOM_LIMIT {
                return Err(CapacityError::EntailmentAtoms {
                    atoms: atoms.len(),
                    limit: ENTAILMENT_ATOM_LIMIT,
                }
                .into());
            }
        }
        if semantics == Semantics::Priority && goals.priority().is_none() {
            return Err(Error::MissingPriority(base.agent_name(agent).to_string()));
        }
    }

    let goal_truth: Vec<Vec<GoalSet>> = base
        .state_ids()
        .map(|q| {
            agents
                .iter()
                .map(|&a| goals_true(base, rho.get(a).unwrap(), q))
                .collect()
        })
        .collect();
    let full: Vec<GoalSet> = agents.iter().map(|&a| rho.get(a).unwrap().all()).collect();

    let mut states = Vec::new();
    let mut by_world = vec![Vec::new(); base.num_states()];
    for q in base.state_ids() {
        let open: Vec<GoalSet> = full
            .iter()
            .zip(&goal_truth[q.0])
            .map(|(all, truth)| all.minus(*truth))
            .collect();
        let tuples = match semantics {
            Semantics::Maintenance => vec![open],
            Semantics::Achievement | Semantics::Priority => {
                let mut tuples = vec![Vec::new()];
                for set in &open {
                    let subsets = set.subsets();
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t: Vec<GoalSet>| {
                            subsets.iter().map(move |&s| {
                                let mut t = t.clone();
                                t.push(s);
                                t
                            })
                        })
                        .collect();
                }
                tuples
            }
        };
        for goals in tuples {
            by_world[q.0].push(states.len());
            states.push(ExtendedState { world: q, goals });
        }
    }
    let index: HashMap<ExtendedState, usize> =
        states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();

    let mut succ = Vec::with_capacity(states.len());
    for s in &states {
        let mut row = Vec::with_capacity(base.joint_move_count(s.world));
        for joint in base.joint_moves(s.world) {
            let target = base
                .transition(s.world, &joint)
                .expect("validated structures have total transitions");
            let goals: Vec<GoalSet> = match semantics {
                Semantics::Maintenance => full
                    .iter()
                    .zip(&goal_truth[target.0])
                    .map(|(all, truth)| all.minus(*truth))
                    .collect(),
                Semantics::Achievement | Semantics::Priority => s
                    .goals
                    .iter()
                    .zip(&goal_truth[target.0])
                    .map(|(g, truth)| g.minus(*truth))
                    .collect(),
            };
            let next = ExtendedState { world: target, goals };
            row.push(index[&next]);
        }
        succ.push(row);
    }

    Ok(ExtendedModel {
        base,
        semantics,
        rho: rho.clone(),
        agents,
        states,
        index,
        succ,
        by_world,
        goal_truth,
    })
}

impl<'m> ExtendedModel<'m> {
    pub fn base(&self) -> &'m GameStructure {
        self.base
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn assignment(&self) -> &GoalAssignment {
        &self.rho
    }

    /// `A_ϱ` in declared order; goal tuples follow this order.
    pub fn goal_agents(&self) -> &[AgentId] {
        &self.agents
    }

    /// Position of `agent` within the goal tuples.
    pub fn goal_slot(&self, agent: AgentId) -> Option<usize> {
        self.agents.iter().position(|&a| a == agent)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &ExtendedState {
        &self.states[i]
    }

    pub fn states(&self) -> &[ExtendedState] {
        &self.states
    }

    pub fn index_of(&self, s: &ExtendedState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn ws(&self, i: usize) -> StateId {
        self.states[i].world
    }

    /// Active goals of `agent` at extended state `i`.
    pub fn gl(&self, agent: AgentId, i: usize) -> Result<GoalSet> {
        let slot = self
            .goal_slot(agent)
            .ok_or_else(|| Error::NoGoalBase(self.base.agent_name(agent).to_string()))?;
        Ok(self.states[i].goals[slot])
    }

    /// Successors of `i`, indexed like `base().joint_moves(ws(i))`.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    /// Extended states over world `q`.
    pub fn over_world(&self, q: StateId) -> &[usize] {
        &self.by_world[q.0]
    }

    /// Goals of the agent in `slot` that hold at world `q`.
    pub fn goal_truth(&self, q: StateId, slot: usize) -> GoalSet {
        self.goal_truth[q.0][slot]
    }

    /// `ws`-preimage of a set of world states.
    pub fn lift(&self, worlds: &StateSet) -> StateSet {
        assert_eq!(worlds.universe(), self.base.num_states(), "lifting a set over another model");
        StateSet::from_predicate(self.states.len(), |i| worlds.contains(self.states[i].world.0))
    }

    /// `ws` image of a set of extended states.
    pub fn project(&self, set: &StateSet) -> StateSet {
        assert_eq!(set.universe(), self.states.len(), "projecting a set over another model");
        let mut out = StateSet::empty(self.base.num_states());
        for i in set.iter() {
            out.insert(self.states[i].world.0);
        }
        out
    }

    /// `⟦ϱ⟧`: extended states whose goals are exactly the initial assignment.
    pub fn assignment_states(&self) -> StateSet {
        let full: Vec<GoalSet> = self.agents.iter().map(|&a| self.rho.get(a).unwrap().all()).collect();
        StateSet::from_predicate(self.states.len(), |i| self.states[i].goals == full)
    }

    /// States reachable from `from` through any joint move.
    pub fn reachable_from(&self, from: &StateSet) -> StateSet {
        let mut seen = from.clone();
        let mut stack: Vec<usize> = from.iter().collect();
        while let Some(i) = stack.pop() {
            for &j in &self.succ[i] {
                if seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Whether no active goal of any agent already holds at the world state.
    pub fn is_consistent(&self, i: usize) -> bool {
        let s = &self.states[i];
        s.goals
            .iter()
            .enumerate()
            .all(|(slot, g)| g.intersection(self.goal_truth[s.world.0][slot]).is_empty())
    }

    /// `∏ 2^{|ϱ[agt]|}`, the per-world bound on achievement-mode goal tuples.
    pub fn tuple_bound(&self) -> u128 {
        self.agents
            .iter()
            .map(|&a| 1u128 << self.rho.get(a).unwrap().len())
            .product()
    }

    pub fn render_state(&self, i: usize) -> String {
        let s = &self.states[i];
        let mut parts = vec![self.base.state_name(s.world).to_string()];
        for (slot, &agent) in self.agents.iter().enumerate() {
            let base = self.rho.get(agent).unwrap();
            let goals: Vec<String> = s.goals[slot]
                .iter()
                .map(|g| base.goals()[g].display(self.base.props()).to_string())
                .collect();
            parts.push(format!("{}:{{{}}}", self.base.agent_name(agent), goals.join(", ")));
        }
        format!("<{}>", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::PriorityOrder;
    use crate::expr::BoolExpr;
    use crate::ids::{PropId, NOOP};
    use crate::structure::GameStructureBuilder;

    /// Two states: s0 (nothing) and s1 (p). `go` moves s0 to s1 and back.
    fn toggle() -> GameStructure {
        let mut b = GameStructureBuilder::new();
        let a = b.agent("a");
        let p = b.prop("p");
        b.prop("r");
        let go = b.action("go");
        let s0 = b.state("s0", &[]);
        let s1 = b.state("s1", &[p]);
        for s in [s0, s1] {
            b.avail(s, a, &[NOOP, go]);
        }
        b.transition(s0, vec![go], s1).unwrap();
        b.transition(s1, vec![go], s0).unwrap();
        b.inject_noop();
        b.build()
    }

    fn rho(goals: Vec<BoolExpr>) -> GoalAssignment {
        let mut r = GoalAssignment::default();
        r.insert(AgentId(0), GoalBase::new(goals).unwrap());
        r
    }

    #[test]
    fn empty_assignment_is_isomorphic() {
        let m = toggle();
        for sem in Semantics::ALL {
            let x = extend(&m, &GoalAssignment::default(), sem).unwrap();
            assert_eq!(x.num_states(), 2);
            assert_eq!(x.assignment_states().len(), 2);
            assert_eq!(x.successors(0), &[0, 1]);
        }
    }

    #[test]
    fn achievement_states_and_transitions() {
        let m = toggle();
        let p = BoolExpr::Atom(PropId(0));
        let r = BoolExpr::Atom(PropId(1));
        let x = extend(&m, &rho(vec![p, r]), Semantics::Achievement).unwrap();
        // s0: subsets of {p, r} (4); s1: subsets of {r} (2).
        assert_eq!(x.num_states(), 6);
        assert!((0..6).all(|i| x.is_consistent(i)));
        let start = x.index_of(&ExtendedState { world: StateId(0), goals: vec![GoalSet(0b11)] }).unwrap();
        let mid = x.successors(start)[1];
        assert_eq!(x.state(mid), &ExtendedState { world: StateId(1), goals: vec![GoalSet(0b10)] });
        // p is dropped for good once achieved.
        let back = x.successors(mid)[1];
        assert_eq!(x.state(back).goals, vec![GoalSet(0b10)]);
        assert_eq!(x.assignment_states().iter().collect::<Vec<_>>(), vec![start]);
    }

    #[test]
    fn maintenance_goals_reappear() {
        let m = toggle();
        let p = BoolExpr::Atom(PropId(0));
        let x = extend(&m, &rho(vec![p]), Semantics::Maintenance).unwrap();
        assert_eq!(x.num_states(), 2);
        assert_eq!(x.state(0).goals, vec![GoalSet(1)]);
        assert_eq!(x.state(1).goals, vec![GoalSet(0)]);
        assert_eq!(x.successors(1)[1], 0);
        assert_eq!(x.assignment_states().iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn priority_requires_order() {
        let m = toggle();
        let p = BoolExpr::Atom(PropId(0));
        assert!(matches!(
            extend(&m, &rho(vec![p.clone()]), Semantics::Priority),
            Err(Error::MissingPriority(_))
        ));
        let mut r = GoalAssignment::default();
        r.insert(AgentId(0), GoalBase::new([p]).unwrap().with_priority(PriorityOrder::empty(1)));
        let x = extend(&m, &r, Semantics::Priority).unwrap();
        assert_eq!(x.num_states(), 3);
    }

    #[test]
    fn gl_outside_assignment_errors() {
        let m = toggle();
        let x = extend(&m, &GoalAssignment::default(), Semantics::Achievement).unwrap();
        assert!(matches!(x.gl(AgentId(0), 0), Err(Error::NoGoalBase(_))));
    }

    #[test]
    fn lift_and_project() {
        let m = toggle();
        let x = extend(&m, &rho(vec![BoolExpr::Atom(PropId(1))]), Semantics::Achievement).unwrap();
        let w = StateSet::from_indices(2, [1]);
        let lifted = x.lift(&w);
        assert_eq!(lifted.len(), 2);
        assert_eq!(x.project(&lifted), w);
    }
}
