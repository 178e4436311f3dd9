//! Memoryless strategies over extended models and their outcomes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::checker::AgentRationality;
use crate::extension::ExtendedModel;
use crate::ids::{ActionId, AgentId};

/// Per-agent choices indexed by extended state. An agent without a choice at
/// some state moves freely there.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MemorylessStrategy {
    choices: BTreeMap<AgentId, HashMap<usize, ActionId>>,
}

impl MemorylessStrategy {
    pub fn set(&mut self, agent: AgentId, state: usize, action: ActionId) {
        self.choices.entry(agent).or_default().insert(state, action);
    }

    pub fn get(&self, agent: AgentId, state: usize) -> Option<ActionId> {
        self.choices.get(&agent)?.get(&state).copied()
    }

    pub fn agents(&self) -> BTreeSet<AgentId> {
        self.choices.keys().copied().collect()
    }

    /// Only the choices of `agent`.
    pub fn restrict(&self, agent: AgentId) -> MemorylessStrategy {
        let mut out = MemorylessStrategy::default();
        if let Some(c) = self.choices.get(&agent) {
            out.choices.insert(agent, c.clone());
        }
        out
    }

    /// Builds a strategy from per-state coalition profiles, such as the
    /// witness returned by [`super::Game::winning_strategy`].
    pub fn from_profiles(agents: &[AgentId], profiles: &HashMap<usize, Vec<ActionId>>) -> Self {
        let mut out = MemorylessStrategy::default();
        for (&state, profile) in profiles {
            for (&agent, &action) in agents.iter().zip(profile) {
                out.set(agent, state, action);
            }
        }
        out
    }
}

/// The part of the extended model reachable from a start state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeGraph {
    pub start: usize,
    /// Successors of every reachable state, sorted.
    pub edges: BTreeMap<usize, Vec<usize>>,
}

impl OutcomeGraph {
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.keys().copied()
    }

    /// Whether every maximal path from the start passes a state in `target`.
    /// Outcome paths are infinite, so this fails iff some cycle or dead end
    /// avoids `target`.
    pub fn all_paths_reach(&self, target: impl Fn(usize) -> bool) -> bool {
        // Remove target states, then look for a reachable cycle or dead end.
        fn visit(
            g: &OutcomeGraph,
            i: usize,
            target: &dyn Fn(usize) -> bool,
            state: &mut HashMap<usize, bool>,
        ) -> bool {
            if target(i) {
                return true;
            }
            match state.get(&i) {
                Some(true) => return false,
                Some(false) => return true,
                None => {}
            }
            state.insert(i, true);
            let succ = &g.edges[&i];
            if succ.is_empty() {
                return false;
            }
            for &s in succ {
                if !visit(g, s, target, state) {
                    return false;
                }
            }
            state.insert(i, false);
            true
        }
        visit(self, self.start, &target, &mut HashMap::new())
    }
}

/// `out(q, F_S)`: agents with a choice move as chosen, the rest range over
/// their full availability.
pub fn outcomes(model: &ExtendedModel<'_>, start: usize, fixed: &MemorylessStrategy) -> OutcomeGraph {
    let base = model.base();
    let mut edges = BTreeMap::new();
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        if edges.contains_key(&i) {
            continue;
        }
        let mut succ = BTreeSet::new();
        for (k, joint) in base.joint_moves(model.ws(i)).into_iter().enumerate() {
            let follows = joint
                .iter()
                .enumerate()
                .all(|(a, &act)| fixed.get(AgentId(a), i).is_none_or(|c| c == act));
            if follows {
                succ.insert(model.successors(i)[k]);
            }
        }
        stack.extend(succ.iter().copied());
        edges.insert(i, succ.into_iter().collect());
    }
    OutcomeGraph { start, edges }
}

/// Whether `f`'s choices for `rat`'s agent are rational at every extended
/// state reachable from `start` while that agent follows `f`. Returns the
/// first offending state otherwise.
pub fn is_rational_memoryless(
    model: &ExtendedModel<'_>,
    rat: &AgentRationality,
    f: &MemorylessStrategy,
    start: usize,
) -> Result<(), usize> {
    let agent = rat.agent();
    let own = f.restrict(agent);
    let graph = outcomes(model, start, &own);
    for i in graph.nodes() {
        match own.get(agent, i) {
            Some(a) if rat.rational_actions_at(model, i).contains(&a) => {}
            _ => return Err(i),
        }
    }
    Ok(())
}
