//! Brute-force decision procedures used to validate the symbolic checker.
//!
//! [`oracle_check`] decides a coalition clause by enumerating memoryless
//! strategies of the coalition over the extended model and checking every
//! path of the resulting outcome graphs. [`trace`] implements rationality of
//! finite traces, [`atl`] a plain ATL evaluator and [`bounded`] a
//! history-based game-tree search over the base model.

pub mod atl;
pub mod bounded;
pub mod strategy;
pub mod trace;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::checker::{ensure_well_formed, rationalities, Rationalities};
use crate::error::{CapacityError, Error, Result};
use crate::extension::{extend, ExtendedModel, Semantics};
use crate::formula::{Coalition, Formula, PathOp};
use crate::ids::{ActionId, AgentId, StateId};
use crate::stateset::StateSet;
use crate::structure::GameStructure;

pub use strategy::{is_rational_memoryless, outcomes, MemorylessStrategy, OutcomeGraph};

/// Default bound on explored strategy profiles per coalition clause.
pub const DEFAULT_GUARD: u64 = 1_000_000;

/// A path property over extended states.
#[derive(Debug, Clone)]
pub enum PathGoal {
    Next(StateSet),
    Globally(StateSet),
    Until(StateSet, StateSet),
}

/// One coalition clause over one extended model, with the moves each agent
/// may make at each extended state.
pub struct Game<'a, 'm> {
    model: &'a ExtendedModel<'m>,
    coalition: Vec<AgentId>,
    /// `choices[i]`: coalition move profiles at state `i`, each with the
    /// successors the remaining agents can bring about.
    choices: Vec<Vec<(Vec<ActionId>, Vec<usize>)>>,
}

impl<'a, 'm> Game<'a, 'm> {
    /// Agents in `A ∩ A_ω` and `A_ω \ A` move rationally; every other agent
    /// uses its full availability.
    pub fn new(model: &'a ExtendedModel<'m>, coalition: &BTreeSet<AgentId>, bdi: &Rationalities) -> Self {
        let base = model.base();
        let coalition: Vec<AgentId> = coalition.iter().copied().collect();
        let mut choices = Vec::with_capacity(model.num_states());
        for i in 0..model.num_states() {
            let world = model.ws(i);
            let allowed: Vec<Vec<ActionId>> = base
                .agent_ids()
                .map(|a| match bdi.get(&a) {
                    Some(r) => r.rational_actions_at(model, i),
                    None => base.available(a, world).to_vec(),
                })
                .collect();
            let mut grouped: BTreeMap<Vec<ActionId>, BTreeSet<usize>> = BTreeMap::new();
            for (k, joint) in base.joint_moves(world).into_iter().enumerate() {
                if joint.iter().zip(&allowed).all(|(a, set)| set.contains(a)) {
                    let profile: Vec<ActionId> = coalition.iter().map(|c| joint[c.0]).collect();
                    grouped.entry(profile).or_default().insert(model.successors(i)[k]);
                }
            }
            choices.push(
                grouped
                    .into_iter()
                    .map(|(p, s)| (p, s.into_iter().collect()))
                    .collect(),
            );
        }
        Game {
            model,
            coalition,
            choices,
        }
    }

    pub fn model(&self) -> &'a ExtendedModel<'m> {
        self.model
    }

    pub fn coalition(&self) -> &[AgentId] {
        &self.coalition
    }

    /// Coalition move profiles at `i`.
    pub fn profiles(&self, i: usize) -> impl Iterator<Item = &[ActionId]> {
        self.choices[i].iter().map(|(p, _)| p.as_slice())
    }

    /// Searches for a memoryless coalition strategy enforcing `goal` from
    /// `start`. The strategy is defined on the states where the path is still
    /// undecided. `explored` counts the strategy profiles tried.
    pub fn winning_strategy(
        &self,
        goal: &PathGoal,
        start: usize,
        guard: u64,
        explored: &mut u64,
    ) -> Result<Option<HashMap<usize, Vec<ActionId>>>, CapacityError> {
        if let PathGoal::Next(target) = goal {
            for (profile, succ) in &self.choices[start] {
                bump(explored, guard)?;
                if succ.iter().all(|&s| target.contains(s)) {
                    return Ok(Some(HashMap::from([(start, profile.clone())])));
                }
            }
            return Ok(None);
        }
        if !self.open(goal, start) {
            return Ok(if self.violates(goal, start) { None } else { Some(HashMap::new()) });
        }
        let mut assigned: HashMap<usize, usize> = HashMap::new();
        if self.search(goal, start, &mut assigned, guard, explored)? {
            Ok(Some(
                assigned
                    .into_iter()
                    .map(|(i, k)| (i, self.choices[i][k].0.clone()))
                    .collect(),
            ))
        } else {
            Ok(None)
        }
    }

    /// Undecided states, where the coalition still has to choose.
    fn open(&self, goal: &PathGoal, i: usize) -> bool {
        match goal {
            PathGoal::Next(_) => false,
            PathGoal::Globally(safe) => safe.contains(i),
            PathGoal::Until(keep, reach) => keep.contains(i) && !reach.contains(i),
        }
    }

    /// States at which every path through them already fails.
    fn violates(&self, goal: &PathGoal, i: usize) -> bool {
        match goal {
            PathGoal::Next(_) => false,
            PathGoal::Globally(safe) => !safe.contains(i),
            PathGoal::Until(keep, reach) => !keep.contains(i) && !reach.contains(i),
        }
    }

    fn search(
        &self,
        goal: &PathGoal,
        start: usize,
        assigned: &mut HashMap<usize, usize>,
        guard: u64,
        explored: &mut u64,
    ) -> Result<bool, CapacityError> {
        // Walk the outcome graph as far as the assignment reaches. Agents
        // outside the coalition choose freely at every visit: a violating path
        // found this way is realized by a memoryless counter-strategy, since
        // it can be shortened to a simple path (or a simple lasso).
        let mut seen = vec![false; self.model.num_states()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut frontier = None;
        let mut inner = Vec::new();
        while let Some(i) = queue.pop_front() {
            if self.violates(goal, i) {
                return Ok(false);
            }
            if !self.open(goal, i) {
                continue;
            }
            match assigned.get(&i) {
                None => {
                    frontier.get_or_insert(i);
                }
                Some(&k) => {
                    inner.push(i);
                    for &s in &self.choices[i][k].1 {
                        if !seen[s] {
                            seen[s] = true;
                            queue.push_back(s);
                        }
                    }
                }
            }
        }
        if matches!(goal, PathGoal::Until(..)) && self.has_open_cycle(&inner, assigned) {
            return Ok(false);
        }
        let Some(u) = frontier else {
            return Ok(true);
        };
        for k in 0..self.choices[u].len() {
            bump(explored, guard)?;
            assigned.insert(u, k);
            if self.search(goal, start, assigned, guard, explored)? {
                return Ok(true);
            }
            assigned.remove(&u);
        }
        Ok(false)
    }

    /// Whether the assigned undecided states contain a cycle, i.e. a path
    /// that postpones the target forever.
    fn has_open_cycle(&self, nodes: &[usize], assigned: &HashMap<usize, usize>) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let mut mark: HashMap<usize, Mark> = nodes.iter().map(|&i| (i, Mark::White)).collect();
        fn visit(
            g: &Game<'_, '_>,
            i: usize,
            assigned: &HashMap<usize, usize>,
            mark: &mut HashMap<usize, Mark>,
        ) -> bool {
            mark.insert(i, Mark::Grey);
            for &s in &g.choices[i][assigned[&i]].1 {
                match mark.get(&s) {
                    Some(Mark::Grey) => return true,
                    Some(Mark::White) => {
                        if visit(g, s, assigned, mark) {
                            return true;
                        }
                    }
                    _ => {}
                }
            }
            mark.insert(i, Mark::Black);
            false
        }
        for &i in nodes {
            if mark[&i] == Mark::White && visit(self, i, assigned, &mut mark) {
                return true;
            }
        }
        false
    }
}

fn bump(explored: &mut u64, guard: u64) -> Result<(), CapacityError> {
    *explored += 1;
    if *explored > guard {
        Err(CapacityError::StrategyGuard { guard })
    } else {
        Ok(())
    }
}

/// Decides `<<A>>_{ω,ϱ} goal` at extended state `start`.
pub fn oracle_check(game: &Game<'_, '_>, goal: &PathGoal, start: usize, guard: u64) -> Result<bool, CapacityError> {
    let mut explored = 0;
    Ok(game.winning_strategy(goal, start, guard, &mut explored)?.is_some())
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub satisfying: StateSet,
    /// Strategy profiles explored over all coalition nodes.
    pub explored: u64,
}

/// Evaluates a coalition node at every state of `⟦ϱ⟧`, projecting to base states.
pub fn oracle_coalition(
    model: &GameStructure,
    c: &Coalition,
    operands: &[StateSet],
    semantics: Semantics,
    guard: u64,
) -> Result<(StateSet, u64)> {
    let ext = extend(model, &c.goals, semantics)?;
    let bdi = rationalities(&ext, &c.capabilities)?;
    let game = Game::new(&ext, &c.agents, &bdi);
    let lifted: Vec<StateSet> = operands.iter().map(|s| ext.lift(s)).collect();
    let goal = match &c.path {
        PathOp::Next(_) => PathGoal::Next(lifted[0].clone()),
        PathOp::Globally(_) => PathGoal::Globally(lifted[0].clone()),
        PathOp::Until(..) => PathGoal::Until(lifted[0].clone(), lifted[1].clone()),
    };
    let mut out = StateSet::empty(model.num_states());
    let mut explored = 0;
    for i in ext.assignment_states().iter() {
        let mut here = 0;
        if game.winning_strategy(&goal, i, guard, &mut here)?.is_some() {
            out.insert(ext.ws(i).0);
        }
        explored += here;
    }
    Ok((out, explored))
}

/// Evaluates `f` with [`oracle_coalition`] at every coalition node.
pub fn oracle_evaluate(model: &GameStructure, f: &Formula, semantics: Semantics, guard: u64) -> Result<OracleReport> {
    let diags = model.validate();
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags));
    }
    ensure_well_formed(model, f)?;
    let mut explored = 0;
    let satisfying = eval(model, f, semantics, guard, &mut explored)?;
    Ok(OracleReport { satisfying, explored })
}

fn eval(model: &GameStructure, f: &Formula, semantics: Semantics, guard: u64, explored: &mut u64) -> Result<StateSet> {
    let n = model.num_states();
    Ok(match f {
        Formula::True => StateSet::full(n),
        Formula::False => StateSet::empty(n),
        Formula::Atom(p) => StateSet::from_predicate(n, |q| model.holds(StateId(q), *p)),
        Formula::Not(g) => eval(model, g, semantics, guard, explored)?.complement(),
        Formula::Or(a, b) => eval(model, a, semantics, guard, explored)?.union(&eval(model, b, semantics, guard, explored)?),
        Formula::And(a, b) => {
            eval(model, a, semantics, guard, explored)?.intersection(&eval(model, b, semantics, guard, explored)?)
        }
        Formula::Coalition(c) => {
            let operands = c
                .path
                .operands()
                .into_iter()
                .map(|o| eval(model, o, semantics, guard, explored))
                .collect::<Result<Vec<_>>>()?;
            let (set, used) = oracle_coalition(model, c, &operands, semantics, guard)?;
            *explored += used;
            set
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::NOOP;
    use crate::parser::parse_formula;
    use crate::structure::GameStructureBuilder;

    /// s0 -> s1 (target) only when `En` plays `go`.
    fn opponent_controls() -> GameStructure {
        let mut b = GameStructureBuilder::new();
        let ag = b.agent("Ag");
        let en = b.agent("En");
        let t = b.prop("t");
        let go = b.action("go");
        let s0 = b.state("s0", &[]);
        let s1 = b.state("s1", &[t]);
        b.avail(s0, ag, &[NOOP, go]);
        b.avail(s0, en, &[NOOP, go]);
        b.transition(s0, vec![NOOP, go], s1).unwrap();
        b.transition(s0, vec![go, go], s1).unwrap();
        b.inject_noop();
        b.default_stay();
        b.build()
    }

    #[test]
    fn opponent_blocks_the_target() {
        let m = opponent_controls();
        for text in ["<<Ag>>[] X t", "<<Ag>>[] F t"] {
            let f = parse_formula(text, &m).unwrap();
            let r = oracle_evaluate(&m, &f, Semantics::Achievement, DEFAULT_GUARD).unwrap();
            assert_eq!(r.satisfying.iter().collect::<Vec<_>>(), vec![1], "{text}");
        }
        let f = parse_formula("<<En>>[] X t", &m).unwrap();
        let r = oracle_evaluate(&m, &f, Semantics::Achievement, DEFAULT_GUARD).unwrap();
        assert_eq!(r.satisfying.len(), 2);
    }

    #[test]
    fn empty_coalition_globally_true() {
        let m = opponent_controls();
        let f = parse_formula("<<>>[] G true", &m).unwrap();
        assert_eq!(
            oracle_evaluate(&m, &f, Semantics::Achievement, DEFAULT_GUARD).unwrap().satisfying.len(),
            2
        );
    }

    #[test]
    fn guard_is_enforced() {
        let m = opponent_controls();
        let f = parse_formula("<<En>>[] F t", &m).unwrap();
        assert!(matches!(
            oracle_evaluate(&m, &f, Semantics::Achievement, 0),
            Err(Error::Capacity(CapacityError::StrategyGuard { guard: 0 }))
        ));
    }
}
