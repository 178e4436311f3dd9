//! Symbolic model checking over goal-extended models: applicable plans,
//! BDI-rational moves, the restricted pre-image and the coalition fixpoints.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::assignment::{CapabilityAssignment, GoalBase, GoalSet, PriorityOrder};
use crate::error::{Error, Result};
use crate::expr::entails;
use crate::extension::{extend, ExtendedModel, Semantics};
use crate::formula::{Coalition, Formula, PathOp};
use crate::ids::{ActionId, AgentId, StateId, NOOP};
use crate::stateset::StateSet;
use crate::structure::{GameStructure, PlanLibrary, PlanRule};

/// The plan library of one BDI agent, pre-evaluated against its goal base.
#[derive(Debug, Clone)]
pub struct AgentRationality {
    agent: AgentId,
    plans: Vec<PlanRule>,
    /// Goals each plan's effect entails.
    serves: Vec<GoalSet>,
    /// `context[q][k]`: whether plan `k`'s context holds at world `q`.
    context: Vec<Vec<bool>>,
    priority: PriorityOrder,
}

impl AgentRationality {
    pub fn new(model: &GameStructure, agent: AgentId, goals: &GoalBase, plans: &PlanLibrary) -> Result<Self> {
        let plans = plans.plans().to_vec();
        let mut serves = Vec::with_capacity(plans.len());
        for plan in &plans {
            let mut set = GoalSet::EMPTY;
            for (i, g) in goals.goals().iter().enumerate() {
                if entails(&plan.effect, g)? {
                    set = set.union(GoalSet::singleton(i));
                }
            }
            serves.push(set);
        }
        let context = model
            .state_ids()
            .map(|q| plans.iter().map(|p| model.eval_unchecked(&p.context, q)).collect())
            .collect();
        let priority = goals
            .priority()
            .cloned()
            .unwrap_or_else(|| PriorityOrder::empty(goals.len()));
        Ok(AgentRationality {
            agent,
            plans,
            serves,
            context,
            priority,
        })
    }

    /// Rationality of `agent` under `ω` and the goal base it has in `model`.
    pub fn for_extended(model: &ExtendedModel<'_>, agent: AgentId, caps: &CapabilityAssignment) -> Result<Self> {
        let base = model.base();
        let goals = model
            .assignment()
            .get(agent)
            .ok_or_else(|| Error::NoGoalBase(base.agent_name(agent).to_string()))?;
        AgentRationality::new(base, agent, goals, &base.plans_of(agent, caps)?)
    }

    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn plans(&self) -> &[PlanRule] {
        &self.plans
    }

    /// Goals served by plan `k`.
    pub fn serves(&self, k: usize) -> GoalSet {
        self.serves[k]
    }

    /// `appl`: indices of plans whose context holds at `world` and whose
    /// effect entails some goal in `active`.
    pub fn applicable(&self, world: StateId, active: GoalSet) -> Vec<usize> {
        (0..self.plans.len())
            .filter(|&k| self.context[world.0][k] && !self.serves[k].intersection(active).is_empty())
            .collect()
    }

    /// `appl⁺`: applicable plans serving some active goal for which no
    /// applicable plan serves a strictly preferred active goal.
    pub fn applicable_priority(&self, world: StateId, active: GoalSet) -> Vec<usize> {
        let appl = self.applicable(world, active);
        let served = appl
            .iter()
            .fold(GoalSet::EMPTY, |acc, &k| acc.union(self.serves[k]))
            .intersection(active);
        appl.into_iter()
            .filter(|&k| {
                self.serves[k]
                    .intersection(active)
                    .iter()
                    .any(|g| self.priority.preferred_over(g).intersection(served).is_empty())
            })
            .collect()
    }

    /// `appl` or `appl⁺` depending on the semantics.
    pub fn selected(&self, world: StateId, active: GoalSet, semantics: Semantics) -> Vec<usize> {
        match semantics {
            Semantics::Priority => self.applicable_priority(world, active),
            Semantics::Achievement | Semantics::Maintenance => self.applicable(world, active),
        }
    }

    /// Actions of selected plans that are physically available at `world`.
    pub fn executable_actions(
        &self,
        model: &GameStructure,
        world: StateId,
        active: GoalSet,
        semantics: Semantics,
    ) -> Vec<ActionId> {
        let avail = model.available(self.agent, world);
        let mut out: Vec<ActionId> = self
            .selected(world, active, semantics)
            .into_iter()
            .map(|k| self.plans[k].action)
            .filter(|a| avail.binary_search(a).is_ok())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// `d^BDI`: executable plan actions, or `{noOp}` if there are none.
    pub fn rational_actions(
        &self,
        model: &GameStructure,
        world: StateId,
        active: GoalSet,
        semantics: Semantics,
    ) -> Vec<ActionId> {
        let out = self.executable_actions(model, world, active, semantics);
        if out.is_empty() {
            vec![NOOP]
        } else {
            out
        }
    }

    /// Plans are selected but none of their actions is available, so the
    /// agent falls back to `noOp`.
    pub fn falls_back(&self, model: &GameStructure, world: StateId, active: GoalSet, semantics: Semantics) -> bool {
        !self.selected(world, active, semantics).is_empty()
            && self.executable_actions(model, world, active, semantics).is_empty()
    }

    fn active_at(&self, model: &ExtendedModel<'_>, i: usize) -> GoalSet {
        model
            .gl(self.agent, i)
            .expect("rational agents have a goal base in the extended model")
    }

    /// `appl` at an extended state.
    pub fn applicable_plans(&self, model: &ExtendedModel<'_>, i: usize) -> Vec<&PlanRule> {
        let active = self.active_at(model, i);
        self.applicable(model.ws(i), active)
            .into_iter()
            .map(|k| &self.plans[k])
            .collect()
    }

    /// `appl⁺` at an extended state.
    pub fn applicable_plans_priority(&self, model: &ExtendedModel<'_>, i: usize) -> Vec<&PlanRule> {
        let active = self.active_at(model, i);
        self.applicable_priority(model.ws(i), active)
            .into_iter()
            .map(|k| &self.plans[k])
            .collect()
    }

    /// `d^BDI` at an extended state, using the model's semantics.
    pub fn rational_actions_at(&self, model: &ExtendedModel<'_>, i: usize) -> Vec<ActionId> {
        let active = self.active_at(model, i);
        self.rational_actions(model.base(), model.ws(i), active, model.semantics())
    }
}

/// BDI agents of a coalition node, keyed by agent.
pub type Rationalities = BTreeMap<AgentId, AgentRationality>;

/// Builds the rationality of every agent of `A_ω`.
pub fn rationalities(model: &ExtendedModel<'_>, caps: &CapabilityAssignment) -> Result<Rationalities> {
    caps.agents()
        .into_iter()
        .map(|a| Ok((a, AgentRationality::for_extended(model, a, caps)?)))
        .collect()
}

/// `d⁺`: full availability for agents outside `A_ω`, `d^BDI` otherwise.
pub fn available_actions(model: &ExtendedModel<'_>, agent: AgentId, i: usize, bdi: &Rationalities) -> Vec<ActionId> {
    match bdi.get(&agent) {
        Some(r) => r.rational_actions_at(model, i),
        None => model.base().available(agent, model.ws(i)).to_vec(),
    }
}

/// Pre-image machinery for one coalition over one extended model.
///
/// For every extended state the coalition's choice profiles are enumerated
/// once, each with the set of successors the other agents can force.
pub struct CoalitionContext<'a, 'm> {
    model: &'a ExtendedModel<'m>,
    /// `outcomes[i][p]`: successors of state `i` when the coalition plays its
    /// `p`-th profile, over every choice of the other agents.
    outcomes: Vec<Vec<Vec<usize>>>,
    fallbacks: usize,
}

impl<'a, 'm> CoalitionContext<'a, 'm> {
    pub fn new(model: &'a ExtendedModel<'m>, coalition: &BTreeSet<AgentId>, bdi: &Rationalities) -> Self {
        let base = model.base();
        let n_agents = base.agents().len();
        let mut outcomes = Vec::with_capacity(model.num_states());
        let mut fallbacks = 0;
        for i in 0..model.num_states() {
            let world = model.ws(i);
            if bdi.values().any(|r| {
                let active = model.gl(r.agent(), i).unwrap();
                r.falls_back(base, world, active, model.semantics())
            }) {
                fallbacks += 1;
            }
            let moves: Vec<Vec<ActionId>> = (0..n_agents)
                .map(|a| available_actions(model, AgentId(a), i, bdi))
                .collect();
            let strides = base.joint_move_strides(world);
            // Dense offset of each action in `d(agent, world)`.
            let offset = |a: usize, act: ActionId| {
                base.available(AgentId(a), world)
                    .binary_search(&act)
                    .expect("d⁺ is a subset of d")
                    * strides[a]
            };
            let mine: Vec<usize> = (0..n_agents).filter(|a| coalition.contains(&AgentId(*a))).collect();
            let theirs: Vec<usize> = (0..n_agents).filter(|a| !coalition.contains(&AgentId(*a))).collect();
            let partial = |agents: &[usize]| -> Vec<usize> {
                let mut acc = vec![0usize];
                for &a in agents {
                    acc = acc
                        .iter()
                        .flat_map(|&o| moves[a].iter().map(move |&act| o + offset(a, act)))
                        .collect();
                }
                acc
            };
            let theirs_offsets = partial(&theirs);
            let succ = model.successors(i);
            let row: Vec<Vec<usize>> = partial(&mine)
                .into_iter()
                .map(|o| {
                    let mut targets: Vec<usize> = theirs_offsets.iter().map(|t| succ[o + t]).collect();
                    targets.sort_unstable();
                    targets.dedup();
                    targets
                })
                .collect();
            outcomes.push(row);
        }
        CoalitionContext {
            model,
            outcomes,
            fallbacks,
        }
    }

    pub fn model(&self) -> &'a ExtendedModel<'m> {
        self.model
    }

    /// States where a BDI agent has selected plans but none is executable.
    pub fn fallback_states(&self) -> usize {
        self.fallbacks
    }

    /// `Pre(A, ω, Θ, ρ)`.
    pub fn pre(&self, rho: &StateSet) -> StateSet {
        StateSet::from_predicate(self.model.num_states(), |i| {
            self.outcomes[i]
                .iter()
                .any(|targets| targets.iter().all(|&t| rho.contains(t)))
        })
    }

    pub fn next(&self, target: &StateSet) -> (StateSet, usize) {
        (self.pre(target), 1)
    }

    /// Greatest fixpoint for `G θ`, in the loop shape of the symbolic
    /// algorithm. Returns the fixpoint and the number of iterations.
    pub fn globally(&self, theta: &StateSet) -> (StateSet, usize) {
        let n = self.model.num_states();
        let mut rho = StateSet::full(n);
        let mut tau = theta.clone();
        let mut iterations = 0;
        while !rho.is_subset(&tau) {
            rho = tau;
            tau = self.pre(&rho).intersection(theta);
            iterations += 1;
        }
        assert!(iterations <= n.max(1), "globally fixpoint took {iterations} iterations over {n} states");
        (rho, iterations)
    }

    /// Least fixpoint for `θ1 U θ2`, seeded with `θ2`.
    pub fn until(&self, theta1: &StateSet, theta2: &StateSet) -> (StateSet, usize) {
        let n = self.model.num_states();
        let mut rho = StateSet::empty(n);
        let mut tau = theta2.clone();
        let mut iterations = 0;
        while !tau.is_subset(&rho) {
            rho = rho.union(&tau);
            tau = self.pre(&rho).intersection(theta1);
            iterations += 1;
        }
        assert!(iterations <= n.max(1), "until fixpoint took {iterations} iterations over {n} states");
        (rho, iterations)
    }

    /// States from which the coalition forces `θ2` within `k` steps while
    /// staying in `θ1` before.
    pub fn until_within(&self, theta1: &StateSet, theta2: &StateSet, k: usize) -> StateSet {
        let mut w = theta2.clone();
        for _ in 0..k {
            w = w.union(&self.pre(&w).intersection(theta1));
        }
        w
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoalitionStats {
    pub formula: String,
    pub semantics: Semantics,
    pub extended_states: usize,
    /// Extended states reachable from the initial-assignment states.
    pub reachable_states: usize,
    pub fixpoint_iterations: usize,
    /// States where a BDI agent's selected plans are all unexecutable.
    pub fallback_states: usize,
}

#[derive(Debug, Clone)]
pub struct SubformulaResult {
    pub formula: String,
    pub satisfying: StateSet,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub formula: String,
    pub semantics: Semantics,
    /// Satisfying base states of the whole formula.
    pub satisfying: StateSet,
    /// Children before parents; the last entry is the whole formula.
    pub per_subformula: Vec<SubformulaResult>,
    pub coalitions: Vec<CoalitionStats>,
}

#[derive(Serialize)]
struct JsonSubformula<'a> {
    formula: &'a str,
    satisfying_states: Vec<&'a str>,
}

#[derive(Serialize)]
struct JsonStats<'a> {
    extended_states: usize,
    fixpoint_iterations: usize,
    coalitions: &'a [CoalitionStats],
}

#[derive(Serialize)]
struct JsonReport<'a> {
    formula: &'a str,
    semantics: Semantics,
    satisfying_states: Vec<&'a str>,
    per_subformula: Vec<JsonSubformula<'a>>,
    stats: JsonStats<'a>,
}

impl CheckReport {
    pub fn holds_at(&self, state: StateId) -> bool {
        self.satisfying.contains(state.0)
    }

    pub fn state_names<'m>(&self, model: &'m GameStructure) -> Vec<&'m str> {
        names(model, &self.satisfying)
    }

    pub fn extended_states(&self) -> usize {
        self.coalitions.iter().map(|c| c.extended_states).sum()
    }

    pub fn fixpoint_iterations(&self) -> usize {
        self.coalitions.iter().map(|c| c.fixpoint_iterations).sum()
    }

    pub fn to_json(&self, model: &GameStructure) -> serde_json::Value {
        let report = JsonReport {
            formula: &self.formula,
            semantics: self.semantics,
            satisfying_states: names(model, &self.satisfying),
            per_subformula: self
                .per_subformula
                .iter()
                .map(|s| JsonSubformula {
                    formula: &s.formula,
                    satisfying_states: names(model, &s.satisfying),
                })
                .collect(),
            stats: JsonStats {
                extended_states: self.extended_states(),
                fixpoint_iterations: self.fixpoint_iterations(),
                coalitions: &self.coalitions,
            },
        };
        serde_json::to_value(report).expect("report serializes")
    }
}

/// State names of `set`, in declaration order.
pub fn names<'m>(model: &'m GameStructure, set: &StateSet) -> Vec<&'m str> {
    set.iter().map(|i| model.state_name(StateId(i))).collect()
}

/// Rejects formulas with `A_ω ≠ A_ϱ` at some coalition node.
pub fn ensure_well_formed(model: &GameStructure, f: &Formula) -> Result<()> {
    if let Some(bad) = f.well_formed().first() {
        let list = |s: &BTreeSet<AgentId>| s.iter().map(|&a| model.agent_name(a)).collect::<Vec<_>>().join(", ");
        return Err(Error::IllFormed(format!(
            "capability agents {{{}}} differ from goal agents {{{}}}",
            list(&bad.capability_agents),
            list(&bad.goal_agents)
        )));
    }
    Ok(())
}

/// Evaluates one coalition node, given the base-state sets of its operands.
pub fn check_coalition(
    model: &GameStructure,
    c: &Coalition,
    operands: &[StateSet],
    semantics: Semantics,
) -> Result<(StateSet, CoalitionStats)> {
    let ext = extend(model, &c.goals, semantics)?;
    let bdi = rationalities(&ext, &c.capabilities)?;
    let ctx = CoalitionContext::new(&ext, &c.agents, &bdi);
    let lifted: Vec<StateSet> = operands.iter().map(|s| ext.lift(s)).collect();
    let (set, iterations) = match &c.path {
        PathOp::Next(_) => ctx.next(&lifted[0]),
        PathOp::Globally(_) => ctx.globally(&lifted[0]),
        PathOp::Until(..) => ctx.until(&lifted[0], &lifted[1]),
    };
    let initial = ext.assignment_states();
    let result = ext.project(&set.intersection(&initial));
    let stats = CoalitionStats {
        formula: String::new(),
        semantics,
        extended_states: ext.num_states(),
        reachable_states: ext.reachable_from(&initial).len(),
        fixpoint_iterations: iterations,
        fallback_states: ctx.fallback_states(),
    };
    Ok((result, stats))
}

/// Runs the symbolic algorithm on every subformula of `f`.
pub fn check(model: &GameStructure, f: &Formula, semantics: Semantics) -> Result<CheckReport> {
    let diags = model.validate();
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags));
    }
    ensure_well_formed(model, f)?;
    let n = model.num_states();
    let mut memo: HashMap<&Formula, StateSet> = HashMap::new();
    let mut per_subformula = Vec::new();
    let mut coalitions = Vec::new();
    for sub in f.subformulas() {
        let set = match sub {
            Formula::True => StateSet::full(n),
            Formula::False => StateSet::empty(n),
            Formula::Atom(p) => StateSet::from_predicate(n, |q| model.holds(StateId(q), *p)),
            Formula::Not(g) => memo[&**g].complement(),
            Formula::Or(a, b) => memo[&**a].union(&memo[&**b]),
            // `f & g` as `!(!f | !g)`.
            Formula::And(a, b) => memo[&**a]
                .complement()
                .union(&memo[&**b].complement())
                .complement(),
            Formula::Coalition(c) => {
                let operands: Vec<StateSet> = c.path.operands().into_iter().map(|o| memo[o].clone()).collect();
                let (set, mut stats) = check_coalition(model, c, &operands, semantics)?;
                stats.formula = sub.display(model).to_string();
                coalitions.push(stats);
                set
            }
        };
        per_subformula.push(SubformulaResult {
            formula: sub.display(model).to_string(),
            satisfying: set.clone(),
        });
        memo.insert(sub, set);
    }
    Ok(CheckReport {
        formula: f.display(model).to_string(),
        semantics,
        satisfying: memo[f].clone(),
        per_subformula,
        coalitions,
    })
}
