//! Traces of a single agent over the base model, goal marking and trace
//! rationality.

use std::fmt;

use crate::assignment::{GoalBase, GoalSet};
use crate::checker::AgentRationality;
use crate::error::{Error, Result};
use crate::extension::{goals_true, Semantics};
use crate::ids::{ActionId, AgentId, StateId, NOOP};
use crate::structure::{GameStructure, PlanRule};

/// `q0 a1 q1 … aℓ qℓ`, where each `a` is the focal agent's action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    agent: AgentId,
    states: Vec<StateId>,
    actions: Vec<ActionId>,
}

impl Trace {
    /// Checks that every step is realized by some joint move in which the
    /// agent plays the recorded action.
    pub fn new(model: &GameStructure, agent: AgentId, states: Vec<StateId>, actions: Vec<ActionId>) -> Result<Self> {
        if states.len() != actions.len() + 1 {
            return Err(Error::InvalidTrace(format!(
                "{} states need {} actions, found {}",
                states.len(),
                states.len().saturating_sub(1),
                actions.len()
            )));
        }
        for (i, &a) in actions.iter().enumerate() {
            if !step_exists(model, agent, states[i], a, states[i + 1]) {
                return Err(Error::InvalidTrace(format!(
                    "no joint move from `{}` with {}={} reaches `{}` (step {i})",
                    model.state_name(states[i]),
                    model.agent_name(agent),
                    model.action_name(a),
                    model.state_name(states[i + 1])
                )));
            }
        }
        Ok(Trace { agent, states, actions })
    }

    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    /// Number of actions.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

fn step_exists(model: &GameStructure, agent: AgentId, from: StateId, action: ActionId, to: StateId) -> bool {
    model
        .transitions(from)
        .iter()
        .any(|(joint, &t)| t == to && joint[agent.0] == action && model.joint_move_index(from, joint).is_some())
}

/// `g(t, i)`: the active goals at position `i`.
pub fn goal_marking(model: &GameStructure, goals: &GoalBase, t: &Trace, i: usize, semantics: Semantics) -> Result<GoalSet> {
    if i > t.len() {
        return Err(Error::TraceIndex { index: i, len: t.len() });
    }
    Ok(match semantics {
        Semantics::Maintenance => goals.all().minus(goals_true(model, goals, t.states[i])),
        Semantics::Achievement | Semantics::Priority => t.states[..=i]
            .iter()
            .fold(goals.all(), |acc, &q| acc.minus(goals_true(model, goals, q))),
    })
}

/// `Exec`: indices `i` where the trace's next action is the plan's action
/// and the plan is applicable at position `i`.
pub fn exec_indices(
    model: &GameStructure,
    plan: &PlanRule,
    goals: &GoalBase,
    t: &Trace,
    semantics: Semantics,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..t.len() {
        if t.actions[i] != plan.action || !model.eval_state(&plan.context, t.states[i])? {
            continue;
        }
        let active = goal_marking(model, goals, t, i, semantics)?;
        let mut relevant = false;
        for g in active.iter() {
            if crate::expr::entails(&plan.effect, &goals.goals()[g])? {
                relevant = true;
                break;
            }
        }
        if relevant {
            out.push(i);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceViolation {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceVerdict {
    pub violation: Option<TraceViolation>,
}

impl TraceVerdict {
    pub fn is_rational(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for TraceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => f.write_str("rational"),
            Some(v) => write!(f, "irrational at index {}: {}", v.index, v.reason),
        }
    }
}

/// Checks every step of `t` against the plans selected by `rat` under the
/// goals active at that step. A step must play the action of an executable
/// selected plan, or `noOp` when there is none.
pub fn is_rational_trace(
    model: &GameStructure,
    rat: &AgentRationality,
    goals: &GoalBase,
    t: &Trace,
    semantics: Semantics,
) -> Result<TraceVerdict> {
    for i in 0..t.len() {
        let q = t.states[i];
        let active = goal_marking(model, goals, t, i, semantics)?;
        let allowed = rat.executable_actions(model, q, active, semantics);
        let taken = t.actions[i];
        let reason = if allowed.is_empty() {
            (taken != NOOP).then(|| {
                format!(
                    "no applicable plan but `{}` taken instead of noOp",
                    model.action_name(taken)
                )
            })
        } else if allowed.contains(&taken) {
            None
        } else if taken == NOOP {
            Some("applicable plan exists but noOp taken".to_string())
        } else {
            Some(format!(
                "`{}` is not the action of any applicable plan",
                model.action_name(taken)
            ))
        };
        if let Some(reason) = reason {
            return Ok(TraceVerdict {
                violation: Some(TraceViolation { index: i, reason }),
            });
        }
    }
    Ok(TraceVerdict { violation: None })
}

/// `GetTrace`: the trace of `agent` along `path` when it follows `f`, if
/// every step can be realized that way.
pub fn get_trace(
    model: &GameStructure,
    agent: AgentId,
    path: &[StateId],
    f: impl Fn(&[StateId]) -> ActionId,
) -> Option<Trace> {
    if path.is_empty() {
        return None;
    }
    let mut actions = Vec::with_capacity(path.len() - 1);
    for k in 0..path.len() - 1 {
        let a = f(&path[..=k]);
        if !step_exists(model, agent, path[k], a, path[k + 1]) {
            return None;
        }
        actions.push(a);
    }
    Some(Trace {
        agent,
        states: path.to_vec(),
        actions,
    })
}

/// Whether every trace induced by the history-based strategy `f` along paths
/// of length `horizon` from `start` is rational.
pub fn is_rational_history_strategy(
    model: &GameStructure,
    rat: &AgentRationality,
    goals: &GoalBase,
    f: &dyn Fn(&[StateId]) -> ActionId,
    start: StateId,
    horizon: usize,
    semantics: Semantics,
) -> Result<bool> {
    let mut stack = vec![vec![start]];
    while let Some(path) = stack.pop() {
        if path.len() == horizon + 1 {
            if let Some(t) = get_trace(model, rat.agent(), &path, f) {
                if !is_rational_trace(model, rat, goals, &t, semantics)?.is_rational() {
                    return Ok(false);
                }
            }
            continue;
        }
        let last = *path.last().unwrap();
        let mut next: Vec<StateId> = model.transitions(last).values().copied().collect();
        next.sort();
        next.dedup();
        for s in next {
            let mut p = path.clone();
            p.push(s);
            stack.push(p);
        }
    }
    Ok(true)
}
