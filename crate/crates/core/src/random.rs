//! Seeded generators of small models and coalition formulas.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::assignment::{CapabilityAssignment, GoalAssignment, GoalBase, PriorityOrder};
use crate::expr::BoolExpr;
use crate::formula::{Coalition, Formula, PathOp};
use crate::ids::{AgentId, PropId, StateId, NOOP};
use crate::structure::{GameStructure, GameStructureBuilder, PlanRule};

/// Size limits for [`random_model`].
#[derive(Debug, Clone, Copy)]
pub struct ModelShape {
    pub max_states: usize,
    pub agents: usize,
    pub max_actions: usize,
    pub props: usize,
    pub max_plans: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            max_states: 4,
            agents: 2,
            max_actions: 2,
            props: 3,
            max_plans: 4,
        }
    }
}

pub const CAPABILITY_NAMES: [&str; 2] = ["C1", "C2"];
pub const MAX_GOALS: usize = 2;

fn literal(rng: &mut impl Rng, props: usize) -> BoolExpr {
    let a = BoolExpr::Atom(PropId(rng.gen_range(0..props)));
    if rng.gen_bool(0.3) {
        a.negate()
    } else {
        a
    }
}

/// `true`, a literal, or a conjunction of two literals.
pub fn random_condition(rng: &mut impl Rng, props: usize) -> BoolExpr {
    match rng.gen_range(0..5) {
        0 => BoolExpr::True,
        1 => literal(rng, props).and(literal(rng, props)).canonical(),
        _ => literal(rng, props),
    }
}

/// A literal, occasionally a conjunction or disjunction of two.
pub fn random_goal(rng: &mut impl Rng, props: usize) -> BoolExpr {
    match rng.gen_range(0..6) {
        0 => literal(rng, props).and(literal(rng, props)).canonical(),
        1 => literal(rng, props).or(literal(rng, props)).canonical(),
        _ => literal(rng, props),
    }
}

/// A valid model within `shape`, with plans split over [`CAPABILITY_NAMES`].
pub fn random_model(rng: &mut impl Rng, shape: &ModelShape) -> GameStructure {
    let mut b = GameStructureBuilder::new();
    let agents: Vec<AgentId> = (0..shape.agents).map(|i| b.agent(&format!("a{i}"))).collect();
    let props: Vec<PropId> = ["p", "q", "r", "s", "t"][..shape.props].iter().map(|p| b.prop(p)).collect();
    let n_actions = rng.gen_range(1..=shape.max_actions);
    let actions: Vec<_> = ["x", "y", "z"][..n_actions].iter().map(|a| b.action(a)).collect();
    let n_states = rng.gen_range(1..=shape.max_states);
    let states: Vec<StateId> = (0..n_states)
        .map(|i| {
            let label: Vec<PropId> = props.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            b.state(&format!("s{i}"), &label)
        })
        .collect();
    for &q in &states {
        for &a in &agents {
            let mut avail = vec![NOOP];
            avail.extend(actions.iter().copied().filter(|_| rng.gen_bool(0.7)));
            b.avail(q, a, &avail);
        }
    }
    b.inject_noop();
    for &q in &states {
        for joint in b.model().joint_moves(q) {
            if joint.iter().all(|&a| a == NOOP) {
                continue;
            }
            let target = *states.choose(rng).unwrap();
            b.transition(q, joint, target).expect("fresh move");
        }
    }
    let n_plans = rng.gen_range(0..=shape.max_plans);
    for _ in 0..n_plans {
        let plan = PlanRule::new(
            random_condition(rng, shape.props),
            *actions.choose(rng).unwrap(),
            random_goal(rng, shape.props),
        );
        let cap = CAPABILITY_NAMES[rng.gen_range(0..CAPABILITY_NAMES.len())];
        b.capability(cap, [plan]);
    }
    for cap in CAPABILITY_NAMES {
        b.capability(cap, []);
    }
    let m = b.build();
    debug_assert!(m.validate().is_empty());
    m
}

/// A goal base of up to [`MAX_GOALS`] goals with a random priority order.
pub fn random_goal_base(rng: &mut impl Rng, props: usize) -> GoalBase {
    let n = rng.gen_range(1..=MAX_GOALS);
    let base = GoalBase::new((0..n).map(|_| random_goal(rng, props))).expect("small goal base");
    with_random_priority(rng, base)
}

fn with_random_priority(rng: &mut impl Rng, base: GoalBase) -> GoalBase {
    let mut order: Vec<usize> = (0..base.len()).collect();
    order.shuffle(rng);
    let pairs: Vec<(usize, usize)> = order
        .windows(2)
        .filter(|_| rng.gen_bool(0.6))
        .map(|w| (w[0], w[1]))
        .collect();
    let prio = PriorityOrder::from_pairs(base.len(), &pairs).expect("a chain is acyclic");
    base.with_priority(prio)
}

fn random_caps(rng: &mut impl Rng) -> BTreeSet<String> {
    CAPABILITY_NAMES
        .iter()
        .filter(|_| rng.gen_bool(0.6))
        .map(|s| s.to_string())
        .collect()
}

/// `p`, `!p` or `true` over the model's propositions.
fn random_operand(rng: &mut impl Rng, props: usize) -> Formula {
    if rng.gen_bool(0.1) {
        return Formula::True;
    }
    let a = Formula::Atom(PropId(rng.gen_range(0..props)));
    if rng.gen_bool(0.3) {
        a.negate()
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Next,
    Globally,
    Until,
}

pub const PATH_KINDS: [PathKind; 3] = [PathKind::Next, PathKind::Globally, PathKind::Until];

pub fn random_path(rng: &mut impl Rng, props: usize, kind: PathKind) -> PathOp {
    match kind {
        PathKind::Next => PathOp::Next(random_operand(rng, props)),
        PathKind::Globally => PathOp::Globally(random_operand(rng, props)),
        PathKind::Until => PathOp::Until(random_operand(rng, props), random_operand(rng, props)),
    }
}

/// A coalition formula with random `A`, `A_ω = A_ϱ` and assignments. Every
/// goal base carries a priority order so the formula works in all modes.
pub fn random_coalition(rng: &mut impl Rng, model: &GameStructure, kind: PathKind) -> Coalition {
    let props = model.props().len();
    let agents: BTreeSet<AgentId> = model.agent_ids().filter(|_| rng.gen_bool(0.5)).collect();
    let mut caps = CapabilityAssignment::default();
    let mut goals = GoalAssignment::default();
    for a in model.agent_ids() {
        if rng.gen_bool(0.6) {
            caps.insert(a, random_caps(rng));
            goals.insert(a, random_goal_base(rng, props));
        }
    }
    Coalition {
        agents,
        capabilities: caps,
        goals,
        path: random_path(rng, props, kind),
    }
}

/// A coalition with no assignments.
pub fn random_plain_coalition(rng: &mut impl Rng, model: &GameStructure, kind: PathKind) -> Coalition {
    Coalition {
        agents: model.agent_ids().filter(|_| rng.gen_bool(0.5)).collect(),
        capabilities: CapabilityAssignment::default(),
        goals: GoalAssignment::default(),
        path: random_path(rng, model.props().len(), kind),
    }
}

fn superset_caps(rng: &mut impl Rng, caps: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = caps.clone();
    out.extend(random_caps(rng));
    out
}

fn subset_caps(rng: &mut impl Rng, caps: &BTreeSet<String>) -> BTreeSet<String> {
    caps.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect()
}

fn superset_goals(rng: &mut impl Rng, base: &GoalBase, props: usize) -> GoalBase {
    let mut goals = base.goals().to_vec();
    if rng.gen_bool(0.5) {
        goals.push(random_goal(rng, props));
    }
    with_random_priority(rng, GoalBase::new(goals).expect("small goal base"))
}

fn subset_goals(rng: &mut impl Rng, base: &GoalBase) -> GoalBase {
    let goals: Vec<BoolExpr> = base.goals().iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
    with_random_priority(rng, GoalBase::new(goals).expect("small goal base"))
}

/// Whether `(weak, strong)` meets the four side conditions of the
/// monotonicity property, read literally.
pub fn monotonicity_conditions(weak: &Coalition, strong: &Coalition) -> bool {
    let a = &weak.agents;
    let a2 = &strong.agents;
    let bdi = weak.capabilities.agents();
    let bdi2 = strong.capabilities.agents();
    let grows = |agt: AgentId| match (
        weak.capabilities.get(agt),
        strong.capabilities.get(agt),
        weak.goals.get(agt),
        strong.goals.get(agt),
    ) {
        (Some(c), Some(c2), Some(g), Some(g2)) => c.is_subset(c2) && g.is_subset(g2),
        _ => false,
    };
    let shrinks = |agt: AgentId| match (
        weak.capabilities.get(agt),
        strong.capabilities.get(agt),
        weak.goals.get(agt),
        strong.goals.get(agt),
    ) {
        (Some(c), Some(c2), Some(g), Some(g2)) => c2.is_subset(c) && g2.is_subset(g),
        _ => false,
    };
    let outside: BTreeSet<AgentId> = bdi.difference(a).copied().collect();
    let outside2: BTreeSet<AgentId> = bdi2.difference(a2).copied().collect();
    a.is_subset(a2)
        && bdi.intersection(a).all(|&x| grows(x))
        && outside.is_subset(&outside2)
        && outside.iter().all(|&x| shrinks(x))
}

/// A coalition and a strengthening of it meeting the monotonicity side
/// conditions: the coalition may grow, its BDI members gain capabilities and
/// goals, BDI agents outside keep or lose them, and agents that were not BDI
/// may become BDI.
pub fn random_monotone_pair(rng: &mut impl Rng, model: &GameStructure, kind: PathKind) -> (Coalition, Coalition) {
    let props = model.props().len();
    let weak = random_coalition(rng, model, kind);
    let mut agents = weak.agents.clone();
    for a in model.agent_ids() {
        if !weak.capabilities.contains(a) && rng.gen_bool(0.3) {
            agents.insert(a);
        }
    }
    let mut caps = CapabilityAssignment::default();
    let mut goals = GoalAssignment::default();
    for a in model.agent_ids() {
        match (weak.capabilities.get(a), weak.goals.get(a)) {
            (Some(c), Some(g)) if weak.agents.contains(&a) => {
                caps.insert(a, superset_caps(rng, c));
                goals.insert(a, superset_goals(rng, g, props));
            }
            (Some(c), Some(g)) => {
                caps.insert(a, subset_caps(rng, c));
                goals.insert(a, subset_goals(rng, g));
            }
            _ => {
                if rng.gen_bool(0.3) {
                    caps.insert(a, random_caps(rng));
                    goals.insert(a, random_goal_base(rng, props));
                }
            }
        }
    }
    let strong = Coalition {
        agents,
        capabilities: caps,
        goals,
        path: weak.path.clone(),
    };
    debug_assert!(monotonicity_conditions(&weak, &strong));
    (weak, strong)
}
