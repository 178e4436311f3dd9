//! Concurrent game structures with plan-library capabilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::assignment::CapabilityAssignment;
use crate::error::{Error, Result};
use crate::expr::BoolExpr;
use crate::ids::{ActionId, AgentId, PropId, StateId, NOOP, NOOP_NAME};

/// One action per agent, in declared agent order.
pub type JointMove = Vec<ActionId>;

/// A single-action plan rule `context [action] effect`: executing `action` is
/// a reasonable step towards `effect` whenever `context` is believed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanRule {
    pub context: BoolExpr,
    pub action: ActionId,
    pub effect: BoolExpr,
}

impl PlanRule {
    pub fn new(context: BoolExpr, action: ActionId, effect: BoolExpr) -> Self {
        PlanRule {
            context: context.canonical(),
            action,
            effect: effect.canonical(),
        }
    }

    pub fn display<'a>(&'a self, model: &'a GameStructure) -> impl fmt::Display + 'a {
        PlanDisplay { plan: self, model }
    }
}

struct PlanDisplay<'a> {
    plan: &'a PlanRule,
    model: &'a GameStructure,
}

impl fmt::Display for PlanDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) [{}] ({})",
            self.plan.context.display(self.model.props()),
            self.model.action_name(self.plan.action),
            self.plan.effect.display(self.model.props())
        )
    }
}

/// A finite set of plan rules, kept sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PlanLibrary {
    plans: Vec<PlanRule>,
}

impl PlanLibrary {
    pub fn new(plans: impl IntoIterator<Item = PlanRule>) -> Self {
        let set: BTreeSet<PlanRule> = plans.into_iter().collect();
        PlanLibrary {
            plans: set.into_iter().collect(),
        }
    }

    pub fn plans(&self) -> &[PlanRule] {
        &self.plans
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PlanRule> {
        self.plans.iter()
    }

    pub fn union(&self, other: &PlanLibrary) -> PlanLibrary {
        PlanLibrary::new(self.plans.iter().chain(other.plans.iter()).cloned())
    }
}

/// A violated structural invariant, reported by [`GameStructure::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    NoAgents,
    NoStates,
    NoOpUnavailable { state: String, agent: String },
    UndeclaredAction { state: String, agent: String, action: usize },
    NoOpLoopBroken { state: String, target: String },
    MissingTransition { state: String, joint: String },
    IllegalJointMove { state: String, joint: String },
    TargetOutOfRange { state: String, joint: String, target: usize },
    PlanUsesNoOp { capability: String },
    PlanUndeclaredAction { capability: String, action: usize },
    PlanUndeclaredAtom { capability: String, atom: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoAgents => write!(f, "at least one agent required"),
            Diagnostic::NoStates => write!(f, "at least one state required"),
            Diagnostic::NoOpUnavailable { state, agent } => write!(
                f,
                "{NOOP_NAME} must be available to every agent in every state, but not to `{agent}` in `{state}`"
            ),
            Diagnostic::UndeclaredAction { state, agent, action } => write!(
                f,
                "availability of `{agent}` in `{state}` lists undeclared action #{action}"
            ),
            Diagnostic::NoOpLoopBroken { state, target } => write!(
                f,
                "the all-{NOOP_NAME} move from `{state}` must stay in `{state}`, not go to `{target}`"
            ),
            Diagnostic::MissingTransition { state, joint } => write!(
                f,
                "transition function is not total: no successor for `{state}` on {joint}"
            ),
            Diagnostic::IllegalJointMove { state, joint } => write!(
                f,
                "transition from `{state}` on {joint}, which is not a legal joint move there"
            ),
            Diagnostic::TargetOutOfRange { state, joint, target } => write!(
                f,
                "transition from `{state}` on {joint} leads to undeclared state #{target}"
            ),
            Diagnostic::PlanUsesNoOp { capability } => write!(
                f,
                "capability `{capability}` has a plan whose action is the reserved {NOOP_NAME}"
            ),
            Diagnostic::PlanUndeclaredAction { capability, action } => write!(
                f,
                "capability `{capability}` has a plan with undeclared action #{action}"
            ),
            Diagnostic::PlanUndeclaredAtom { capability, atom } => write!(
                f,
                "capability `{capability}` has a plan mentioning undeclared proposition #{atom}"
            ),
        }
    }
}

/// A concurrent game structure `<A, Q, P, Act, d, V, σ, Θ>`.
///
/// Construct through [`GameStructureBuilder`]. The structure itself does not
/// enforce its invariants; [`GameStructure::validate`] reports every violation,
/// and the loaders refuse structures that have any.
#[derive(Debug, Clone)]
pub struct GameStructure {
    agents: Vec<String>,
    props: Vec<String>,
    actions: Vec<String>,
    states: Vec<String>,
    valuation: Vec<Vec<bool>>,
    avail: Vec<Vec<Vec<ActionId>>>,
    transitions: Vec<BTreeMap<JointMove, StateId>>,
    capabilities: BTreeMap<String, PlanLibrary>,
}

impl GameStructure {
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name).map(AgentId)
    }

    pub fn agent_name(&self, agent: AgentId) -> &str {
        &self.agents[agent.0]
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.props.iter().position(|p| p == name).map(PropId)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(ActionId)
    }

    pub fn action_name(&self, action: ActionId) -> &str {
        self.actions.get(action.0).map(String::as_str).unwrap_or("?")
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn state_name(&self, state: StateId) -> &str {
        &self.states[state.0]
    }

    pub fn holds(&self, state: StateId, prop: PropId) -> bool {
        self.valuation[state.0][prop.0]
    }

    /// `V(q)` as a sorted list.
    pub fn label(&self, state: StateId) -> Vec<PropId> {
        (0..self.props.len())
            .map(PropId)
            .filter(|&p| self.holds(state, p))
            .collect()
    }

    /// Truth of `e` at `state`, where an atom is true iff it is in `V(state)`.
    pub fn eval_state(&self, e: &BoolExpr, state: StateId) -> Result<bool> {
        if let Some(p) = e.atoms().into_iter().find(|p| p.0 >= self.props.len()) {
            return Err(Error::Unknown {
                kind: "proposition",
                name: format!("#{}", p.0),
            });
        }
        Ok(self.eval_unchecked(e, state))
    }

    pub(crate) fn eval_unchecked(&self, e: &BoolExpr, state: StateId) -> bool {
        let row = &self.valuation[state.0];
        e.eval(&|p: PropId| row[p.0])
    }

    /// `d(agent, state)`, sorted by action id.
    pub fn available(&self, agent: AgentId, state: StateId) -> &[ActionId] {
        &self.avail[state.0][agent.0]
    }

    pub fn transition(&self, state: StateId, joint: &[ActionId]) -> Option<StateId> {
        self.transitions[state.0].get(joint).copied()
    }

    pub fn transitions(&self, state: StateId) -> &BTreeMap<JointMove, StateId> {
        &self.transitions[state.0]
    }

    /// `D(q)`: the cartesian product of every agent's availability, in
    /// declared agent order. The position of a move in this list is its dense
    /// index as computed by [`GameStructure::joint_move_index`].
    pub fn joint_moves(&self, state: StateId) -> Vec<JointMove> {
        let sets = &self.avail[state.0];
        let mut out = vec![Vec::with_capacity(sets.len())];
        for set in sets {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    set.iter().map(move |&a| {
                        let mut m = prefix.clone();
                        m.push(a);
                        m
                    })
                })
                .collect();
        }
        out
    }

    /// `|D(q)|`.
    pub fn joint_move_count(&self, state: StateId) -> usize {
        self.avail[state.0].iter().map(Vec::len).product()
    }

    /// Mixed-radix strides turning per-agent positions in `d(agent, state)`
    /// into the dense index of the joint move.
    pub fn joint_move_strides(&self, state: StateId) -> Vec<usize> {
        let sets = &self.avail[state.0];
        let mut strides = vec![1; sets.len()];
        for i in (0..sets.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sets[i + 1].len();
        }
        strides
    }

    pub fn joint_move_index(&self, state: StateId, joint: &[ActionId]) -> Option<usize> {
        let sets = &self.avail[state.0];
        if joint.len() != sets.len() {
            return None;
        }
        let strides = self.joint_move_strides(state);
        let mut index = 0;
        for ((set, a), stride) in sets.iter().zip(joint).zip(strides) {
            index += set.binary_search(a).ok()? * stride;
        }
        Some(index)
    }

    pub fn capabilities(&self) -> &BTreeMap<String, PlanLibrary> {
        &self.capabilities
    }

    pub fn capability(&self, name: &str) -> Option<&PlanLibrary> {
        self.capabilities.get(name)
    }

    /// `Π = ∪_{c ∈ ω[agent]} Θ(c)`.
    pub fn plans_of(&self, agent: AgentId, caps: &CapabilityAssignment) -> Result<PlanLibrary> {
        let names = caps
            .get(agent)
            .ok_or_else(|| Error::NotBdiAgent(self.agent_name(agent).to_string()))?;
        let mut plans = Vec::new();
        for name in names {
            let lib = self.capability(name).ok_or_else(|| Error::Unknown {
                kind: "capability",
                name: name.clone(),
            })?;
            plans.extend(lib.iter().cloned());
        }
        Ok(PlanLibrary::new(plans))
    }

    pub fn render_joint(&self, joint: &[ActionId]) -> String {
        let parts: Vec<String> = joint
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let agent = self.agents.get(i).map(String::as_str).unwrap_or("?");
                format!("{agent}={}", self.action_name(a))
            })
            .collect();
        format!("<{}>", parts.join(", "))
    }

    /// Every violated structural invariant. Empty iff the structure is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        if self.agents.is_empty() {
            diags.push(Diagnostic::NoAgents);
        }
        if self.states.is_empty() {
            diags.push(Diagnostic::NoStates);
        }
        for q in self.state_ids() {
            let qname = self.state_name(q).to_string();
            let mut avail_ok = true;
            for agent in self.agent_ids() {
                let set = self.available(agent, q);
                if !set.contains(&NOOP) {
                    diags.push(Diagnostic::NoOpUnavailable {
                        state: qname.clone(),
                        agent: self.agent_name(agent).to_string(),
                    });
                }
                for a in set.iter().filter(|a| a.0 >= self.actions.len()) {
                    avail_ok = false;
                    diags.push(Diagnostic::UndeclaredAction {
                        state: qname.clone(),
                        agent: self.agent_name(agent).to_string(),
                        action: a.0,
                    });
                }
            }
            for (joint, &target) in &self.transitions[q.0] {
                if self.joint_move_index(q, joint).is_none() {
                    diags.push(Diagnostic::IllegalJointMove {
                        state: qname.clone(),
                        joint: self.render_joint(joint),
                    });
                }
                if target.0 >= self.states.len() {
                    diags.push(Diagnostic::TargetOutOfRange {
                        state: qname.clone(),
                        joint: self.render_joint(joint),
                        target: target.0,
                    });
                }
            }
            if !avail_ok {
                continue;
            }
            for joint in self.joint_moves(q) {
                if !self.transitions[q.0].contains_key(&joint) {
                    diags.push(Diagnostic::MissingTransition {
                        state: qname.clone(),
                        joint: self.render_joint(&joint),
                    });
                }
            }
            let idle = vec![NOOP; self.agents.len()];
            if let Some(&target) = self.transitions[q.0].get(&idle) {
                if target != q {
                    diags.push(Diagnostic::NoOpLoopBroken {
                        state: qname.clone(),
                        target: self
                            .states
                            .get(target.0)
                            .cloned()
                            .unwrap_or_else(|| format!("#{}", target.0)),
                    });
                }
            }
        }
        for (name, lib) in &self.capabilities {
            for plan in lib.iter() {
                if plan.action == NOOP {
                    diags.push(Diagnostic::PlanUsesNoOp {
                        capability: name.clone(),
                    });
                } else if plan.action.0 >= self.actions.len() {
                    diags.push(Diagnostic::PlanUndeclaredAction {
                        capability: name.clone(),
                        action: plan.action.0,
                    });
                }
                let mut atoms = plan.context.atoms();
                atoms.extend(plan.effect.atoms());
                for p in atoms.into_iter().filter(|p| p.0 >= self.props.len()) {
                    diags.push(Diagnostic::PlanUndeclaredAtom {
                        capability: name.clone(),
                        atom: p.0,
                    });
                }
            }
        }
        diags
    }
}

/// Incremental construction of a [`GameStructure`].
#[derive(Debug, Clone)]
pub struct GameStructureBuilder {
    model: GameStructure,
}

impl Default for GameStructureBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GameStructureBuilder {
    pub fn new() -> Self {
        GameStructureBuilder {
            model: GameStructure {
                agents: Vec::new(),
                props: Vec::new(),
                actions: vec![NOOP_NAME.to_string()],
                states: Vec::new(),
                valuation: Vec::new(),
                avail: Vec::new(),
                transitions: Vec::new(),
                capabilities: BTreeMap::new(),
            },
        }
    }

    /// Read access to everything declared so far.
    pub fn model(&self) -> &GameStructure {
        &self.model
    }

    /// Declares an agent (idempotent). Agents must be declared before states.
    pub fn agent(&mut self, name: &str) -> AgentId {
        if let Some(id) = self.model.agent_id(name) {
            return id;
        }
        assert!(self.model.states.is_empty(), "agents must be declared before states");
        self.model.agents.push(name.to_string());
        AgentId(self.model.agents.len() - 1)
    }

    /// Declares a proposition (idempotent).
    pub fn prop(&mut self, name: &str) -> PropId {
        if let Some(id) = self.model.prop_id(name) {
            return id;
        }
        self.model.props.push(name.to_string());
        for row in &mut self.model.valuation {
            row.push(false);
        }
        PropId(self.model.props.len() - 1)
    }

    /// Declares an action (idempotent); `noOp` is pre-declared.
    pub fn action(&mut self, name: &str) -> ActionId {
        if let Some(id) = self.model.action_id(name) {
            return id;
        }
        self.model.actions.push(name.to_string());
        ActionId(self.model.actions.len() - 1)
    }

    /// Declares a state with its valuation, or replaces the valuation of an
    /// existing state of that name.
    pub fn state(&mut self, name: &str, label: &[PropId]) -> StateId {
        let id = match self.model.state_id(name) {
            Some(id) => id,
            None => {
                self.model.states.push(name.to_string());
                self.model.valuation.push(vec![false; self.model.props.len()]);
                self.model
                    .avail
                    .push(vec![Vec::new(); self.model.agents.len()]);
                self.model.transitions.push(BTreeMap::new());
                StateId(self.model.states.len() - 1)
            }
        };
        let row = &mut self.model.valuation[id.0];
        row.iter_mut().for_each(|b| *b = false);
        for p in label {
            row[p.0] = true;
        }
        id
    }

    /// Sets `d(agent, state)` (sorted and deduplicated).
    pub fn avail(&mut self, state: StateId, agent: AgentId, actions: &[ActionId]) {
        let mut set = actions.to_vec();
        set.sort();
        set.dedup();
        self.model.avail[state.0][agent.0] = set;
    }

    /// Adds `σ(state, joint) = target`. Re-adding the same entry is harmless;
    /// a different target for the same move is an error.
    pub fn transition(&mut self, state: StateId, joint: JointMove, target: StateId) -> Result<()> {
        match self.model.transitions[state.0].get(&joint) {
            Some(&existing) if existing != target => Err(Error::ConflictingTransition {
                state: self.model.state_name(state).to_string(),
                joint: self.model.render_joint(&joint),
            }),
            _ => {
                self.model.transitions[state.0].insert(joint, target);
                Ok(())
            }
        }
    }

    /// Adds plans to a capability, creating it if needed.
    pub fn capability(&mut self, name: &str, plans: impl IntoIterator<Item = PlanRule>) {
        let lib = self.model.capabilities.entry(name.to_string()).or_default();
        *lib = lib.union(&PlanLibrary::new(plans));
    }

    /// Makes `noOp` available everywhere and adds the all-`noOp` self-loop
    /// wherever the all-`noOp` move has no transition yet.
    pub fn inject_noop(&mut self) {
        let idle = vec![NOOP; self.model.agents.len()];
        for q in 0..self.model.states.len() {
            for set in &mut self.model.avail[q] {
                if !set.contains(&NOOP) {
                    set.insert(0, NOOP);
                }
            }
            self.model.transitions[q]
                .entry(idle.clone())
                .or_insert(StateId(q));
        }
    }

    /// Completes `σ` by mapping every legal joint move without a transition to
    /// a self-loop.
    pub fn default_stay(&mut self) {
        for q in self.model.state_ids().collect::<Vec<_>>() {
            for joint in self.model.joint_moves(q) {
                self.model.transitions[q.0].entry(joint).or_insert(q);
            }
        }
    }

    pub fn build(self) -> GameStructure {
        self.model
    }
}
