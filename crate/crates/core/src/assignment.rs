//! Capability assignments `ω`, goal assignments `ϱ` and goal bases.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::CapacityError;
use crate::expr::BoolExpr;
use crate::ids::AgentId;

/// Upper bound on goals per agent; goal sets are stored as 32-bit masks.
pub const MAX_GOALS_PER_AGENT: usize = 32;

/// `ω`: a partial map from agents to capability names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CapabilityAssignment(BTreeMap<AgentId, BTreeSet<String>>);

impl CapabilityAssignment {
    pub fn insert<S: Into<String>>(&mut self, agent: AgentId, caps: impl IntoIterator<Item = S>) {
        self.0
            .insert(agent, caps.into_iter().map(Into::into).collect());
    }

    pub fn get(&self, agent: AgentId) -> Option<&BTreeSet<String>> {
        self.0.get(&agent)
    }

    /// `A_ω`.
    pub fn agents(&self) -> BTreeSet<AgentId> {
        self.0.keys().copied().collect()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.0.contains_key(&agent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentId, &BTreeSet<String>)> {
        self.0.iter().map(|(a, c)| (*a, c))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn remove(&mut self, agent: AgentId) {
        self.0.remove(&agent);
    }
}

/// A set of goals of one agent, as a bitmask over the indices of its goal base.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoalSet(pub u32);

impl GoalSet {
    pub const EMPTY: GoalSet = GoalSet(0);

    pub fn all(len: usize) -> GoalSet {
        if len >= 32 {
            GoalSet(u32::MAX)
        } else {
            GoalSet((1u32 << len) - 1)
        }
    }

    pub fn singleton(i: usize) -> GoalSet {
        GoalSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: GoalSet) -> GoalSet {
        GoalSet(self.0 | other.0)
    }

    pub fn intersection(self, other: GoalSet) -> GoalSet {
        GoalSet(self.0 & other.0)
    }

    pub fn minus(self, other: GoalSet) -> GoalSet {
        GoalSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: GoalSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Every subset of `self`, in increasing numeric order.
    pub fn subsets(self) -> Vec<GoalSet> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = 0u32;
        loop {
            out.push(GoalSet(sub));
            if sub == self.0 {
                break;
            }
            sub = (sub.wrapping_sub(self.0)) & self.0;
        }
        out.sort();
        out
    }
}

/// Strict priority over the goals of one goal base, closed transitively.
/// `prefers(a, b)` means goal `a` comes strictly before goal `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PriorityOrder {
    /// `before[b]`: goals strictly preferred over goal `b`.
    before: Vec<GoalSet>,
}

/// The priority pairs do not form a strict partial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityCycle {
    pub goal: usize,
}

impl PriorityOrder {
    /// The empty order over `len` goals.
    pub fn empty(len: usize) -> Self {
        PriorityOrder {
            before: vec![GoalSet::EMPTY; len],
        }
    }

    /// Builds the transitive closure of the `(preferred, other)` pairs.
    pub fn from_pairs(len: usize, pairs: &[(usize, usize)]) -> Result<Self, PriorityCycle> {
        let mut before = vec![GoalSet::EMPTY; len];
        for &(hi, lo) in pairs {
            before[lo] = before[lo].union(GoalSet::singleton(hi));
        }
        loop {
            let mut changed = false;
            for b in 0..len {
                let mut acc = before[b];
                for a in before[b].iter() {
                    acc = acc.union(before[a]);
                }
                if acc != before[b] {
                    before[b] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(goal) = (0..len).find(|&g| before[g].contains(g)) {
            return Err(PriorityCycle { goal });
        }
        Ok(PriorityOrder { before })
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.before[b].contains(a)
    }

    /// Goals strictly preferred over `goal`.
    pub fn preferred_over(&self, goal: usize) -> GoalSet {
        self.before[goal]
    }

    pub fn len(&self) -> usize {
        self.before.len()
    }

    pub fn is_empty(&self) -> bool {
        self.before.iter().all(|s| s.is_empty())
    }

    /// All `(preferred, other)` pairs of the closed order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (lo, set) in self.before.iter().enumerate() {
            for hi in set.iter() {
                out.push((hi, lo));
            }
        }
        out.sort();
        out
    }
}

/// A finite set of goal formulas, deduplicated by canonical form, with an
/// optional priority order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GoalBase {
    goals: Vec<BoolExpr>,
    priority: Option<PriorityOrder>,
}

impl GoalBase {
    pub fn new(goals: impl IntoIterator<Item = BoolExpr>) -> Result<Self, CapacityError> {
        let mut out: Vec<BoolExpr> = Vec::new();
        for g in goals {
            let g = g.canonical();
            if !out.contains(&g) {
                out.push(g);
            }
        }
        if out.len() > MAX_GOALS_PER_AGENT {
            return Err(CapacityError::GoalBase {
                goals: out.len(),
                limit: MAX_GOALS_PER_AGENT,
            });
        }
        Ok(GoalBase {
            goals: out,
            priority: None,
        })
    }

    pub fn with_priority(mut self, order: PriorityOrder) -> Self {
        assert_eq!(order.len(), self.goals.len(), "priority order over a different goal base");
        self.priority = Some(order);
        self
    }

    pub fn goals(&self) -> &[BoolExpr] {
        &self.goals
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn priority(&self) -> Option<&PriorityOrder> {
        self.priority.as_ref()
    }

    /// Index of the goal with the same canonical form as `goal`.
    pub fn position(&self, goal: &BoolExpr) -> Option<usize> {
        let c = goal.canonical();
        self.goals.iter().position(|g| *g == c)
    }

    pub fn all(&self) -> GoalSet {
        GoalSet::all(self.goals.len())
    }

    /// True iff every goal of `self` (by canonical form) is in `other`.
    pub fn is_subset(&self, other: &GoalBase) -> bool {
        self.goals.iter().all(|g| other.position(g).is_some())
    }
}

/// `ϱ`: a partial map from agents to goal bases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GoalAssignment(BTreeMap<AgentId, GoalBase>);

impl GoalAssignment {
    pub fn insert(&mut self, agent: AgentId, base: GoalBase) {
        self.0.insert(agent, base);
    }

    pub fn get(&self, agent: AgentId) -> Option<&GoalBase> {
        self.0.get(&agent)
    }

    /// `A_ϱ`, in declared agent order.
    pub fn agents(&self) -> BTreeSet<AgentId> {
        self.0.keys().copied().collect()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.0.contains_key(&agent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentId, &GoalBase)> {
        self.0.iter().map(|(a, g)| (*a, g))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn remove(&mut self, agent: AgentId) {
        self.0.remove(&agent);
    }
}

impl fmt::Display for GoalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.iter().collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::PropId;

    #[test]
    fn subsets_enumerates_powerset() {
        let s = GoalSet(0b101);
        assert_eq!(
            s.subsets(),
            vec![GoalSet(0), GoalSet(1), GoalSet(4), GoalSet(5)]
        );
        assert_eq!(GoalSet::EMPTY.subsets(), vec![GoalSet::EMPTY]);
    }

    #[test]
    fn priority_closure_and_cycles() {
        let order = PriorityOrder::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(order.prefers(0, 2));
        assert!(!order.prefers(2, 0));
        assert_eq!(order.pairs(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(
            PriorityOrder::from_pairs(2, &[(0, 1), (1, 0)]),
            Err(PriorityCycle { goal: 0 })
        );
        assert!(PriorityOrder::from_pairs(1, &[(0, 0)]).is_err());
    }

    #[test]
    fn goal_base_dedups_by_canonical_form() {
        let a = BoolExpr::Atom(PropId(0));
        let b = BoolExpr::Atom(PropId(1));
        let base = GoalBase::new([a.clone().and(b.clone()), b.and(a.clone()), a]).unwrap();
        assert_eq!(base.len(), 2);
    }

    #[test]
    fn goal_base_capacity() {
        let many = (0..33).map(|i| BoolExpr::Atom(PropId(i)));
        assert!(matches!(
            GoalBase::new(many),
            Err(CapacityError::GoalBase { goals: 33, .. })
        ));
    }
}
