//! Formulas with BDI-restricted coalition modalities.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::assignment::{CapabilityAssignment, GoalAssignment};
use crate::ids::{AgentId, PropId};
use crate::structure::GameStructure;

/// A state formula.
///
/// `And` is kept in the tree for faithful printing; the checker evaluates it
/// as `!(!f | !g)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(PropId),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Coalition(Box<Coalition>),
}

/// `<<A>>_{ω,ϱ} path`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    pub agents: BTreeSet<AgentId>,
    pub capabilities: CapabilityAssignment,
    pub goals: GoalAssignment,
    pub path: PathOp,
}

/// Path operators; they only ever occur directly under a coalition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathOp {
    Next(Formula),
    Globally(Formula),
    Until(Formula, Formula),
}

impl PathOp {
    /// `F φ`, which is `true U φ`.
    pub fn eventually(f: Formula) -> PathOp {
        PathOp::Until(Formula::True, f)
    }

    pub fn operands(&self) -> Vec<&Formula> {
        match self {
            PathOp::Next(f) | PathOp::Globally(f) => vec![f],
            PathOp::Until(a, b) => vec![a, b],
        }
    }
}

/// A node whose capability and goal assignments range over different agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentMismatch {
    pub capability_agents: BTreeSet<AgentId>,
    pub goal_agents: BTreeSet<AgentId>,
}

impl Formula {
    pub fn atom(p: PropId) -> Formula {
        Formula::Atom(p)
    }

    pub fn negate(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn coalition(c: Coalition) -> Formula {
        Formula::Coalition(Box::new(c))
    }

    /// Immediate state subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(f) => vec![f],
            Formula::Or(a, b) | Formula::And(a, b) => vec![a, b],
            Formula::Coalition(c) => c.path.operands(),
        }
    }

    /// Every coalition node violating `A_ω = A_ϱ`. Empty iff well formed.
    pub fn well_formed(&self) -> Vec<AssignmentMismatch> {
        let mut out = Vec::new();
        for f in self.subformulas() {
            if let Formula::Coalition(c) = f {
                let capability_agents = c.capabilities.agents();
                let goal_agents = c.goals.agents();
                if capability_agents != goal_agents {
                    out.push(AssignmentMismatch {
                        capability_agents,
                        goal_agents,
                    });
                }
            }
        }
        out
    }

    /// Distinct state subformulas, children before parents; the last entry is
    /// `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        fn visit<'a>(f: &'a Formula, seen: &mut HashSet<&'a Formula>, out: &mut Vec<&'a Formula>) {
            if seen.contains(f) {
                return;
            }
            for c in f.children() {
                visit(c, seen, out);
            }
            seen.insert(f);
            out.push(f);
        }
        let mut out = Vec::new();
        visit(self, &mut HashSet::new(), &mut out);
        out
    }

    /// Renders in the concrete syntax accepted by [`crate::parser::parse_formula`].
    pub fn display<'a>(&'a self, model: &'a GameStructure) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, model }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            _ => 2,
        }
    }
}

struct FormulaDisplay<'a> {
    f: &'a Formula,
    model: &'a GameStructure,
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f {
            Formula::True => out.write_str("true"),
            Formula::False => out.write_str("false"),
            Formula::Atom(p) => out.write_str(&self.model.props()[p.0]),
            Formula::Not(g) => {
                out.write_str("!")?;
                self.operand(g, 2, out)
            }
            Formula::And(a, b) => {
                self.operand(a, 1, out)?;
                out.write_str(" & ")?;
                self.operand(b, 2, out)
            }
            Formula::Or(a, b) => {
                self.operand(a, 0, out)?;
                out.write_str(" | ")?;
                self.operand(b, 1, out)
            }
            Formula::Coalition(c) => self.coalition(c, out),
        }
    }

    fn operand(&self, f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if f.precedence() < min {
            out.write_str("(")?;
            self.write(f, out)?;
            out.write_str(")")
        } else {
            self.write(f, out)
        }
    }

    fn coalition(&self, c: &Coalition, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.model;
        let names: Vec<&str> = c.agents.iter().map(|&a| m.agent_name(a)).collect();
        write!(out, "<<{}>>[", names.join(", "))?;
        let mut agents = c.capabilities.agents();
        agents.extend(c.goals.agents());
        let mut first = true;
        for agent in agents {
            if !first {
                out.write_str(", ")?;
            }
            first = false;
            write!(out, "{}: ", m.agent_name(agent))?;
            let mut parts = Vec::new();
            if let Some(caps) = c.capabilities.get(agent) {
                let caps: Vec<&str> = caps.iter().map(String::as_str).collect();
                parts.push(format!("caps={{{}}}", caps.join(", ")));
            }
            if let Some(base) = c.goals.get(agent) {
                let goals: Vec<String> = base
                    .goals()
                    .iter()
                    .map(|g| g.display(m.props()).to_string())
                    .collect();
                parts.push(format!("goals={{{}}}", goals.join(", ")));
                if let Some(order) = base.priority() {
                    let pairs: Vec<String> = order
                        .pairs()
                        .into_iter()
                        .map(|(hi, lo)| {
                            format!(
                                "{} > {}",
                                base.goals()[hi].display(m.props()),
                                base.goals()[lo].display(m.props())
                            )
                        })
                        .collect();
                    parts.push(format!("prio=[{}]", pairs.join(", ")));
                }
            }
            out.write_str(&parts.join("; "))?;
        }
        out.write_str("] ")?;
        match &c.path {
            PathOp::Next(f) => {
                out.write_str("X ")?;
                self.operand(f, 2, out)
            }
            PathOp::Globally(f) => {
                out.write_str("G ")?;
                self.operand(f, 2, out)
            }
            PathOp::Until(a, b) => {
                out.write_str("(")?;
                self.write(a, out)?;
                out.write_str(" U ")?;
                self.write(b, out)?;
                out.write_str(")")
            }
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.f, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::GoalBase;
    use crate::expr::BoolExpr;

    fn p(i: usize) -> Formula {
        Formula::Atom(PropId(i))
    }

    #[test]
    fn subformulas_of_atom_and_disjunction() {
        assert_eq!(p(0).subformulas(), vec![&p(0)]);
        let f = p(0).negate().or(p(1));
        let subs = f.subformulas();
        assert_eq!(subs.len(), 4);
        assert_eq!(*subs[3], f);
        assert!(subs.contains(&&p(0).negate()));
    }

    #[test]
    fn subformulas_dedup_shared_children() {
        let f = p(0).or(p(0));
        assert_eq!(f.subformulas().len(), 2);
    }

    fn coalition(caps: &[usize], goals: &[usize], path: PathOp) -> Coalition {
        let mut c = CapabilityAssignment::default();
        for &a in caps {
            c.insert(AgentId(a), Vec::<String>::new());
        }
        let mut g = GoalAssignment::default();
        for &a in goals {
            g.insert(AgentId(a), GoalBase::new([BoolExpr::Atom(PropId(0))]).unwrap());
        }
        Coalition {
            agents: BTreeSet::new(),
            capabilities: c,
            goals: g,
            path,
        }
    }

    #[test]
    fn well_formedness() {
        let ok = Formula::coalition(coalition(&[0], &[0], PathOp::Next(p(0))));
        assert!(ok.well_formed().is_empty());
        let bad = Formula::coalition(coalition(&[], &[1], PathOp::Next(p(0))));
        assert_eq!(bad.well_formed().len(), 1);
        let nested = Formula::coalition(coalition(&[0], &[0], PathOp::Globally(ok.clone())));
        assert!(nested.well_formed().is_empty());
        let nested_bad = Formula::coalition(coalition(&[0], &[0], PathOp::Globally(bad)));
        assert_eq!(nested_bad.well_formed().len(), 1);
    }
}
