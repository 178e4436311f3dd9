//! Propositional formulas over the propositions of a structure.
//!
//! These express plan contexts, plan effects and goals. Evaluation is against
//! a total valuation; entailment is decided by enumerating every valuation of
//! the atoms mentioned on either side.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::CapacityError;
use crate::ids::PropId;

/// Largest number of distinct atoms [`entails`] will enumerate over.
pub const ENTAILMENT_ATOM_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoolExpr {
    True,
    False,
    Atom(PropId),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    pub fn atom(p: PropId) -> Self {
        BoolExpr::Atom(p)
    }

    pub fn negate(self) -> Self {
        BoolExpr::Not(Box::new(self))
    }

    pub fn and(self, other: BoolExpr) -> Self {
        BoolExpr::And(vec![self, other])
    }

    pub fn or(self, other: BoolExpr) -> Self {
        BoolExpr::Or(vec![self, other])
    }

    /// Truth under the valuation `holds`.
    pub fn eval(&self, holds: &impl Fn(PropId) -> bool) -> bool {
        match self {
            BoolExpr::True => true,
            BoolExpr::False => false,
            BoolExpr::Atom(p) => holds(*p),
            BoolExpr::Not(e) => !e.eval(holds),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(holds)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(holds)),
        }
    }

    /// Every atom occurring in the expression.
    pub fn atoms(&self) -> BTreeSet<PropId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<PropId>) {
        match self {
            BoolExpr::True | BoolExpr::False => {}
            BoolExpr::Atom(p) => {
                out.insert(*p);
            }
            BoolExpr::Not(e) => e.collect_atoms(out),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| e.collect_atoms(out)),
        }
    }

    /// Canonical structural form: nested conjunctions and disjunctions are
    /// flattened, their operands sorted and deduplicated, and one-element or
    /// empty connectives collapsed. Two goals are "the same goal" iff their
    /// canonical forms are equal.
    pub fn canonical(&self) -> BoolExpr {
        match self {
            BoolExpr::True | BoolExpr::False | BoolExpr::Atom(_) => self.clone(),
            BoolExpr::Not(e) => BoolExpr::Not(Box::new(e.canonical())),
            BoolExpr::And(es) => Self::canonical_nary(es, true),
            BoolExpr::Or(es) => Self::canonical_nary(es, false),
        }
    }

    fn canonical_nary(operands: &[BoolExpr], conjunction: bool) -> BoolExpr {
        let mut flat = Vec::new();
        for e in operands {
            match (e.canonical(), conjunction) {
                (BoolExpr::And(inner), true) | (BoolExpr::Or(inner), false) => flat.extend(inner),
                (c, _) => flat.push(c),
            }
        }
        flat.sort();
        flat.dedup();
        match (flat.len(), conjunction) {
            (0, true) => BoolExpr::True,
            (0, false) => BoolExpr::False,
            (1, _) => flat.pop().unwrap(),
            (_, true) => BoolExpr::And(flat),
            (_, false) => BoolExpr::Or(flat),
        }
    }

    /// Renders the expression in the textual syntax accepted by the parsers.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ExprDisplay { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(_) => 0,
            BoolExpr::And(_) => 1,
            _ => 2,
        }
    }
}

/// `lhs ⊨ rhs`: every valuation of the jointly mentioned atoms that satisfies
/// `lhs` also satisfies `rhs`.
pub fn entails(lhs: &BoolExpr, rhs: &BoolExpr) -> Result<bool, CapacityError> {
    let mut atoms = lhs.atoms();
    atoms.extend(rhs.atoms());
    if atoms.len() > ENTAILMENT_ATOM_LIMIT {
        return Err(CapacityError::EntailmentAtoms {
            atoms: atoms.len(),
            limit: ENTAILMENT_ATOM_LIMIT,
        });
    }
    let atoms: Vec<PropId> = atoms.into_iter().collect();
    for mask in 0u32..(1u32 << atoms.len()) {
        let holds = |p: PropId| {
            let bit = atoms.binary_search(&p).expect("atom collected above");
            mask & (1 << bit) != 0
        };
        if lhs.eval(&holds) && !rhs.eval(&holds) {
            return Ok(false);
        }
    }
    Ok(true)
}

struct ExprDisplay<'a> {
    expr: &'a BoolExpr,
    names: &'a [String],
}

impl ExprDisplay<'_> {
    fn write(&self, e: &BoolExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e {
            BoolExpr::True => f.write_str("true"),
            BoolExpr::False => f.write_str("false"),
            BoolExpr::Atom(p) => match self.names.get(p.0) {
                Some(name) => f.write_str(name),
                None => write!(f, "#{}", p.0),
            },
            BoolExpr::Not(inner) => {
                f.write_str("!")?;
                self.write_operand(inner, 2, f)
            }
            BoolExpr::And(es) => self.write_nary(es, " & ", 1, f),
            BoolExpr::Or(es) => self.write_nary(es, " | ", 0, f),
        }
    }

    fn write_nary(&self, es: &[BoolExpr], sep: &str, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in es.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            // Same-level children get parentheses so the n-ary grouping survives a re-parse.
            self.write_operand(e, level + 1, f)?;
        }
        Ok(())
    }

    fn write_operand(&self, e: &BoolExpr, min_level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if e.precedence() < min_level {
            f.write_str("(")?;
            self.write(e, f)?;
            f.write_str(")")
        } else {
            self.write(e, f)
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}
