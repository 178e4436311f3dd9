//! Recursive-descent parsers for boolean expressions, formulas and goal
//! assignments.
//!
//! Formula grammar (whitespace-insensitive, precedence `!` > `&` > `|`):
//!
//! ```text
//! formula := "true" | "false" | IDENT | "!" formula | "(" formula ")"
//!          | formula "&" formula | formula "|" formula
//!          | "<<" [agents] ">>" "[" [assign {"," assign}] "]" path
//! path    := ("X" | "G" | "F") formula | "(" formula "U" formula ")"
//! assign  := IDENT ":" "caps" "=" "{" [idents] "}" ";" "goals" "=" "{" [exprs] "}"
//!            [";" "prio" "=" "[" pairs "]"]
//! ```
//!
//! A coalition binds like `!`: `<<A>>[] X p & q` is `(<<A>>[] X p) & q`.
//! `F φ` is read as `true U φ`.

use std::collections::BTreeSet;

use crate::assignment::{CapabilityAssignment, GoalAssignment, GoalBase, PriorityOrder};
use crate::error::ParseError;
use crate::expr::BoolExpr;
use crate::formula::{Coalition, Formula, PathOp};
use crate::ids::{AgentId, PropId};
use crate::lexer::{tokenize, Tok, Token};
use crate::structure::GameStructure;

pub(crate) struct Cursor<'t> {
    toks: &'t [Token],
    pos: usize,
}

impl<'t> Cursor<'t> {
    pub(crate) fn new(toks: &'t [Token]) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &'t Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    pub(crate) fn peek_at(&self, ahead: usize) -> &'t Token {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)]
    }

    pub(crate) fn bump(&mut self) -> &'t Token {
        let t = self.peek();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok, what: &str) -> Result<&'t Token, ParseError> {
        if &self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.peek().tok.describe())))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<(&'t str, &'t Token), ParseError> {
        let t = self.peek();
        match &t.tok {
            Tok::Ident(s) => {
                self.bump();
                Ok((s.as_str(), t))
            }
            other => Err(self.error(format!("expected {what}, found {}", other.describe()))),
        }
    }

    pub(crate) fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == word => {
                self.bump();
                Ok(())
            }
            other => Err(self.error(format!("expected `{word}`, found {}", other.describe()))),
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.column, message)
    }
}

pub(crate) fn error_at(t: &Token, message: impl Into<String>) -> ParseError {
    ParseError::new(t.line, t.column, message)
}

/// Parses a boolean expression at disjunction level. Identifiers are resolved
/// through `resolve`.
pub(crate) fn bool_expr(
    cur: &mut Cursor<'_>,
    resolve: &dyn Fn(&str) -> Option<PropId>,
) -> Result<BoolExpr, ParseError> {
    let mut parts = vec![bool_conj(cur, resolve)?];
    while cur.eat(&Tok::Pipe) {
        parts.push(bool_conj(cur, resolve)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::Or(parts) })
}

fn bool_conj(cur: &mut Cursor<'_>, resolve: &dyn Fn(&str) -> Option<PropId>) -> Result<BoolExpr, ParseError> {
    let mut parts = vec![bool_unary(cur, resolve)?];
    while cur.eat(&Tok::Amp) {
        parts.push(bool_unary(cur, resolve)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::And(parts) })
}

fn bool_unary(cur: &mut Cursor<'_>, resolve: &dyn Fn(&str) -> Option<PropId>) -> Result<BoolExpr, ParseError> {
    if cur.eat(&Tok::Bang) {
        return Ok(bool_unary(cur, resolve)?.negate());
    }
    if cur.eat(&Tok::LParen) {
        let e = bool_expr(cur, resolve)?;
        cur.expect(&Tok::RParen, "`)`")?;
        return Ok(e);
    }
    let (name, tok) = cur.ident("a proposition")?;
    match name {
        "true" => Ok(BoolExpr::True),
        "false" => Ok(BoolExpr::False),
        _ => resolve(name)
            .map(BoolExpr::Atom)
            .ok_or_else(|| error_at(tok, format!("unknown proposition `{name}`"))),
    }
}

fn finish(cur: &Cursor<'_>) -> Result<(), ParseError> {
    if cur.peek().tok == Tok::Eof {
        Ok(())
    } else {
        Err(cur.error(format!("unexpected {}", cur.peek().tok.describe())))
    }
}

/// Parses a standalone boolean expression over `model`'s propositions.
pub fn parse_bool_expr(text: &str, model: &GameStructure) -> Result<BoolExpr, ParseError> {
    let toks = tokenize(text, false)?;
    let mut cur = Cursor::new(&toks);
    let e = bool_expr(&mut cur, &|n| model.prop_id(n))?;
    finish(&cur)?;
    Ok(e)
}

/// Parses a formula, resolving agents, propositions and capabilities against
/// `model`.
pub fn parse_formula(text: &str, model: &GameStructure) -> Result<Formula, ParseError> {
    let toks = tokenize(text, false)?;
    let mut p = FormulaParser {
        cur: Cursor::new(&toks),
        model,
    };
    let f = p.disjunction()?;
    finish(&p.cur)?;
    Ok(f)
}

/// Parses a goal assignment such as `Ag: goals={G_B}; prio=[]`, entries
/// separated by `,`. Capabilities are not accepted here.
pub fn parse_goal_assignment(text: &str, model: &GameStructure) -> Result<GoalAssignment, ParseError> {
    let toks = tokenize(text, false)?;
    let mut p = FormulaParser {
        cur: Cursor::new(&toks),
        model,
    };
    let mut goals = GoalAssignment::default();
    if p.cur.peek().tok != Tok::Eof {
        loop {
            let entry = p.assignment()?;
            if entry.caps.is_some() {
                return Err(error_at(entry.at, "capabilities are not part of a goal assignment"));
            }
            let base = entry
                .goals
                .ok_or_else(|| error_at(entry.at, format!("agent `{}` has no goals", p.model.agent_name(entry.agent))))?;
            if goals.contains(entry.agent) {
                return Err(error_at(entry.at, format!("agent `{}` assigned twice", p.model.agent_name(entry.agent))));
            }
            goals.insert(entry.agent, base);
            if !p.cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    finish(&p.cur)?;
    Ok(goals)
}

struct FormulaParser<'t, 'm> {
    cur: Cursor<'t>,
    model: &'m GameStructure,
}

struct AssignEntry<'t> {
    agent: AgentId,
    at: &'t Token,
    caps: Option<BTreeSet<String>>,
    goals: Option<GoalBase>,
}

impl<'t> FormulaParser<'t, '_> {
    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.cur.eat(&Tok::Pipe) {
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.cur.eat(&Tok::Amp) {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let t = self.cur.peek();
        match &t.tok {
            Tok::Bang => {
                self.cur.bump();
                Ok(self.unary()?.negate())
            }
            Tok::LParen => {
                self.cur.bump();
                let f = self.disjunction()?;
                self.cur.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::LAngle2 => self.coalition(),
            Tok::Ident(name) => {
                self.cur.bump();
                match name.as_str() {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    _ => self
                        .model
                        .prop_id(name)
                        .map(Formula::Atom)
                        .ok_or_else(|| error_at(t, format!("unknown proposition `{name}`"))),
                }
            }
            other => Err(self.cur.error(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn agent(&mut self) -> Result<(AgentId, &'t Token), ParseError> {
        let (name, tok) = self.cur.ident("an agent")?;
        let id = self
            .model
            .agent_id(name)
            .ok_or_else(|| error_at(tok, format!("unknown agent `{name}`")))?;
        Ok((id, tok))
    }

    fn coalition(&mut self) -> Result<Formula, ParseError> {
        let open = self.cur.expect(&Tok::LAngle2, "`<<`")?;
        let mut agents = BTreeSet::new();
        while self.cur.peek().tok != Tok::RAngle2 {
            let (id, tok) = self.agent()?;
            if !agents.insert(id) {
                return Err(error_at(tok, format!("agent `{}` listed twice in coalition", self.model.agent_name(id))));
            }
            self.cur.eat(&Tok::Comma);
        }
        self.cur.expect(&Tok::RAngle2, "`>>`")?;
        self.cur.expect(&Tok::LBracket, "`[` opening the assignments")?;
        let mut caps = CapabilityAssignment::default();
        let mut goals = GoalAssignment::default();
        let mut seen = BTreeSet::new();
        if self.cur.peek().tok != Tok::RBracket {
            loop {
                let entry = self.assignment()?;
                let name = self.model.agent_name(entry.agent).to_string();
                if !seen.insert(entry.agent) {
                    return Err(error_at(entry.at, format!("agent `{name}` assigned twice")));
                }
                match (entry.caps, entry.goals) {
                    (Some(c), Some(g)) => {
                        caps.insert(entry.agent, c);
                        goals.insert(entry.agent, g);
                    }
                    (None, Some(_)) => {
                        return Err(error_at(open, format!("agent {name} has goals but no capabilities")))
                    }
                    (Some(_), None) => {
                        return Err(error_at(open, format!("agent {name} has capabilities but no goals")))
                    }
                    (None, None) => {
                        return Err(error_at(entry.at, format!("agent {name} has an empty assignment")))
                    }
                }
                if !self.cur.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.cur.expect(&Tok::RBracket, "`]` closing the assignments")?;
        let path = self.path()?;
        Ok(Formula::coalition(Coalition {
            agents,
            capabilities: caps,
            goals,
            path,
        }))
    }

    fn assignment(&mut self) -> Result<AssignEntry<'t>, ParseError> {
        let (agent, at) = self.agent()?;
        self.cur.expect(&Tok::Colon, "`:` after the agent")?;
        let mut caps: Option<BTreeSet<String>> = None;
        let mut goals: Option<Vec<BoolExpr>> = None;
        let mut prio: Option<(Vec<(BoolExpr, BoolExpr)>, &Token)> = None;
        loop {
            let (key, key_tok) = self.cur.ident("`caps`, `goals` or `prio`")?;
            self.cur.expect(&Tok::Eq, "`=`")?;
            let dup = |present: bool| {
                if present {
                    Err(error_at(key_tok, format!("`{key}` given twice")))
                } else {
                    Ok(())
                }
            };
            match key {
                "caps" => {
                    dup(caps.is_some())?;
                    caps = Some(self.capability_list()?);
                }
                "goals" => {
                    dup(goals.is_some())?;
                    goals = Some(self.goal_list()?);
                }
                "prio" => {
                    dup(prio.is_some())?;
                    prio = Some((self.priority_pairs()?, key_tok));
                }
                other => return Err(error_at(key_tok, format!("unknown assignment key `{other}`"))),
            }
            // `;` separates keys; a `;` followed by something other than a key ends nothing.
            if !(self.cur.peek().tok == Tok::Semi && matches!(self.cur.peek_at(1).tok, Tok::Ident(_))) {
                break;
            }
            self.cur.bump();
        }
        let goals = match goals {
            None => {
                if let Some((_, tok)) = prio {
                    return Err(error_at(tok, "`prio` given without `goals`"));
                }
                None
            }
            Some(list) => {
                let mut base = GoalBase::new(list).map_err(|e| error_at(at, e.to_string()))?;
                if let Some((pairs, tok)) = prio {
                    let mut idx = Vec::new();
                    for (hi, lo) in pairs {
                        let find = |g: &BoolExpr| {
                            base.position(g).ok_or_else(|| {
                                error_at(
                                    tok,
                                    format!(
                                        "priority mentions `{}`, which is not a goal of this agent",
                                        g.display(self.model.props())
                                    ),
                                )
                            })
                        };
                        idx.push((find(&hi)?, find(&lo)?));
                    }
                    let order = PriorityOrder::from_pairs(base.len(), &idx).map_err(|c| {
                        error_at(
                            tok,
                            format!(
                                "priority order is cyclic at goal `{}`",
                                base.goals()[c.goal].display(self.model.props())
                            ),
                        )
                    })?;
                    base = base.with_priority(order);
                }
                Some(base)
            }
        };
        Ok(AssignEntry { agent, at, caps, goals })
    }

    fn capability_list(&mut self) -> Result<BTreeSet<String>, ParseError> {
        self.cur.expect(&Tok::LBrace, "`{`")?;
        let mut out = BTreeSet::new();
        while self.cur.peek().tok != Tok::RBrace {
            let (name, tok) = self.cur.ident("a capability")?;
            if self.model.capability(name).is_none() {
                return Err(error_at(tok, format!("unknown capability `{name}`")));
            }
            out.insert(name.to_string());
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        self.cur.expect(&Tok::RBrace, "`}`")?;
        Ok(out)
    }

    fn goal_list(&mut self) -> Result<Vec<BoolExpr>, ParseError> {
        self.cur.expect(&Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        let model = self.model;
        while self.cur.peek().tok != Tok::RBrace {
            out.push(bool_expr(&mut self.cur, &|n| model.prop_id(n))?);
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        self.cur.expect(&Tok::RBrace, "`}`")?;
        Ok(out)
    }

    fn priority_pairs(&mut self) -> Result<Vec<(BoolExpr, BoolExpr)>, ParseError> {
        self.cur.expect(&Tok::LBracket, "`[`")?;
        let mut out = Vec::new();
        let model = self.model;
        while self.cur.peek().tok != Tok::RBracket {
            let hi = bool_expr(&mut self.cur, &|n| model.prop_id(n))?;
            self.cur.expect(&Tok::Gt, "`>`")?;
            let lo = bool_expr(&mut self.cur, &|n| model.prop_id(n))?;
            out.push((hi, lo));
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        self.cur.expect(&Tok::RBracket, "`]`")?;
        Ok(out)
    }

    fn path(&mut self) -> Result<PathOp, ParseError> {
        let t = self.cur.peek();
        match &t.tok {
            Tok::Ident(op) if op == "X" || op == "G" || op == "F" => {
                self.cur.bump();
                let f = self.unary()?;
                Ok(match op.as_str() {
                    "X" => PathOp::Next(f),
                    "G" => PathOp::Globally(f),
                    _ => PathOp::eventually(f),
                })
            }
            Tok::LParen => {
                self.cur.bump();
                let lhs = self.disjunction()?;
                self.cur.keyword("U")?;
                let rhs = self.disjunction()?;
                self.cur.expect(&Tok::RParen, "`)` closing the until")?;
                Ok(PathOp::Until(lhs, rhs))
            }
            other => Err(self.cur.error(format!(
                "expected a path operator (`X`, `G`, `F` or `(... U ...)`), found {}",
                other.describe()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::StateId;
    use crate::structure::{GameStructureBuilder, PlanRule};

    fn model() -> GameStructure {
        let mut b = GameStructureBuilder::new();
        for a in ["Ag", "En", "A", "a1"] {
            b.agent(a);
        }
        for p in ["G_B", "Ag_B", "g", "p", "q"] {
            b.prop(p);
        }
        let go = b.action("go");
        for c in ["Nav", "Collect", "Deposit"] {
            b.capability(c, [PlanRule::new(BoolExpr::True, go, BoolExpr::True)]);
        }
        b.state("s", &[]);
        b.inject_noop();
        b.build()
    }

    #[test]
    fn gold_acceptance_formula() {
        let m = model();
        let f = parse_formula(
            "<<Ag>>[Ag: caps={Nav,Collect,Deposit}; goals={G_B}] F (G_B & Ag_B)",
            &m,
        )
        .unwrap();
        let Formula::Coalition(c) = &f else { panic!("not a coalition") };
        assert_eq!(c.agents, BTreeSet::from([AgentId(0)]));
        assert_eq!(c.capabilities.get(AgentId(0)).unwrap().len(), 3);
        assert_eq!(c.goals.get(AgentId(0)).unwrap().goals(), &[BoolExpr::Atom(PropId(0))]);
        assert_eq!(
            c.path,
            PathOp::Until(
                Formula::True,
                Formula::Atom(PropId(0)).and(Formula::Atom(PropId(1)))
            )
        );
        assert_eq!(f.subformulas().len(), 5);
    }

    #[test]
    fn empty_coalition() {
        let m = model();
        let f = parse_formula("<<>>[] G true", &m).unwrap();
        let Formula::Coalition(c) = &f else { panic!() };
        assert!(c.agents.is_empty() && c.capabilities.is_empty() && c.goals.is_empty());
        assert_eq!(c.path, PathOp::Globally(Formula::True));
    }

    #[test]
    fn goals_without_capabilities_rejected() {
        let m = model();
        let err = parse_formula("<<A>>[a1: goals={g}] X p", &m).unwrap_err();
        assert!(err.message.contains("agent a1 has goals but no capabilities"), "{err}");
        assert_eq!((err.line, err.column), (1, 1));
    }

    #[test]
    fn resolution_errors_carry_positions() {
        let m = model();
        let err = parse_formula("p & zz", &m).unwrap_err();
        assert_eq!(err.column, 5);
        assert!(err.message.contains("unknown proposition"));
        assert!(parse_formula("<<Nobody>>[] X p", &m).unwrap_err().message.contains("unknown agent"));
        assert!(parse_formula("<<Ag>>[Ag: caps={Fly}; goals={}] X p", &m)
            .unwrap_err()
            .message
            .contains("unknown capability"));
        assert!(parse_formula("<<Ag>>[] p", &m).unwrap_err().message.contains("path operator"));
        assert!(parse_formula("p q", &m).is_err());
    }

    #[test]
    fn precedence() {
        let m = model();
        let f = parse_formula("!p & q | g", &m).unwrap();
        let (p, q, g) = (Formula::Atom(PropId(3)), Formula::Atom(PropId(4)), Formula::Atom(PropId(2)));
        assert_eq!(f, p.clone().negate().and(q.clone()).or(g.clone()));
        let c = parse_formula("<<>>[] X p & q", &m).unwrap();
        assert!(matches!(c, Formula::And(..)));
        let u = parse_formula("<<Ag, En>>[] (p U q | g)", &m).unwrap();
        let Formula::Coalition(c) = u else { panic!() };
        assert_eq!(c.agents.len(), 2);
        assert_eq!(c.path, PathOp::Until(p, q.or(g)));
    }

    #[test]
    fn priority_pairs_are_closed_and_checked() {
        let m = model();
        let f = parse_formula("<<Ag>>[Ag: caps={}; goals={p, q, g}; prio=[p > q, q > g]] X p", &m).unwrap();
        let Formula::Coalition(c) = f else { panic!() };
        let base = c.goals.get(AgentId(0)).unwrap();
        let order = base.priority().unwrap();
        assert!(order.prefers(0, 2));
        let cyc = parse_formula("<<Ag>>[Ag: caps={}; goals={p, q}; prio=[p > q, q > p]] X p", &m).unwrap_err();
        assert!(cyc.message.contains("cyclic"));
        let stray = parse_formula("<<Ag>>[Ag: caps={}; goals={p}; prio=[p > q]] X p", &m).unwrap_err();
        assert!(stray.message.contains("not a goal"));
    }

    #[test]
    fn duplicate_agent_entries_rejected() {
        let m = model();
        let err = parse_formula("<<Ag>>[Ag: caps={}; goals={p}, Ag: caps={}; goals={q}] X p", &m).unwrap_err();
        assert!(err.message.contains("assigned twice"));
    }

    #[test]
    fn goal_assignment_spec() {
        let m = model();
        let rho = parse_goal_assignment("Ag: goals={G_B}, En: goals={p, q}; prio=[p > q]", &m).unwrap();
        assert_eq!(rho.agents().len(), 2);
        assert!(rho.get(AgentId(1)).unwrap().priority().is_some());
        assert!(parse_goal_assignment("", &m).unwrap().is_empty());
        assert!(parse_goal_assignment("Ag: caps={Nav}; goals={p}", &m).is_err());
        let _ = StateId(0);
    }

    #[test]
    fn bool_expr_standalone() {
        let m = model();
        assert_eq!(
            parse_bool_expr("G_B & !Ag_B", &m).unwrap(),
            BoolExpr::And(vec![BoolExpr::Atom(PropId(0)), BoolExpr::Atom(PropId(1)).negate()])
        );
        assert!(parse_bool_expr("G_B &", &m).is_err());
    }
}
