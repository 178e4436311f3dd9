//! Line-oriented model files.
//!
//! ```text
//! agents Ag En
//! props G_B Ag_B
//! actions right pick
//! state q0 Ag_B
//! avail q0 Ag right        # optional; inferred from transitions otherwise
//! trans q0 Ag=right En=noOp -> q1
//! cap Nav {
//!   plan (Ag_B & G_C) [right] (G_B)
//! }
//! @default-stay
//! ```
//!
//! `noOp` is always available and idles in place unless a transition says
//! otherwise. Where an agent has no `avail` line for a state, its actions there
//! are the ones it plays in that state's transitions. `@default-stay` maps
//! every legal joint move without a transition to a self-loop.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, ParseError, Result};
use crate::ids::{ActionId, AgentId, StateId, NOOP, NOOP_NAME};
use crate::lexer::{tokenize, Tok, Token};
use crate::parser::{bool_expr, error_at, Cursor};
use crate::structure::{GameStructure, GameStructureBuilder, PlanRule};

struct PendingTransition<'t> {
    source: StateId,
    joint: Vec<ActionId>,
    target: (&'t str, &'t Token),
}

/// Parses model text into a builder-completed structure without validating it.
pub fn parse_model_unchecked(src: &str) -> Result<GameStructure> {
    let toks = tokenize(src, true)?;
    let mut cur = Cursor::new(&toks);
    let mut b = GameStructureBuilder::new();
    let mut default_stay = false;
    let mut explicit_avail: BTreeSet<(StateId, AgentId)> = BTreeSet::new();
    let mut pending: Vec<PendingTransition<'_>> = Vec::new();

    loop {
        while cur.eat(&Tok::Newline) {}
        let head = cur.peek();
        match &head.tok {
            Tok::Eof => break,
            Tok::Directive(d) => {
                cur.bump();
                match d.as_str() {
                    "default-stay" => default_stay = true,
                    other => return Err(error_at(head, format!("unknown directive `@{other}`")).into()),
                }
            }
            Tok::Ident(kw) => {
                cur.bump();
                match kw.as_str() {
                    "agents" => {
                        for (name, tok) in names_to_eol(&mut cur)? {
                            if b.model().num_states() > 0 {
                                return Err(error_at(tok, "agents must be declared before states").into());
                            }
                            b.agent(name);
                        }
                    }
                    "props" => {
                        for (name, tok) in names_to_eol(&mut cur)? {
                            reserved(name, tok)?;
                            b.prop(name);
                        }
                    }
                    "actions" => {
                        for (name, tok) in names_to_eol(&mut cur)? {
                            reserved(name, tok)?;
                            b.action(name);
                        }
                    }
                    "state" => {
                        let (name, tok) = cur.ident("a state name")?;
                        if b.model().state_id(name).is_some() {
                            return Err(error_at(tok, format!("state `{name}` declared twice")).into());
                        }
                        let mut label = Vec::new();
                        for (p, ptok) in names_to_eol(&mut cur)? {
                            label.push(
                                b.model()
                                    .prop_id(p)
                                    .ok_or_else(|| error_at(ptok, format!("unknown proposition `{p}`")))?,
                            );
                        }
                        b.state(name, &label);
                    }
                    "avail" => {
                        let q = state(&mut cur, b.model())?;
                        let agent = agent(&mut cur, b.model())?;
                        let mut acts = Vec::new();
                        for (a, atok) in names_to_eol(&mut cur)? {
                            acts.push(action(a, atok, b.model())?);
                        }
                        explicit_avail.insert((q, agent));
                        let mut set = b.model().available(agent, q).to_vec();
                        set.extend(acts);
                        b.avail(q, agent, &set);
                    }
                    "trans" => {
                        let q = state(&mut cur, b.model())?;
                        let n = b.model().agents().len();
                        let mut joint: Vec<Option<ActionId>> = vec![None; n];
                        while cur.peek().tok != Tok::Arrow {
                            let a = agent(&mut cur, b.model())?;
                            let at = cur.expect(&Tok::Eq, "`=`")?;
                            let (act, atok) = cur.ident("an action")?;
                            if joint[a.0].is_some() {
                                return Err(error_at(at, format!("agent `{}` given twice", b.model().agent_name(a))).into());
                            }
                            joint[a.0] = Some(action(act, atok, b.model())?);
                        }
                        let arrow = cur.expect(&Tok::Arrow, "`->`")?;
                        let target = cur.ident("a target state")?;
                        end_of_line(&cur)?;
                        let missing: Vec<&str> = (0..n)
                            .filter(|&i| joint[i].is_none())
                            .map(|i| b.model().agent_name(AgentId(i)))
                            .collect();
                        if !missing.is_empty() {
                            return Err(error_at(arrow, format!("transition lacks actions for {}", missing.join(", "))).into());
                        }
                        pending.push(PendingTransition {
                            source: q,
                            joint: joint.into_iter().map(Option::unwrap).collect(),
                            target,
                        });
                    }
                    "cap" => {
                        let (name, _) = cur.ident("a capability name")?;
                        cur.expect(&Tok::LBrace, "`{`")?;
                        let mut plans = Vec::new();
                        loop {
                            while cur.eat(&Tok::Newline) {}
                            if cur.eat(&Tok::RBrace) {
                                break;
                            }
                            cur.keyword("plan")?;
                            let model = b.model();
                            let resolve = |n: &str| model.prop_id(n);
                            cur.expect(&Tok::LParen, "`(` before the context")?;
                            let context = bool_expr(&mut cur, &resolve)?;
                            cur.expect(&Tok::RParen, "`)`")?;
                            cur.expect(&Tok::LBracket, "`[` before the action")?;
                            let (act, atok) = cur.ident("an action")?;
                            let act = action(act, atok, model)?;
                            cur.expect(&Tok::RBracket, "`]`")?;
                            cur.expect(&Tok::LParen, "`(` before the effect")?;
                            let effect = bool_expr(&mut cur, &resolve)?;
                            cur.expect(&Tok::RParen, "`)`")?;
                            plans.push(PlanRule::new(context, act, effect));
                        }
                        b.capability(name, plans);
                    }
                    other => return Err(error_at(head, format!("unknown statement `{other}`")).into()),
                }
            }
            other => return Err(error_at(head, format!("expected a statement, found {}", other.describe())).into()),
        }
        end_of_line(&cur)?;
    }

    let mut inferred: BTreeMap<(StateId, AgentId), BTreeSet<ActionId>> = BTreeMap::new();
    let mut resolved = Vec::with_capacity(pending.len());
    for t in pending {
        let (name, tok) = t.target;
        let target = b
            .model()
            .state_id(name)
            .ok_or_else(|| error_at(tok, format!("unknown state `{name}`")))?;
        for (i, &a) in t.joint.iter().enumerate() {
            if !explicit_avail.contains(&(t.source, AgentId(i))) {
                inferred.entry((t.source, AgentId(i))).or_default().insert(a);
            }
        }
        resolved.push((t.source, t.joint, target));
    }
    for ((q, a), acts) in inferred {
        b.avail(q, a, &acts.into_iter().collect::<Vec<_>>());
    }
    for (q, joint, target) in resolved {
        b.transition(q, joint, target)?;
    }
    b.inject_noop();
    if default_stay {
        b.default_stay();
    }
    Ok(b.build())
}

/// Parses and validates model text.
pub fn parse_model(src: &str) -> Result<GameStructure> {
    let model = parse_model_unchecked(src)?;
    let diags = model.validate();
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(Error::InvalidModel(diags))
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GameStructure> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&src)
}

fn reserved(name: &str, tok: &Token) -> Result<(), ParseError> {
    if matches!(name, "true" | "false" | "noOp" | "X" | "G" | "F" | "U") {
        Err(error_at(tok, format!("`{name}` is reserved")))
    } else {
        Ok(())
    }
}

fn names_to_eol<'t>(cur: &mut Cursor<'t>) -> Result<Vec<(&'t str, &'t Token)>, ParseError> {
    let mut out = Vec::new();
    while !matches!(cur.peek().tok, Tok::Newline | Tok::Eof) {
        out.push(cur.ident("a name")?);
    }
    Ok(out)
}

fn end_of_line(cur: &Cursor<'_>) -> Result<(), ParseError> {
    match cur.peek().tok {
        Tok::Newline | Tok::Eof => Ok(()),
        ref other => Err(cur.error(format!("expected end of line, found {}", other.describe()))),
    }
}

fn state(cur: &mut Cursor<'_>, m: &GameStructure) -> Result<StateId, ParseError> {
    let (name, tok) = cur.ident("a state")?;
    m.state_id(name)
        .ok_or_else(|| error_at(tok, format!("unknown state `{name}`")))
}

fn agent(cur: &mut Cursor<'_>, m: &GameStructure) -> Result<AgentId, ParseError> {
    let (name, tok) = cur.ident("an agent")?;
    m.agent_id(name)
        .ok_or_else(|| error_at(tok, format!("unknown agent `{name}`")))
}

fn action(name: &str, tok: &Token, m: &GameStructure) -> Result<ActionId, ParseError> {
    m.action_id(name)
        .ok_or_else(|| error_at(tok, format!("unknown action `{name}`")))
}

/// Writes `model` with explicit availability and transitions. Idle
/// self-loops and `noOp` availability are left implicit.
pub fn write_model(model: &GameStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "agents {}", model.agents().join(" "));
    if !model.props().is_empty() {
        let _ = writeln!(out, "props {}", model.props().join(" "));
    }
    let acts: Vec<&str> = model.actions().iter().skip(1).map(String::as_str).collect();
    if !acts.is_empty() {
        let _ = writeln!(out, "actions {}", acts.join(" "));
    }
    out.push('\n');
    for q in model.state_ids() {
        let label: Vec<&str> = model.label(q).into_iter().map(|p| model.props()[p.0].as_str()).collect();
        let _ = writeln!(out, "state {} {}", model.state_name(q), label.join(" "));
    }
    for q in model.state_ids() {
        out.push('\n');
        for a in model.agent_ids() {
            let acts: Vec<&str> = model
                .available(a, q)
                .iter()
                .filter(|&&x| x != NOOP)
                .map(|&x| model.action_name(x))
                .collect();
            if !acts.is_empty() {
                let _ = writeln!(out, "avail {} {} {}", model.state_name(q), model.agent_name(a), acts.join(" "));
            }
        }
        for (joint, &target) in model.transitions(q) {
            if joint.iter().all(|&a| a == NOOP) && target == q {
                continue;
            }
            let parts: Vec<String> = joint
                .iter()
                .enumerate()
                .map(|(i, &a)| format!("{}={}", model.agent_name(AgentId(i)), model.action_name(a)))
                .collect();
            let _ = writeln!(
                out,
                "trans {} {} -> {}",
                model.state_name(q),
                parts.join(" "),
                model.state_name(target)
            );
        }
    }
    for (name, lib) in model.capabilities() {
        let _ = writeln!(out, "\ncap {name} {{");
        for plan in lib.iter() {
            let _ = writeln!(
                out,
                "  plan ({}) [{}] ({})",
                plan.context.display(model.props()),
                model.action_name(plan.action),
                plan.effect.display(model.props())
            );
        }
        out.push_str("}\n");
    }
    debug_assert!(model.actions()[0] == NOOP_NAME);
    out
}

/// Parses a trace file: whitespace-separated, alternating state and action
/// names, starting and ending with a state.
pub fn parse_trace(src: &str, model: &GameStructure) -> Result<(Vec<StateId>, Vec<ActionId>)> {
    let toks = tokenize(src, false)?;
    let mut states = Vec::new();
    let mut actions = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        let name = match &t.tok {
            Tok::Eof => break,
            Tok::Ident(n) => n.as_str(),
            other => return Err(error_at(t, format!("expected a name, found {}", other.describe())).into()),
        };
        if i % 2 == 0 {
            states.push(
                model
                    .state_id(name)
                    .ok_or_else(|| error_at(t, format!("unknown state `{name}`")))?,
            );
        } else {
            actions.push(action(name, t, model)?);
        }
    }
    if states.is_empty() || states.len() != actions.len() + 1 {
        return Err(Error::InvalidTrace("a trace alternates states and actions, starting and ending with a state".into()));
    }
    Ok((states, actions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Diagnostic;

    const SMALL: &str = "\
agents a b
props p
actions go
state s0
state s1 p
trans s0 a=go b=noOp -> s1
trans s1 b=go a=go -> s0
@default-stay
";

    #[test]
    fn infers_availability_and_completes() {
        let m = parse_model(SMALL).unwrap();
        let go = m.action_id("go").unwrap();
        assert_eq!(m.available(AgentId(0), StateId(0)), &[NOOP, go]);
        assert_eq!(m.available(AgentId(1), StateId(0)), &[NOOP]);
        assert_eq!(m.joint_move_count(StateId(1)), 4);
        assert_eq!(m.transition(StateId(1), &[go, NOOP]), Some(StateId(1)));
        assert_eq!(m.transition(StateId(1), &[go, go]), Some(StateId(0)));
    }

    #[test]
    fn missing_transition_without_default_stay() {
        let src = SMALL.replace("@default-stay\n", "");
        match parse_model(&src) {
            Err(Error::InvalidModel(d)) => {
                assert!(d.iter().any(|x| matches!(x, Diagnostic::MissingTransition { .. })), "{d:?}")
            }
            other => panic!("expected totality error, got {other:?}"),
        }
    }

    #[test]
    fn empty_agents_list() {
        let err = parse_model("agents\nstate s\n").unwrap_err();
        assert!(err.to_string().contains("at least one agent required"), "{err}");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_model("agents a\nstate s zz\n").unwrap_err();
        assert_eq!(err.to_string(), "2:9: unknown proposition `zz`");
        let err = parse_model("agents a\nstate s\ntrans s a=go -> s\n").unwrap_err();
        assert!(err.to_string().starts_with("3:11:"), "{err}");
        assert!(parse_model("agents a\nstate s\ntrans s -> s\n").is_err());
        assert!(parse_model("agents a\nprops true\n").is_err());
    }

    #[test]
    fn round_trip() {
        let src = format!("{SMALL}cap C {{\n  plan (p) [go] (!p)\n  plan (true) [go] (p | !p)\n}}\n");
        let m = parse_model(&src).unwrap();
        let text = write_model(&m);
        let again = parse_model(&text).unwrap();
        assert_eq!(write_model(&again), text);
        assert_eq!(again.capability("C").unwrap().len(), 2);
    }

    #[test]
    fn traces() {
        let m = parse_model(SMALL).unwrap();
        let (s, a) = parse_trace("s0 go s1", &m).unwrap();
        assert_eq!((s.len(), a.len()), (2, 1));
        assert!(parse_trace("s0 go", &m).is_err());
        assert!(parse_trace("", &m).is_err());
    }
}
