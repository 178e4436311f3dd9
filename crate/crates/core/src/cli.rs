//! Command-line front end. Exit codes: 0 when the command ran (whatever the
//! verdict), 1 when a budget was exceeded, 2 on usage, parse or validation
//! errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::assignment::{CapabilityAssignment, GoalBase, PriorityOrder};
use crate::bundled::emit_example;
use crate::checker::{check, names, AgentRationality};
use crate::error::{Error, ParseError, Result};
use crate::extension::{extend, Semantics};
use crate::model_file::{load_model, parse_trace};
use crate::oracle::trace::{is_rational_trace, Trace};
use crate::oracle::{oracle_evaluate, DEFAULT_GUARD};
use crate::parser::{parse_bool_expr, parse_formula, parse_goal_assignment};
use crate::structure::GameStructure;

#[derive(Debug, Parser)]
#[command(name = "bdi-atles", version, about = "Model checker for ATL with BDI-rational agents")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a model file and report structural problems.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Evaluate a formula with the fixpoint checker.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = Semantics::Achievement)]
        semantics: Semantics,
        /// Emit a JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula by explicit strategy search.
    Oracle {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Maximum number of strategy profiles to explore.
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
        #[arg(long, default_value_t = Semantics::Achievement)]
        semantics: Semantics,
    },
    /// Decide whether a recorded trace is rational for one agent.
    Trace {
        #[arg(long)]
        model: PathBuf,
        /// File with alternating state and action names.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        agent: String,
        /// Comma-separated capability names.
        #[arg(long, allow_hyphen_values = true)]
        caps: String,
        /// Semicolon-separated goal formulas.
        #[arg(long, allow_hyphen_values = true)]
        goals: String,
        /// Priority chain such as `g1 > g2 > g3` over the listed goals.
        #[arg(long)]
        prio: Option<String>,
        #[arg(long, default_value_t = Semantics::Achievement)]
        semantics: Semantics,
    },
    /// Build the goal-extended model for a goal assignment.
    Extend {
        #[arg(long)]
        model: PathBuf,
        /// Goal assignment, e.g. `Ag: goals={G_B}; prio=[]`.
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = Semantics::Achievement)]
        semantics: Semantics,
        /// List every extended state with its successors.
        #[arg(long)]
        dump: bool,
    },
    /// Print a bundled model.
    Example {
        /// `gold-fragment` or `gold3`.
        name: String,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Capacity(_) => 1,
                _ => 2,
            }
        }
    }
}

fn in_flag(flag: &'static str) -> impl Fn(ParseError) -> Error {
    move |e| Error::Parse(ParseError::new(e.line, e.column, format!("in --{flag}: {}", e.message)))
}

fn load(path: &Path) -> Result<GameStructure> {
    load_model(path)
}

fn write_io(r: std::io::Result<()>) -> Result<()> {
    r.map_err(|source| Error::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate { model } => {
            let m = load(&model)?;
            let caps = m.capabilities().len();
            write_io(writeln!(
                out,
                "valid: {} states, {} agents, {} actions, {} capabilities",
                m.num_states(),
                m.agents().len(),
                m.actions().len(),
                caps
            ))
        }
        Command::Check {
            model,
            formula,
            semantics,
            json,
        } => {
            let m = load(&model)?;
            let f = parse_formula(&formula, &m).map_err(in_flag("formula"))?;
            let report = check(&m, &f, semantics)?;
            if json {
                let text = serde_json::to_string_pretty(&report.to_json(&m)).expect("JSON value renders");
                return write_io(writeln!(out, "{text}"));
            }
            let sat = report.state_names(&m);
            write_io((|| {
                writeln!(out, "formula: {}", report.formula)?;
                writeln!(out, "semantics: {semantics}")?;
                writeln!(out, "satisfying states ({}): {}", sat.len(), sat.join(" "))?;
                writeln!(out, "extended states: {}", report.extended_states())?;
                writeln!(out, "fixpoint iterations: {}", report.fixpoint_iterations())
            })())
        }
        Command::Oracle {
            model,
            formula,
            guard,
            semantics,
        } => {
            let m = load(&model)?;
            let f = parse_formula(&formula, &m).map_err(in_flag("formula"))?;
            let report = oracle_evaluate(&m, &f, semantics, guard)?;
            let sat = names(&m, &report.satisfying);
            write_io((|| {
                writeln!(out, "formula: {}", f.display(&m))?;
                writeln!(out, "semantics: {semantics}")?;
                writeln!(out, "satisfying states ({}): {}", sat.len(), sat.join(" "))?;
                writeln!(out, "explored profiles: {}", report.explored)
            })())
        }
        Command::Trace {
            model,
            trace,
            agent,
            caps,
            goals,
            prio,
            semantics,
        } => {
            let m = load(&model)?;
            let id = m.agent_id(agent.trim()).ok_or_else(|| Error::Unknown {
                kind: "agent",
                name: agent.clone(),
            })?;
            let src = std::fs::read_to_string(&trace).map_err(|source| Error::Io {
                path: trace.display().to_string(),
                source,
            })?;
            let (states, actions) = parse_trace(&src, &m)?;
            let t = Trace::new(&m, id, states, actions)?;
            let mut assignment = CapabilityAssignment::default();
            assignment.insert(id, caps.split(',').map(str::trim).filter(|c| !c.is_empty()));
            let base = goal_base(&m, &goals, prio.as_deref())?;
            if semantics == Semantics::Priority && base.priority().is_none() {
                return Err(Error::MissingPriority(agent));
            }
            let plans = m.plans_of(id, &assignment)?;
            let rat = AgentRationality::new(&m, id, &base, &plans)?;
            let verdict = is_rational_trace(&m, &rat, &base, &t, semantics)?;
            write_io(writeln!(out, "{verdict}"))
        }
        Command::Extend {
            model,
            rho,
            semantics,
            dump,
        } => {
            let m = load(&model)?;
            let rho = parse_goal_assignment(&rho, &m).map_err(in_flag("rho"))?;
            let ext = extend(&m, &rho, semantics)?;
            let initial = ext.assignment_states();
            let reachable = ext.reachable_from(&initial);
            write_io((|| {
                writeln!(out, "semantics: {semantics}")?;
                writeln!(out, "extended states: {}", ext.num_states())?;
                writeln!(out, "initial states: {}", initial.len())?;
                writeln!(out, "reachable from initial: {}", reachable.len())?;
                if dump {
                    for i in 0..ext.num_states() {
                        let succ: Vec<String> = ext.successors(i).iter().map(|j| j.to_string()).collect();
                        writeln!(out, "{i} {} -> {}", ext.render_state(i), succ.join(" "))?;
                    }
                }
                Ok(())
            })())
        }
        Command::Example { name } => {
            let text = emit_example(&name)?;
            write_io(out.write_all(text.as_bytes()))
        }
    }
}

/// Goals separated by `;`, optional priority chain `a > b > c`.
fn goal_base(m: &GameStructure, goals: &str, prio: Option<&str>) -> Result<GoalBase> {
    let exprs = goals
        .split(';')
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .map(|g| parse_bool_expr(g, m).map_err(in_flag("goals")))
        .collect::<Result<Vec<_>>>()?;
    let mut base = GoalBase::new(exprs)?;
    if let Some(chain) = prio {
        let mut ranks = Vec::new();
        for part in chain.split('>').map(str::trim).filter(|p| !p.is_empty()) {
            let e = parse_bool_expr(part, m).map_err(in_flag("prio"))?;
            let pos = base
                .position(&e)
                .ok_or_else(|| Error::IllFormed(format!("priority entry `{part}` is not a goal")))?;
            ranks.push(pos);
        }
        let pairs: Vec<(usize, usize)> = ranks.windows(2).map(|w| (w[0], w[1])).collect();
        let order = PriorityOrder::from_pairs(base.len(), &pairs)
            .map_err(|c| Error::IllFormed(format!("priority order is cyclic at goal {}", c.goal)))?;
        base = base.with_priority(order);
    }
    Ok(base)
}
