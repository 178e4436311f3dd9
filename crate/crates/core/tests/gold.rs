use std::collections::BTreeSet;

use bdi_atles::assignment::{CapabilityAssignment, GoalAssignment, GoalBase, GoalSet};
use bdi_atles::bundled::{gold3, gold_fragment, GOLD3_INITIAL, WIN_FORMULA, WIN_FORMULA_NO_COLLECT};
use bdi_atles::checker::{check, rationalities, CoalitionContext};
use bdi_atles::extension::{extend, ExtendedState, Semantics};
use bdi_atles::formula::Formula;
use bdi_atles::model_file::parse_trace;
use bdi_atles::oracle::trace::{exec_indices, is_rational_trace, Trace};
use bdi_atles::oracle::{oracle_evaluate, outcomes, Game, MemorylessStrategy, PathGoal, DEFAULT_GUARD};
use bdi_atles::parser::{parse_bool_expr, parse_formula};
use bdi_atles::stateset::StateSet;
use bdi_atles::structure::GameStructure;

fn assignments(m: &GameStructure, caps: &[&str]) -> (CapabilityAssignment, GoalAssignment) {
    let ag = m.agent_id("Ag").unwrap();
    let mut w = CapabilityAssignment::default();
    w.insert(ag, caps.iter().copied());
    let mut r = GoalAssignment::default();
    r.insert(ag, GoalBase::new([parse_bool_expr("G_B", m).unwrap()]).unwrap());
    (w, r)
}

#[test]
fn win_formula_holds_initially() {
    let m = gold3();
    let f = parse_formula(WIN_FORMULA, &m).unwrap();
    let init = m.state_id(GOLD3_INITIAL).unwrap();
    let report = check(&m, &f, Semantics::Achievement).unwrap();
    assert!(report.holds_at(init));
    let oracle = oracle_evaluate(&m, &f, Semantics::Achievement, DEFAULT_GUARD).unwrap();
    assert_eq!(oracle.satisfying, report.satisfying);
}

#[test]
fn no_collect_fails_initially() {
    let m = gold3();
    let f = parse_formula(WIN_FORMULA_NO_COLLECT, &m).unwrap();
    let init = m.state_id(GOLD3_INITIAL).unwrap();
    assert!(!check(&m, &f, Semantics::Achievement).unwrap().holds_at(init));
    let oracle = oracle_evaluate(&m, &f, Semantics::Achievement, DEFAULT_GUARD).unwrap();
    assert!(!oracle.satisfying.contains(init.0));
}

#[test]
fn applicable_plan_at_initial_state() {
    let m = gold3();
    let (w, r) = assignments(&m, &["Nav", "Collect", "Deposit"]);
    let ext = extend(&m, &r, Semantics::Achievement).unwrap();
    let init = ext
        .index_of(&ExtendedState {
            world: m.state_id(GOLD3_INITIAL).unwrap(),
            goals: vec![GoalSet(1)],
        })
        .unwrap();
    let bdi = rationalities(&ext, &w).unwrap();
    let rat = &bdi[&m.agent_id("Ag").unwrap()];
    let plans: Vec<String> = rat
        .applicable_plans(&ext, init)
        .iter()
        .map(|p| p.display(&m).to_string())
        .collect();
    assert_eq!(plans, ["(Ag_B & G_C) [right] (G_B)"]);
    let right = m.action_id("right").unwrap();
    assert_eq!(rat.rational_actions_at(&ext, init), vec![right]);
}

#[test]
fn achievement_extension_of_gold3() {
    let m = gold3();
    let (_, r) = assignments(&m, &[]);
    let ext = extend(&m, &r, Semantics::Achievement).unwrap();
    let g_b = m.prop_id("G_B").unwrap();
    let unsatisfied = m.state_ids().filter(|&q| !m.holds(q, g_b)).count();
    assert_eq!(unsatisfied, 36);
    // Every world with its goal pending, plus every world with no goal.
    assert_eq!(ext.num_states(), 45 + 36);
    // Exactly one state per world carries all goals that are still open.
    let maximal = (0..ext.num_states())
        .filter(|&i| {
            let q = ext.ws(i);
            ext.state(i).goals[0] == if m.holds(q, g_b) { GoalSet(0) } else { GoalSet(1) }
        })
        .count();
    assert_eq!(maximal, m.num_states());
    let initial = ext.assignment_states();
    assert_eq!(initial.len(), 36);
    assert!(initial.iter().all(|i| !m.holds(ext.ws(i), g_b)));
    let maint = extend(&m, &r, Semantics::Maintenance).unwrap();
    assert_eq!(maint.num_states(), 45);
    assert!(maint.assignment_states().iter().all(|i| !m.holds(maint.ws(i), g_b)));
}

fn fragment_trace(m: &GameStructure, text: &str) -> Trace {
    let (states, actions) = parse_trace(text, m).unwrap();
    Trace::new(m, m.agent_id("Ag").unwrap(), states, actions).unwrap()
}

#[test]
fn fragment_traces() {
    let m = gold_fragment();
    let ag = m.agent_id("Ag").unwrap();
    let (w, r) = assignments(&m, &["Nav", "Collect", "Deposit"]);
    let goals = r.get(ag).unwrap();
    let plans = m.plans_of(ag, &w).unwrap();
    let rat = bdi_atles::checker::AgentRationality::new(&m, ag, goals, &plans).unwrap();

    let good = fragment_trace(&m, "q0 right q1 pick q2 left q3 drop q4");
    let verdict = is_rational_trace(&m, &rat, goals, &good, Semantics::Achievement).unwrap();
    assert!(verdict.is_rational(), "{verdict}");

    let bad = fragment_trace(&m, "q0 noOp q9 right q5 noOp q1 pick q2");
    let verdict = is_rational_trace(&m, &rat, goals, &bad, Semantics::Achievement).unwrap();
    assert_eq!(verdict.to_string(), "irrational at index 0: applicable plan exists but noOp taken");

    let find = |action: &str| {
        plans
            .iter()
            .find(|p| m.action_name(p.action) == action)
            .unwrap()
            .clone()
    };
    assert_eq!(exec_indices(&m, &find("pick"), goals, &good, Semantics::Achievement).unwrap(), vec![1]);
    assert_eq!(exec_indices(&m, &find("right"), goals, &good, Semantics::Achievement).unwrap(), vec![0]);
}

#[test]
fn fragment_pre_image_at_q1() {
    let m = gold_fragment();
    let ag = m.agent_id("Ag").unwrap();
    let (w, r) = assignments(&m, &["Nav", "Collect", "Deposit"]);
    let ext = extend(&m, &r, Semantics::Achievement).unwrap();
    let bdi = rationalities(&ext, &w).unwrap();
    let ctx = CoalitionContext::new(&ext, &BTreeSet::from([ag]), &bdi);
    let q1 = m.state_id("q1").unwrap();
    let q2 = m.state_id("q2").unwrap();
    let target = ext
        .index_of(&ExtendedState {
            world: q1,
            goals: vec![GoalSet(1)],
        })
        .unwrap();
    // En may idle while Ag picks; the fragment completes that move as a
    // self-loop, so Ag cannot force q2 in one step.
    let only_q2 = ext.lift(&StateSet::from_indices(m.num_states(), [q2.0]));
    assert!(!ctx.pre(&only_q2).contains(target));
    let q1_or_q2 = ext.lift(&StateSet::from_indices(m.num_states(), [q1.0, q2.0]));
    assert!(ctx.pre(&q1_or_q2).contains(target));
}

#[test]
fn winning_chooser_outcomes_reach_goal() {
    let m = gold_fragment();
    let f = parse_formula(WIN_FORMULA, &m).unwrap();
    let Formula::Coalition(c) = &f else { unreachable!() };
    let ext = extend(&m, &c.goals, Semantics::Achievement).unwrap();
    let bdi = rationalities(&ext, &c.capabilities).unwrap();
    let game = Game::new(&ext, &c.agents, &bdi);
    let win = ext.lift(&bdi_atles::checker::check(&m, &parse_formula("G_B & Ag_B", &m).unwrap(), Semantics::Achievement)
        .unwrap()
        .satisfying);
    let goal = PathGoal::Until(StateSet::full(ext.num_states()), win.clone());
    let report = check(&m, &f, Semantics::Achievement).unwrap();
    for i in ext.assignment_states().iter() {
        let mut explored = 0;
        let witness = game.winning_strategy(&goal, i, DEFAULT_GUARD, &mut explored).unwrap();
        assert_eq!(witness.is_some(), report.holds_at(ext.ws(i)));
        if let Some(profiles) = witness {
            let strat = MemorylessStrategy::from_profiles(game.coalition(), &profiles);
            let graph = outcomes(&ext, i, &strat);
            assert!(graph.all_paths_reach(|s| win.contains(s)));
        }
    }
}
