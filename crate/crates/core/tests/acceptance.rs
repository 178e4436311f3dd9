//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use std::time::{Duration, Instant};

use bdi_atles::assignment::{GoalAssignment, GoalBase};
use bdi_atles::bundled::{gold3, gold_fragment, GOLD3_INITIAL, WIN_FORMULA, WIN_FORMULA_NO_COLLECT};
use bdi_atles::checker::{check, rationalities};
use bdi_atles::error::{CapacityError, Error};
use bdi_atles::expr::BoolExpr;
use bdi_atles::extension::{extend, Semantics};
use bdi_atles::formula::{Coalition, Formula};
use bdi_atles::ids::NOOP;
use bdi_atles::model_file::parse_trace;
use bdi_atles::oracle::atl::atl_evaluate;
use bdi_atles::oracle::trace::{is_rational_trace, Trace};
use bdi_atles::oracle::{oracle_evaluate, DEFAULT_GUARD};
use bdi_atles::parser::parse_formula;
use bdi_atles::random::{
    random_coalition, random_model, random_monotone_pair, random_plain_coalition, ModelShape, PATH_KINDS,
};
use bdi_atles::structure::{GameStructure, GameStructureBuilder};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLD_TIME_LIMIT: Duration = Duration::from_secs(1);
const EQUIVALENCE_MODELS: usize = 200;
const EQUIVALENCE_TIME_LIMIT: Duration = Duration::from_secs(300);
const MONOTONE_PAIRS: usize = 100;
const ATL_MODELS: usize = 50;
const SEED: u64 = 0x5eed;

fn report(n: u32, pass: bool, detail: String) {
    println!("{} criterion {n}: {detail}", if pass { "PASS" } else { "FAIL" });
}

/// Checks belief-goal consistency of the extended model behind `c`, if any.
/// Returns the number of extended states inspected and whether all passed.
fn consistency(model: &GameStructure, c: &Coalition, semantics: Semantics) -> (usize, bool) {
    if semantics == Semantics::Maintenance {
        return (0, true);
    }
    let ext = extend(model, &c.goals, semantics).expect("extension builds");
    (ext.num_states(), (0..ext.num_states()).all(|i| ext.is_consistent(i)))
}

fn coalitions(f: &Formula) -> Vec<&Coalition> {
    f.subformulas()
        .into_iter()
        .filter_map(|s| match s {
            Formula::Coalition(c) => Some(&**c),
            _ => None,
        })
        .collect()
}

fn gold_case(formula: &str, expect_initial: bool) -> (bool, String) {
    let m = gold3();
    let f = parse_formula(formula, &m).unwrap();
    let init = m.state_id(GOLD3_INITIAL).unwrap();
    let start = Instant::now();
    let report = check(&m, &f, Semantics::Achievement).unwrap();
    let elapsed = start.elapsed();
    let oracle = oracle_evaluate(&m, &f, Semantics::Achievement, DEFAULT_GUARD).unwrap();
    let (states, consistent) = consistency(&m, coalitions(&f)[0], Semantics::Achievement);
    let holds = report.holds_at(init);
    let pass = holds == expect_initial
        && oracle.satisfying.contains(init.0) == expect_initial
        && elapsed < GOLD_TIME_LIMIT
        && consistent;
    (
        pass,
        format!(
            "initial state {} (expected {}), oracle agrees: {}, {} extended states consistent: {}, check took {:?} (limit {:?})",
            if holds { "included" } else { "excluded" },
            if expect_initial { "included" } else { "excluded" },
            oracle.satisfying.contains(init.0) == holds,
            states,
            consistent,
            elapsed,
            GOLD_TIME_LIMIT
        ),
    )
}

#[test]
fn criterion_1_gold_win() {
    let (pass, detail) = gold_case(WIN_FORMULA, true);
    report(1, pass, detail);
    assert!(pass);
}

#[test]
fn criterion_2_capability_removal() {
    let (pass, detail) = gold_case(WIN_FORMULA_NO_COLLECT, false);
    report(2, pass, detail);
    assert!(pass);
}

#[test]
fn criterion_3_trace_rationality() {
    let m = gold_fragment();
    let ag = m.agent_id("Ag").unwrap();
    let f = parse_formula(WIN_FORMULA, &m).unwrap();
    let c = coalitions(&f)[0].clone();
    let goals = c.goals.get(ag).unwrap();
    let plans = m.plans_of(ag, &c.capabilities).unwrap();
    let rat = bdi_atles::checker::AgentRationality::new(&m, ag, goals, &plans).unwrap();
    let verdict = |text: &str| {
        let (states, actions) = parse_trace(text, &m).unwrap();
        let t = Trace::new(&m, ag, states, actions).unwrap();
        is_rational_trace(&m, &rat, goals, &t, Semantics::Achievement).unwrap()
    };
    let v1 = verdict("q0 right q1 pick q2 left q3 drop q4");
    let v2 = verdict("q0 noOp q9 right q5 noOp q1 pick q2");
    let pass = v1.is_rational() && v2.violation.as_ref().map(|v| v.index) == Some(0);
    report(3, pass, format!("first trace: {v1}; second trace: {v2}"));
    assert!(pass);
}

/// Random instances for criteria 4, 6 and 7.
fn random_instances() -> Vec<(GameStructure, Vec<Coalition>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..EQUIVALENCE_MODELS)
        .map(|_| {
            let m = random_model(&mut rng, &ModelShape::default());
            let cs = PATH_KINDS.iter().map(|&k| random_coalition(&mut rng, &m, k)).collect();
            (m, cs)
        })
        .collect()
}

#[test]
fn criterion_4_oracle_equivalence() {
    let start = Instant::now();
    let (mut agree, mut disagree, mut skipped, mut ext_states) = (0, 0, 0, 0);
    let mut consistent = true;
    let mut first_mismatch = None;
    for (m, cs) in random_instances() {
        for c in cs {
            let f = Formula::coalition(c.clone());
            for sem in Semantics::ALL {
                let (n, ok) = consistency(&m, &c, sem);
                ext_states += n;
                consistent &= ok;
                let symbolic = check(&m, &f, sem).unwrap();
                match oracle_evaluate(&m, &f, sem, DEFAULT_GUARD) {
                    Ok(o) if o.satisfying == symbolic.satisfying => agree += 1,
                    Ok(o) => {
                        disagree += 1;
                        first_mismatch.get_or_insert_with(|| {
                            format!(
                                "{} [{sem}]: check {:?} vs oracle {:?}",
                                f.display(&m),
                                symbolic.satisfying,
                                o.satisfying
                            )
                        });
                    }
                    Err(Error::Capacity(CapacityError::StrategyGuard { .. })) => skipped += 1,
                    Err(e) => panic!("oracle failed: {e}"),
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = disagree == 0 && skipped == 0 && elapsed < EQUIVALENCE_TIME_LIMIT && consistent;
    report(
        4,
        pass,
        format!(
            "{EQUIVALENCE_MODELS} models, {agree} agreeing instances, {disagree} disagreeing, {skipped} over the guard, \
             {ext_states} extended states consistent: {consistent}, {elapsed:?} (limit {EQUIVALENCE_TIME_LIMIT:?}){}",
            first_mismatch.map(|s| format!("; first mismatch: {s}")).unwrap_or_default()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let (mut pass_count, mut fail_count) = (0, 0);
    let mut first_failure = None;
    let mut consistent = true;
    for i in 0..MONOTONE_PAIRS {
        let m = random_model(&mut rng, &ModelShape::default());
        let kind = PATH_KINDS[i % PATH_KINDS.len()];
        let (weak, strong) = random_monotone_pair(&mut rng, &m, kind);
        for c in [&weak, &strong] {
            consistent &= consistency(&m, c, Semantics::Achievement).1;
        }
        let a = check(&m, &Formula::coalition(weak.clone()), Semantics::Achievement).unwrap();
        let b = check(&m, &Formula::coalition(strong.clone()), Semantics::Achievement).unwrap();
        if a.satisfying.is_subset(&b.satisfying) {
            pass_count += 1;
        } else {
            fail_count += 1;
            first_failure.get_or_insert_with(|| {
                format!(
                    "{} holds at {:?} but {} only at {:?}",
                    Formula::coalition(weak).display(&m),
                    a.state_names(&m),
                    Formula::coalition(strong).display(&m),
                    b.state_names(&m)
                )
            });
        }
    }
    let pass = fail_count == 0 && consistent;
    report(
        5,
        pass,
        format!(
            "{pass_count}/{MONOTONE_PAIRS} pairs keep set inclusion, {fail_count} violate it, consistency: {consistent}{}",
            first_failure.map(|s| format!("; first violation: {s}")).unwrap_or_default()
        ),
    );
    assert!(pass);
}

/// One state per world, goals never true and never achievable.
fn size_witness() -> (GameStructure, GoalAssignment) {
    let mut b = GameStructureBuilder::new();
    let a0 = b.agent("a0");
    let a1 = b.agent("a1");
    let never = [b.prop("u"), b.prop("v")];
    let go = b.action("go");
    let states: Vec<_> = (0..3).map(|i| b.state(&format!("s{i}"), &[])).collect();
    for (i, &q) in states.iter().enumerate() {
        b.avail(q, a0, &[NOOP, go]);
        b.transition(q, vec![go, NOOP], states[(i + 1) % 3]).unwrap();
    }
    b.inject_noop();
    let m = b.build();
    let mut rho = GoalAssignment::default();
    for a in [a0, a1] {
        rho.insert(
            a,
            GoalBase::new([BoolExpr::Atom(never[0]), BoolExpr::Atom(never[1])]).unwrap(),
        );
    }
    (m, rho)
}

#[test]
fn criterion_6_maintenance_size() {
    let mut models = 0;
    let mut maintenance_ok = true;
    let mut bound_ok = true;
    let mut consistent = true;
    let gold = gold3();
    let gold_f = parse_formula(WIN_FORMULA, &gold).unwrap();
    let mut cases: Vec<(GameStructure, GoalAssignment)> = random_instances()
        .into_iter()
        .flat_map(|(m, cs)| cs.into_iter().map(move |c| (m.clone(), c.goals)))
        .collect();
    cases.push((gold.clone(), coalitions(&gold_f)[0].goals.clone()));
    cases.push((gold_fragment(), coalitions(&gold_f)[0].goals.clone()));
    for (m, rho) in &cases {
        models += 1;
        let maint = extend(m, rho, Semantics::Maintenance).unwrap();
        maintenance_ok &= maint.num_states() == m.num_states();
        let ach = extend(m, rho, Semantics::Achievement).unwrap();
        bound_ok &= (ach.num_states() as u128) <= m.num_states() as u128 * ach.tuple_bound();
        consistent &= (0..ach.num_states()).all(|i| ach.is_consistent(i));
    }
    let (w, rho) = size_witness();
    let ach = extend(&w, &rho, Semantics::Achievement).unwrap();
    let bound = w.num_states() as u128 * ach.tuple_bound();
    let witness_ok = ach.num_states() as u128 == bound;
    let pass = maintenance_ok && bound_ok && witness_ok && consistent;
    report(
        6,
        pass,
        format!(
            "{models} models: maintenance |Q_rho| = |Q| for all: {maintenance_ok}; achievement within bound: {bound_ok}; \
             witness reaches the bound: {witness_ok} ({} = {bound}); consistency: {consistent}",
            ach.num_states()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_belief_goal_consistency() {
    let mut built = 0;
    let mut states = 0;
    let mut ok = true;
    let gold = gold3();
    let mut cases: Vec<(GameStructure, Coalition)> = Vec::new();
    for text in [WIN_FORMULA, WIN_FORMULA_NO_COLLECT] {
        let f = parse_formula(text, &gold).unwrap();
        cases.push((gold.clone(), coalitions(&f)[0].clone()));
    }
    let frag = gold_fragment();
    let f = parse_formula(WIN_FORMULA, &frag).unwrap();
    cases.push((frag.clone(), coalitions(&f)[0].clone()));
    for (m, cs) in random_instances() {
        for c in cs {
            cases.push((m.clone(), c));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    for i in 0..MONOTONE_PAIRS {
        let m = random_model(&mut rng, &ModelShape::default());
        let (weak, strong) = random_monotone_pair(&mut rng, &m, PATH_KINDS[i % PATH_KINDS.len()]);
        cases.push((m.clone(), weak));
        cases.push((m, strong));
    }
    let (w, rho) = size_witness();
    cases.push((
        w,
        Coalition {
            agents: Default::default(),
            capabilities: Default::default(),
            goals: rho,
            path: bdi_atles::formula::PathOp::Next(Formula::True),
        },
    ));
    for (m, c) in &cases {
        for sem in [Semantics::Achievement, Semantics::Priority] {
            if sem == Semantics::Priority && c.goals.iter().any(|(_, g)| g.priority().is_none()) {
                continue;
            }
            let ext = extend(m, &c.goals, sem).unwrap();
            built += 1;
            states += ext.num_states();
            ok &= (0..ext.num_states()).all(|i| ext.is_consistent(i));
            // Rational moves are computed at every state without failure.
            let _ = rationalities(&ext, &c.capabilities.clone());
        }
    }
    report(7, ok, format!("{built} achievement/priority models, {states} extended states, all consistent: {ok}"));
    assert!(ok);
}

#[test]
fn criterion_8_atl_degeneracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let (mut agree, mut total) = (0, 0);
    let mut first = None;
    for _ in 0..ATL_MODELS {
        let m = random_model(&mut rng, &ModelShape::default());
        for kind in PATH_KINDS {
            let c = random_plain_coalition(&mut rng, &m, kind);
            let f = Formula::coalition(c);
            let atl = atl_evaluate(&m, &f).unwrap();
            let symbolic = check(&m, &f, Semantics::Achievement).unwrap().satisfying;
            let oracle = oracle_evaluate(&m, &f, Semantics::Achievement, DEFAULT_GUARD).unwrap().satisfying;
            total += 1;
            if atl == symbolic && atl == oracle {
                agree += 1;
            } else {
                first.get_or_insert_with(|| format!("{}: atl {atl:?}, check {symbolic:?}, oracle {oracle:?}", f.display(&m)));
            }
        }
    }
    let pass = agree == total;
    report(
        8,
        pass,
        format!(
            "{ATL_MODELS} models, {agree}/{total} formulas agree with plain ATL{}",
            first.map(|s| format!("; first mismatch: {s}")).unwrap_or_default()
        ),
    );
    assert!(pass);
}
