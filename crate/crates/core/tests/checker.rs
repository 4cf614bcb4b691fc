mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbt_core::generate::{random_formula, random_kripke, random_lasso_kripke};
use sbt_core::ltl::{check_invariant, model_check, to_buchi, ExplicitKripke, Kripke, Ltl, Verdict};
use sbt_core::oracle::{find_violation, simple_path_count};
use sbt_core::ts::{enumerate, Limits, TransitionSystem};
use sbt_core::{Atom, Status};

/// Restricts a system to a subset of its initial states.
struct From<'a> {
    ts: &'a TransitionSystem,
    initials: Vec<usize>,
}

impl Kripke<Atom> for From<'_> {
    fn state_count(&self) -> usize {
        self.ts.state_count()
    }
    fn initial_states(&self) -> &[usize] {
        &self.initials
    }
    fn successors(&self, s: usize) -> &[usize] {
        self.ts.successors(s)
    }
    fn holds(&self, s: usize, a: &Atom) -> bool {
        self.ts.holds(s, a)
    }
}

fn verdicts(name: &str) -> Vec<(String, bool)> {
    let m = common::load(name);
    let ts = enumerate(&m, Limits::default()).unwrap();
    m.specs
        .iter()
        .map(|s| {
            let v = model_check(&ts, &s.formula).unwrap();
            if let Verdict::Violated(l) = &v {
                assert!(l.replays_in(&ts), "{}", s.name);
                assert!(!l.satisfies(&ts, &s.formula), "{}", s.name);
            }
            (s.name.clone(), v.holds())
        })
        .collect()
}

#[test]
fn corpus_verdicts() {
    let expect: &[(&str, &[bool])] = &[
        ("counter", &[true, false, false]),
        ("grid", &[true]),
        ("grid_small", &[true]),
        ("patrol", &[true, true, true]),
        ("quorum", &[true, true, false]),
        ("resume", &[false, true, true]),
        ("single_check", &[true]),
    ];
    for (name, want) in expect {
        let got: Vec<bool> = verdicts(name).into_iter().map(|v| v.1).collect();
        assert_eq!(&got, want, "{name}");
    }
}

#[test]
fn grid_goal_is_reached_from_every_goal() {
    for name in ["grid_small", "grid"] {
        let m = common::load(name);
        let ts = enumerate(&m, Limits::default()).unwrap();
        let f = &m.specs[0].formula;
        for &i in ts.initials() {
            let k = From {
                ts: &ts,
                initials: vec![i],
            };
            assert!(model_check(&k, f).unwrap().holds(), "{name} {:?}", ts.state(i));
            // each goal is a single simple path ending in a fixed point
            assert_eq!(find_violation(&k, f, usize::MAX, true), None);
        }
        let goals = if name == "grid" { 25 } else { 4 };
        assert_eq!(ts.initials().len(), goals);
    }
}

#[test]
fn root_never_fails_in_grid() {
    let m = common::load("grid");
    let ts = enumerate(&m, Limits::default()).unwrap();
    let p = Ltl::atom(Atom::Status(0, Status::Failure));
    let v = model_check(&ts, &Ltl::globally(p.clone())).unwrap();
    let l = v.counterexample().expect("violated");
    assert!(l.replays_in(&ts));
    assert!(!l.satisfies(&ts, &Ltl::globally(p.clone())));
    // the configuration before the first tick has every status invalid
    let inv = check_invariant(&ts, &p);
    let l = inv.counterexample().unwrap();
    assert_eq!(l.stem.len(), 1);
    assert!(l.replays_in(&ts));
    let first = Atom::Status(0, Status::Failure);
    assert!(ts.initials().contains(&l.stem[0]));
    assert!(!ts.holds(l.stem[0], &first));
    assert!(ts.holds(l.stem[0], &Atom::Status(0, Status::Invalid)));
}

#[test]
fn invariant_check_agrees_with_the_general_checker() {
    for (name, m) in common::corpus() {
        let ts = enumerate(&m, Limits::default()).unwrap();
        for s in &m.specs {
            if let Ltl::Release(a, b) = &s.formula.desugar() {
                if **a == Ltl::False && b.is_state_formula() {
                    let fast = check_invariant(&ts, b).holds();
                    assert_eq!(fast, model_check(&ts, &s.formula).unwrap().holds(), "{name}");
                }
            }
        }
    }
}

/// Compares the automata-based checker against direct lasso semantics.
fn compare(k: &ExplicitKripke, f: &Ltl<usize>, max_len: usize, simple: bool) -> bool {
    let v = model_check(k, f).unwrap();
    match &v {
        Verdict::Violated(l) => {
            assert!(l.replays_in(k), "{f:?} {k:?}");
            assert!(!l.satisfies(k, f), "{f:?} {k:?} {l:?}");
        }
        Verdict::Holds => {}
    }
    let oracle = find_violation(k, f, max_len, simple);
    if let Some(l) = &oracle {
        assert!(l.replays_in(k) && !l.satisfies(k, f));
    }
    assert_eq!(v.holds(), oracle.is_none(), "{f:?} on {k:?}");
    v.holds()
}

#[test]
fn lasso_shaped_graphs_match_simple_lassos() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut holds, mut total, mut big) = (0, 0, 0);
    while total < 400 {
        let n = if rng.gen_bool(0.2) { rng.gen_range(20..=200) } else { rng.gen_range(1..=12) };
        let k = random_lasso_kripke(&mut rng, n, 3);
        // cycle states have one successor, so off-cycle branching is all
        // that multiplies paths
        for s in 0..n {
            if k.succ[s].len() > 1 {
                assert!(!k.succ[s].iter().any(|&t| reaches(&k, t, s)));
            }
        }
        if simple_path_count(&k, 20_000) >= 20_000 {
            continue;
        }
        let f = random_formula(&mut rng, 3, 3);
        holds += compare(&k, &f, n, true) as usize;
        big += (n >= 20) as usize;
        total += 1;
    }
    assert!(holds > 40 && holds < 360, "{holds}");
    assert!(big > 40, "{big}");
}

fn reaches(k: &ExplicitKripke, from: usize, to: usize) -> bool {
    let mut seen = vec![false; k.succ.len()];
    let mut stack = vec![from];
    while let Some(s) = stack.pop() {
        if s == to {
            return true;
        }
        if !std::mem::replace(&mut seen[s], true) {
            stack.extend(&k.succ[s]);
        }
    }
    false
}

#[test]
fn dense_graphs_match_bounded_lassos() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut holds = 0;
    for _ in 0..300 {
        // keep n^(n·(depth+2)) paths small
        let n = rng.gen_range(1..=3);
        let (out, depth) = if n == 3 { (2, 2) } else { (n, 3) };
        let k = random_kripke(&mut rng, n, out, 2);
        let f = random_formula(&mut rng, depth, 2);
        holds += compare(&k, &f, n * (f.depth() + 2), false) as usize;
    }
    assert!(holds > 30 && holds < 270, "{holds}");
}

#[test]
fn automaton_accepts_exactly_the_models_of_its_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let f = random_formula(&mut rng, 3, 2);
        let b = to_buchi(&f.to_nnf());
        let stem = rng.gen_range(0..3);
        let len = stem + rng.gen_range(1..4);
        let word: Vec<Vec<bool>> = (0..len).map(|_| (0..2).map(|_| rng.gen_bool(0.5)).collect()).collect();
        let direct = sbt_core::ltl::lasso::evaluate(&f, stem, len - stem, &|i, a| word[i][*a]);
        // the automaton indexes valuations by its own atom list
        let letters: Vec<Vec<bool>> = word.iter().map(|w| b.atoms.iter().map(|&a| w[a]).collect()).collect();
        assert_eq!(b.accepts_lasso(stem, &letters), direct, "{f:?} {word:?} stem {stem}");
    }
}
