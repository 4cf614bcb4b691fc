mod common;

use std::collections::{BTreeSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbt_core::generate::{random_model, GenConfig};
use sbt_core::oracle::naive_enumerate;
use sbt_core::ts::{enumerate, GraphDump, Limits, TransitionSystem};
use sbt_core::{Atom, SbtModel, Status};

fn system(m: &SbtModel) -> TransitionSystem {
    enumerate(m, Limits::default()).unwrap()
}

fn matches_oracle(m: &SbtModel) {
    let ts = system(m);
    let naive = naive_enumerate(m, 10_000).expect("small enough");
    let states: BTreeSet<Vec<i64>> = ts.states().iter().map(|s| s.0.clone()).collect();
    let initials: BTreeSet<Vec<i64>> = ts.initials().iter().map(|&i| ts.state(i).0.clone()).collect();
    let mut edges = BTreeSet::new();
    for s in 0..ts.states().len() {
        for &t in ts.edges(s) {
            edges.insert((ts.state(s).0.clone(), ts.state(t).0.clone()));
        }
    }
    assert_eq!(initials, naive.initials);
    assert_eq!(states, naive.states);
    assert_eq!(edges, naive.edges);
}

#[test]
fn corpus_matches_the_naive_enumerator() {
    for (_, m) in common::corpus() {
        matches_oracle(&m);
    }
}

#[test]
fn random_models_match_the_naive_enumerator() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        matches_oracle(&random_model(&mut rng, GenConfig::small()));
    }
}

#[test]
fn grid_is_deterministic_per_goal() {
    let m = common::load("grid");
    let ts = system(&m);
    assert_eq!(ts.initials().len(), 25);
    for s in 0..ts.states().len() {
        assert_eq!(ts.edges(s).len(), 1);
    }
}

/// Ticks until `target` holds, by breadth-first search.
fn ticks_until(ts: &TransitionSystem, from: usize, target: &Atom) -> Option<usize> {
    let mut dist = vec![usize::MAX; ts.states().len()];
    let mut queue = VecDeque::from([from]);
    dist[from] = 0;
    while let Some(s) = queue.pop_front() {
        if ts.eval_atom(s, target) {
            return Some(dist[s]);
        }
        for &t in ts.edges(s) {
            if dist[t] == usize::MAX {
                dist[t] = dist[s] + 1;
                queue.push_back(t);
            }
        }
    }
    None
}

fn initial_with_env(ts: &TransitionSystem, env: &[i64]) -> usize {
    *ts.initials()
        .iter()
        .find(|&&i| ts.configuration(i).vars.env == env)
        .unwrap()
}

#[test]
fn grid_reaches_goal_in_two_ticks() {
    let m = common::load("grid");
    let ts = system(&m);
    let start = initial_with_env(&ts, &[1, 0]);
    let at_goal = Atom::Status(m.find_node("at_goal").unwrap(), Status::Success);
    assert_eq!(ticks_until(&ts, start, &at_goal), Some(2));
    let after_one = ts.edges(start)[0];
    let move_x = Atom::Status(m.find_node("move_x").unwrap(), Status::Running);
    assert!(ts.eval_atom(after_one, &move_x));
    assert!(!ts.eval_atom(start, &move_x));
}

#[test]
fn grid_far_corner_succeeds_at_tick_eight() {
    let m = common::load("grid");
    let ts = system(&m);
    let start = initial_with_env(&ts, &[4, 4]);
    let root_success = Atom::Status(0, Status::Success);
    assert_eq!(ticks_until(&ts, start, &root_success), Some(8));
}

#[test]
fn small_grid_state_count_is_pinned() {
    let m = common::load("grid_small");
    let ts = system(&m);
    let naive = naive_enumerate(&m, 1000).unwrap();
    assert_eq!(ts.states().len(), naive.states.len());
    // 4 goal choices; (0,0) → 2 states, (1,0) and (0,1) → 3, (1,1) → 4
    assert_eq!(ts.states().len(), 12);
}

#[test]
fn frozen_variables_never_change() {
    for (_, m) in common::corpus() {
        let ts = system(&m);
        let frozen: Vec<usize> = (0..m.env_vars.len()).filter(|&i| m.env_vars[i].frozen).collect();
        for s in 0..ts.states().len() {
            let a = ts.configuration(s);
            for &t in ts.edges(s) {
                let b = ts.configuration(t);
                for &i in &frozen {
                    assert_eq!(a.vars.env[i], b.vars.env[i]);
                }
            }
        }
    }
}

#[test]
fn dumps_are_deterministic_and_parse_back() {
    for (name, m) in common::corpus() {
        let a = system(&m).dump();
        assert_eq!(a, system(&m).dump(), "{name}");
        let g = GraphDump::parse(&a).unwrap();
        assert_eq!(g.states, system(&m).states().len());
    }
}

#[test]
fn limit_is_reported_not_truncated() {
    let m = common::load("grid");
    let err = enumerate(
        &m,
        Limits {
            max_states: 10,
            ..Limits::default()
        },
    )
    .unwrap_err();
    assert!(err.stats.states >= 10);
}
