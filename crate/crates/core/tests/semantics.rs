mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbt_core::generate::{random_model, GenConfig};
use sbt_core::small_step::{begin_tick, run_to_completion, StepEvent};
use sbt_core::ts::{enumerate, Limits};
use sbt_core::{initial_configuration, tick_big_step, Configuration, SbtModel, Status};

fn status_of(m: &SbtModel, c: &Configuration, name: &str) -> Status {
    c.statuses[m.find_node(name).unwrap()]
}

#[test]
fn grid_initial_configuration() {
    let m = common::load("grid");
    let c = initial_configuration(&m, &[3, 2]).unwrap();
    assert_eq!(c.vars.blackboard, vec![0, 0]);
    assert_eq!(c.vars.env, vec![3, 2]);
    assert!(c.statuses.iter().all(|&s| s == Status::Invalid));
    assert_eq!(c.tick_count, 0);
}

#[test]
fn grid_two_tick_hand_trace() {
    let m = common::load("grid");
    let c0 = initial_configuration(&m, &[1, 0]).unwrap();

    // tick 1: at_goal fails, move_x steps right and keeps running
    let t1 = tick_big_step(&m, &c0, &[1, 0]).unwrap();
    assert_eq!(t1.root_status, Status::Running);
    assert_eq!(status_of(&m, &t1.config, "at_goal"), Status::Failure);
    assert_eq!(status_of(&m, &t1.config, "move_x"), Status::Running);
    assert_eq!(status_of(&m, &t1.config, "move_y"), Status::Invalid);
    assert_eq!(t1.config.vars.blackboard, vec![1, 0]);
    assert_eq!(t1.config.tick_count, 1);

    // tick 2: at the goal, the sequence is not ticked at all
    let t2 = tick_big_step(&m, &t1.config, &[1, 0]).unwrap();
    assert_eq!(t2.root_status, Status::Success);
    assert_eq!(status_of(&m, &t2.config, "at_goal"), Status::Success);
    assert_eq!(status_of(&m, &t2.config, "move_x"), Status::Invalid);
    assert_eq!(status_of(&m, &t2.config, "move_y"), Status::Invalid);
    assert_eq!(t2.config.vars.blackboard, vec![1, 0]);
}

#[test]
fn frozen_goal_cannot_move() {
    let m = common::load("grid");
    let c0 = initial_configuration(&m, &[1, 0]).unwrap();
    assert!(tick_big_step(&m, &c0, &[2, 0]).is_err());
}

const MEMORY: &str = "tree T {
    blackboard { started: bool = false; }
    root: KIND {
        action a {
            on !started -> started := true; return running;
            on started -> return success;
        }
        check c { started }
    }
}";

#[test]
fn memory_sequence_resumes_where_plain_sequence_restarts() {
    let mem = common::model(&MEMORY.replace("KIND", "sequence_m s"));
    let plain = common::model(&MEMORY.replace("KIND", "sequence s"));
    for (m, resumes) in [(&mem, true), (&plain, false)] {
        let c0 = initial_configuration(m, &[]).unwrap();
        let t1 = tick_big_step(m, &c0, &[]).unwrap();
        assert_eq!(t1.root_status, Status::Running);
        assert_eq!(t1.config.memory.resume_index, if resumes { vec![0] } else { vec![] });
        let t2 = tick_big_step(m, &t1.config, &[]).unwrap();
        assert_eq!(t2.root_status, Status::Success);
        assert_eq!(status_of(m, &t2.config, "a"), Status::Success);
        assert_eq!(status_of(m, &t2.config, "c"), Status::Success);
        assert_eq!(t2.trace.len(), 2);
    }
    // resuming skips children before the resume index
    let m = common::model(
        "tree T { blackboard { n: int[0..3] = 0; } root: sequence_m s {
            check first { true }
            action second { on n < 2 -> n := n + 1; return running; on true -> return success; } } }",
    );
    let c0 = initial_configuration(&m, &[]).unwrap();
    let t1 = tick_big_step(&m, &c0, &[]).unwrap();
    assert_eq!(t1.config.memory.resume_index, vec![1]);
    let t2 = tick_big_step(&m, &t1.config, &[]).unwrap();
    assert_eq!(status_of(&m, &t2.config, "first"), Status::Invalid);
    assert_eq!(t2.trace.len(), 1);
    let t3 = tick_big_step(&m, &t2.config, &[]).unwrap();
    assert_eq!(t3.root_status, Status::Success);
    assert_eq!(t3.config.memory.resume_index, vec![0]);
}

#[test]
fn memoryless_tree_status_depends_only_on_env() {
    let m = common::model(
        "tree T { env { a: bool; b: int[0..2]; } root: fallback { check x { a } inverter { check y { b > 1 } } } }",
    );
    let ts = enumerate(&m, Limits::default()).unwrap();
    let mut seen = std::collections::HashMap::new();
    for id in 0..ts.states().len() {
        let c = ts.configuration(id);
        if c.root_status() == Status::Invalid {
            continue;
        }
        let prev = seen.insert(c.vars.env.clone(), c.root_status());
        assert!(prev.is_none_or(|p| p == c.root_status()));
    }
}

// ---- fast-forwarding ----

fn events_well_formed(m: &SbtModel, events: &[StepEvent]) -> bool {
    let mut open = Vec::new();
    for e in events {
        match *e {
            StepEvent::EnterNode(n) => open.push(n),
            StepEvent::LeafResult(n, _) => {
                if open.last() != Some(&n) || !m.nodes[n].kind.is_leaf() {
                    return false;
                }
            }
            StepEvent::ExitNode(n, _) => {
                if open.pop() != Some(n) {
                    return false;
                }
            }
        }
    }
    open.is_empty()
}

/// Compares both engines on every reachable configuration and every
/// admissible environment choice.
fn assert_engines_agree(m: &SbtModel) -> usize {
    let ts = enumerate(m, Limits::default()).unwrap();
    let mut pairs = 0;
    for id in 0..ts.states().len() {
        let c = ts.configuration(id);
        for env in m.next_env_choices(&c.vars.env) {
            let big = tick_big_step(m, &c, &env).unwrap();
            let (config, status, events) = run_to_completion(m, begin_tick(m, &c, &env).unwrap()).unwrap();
            assert_eq!((&config, status), (&big.config, big.root_status));
            assert!(events.len() <= 3 * m.nodes.len());
            assert!(events_well_formed(m, &events), "{events:?}");
            pairs += 1;
        }
    }
    pairs
}

#[test]
fn single_check_takes_three_events() {
    let m = common::load("single_check");
    let c = initial_configuration(&m, &[]).unwrap();
    let (_, status, events) = run_to_completion(&m, begin_tick(&m, &c, &[]).unwrap()).unwrap();
    let c_id = m.find_node("c").unwrap();
    assert_eq!(status, Status::Success);
    assert_eq!(
        events,
        vec![
            StepEvent::EnterNode(c_id),
            StepEvent::LeafResult(c_id, Status::Success),
            StepEvent::ExitNode(c_id, Status::Success)
        ]
    );
}

#[test]
fn grid_first_tick_matches() {
    let m = common::load("grid");
    let c = initial_configuration(&m, &[1, 0]).unwrap();
    let machine = begin_tick(&m, &c, &[1, 0]).unwrap();
    assert_eq!(machine.pending_env, vec![1, 0]);
    let (config, status, _) = run_to_completion(&m, machine).unwrap();
    let big = tick_big_step(&m, &c, &[1, 0]).unwrap();
    assert_eq!(config, big.config);
    assert_eq!(status, big.root_status);
}

#[test]
fn engines_agree_on_the_corpus() {
    for (_, m) in common::corpus() {
        assert_engines_agree(&m);
    }
}

#[test]
fn engines_agree_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut pairs = 0;
    for _ in 0..200 {
        let m = random_model(&mut rng, GenConfig::small());
        pairs += assert_engines_agree(&m);
    }
    assert!(pairs > 1000, "{pairs}");
    // and on random (configuration, env) pairs that need not be reachable
    for _ in 0..40 {
        let m = random_model(&mut rng, GenConfig::small());
        let ts = enumerate(&m, Limits::default()).unwrap();
        for _ in 0..50 {
            let c = ts.configuration(rng.gen_range(0..ts.states().len()));
            let envs = m.next_env_choices(&c.vars.env);
            let env = &envs[rng.gen_range(0..envs.len())];
            let big = tick_big_step(&m, &c, env).unwrap();
            let (config, status, _) = run_to_completion(&m, begin_tick(&m, &c, env).unwrap()).unwrap();
            assert_eq!((config, status), (big.config, big.root_status));
        }
    }
}
