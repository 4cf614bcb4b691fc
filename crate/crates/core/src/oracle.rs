//! Slow reference implementations used to test the fast paths: a
//! fixed-point state enumerator that shares nothing with [`crate::ts`]
//! except the big-step tick, and a lasso enumerator that decides LTL by
//! evaluating formulas directly on ultimately periodic paths.

use std::collections::BTreeSet;

use crate::ltl::{lasso, Kripke, Lasso, Ltl};
use crate::model::SbtModel;
use crate::semantics::{initial_configuration, tick_big_step, Configuration};

/// `[resume.., env.., blackboard.., status codes..]`, built independently of
/// the transition-system encoding.
pub type FlatState = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveGraph {
    pub initials: BTreeSet<FlatState>,
    pub states: BTreeSet<FlatState>,
    pub edges: BTreeSet<(FlatState, FlatState)>,
}

fn flatten(c: &Configuration) -> FlatState {
    let mut v: Vec<i64> = c.memory.resume_index.iter().map(|&i| i as i64).collect();
    v.extend(&c.vars.env);
    v.extend(&c.vars.blackboard);
    v.extend(c.statuses.iter().map(|s| s.code()));
    v
}

/// Every environment valuation, by odometer over the full domains;
/// inadmissible ones are filtered by the caller.
fn all_envs(model: &SbtModel) -> Vec<Vec<i64>> {
    let domains: Vec<(i64, i64)> = model.env_vars.iter().map(|v| v.domain.bounds(&model.enums)).collect();
    let mut out = Vec::new();
    let mut cur: Vec<i64> = domains.iter().map(|d| d.0).collect();
    loop {
        out.push(cur.clone());
        let mut i = domains.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < domains[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = domains[i].0;
        }
    }
}

/// Reachable graph by naive fixed-point iteration. `None` if more than
/// `max_states` states are found.
pub fn naive_enumerate(model: &SbtModel, max_states: usize) -> Option<NaiveGraph> {
    let envs = all_envs(model);
    let mut configs: Vec<Configuration> = Vec::new();
    let mut states = BTreeSet::new();
    let mut initials = BTreeSet::new();
    for env in &envs {
        // the semantics rejects env values that contradict a declared one
        if let Ok(c) = initial_configuration(model, env) {
            let f = flatten(&c);
            initials.insert(f.clone());
            if states.insert(f) {
                configs.push(c);
            }
        }
    }
    let mut edges = BTreeSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = configs.clone();
        for c in &snapshot {
            let from = flatten(c);
            for env in &envs {
                let Ok(o) = tick_big_step(model, c, env) else {
                    continue; // frozen variable would change
                };
                let mut next = o.config;
                next.tick_count = 0;
                let to = flatten(&next);
                edges.insert((from.clone(), to.clone()));
                if states.insert(to) {
                    changed = true;
                    configs.push(next);
                    if states.len() > max_states {
                        return None;
                    }
                }
            }
        }
    }
    Some(NaiveGraph {
        initials,
        states,
        edges,
    })
}

/// Searches for a lasso from an initial state that violates `f`, by direct
/// semantics. With `simple` only lassos without repeated states are tried
/// (complete when every state on a cycle has a single successor);
/// otherwise every lasso with at most `max_len` states is tried.
pub fn find_violation<A, K: Kripke<A> + ?Sized>(
    k: &K,
    f: &Ltl<A>,
    max_len: usize,
    simple: bool,
) -> Option<Lasso> {
    let mut path = Vec::new();
    for &s in k.initial_states() {
        path.push(s);
        if let Some(l) = extend(k, f, &mut path, max_len, simple) {
            return Some(l);
        }
        path.pop();
    }
    None
}

fn extend<A, K: Kripke<A> + ?Sized>(
    k: &K,
    f: &Ltl<A>,
    path: &mut Vec<usize>,
    max_len: usize,
    simple: bool,
) -> Option<Lasso> {
    let last = *path.last().unwrap();
    for &t in k.successors(last) {
        // close a loop back to every earlier occurrence of `t`
        for j in 0..path.len() {
            if path[j] == t {
                let holds = lasso::evaluate(f, j, path.len() - j, &|i, a| k.holds(path[i], a));
                if !holds {
                    return Some(Lasso {
                        stem: path[..j].to_vec(),
                        cycle: path[j..].to_vec(),
                    });
                }
            }
        }
        if path.len() < max_len && !(simple && path.contains(&t)) {
            path.push(t);
            let r = extend(k, f, path, max_len, simple);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
    }
    None
}

/// Number of simple paths from the initial states, saturating at `cap`.
pub fn simple_path_count<A, K: Kripke<A> + ?Sized>(k: &K, cap: usize) -> usize {
    fn go<A, K: Kripke<A> + ?Sized>(k: &K, path: &mut Vec<usize>, count: &mut usize, cap: usize) {
        *count += 1;
        if *count >= cap {
            return;
        }
        let last = *path.last().unwrap();
        for &t in k.successors(last) {
            if !path.contains(&t) {
                path.push(t);
                go(k, path, count, cap);
                path.pop();
                if *count >= cap {
                    return;
                }
            }
        }
    }
    let mut count = 0;
    for &s in k.initial_states() {
        go(k, &mut vec![s], &mut count, cap);
    }
    count.min(cap)
}
