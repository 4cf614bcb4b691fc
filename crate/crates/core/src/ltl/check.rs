//! Automata-theoretic model checking: product of a [`Kripke`] structure with
//! the Büchi automaton of the negated formula, explored on the fly by nested
//! depth-first search.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use thiserror::Error;

use super::buchi::{to_buchi, BuchiAutomaton};
use super::{lasso, Kripke, Ltl};

/// Ultimately periodic path `stem · cycle^ω` of system state ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<usize>,
    /// Non-empty; its last state has an edge back to its first.
    pub cycle: Vec<usize>,
}

impl Lasso {
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        self.stem.iter().chain(&self.cycle).copied()
    }

    /// Whether this is a real path of `k` starting in an initial state.
    pub fn replays_in<A, K: Kripke<A> + ?Sized>(&self, k: &K) -> bool {
        let path: Vec<usize> = self.states().collect();
        let Some(&first) = path.first() else {
            return false;
        };
        if self.cycle.is_empty() || !k.initial_states().contains(&first) {
            return false;
        }
        let edge = |a: usize, b: usize| a < k.state_count() && k.successors(a).contains(&b);
        path.windows(2).all(|w| edge(w[0], w[1]))
            && edge(*self.cycle.last().unwrap(), self.cycle[0])
    }

    /// Truth of `f` on the path, by direct semantics.
    pub fn satisfies<A, K: Kripke<A> + ?Sized>(&self, k: &K, f: &Ltl<A>) -> bool {
        let path: Vec<usize> = self.states().collect();
        lasso::evaluate(f, self.stem.len(), self.cycle.len(), &|i, a| {
            k.holds(path[i], a)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Lasso),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&Lasso> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(l) => Some(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("product exploration exceeded {limit} states ({buchi_states} automaton states)")]
pub struct ResourceExceeded {
    pub limit: usize,
    pub explored: usize,
    pub buchi_states: usize,
}

pub const DEFAULT_PRODUCT_LIMIT: usize = 20_000_000;

pub fn model_check<A, K>(k: &K, f: &Ltl<A>) -> Result<Verdict, ResourceExceeded>
where
    A: Clone + Eq + Hash,
    K: Kripke<A> + ?Sized,
{
    model_check_with_limit(k, f, DEFAULT_PRODUCT_LIMIT)
}

pub fn model_check_with_limit<A, K>(
    k: &K,
    f: &Ltl<A>,
    limit: usize,
) -> Result<Verdict, ResourceExceeded>
where
    A: Clone + Eq + Hash,
    K: Kripke<A> + ?Sized,
{
    let negated = Ltl::not(f.clone()).to_nnf();
    let automaton = to_buchi(&negated);
    let mut product = Product {
        k,
        a: &automaton,
        valuations: HashMap::new(),
    };
    match nested_dfs(&mut product, limit)? {
        None => Ok(Verdict::Holds),
        Some(l) => Ok(Verdict::Violated(l)),
    }
}

struct Product<'a, A, K: ?Sized> {
    k: &'a K,
    a: &'a BuchiAutomaton<A>,
    valuations: HashMap<usize, Vec<bool>>,
}

type Node = (usize, usize);

impl<A, K: Kripke<A> + ?Sized> Product<'_, A, K> {
    fn admits(&mut self, s: usize, q: usize) -> bool {
        let (k, atoms) = (self.k, &self.a.atoms);
        let v = self
            .valuations
            .entry(s)
            .or_insert_with(|| atoms.iter().map(|x| k.holds(s, x)).collect());
        self.a.labels[q].admits(v)
    }

    fn roots(&mut self) -> Vec<Node> {
        let mut out = Vec::new();
        for &s in self.k.initial_states() {
            for &q in &self.a.succ[BuchiAutomaton::<A>::INITIAL] {
                if self.admits(s, q) {
                    out.push((s, q));
                }
            }
        }
        out
    }

    fn successors(&mut self, (s, q): Node) -> Vec<Node> {
        let mut out = Vec::new();
        for &s2 in self.k.successors(s) {
            for &q2 in &self.a.succ[q] {
                if self.admits(s2, q2) {
                    out.push((s2, q2));
                }
            }
        }
        out
    }
}

struct Frame {
    node: Node,
    succ: Vec<Node>,
    next: usize,
}

/// Courcoubetis–Vardi–Wolper–Yannakakis nested search, iterative.
fn nested_dfs<A, K: Kripke<A> + ?Sized>(
    p: &mut Product<'_, A, K>,
    limit: usize,
) -> Result<Option<Lasso>, ResourceExceeded> {
    let mut blue: HashSet<Node> = HashSet::new();
    let mut red: HashSet<Node> = HashSet::new();
    let exceeded = |explored: usize| ResourceExceeded {
        limit,
        explored,
        buchi_states: p.a.state_count(),
    };
    for root in p.roots() {
        if !blue.insert(root) {
            continue;
        }
        let succ = p.successors(root);
        let mut stack = vec![Frame {
            node: root,
            succ,
            next: 0,
        }];
        while let Some(top) = stack.last_mut() {
            if top.next < top.succ.len() {
                let y = top.succ[top.next];
                top.next += 1;
                if blue.insert(y) {
                    if blue.len() + red.len() > limit {
                        return Err(exceeded(blue.len() + red.len()));
                    }
                    let succ = p.successors(y);
                    stack.push(Frame {
                        node: y,
                        succ,
                        next: 0,
                    });
                }
                continue;
            }
            let seed = top.node;
            if p.a.accepting[seed.1] {
                if let Some(cycle) = inner_dfs(p, seed, &mut red) {
                    let stem = stack[..stack.len() - 1].iter().map(|f| f.node.0).collect();
                    return Ok(Some(Lasso {
                        stem,
                        cycle: cycle.into_iter().map(|n| n.0).collect(),
                    }));
                }
                if blue.len() + red.len() > limit {
                    return Err(exceeded(blue.len() + red.len()));
                }
            }
            stack.pop();
        }
    }
    Ok(None)
}

/// Searches for a path from `seed` back to itself through states not yet
/// coloured red. Returns the cycle starting at `seed`.
fn inner_dfs<A, K: Kripke<A> + ?Sized>(
    p: &mut Product<'_, A, K>,
    seed: Node,
    red: &mut HashSet<Node>,
) -> Option<Vec<Node>> {
    red.insert(seed);
    let succ = p.successors(seed);
    let mut stack = vec![Frame {
        node: seed,
        succ,
        next: 0,
    }];
    while let Some(top) = stack.last_mut() {
        if top.next == top.succ.len() {
            stack.pop();
            continue;
        }
        let y = top.succ[top.next];
        top.next += 1;
        if y == seed {
            return Some(stack.iter().map(|f| f.node).collect());
        }
        if red.insert(y) {
            let succ = p.successors(y);
            stack.push(Frame {
                node: y,
                succ,
                next: 0,
            });
        }
    }
    None
}

/// Truth of a formula without temporal operators in one state.
pub fn eval_state<A, K: Kripke<A> + ?Sized>(k: &K, s: usize, f: &Ltl<A>) -> bool {
    match f {
        Ltl::True => true,
        Ltl::False => false,
        Ltl::Atom(a) => k.holds(s, a),
        Ltl::Not(a) => !eval_state(k, s, a),
        Ltl::And(a, b) => eval_state(k, s, a) && eval_state(k, s, b),
        Ltl::Or(a, b) => eval_state(k, s, a) || eval_state(k, s, b),
        Ltl::Implies(a, b) => !eval_state(k, s, a) || eval_state(k, s, b),
        _ => panic!("temporal operator in a state formula"),
    }
}

/// Checks `G p` for a state formula `p` by breadth-first search. A
/// counterexample reaches a violating state by a shortest path and then
/// follows first successors until the path closes into a cycle.
pub fn check_invariant<A, K: Kripke<A> + ?Sized>(k: &K, p: &Ltl<A>) -> Verdict {
    assert!(p.is_state_formula(), "invariant must be a state formula");
    let mut parent: HashMap<usize, Option<usize>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in k.initial_states() {
        if parent.insert(s, None).is_none() {
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if !eval_state(k, s, p) {
            let mut path = vec![s];
            let mut cur = s;
            while let Some(Some(prev)) = parent.get(&cur) {
                path.push(*prev);
                cur = *prev;
            }
            path.reverse();
            return Verdict::Violated(close_lasso(k, path));
        }
        for &t in k.successors(s) {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(t) {
                e.insert(Some(s));
                queue.push_back(t);
            }
        }
    }
    Verdict::Holds
}

fn close_lasso<A, K: Kripke<A> + ?Sized>(k: &K, mut path: Vec<usize>) -> Lasso {
    let mut seen: HashMap<usize, usize> = path.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    loop {
        let last = *path.last().expect("path is non-empty");
        let next = k.successors(last)[0];
        if let Some(&j) = seen.get(&next) {
            let cycle = path.split_off(j);
            return Lasso { stem: path, cycle };
        }
        seen.insert(next, path.len());
        path.push(next);
    }
}
