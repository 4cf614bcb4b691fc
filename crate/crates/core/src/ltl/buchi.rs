//! LTL to Büchi translation: the classical on-the-fly tableau producing a
//! generalized Büchi automaton, followed by counter degeneralization.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write};
use std::hash::Hash;

use super::Ltl;

/// Literals a state demands of the position it reads.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Label {
    /// Indices into [`BuchiAutomaton::atoms`] that must hold.
    pub pos: Vec<usize>,
    /// Indices that must not hold.
    pub neg: Vec<usize>,
}

impl Label {
    pub fn admits(&self, valuation: &[bool]) -> bool {
        self.pos.iter().all(|&a| valuation[a]) && self.neg.iter().all(|&a| !valuation[a])
    }
}

/// Büchi automaton with a fresh, unlabelled initial state `0`.
///
/// Transitions are read on their destination: taking `p -> q` consumes one
/// letter, which must satisfy `labels[q]`.
#[derive(Clone, Debug)]
pub struct BuchiAutomaton<A> {
    pub atoms: Vec<A>,
    pub labels: Vec<Label>,
    pub succ: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl<A> BuchiAutomaton<A> {
    pub const INITIAL: usize = 0;

    pub fn state_count(&self) -> usize {
        self.succ.len()
    }

    /// `(source, guard, destination)` triples in order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, &Label, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(move |(p, qs)| qs.iter().map(move |&q| (p, &self.labels[q], q)))
    }

    /// Whether the automaton accepts the lasso word given by per-position
    /// atom valuations (`stem_len` positions, then the repeating rest).
    pub fn accepts_lasso(&self, stem_len: usize, word: &[Vec<bool>]) -> bool {
        let n = word.len();
        let succ = |i: usize| if i + 1 == n { stem_len } else { i + 1 };
        // product graph over (automaton state, position); position n = "before 0"
        let idx = |q: usize, i: usize| q * (n + 1) + i;
        let total = self.state_count() * (n + 1);
        let mut edges = vec![Vec::new(); total];
        for (p, qs) in self.succ.iter().enumerate() {
            for i in 0..=n {
                let j = if i == n { 0 } else { succ(i) };
                for &q in qs {
                    if self.labels[q].admits(&word[j]) {
                        edges[idx(p, i)].push(idx(q, j));
                    }
                }
            }
        }
        // reachable from (initial, before-0)
        let mut seen = vec![false; total];
        let mut stack = vec![idx(Self::INITIAL, n)];
        seen[stack[0]] = true;
        while let Some(v) = stack.pop() {
            for &w in &edges[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        // an accepting reachable node that lies on a cycle
        (0..total).any(|v| {
            if !seen[v] || !self.accepting[v / (n + 1)] || v % (n + 1) == n {
                return false;
            }
            let mut back = vec![false; total];
            let mut stack = edges[v].clone();
            while let Some(w) = stack.pop() {
                if w == v {
                    return true;
                }
                if !back[w] {
                    back[w] = true;
                    stack.extend(&edges[w]);
                }
            }
            false
        })
    }
}

impl<A: fmt::Display> BuchiAutomaton<A> {
    /// Plain-text dump: a header, the accepting states, then one line per
    /// transition with its guard.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let edges: usize = self.succ.iter().map(Vec::len).sum();
        writeln!(out, "states={} transitions={} initial=0", self.state_count(), edges).unwrap();
        let acc: Vec<String> = (0..self.state_count())
            .filter(|&q| self.accepting[q])
            .map(|q| q.to_string())
            .collect();
        writeln!(out, "accepting: {}", acc.join(" ")).unwrap();
        for (p, label, q) in self.transitions() {
            let mut lits: Vec<String> = label.pos.iter().map(|&a| format!("{}", self.atoms[a])).collect();
            lits.extend(label.neg.iter().map(|&a| format!("!({})", self.atoms[a])));
            let guard = if lits.is_empty() {
                "true".to_string()
            } else {
                lits.join(" & ")
            };
            writeln!(out, "{p} -> {q} [{guard}]").unwrap();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sub {
    True,
    False,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

/// Hash-consed subformulas of an NNF formula.
struct Arena<A> {
    subs: Vec<Sub>,
    index: HashMap<Sub, usize>,
    atoms: Vec<A>,
}

impl<A: Clone + Eq> Arena<A> {
    fn intern(&mut self, s: Sub) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        self.subs.push(s);
        self.index.insert(s, self.subs.len() - 1);
        self.subs.len() - 1
    }

    fn atom(&mut self, a: &A) -> usize {
        match self.atoms.iter().position(|x| x == a) {
            Some(i) => i,
            None => {
                self.atoms.push(a.clone());
                self.atoms.len() - 1
            }
        }
    }

    fn add(&mut self, f: &Ltl<A>) -> usize {
        let s = match f {
            Ltl::True => Sub::True,
            Ltl::False => Sub::False,
            Ltl::Atom(a) => Sub::Lit(self.atom(a), true),
            Ltl::Not(inner) => match &**inner {
                Ltl::Atom(a) => Sub::Lit(self.atom(a), false),
                Ltl::True => Sub::False,
                Ltl::False => Sub::True,
                _ => panic!("formula is not in negation normal form"),
            },
            Ltl::And(a, b) => Sub::And(self.add(a), self.add(b)),
            Ltl::Or(a, b) => Sub::Or(self.add(a), self.add(b)),
            Ltl::Next(a) => Sub::Next(self.add(a)),
            Ltl::Until(a, b) => Sub::Until(self.add(a), self.add(b)),
            Ltl::Release(a, b) => Sub::Release(self.add(a), self.add(b)),
            Ltl::Implies(..) | Ltl::StrongRelease(..) | Ltl::Globally(_) | Ltl::Finally(_) => {
                panic!("formula is not in negation normal form")
            }
        };
        self.intern(s)
    }
}

type Set = BTreeSet<usize>;

/// Pseudo-predecessor marking tableau nodes that may start a run.
const INIT: usize = usize::MAX;

#[derive(Clone)]
struct Pending {
    incoming: Set,
    new: Set,
    old: Set,
    next: Set,
}

struct TableauNode {
    incoming: Set,
    old: Set,
    next: Set,
}

/// Translates a formula in negation normal form (see [`Ltl::to_nnf`]).
pub fn to_buchi<A: Clone + Eq + Hash>(f: &Ltl<A>) -> BuchiAutomaton<A> {
    let mut arena = Arena {
        subs: Vec::new(),
        index: HashMap::new(),
        atoms: Vec::new(),
    };
    let root = arena.add(f);
    let nodes = tableau(&arena, root);

    // generalized acceptance: one set per until subformula
    let untils: Vec<(usize, usize)> = arena
        .subs
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            Sub::Until(_, b) => Some((i, *b)),
            _ => None,
        })
        .collect();
    let in_set: Vec<Vec<bool>> = untils
        .iter()
        .map(|&(u, b)| {
            nodes
                .iter()
                .map(|n| !n.old.contains(&u) || n.old.contains(&b))
                .collect()
        })
        .collect();
    let k = untils.len();

    let mut node_succ = vec![Vec::new(); nodes.len()];
    let mut node_init = Vec::new();
    for (q, n) in nodes.iter().enumerate() {
        for &p in &n.incoming {
            if p == INIT {
                node_init.push(q);
            } else {
                node_succ[p].push(q);
            }
        }
    }
    let node_label: Vec<Label> = nodes
        .iter()
        .map(|n| {
            let mut label = Label::default();
            for &s in &n.old {
                if let Sub::Lit(a, pol) = arena.subs[s] {
                    if pol {
                        label.pos.push(a);
                    } else {
                        label.neg.push(a);
                    }
                }
            }
            label.pos.sort_unstable();
            label.neg.sort_unstable();
            label
        })
        .collect();

    // degeneralize: state (node, counter); the counter advances when the
    // current node belongs to the acceptance set it is waiting for
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut labels = vec![Label::default()];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut accepting = vec![false];
    let mut intern = |key: (usize, usize),
                      order: &mut Vec<(usize, usize)>,
                      labels: &mut Vec<Label>,
                      succ: &mut Vec<Vec<usize>>,
                      accepting: &mut Vec<bool>| {
        *ids.entry(key).or_insert_with(|| {
            let (q, c) = key;
            order.push(key);
            labels.push(node_label[q].clone());
            succ.push(Vec::new());
            accepting.push(k == 0 || (c == 0 && in_set[0][q]));
            labels.len() - 1
        })
    };
    for &q in &node_init {
        let id = intern((q, 0), &mut order, &mut labels, &mut succ, &mut accepting);
        succ[0].push(id);
    }
    let mut cursor = 0;
    while cursor < order.len() {
        let (q, c) = order[cursor];
        let from = cursor + 1;
        cursor += 1;
        let c2 = if k > 0 && in_set[c][q] { (c + 1) % k } else { c };
        for &q2 in &node_succ[q] {
            let id = intern((q2, c2), &mut order, &mut labels, &mut succ, &mut accepting);
            succ[from].push(id);
        }
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }

    BuchiAutomaton {
        atoms: arena.atoms,
        labels,
        succ,
        accepting,
    }
}

fn tableau<A>(arena: &Arena<A>, root: usize) -> Vec<TableauNode> {
    let negation = |s: usize| match arena.subs[s] {
        Sub::Lit(a, pol) => arena.index.get(&Sub::Lit(a, !pol)).copied(),
        _ => None,
    };
    let mut done: Vec<TableauNode> = Vec::new();
    let mut stack = vec![Pending {
        incoming: Set::from([INIT]),
        new: Set::from([root]),
        old: Set::new(),
        next: Set::new(),
    }];
    while let Some(mut n) = stack.pop() {
        let Some(eta) = n.new.pop_first() else {
            if let Some(existing) = done.iter_mut().find(|d| d.old == n.old && d.next == n.next) {
                existing.incoming.extend(n.incoming);
                continue;
            }
            done.push(TableauNode {
                incoming: n.incoming,
                old: n.old,
                next: n.next.clone(),
            });
            stack.push(Pending {
                incoming: Set::from([done.len() - 1]),
                new: n.next,
                old: Set::new(),
                next: Set::new(),
            });
            continue;
        };
        if n.old.contains(&eta) {
            stack.push(n);
            continue;
        }
        let add_new = |n: &mut Pending, fs: &[usize]| {
            for &f in fs {
                if !n.old.contains(&f) {
                    n.new.insert(f);
                }
            }
        };
        n.old.insert(eta);
        match arena.subs[eta] {
            Sub::False => {}
            Sub::True => stack.push(n),
            Sub::Lit(..) => {
                if !negation(eta).is_some_and(|neg| n.old.contains(&neg)) {
                    stack.push(n);
                }
            }
            Sub::And(a, b) => {
                add_new(&mut n, &[a, b]);
                stack.push(n);
            }
            Sub::Next(a) => {
                n.next.insert(a);
                stack.push(n);
            }
            Sub::Or(a, b) => {
                let mut n2 = n.clone();
                add_new(&mut n, &[a]);
                add_new(&mut n2, &[b]);
                stack.push(n2);
                stack.push(n);
            }
            Sub::Until(a, b) => {
                let mut n2 = n.clone();
                add_new(&mut n, &[a]);
                n.next.insert(eta);
                add_new(&mut n2, &[b]);
                stack.push(n2);
                stack.push(n);
            }
            Sub::Release(a, b) => {
                let mut n2 = n.clone();
                add_new(&mut n, &[b]);
                n.next.insert(eta);
                add_new(&mut n2, &[a, b]);
                stack.push(n2);
                stack.push(n);
            }
        }
    }
    done
}
