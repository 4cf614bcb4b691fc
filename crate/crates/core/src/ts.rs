//! Explicit-state transition system reachable from the initial
//! configurations, one edge per environment choice per tick.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use thiserror::Error;

use crate::ltl::Kripke;
use crate::model::{Atom, SbtModel};
use crate::semantics::{
    eval_bool, initial_configuration, tick_big_step, Configuration, MemoryState, VariableState,
};
use crate::status::Status;

/// Flat encoding of a configuration without its tick counter:
/// `[resume indices.., env.., blackboard.., statuses..]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TsState(pub Vec<i64>);

struct Layout {
    env: usize,
    bb: usize,
    statuses: usize,
    len: usize,
}

fn layout(model: &SbtModel) -> Layout {
    let env = model.memory_nodes.len();
    let bb = env + model.env_vars.len();
    let statuses = bb + model.bb_vars.len();
    Layout {
        env,
        bb,
        statuses,
        len: statuses + model.nodes.len(),
    }
}

pub fn encode(model: &SbtModel, c: &Configuration) -> TsState {
    let mut v = Vec::with_capacity(layout(model).len);
    v.extend(c.memory.resume_index.iter().map(|&i| i as i64));
    v.extend(&c.vars.env);
    v.extend(&c.vars.blackboard);
    v.extend(c.statuses.iter().map(|s| s.code()));
    TsState(v)
}

/// Inverse of [`encode`]; the tick counter comes back as 0.
pub fn decode(model: &SbtModel, s: &TsState) -> Configuration {
    let l = layout(model);
    let v = &s.0;
    Configuration {
        memory: MemoryState {
            resume_index: v[..l.env].iter().map(|&i| i as usize).collect(),
        },
        vars: variables(model, s),
        statuses: v[l.statuses..]
            .iter()
            .map(|&c| Status::from_code(c).expect("valid status code"))
            .collect(),
        tick_count: 0,
    }
}

fn variables(model: &SbtModel, s: &TsState) -> VariableState {
    let l = layout(model);
    VariableState {
        env: s.0[l.env..l.bb].to_vec(),
        blackboard: s.0[l.bb..l.statuses].to_vec(),
    }
}

/// One state per admissible initial environment choice, in lexicographic
/// order of the choices.
pub fn initial_states(model: &SbtModel) -> Vec<TsState> {
    model
        .initial_env_choices()
        .iter()
        .map(|env| {
            let c = initial_configuration(model, env).expect("choices are admissible");
            encode(model, &c)
        })
        .collect()
}

/// Successor states, one per admissible environment choice, deduplicated
/// and sorted by encoding.
pub fn successors(model: &SbtModel, s: &TsState) -> Vec<TsState> {
    let config = decode(model, s);
    let mut out: Vec<TsState> = model
        .next_env_choices(&config.vars.env)
        .iter()
        .map(|env| {
            let o = tick_big_step(model, &config, env).expect("choices are admissible");
            encode(model, &o.config)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn eval_atom(model: &SbtModel, s: &TsState, atom: &Atom) -> bool {
    match atom {
        Atom::Pred(e) => eval_bool(e, &variables(model, s)),
        Atom::Status(n, st) => s.0[layout(model).statuses + n] == st.code(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_edges: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            max_edges: 20_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TsStats {
    pub states: usize,
    pub edges: usize,
    pub frontier_peak: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("state limit exceeded: {} states, {} edges discovered (limits {} / {})", .stats.states, .stats.edges, .limits.max_states, .limits.max_edges)]
pub struct StateLimitExceeded {
    pub limits: Limits,
    pub stats: TsStats,
}

#[derive(Clone, Debug)]
pub struct TransitionSystem {
    model: SbtModel,
    states: Vec<TsState>,
    index: HashMap<TsState, usize>,
    initials: Vec<usize>,
    edges: Vec<Vec<usize>>,
    stats: TsStats,
}

/// Breadth-first enumeration. Initial states get ids `0..k` in the order of
/// [`initial_states`]; further ids follow discovery order.
pub fn enumerate(model: &SbtModel, limits: Limits) -> Result<TransitionSystem, StateLimitExceeded> {
    let mut ts = TransitionSystem {
        model: model.clone(),
        states: Vec::new(),
        index: HashMap::new(),
        initials: Vec::new(),
        edges: Vec::new(),
        stats: TsStats::default(),
    };
    let mut queue = VecDeque::new();
    let fail = |stats: TsStats| StateLimitExceeded { limits, stats };
    for s in initial_states(model) {
        let (id, fresh) = ts.intern(s);
        if fresh {
            ts.initials.push(id);
            queue.push_back(id);
        }
    }
    ts.stats.states = ts.states.len();
    if ts.states.len() > limits.max_states {
        return Err(fail(ts.stats));
    }
    ts.stats.frontier_peak = queue.len();
    while let Some(id) = queue.pop_front() {
        let succ = successors(model, &ts.states[id]);
        let mut ids = Vec::with_capacity(succ.len());
        for t in succ {
            let (tid, fresh) = ts.intern(t);
            if fresh {
                queue.push_back(tid);
            }
            ids.push(tid);
        }
        ids.sort_unstable();
        ts.stats.edges += ids.len();
        ts.stats.states = ts.states.len();
        ts.stats.frontier_peak = ts.stats.frontier_peak.max(queue.len());
        ts.edges[id] = ids;
        if ts.stats.states > limits.max_states || ts.stats.edges > limits.max_edges {
            return Err(fail(ts.stats));
        }
    }
    Ok(ts)
}

impl TransitionSystem {
    fn intern(&mut self, s: TsState) -> (usize, bool) {
        if let Some(&id) = self.index.get(&s) {
            return (id, false);
        }
        let id = self.states.len();
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.edges.push(Vec::new());
        (id, true)
    }

    pub fn model(&self) -> &SbtModel {
        &self.model
    }

    pub fn states(&self) -> &[TsState] {
        &self.states
    }

    pub fn state(&self, id: usize) -> &TsState {
        &self.states[id]
    }

    pub fn id_of(&self, s: &TsState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn initials(&self) -> &[usize] {
        &self.initials
    }

    pub fn edges(&self, id: usize) -> &[usize] {
        &self.edges[id]
    }

    pub fn stats(&self) -> TsStats {
        self.stats
    }

    pub fn configuration(&self, id: usize) -> Configuration {
        decode(&self.model, &self.states[id])
    }

    pub fn eval_atom(&self, id: usize, atom: &Atom) -> bool {
        eval_atom(&self.model, &self.states[id], atom)
    }

    /// Text export: header, one `src dst` line per edge, then one `label`
    /// line per distinct spec atom listing the states where it holds.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "states={} edges={} initials={}",
            self.states.len(),
            self.stats.edges,
            self.initials.len()
        )
        .unwrap();
        for (src, dsts) in self.edges.iter().enumerate() {
            for dst in dsts {
                writeln!(out, "{src} {dst}").unwrap();
            }
        }
        for atom in self.model.spec_atoms() {
            write!(out, "label {}:", self.model.atom_text(atom)).unwrap();
            for id in 0..self.states.len() {
                if self.eval_atom(id, atom) {
                    write!(out, " {id}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

impl Kripke<Atom> for TransitionSystem {
    fn state_count(&self) -> usize {
        self.states.len()
    }

    fn initial_states(&self) -> &[usize] {
        &self.initials
    }

    fn successors(&self, s: usize) -> &[usize] {
        &self.edges[s]
    }

    fn holds(&self, s: usize, atom: &Atom) -> bool {
        self.eval_atom(s, atom)
    }
}

/// A graph read back from [`TransitionSystem::dump`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDump {
    pub states: usize,
    /// Initial states are `0..initials`.
    pub initials: usize,
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<(String, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DumpError {
    pub line: usize,
    pub message: String,
}

impl GraphDump {
    pub fn parse(text: &str) -> Result<GraphDump, DumpError> {
        let err = |line: usize, message: &str| DumpError {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty dump"))?;
        let mut fields = HashMap::new();
        for part in header.split_whitespace() {
            let (k, v) = part.split_once('=').ok_or_else(|| err(1, "malformed header"))?;
            let v: usize = v.parse().map_err(|_| err(1, "malformed header"))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(1, "missing header field"));
        let mut dump = GraphDump {
            states: get("states")?,
            initials: get("initials")?,
            edges: Vec::new(),
            labels: Vec::new(),
        };
        let edge_count = get("edges")?;
        for (no, line) in lines {
            if let Some(rest) = line.strip_prefix("label ") {
                let (name, ids) = rest.rsplit_once(':').ok_or_else(|| err(no, "malformed label"))?;
                let ids = ids
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| err(no, "malformed state id")))
                    .collect::<Result<Vec<usize>, _>>()?;
                dump.labels.push((name.to_string(), ids));
            } else {
                let (a, b) = line.split_once(' ').ok_or_else(|| err(no, "malformed edge"))?;
                let a = a.parse().map_err(|_| err(no, "malformed edge"))?;
                let b = b.parse().map_err(|_| err(no, "malformed edge"))?;
                dump.edges.push((a, b));
            }
        }
        if dump.edges.len() != edge_count {
            return Err(err(1, "edge count does not match header"));
        }
        Ok(dump)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::compile;

    fn model(src: &str) -> SbtModel {
        compile(src).unwrap().model
    }

    #[test]
    fn single_check_has_two_states() {
        let m = model("tree T { blackboard { x: int[0..0] = 0; } root: check c { x == 0 } }");
        let ts = enumerate(&m, Limits::default()).unwrap();
        assert_eq!(ts.states().len(), 2);
        assert_eq!(ts.edges(0), &[1]);
        assert_eq!(ts.edges(1), &[1]);
        assert!(ts.eval_atom(0, &Atom::Status(0, Status::Invalid)));
        assert!(ts.eval_atom(1, &Atom::Status(0, Status::Success)));
    }

    #[test]
    fn successor_counts_follow_env_product() {
        let none = model("tree T { root: check c { true } }");
        let s0 = &initial_states(&none)[0];
        assert_eq!(successors(&none, s0).len(), 1);
        let one = model("tree T { env { b: bool; } root: check c { b } }");
        for s in initial_states(&one) {
            assert!(successors(&one, &s).len() <= 2);
        }
    }

    #[test]
    fn state_limit() {
        let m = model("tree T { root: check c { true } }");
        let e = enumerate(
            &m,
            Limits {
                max_states: 1,
                max_edges: 100,
            },
        )
        .unwrap_err();
        assert_eq!(e.stats.states, 2);
    }

    #[test]
    fn encode_decode_round_trip() {
        let m = model(
            "tree T { env { e: enum { lo, hi }; } blackboard { n: int[-1..2] = -1; } root: sequence_m { check c { e == hi } action a { on true -> n := n + 1; return running; } } }",
        );
        let ts = enumerate(&m, Limits::default()).unwrap();
        for (id, s) in ts.states().iter().enumerate() {
            assert_eq!(&encode(&m, &ts.configuration(id)), s);
        }
    }

    #[test]
    fn dump_round_trips() {
        let m = model(
            "tree T { env { b: bool; } root: check c { b } spec s: G (status(c) == success || b); }",
        );
        let ts = enumerate(&m, Limits::default()).unwrap();
        let text = ts.dump();
        let d = GraphDump::parse(&text).unwrap();
        assert_eq!(d.states, ts.states().len());
        assert_eq!(d.initials, 2);
        let mut edges = Vec::new();
        for s in 0..ts.states().len() {
            edges.extend(ts.edges(s).iter().map(|&t| (s, t)));
        }
        assert_eq!(d.edges, edges);
        assert_eq!(d.labels.len(), 2);
        assert_eq!(d.labels[0].0, "status(c) == success");
    }
}
