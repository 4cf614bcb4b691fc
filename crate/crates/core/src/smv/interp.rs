//! Explicit-state interpreter for parsed SMV documents.
//!
//! Values are `i64`: booleans as 0/1, integers as themselves and symbolic
//! constants as `SYM_BASE + id`. Next-state assignments are evaluated in an
//! order where every `next(v)` a right-hand side reads has already been
//! fixed; nondeterministic choices branch the search.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::doc::{SExpr, SOp, SmvType};
use super::parse::ParsedSmv;
use crate::ltl::{Kripke, Ltl};

const SYM_BASE: i64 = 1 << 48;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmvError {
    #[error("unknown identifier `{0}`")]
    Unknown(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("circular dependency through `{0}`")]
    Circular(String),
    #[error("value {value} out of range for `{var}`")]
    OutOfRange { var: String, value: String },
    #[error("no case arm applies")]
    NoArm,
    #[error("exploration exceeded {0} states")]
    StateLimit(usize),
}

/// Compiled expression with resolved names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum CExpr {
    Const(i64),
    Var(usize),
    Def(usize),
    Next(Box<CExpr>),
    Not(Box<CExpr>),
    Neg(Box<CExpr>),
    Bin(SOp, Box<CExpr>, Box<CExpr>),
    Case(Vec<(CExpr, CExpr)>),
    Choice(Vec<i64>),
}

/// State predicate usable as an LTL atom over an [`SmvSystem`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmvAtom(CExpr);

pub struct SmvSystem {
    var_names: Vec<String>,
    domains: Vec<Vec<i64>>,
    def_names: Vec<String>,
    defs: Vec<CExpr>,
    symbols: Vec<String>,
    names: HashMap<String, Name>,
    next_order: Vec<usize>,
    nexts: Vec<CExpr>,
    states: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    initials: Vec<usize>,
    edges: Vec<Vec<usize>>,
}

#[derive(Clone, Copy)]
enum Name {
    Var(usize),
    Def(usize),
    Sym(usize),
}

struct Compiler<'a> {
    names: &'a HashMap<String, Name>,
}

impl Compiler<'_> {
    fn compile(&self, e: &SExpr) -> Result<CExpr, SmvError> {
        Ok(match e {
            SExpr::Bool(b) => CExpr::Const(*b as i64),
            SExpr::Int(v) => CExpr::Const(*v),
            SExpr::Ident(s) => match self.names.get(s) {
                Some(Name::Var(i)) => CExpr::Var(*i),
                Some(Name::Def(i)) => CExpr::Def(*i),
                Some(Name::Sym(i)) => CExpr::Const(SYM_BASE + *i as i64),
                None => return Err(SmvError::Unknown(s.clone())),
            },
            SExpr::Next(a) => CExpr::Next(Box::new(self.compile(a)?)),
            SExpr::Not(a) => CExpr::Not(Box::new(self.compile(a)?)),
            SExpr::Neg(a) => CExpr::Neg(Box::new(self.compile(a)?)),
            SExpr::Bin(op, a, b) => {
                CExpr::Bin(*op, Box::new(self.compile(a)?), Box::new(self.compile(b)?))
            }
            SExpr::Case(arms) => CExpr::Case(
                arms.iter()
                    .map(|(c, v)| Ok((self.compile(c)?, self.compile(v)?)))
                    .collect::<Result<_, SmvError>>()?,
            ),
            SExpr::Set(items) => CExpr::Choice(
                items
                    .iter()
                    .map(|i| match self.compile(i)? {
                        CExpr::Const(v) => Ok(v),
                        _ => Err(SmvError::Unsupported(format!("non-constant set element `{i}`"))),
                    })
                    .collect::<Result<_, _>>()?,
            ),
            SExpr::Range(lo, hi) => CExpr::Choice((*lo..=*hi).collect()),
        })
    }
}

/// One evaluation context: current state plus a partial next state.
struct Eval<'a> {
    sys: &'a SmvSystem,
    cur: &'a [i64],
    next: &'a [Option<i64>],
    memo_cur: &'a mut Vec<Option<i64>>,
    memo_next: &'a mut Vec<Option<i64>>,
}

impl Eval<'_> {
    fn eval(&mut self, e: &CExpr, in_next: bool) -> Result<i64, SmvError> {
        Ok(match e {
            CExpr::Const(v) => *v,
            CExpr::Var(i) => {
                if in_next {
                    self.next[*i].expect("next value fixed before use")
                } else {
                    self.cur[*i]
                }
            }
            CExpr::Def(d) => {
                let memo = if in_next { &self.memo_next } else { &self.memo_cur };
                if let Some(v) = memo[*d] {
                    return Ok(v);
                }
                let v = self.eval(&self.sys.defs[*d], in_next)?;
                if in_next {
                    self.memo_next[*d] = Some(v);
                } else {
                    self.memo_cur[*d] = Some(v);
                }
                v
            }
            CExpr::Next(a) => {
                if in_next {
                    return Err(SmvError::Unsupported("nested next()".into()));
                }
                self.eval(a, true)?
            }
            CExpr::Not(a) => (self.eval(a, in_next)? == 0) as i64,
            CExpr::Neg(a) => -self.eval(a, in_next)?,
            CExpr::Bin(op, a, b) => {
                let x = self.eval(a, in_next)?;
                // short-circuit so guarded arms never touch what they guard
                match op {
                    SOp::And if x == 0 => return Ok(0),
                    SOp::Or if x != 0 => return Ok(1),
                    SOp::Implies if x == 0 => return Ok(1),
                    _ => {}
                }
                let y = self.eval(b, in_next)?;
                match op {
                    SOp::And | SOp::Or | SOp::Implies => (y != 0) as i64,
                    SOp::Eq => (x == y) as i64,
                    SOp::Ne => (x != y) as i64,
                    SOp::Lt => (x < y) as i64,
                    SOp::Le => (x <= y) as i64,
                    SOp::Gt => (x > y) as i64,
                    SOp::Ge => (x >= y) as i64,
                    SOp::Add => x + y,
                    SOp::Sub => x - y,
                }
            }
            CExpr::Case(arms) => {
                for (c, v) in arms {
                    if self.eval(c, in_next)? != 0 {
                        return self.eval(v, in_next);
                    }
                }
                return Err(SmvError::NoArm);
            }
            CExpr::Choice(_) => {
                return Err(SmvError::Unsupported(
                    "nondeterministic choice below the top of an assignment".into(),
                ))
            }
        })
    }
}

fn type_values(ty: &SmvType, names: &HashMap<String, Name>) -> Vec<i64> {
    match ty {
        SmvType::Boolean => vec![0, 1],
        SmvType::Range(lo, hi) => (*lo..=*hi).collect(),
        SmvType::Enum(labels) => labels
            .iter()
            .map(|l| match names[l] {
                Name::Sym(i) => SYM_BASE + i as i64,
                _ => unreachable!("labels are symbols"),
            })
            .collect(),
    }
}

/// Variables read under `next()` in `e`, following defines.
fn next_reads(
    e: &CExpr,
    under_next: bool,
    def_vars: &[Vec<usize>],
    out: &mut Vec<usize>,
) {
    match e {
        CExpr::Const(_) | CExpr::Choice(_) => {}
        CExpr::Var(i) => {
            if under_next {
                out.push(*i)
            }
        }
        CExpr::Def(d) => {
            if under_next {
                out.extend(&def_vars[*d])
            }
        }
        CExpr::Next(a) => next_reads(a, true, def_vars, out),
        CExpr::Not(a) | CExpr::Neg(a) => next_reads(a, under_next, def_vars, out),
        CExpr::Bin(_, a, b) => {
            next_reads(a, under_next, def_vars, out);
            next_reads(b, under_next, def_vars, out);
        }
        CExpr::Case(arms) => {
            for (c, v) in arms {
                next_reads(c, under_next, def_vars, out);
                next_reads(v, under_next, def_vars, out);
            }
        }
    }
}

fn contains_next(e: &CExpr) -> bool {
    match e {
        CExpr::Next(_) => true,
        CExpr::Not(a) | CExpr::Neg(a) => contains_next(a),
        CExpr::Bin(_, a, b) => contains_next(a) || contains_next(b),
        CExpr::Case(arms) => arms.iter().any(|(c, v)| contains_next(c) || contains_next(v)),
        _ => false,
    }
}

/// Transitive variable support of every define.
fn define_supports(defs: &[CExpr], def_names: &[String]) -> Result<Vec<Vec<usize>>, SmvError> {
    fn direct(e: &CExpr, vars: &mut Vec<usize>, deps: &mut Vec<usize>) {
        match e {
            CExpr::Var(i) => vars.push(*i),
            CExpr::Def(d) => deps.push(*d),
            CExpr::Next(a) | CExpr::Not(a) | CExpr::Neg(a) => direct(a, vars, deps),
            CExpr::Bin(_, a, b) => {
                direct(a, vars, deps);
                direct(b, vars, deps);
            }
            CExpr::Case(arms) => {
                for (c, v) in arms {
                    direct(c, vars, deps);
                    direct(v, vars, deps);
                }
            }
            CExpr::Const(_) | CExpr::Choice(_) => {}
        }
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = defs.len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // iterative post-order
        let mut stack = vec![(root, false)];
        while let Some((d, expanded)) = stack.pop() {
            if expanded {
                let (mut vars, mut deps) = (Vec::new(), Vec::new());
                direct(&defs[d], &mut vars, &mut deps);
                for e in deps {
                    vars.extend_from_slice(&out[e]);
                }
                vars.sort_unstable();
                vars.dedup();
                out[d] = vars;
                mark[d] = Mark::Done;
                continue;
            }
            match mark[d] {
                Mark::Done => continue,
                Mark::Active => return Err(SmvError::Circular(def_names[d].clone())),
                Mark::New => {}
            }
            mark[d] = Mark::Active;
            stack.push((d, true));
            let (mut vars, mut deps) = (Vec::new(), Vec::new());
            direct(&defs[d], &mut vars, &mut deps);
            for e in deps {
                match mark[e] {
                    Mark::Active => return Err(SmvError::Circular(def_names[e].clone())),
                    Mark::New => stack.push((e, false)),
                    Mark::Done => {}
                }
            }
        }
    }
    Ok(out)
}

impl SmvSystem {
    /// Builds the reachable state graph of a document.
    pub fn build(doc: &ParsedSmv, max_states: usize) -> Result<SmvSystem, SmvError> {
        let mut names: HashMap<String, Name> = HashMap::new();
        let mut symbols: Vec<String> = Vec::new();
        let mut add_symbol = |names: &mut HashMap<String, Name>, s: &str| {
            if !names.contains_key(s) {
                names.insert(s.to_string(), Name::Sym(symbols.len()));
                symbols.push(s.to_string());
            }
        };
        for c in &doc.constants {
            add_symbol(&mut names, c);
        }
        for (_, ty) in &doc.vars {
            if let SmvType::Enum(labels) = ty {
                for l in labels {
                    add_symbol(&mut names, l);
                }
            }
        }
        for (i, (v, _)) in doc.vars.iter().enumerate() {
            names.insert(v.clone(), Name::Var(i));
        }
        for (i, (d, _)) in doc.defines.iter().enumerate() {
            names.insert(d.clone(), Name::Def(i));
        }
        let c = Compiler { names: &names };
        let defs = doc
            .defines
            .iter()
            .map(|(_, e)| c.compile(e))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(i) = defs.iter().position(contains_next) {
            return Err(SmvError::Unsupported(format!(
                "next() inside DEFINE `{}`",
                doc.defines[i].0
            )));
        }
        let def_names: Vec<String> = doc.defines.iter().map(|(d, _)| d.clone()).collect();
        let def_vars = define_supports(&defs, &def_names)?;
        let var_names: Vec<String> = doc.vars.iter().map(|(v, _)| v.clone()).collect();
        let domains: Vec<Vec<i64>> = doc.vars.iter().map(|(_, t)| type_values(t, &names)).collect();
        for k in doc.inits.keys().chain(doc.nexts.keys()) {
            if !matches!(names.get(k), Some(Name::Var(_))) {
                return Err(SmvError::Unknown(k.clone()));
            }
        }
        let any = |i: usize| CExpr::Choice(domains[i].clone());
        let mut inits = Vec::new();
        let mut nexts = Vec::new();
        for (i, v) in var_names.iter().enumerate() {
            inits.push(match doc.inits.get(v) {
                Some(e) => c.compile(e)?,
                None => any(i),
            });
            nexts.push(match doc.nexts.get(v) {
                Some(e) => c.compile(e)?,
                None => any(i),
            });
        }

        // order: assignments that read no next values first, then by dependency
        let n = var_names.len();
        let mut deps: Vec<Vec<usize>> = Vec::with_capacity(n);
        for e in &nexts {
            let mut d = Vec::new();
            next_reads(e, false, &def_vars, &mut d);
            d.sort_unstable();
            d.dedup();
            deps.push(d);
        }
        let mut indegree: Vec<usize> = deps.iter().map(|d| d.len()).collect();
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (v, d) in deps.iter().enumerate() {
            for &u in d {
                users[u].push(v);
            }
        }
        let mut ready: std::collections::BTreeSet<(bool, usize)> = (0..n)
            .filter(|&v| indegree[v] == 0)
            .map(|v| (!deps[v].is_empty(), v))
            .collect();
        let mut next_order = Vec::with_capacity(n);
        while let Some(&first) = ready.iter().next() {
            ready.remove(&first);
            let v = first.1;
            next_order.push(v);
            for &w in &users[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.insert((true, w));
                }
            }
        }
        if next_order.len() < n {
            let stuck = (0..n).find(|v| !next_order.contains(v)).unwrap();
            return Err(SmvError::Circular(var_names[stuck].clone()));
        }

        let mut sys = SmvSystem {
            var_names,
            domains,
            def_names,
            defs,
            symbols,
            names,
            next_order,
            nexts,
            states: Vec::new(),
            index: HashMap::new(),
            initials: Vec::new(),
            edges: Vec::new(),
        };
        sys.explore(&inits, max_states)?;
        Ok(sys)
    }

    fn check_range(&self, var: usize, v: i64) -> Result<(), SmvError> {
        if self.domains[var].contains(&v) {
            Ok(())
        } else {
            Err(SmvError::OutOfRange {
                var: self.var_names[var].clone(),
                value: self.show(v),
            })
        }
    }

    fn explore(&mut self, inits: &[CExpr], max_states: usize) -> Result<(), SmvError> {
        // initial states: init expressions must be constant or a choice
        let mut initial: Vec<Vec<i64>> = vec![Vec::new()];
        for (i, e) in inits.iter().enumerate() {
            let options = match e {
                CExpr::Choice(vs) => vs.clone(),
                e => {
                    let mut m1 = vec![None; self.defs.len()];
                    let mut m2 = vec![None; self.defs.len()];
                    let mut ev = Eval {
                        sys: self,
                        cur: &[],
                        next: &[],
                        memo_cur: &mut m1,
                        memo_next: &mut m2,
                    };
                    vec![ev.eval(e, false).map_err(|_| {
                        SmvError::Unsupported(format!(
                            "non-constant init for `{}`",
                            self.var_names[i]
                        ))
                    })?]
                }
            };
            for &v in &options {
                self.check_range(i, v)?;
            }
            initial = initial
                .into_iter()
                .flat_map(|p| {
                    options.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        initial.sort();
        initial.dedup();
        let mut queue = VecDeque::new();
        for s in initial {
            let id = self.intern(s, max_states, &mut queue)?;
            self.initials.push(id);
        }
        while let Some(id) = queue.pop_front() {
            let cur = self.states[id].clone();
            let mut succ = Vec::new();
            let mut memo_cur = vec![None; self.defs.len()];
            let mut partial = vec![None; cur.len()];
            self.expand(0, &cur, &mut partial, &mut memo_cur, vec![None; self.defs.len()], &mut succ)?;
            succ.sort();
            succ.dedup();
            let mut ids: Vec<usize> = Vec::with_capacity(succ.len());
            for s in succ {
                ids.push(self.intern(s, max_states, &mut queue)?);
            }
            self.edges[id] = ids;
        }
        Ok(())
    }

    fn intern(
        &mut self,
        s: Vec<i64>,
        max_states: usize,
        queue: &mut VecDeque<usize>,
    ) -> Result<usize, SmvError> {
        if let Some(&id) = self.index.get(&s) {
            return Ok(id);
        }
        if self.states.len() >= max_states {
            return Err(SmvError::StateLimit(max_states));
        }
        let id = self.states.len();
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.edges.push(Vec::new());
        queue.push_back(id);
        Ok(id)
    }

    fn expand(
        &self,
        k: usize,
        cur: &[i64],
        partial: &mut Vec<Option<i64>>,
        memo_cur: &mut Vec<Option<i64>>,
        mut memo_next: Vec<Option<i64>>,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<(), SmvError> {
        if k == self.next_order.len() {
            out.push(partial.iter().map(|v| v.expect("all assigned")).collect());
            return Ok(());
        }
        let var = self.next_order[k];
        match &self.nexts[var] {
            CExpr::Choice(vs) => {
                for &v in vs {
                    self.check_range(var, v)?;
                    partial[var] = Some(v);
                    self.expand(k + 1, cur, partial, memo_cur, memo_next.clone(), out)?;
                }
            }
            e => {
                let v = Eval {
                    sys: self,
                    cur,
                    next: partial,
                    memo_cur,
                    memo_next: &mut memo_next,
                }
                .eval(e, false)?;
                self.check_range(var, v)?;
                partial[var] = Some(v);
                self.expand(k + 1, cur, partial, memo_cur, memo_next, out)?;
            }
        }
        partial[var] = None;
        Ok(())
    }

    fn show(&self, v: i64) -> String {
        if v >= SYM_BASE {
            self.symbols[(v - SYM_BASE) as usize].clone()
        } else {
            v.to_string()
        }
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initials(&self) -> &[usize] {
        &self.initials
    }

    pub fn edges(&self, s: usize) -> &[usize] {
        &self.edges[s]
    }

    /// Value of a variable or define in a state, as raw code.
    pub fn value(&self, s: usize, name: &str) -> Result<i64, SmvError> {
        let e = match self.names.get(name) {
            Some(Name::Var(i)) => return Ok(self.states[s][*i]),
            Some(Name::Def(d)) => CExpr::Def(*d),
            _ => return Err(SmvError::Unknown(name.to_string())),
        };
        self.eval_state(s, &e)
    }

    /// Like [`SmvSystem::value`] but with symbolic constants named.
    pub fn value_text(&self, s: usize, name: &str) -> Result<String, SmvError> {
        self.value(s, name).map(|v| self.show(v))
    }

    /// Symbolic constant behind a raw code, if it is one.
    pub fn symbol(&self, code: i64) -> Option<&str> {
        (code >= SYM_BASE).then(|| self.symbols[(code - SYM_BASE) as usize].as_str())
    }

    fn eval_state(&self, s: usize, e: &CExpr) -> Result<i64, SmvError> {
        let mut m1 = vec![None; self.defs.len()];
        let mut m2 = Vec::new();
        Eval {
            sys: self,
            cur: &self.states[s],
            next: &[],
            memo_cur: &mut m1,
            memo_next: &mut m2,
        }
        .eval(e, false)
    }

    /// Resolves the atoms of a formula against this system's names.
    pub fn compile_ltl(&self, f: &Ltl<SExpr>) -> Result<Ltl<SmvAtom>, SmvError> {
        let c = Compiler { names: &self.names };
        let mut err = None;
        let out = f.map_atoms(&mut |a: &SExpr| match c.compile(a) {
            Ok(e) if !contains_next(&e) => SmvAtom(e),
            Ok(_) => {
                err.get_or_insert(SmvError::Unsupported("next() in a formula".into()));
                SmvAtom(CExpr::Const(0))
            }
            Err(e) => {
                err.get_or_insert(e);
                SmvAtom(CExpr::Const(0))
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Human-readable rendering of a state.
    pub fn describe(&self, s: usize) -> String {
        self.var_names
            .iter()
            .zip(&self.states[s])
            .map(|(n, &v)| format!("{n}={}", self.show(v)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[allow(dead_code)]
    fn define_name(&self, d: usize) -> &str {
        &self.def_names[d]
    }
}

impl Kripke<SmvAtom> for SmvSystem {
    fn state_count(&self) -> usize {
        self.states.len()
    }

    fn initial_states(&self) -> &[usize] {
        &self.initials
    }

    fn successors(&self, s: usize) -> &[usize] {
        &self.edges[s]
    }

    fn holds(&self, s: usize, a: &SmvAtom) -> bool {
        self.eval_state(s, &a.0).expect("atom evaluates") != 0
    }
}
