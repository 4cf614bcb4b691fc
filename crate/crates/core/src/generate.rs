//! Seeded random generators: well-typed trees (as ASTs and as validated
//! models), small Kripke structures and LTL formulas. Used by property
//! tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dsl::ast::*;
use crate::dsl::validate;
use crate::ltl::{ExplicitKripke, Ltl};
use crate::model::{BinaryOp, DecoratorKind, SbtModel, UnaryOp};
use crate::status::Status;

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Upper bound on declared nodes (the implicit root wrapper excluded).
    pub max_nodes: usize,
    pub max_vars: usize,
    /// Upper bound on the number of values of any domain.
    pub max_domain: usize,
    pub max_expr_depth: usize,
    pub max_specs: usize,
    pub max_spec_depth: usize,
    pub max_commands: usize,
}

impl GenConfig {
    /// Models small enough for exhaustive per-tick comparisons: at most 8
    /// nodes counting the root wrapper, 3 variables, 4 values per domain.
    pub fn small() -> GenConfig {
        GenConfig {
            max_nodes: 7,
            max_vars: 3,
            max_domain: 4,
            max_expr_depth: 2,
            max_specs: 2,
            max_spec_depth: 3,
            max_commands: 3,
        }
    }

    /// Larger programs exercising more syntax.
    pub fn syntax() -> GenConfig {
        GenConfig {
            max_nodes: 16,
            max_vars: 6,
            max_domain: 6,
            max_expr_depth: 4,
            max_specs: 4,
            max_spec_depth: 4,
            max_commands: 4,
        }
    }
}

const LABEL_POOLS: [&[&str]; 6] = [
    &["idle", "busy", "done", "off", "lost", "safe"],
    &["low", "mid", "high", "top", "zero", "peak"],
    &["north", "east", "south", "west", "up", "down"],
    &["red", "green", "blue", "cyan", "pink", "gray"],
    &["ok", "warn", "fault", "dead", "boot", "wait"],
    &["alpha", "beta", "gamma", "delta", "kappa", "omega"],
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Enum(usize),
}

struct Var {
    name: String,
    ty: Ty,
    domain: DomainSpec,
    blackboard: bool,
}

struct Gen<'r, R> {
    rng: &'r mut R,
    cfg: GenConfig,
    vars: Vec<Var>,
    node_names: Vec<String>,
    next_node: usize,
}

fn p() -> Pos {
    Pos::default()
}

fn bin(op: BinaryOp, a: ExprAst, b: ExprAst) -> ExprAst {
    ExprAst::Binary(op, Box::new(a), Box::new(b), p())
}

impl<R: Rng> Gen<'_, R> {
    fn var_decls(&mut self) -> (Vec<VarDeclAst>, Vec<VarDeclAst>) {
        let n = self.rng.gen_range(1..=self.cfg.max_vars);
        let (mut env, mut bb) = (Vec::new(), Vec::new());
        for i in 0..n {
            // keep at least one writable variable
            let blackboard = i == 0 || self.rng.gen_bool(0.5);
            let size = self.rng.gen_range(1..=self.cfg.max_domain) as i64;
            let (ty, domain) = match self.rng.gen_range(0..3) {
                0 => {
                    let lo = self.rng.gen_range(-2..=2);
                    (Ty::Int, DomainSpec::Int { lo, hi: lo + size - 1 })
                }
                1 => (Ty::Bool, DomainSpec::Bool),
                _ => {
                    let labels = LABEL_POOLS[i % LABEL_POOLS.len()][..size as usize]
                        .iter()
                        .map(|s| s.to_string())
                        .collect();
                    (Ty::Enum(i), DomainSpec::Enum(labels))
                }
            };
            let name = format!("v{i}");
            let frozen = !blackboard && self.rng.gen_bool(0.3);
            let initial = if blackboard || (frozen && self.rng.gen_bool(0.5)) {
                Some(self.literal(&domain))
            } else {
                None
            };
            let decl = VarDeclAst {
                name: name.clone(),
                domain: domain.clone(),
                initial,
                frozen,
                pos: p(),
            };
            if blackboard {
                bb.push(decl);
            } else {
                env.push(decl);
            }
            self.vars.push(Var {
                name,
                ty,
                domain,
                blackboard,
            });
        }
        (env, bb)
    }

    fn literal(&mut self, d: &DomainSpec) -> Literal {
        match d {
            DomainSpec::Int { lo, hi } => Literal::Int(self.rng.gen_range(*lo..=*hi)),
            DomainSpec::Bool => Literal::Bool(self.rng.gen()),
            DomainSpec::Enum(l) => Literal::Label(l.choose(self.rng).unwrap().clone()),
        }
    }

    fn vars_of(&self, ty: Ty) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.vars[i].ty == ty).collect()
    }

    fn leaf(&mut self, ty: Ty) -> ExprAst {
        let candidates = self.vars_of(ty);
        if !candidates.is_empty() && self.rng.gen_bool(0.6) {
            let v = *candidates.choose(self.rng).unwrap();
            return ExprAst::Ident(self.vars[v].name.clone(), p());
        }
        match ty {
            Ty::Int => ExprAst::Int(self.rng.gen_range(0..=4), p()),
            Ty::Bool => ExprAst::Bool(self.rng.gen(), p()),
            Ty::Enum(i) => {
                let DomainSpec::Enum(labels) = &self.vars[i].domain else {
                    unreachable!()
                };
                ExprAst::Ident(labels.choose(self.rng).unwrap().clone(), p())
            }
        }
    }

    fn expr(&mut self, ty: Ty, depth: usize) -> ExprAst {
        if depth == 0 || self.rng.gen_bool(0.35) {
            if ty == Ty::Bool && depth > 0 && self.rng.gen_bool(0.5) {
                return self.comparison(depth - 1);
            }
            return self.leaf(ty);
        }
        match ty {
            Ty::Int => match self.rng.gen_range(0..5) {
                0 => ExprAst::Unary(UnaryOp::Neg, Box::new(self.expr(Ty::Int, depth - 1)), p()),
                1 | 2 => bin(BinaryOp::Add, self.expr(Ty::Int, depth - 1), self.expr(Ty::Int, depth - 1)),
                _ => bin(BinaryOp::Sub, self.expr(Ty::Int, depth - 1), self.expr(Ty::Int, depth - 1)),
            },
            Ty::Bool => match self.rng.gen_range(0..5) {
                0 => ExprAst::Unary(UnaryOp::Not, Box::new(self.expr(Ty::Bool, depth - 1)), p()),
                1 => bin(BinaryOp::And, self.expr(Ty::Bool, depth - 1), self.expr(Ty::Bool, depth - 1)),
                2 => bin(BinaryOp::Or, self.expr(Ty::Bool, depth - 1), self.expr(Ty::Bool, depth - 1)),
                _ => self.comparison(depth - 1),
            },
            Ty::Enum(_) => self.leaf(ty),
        }
    }

    fn any_type(&mut self) -> Ty {
        let mut tys = vec![Ty::Int, Ty::Int, Ty::Bool];
        tys.extend(self.vars.iter().filter_map(|v| match v.ty {
            Ty::Enum(i) => Some(Ty::Enum(i)),
            _ => None,
        }));
        *tys.choose(self.rng).unwrap()
    }

    fn comparison(&mut self, depth: usize) -> ExprAst {
        let ty = self.any_type();
        let op = if ty == Ty::Int {
            *[
                BinaryOp::Eq,
                BinaryOp::Ne,
                BinaryOp::Lt,
                BinaryOp::Le,
                BinaryOp::Gt,
                BinaryOp::Ge,
            ]
            .choose(self.rng)
            .unwrap()
        } else {
            *[BinaryOp::Eq, BinaryOp::Ne].choose(self.rng).unwrap()
        };
        bin(op, self.expr(ty, depth), self.expr(ty, depth))
    }

    fn fresh_name(&mut self) -> String {
        let name = format!("n{}", self.next_node);
        self.next_node += 1;
        self.node_names.push(name.clone());
        name
    }

    fn leaf_node(&mut self) -> NodeAst {
        let name = self.fresh_name();
        if self.rng.gen_bool(0.4) {
            let cond = self.expr(Ty::Bool, self.cfg.max_expr_depth);
            return NodeAst::Check { name, cond, pos: p() };
        }
        let writable: Vec<usize> = (0..self.vars.len()).filter(|&i| self.vars[i].blackboard).collect();
        let n = self.rng.gen_range(1..=self.cfg.max_commands);
        let commands = (0..n)
            .map(|_| {
                let guard = self.expr(Ty::Bool, self.cfg.max_expr_depth);
                let k = self.rng.gen_range(0..=2.min(writable.len()));
                let assigns = writable
                    .choose_multiple(self.rng, k)
                    .copied()
                    .collect::<Vec<_>>()
                    .into_iter()
                    .map(|v| AssignAst {
                        target: self.vars[v].name.clone(),
                        value: self.expr(self.vars[v].ty, self.cfg.max_expr_depth),
                        pos: p(),
                    })
                    .collect();
                let status = *[Status::Success, Status::Failure, Status::Running]
                    .choose(self.rng)
                    .unwrap();
                GuardedAst {
                    guard,
                    assigns,
                    status,
                    pos: p(),
                }
            })
            .collect();
        NodeAst::Action {
            name,
            commands,
            pos: p(),
        }
    }

    /// A subtree of exactly `budget` nodes.
    fn node(&mut self, budget: usize) -> NodeAst {
        if budget == 1 {
            return self.leaf_node();
        }
        let name = if self.rng.gen_bool(0.5) {
            Some(self.fresh_name())
        } else {
            None
        };
        if budget == 2 || self.rng.gen_bool(0.2) {
            let kind = *[
                DecoratorKind::Inverter,
                DecoratorKind::ForceSuccess,
                DecoratorKind::ForceFailure,
            ]
            .choose(self.rng)
            .unwrap();
            return NodeAst::Decorator {
                kind,
                name,
                child: Box::new(self.node(budget - 1)),
                pos: p(),
            };
        }
        let rest = budget - 1;
        let k = self.rng.gen_range(1..=rest.min(4));
        // split `rest` into k positive parts
        let mut sizes = vec![1; k];
        for _ in 0..rest - k {
            let i = self.rng.gen_range(0..k);
            sizes[i] += 1;
        }
        let kind = match self.rng.gen_range(0..5) {
            0 => CompositeKind::Fallback,
            1 => CompositeKind::FallbackM,
            2 => CompositeKind::Sequence,
            3 => CompositeKind::SequenceM,
            _ => CompositeKind::Parallel(self.rng.gen_range(1..=k as i64)),
        };
        let children = sizes.into_iter().map(|s| self.node(s)).collect();
        NodeAst::Composite {
            kind,
            name,
            children,
            pos: p(),
        }
    }

    fn arith(&mut self, depth: usize) -> ExprAst {
        // atoms admit no boolean connectives
        if depth == 0 || self.rng.gen_bool(0.5) {
            return self.leaf(Ty::Int);
        }
        match self.rng.gen_range(0..3) {
            0 => ExprAst::Unary(UnaryOp::Neg, Box::new(self.arith(depth - 1)), p()),
            1 => bin(BinaryOp::Add, self.arith(depth - 1), self.arith(depth - 1)),
            _ => bin(BinaryOp::Sub, self.arith(depth - 1), self.arith(depth - 1)),
        }
    }

    fn atom(&mut self) -> LtlAst {
        let bools = self.vars_of(Ty::Bool);
        match self.rng.gen_range(0..4) {
            0 => {
                let mut nodes: Vec<String> = vec!["__root".into()];
                nodes.extend(self.node_names.iter().cloned());
                let node = nodes.choose(self.rng).unwrap().clone();
                let status = *[Status::Invalid, Status::Success, Status::Failure, Status::Running]
                    .choose(self.rng)
                    .unwrap();
                Ltl::atom(AtomAst::Status {
                    node,
                    status,
                    pos: p(),
                })
            }
            1 if !bools.is_empty() => {
                let v = *bools.choose(self.rng).unwrap();
                Ltl::atom(AtomAst::Expr(ExprAst::Ident(self.vars[v].name.clone(), p())))
            }
            _ => {
                let ty = self.any_type();
                let e = if ty == Ty::Int {
                    let op = *[BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge]
                        .choose(self.rng)
                        .unwrap();
                    bin(op, self.arith(2), self.arith(2))
                } else {
                    let op = *[BinaryOp::Eq, BinaryOp::Ne].choose(self.rng).unwrap();
                    bin(op, self.leaf(ty), self.leaf(ty))
                };
                Ltl::atom(AtomAst::Expr(e))
            }
        }
    }

    fn formula(&mut self, depth: usize) -> LtlAst {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.atom();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 => Ltl::not(self.formula(d)),
            1 => Ltl::and(self.formula(d), self.formula(d)),
            2 => Ltl::or(self.formula(d), self.formula(d)),
            3 => Ltl::implies(self.formula(d), self.formula(d)),
            4 => Ltl::next(self.formula(d)),
            5 => Ltl::until(self.formula(d), self.formula(d)),
            6 => Ltl::strong_release(self.formula(d), self.formula(d)),
            7 => Ltl::globally(self.formula(d)),
            _ => Ltl::finally(self.formula(d)),
        }
    }
}

/// A well-formed, well-typed program.
pub fn random_ast<R: Rng>(rng: &mut R, cfg: GenConfig) -> Ast {
    let mut g = Gen {
        rng,
        cfg,
        vars: Vec::new(),
        node_names: Vec::new(),
        next_node: 0,
    };
    let (env_decls, blackboard_decls) = g.var_decls();
    let budget = g.rng.gen_range(1..=cfg.max_nodes);
    let root = g.node(budget);
    let n_specs = g.rng.gen_range(0..=cfg.max_specs);
    let specs = (0..n_specs)
        .map(|i| SpecDecl {
            name: format!("s{i}"),
            formula: g.formula(cfg.max_spec_depth),
            pos: p(),
        })
        .collect();
    Ast {
        name: format!("t{}", g.rng.gen_range(0..1000)),
        env_decls,
        blackboard_decls,
        root,
        specs,
    }
}

/// A validated model. Generated programs are valid by construction.
pub fn random_model<R: Rng>(rng: &mut R, cfg: GenConfig) -> SbtModel {
    let ast = random_ast(rng, cfg);
    match validate(&ast) {
        Ok(c) => c.model,
        Err(d) => panic!(
            "generator produced an invalid program: {d:?}\n{}",
            crate::dsl::pretty_print(&ast)
        ),
    }
}

/// Random formula over atoms `0..atoms` with at most `depth` nested
/// operators, using every surface operator.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, atoms: usize) -> Ltl<usize> {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..12) {
            0 => Ltl::True,
            1 => Ltl::False,
            _ => Ltl::atom(rng.gen_range(0..atoms)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => Ltl::not(random_formula(rng, d, atoms)),
        1 => Ltl::and(random_formula(rng, d, atoms), random_formula(rng, d, atoms)),
        2 => Ltl::or(random_formula(rng, d, atoms), random_formula(rng, d, atoms)),
        3 => Ltl::implies(random_formula(rng, d, atoms), random_formula(rng, d, atoms)),
        4 => Ltl::next(random_formula(rng, d, atoms)),
        5 => Ltl::until(random_formula(rng, d, atoms), random_formula(rng, d, atoms)),
        6 => Ltl::strong_release(random_formula(rng, d, atoms), random_formula(rng, d, atoms)),
        7 => Ltl::globally(random_formula(rng, d, atoms)),
        _ => Ltl::finally(random_formula(rng, d, atoms)),
    }
}

/// Random total Kripke structure on `n` states with out-degree in
/// `1..=max_out` and labels over `atoms` bits.
pub fn random_kripke<R: Rng>(rng: &mut R, n: usize, max_out: usize, atoms: usize) -> ExplicitKripke {
    let succ = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_out.min(n));
            let mut s: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let labels = (0..n).map(|_| rng.gen_range(0..1u64 << atoms)).collect();
    let k = rng.gen_range(1..=n.min(2));
    let mut initials: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
    initials.sort_unstable();
    ExplicitKripke {
        initials,
        succ,
        labels,
    }
}

/// Random Kripke structure in which every state on a cycle has exactly one
/// successor, so every infinite path is a simple lasso. Off-cycle states
/// branch freely.
pub fn random_lasso_kripke<R: Rng>(rng: &mut R, n: usize, atoms: usize) -> ExplicitKripke {
    let mut succ: Vec<Vec<usize>> = (0..n).map(|_| vec![rng.gen_range(0..n)]).collect();
    // in a functional graph the cycle states are the image of f^n
    let mut on_cycle = vec![false; n];
    for s in 0..n {
        let mut t = s;
        for _ in 0..n {
            t = succ[t][0];
        }
        on_cycle[t] = true;
    }
    let reaches = |succ: &[Vec<usize>], from: usize, to: usize| {
        let mut seen = vec![false; succ.len()];
        let mut stack = vec![from];
        while let Some(s) = stack.pop() {
            if s == to {
                return true;
            }
            if !std::mem::replace(&mut seen[s], true) {
                stack.extend(&succ[s]);
            }
        }
        false
    };
    for s in 0..n {
        if on_cycle[s] {
            continue;
        }
        for _ in 0..rng.gen_range(0..3) {
            let t = rng.gen_range(0..n);
            // an edge into something that reaches back would close a cycle
            if !succ[s].contains(&t) && !reaches(&succ, t, s) {
                succ[s].push(t);
            }
        }
        succ[s].sort_unstable();
    }
    let labels = (0..n).map(|_| rng.gen_range(0..1u64 << atoms)).collect();
    let k = rng.gen_range(1..=n.min(3));
    let mut initials: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
    initials.sort_unstable();
    ExplicitKripke {
        initials,
        succ,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, pretty_print, tokenize};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_programs_validate_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for cfg in [GenConfig::small(), GenConfig::syntax()] {
            for _ in 0..200 {
                let ast = random_ast(&mut rng, cfg);
                let text = pretty_print(&ast);
                assert!(validate(&ast).is_ok(), "{text}");
                assert_eq!(parse(&tokenize(&text).unwrap()).unwrap(), ast, "{text}");
            }
        }
    }

    #[test]
    fn small_models_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let m = random_model(&mut rng, GenConfig::small());
            assert!(m.nodes.len() <= 8);
            assert!(m.env_vars.len() + m.bb_vars.len() <= 3);
            for v in m.env_vars.iter().chain(&m.bb_vars) {
                assert!(v.domain.size(&m.enums) <= 4);
            }
        }
    }
}
