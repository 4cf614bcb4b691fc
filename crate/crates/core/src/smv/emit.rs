//! SBT to SMV translation.
//!
//! Each SMV state stands for one tick. State variables hold the values the
//! tick starts from (`__pre_<x>` for blackboard variables, `__mem_<node>` for
//! resume indices) together with the environment chosen for the tick; the
//! tick itself is unrolled into DEFINEs: an execution flag per node, the
//! blackboard value after every writing leaf, the post-tick blackboard under
//! the variable's own name, the next resume index, and node statuses.
//! `__started` is false only in the initial state, which stands for the
//! moment before the first tick.

use super::doc::{SExpr, SOp, SmvDocument, SmvType};
use super::OptLevel;
use crate::ltl::Ltl;
use crate::model::{
    Atom, BinaryOp, DecoratorKind, Domain, Expr, NodeId, NodeKind, SbtModel, Scope, UnaryOp,
};
use crate::status::Status;

pub const STARTED: &str = "__started";

pub fn status_name(model: &SbtModel, n: NodeId) -> String {
    format!("__status_{}", model.nodes[n].name)
}

fn exec_name(model: &SbtModel, n: NodeId) -> String {
    format!("__exec_{}", model.nodes[n].name)
}

pub fn mem_name(model: &SbtModel, n: NodeId) -> String {
    format!("__mem_{}", model.nodes[n].name)
}

pub fn memnext_name(model: &SbtModel, n: NodeId) -> String {
    format!("__memnext_{}", model.nodes[n].name)
}

pub fn pre_name(var: &str) -> String {
    format!("__pre_{var}")
}

fn val_name(var: &str, leaf: NodeId) -> String {
    format!("__val_{var}_{leaf}")
}

const STATUS_LABELS: [Status; 4] = [
    Status::Invalid,
    Status::Success,
    Status::Failure,
    Status::Running,
];

fn status_const(s: Status) -> SExpr {
    SExpr::ident(s.name())
}

fn status_type() -> SmvType {
    SmvType::Enum(STATUS_LABELS.iter().map(|s| s.name().to_string()).collect())
}

/// Whether the status of a node of this kind is a state variable at `level`.
pub fn status_is_var(level: OptLevel, kind: &NodeKind) -> bool {
    match level {
        OptLevel::NoOpt => true,
        OptLevel::FirstOpt => kind.is_leaf(),
        OptLevel::LastOpt => matches!(kind, NodeKind::Action(_)),
        OptLevel::FullOpt => false,
    }
}

pub fn smv_type(model: &SbtModel, d: &Domain) -> SmvType {
    match d {
        Domain::Int { lo, hi } => SmvType::Range(*lo, *hi),
        Domain::Bool => SmvType::Boolean,
        Domain::Enum(e) => SmvType::Enum(model.enums[*e].clone()),
    }
}

/// Constant for a value code of the given domain.
pub fn value_const(model: &SbtModel, d: &Domain, code: i64) -> SExpr {
    match d {
        Domain::Int { .. } => SExpr::Int(code),
        Domain::Bool => SExpr::Bool(code != 0),
        Domain::Enum(e) => SExpr::ident(model.enums[*e][code as usize].clone()),
    }
}

fn domain_choice(model: &SbtModel, d: &Domain) -> SExpr {
    match d {
        Domain::Int { lo, hi } => SExpr::Range(*lo, *hi),
        Domain::Bool => SExpr::Set(vec![SExpr::Bool(false), SExpr::Bool(true)]),
        Domain::Enum(e) => SExpr::Set(model.enums[*e].iter().map(|l| SExpr::ident(l.clone())).collect()),
    }
}

/// Translates a model expression; blackboard variables read the names in
/// `bb` (the values current at that point of the tick).
pub fn expr(model: &SbtModel, e: &Expr, bb: &[SExpr]) -> SExpr {
    match e {
        Expr::Int(v) => SExpr::Int(*v),
        Expr::Bool(b) => SExpr::Bool(*b),
        Expr::Label(t, code) => SExpr::ident(model.enums[*t][*code as usize].clone()),
        Expr::Var(r) => match r.scope {
            Scope::Environment => SExpr::ident(model.env_vars[r.index].name.clone()),
            Scope::Blackboard => bb[r.index].clone(),
        },
        Expr::Unary(UnaryOp::Not, a) => SExpr::not(expr(model, a, bb)),
        Expr::Unary(UnaryOp::Neg, a) => SExpr::Neg(Box::new(expr(model, a, bb))),
        Expr::Binary(op, a, b) => {
            let op = match op {
                BinaryOp::Add => SOp::Add,
                BinaryOp::Sub => SOp::Sub,
                BinaryOp::Eq => SOp::Eq,
                BinaryOp::Ne => SOp::Ne,
                BinaryOp::Lt => SOp::Lt,
                BinaryOp::Le => SOp::Le,
                BinaryOp::Gt => SOp::Gt,
                BinaryOp::Ge => SOp::Ge,
                BinaryOp::And => SOp::And,
                BinaryOp::Or => SOp::Or,
            };
            SExpr::bin(op, expr(model, a, bb), expr(model, b, bb))
        }
    }
}

fn post_names(model: &SbtModel) -> Vec<SExpr> {
    model
        .bb_vars
        .iter()
        .map(|v| SExpr::ident(v.name.clone()))
        .collect()
}

fn atom_expr(model: &SbtModel, a: &Atom) -> SExpr {
    match a {
        Atom::Pred(e) => expr(model, e, &post_names(model)),
        Atom::Status(n, s) => SExpr::eq(SExpr::ident(status_name(model, *n)), status_const(*s)),
    }
}

/// SMV text of a temporal formula. Unary temporal operands are always
/// parenthesised; binary operands unless they are a single identifier or
/// constant.
pub fn ltl_text<A: Clone>(f: &Ltl<A>, atom: &dyn Fn(&A) -> SExpr) -> String {
    let operand = |g: &Ltl<A>| -> String {
        let text = ltl_text(g, atom);
        let simple = match g {
            Ltl::True | Ltl::False => true,
            Ltl::Atom(a) => atom(a).is_atomic(),
            _ => false,
        };
        if simple {
            text
        } else {
            format!("({text})")
        }
    };
    match f {
        Ltl::True => "TRUE".into(),
        Ltl::False => "FALSE".into(),
        Ltl::Atom(a) => atom(a).to_string(),
        Ltl::Not(a) => format!("!{}", operand(a)),
        Ltl::Next(a) => format!("X ({})", ltl_text(a, atom)),
        Ltl::Globally(a) => format!("G ({})", ltl_text(a, atom)),
        Ltl::Finally(a) => format!("F ({})", ltl_text(a, atom)),
        Ltl::And(a, b) => format!("{} & {}", operand(a), operand(b)),
        Ltl::Or(a, b) => format!("{} | {}", operand(a), operand(b)),
        Ltl::Implies(a, b) => format!("{} -> {}", operand(a), operand(b)),
        Ltl::Until(a, b) => format!("{} U {}", operand(a), operand(b)),
        Ltl::Release(a, b) => ltl_text(
            &Ltl::not(Ltl::until(Ltl::not((**a).clone()), Ltl::not((**b).clone()))),
            atom,
        ),
        Ltl::StrongRelease(a, b) => {
            let (x, y) = (operand(a), operand(b));
            format!("{y} U ({x} & {y})")
        }
    }
}

/// Formula text for a spec: strong release is expanded, the rest maps
/// one-to-one.
pub fn spec_text(model: &SbtModel, f: &Ltl<Atom>) -> String {
    ltl_text(&f.expand_strong_release(), &|a| atom_expr(model, a))
}

/// The `LTLSPEC` line for a formula.
pub fn emit_spec(model: &SbtModel, f: &Ltl<Atom>) -> String {
    format!("LTLSPEC {}", spec_text(model, f))
}

pub fn emit(model: &SbtModel, level: OptLevel) -> SmvDocument {
    let mut doc = SmvDocument {
        comments: vec![format!("tree {}, encoding {level}", model.name)],
        constants: STATUS_LABELS.iter().map(|s| s.name().to_string()).collect(),
        vars: Vec::new(),
        defines: Vec::new(),
        assigns: Vec::new(),
        specs: Vec::new(),
    };

    // state variables
    doc.vars.push((STARTED.into(), SmvType::Boolean));
    doc.assigns
        .push((STARTED.into(), SExpr::Bool(false), SExpr::Bool(true)));
    for v in &model.env_vars {
        let ty = smv_type(model, &v.domain);
        let init = match v.initial {
            Some(code) => value_const(model, &v.domain, code),
            None => domain_choice(model, &v.domain),
        };
        let next = if v.frozen {
            SExpr::ident(v.name.clone())
        } else {
            domain_choice(model, &v.domain)
        };
        doc.vars.push((v.name.clone(), ty));
        doc.assigns.push((v.name.clone(), init, next));
    }
    for v in &model.bb_vars {
        let name = pre_name(&v.name);
        let init = value_const(model, &v.domain, v.initial.expect("blackboard initial"));
        doc.vars.push((name.clone(), smv_type(model, &v.domain)));
        doc.assigns.push((name, init, SExpr::ident(v.name.clone())));
    }
    for &n in &model.memory_nodes {
        let k = model.nodes[n].children.len() as i64;
        doc.vars.push((mem_name(model, n), SmvType::Range(0, k - 1)));
        doc.assigns.push((
            mem_name(model, n),
            SExpr::Int(0),
            SExpr::ident(memnext_name(model, n)),
        ));
    }

    let st = |n: NodeId| SExpr::ident(status_name(model, n));
    let ex = |n: NodeId| SExpr::ident(exec_name(model, n));
    let st_is = |n: NodeId, s: Status| SExpr::eq(st(n), status_const(s));

    // execution flags
    for node in &model.nodes {
        let e = match node.parent {
            None => SExpr::ident(STARTED),
            Some(p) => {
                let parent = &model.nodes[p];
                let k = parent
                    .children
                    .iter()
                    .position(|&c| c == node.id)
                    .expect("child of its parent");
                match &parent.kind {
                    NodeKind::Sequence { .. } | NodeKind::Fallback { .. } => {
                        let go_on = if matches!(parent.kind, NodeKind::Sequence { .. }) {
                            Status::Success
                        } else {
                            Status::Failure
                        };
                        let resumed_here = parent.memory_slot.map(|_| {
                            SExpr::and(
                                ex(p),
                                SExpr::eq(SExpr::ident(mem_name(model, p)), SExpr::Int(k as i64)),
                            )
                        });
                        match (k, resumed_here) {
                            (0, None) => ex(p),
                            (0, Some(r)) => r,
                            (_, None) => st_is(parent.children[k - 1], go_on),
                            (_, Some(r)) => SExpr::or(r, st_is(parent.children[k - 1], go_on)),
                        }
                    }
                    _ => ex(p),
                }
            }
        };
        doc.defines.push((exec_name(model, node.id), e));
    }

    // blackboard values along the leaves, and leaf statuses
    let mut cur: Vec<SExpr> = model
        .bb_vars
        .iter()
        .map(|v| SExpr::ident(pre_name(&v.name)))
        .collect();
    let mut status_formula: Vec<Option<SExpr>> = vec![None; model.nodes.len()];
    for node in &model.nodes {
        let id = node.id;
        match &node.kind {
            NodeKind::Check(c) => {
                status_formula[id] = Some(SExpr::Case(vec![
                    (SExpr::not(ex(id)), status_const(Status::Invalid)),
                    (expr(model, c, &cur), status_const(Status::Success)),
                    (SExpr::Bool(true), status_const(Status::Failure)),
                ]));
            }
            NodeKind::Action(cmds) => {
                let mut arms = vec![(SExpr::not(ex(id)), status_const(Status::Invalid))];
                let mut effects: Vec<(SExpr, Vec<SExpr>)> = Vec::new();
                for cmd in cmds {
                    let guard = expr(model, &cmd.guard, &cur);
                    arms.push((guard.clone(), status_const(cmd.status)));
                    let mut after = cur.clone();
                    for a in &cmd.assignments {
                        let decl = model.var(a.target);
                        let mut rhs = expr(model, &a.value, &after);
                        if let Domain::Int { lo, hi } = decl.domain {
                            let (vlo, vhi) = model.interval(&a.value);
                            if vlo < lo || vhi > hi {
                                rhs = SExpr::Case(vec![
                                    (SExpr::bin(SOp::Lt, rhs.clone(), SExpr::Int(lo)), SExpr::Int(lo)),
                                    (SExpr::bin(SOp::Gt, rhs.clone(), SExpr::Int(hi)), SExpr::Int(hi)),
                                    (SExpr::Bool(true), rhs),
                                ]);
                            }
                        }
                        after[a.target.index] = rhs;
                    }
                    effects.push((guard, after));
                }
                arms.push((SExpr::Bool(true), status_const(Status::Failure)));
                status_formula[id] = Some(SExpr::Case(arms));
                let written: Vec<usize> = (0..model.bb_vars.len())
                    .filter(|&x| {
                        cmds.iter().any(|c| {
                            c.assignments
                                .iter()
                                .any(|a| a.target.scope == Scope::Blackboard && a.target.index == x)
                        })
                    })
                    .collect();
                for x in written {
                    let mut arms = vec![(SExpr::not(ex(id)), cur[x].clone())];
                    for (guard, after) in &effects {
                        arms.push((guard.clone(), after[x].clone()));
                    }
                    arms.push((SExpr::Bool(true), cur[x].clone()));
                    let name = val_name(&model.bb_vars[x].name, id);
                    doc.defines.push((name.clone(), SExpr::Case(arms)));
                    cur[x] = SExpr::ident(name);
                }
            }
            _ => {}
        }
    }
    for (v, value) in model.bb_vars.iter().zip(&cur) {
        doc.defines.push((v.name.clone(), value.clone()));
    }

    // composite statuses
    for node in &model.nodes {
        let id = node.id;
        let invalid = (SExpr::not(ex(id)), status_const(Status::Invalid));
        let f = match &node.kind {
            NodeKind::Check(_) | NodeKind::Action(_) => continue,
            NodeKind::Root => st(node.children[0]),
            NodeKind::Sequence { .. } | NodeKind::Fallback { .. } => {
                let (stop, otherwise) = if matches!(node.kind, NodeKind::Sequence { .. }) {
                    (Status::Failure, Status::Success)
                } else {
                    (Status::Success, Status::Failure)
                };
                let mut arms = vec![invalid];
                for &c in &node.children {
                    arms.push((st_is(c, stop), status_const(stop)));
                    arms.push((st_is(c, Status::Running), status_const(Status::Running)));
                }
                arms.push((SExpr::Bool(true), status_const(otherwise)));
                SExpr::Case(arms)
            }
            NodeKind::Parallel { threshold } => {
                let count = |s: Status| {
                    node.children
                        .iter()
                        .map(|&c| {
                            SExpr::Case(vec![
                                (st_is(c, s), SExpr::Int(1)),
                                (SExpr::Bool(true), SExpr::Int(0)),
                            ])
                        })
                        .reduce(|a, b| SExpr::bin(SOp::Add, a, b))
                        .expect("parallel has children")
                };
                let n = node.children.len() as i64;
                let m = *threshold as i64;
                SExpr::Case(vec![
                    invalid,
                    (
                        SExpr::bin(SOp::Ge, count(Status::Success), SExpr::Int(m)),
                        status_const(Status::Success),
                    ),
                    (
                        SExpr::bin(SOp::Gt, count(Status::Failure), SExpr::Int(n - m)),
                        status_const(Status::Failure),
                    ),
                    (SExpr::Bool(true), status_const(Status::Running)),
                ])
            }
            NodeKind::Decorator(kind) => {
                let c = node.children[0];
                let mut arms = vec![invalid];
                match kind {
                    DecoratorKind::Inverter => {
                        arms.push((st_is(c, Status::Success), status_const(Status::Failure)));
                        arms.push((st_is(c, Status::Failure), status_const(Status::Success)));
                        arms.push((SExpr::Bool(true), status_const(Status::Running)));
                    }
                    DecoratorKind::ForceSuccess | DecoratorKind::ForceFailure => {
                        let forced = if *kind == DecoratorKind::ForceSuccess {
                            Status::Success
                        } else {
                            Status::Failure
                        };
                        arms.push((st_is(c, Status::Running), status_const(Status::Running)));
                        arms.push((SExpr::Bool(true), status_const(forced)));
                    }
                }
                SExpr::Case(arms)
            }
        };
        status_formula[id] = Some(f);
    }

    // next resume indices
    for &n in &model.memory_nodes {
        let node = &model.nodes[n];
        let mut which: Vec<(SExpr, SExpr)> = node
            .children
            .iter()
            .enumerate()
            .map(|(k, &c)| (st_is(c, Status::Running), SExpr::Int(k as i64)))
            .collect();
        which.push((SExpr::Bool(true), SExpr::Int(0)));
        doc.defines.push((
            memnext_name(model, n),
            SExpr::Case(vec![
                (SExpr::not(ex(n)), SExpr::ident(mem_name(model, n))),
                (st_is(n, Status::Running), SExpr::Case(which)),
                (SExpr::Bool(true), SExpr::Int(0)),
            ]),
        ));
    }

    // statuses: stored or computed depending on the level
    for node in &model.nodes {
        let f = status_formula[node.id].take().expect("every node has a status formula");
        let name = status_name(model, node.id);
        if status_is_var(level, &node.kind) {
            doc.vars.push((name.clone(), status_type()));
            doc.assigns
                .push((name, status_const(Status::Invalid), SExpr::next(f)));
        } else {
            doc.defines.push((name, f));
        }
    }

    for spec in &model.specs {
        doc.specs.push((spec.name.clone(), spec_text(model, &spec.formula)));
    }
    doc
}
