//! Name resolution, type checking and structural checks turning an [`Ast`]
//! into an [`SbtModel`].

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::{Compiled, Diagnostic};
use crate::ltl::Ltl;
use crate::model::{
    Assignment, Atom, BinaryOp, Domain, Expr, GuardedCommand, NodeDef, NodeId, NodeKind,
    SbtModel, Scope, SpecDef, Type, UnaryOp, VarDecl, VarRef, ROOT_NAME,
};
use crate::smv::is_reserved_word;

pub fn validate(ast: &Ast) -> Result<Compiled, Vec<Diagnostic>> {
    let mut v = Validator::default();
    let model = v.run(ast);
    if v.diags.iter().any(Diagnostic::is_error) {
        Err(v.diags)
    } else {
        Ok(Compiled {
            model,
            warnings: v.diags,
        })
    }
}

#[derive(Default)]
struct Validator {
    diags: Vec<Diagnostic>,
    enums: Vec<Vec<String>>,
    /// label -> (enum type, ordinal)
    labels: HashMap<String, (usize, i64)>,
    ambiguous_labels: HashSet<String>,
    env_vars: Vec<VarDecl>,
    bb_vars: Vec<VarDecl>,
    /// Every user-visible name declared so far.
    taken: HashSet<String>,
    nodes: Vec<NodeDef>,
    memory_nodes: Vec<NodeId>,
}

impl Validator {
    fn error(&mut self, pos: Pos, message: impl Into<String>) {
        self.diags
            .push(Diagnostic::error(message, pos.line.max(1), pos.column.max(1)));
    }

    fn warning(&mut self, pos: Pos, message: impl Into<String>) {
        self.diags
            .push(Diagnostic::warning(message, pos.line.max(1), pos.column.max(1)));
    }

    fn run(&mut self, ast: &Ast) -> SbtModel {
        self.collect_enums(ast);
        for d in &ast.env_decls {
            self.var_decl(d, Scope::Environment);
        }
        for d in &ast.blackboard_decls {
            self.var_decl(d, Scope::Blackboard);
        }

        self.nodes.push(NodeDef {
            id: 0,
            name: ROOT_NAME.to_string(),
            kind: NodeKind::Root,
            parent: None,
            children: Vec::new(),
            memory_slot: None,
        });
        self.check_node_names(&ast.root);
        let child = self.node(&ast.root, 0);
        self.nodes[0].children.push(child);

        let mut specs = Vec::new();
        let mut spec_names = HashSet::new();
        for s in &ast.specs {
            if !spec_names.insert(s.name.clone()) {
                self.error(s.pos, format!("spec `{}` is declared twice", s.name));
            }
            if let Some(formula) = self.ltl(&s.formula, s.pos) {
                specs.push(SpecDef {
                    name: s.name.clone(),
                    formula,
                });
            }
        }

        SbtModel {
            name: ast.name.clone(),
            nodes: std::mem::take(&mut self.nodes),
            env_vars: std::mem::take(&mut self.env_vars),
            bb_vars: std::mem::take(&mut self.bb_vars),
            enums: std::mem::take(&mut self.enums),
            specs,
            memory_nodes: std::mem::take(&mut self.memory_nodes),
        }
    }

    fn collect_enums(&mut self, ast: &Ast) {
        for d in ast.env_decls.iter().chain(&ast.blackboard_decls) {
            let DomainSpec::Enum(labels) = &d.domain else {
                continue;
            };
            let mut seen = HashSet::new();
            let mut ok = true;
            for l in labels {
                if !seen.insert(l) {
                    self.error(d.pos, format!("label `{l}` repeated in enumeration of `{}`", d.name));
                    ok = false;
                }
                if reserved_name(l) {
                    self.error(d.pos, format!("`{l}` is a reserved name"));
                    ok = false;
                }
            }
            if !ok || self.enums.contains(labels) {
                continue;
            }
            let idx = self.enums.len();
            self.enums.push(labels.clone());
            for (ordinal, l) in labels.iter().enumerate() {
                match self.labels.get(l) {
                    Some(_) => {
                        if self.ambiguous_labels.insert(l.clone()) {
                            self.error(
                                d.pos,
                                format!("label `{l}` appears in two different enumerations"),
                            );
                        }
                    }
                    None => {
                        self.labels.insert(l.clone(), (idx, ordinal as i64));
                    }
                }
            }
        }
        self.taken.extend(self.labels.keys().cloned());
    }

    fn enum_index(&self, labels: &[String]) -> Option<usize> {
        self.enums.iter().position(|e| e == labels)
    }

    fn var_decl(&mut self, d: &VarDeclAst, scope: Scope) {
        if reserved_name(&d.name) {
            self.error(d.pos, format!("`{}` is a reserved name", d.name));
        } else if !self.taken.insert(d.name.clone()) {
            self.error(d.pos, format!("name `{}` is already declared", d.name));
        }
        let domain = match &d.domain {
            DomainSpec::Int { lo, hi } => {
                if lo > hi {
                    self.error(d.pos, format!("empty range int[{lo}..{hi}]"));
                }
                Domain::Int { lo: *lo, hi: *hi }
            }
            DomainSpec::Bool => Domain::Bool,
            DomainSpec::Enum(labels) => match self.enum_index(labels) {
                Some(e) => Domain::Enum(e),
                None => return, // already reported
            },
        };
        match scope {
            Scope::Environment if d.initial.is_some() && !d.frozen => self.error(
                d.pos,
                format!("environment variable `{}` can only have a value when frozen", d.name),
            ),
            Scope::Blackboard if d.frozen => {
                self.error(d.pos, format!("blackboard variable `{}` cannot be frozen", d.name))
            }
            Scope::Blackboard if d.initial.is_none() => self.error(
                d.pos,
                format!("blackboard variable `{}` needs an initial value", d.name),
            ),
            _ => {}
        }
        let initial = d.initial.as_ref().and_then(|lit| {
            let code = match (lit, &domain) {
                (Literal::Int(v), Domain::Int { .. }) => Some(*v),
                (Literal::Bool(b), Domain::Bool) => Some(i64::from(*b)),
                (Literal::Label(l), Domain::Enum(e)) => self.enums[*e]
                    .iter()
                    .position(|x| x == l)
                    .map(|p| p as i64),
                _ => None,
            };
            match code {
                Some(c) if domain.contains(&self.enums, c) => Some(c),
                _ => {
                    self.error(
                        d.pos,
                        format!("initial value of `{}` is not in its domain", d.name),
                    );
                    None
                }
            }
        });
        let decl = VarDecl {
            name: d.name.clone(),
            scope,
            domain,
            initial,
            frozen: d.frozen,
        };
        match scope {
            Scope::Environment => self.env_vars.push(decl),
            Scope::Blackboard => self.bb_vars.push(decl),
        }
    }

    fn check_node_names(&mut self, root: &NodeAst) {
        let mut stack = vec![root];
        let mut seen = HashSet::new();
        while let Some(n) = stack.pop() {
            if let Some(name) = n.name() {
                if reserved_name(name) {
                    self.error(n.pos(), format!("`{name}` is a reserved name"));
                } else if !seen.insert(name.to_string()) {
                    self.error(n.pos(), format!("node name `{name}` is used twice"));
                } else if self.taken.contains(name) {
                    self.error(
                        n.pos(),
                        format!("node name `{name}` clashes with a variable or label"),
                    );
                }
            }
            match n {
                NodeAst::Composite { children, .. } => stack.extend(children.iter().rev()),
                NodeAst::Decorator { child, .. } => stack.push(child),
                _ => {}
            }
        }
    }

    fn node(&mut self, n: &NodeAst, parent: NodeId) -> NodeId {
        let id = self.nodes.len();
        let name = n.name().map(str::to_string).unwrap_or_else(|| {
            let kw = match n {
                NodeAst::Composite { kind, .. } => kind.keyword(),
                NodeAst::Decorator { kind, .. } => kind.keyword(),
                _ => unreachable!("leaves are always named"),
            };
            format!("__{kw}{id}")
        });
        self.nodes.push(NodeDef {
            id,
            name,
            kind: NodeKind::Root, // placeholder until children are known
            parent: Some(parent),
            children: Vec::new(),
            memory_slot: None,
        });
        let kind = match n {
            NodeAst::Composite {
                kind,
                children,
                pos,
                ..
            } => {
                let ids: Vec<NodeId> = children.iter().map(|c| self.node(c, id)).collect();
                self.nodes[id].children = ids;
                match kind {
                    CompositeKind::Fallback => NodeKind::Fallback { memory: false },
                    CompositeKind::FallbackM => NodeKind::Fallback { memory: true },
                    CompositeKind::Sequence => NodeKind::Sequence { memory: false },
                    CompositeKind::SequenceM => NodeKind::Sequence { memory: true },
                    CompositeKind::Parallel(m) => {
                        if *m < 1 || *m > children.len() as i64 {
                            self.error(
                                *pos,
                                format!(
                                    "parallel threshold {m} must be between 1 and {}",
                                    children.len()
                                ),
                            );
                        }
                        NodeKind::Parallel {
                            threshold: (*m).clamp(1, children.len().max(1) as i64) as usize,
                        }
                    }
                }
            }
            NodeAst::Decorator { kind, child, .. } => {
                let c = self.node(child, id);
                self.nodes[id].children = vec![c];
                NodeKind::Decorator(*kind)
            }
            NodeAst::Check { cond, name, .. } => {
                let e = self.bool_expr(cond, &format!("condition of check `{name}`"));
                NodeKind::Check(e.unwrap_or(Expr::Bool(false)))
            }
            NodeAst::Action { commands, .. } => NodeKind::Action(
                commands
                    .iter()
                    .map(|c| self.guarded(c))
                    .collect(),
            ),
        };
        if kind.has_memory() {
            self.nodes[id].memory_slot = Some(self.memory_nodes.len());
            self.memory_nodes.push(id);
        }
        self.nodes[id].kind = kind;
        id
    }

    fn guarded(&mut self, c: &GuardedAst) -> GuardedCommand {
        let guard = self
            .bool_expr(&c.guard, "guard")
            .unwrap_or(Expr::Bool(false));
        let mut assignments = Vec::new();
        for a in &c.assigns {
            let Some(target) = self.lookup_var(&a.target) else {
                self.error(a.pos, format!("unknown variable `{}`", a.target));
                continue;
            };
            if target.scope == Scope::Environment {
                self.error(
                    a.pos,
                    format!(
                        "environment variable is read-only from tree: `{}`",
                        a.target
                    ),
                );
                continue;
            }
            let decl_ty = self.var(target).domain.ty();
            let Some((value, ty)) = self.expr(&a.value) else {
                continue;
            };
            if ty != decl_ty {
                self.error(
                    a.value.pos(),
                    format!(
                        "type mismatch: cannot assign {ty} to `{}` of type {decl_ty}",
                        a.target
                    ),
                );
                continue;
            }
            if let Domain::Int { lo, hi } = self.var(target).domain {
                let (vlo, vhi) = self.interval(&value);
                if vlo < lo || vhi > hi {
                    self.warning(
                        a.pos,
                        format!(
                            "value assigned to `{}` may leave int[{lo}..{hi}] and will be clamped",
                            a.target
                        ),
                    );
                }
            }
            assignments.push(Assignment { target, value });
        }
        GuardedCommand {
            guard,
            assignments,
            status: c.status,
        }
    }

    fn var(&self, r: VarRef) -> &VarDecl {
        match r.scope {
            Scope::Environment => &self.env_vars[r.index],
            Scope::Blackboard => &self.bb_vars[r.index],
        }
    }

    fn lookup_var(&self, name: &str) -> Option<VarRef> {
        if let Some(index) = self.env_vars.iter().position(|v| v.name == name) {
            return Some(VarRef {
                scope: Scope::Environment,
                index,
            });
        }
        self.bb_vars
            .iter()
            .position(|v| v.name == name)
            .map(|index| VarRef {
                scope: Scope::Blackboard,
                index,
            })
    }

    /// Value range of an integer expression over the declared domains.
    fn interval(&self, e: &Expr) -> (i64, i64) {
        match e {
            Expr::Int(v) => (*v, *v),
            Expr::Var(r) => self.var(*r).domain.bounds(&self.enums),
            Expr::Unary(UnaryOp::Neg, a) => {
                let (lo, hi) = self.interval(a);
                (-hi, -lo)
            }
            Expr::Binary(BinaryOp::Add, a, b) => {
                let (alo, ahi) = self.interval(a);
                let (blo, bhi) = self.interval(b);
                (alo + blo, ahi + bhi)
            }
            Expr::Binary(BinaryOp::Sub, a, b) => {
                let (alo, ahi) = self.interval(a);
                let (blo, bhi) = self.interval(b);
                (alo - bhi, ahi - blo)
            }
            _ => (0, 1),
        }
    }

    fn bool_expr(&mut self, e: &ExprAst, what: &str) -> Option<Expr> {
        let (expr, ty) = self.expr(e)?;
        if ty != Type::Bool {
            self.error(e.pos(), format!("type mismatch: {what} must be bool, found {ty}"));
            return None;
        }
        Some(expr)
    }

    fn expr(&mut self, e: &ExprAst) -> Option<(Expr, Type)> {
        match e {
            ExprAst::Int(v, _) => Some((Expr::Int(*v), Type::Int)),
            ExprAst::Bool(b, _) => Some((Expr::Bool(*b), Type::Bool)),
            ExprAst::Ident(name, pos) => {
                if let Some(r) = self.lookup_var(name) {
                    let ty = self.var(r).domain.ty();
                    return Some((Expr::Var(r), ty));
                }
                if let Some(&(e, code)) = self.labels.get(name) {
                    return Some((Expr::Label(e, code), Type::Enum(e)));
                }
                if !self.ambiguous_labels.contains(name) {
                    self.error(*pos, format!("unknown identifier `{name}`"));
                }
                None
            }
            ExprAst::Unary(op, a, pos) => {
                let (inner, ty) = self.expr(a)?;
                let want = match op {
                    UnaryOp::Not => Type::Bool,
                    UnaryOp::Neg => Type::Int,
                };
                if ty != want {
                    let sym = if *op == UnaryOp::Not { "!" } else { "-" };
                    self.error(*pos, format!("type mismatch: `{sym}` expects {want}, found {ty}"));
                    return None;
                }
                Some((Expr::Unary(*op, Box::new(inner)), want))
            }
            ExprAst::Binary(op, a, b, pos) => {
                let lhs = self.expr(a);
                let rhs = self.expr(b);
                let ((l, lt), (r, rt)) = (lhs?, rhs?);
                let (operand_ok, result) = match op {
                    BinaryOp::Add | BinaryOp::Sub => (lt == Type::Int && rt == Type::Int, Type::Int),
                    BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        (lt == Type::Int && rt == Type::Int, Type::Bool)
                    }
                    BinaryOp::Eq | BinaryOp::Ne => (lt == rt, Type::Bool),
                    BinaryOp::And | BinaryOp::Or => {
                        (lt == Type::Bool && rt == Type::Bool, Type::Bool)
                    }
                };
                if !operand_ok {
                    self.error(
                        *pos,
                        format!("type mismatch: `{}` cannot combine {lt} and {rt}", op.symbol()),
                    );
                    return None;
                }
                Some((Expr::Binary(*op, Box::new(l), Box::new(r)), result))
            }
        }
    }

    fn ltl(&mut self, f: &LtlAst, pos: Pos) -> Option<Ltl<Atom>> {
        let mut ok = true;
        let resolved = f.map_atoms(&mut |a| match a {
            AtomAst::Expr(e) => match self.bool_expr(e, "temporal atom") {
                Some(x) => Atom::Pred(x),
                None => {
                    ok = false;
                    Atom::Pred(Expr::Bool(false))
                }
            },
            AtomAst::Status { node, status, pos: apos } => {
                match self.nodes.iter().position(|n| n.name == *node) {
                    Some(id) => Atom::Status(id, *status),
                    None => {
                        let p = if apos.line == 0 { pos } else { *apos };
                        self.error(p, format!("unknown node `{node}` in status()"));
                        ok = false;
                        Atom::Status(0, *status)
                    }
                }
            }
        });
        ok.then_some(resolved)
    }
}

/// Names users may not declare: the `__` prefix belongs to generated names,
/// and identifiers that clash with SMV keywords would break emission.
fn reserved_name(name: &str) -> bool {
    name.starts_with("__") || is_reserved_word(name)
}
