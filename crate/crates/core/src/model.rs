//! Validated, immutable description of one stateful behavior tree.
//!
//! Variable values are stored as dense `i64` codes: integers as themselves,
//! booleans as 0/1 and enumeration labels by their declaration ordinal. The
//! declared [`Domain`] of a variable says how to read a code back.

use std::fmt;

use crate::ltl::Ltl;
use crate::status::Status;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Environment,
    Blackboard,
}

/// Index of a variable inside its scope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub scope: Scope,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Int { lo: i64, hi: i64 },
    Bool,
    /// Index into [`SbtModel::enums`].
    Enum(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Int,
    Bool,
    Enum(usize),
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Enum(_) => f.write_str("enum"),
        }
    }
}

impl Domain {
    pub fn ty(&self) -> Type {
        match self {
            Domain::Int { .. } => Type::Int,
            Domain::Bool => Type::Bool,
            Domain::Enum(e) => Type::Enum(*e),
        }
    }

    /// Smallest and largest code in the domain.
    pub fn bounds(&self, enums: &[Vec<String>]) -> (i64, i64) {
        match self {
            Domain::Int { lo, hi } => (*lo, *hi),
            Domain::Bool => (0, 1),
            Domain::Enum(e) => (0, enums[*e].len() as i64 - 1),
        }
    }

    pub fn contains(&self, enums: &[Vec<String>], code: i64) -> bool {
        let (lo, hi) = self.bounds(enums);
        lo <= code && code <= hi
    }

    pub fn values(&self, enums: &[Vec<String>]) -> std::ops::RangeInclusive<i64> {
        let (lo, hi) = self.bounds(enums);
        lo..=hi
    }

    pub fn size(&self, enums: &[Vec<String>]) -> u64 {
        let (lo, hi) = self.bounds(enums);
        (hi - lo + 1) as u64
    }

    /// Clamps an integer result into the domain. Non-integer domains are
    /// returned unchanged because typing guarantees in-range codes.
    pub fn clamp(&self, code: i64) -> i64 {
        match self {
            Domain::Int { lo, hi } => code.clamp(*lo, *hi),
            _ => code,
        }
    }
}

/// Human-facing view of a code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Enum(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Enum(l) => f.write_str(l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub scope: Scope,
    pub domain: Domain,
    /// Declared initial code. Always present for blackboard variables; for
    /// environment variables only when frozen to a fixed value.
    pub initial: Option<i64>,
    pub frozen: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}

/// Type-checked expression over the model's variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    /// Enumeration label: (enum type, ordinal).
    Label(usize, i64),
    Var(VarRef),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub target: VarRef,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedCommand {
    pub guard: Expr,
    pub assignments: Vec<Assignment>,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecoratorKind {
    Inverter,
    ForceSuccess,
    ForceFailure,
}

impl DecoratorKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DecoratorKind::Inverter => "inverter",
            DecoratorKind::ForceSuccess => "force_success",
            DecoratorKind::ForceFailure => "force_failure",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Implicit wrapper above the declared root; passes its child's status through.
    Root,
    Sequence { memory: bool },
    Fallback { memory: bool },
    Parallel { threshold: usize },
    Decorator(DecoratorKind),
    Check(Expr),
    Action(Vec<GuardedCommand>),
}

impl NodeKind {
    pub fn is_leaf(&self) -> bool {
        matches!(self, NodeKind::Check(_) | NodeKind::Action(_))
    }

    pub fn has_memory(&self) -> bool {
        matches!(
            self,
            NodeKind::Sequence { memory: true } | NodeKind::Fallback { memory: true }
        )
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            NodeKind::Root => "root",
            NodeKind::Sequence { memory: false } => "sequence",
            NodeKind::Sequence { memory: true } => "sequence_m",
            NodeKind::Fallback { memory: false } => "fallback",
            NodeKind::Fallback { memory: true } => "fallback_m",
            NodeKind::Parallel { .. } => "parallel",
            NodeKind::Decorator(d) => d.keyword(),
            NodeKind::Check(_) => "check",
            NodeKind::Action(_) => "action",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeDef {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Slot in [`crate::MemoryState`] for memory composites.
    pub memory_slot: Option<usize>,
}

/// Atomic proposition of a temporal spec.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Pred(Expr),
    Status(NodeId, Status),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDef {
    pub name: String,
    pub formula: Ltl<Atom>,
}

/// Name of the implicit wrapper node.
pub const ROOT_NAME: &str = "__root";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbtModel {
    pub name: String,
    /// Nodes in depth-first pre-order; node 0 is the `__root` wrapper.
    pub nodes: Vec<NodeDef>,
    pub env_vars: Vec<VarDecl>,
    pub bb_vars: Vec<VarDecl>,
    /// Distinct enumeration types, each a list of labels.
    pub enums: Vec<Vec<String>>,
    pub specs: Vec<SpecDef>,
    /// Memory composite node for each memory slot.
    pub memory_nodes: Vec<NodeId>,
}

impl SbtModel {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn var(&self, r: VarRef) -> &VarDecl {
        match r.scope {
            Scope::Environment => &self.env_vars[r.index],
            Scope::Blackboard => &self.bb_vars[r.index],
        }
    }

    pub fn find_var(&self, name: &str) -> Option<VarRef> {
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

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn spec(&self, name: &str) -> Option<&SpecDef> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn value_of(&self, domain: &Domain, code: i64) -> Value {
        match domain {
            Domain::Int { .. } => Value::Int(code),
            Domain::Bool => Value::Bool(code != 0),
            Domain::Enum(e) => Value::Enum(
                self.enums[*e]
                    .get(code as usize)
                    .cloned()
                    .unwrap_or_else(|| format!("#{code}")),
            ),
        }
    }

    pub fn code_of(&self, domain: &Domain, value: &Value) -> Option<i64> {
        let code = match (domain, value) {
            (Domain::Int { .. }, Value::Int(v)) => *v,
            (Domain::Bool, Value::Bool(b)) => i64::from(*b),
            (Domain::Enum(e), Value::Enum(l)) => self.enums[*e].iter().position(|x| x == l)? as i64,
            _ => return None,
        };
        domain.contains(&self.enums, code).then_some(code)
    }

    /// Every environment valuation admissible at the initial moment, in
    /// lexicographic order of codes. Frozen variables with a declared value
    /// contribute only that value.
    pub fn initial_env_choices(&self) -> Vec<Vec<i64>> {
        let ranges: Vec<Vec<i64>> = self
            .env_vars
            .iter()
            .map(|v| match v.initial {
                Some(c) => vec![c],
                None => v.domain.values(&self.enums).collect(),
            })
            .collect();
        cartesian(&ranges)
    }

    /// Every environment valuation admissible for the next tick given the
    /// current one: frozen variables keep their value, free ones range over
    /// their whole domain.
    pub fn next_env_choices(&self, current: &[i64]) -> Vec<Vec<i64>> {
        let ranges: Vec<Vec<i64>> = self
            .env_vars
            .iter()
            .zip(current)
            .map(|(v, &c)| {
                if v.frozen {
                    vec![c]
                } else {
                    v.domain.values(&self.enums).collect()
                }
            })
            .collect();
        cartesian(&ranges)
    }

    pub fn is_memoryless(&self) -> bool {
        self.memory_nodes.is_empty()
    }

    /// Range of values an integer expression can take, assuming every
    /// variable ranges over its whole domain.
    pub fn interval(&self, e: &Expr) -> (i64, i64) {
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

    /// Source-like text of an expression, with minimal parentheses.
    pub fn expr_text(&self, e: &Expr) -> String {
        fn prec(e: &Expr) -> u8 {
            match e {
                Expr::Binary(op, ..) => op.precedence(),
                Expr::Unary(..) => 5,
                _ => 6,
            }
        }
        match e {
            Expr::Int(v) => v.to_string(),
            Expr::Bool(b) => b.to_string(),
            Expr::Label(t, code) => self.enums[*t][*code as usize].clone(),
            Expr::Var(r) => self.var(*r).name.clone(),
            Expr::Unary(op, a) => {
                let sym = if *op == UnaryOp::Not { "!" } else { "-" };
                if prec(a) >= 5 {
                    format!("{sym}{}", self.expr_text(a))
                } else {
                    format!("{sym}({})", self.expr_text(a))
                }
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                let wrap = |x: &Expr, needs: bool| {
                    if needs {
                        format!("({})", self.expr_text(x))
                    } else {
                        self.expr_text(x)
                    }
                };
                let left = if op.is_comparison() { prec(a) <= p } else { prec(a) < p };
                format!("{} {} {}", wrap(a, left), op.symbol(), wrap(b, prec(b) <= p))
            }
        }
    }

    pub fn atom_text(&self, a: &Atom) -> String {
        match a {
            Atom::Pred(e) => self.expr_text(e),
            Atom::Status(n, s) => format!("status({}) == {s}", self.nodes[*n].name),
        }
    }

    /// Every distinct atom used by the specs, in declaration order.
    pub fn spec_atoms(&self) -> Vec<&Atom> {
        let mut out: Vec<&Atom> = Vec::new();
        for spec in &self.specs {
            for a in spec.formula.atoms() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }
}

/// Lexicographic Cartesian product. The product of zero factors is `[[]]`.
pub fn cartesian(ranges: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for range in ranges {
        let mut next = Vec::with_capacity(out.len() * range.len());
        for prefix in &out {
            for &v in range {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_of_nothing_is_one_empty_tuple() {
        assert_eq!(cartesian(&[]), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn cartesian_is_lexicographic() {
        let p = cartesian(&[vec![0, 1], vec![5, 6]]);
        assert_eq!(p, vec![vec![0, 5], vec![0, 6], vec![1, 5], vec![1, 6]]);
    }

    #[test]
    fn int_domain_clamps() {
        let d = Domain::Int { lo: 0, hi: 4 };
        assert_eq!(d.clamp(5), 4);
        assert_eq!(d.clamp(-3), 0);
        assert_eq!(d.clamp(2), 2);
    }
}
