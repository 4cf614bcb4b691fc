//! Surface syntax tree, before name resolution and type checking.

use crate::model::{BinaryOp, DecoratorKind, UnaryOp};
use crate::status::Status;

/// Source position attached to AST nodes for diagnostics.
///
/// Positions never take part in AST equality, so a pretty-printed and
/// re-parsed tree compares equal to the original.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ast {
    pub name: String,
    pub env_decls: Vec<VarDeclAst>,
    pub blackboard_decls: Vec<VarDeclAst>,
    pub root: NodeAst,
    pub specs: Vec<SpecDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainSpec {
    Int { lo: i64, hi: i64 },
    Bool,
    Enum(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Int(i64),
    Bool(bool),
    Label(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDeclAst {
    pub name: String,
    pub domain: DomainSpec,
    pub initial: Option<Literal>,
    pub frozen: bool,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositeKind {
    Fallback,
    FallbackM,
    Sequence,
    SequenceM,
    Parallel(i64),
}

impl CompositeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CompositeKind::Fallback => "fallback",
            CompositeKind::FallbackM => "fallback_m",
            CompositeKind::Sequence => "sequence",
            CompositeKind::SequenceM => "sequence_m",
            CompositeKind::Parallel(_) => "parallel",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeAst {
    Composite {
        kind: CompositeKind,
        name: Option<String>,
        children: Vec<NodeAst>,
        pos: Pos,
    },
    Decorator {
        kind: DecoratorKind,
        name: Option<String>,
        child: Box<NodeAst>,
        pos: Pos,
    },
    Check {
        name: String,
        cond: ExprAst,
        pos: Pos,
    },
    Action {
        name: String,
        commands: Vec<GuardedAst>,
        pos: Pos,
    },
}

impl NodeAst {
    pub fn pos(&self) -> Pos {
        match self {
            NodeAst::Composite { pos, .. }
            | NodeAst::Decorator { pos, .. }
            | NodeAst::Check { pos, .. }
            | NodeAst::Action { pos, .. } => *pos,
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            NodeAst::Composite { name, .. } | NodeAst::Decorator { name, .. } => name.as_deref(),
            NodeAst::Check { name, .. } | NodeAst::Action { name, .. } => Some(name),
        }
    }

    /// Total number of nodes in this subtree.
    pub fn count(&self) -> usize {
        match self {
            NodeAst::Composite { children, .. } => 1 + children.iter().map(NodeAst::count).sum::<usize>(),
            NodeAst::Decorator { child, .. } => 1 + child.count(),
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedAst {
    pub guard: ExprAst,
    pub assigns: Vec<AssignAst>,
    pub status: Status,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignAst {
    pub target: String,
    pub value: ExprAst,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprAst {
    Int(i64, Pos),
    Bool(bool, Pos),
    /// Variable or enumeration label; resolved during validation.
    Ident(String, Pos),
    Unary(UnaryOp, Box<ExprAst>, Pos),
    Binary(BinaryOp, Box<ExprAst>, Box<ExprAst>, Pos),
}

impl ExprAst {
    pub fn pos(&self) -> Pos {
        match self {
            ExprAst::Int(_, p)
            | ExprAst::Bool(_, p)
            | ExprAst::Ident(_, p)
            | ExprAst::Unary(_, _, p)
            | ExprAst::Binary(_, _, _, p) => *p,
        }
    }

    /// Expressions allowed as temporal atoms contain no boolean connectives.
    pub fn is_atom_expr(&self) -> bool {
        match self {
            ExprAst::Int(..) | ExprAst::Bool(..) | ExprAst::Ident(..) => true,
            ExprAst::Unary(UnaryOp::Neg, a, _) => a.is_atom_expr(),
            ExprAst::Unary(UnaryOp::Not, ..) => false,
            ExprAst::Binary(op, a, b, _) => {
                !matches!(op, BinaryOp::And | BinaryOp::Or) && a.is_atom_expr() && b.is_atom_expr()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomAst {
    Expr(ExprAst),
    Status { node: String, status: Status, pos: Pos },
}

pub type LtlAst = crate::ltl::Ltl<AtomAst>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDecl {
    pub name: String,
    pub formula: LtlAst,
    pub pos: Pos,
}
