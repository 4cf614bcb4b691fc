//! Configurations and the fastforwarded tick: one call to
//! [`tick_big_step`] executes a whole top-down pass of the tree.

use thiserror::Error;

use crate::model::{
    BinaryOp, DecoratorKind, Expr, NodeId, NodeKind, SbtModel, Scope, UnaryOp, VarRef,
};
use crate::status::Status;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("expected {expected} environment values, got {got}")]
    EnvArity { expected: usize, got: usize },
    #[error("value {value} is outside the domain of `{var}`")]
    Domain { var: String, value: i64 },
    #[error("frozen environment variable `{var}` cannot change from {old} to {new}")]
    FrozenViolation { var: String, old: i64, new: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariableState {
    pub env: Vec<i64>,
    pub blackboard: Vec<i64>,
}

impl VariableState {
    pub fn get(&self, r: VarRef) -> i64 {
        match r.scope {
            Scope::Environment => self.env[r.index],
            Scope::Blackboard => self.blackboard[r.index],
        }
    }

    fn set(&mut self, r: VarRef, v: i64) {
        match r.scope {
            Scope::Environment => self.env[r.index] = v,
            Scope::Blackboard => self.blackboard[r.index] = v,
        }
    }
}

/// Resume ordinal of every memory composite, indexed by memory slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MemoryState {
    pub resume_index: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub memory: MemoryState,
    pub vars: VariableState,
    /// Status of every node at the end of the last completed tick.
    pub statuses: Vec<Status>,
    pub tick_count: u64,
}

impl Configuration {
    pub fn root_status(&self) -> Status {
        self.statuses[0]
    }
}

/// One executed leaf: its status and the blackboard writes it applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafStep {
    pub node: NodeId,
    pub status: Status,
    pub writes: Vec<(VarRef, i64)>,
}

pub type LeafTrace = Vec<LeafStep>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TickOutcome {
    pub config: Configuration,
    pub root_status: Status,
    pub trace: LeafTrace,
}

/// Checks arity and domain of an environment valuation.
pub fn check_env(model: &SbtModel, env: &[i64]) -> Result<(), SemanticsError> {
    if env.len() != model.env_vars.len() {
        return Err(SemanticsError::EnvArity {
            expected: model.env_vars.len(),
            got: env.len(),
        });
    }
    for (decl, &value) in model.env_vars.iter().zip(env) {
        if !decl.domain.contains(&model.enums, value) {
            return Err(SemanticsError::Domain {
                var: decl.name.clone(),
                value,
            });
        }
    }
    Ok(())
}

/// Validates `env` as the valuation for the next tick from `config`.
pub fn check_tick_env(
    model: &SbtModel,
    config: &Configuration,
    env: &[i64],
) -> Result<(), SemanticsError> {
    check_env(model, env)?;
    for ((decl, &old), &new) in model.env_vars.iter().zip(&config.vars.env).zip(env) {
        if decl.frozen && old != new {
            return Err(SemanticsError::FrozenViolation {
                var: decl.name.clone(),
                old,
                new,
            });
        }
    }
    Ok(())
}

pub fn initial_configuration(
    model: &SbtModel,
    env: &[i64],
) -> Result<Configuration, SemanticsError> {
    check_env(model, env)?;
    for (decl, &value) in model.env_vars.iter().zip(env) {
        if let Some(pinned) = decl.initial {
            if pinned != value {
                return Err(SemanticsError::FrozenViolation {
                    var: decl.name.clone(),
                    old: pinned,
                    new: value,
                });
            }
        }
    }
    Ok(Configuration {
        memory: MemoryState {
            resume_index: vec![0; model.memory_nodes.len()],
        },
        vars: VariableState {
            env: env.to_vec(),
            blackboard: model
                .bb_vars
                .iter()
                .map(|v| v.initial.expect("validated blackboard initial"))
                .collect(),
        },
        statuses: vec![Status::Invalid; model.nodes.len()],
        tick_count: 0,
    })
}

/// Evaluates a type-checked expression. Booleans are 0/1; integer
/// arithmetic is exact (no clamping happens here).
pub fn eval_expr(expr: &Expr, vars: &VariableState) -> i64 {
    match expr {
        Expr::Int(v) => *v,
        Expr::Bool(b) => i64::from(*b),
        Expr::Label(_, code) => *code,
        Expr::Var(r) => vars.get(*r),
        Expr::Unary(UnaryOp::Not, a) => i64::from(eval_expr(a, vars) == 0),
        Expr::Unary(UnaryOp::Neg, a) => -eval_expr(a, vars),
        Expr::Binary(op, a, b) => {
            // strict semantics: both sides are always evaluated
            let x = eval_expr(a, vars);
            let y = eval_expr(b, vars);
            match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Eq => i64::from(x == y),
                BinaryOp::Ne => i64::from(x != y),
                BinaryOp::Lt => i64::from(x < y),
                BinaryOp::Le => i64::from(x <= y),
                BinaryOp::Gt => i64::from(x > y),
                BinaryOp::Ge => i64::from(x >= y),
                BinaryOp::And => i64::from(x != 0 && y != 0),
                BinaryOp::Or => i64::from(x != 0 || y != 0),
            }
        }
    }
}

pub fn eval_bool(expr: &Expr, vars: &VariableState) -> bool {
    eval_expr(expr, vars) != 0
}

/// Sequence rule over the statuses of the children that were ticked, in
/// order. Returns the combined status and how many children ran.
pub fn combine_sequence(child_statuses: &[Status]) -> (Status, usize) {
    for (i, &s) in child_statuses.iter().enumerate() {
        if s != Status::Success {
            return (s, i + 1);
        }
    }
    (Status::Success, child_statuses.len())
}

/// Selector (fallback) rule, the dual of [`combine_sequence`].
pub fn combine_selector(child_statuses: &[Status]) -> (Status, usize) {
    for (i, &s) in child_statuses.iter().enumerate() {
        if s != Status::Failure {
            return (s, i + 1);
        }
    }
    (Status::Failure, child_statuses.len())
}

/// Parallel rule with success threshold `threshold` over all N children.
pub fn combine_parallel(threshold: usize, child_statuses: &[Status]) -> Status {
    let n = child_statuses.len();
    let successes = child_statuses
        .iter()
        .filter(|&&s| s == Status::Success)
        .count();
    let failures = child_statuses
        .iter()
        .filter(|&&s| s == Status::Failure)
        .count();
    if successes >= threshold {
        Status::Success
    } else if failures > n - threshold {
        Status::Failure
    } else {
        Status::Running
    }
}

pub fn apply_decorator(kind: DecoratorKind, child: Status) -> Status {
    match (kind, child) {
        (_, Status::Running) => Status::Running,
        (_, Status::Invalid) => Status::Invalid,
        (DecoratorKind::Inverter, Status::Success) => Status::Failure,
        (DecoratorKind::Inverter, Status::Failure) => Status::Success,
        (DecoratorKind::ForceSuccess, _) => Status::Success,
        (DecoratorKind::ForceFailure, _) => Status::Failure,
    }
}

/// Runs an action leaf against `vars`: the first guard that holds fires,
/// applies its assignments left to right (clamped) and yields its status.
/// No firing guard yields `Failure`.
pub fn run_action(
    model: &SbtModel,
    commands: &[crate::model::GuardedCommand],
    vars: &mut VariableState,
) -> (Status, Vec<(VarRef, i64)>) {
    for cmd in commands {
        if eval_bool(&cmd.guard, vars) {
            let mut writes = Vec::with_capacity(cmd.assignments.len());
            for a in &cmd.assignments {
                let raw = eval_expr(&a.value, vars);
                let v = model.var(a.target).domain.clamp(raw);
                vars.set(a.target, v);
                writes.push((a.target, v));
            }
            return (cmd.status, writes);
        }
    }
    (Status::Failure, Vec::new())
}

/// One full tick. The environment is replaced by `env` first, then the tree
/// is traversed depth-first from the root.
pub fn tick_big_step(
    model: &SbtModel,
    config: &Configuration,
    env: &[i64],
) -> Result<TickOutcome, SemanticsError> {
    check_tick_env(model, config, env)?;
    let mut next = config.clone();
    next.vars.env.copy_from_slice(env);
    next.statuses.iter_mut().for_each(|s| *s = Status::Invalid);
    let mut trace = Vec::new();
    let root_status = tick_node(model, model.root(), &mut next, &mut trace);
    next.tick_count += 1;
    Ok(TickOutcome {
        config: next,
        root_status,
        trace,
    })
}

fn tick_node(
    model: &SbtModel,
    id: NodeId,
    cfg: &mut Configuration,
    trace: &mut LeafTrace,
) -> Status {
    let node = &model.nodes[id];
    let status = match &node.kind {
        NodeKind::Root => tick_node(model, node.children[0], cfg, trace),
        NodeKind::Check(expr) => {
            let s = if eval_bool(expr, &cfg.vars) {
                Status::Success
            } else {
                Status::Failure
            };
            trace.push(LeafStep {
                node: id,
                status: s,
                writes: Vec::new(),
            });
            s
        }
        NodeKind::Action(commands) => {
            let (s, writes) = run_action(model, commands, &mut cfg.vars);
            trace.push(LeafStep {
                node: id,
                status: s,
                writes,
            });
            s
        }
        NodeKind::Sequence { .. } | NodeKind::Fallback { .. } => {
            let is_sequence = matches!(node.kind, NodeKind::Sequence { .. });
            let start = node
                .memory_slot
                .map_or(0, |slot| cfg.memory.resume_index[slot]);
            let mut results = Vec::with_capacity(node.children.len());
            for &child in &node.children[start..] {
                let s = tick_node(model, child, cfg, trace);
                results.push(s);
                let stop = if is_sequence {
                    s != Status::Success
                } else {
                    s != Status::Failure
                };
                if stop {
                    break;
                }
            }
            let (s, ran) = if is_sequence {
                combine_sequence(&results)
            } else {
                combine_selector(&results)
            };
            if let Some(slot) = node.memory_slot {
                cfg.memory.resume_index[slot] = if s == Status::Running {
                    start + ran - 1
                } else {
                    0
                };
            }
            s
        }
        NodeKind::Parallel { threshold } => {
            let results: Vec<Status> = node
                .children
                .iter()
                .map(|&c| tick_node(model, c, cfg, trace))
                .collect();
            combine_parallel(*threshold, &results)
        }
        NodeKind::Decorator(kind) => {
            let s = tick_node(model, node.children[0], cfg, trace);
            apply_decorator(*kind, s)
        }
    };
    cfg.statuses[id] = status;
    status
}
