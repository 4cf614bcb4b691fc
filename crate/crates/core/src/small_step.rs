//! Micro-step execution of a tick: the tree as a finite state machine that
//! emits one node event per step.
//!
//! The `__root` wrapper is transparent here: the control stack starts at the
//! declared root and the wrapper's status is filled in when the tick ends.

use thiserror::Error;

use crate::model::{NodeId, NodeKind, SbtModel};
use crate::semantics::{
    apply_decorator, check_tick_env, combine_parallel, combine_selector, combine_sequence,
    eval_bool, run_action, Configuration, SemanticsError,
};
use crate::status::Status;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("step called on a machine whose tick already completed")]
    StepOnDone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Enter,
    /// Leaf entered, result not yet computed.
    Evaluate,
    /// Composite waiting for the child with this ordinal to report back.
    AfterChild(usize),
    Exit(Status),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub node: NodeId,
    pub phase: Phase,
    /// Ordinal of the first child ticked (non-zero only when resuming).
    pub start: usize,
    /// Statuses of children ticked so far, in order.
    pub partial: Vec<Status>,
}

impl Frame {
    fn enter(node: NodeId) -> Self {
        Frame {
            node,
            phase: Phase::Enter,
            start: 0,
            partial: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineState {
    pub config: Configuration,
    pub stack: Vec<Frame>,
    pub pending_env: Vec<i64>,
    pub done: Option<Status>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepEvent {
    EnterNode(NodeId),
    LeafResult(NodeId, Status),
    ExitNode(NodeId, Status),
}

pub fn begin_tick(
    model: &SbtModel,
    config: &Configuration,
    env: &[i64],
) -> Result<MachineState, StepError> {
    check_tick_env(model, config, env)?;
    let mut config = config.clone();
    config.vars.env.copy_from_slice(env);
    config.statuses.iter_mut().for_each(|s| *s = Status::Invalid);
    let top = model.nodes[model.root()].children[0];
    Ok(MachineState {
        config,
        stack: vec![Frame::enter(top)],
        pending_env: env.to_vec(),
        done: None,
    })
}

pub fn step(model: &SbtModel, m: &mut MachineState) -> Result<StepEvent, StepError> {
    if m.done.is_some() {
        return Err(StepError::StepOnDone);
    }
    let frame = m.stack.last_mut().expect("running machine has a frame");
    let id = frame.node;
    let node = &model.nodes[id];
    match frame.phase {
        Phase::Enter => {
            if node.kind.is_leaf() {
                frame.phase = Phase::Evaluate;
            } else {
                let start = node
                    .memory_slot
                    .map_or(0, |slot| m.config.memory.resume_index[slot]);
                frame.start = start;
                frame.phase = Phase::AfterChild(start);
                m.stack.push(Frame::enter(node.children[start]));
            }
            Ok(StepEvent::EnterNode(id))
        }
        Phase::Evaluate => {
            let status = match &node.kind {
                NodeKind::Check(e) => {
                    if eval_bool(e, &m.config.vars) {
                        Status::Success
                    } else {
                        Status::Failure
                    }
                }
                NodeKind::Action(cmds) => run_action(model, cmds, &mut m.config.vars).0,
                _ => unreachable!("only leaves are evaluated"),
            };
            frame.phase = Phase::Exit(status);
            Ok(StepEvent::LeafResult(id, status))
        }
        Phase::Exit(status) => {
            m.stack.pop();
            m.config.statuses[id] = status;
            match m.stack.last_mut() {
                Some(parent) => {
                    if let Some(next) = child_returned(model, &mut m.config, parent, status) {
                        m.stack.push(Frame::enter(next));
                    }
                }
                None => {
                    m.config.statuses[model.root()] = status;
                    m.config.tick_count += 1;
                    m.done = Some(status);
                }
            }
            Ok(StepEvent::ExitNode(id, status))
        }
        Phase::AfterChild(_) => unreachable!("a waiting composite is never on top"),
    }
}

/// Hands a finished child's status to its parent frame. Returns the next
/// child to enter, or `None` once the parent has settled its own result.
fn child_returned(
    model: &SbtModel,
    config: &mut Configuration,
    parent: &mut Frame,
    s: Status,
) -> Option<NodeId> {
    let node = &model.nodes[parent.node];
    let Phase::AfterChild(k) = parent.phase else {
        unreachable!("parent frames wait for a child")
    };
    parent.partial.push(s);
    let has_next = k + 1 < node.children.len();
    let result = match &node.kind {
        NodeKind::Sequence { .. } | NodeKind::Fallback { .. } => {
            let is_sequence = matches!(node.kind, NodeKind::Sequence { .. });
            let stop = if is_sequence {
                s != Status::Success
            } else {
                s != Status::Failure
            };
            if !stop && has_next {
                None
            } else {
                let (status, ran) = if is_sequence {
                    combine_sequence(&parent.partial)
                } else {
                    combine_selector(&parent.partial)
                };
                if let Some(slot) = node.memory_slot {
                    config.memory.resume_index[slot] = if status == Status::Running {
                        parent.start + ran - 1
                    } else {
                        0
                    };
                }
                Some(status)
            }
        }
        NodeKind::Parallel { threshold } => {
            (!has_next).then(|| combine_parallel(*threshold, &parent.partial))
        }
        NodeKind::Decorator(kind) => Some(apply_decorator(*kind, s)),
        NodeKind::Root | NodeKind::Check(_) | NodeKind::Action(_) => {
            unreachable!("not a parent frame")
        }
    };
    match result {
        Some(status) => {
            parent.phase = Phase::Exit(status);
            None
        }
        None => {
            parent.phase = Phase::AfterChild(k + 1);
            Some(node.children[k + 1])
        }
    }
}

/// Steps until the tick completes.
pub fn run_to_completion(
    model: &SbtModel,
    mut m: MachineState,
) -> Result<(Configuration, Status, Vec<StepEvent>), StepError> {
    let mut events = Vec::new();
    while m.done.is_none() {
        events.push(step(model, &mut m)?);
    }
    let status = m.done.expect("loop exits on completion");
    Ok((m.config, status, events))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::compile;
    use crate::semantics::{initial_configuration, tick_big_step};
    use StepEvent::*;

    fn model(src: &str) -> SbtModel {
        compile(src).unwrap().model
    }

    #[test]
    fn single_check_brackets_in_three_events() {
        let m = model("tree T { blackboard { x: int[0..0] = 0; } root: check c { x == 0 } }");
        let cfg = initial_configuration(&m, &[]).unwrap();
        let machine = begin_tick(&m, &cfg, &[]).unwrap();
        assert_eq!(machine.stack.len(), 1);
        assert_eq!(machine.stack[0].phase, Phase::Enter);
        let (after, root, events) = run_to_completion(&m, machine).unwrap();
        let c = m.find_node("c").unwrap();
        assert_eq!(
            events,
            vec![EnterNode(c), LeafResult(c, Status::Success), ExitNode(c, Status::Success)]
        );
        assert_eq!(root, Status::Success);
        assert_eq!(after.root_status(), Status::Success);
    }

    #[test]
    fn sequence_of_two_checks() {
        let m = model("tree T { root: sequence s { check c1 { true } check c2 { false } } }");
        let cfg = initial_configuration(&m, &[]).unwrap();
        let (_, root, events) = run_to_completion(&m, begin_tick(&m, &cfg, &[]).unwrap()).unwrap();
        let [s, c1, c2] = ["s", "c1", "c2"].map(|n| m.find_node(n).unwrap());
        use Status::{Failure as F, Success as S};
        assert_eq!(
            events,
            vec![
                EnterNode(s),
                EnterNode(c1),
                LeafResult(c1, S),
                ExitNode(c1, S),
                EnterNode(c2),
                LeafResult(c2, F),
                ExitNode(c2, F),
                ExitNode(s, F)
            ]
        );
        assert_eq!(root, F);
    }

    #[test]
    fn stepping_a_finished_machine_fails() {
        let m = model("tree T { root: check c { true } }");
        let cfg = initial_configuration(&m, &[]).unwrap();
        let mut machine = begin_tick(&m, &cfg, &[]).unwrap();
        while machine.done.is_none() {
            step(&m, &mut machine).unwrap();
        }
        assert_eq!(step(&m, &mut machine), Err(StepError::StepOnDone));
    }

    #[test]
    fn action_without_firing_guard_fails() {
        let m = model("tree T { root: action a { on false -> return success; } }");
        let cfg = initial_configuration(&m, &[]).unwrap();
        let (_, _, events) = run_to_completion(&m, begin_tick(&m, &cfg, &[]).unwrap()).unwrap();
        assert_eq!(events[1], LeafResult(1, Status::Failure));
    }

    #[test]
    fn frozen_violation_is_rejected() {
        let m = model("tree T { env { g: int[0..2] frozen; } root: check c { g == 1 } }");
        let cfg = initial_configuration(&m, &[1]).unwrap();
        assert!(matches!(
            begin_tick(&m, &cfg, &[2]),
            Err(StepError::Semantics(SemanticsError::FrozenViolation { .. }))
        ));
        assert_eq!(begin_tick(&m, &cfg, &[1]).unwrap().pending_env, vec![1]);
    }

    #[test]
    fn memory_sequence_matches_big_step_across_ticks() {
        let m = model(
            "tree T { blackboard { n: int[0..2] = 0; } root: sequence_m { action a { on n == 0 -> n := 1; return running; on true -> return success; } check c { n == 1 } } }",
        );
        let mut big = initial_configuration(&m, &[]).unwrap();
        let mut small = big.clone();
        for _ in 0..4 {
            big = tick_big_step(&m, &big, &[]).unwrap().config;
            small = run_to_completion(&m, begin_tick(&m, &small, &[]).unwrap()).unwrap().0;
            assert_eq!(big, small);
        }
    }
}
