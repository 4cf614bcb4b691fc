//! Checks an SMV encoding against explicit enumeration of the same tree:
//! the interpreted SMV graph, projected onto tick-level observables, must
//! coincide with the transition system, and every spec must get the same
//! verdict on both.

use std::collections::BTreeSet;

use thiserror::Error;

use super::emit::{emit, memnext_name, status_name};
use super::interp::{SmvError, SmvSystem};
use super::parse::{parse_smv, SmvParseError};
use super::OptLevel;
use crate::ltl::{model_check, Kripke, ResourceExceeded};
use crate::model::{Domain, SbtModel};
use crate::status::Status;
use crate::ts::{enumerate, Limits, StateLimitExceeded, TsState};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossReport {
    pub ts_states: usize,
    pub ts_edges: usize,
    pub smv_states: usize,
    pub smv_edges: usize,
    pub var_count: usize,
    pub define_count: usize,
    /// Spec name and whether it holds.
    pub verdicts: Vec<(String, bool)>,
}

/// The encoding and the explicit semantics disagree.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("divergence: {what}; witness: {witness}")]
pub struct DivergenceFound {
    pub what: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CrossError {
    #[error(transparent)]
    Divergence(#[from] DivergenceFound),
    #[error(transparent)]
    Parse(#[from] SmvParseError),
    #[error("smv: {0}")]
    Smv(#[from] SmvError),
    #[error(transparent)]
    Limit(#[from] StateLimitExceeded),
    #[error(transparent)]
    Resource(#[from] ResourceExceeded),
}

pub fn cross_check(
    model: &SbtModel,
    level: OptLevel,
    limits: Limits,
) -> Result<CrossReport, CrossError> {
    cross_check_text(model, &emit(model, level).render(), limits)
}

/// Same as [`cross_check`] for an arbitrary SMV text claimed to encode
/// `model`.
pub fn cross_check_text(
    model: &SbtModel,
    text: &str,
    limits: Limits,
) -> Result<CrossReport, CrossError> {
    let ts = enumerate(model, limits)?;
    let doc = parse_smv(text)?;
    let sys = SmvSystem::build(&doc, limits.max_states.saturating_mul(16))?;

    let project = |s: usize| -> Result<TsState, CrossError> {
        let mut v = Vec::new();
        for &n in &model.memory_nodes {
            v.push(sys.value(s, &memnext_name(model, n))?);
        }
        for x in &model.env_vars {
            v.push(code(model, &sys, &x.domain, sys.value(s, &x.name)?)?);
        }
        for x in &model.bb_vars {
            v.push(code(model, &sys, &x.domain, sys.value(s, &x.name)?)?);
        }
        for n in 0..model.nodes.len() {
            let raw = sys.value(s, &status_name(model, n))?;
            let st = sys
                .symbol(raw)
                .and_then(Status::from_name)
                .ok_or_else(|| DivergenceFound {
                    what: format!("status of `{}` is not a status", model.nodes[n].name),
                    witness: sys.describe(s),
                })?;
            v.push(st.code());
        }
        Ok(TsState(v))
    };
    let projected = (0..sys.state_count())
        .map(project)
        .collect::<Result<Vec<_>, _>>()?;

    let smv_initials: BTreeSet<&TsState> = sys.initials().iter().map(|&s| &projected[s]).collect();
    let ts_initials: BTreeSet<&TsState> = ts.initials().iter().map(|&s| ts.state(s)).collect();
    if smv_initials != ts_initials {
        return Err(diverge("initial states differ", &smv_initials, &ts_initials).into());
    }
    let smv_states: BTreeSet<&TsState> = projected.iter().collect();
    let ts_states: BTreeSet<&TsState> = ts.states().iter().collect();
    if smv_states != ts_states {
        return Err(diverge("reachable states differ", &smv_states, &ts_states).into());
    }
    let mut smv_edges = BTreeSet::new();
    for s in 0..sys.state_count() {
        for &t in sys.edges(s) {
            smv_edges.insert((&projected[s], &projected[t]));
        }
    }
    let mut ts_edges = BTreeSet::new();
    for s in 0..ts.states().len() {
        for &t in ts.edges(s) {
            ts_edges.insert((ts.state(s), ts.state(t)));
        }
    }
    if smv_edges != ts_edges {
        let extra = smv_edges.difference(&ts_edges).next();
        let missing = ts_edges.difference(&smv_edges).next();
        return Err(DivergenceFound {
            what: "transitions differ".into(),
            witness: match (extra, missing) {
                (Some((a, b)), _) => format!("only in smv: {:?} -> {:?}", a.0, b.0),
                (_, Some((a, b))) => format!("only in tree: {:?} -> {:?}", a.0, b.0),
                _ => unreachable!(),
            },
        }
        .into());
    }

    if doc.specs.len() != model.specs.len() {
        return Err(DivergenceFound {
            what: "spec count differs".into(),
            witness: format!("{} in smv, {} in tree", doc.specs.len(), model.specs.len()),
        }
        .into());
    }
    let mut verdicts = Vec::new();
    for (spec, f) in model.specs.iter().zip(&doc.specs) {
        let native = model_check(&ts, &spec.formula)?.holds();
        let encoded = model_check(&sys, &sys.compile_ltl(f)?)?.holds();
        if native != encoded {
            return Err(DivergenceFound {
                what: format!("verdicts differ for spec `{}`", spec.name),
                witness: format!("tree says {native}, smv says {encoded}"),
            }
            .into());
        }
        verdicts.push((spec.name.clone(), native));
    }

    Ok(CrossReport {
        ts_states: ts.states().len(),
        ts_edges: ts_edges.len(),
        smv_states: sys.state_count(),
        smv_edges: sys.edge_count(),
        var_count: doc.vars.len(),
        define_count: doc.defines.len(),
        verdicts,
    })
}

fn code(model: &SbtModel, sys: &SmvSystem, d: &Domain, raw: i64) -> Result<i64, DivergenceFound> {
    match d {
        Domain::Int { .. } | Domain::Bool => Ok(raw),
        Domain::Enum(e) => sys
            .symbol(raw)
            .and_then(|l| model.enums[*e].iter().position(|x| x == l))
            .map(|i| i as i64)
            .ok_or_else(|| DivergenceFound {
                what: "value outside its enumeration".into(),
                witness: sys.symbol(raw).unwrap_or("?").to_string(),
            }),
    }
}

fn diverge(what: &str, smv: &BTreeSet<&TsState>, ts: &BTreeSet<&TsState>) -> DivergenceFound {
    let witness = match (smv.difference(ts).next(), ts.difference(smv).next()) {
        (Some(s), _) => format!("only in smv: {:?}", s.0),
        (_, Some(s)) => format!("only in tree: {:?}", s.0),
        _ => String::new(),
    };
    DivergenceFound {
        what: what.into(),
        witness,
    }
}
