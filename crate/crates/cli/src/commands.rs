use std::fs;
use std::io::{self, Write};
use std::path::Path;

use sbt_core::dsl::compile;
use sbt_core::ltl::{check_invariant, model_check, Ltl, ResourceExceeded, Verdict};
use sbt_core::small_step::{begin_tick, run_to_completion};
use sbt_core::smv::{cross_check_text, emit, CrossError};
use sbt_core::ts::{enumerate, Limits, StateLimitExceeded, TransitionSystem};
use sbt_core::{initial_configuration, tick_big_step, SbtModel};
use serde_json::{json, Value};
use thiserror::Error;

use crate::trace::{EnvSource, TraceRecord};
use crate::{Command, Engine, LimitArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: error: cannot read: {source}")]
    Read { path: String, source: io::Error },
    #[error("{path}: error: cannot write: {source}")]
    Write { path: String, source: io::Error },
    #[error("{}", .0.join("\n"))]
    Invalid(Vec<String>),
    #[error("error: unknown spec `{0}`")]
    UnknownSpec(String),
    #[error("error: {0}")]
    Limit(#[from] StateLimitExceeded),
    #[error("error: {0}")]
    Resource(#[from] ResourceExceeded),
    #[error("error: cross-check failed: {0}")]
    Cross(#[from] CrossError),
    #[error("error: output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Limit(_) | CliError::Resource(_) => 3,
            CliError::Cross(CrossError::Limit(_) | CrossError::Resource(_)) => 3,
            CliError::Cross(_) => 1,
            _ => 2,
        }
    }
}

pub struct Outcome {
    pub code: i32,
    pub payload: Value,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Outcome { code: 0, payload }
    }
}

pub fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let path = cmd.file();
    let model = load(path, err)?;
    match cmd {
        Command::Check { .. } => {
            writeln!(out, "{}: ok", path.display())?;
            Ok(Outcome::ok(json!({
                "tree": model.name,
                "nodes": model.nodes.len() - 1,
                "specs": model.specs.len(),
            })))
        }
        Command::Simulate { ticks, seed, engine, .. } => simulate(&model, *ticks, *seed, *engine, out),
        Command::Enumerate { limits, dump, .. } => {
            let ts = enumerate(&model, limits_of(*limits))?;
            let stats = ts.stats();
            writeln!(out, "states={} edges={}", stats.states, stats.edges)?;
            if let Some(p) = dump {
                write_file(p, &ts.dump())?;
            }
            Ok(Outcome::ok(json!({
                "states": stats.states,
                "edges": stats.edges,
                "initials": ts.initials().len(),
                "frontier_peak": stats.frontier_peak,
            })))
        }
        Command::Verify { specs, limits, .. } => verify(&model, specs, *limits, out),
        Command::Emit {
            level,
            out: target,
            cross_check,
            limits,
            ..
        } => {
            let doc = emit(&model, *level);
            let text = doc.render();
            match target {
                Some(p) => write_file(p, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
            let mut payload = json!({
                "level": level.name(),
                "vars": doc.vars.len(),
                "defines": doc.defines.len(),
            });
            if *cross_check {
                let r = cross_check_text(&model, &text, limits_of(*limits))?;
                writeln!(
                    err,
                    "cross-check {level}: ok ({} states, {} smv states, {} specs agree)",
                    r.ts_states,
                    r.smv_states,
                    r.verdicts.len()
                )?;
                payload["cross_check"] = json!({
                    "ts_states": r.ts_states,
                    "smv_states": r.smv_states,
                    "verdicts": r.verdicts.iter().map(|(n, h)| json!({"name": n, "holds": h})).collect::<Vec<_>>(),
                });
            }
            Ok(Outcome::ok(payload))
        }
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<SbtModel, CliError> {
    let shown = path.display().to_string();
    let source = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: shown.clone(),
        source,
    })?;
    match compile(&source) {
        Ok(c) => {
            for w in &c.warnings {
                writeln!(err, "{shown}:{w}")?;
            }
            Ok(c.model)
        }
        Err(diags) => Err(CliError::Invalid(diags.iter().map(|d| format!("{shown}:{d}")).collect())),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn limits_of(l: LimitArgs) -> Limits {
    Limits {
        max_states: usize::try_from(l.max_states).unwrap_or(usize::MAX),
        ..Limits::default()
    }
}

fn simulate(model: &SbtModel, ticks: u64, seed: u64, engine: Engine, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let mut env = EnvSource::new(seed);
    // draws stay inside the domains and keep frozen values, so ticks cannot fail
    let mut config = initial_configuration(model, &env.initial(model)).expect("admissible initial environment");
    for tick in 1..=ticks {
        let e = env.next(model, &config);
        config = match engine {
            Engine::Big => tick_big_step(model, &config, &e).expect("admissible environment").config,
            Engine::Small => {
                let m = begin_tick(model, &config, &e).expect("admissible environment");
                run_to_completion(model, m).expect("ticks terminate").0
            }
        };
        writeln!(out, "{}", TraceRecord::new(model, tick, &config).to_json())?;
    }
    Ok(Outcome::ok(json!({
        "ticks": ticks,
        "seed": seed,
        "engine": engine.name(),
        "root": config.root_status().name(),
    })))
}

fn verify(model: &SbtModel, names: &[String], limits: LimitArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    if let Some(n) = names.iter().find(|n| !model.specs.iter().any(|s| &s.name == *n)) {
        return Err(CliError::UnknownSpec(n.clone()));
    }
    let ts = enumerate(model, limits_of(limits))?;
    let mut code = 0;
    let mut results = Vec::new();
    for spec in model.specs.iter().filter(|s| names.is_empty() || names.contains(&s.name)) {
        // invariants go breadth-first for shortest counterexamples
        let verdict = match &spec.formula {
            Ltl::Globally(p) if p.is_state_formula() => check_invariant(&ts, p),
            f => model_check(&ts, f)?,
        };
        match verdict {
            Verdict::Holds => {
                writeln!(out, "spec {}: HOLDS", spec.name)?;
                results.push(json!({ "name": spec.name, "verdict": "HOLDS" }));
            }
            Verdict::Violated(l) => {
                code = 1;
                writeln!(out, "spec {}: VIOLATED", spec.name)?;
                print_path(&ts, "stem", &l.stem, 0, out)?;
                print_path(&ts, "loop", &l.cycle, l.stem.len(), out)?;
                results.push(json!({
                    "name": spec.name,
                    "verdict": "VIOLATED",
                    "stem": l.stem.len(),
                    "loop": l.cycle.len(),
                }));
            }
        }
    }
    Ok(Outcome {
        code,
        payload: json!({ "states": ts.states().len(), "specs": results }),
    })
}

/// Counterexample states as trace records; `tick` is the position on the path.
fn print_path(ts: &TransitionSystem, tag: &str, ids: &[usize], first: usize, out: &mut dyn Write) -> io::Result<()> {
    for (i, &s) in ids.iter().enumerate() {
        let r = TraceRecord::new(ts.model(), (first + i) as u64, &ts.configuration(s));
        writeln!(out, "{tag}: {}", r.to_json())?;
    }
    Ok(())
}
