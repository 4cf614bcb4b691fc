//! Seeded environments and the JSON-lines trace format.

use indexmap::IndexMap;
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use sbt_core::{Configuration, Domain, SbtModel, VarDecl};
use serde::Serialize;
use serde_json::Value;

/// Environment choices drawn from SplitMix64: each free variable takes
/// `lo + next_u64() % size`, variables in declaration order.
pub struct EnvSource {
    rng: SplitMix64,
}

impl EnvSource {
    pub fn new(seed: u64) -> Self {
        EnvSource {
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    fn draw(&mut self, model: &SbtModel, v: &VarDecl) -> i64 {
        let (lo, _) = v.domain.bounds(&model.enums);
        lo + (self.rng.next_u64() % v.domain.size(&model.enums)) as i64
    }

    /// Values before the first tick; pinned variables keep their value.
    pub fn initial(&mut self, model: &SbtModel) -> Vec<i64> {
        model
            .env_vars
            .iter()
            .map(|v| v.initial.unwrap_or_else(|| self.draw(model, v)))
            .collect()
    }

    /// Values for the next tick; frozen variables keep their value.
    pub fn next(&mut self, model: &SbtModel, config: &Configuration) -> Vec<i64> {
        model
            .env_vars
            .iter()
            .zip(&config.vars.env)
            .map(|(v, &old)| if v.frozen { old } else { self.draw(model, v) })
            .collect()
    }
}

/// One tick boundary. Keys serialize in field order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub tick: u64,
    pub env: IndexMap<String, Value>,
    pub blackboard: IndexMap<String, Value>,
    pub statuses: IndexMap<String, &'static str>,
    pub root: &'static str,
}

impl TraceRecord {
    pub fn new(model: &SbtModel, tick: u64, c: &Configuration) -> Self {
        let vars = |decls: &[VarDecl], values: &[i64]| {
            decls
                .iter()
                .zip(values)
                .map(|(d, &v)| (d.name.clone(), value(model, &d.domain, v)))
                .collect()
        };
        TraceRecord {
            tick,
            env: vars(&model.env_vars, &c.vars.env),
            blackboard: vars(&model.bb_vars, &c.vars.blackboard),
            statuses: model
                .nodes
                .iter()
                .zip(&c.statuses)
                .map(|(n, s)| (n.name.clone(), s.name()))
                .collect(),
            root: c.root_status().name(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

fn value(model: &SbtModel, d: &Domain, code: i64) -> Value {
    match d {
        Domain::Int { .. } => Value::from(code),
        Domain::Bool => Value::Bool(code != 0),
        Domain::Enum(e) => Value::from(model.enums[*e][code as usize].clone()),
    }
}
