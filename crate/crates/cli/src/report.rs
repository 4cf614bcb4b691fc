use serde::Serialize;
use serde_json::Value;

/// Summary of one invocation, written by `--report`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub model: String,
    pub outcome: Value,
    /// Milliseconds; only with `--timing`, so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<u64>,
    pub exit_code: i32,
}
