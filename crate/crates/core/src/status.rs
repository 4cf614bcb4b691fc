use std::fmt;

/// Result of ticking a node. `Invalid` marks a node that was not executed
/// during the most recent tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Invalid,
    Success,
    Failure,
    Running,
}

impl Status {
    pub const ALL: [Status; 4] = [
        Status::Invalid,
        Status::Success,
        Status::Failure,
        Status::Running,
    ];

    /// Dense code used in state encodings.
    pub fn code(self) -> i64 {
        match self {
            Status::Invalid => 0,
            Status::Success => 1,
            Status::Failure => 2,
            Status::Running => 3,
        }
    }

    pub fn from_code(code: i64) -> Option<Status> {
        Status::ALL.get(usize::try_from(code).ok()?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Invalid => "invalid",
            Status::Success => "success",
            Status::Failure => "failure",
            Status::Running => "running",
        }
    }

    pub fn from_name(name: &str) -> Option<Status> {
        Status::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
