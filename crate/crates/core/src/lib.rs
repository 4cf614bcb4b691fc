//! Stateful behavior trees: DSL frontend, tick semantics, explicit-state
//! enumeration, LTL model checking and SMV export.

pub mod dsl;
pub mod generate;
pub mod ltl;
pub mod model;
pub mod oracle;
pub mod semantics;
pub mod small_step;
pub mod smv;
pub mod status;
pub mod ts;

pub use model::*;
pub use semantics::*;
pub use status::Status;
