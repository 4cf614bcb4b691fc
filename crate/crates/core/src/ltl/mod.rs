//! Linear temporal logic: formulas, Büchi translation and explicit-state
//! model checking with lasso counterexamples.

pub mod buchi;
mod check;
mod formula;
mod kripke;
pub mod lasso;

pub use buchi::{to_buchi, BuchiAutomaton};
pub use check::{
    check_invariant, eval_state, model_check, model_check_with_limit, Lasso, ResourceExceeded,
    Verdict, DEFAULT_PRODUCT_LIMIT,
};
pub use formula::Ltl;
pub use kripke::{ExplicitKripke, Kripke};
