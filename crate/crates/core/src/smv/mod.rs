//! SMV export at four encoding levels, plus an interpreter for the emitted
//! subset used to cross-check the encoding against explicit enumeration.

use std::fmt;
use std::str::FromStr;

mod cross;
pub mod doc;
mod emit;
mod interp;
mod parse;

pub use cross::{cross_check, cross_check_text, CrossError, CrossReport, DivergenceFound};
pub use doc::{SExpr, SOp, SmvDocument, SmvType};
pub use emit::{
    emit, emit_spec, mem_name, memnext_name, pre_name, spec_text, status_is_var, status_name,
    STARTED,
};
pub use interp::{SmvAtom, SmvError, SmvSystem};
pub use parse::{parse_ltl, parse_smv, ParsedSmv, SmvParseError};

/// How much of the tick is kept in state variables. Higher levels turn more
/// node statuses into DEFINEs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OptLevel {
    NoOpt,
    FirstOpt,
    LastOpt,
    FullOpt,
}

impl OptLevel {
    pub const ALL: [OptLevel; 4] = [
        OptLevel::NoOpt,
        OptLevel::FirstOpt,
        OptLevel::LastOpt,
        OptLevel::FullOpt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptLevel::NoOpt => "no_opt",
            OptLevel::FirstOpt => "first_opt",
            OptLevel::LastOpt => "last_opt",
            OptLevel::FullOpt => "full_opt",
        }
    }
}

impl fmt::Display for OptLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OptLevel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown encoding level `{s}` (expected no_opt, first_opt, last_opt or full_opt)"))
    }
}

/// Identifiers with a fixed meaning in common SMV dialects.
const RESERVED: &[&str] = &[
    "MODULE", "VAR", "IVAR", "FROZENVAR", "DEFINE", "ASSIGN", "INIT", "TRANS", "INVAR", "SPEC",
    "CTLSPEC", "LTLSPEC", "PSLSPEC", "INVARSPEC", "FAIRNESS", "JUSTICE", "COMPASSION", "CONSTANTS",
    "TRUE", "FALSE", "boolean", "integer", "real", "word", "array", "of", "init", "next", "case",
    "esac", "self", "process", "mod", "union", "in", "xor", "xnor", "toint", "count", "abs", "max",
    "min", "bool", "signed", "unsigned", "extend", "resize", "sizeof", "uwconst", "swconst",
    "EX", "AX", "EF", "AF", "EG", "AG", "E", "A", "U", "V", "W", "X", "G", "F", "Y", "Z", "H", "O",
    "S", "T", "BU", "EBF", "ABF", "EBG", "ABG", "main",
];

pub fn is_reserved_word(name: &str) -> bool {
    RESERVED.contains(&name)
}
