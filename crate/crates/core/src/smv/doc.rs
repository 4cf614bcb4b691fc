//! In-memory SMV module and its deterministic text rendering.

use std::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SOp {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl SOp {
    pub fn symbol(self) -> &'static str {
        match self {
            SOp::Implies => "->",
            SOp::Or => "|",
            SOp::And => "&",
            SOp::Eq => "=",
            SOp::Ne => "!=",
            SOp::Lt => "<",
            SOp::Le => "<=",
            SOp::Gt => ">",
            SOp::Ge => ">=",
            SOp::Add => "+",
            SOp::Sub => "-",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            SOp::Implies => 1,
            SOp::Or => 2,
            SOp::And => 3,
            SOp::Eq | SOp::Ne | SOp::Lt | SOp::Le | SOp::Gt | SOp::Ge => 4,
            SOp::Add | SOp::Sub => 5,
        }
    }
}

/// Expression of the emitted SMV subset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SExpr {
    Bool(bool),
    Int(i64),
    /// Variable, define or symbolic constant.
    Ident(String),
    Next(Box<SExpr>),
    Not(Box<SExpr>),
    Neg(Box<SExpr>),
    Bin(SOp, Box<SExpr>, Box<SExpr>),
    Case(Vec<(SExpr, SExpr)>),
    /// Nondeterministic choice among the listed values.
    Set(Vec<SExpr>),
    /// Nondeterministic choice in `lo..hi`.
    Range(i64, i64),
}

const UNARY_PREC: u8 = 6;

#[allow(clippy::should_implement_trait)]
impl SExpr {
    pub fn ident(s: impl Into<String>) -> SExpr {
        SExpr::Ident(s.into())
    }

    pub fn bin(op: SOp, a: SExpr, b: SExpr) -> SExpr {
        SExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn eq(a: SExpr, b: SExpr) -> SExpr {
        SExpr::bin(SOp::Eq, a, b)
    }

    pub fn and(a: SExpr, b: SExpr) -> SExpr {
        match (&a, &b) {
            (SExpr::Bool(true), _) => b,
            (_, SExpr::Bool(true)) => a,
            _ => SExpr::bin(SOp::And, a, b),
        }
    }

    pub fn or(a: SExpr, b: SExpr) -> SExpr {
        SExpr::bin(SOp::Or, a, b)
    }

    pub fn not(a: SExpr) -> SExpr {
        SExpr::Not(Box::new(a))
    }

    pub fn next(a: SExpr) -> SExpr {
        SExpr::Next(Box::new(a))
    }

    fn precedence(&self) -> u8 {
        match self {
            SExpr::Bin(op, ..) => op.precedence(),
            SExpr::Not(_) | SExpr::Neg(_) => UNARY_PREC,
            _ => 7,
        }
    }

    /// Single identifier or constant; never needs parentheses.
    pub fn is_atomic(&self) -> bool {
        matches!(self, SExpr::Bool(_) | SExpr::Int(_) | SExpr::Ident(_))
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &SExpr, needs: bool| {
            if needs {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            SExpr::Bool(true) => f.write_str("TRUE"),
            SExpr::Bool(false) => f.write_str("FALSE"),
            SExpr::Int(v) => write!(f, "{v}"),
            SExpr::Ident(s) => f.write_str(s),
            SExpr::Next(e) => write!(f, "next({e})"),
            SExpr::Not(e) => {
                f.write_str("!")?;
                wrap(f, e, e.precedence() < UNARY_PREC)
            }
            SExpr::Neg(e) => {
                f.write_str("-")?;
                // `--` would open a comment
                let starts_with_minus = matches!(**e, SExpr::Neg(_)) || matches!(**e, SExpr::Int(v) if v < 0);
                wrap(f, e, e.precedence() < UNARY_PREC || starts_with_minus)
            }
            SExpr::Bin(op, a, b) => {
                let p = op.precedence();
                let (left, right) = match op {
                    SOp::Implies => (a.precedence() <= p, b.precedence() < p),
                    _ if p == 4 => (a.precedence() <= p, b.precedence() <= p),
                    _ => (a.precedence() < p, b.precedence() <= p),
                };
                wrap(f, a, left)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, b, right)
            }
            SExpr::Case(arms) => {
                f.write_str("case")?;
                for (c, v) in arms {
                    write!(f, " {c} : {v};")?;
                }
                f.write_str(" esac")
            }
            SExpr::Set(items) => {
                f.write_str("{")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("}")
            }
            SExpr::Range(lo, hi) => write!(f, "{lo}..{hi}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmvType {
    Boolean,
    Range(i64, i64),
    Enum(Vec<String>),
}

impl fmt::Display for SmvType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmvType::Boolean => f.write_str("boolean"),
            SmvType::Range(lo, hi) => write!(f, "{lo}..{hi}"),
            SmvType::Enum(labels) => write!(f, "{{{}}}", labels.join(", ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmvDocument {
    /// Free-form header comment lines (without the `--` prefix).
    pub comments: Vec<String>,
    /// Symbolic constants declared up front.
    pub constants: Vec<String>,
    pub vars: Vec<(String, SmvType)>,
    pub defines: Vec<(String, SExpr)>,
    /// `(variable, init, next)` in variable order.
    pub assigns: Vec<(String, SExpr, SExpr)>,
    /// `(spec name, formula text)`.
    pub specs: Vec<(String, String)>,
}

impl SmvDocument {
    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn define_count(&self) -> usize {
        self.defines.len()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            writeln!(out, "-- {c}").unwrap();
        }
        out.push_str("MODULE main\n");
        if !self.constants.is_empty() {
            writeln!(out, "CONSTANTS {};", self.constants.join(", ")).unwrap();
        }
        out.push_str("VAR\n");
        for (name, ty) in &self.vars {
            writeln!(out, "  {name} : {ty};").unwrap();
        }
        if !self.defines.is_empty() {
            out.push_str("DEFINE\n");
            for (name, e) in &self.defines {
                writeln!(out, "  {name} := {e};").unwrap();
            }
        }
        out.push_str("ASSIGN\n");
        for (name, init, next) in &self.assigns {
            writeln!(out, "  init({name}) := {init};").unwrap();
            writeln!(out, "  next({name}) := {next};").unwrap();
        }
        for (name, f) in &self.specs {
            writeln!(out, "-- spec {name}").unwrap();
            writeln!(out, "LTLSPEC {f}").unwrap();
        }
        out
    }
}

impl fmt::Display for SmvDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> SExpr {
        SExpr::ident(s)
    }

    #[test]
    fn minimal_parentheses() {
        let e = SExpr::bin(
            SOp::And,
            SExpr::bin(SOp::Or, id("a"), id("b")),
            SExpr::not(SExpr::eq(id("x"), SExpr::Int(1))),
        );
        assert_eq!(e.to_string(), "(a | b) & !(x = 1)");
        let s = SExpr::bin(
            SOp::Sub,
            id("a"),
            SExpr::bin(SOp::Sub, id("b"), id("c")),
        );
        assert_eq!(s.to_string(), "a - (b - c)");
        let n = SExpr::Neg(Box::new(SExpr::Neg(Box::new(SExpr::Int(1)))));
        assert_eq!(n.to_string(), "-(-1)");
    }

    #[test]
    fn case_and_sets() {
        let c = SExpr::Case(vec![(id("g"), SExpr::Int(1)), (SExpr::Bool(true), SExpr::Int(0))]);
        assert_eq!(c.to_string(), "case g : 1; TRUE : 0; esac");
        let s = SExpr::Set(vec![SExpr::Bool(false), SExpr::Bool(true)]);
        assert_eq!(s.to_string(), "{FALSE, TRUE}");
    }
}
