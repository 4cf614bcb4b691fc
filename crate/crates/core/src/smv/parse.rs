//! Reader for the SMV subset produced by the emitter: a single `MODULE
//! main` with VAR, DEFINE, ASSIGN (init/next) and LTLSPEC sections.

use std::collections::HashMap;

use thiserror::Error;

use super::doc::{SExpr, SOp, SmvType};
use crate::ltl::Ltl;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("smv line {line}: {message}")]
pub struct SmvParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: [&str; 21] = [
    ":=", "..", "->", "!=", "<=", ">=", ":", ";", "(", ")", "{", "}", ",", "!", "&", "|", "=", "<",
    ">", "+", "-",
];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SmvParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let b = text.as_bytes();
    let mut i = 0;
    'outer: while i < b.len() {
        let c = b[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("--") {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let v = text[start..i].parse().map_err(|_| SmvParseError {
                line,
                message: "integer out of range".into(),
            })?;
            out.push((Tok::Int(v), line));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || matches!(b[i], b'_' | b'$' | b'#')) {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), line));
            continue;
        }
        for s in SYMBOLS {
            if text[i..].starts_with(s) {
                out.push((Tok::Sym(s), line));
                i += s.len();
                continue 'outer;
            }
        }
        return Err(SmvParseError {
            line,
            message: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
        });
    }
    out.push((Tok::Eof, line));
    Ok(out)
}

/// A parsed document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedSmv {
    pub constants: Vec<String>,
    pub vars: Vec<(String, SmvType)>,
    pub defines: Vec<(String, SExpr)>,
    pub inits: HashMap<String, SExpr>,
    pub nexts: HashMap<String, SExpr>,
    pub specs: Vec<Ltl<SExpr>>,
}

/// Formula tree before temporal and state-level parts are separated.
enum Tree {
    Leaf(SExpr),
    Not(Box<Tree>),
    Bin(SOp, Box<Tree>, Box<Tree>),
    Unary(char, Box<Tree>),
    Until(Box<Tree>, Box<Tree>),
}

impl Tree {
    fn into_ltl(self) -> Ltl<SExpr> {
        match self {
            Tree::Leaf(SExpr::Bool(true)) => Ltl::True,
            Tree::Leaf(SExpr::Bool(false)) => Ltl::False,
            Tree::Leaf(e) => Ltl::Atom(e),
            Tree::Not(a) => Ltl::not(a.into_ltl()),
            Tree::Bin(SOp::And, a, b) => Ltl::and(a.into_ltl(), b.into_ltl()),
            Tree::Bin(SOp::Or, a, b) => Ltl::or(a.into_ltl(), b.into_ltl()),
            Tree::Bin(SOp::Implies, a, b) => Ltl::implies(a.into_ltl(), b.into_ltl()),
            Tree::Bin(..) => unreachable!("folded into leaves"),
            Tree::Unary('G', a) => Ltl::globally(a.into_ltl()),
            Tree::Unary('F', a) => Ltl::finally(a.into_ltl()),
            Tree::Unary(_, a) => Ltl::next(a.into_ltl()),
            Tree::Until(a, b) => Ltl::until(a.into_ltl(), b.into_ltl()),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const SECTIONS: [&str; 6] = ["MODULE", "CONSTANTS", "VAR", "DEFINE", "ASSIGN", "LTLSPEC"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn line(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SmvParseError> {
        Err(SmvParseError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SmvParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {:?}", self.peek()))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), SmvParseError> {
        if self.is_word(w) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, SmvParseError> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            t => self.err(format!("expected identifier, found {t:?}")),
        }
    }

    fn at_section(&self) -> bool {
        matches!(self.peek(), Tok::Eof) || SECTIONS.iter().any(|s| self.is_word(s))
    }

    fn document(&mut self) -> Result<ParsedSmv, SmvParseError> {
        let mut doc = ParsedSmv {
            constants: Vec::new(),
            vars: Vec::new(),
            defines: Vec::new(),
            inits: HashMap::new(),
            nexts: HashMap::new(),
            specs: Vec::new(),
        };
        self.expect_word("MODULE")?;
        self.expect_word("main")?;
        loop {
            if matches!(self.peek(), Tok::Eof) {
                return Ok(doc);
            }
            let section = self.ident()?;
            match section.as_str() {
                "CONSTANTS" => {
                    doc.constants.push(self.ident()?);
                    while self.eat_sym(",") {
                        doc.constants.push(self.ident()?);
                    }
                    self.expect_sym(";")?;
                }
                "VAR" => {
                    while !self.at_section() {
                        let name = self.ident()?;
                        self.expect_sym(":")?;
                        let ty = self.ty()?;
                        self.expect_sym(";")?;
                        doc.vars.push((name, ty));
                    }
                }
                "DEFINE" => {
                    while !self.at_section() {
                        let name = self.ident()?;
                        self.expect_sym(":=")?;
                        let e = self.expr()?;
                        self.expect_sym(";")?;
                        doc.defines.push((name, e));
                    }
                }
                "ASSIGN" => {
                    while !self.at_section() {
                        let which = self.ident()?;
                        self.expect_sym("(")?;
                        let name = self.ident()?;
                        self.expect_sym(")")?;
                        self.expect_sym(":=")?;
                        let e = self.expr()?;
                        self.expect_sym(";")?;
                        let map = match which.as_str() {
                            "init" => &mut doc.inits,
                            "next" => &mut doc.nexts,
                            _ => return self.err(format!("unexpected `{which}` in ASSIGN")),
                        };
                        if map.insert(name.clone(), e).is_some() {
                            return self.err(format!("{which}({name}) assigned twice"));
                        }
                    }
                }
                "LTLSPEC" => {
                    let t = self.tree(0)?;
                    self.eat_sym(";");
                    doc.specs.push(t.into_ltl());
                }
                other => return self.err(format!("unsupported section `{other}`")),
            }
        }
    }

    fn signed_int(&mut self) -> Result<i64, SmvParseError> {
        let neg = self.eat_sym("-");
        match self.bump() {
            Tok::Int(v) => Ok(if neg { -v } else { v }),
            t => self.err(format!("expected integer, found {t:?}")),
        }
    }

    fn ty(&mut self) -> Result<SmvType, SmvParseError> {
        if self.is_word("boolean") {
            self.pos += 1;
            return Ok(SmvType::Boolean);
        }
        if self.eat_sym("{") {
            let mut labels = vec![self.ident()?];
            while self.eat_sym(",") {
                labels.push(self.ident()?);
            }
            self.expect_sym("}")?;
            return Ok(SmvType::Enum(labels));
        }
        let lo = self.signed_int()?;
        self.expect_sym("..")?;
        let hi = self.signed_int()?;
        Ok(SmvType::Range(lo, hi))
    }

    /// Plain expression: the formula grammar without temporal operators.
    fn expr(&mut self) -> Result<SExpr, SmvParseError> {
        let line = self.line();
        match self.tree(0)? {
            Tree::Leaf(e) => Ok(e),
            _ => Err(SmvParseError {
                line,
                message: "temporal operator outside LTLSPEC".into(),
            }),
        }
    }

    /// Precedence climbing. Levels: 1 `->` (right), 2 `|`, 3 `&`, 4 `U`
    /// (right), 5 comparisons, 6 `+ -`, then unary operators.
    fn tree(&mut self, min: u8) -> Result<Tree, SmvParseError> {
        let mut lhs = self.unary()?;
        loop {
            let (prec, op) = match self.peek() {
                Tok::Sym("->") => (1, Some(SOp::Implies)),
                Tok::Sym("|") => (2, Some(SOp::Or)),
                Tok::Sym("&") => (3, Some(SOp::And)),
                Tok::Ident(w) if w == "U" => (4, None),
                Tok::Sym("=") => (5, Some(SOp::Eq)),
                Tok::Sym("!=") => (5, Some(SOp::Ne)),
                Tok::Sym("<") => (5, Some(SOp::Lt)),
                Tok::Sym("<=") => (5, Some(SOp::Le)),
                Tok::Sym(">") => (5, Some(SOp::Gt)),
                Tok::Sym(">=") => (5, Some(SOp::Ge)),
                Tok::Sym("+") => (6, Some(SOp::Add)),
                Tok::Sym("-") => (6, Some(SOp::Sub)),
                _ => return Ok(lhs),
            };
            if prec < min {
                return Ok(lhs);
            }
            self.pos += 1;
            let right_assoc = prec == 1 || prec == 4;
            let rhs = self.tree(if right_assoc { prec } else { prec + 1 })?;
            lhs = match op {
                None => Tree::Until(Box::new(lhs), Box::new(rhs)),
                Some(op) => match (lhs, rhs) {
                    (Tree::Leaf(a), Tree::Leaf(b)) => Tree::Leaf(SExpr::bin(op, a, b)),
                    (a, b) if prec <= 3 => Tree::Bin(op, Box::new(a), Box::new(b)),
                    _ => return self.err("temporal formula used as a value"),
                },
            };
        }
    }

    fn unary(&mut self) -> Result<Tree, SmvParseError> {
        if self.eat_sym("!") {
            return Ok(match self.unary()? {
                Tree::Leaf(e) => Tree::Leaf(SExpr::not(e)),
                t => Tree::Not(Box::new(t)),
            });
        }
        if self.eat_sym("-") {
            if let Tok::Int(v) = *self.peek() {
                self.pos += 1;
                if self.eat_sym("..") {
                    let hi = self.signed_int()?;
                    return Ok(Tree::Leaf(SExpr::Range(-v, hi)));
                }
                return Ok(Tree::Leaf(SExpr::Int(-v)));
            }
            return match self.unary()? {
                Tree::Leaf(e) => Ok(Tree::Leaf(SExpr::Neg(Box::new(e)))),
                _ => self.err("temporal formula used as a value"),
            };
        }
        for op in ['G', 'F', 'X'] {
            if self.is_word(&op.to_string()) {
                self.pos += 1;
                return Ok(Tree::Unary(op, Box::new(self.unary()?)));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Tree, SmvParseError> {
        let line = self.line();
        match self.bump() {
            Tok::Int(v) => {
                if self.eat_sym("..") {
                    let hi = self.signed_int()?;
                    return Ok(Tree::Leaf(SExpr::Range(v, hi)));
                }
                Ok(Tree::Leaf(SExpr::Int(v)))
            }
            Tok::Sym("(") => {
                let t = self.tree(0)?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Sym("{") => {
                let mut items = vec![self.expr()?];
                while self.eat_sym(",") {
                    items.push(self.expr()?);
                }
                self.expect_sym("}")?;
                Ok(Tree::Leaf(SExpr::Set(items)))
            }
            Tok::Ident(w) => match w.as_str() {
                "TRUE" => Ok(Tree::Leaf(SExpr::Bool(true))),
                "FALSE" => Ok(Tree::Leaf(SExpr::Bool(false))),
                "next" => {
                    self.expect_sym("(")?;
                    let e = self.expr()?;
                    self.expect_sym(")")?;
                    Ok(Tree::Leaf(SExpr::next(e)))
                }
                "case" => {
                    let mut arms = Vec::new();
                    while !self.is_word("esac") {
                        let c = self.expr()?;
                        self.expect_sym(":")?;
                        let v = self.expr()?;
                        self.expect_sym(";")?;
                        arms.push((c, v));
                    }
                    self.expect_word("esac")?;
                    Ok(Tree::Leaf(SExpr::Case(arms)))
                }
                _ if SECTIONS.contains(&w.as_str()) || w == "U" || w == "esac" => Err(SmvParseError {
                    line,
                    message: format!("unexpected `{w}`"),
                }),
                _ => Ok(Tree::Leaf(SExpr::Ident(w))),
            },
            t => Err(SmvParseError {
                line,
                message: format!("unexpected {t:?}"),
            }),
        }
    }
}

pub fn parse_smv(text: &str) -> Result<ParsedSmv, SmvParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.document()
}

/// Parses a single `LTLSPEC` formula body.
pub fn parse_ltl(text: &str) -> Result<Ltl<SExpr>, SmvParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.tree(0)?;
    if !matches!(p.peek(), Tok::Eof) {
        return p.err("trailing input after formula");
    }
    Ok(t.into_ltl())
}
