//! Recursive-descent parser for `.sbt` sources.
//!
//! Errors are collected rather than returned at the first failure: list
//! parsers resynchronise at the next `;` or `}` so one run can report
//! several problems.

use super::ast::*;
use super::lexer::{Token, TokenKind};
use super::Diagnostic;
use crate::ltl::Ltl;
use crate::model::{BinaryOp, DecoratorKind, UnaryOp};
use crate::status::Status;

use TokenKind as T;

/// Largest accepted integer literal magnitude. Keeps every expression of
/// realistic size far from `i64` overflow.
pub const MAX_LITERAL: i64 = 1_000_000_000;

fn parse_int(lexeme: &str) -> Option<i64> {
    lexeme.parse::<i64>().ok().filter(|v| *v <= MAX_LITERAL)
}

/// Marker for a failed production; the diagnostic is already recorded.
struct Failed;

type PResult<T> = Result<T, Failed>;

pub fn parse(tokens: &[Token]) -> Result<Ast, Vec<Diagnostic>> {
    assert!(
        tokens.last().is_some_and(|t| t.kind == T::Eof),
        "token stream must end with EOF"
    );
    let mut p = Parser {
        tokens,
        pos: 0,
        diags: Vec::new(),
        quiet: 0,
    };
    let ast = p.file();
    match ast {
        Ok(ast) if p.diags.is_empty() => Ok(ast),
        _ => {
            if p.diags.is_empty() {
                p.error_here("malformed input");
            }
            Err(p.diags)
        }
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    diags: Vec<Diagnostic>,
    /// Nesting depth of speculative parses; errors are not recorded while > 0.
    quiet: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos]
    }

    fn peek_kind(&self) -> TokenKind {
        self.peek().kind
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.peek_kind() == kind
    }

    fn here(&self) -> Pos {
        let t = self.peek();
        Pos {
            line: t.line,
            column: t.column,
        }
    }

    fn at_final_brace(&self) -> bool {
        self.at(T::RBrace) && self.tokens.get(self.pos + 1).is_some_and(|t| t.kind == T::Eof)
    }

    fn advance(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        if t.kind != T::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error_at(&mut self, pos: Pos, message: impl Into<String>) {
        if self.quiet == 0 {
            self.diags.push(Diagnostic::error(message, pos.line, pos.column));
        }
    }

    fn error_here(&mut self, message: impl Into<String>) {
        let pos = self.here();
        self.error_at(pos, message);
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&'t Token> {
        if self.at(kind) {
            Ok(self.advance())
        } else {
            let found = self.peek();
            let msg = if found.kind == T::Eof {
                format!("expected `{kind}`, found end of input")
            } else {
                format!("expected `{kind}`, found `{}`", found.lexeme)
            };
            self.error_here(msg);
            Err(Failed)
        }
    }

    fn ident(&mut self) -> PResult<String> {
        Ok(self.expect(T::Ident)?.lexeme.clone())
    }

    /// Skips to just past the next `;`, or up to (not past) the next `}`.
    fn synchronize(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek_kind() {
                T::Eof => return,
                T::Semi if depth == 0 => {
                    self.advance();
                    return;
                }
                T::LBrace => depth += 1,
                T::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    if depth == 0 {
                        self.advance();
                        return;
                    }
                }
                _ => {}
            }
            self.advance();
        }
    }

    fn file(&mut self) -> PResult<Ast> {
        self.expect(T::Tree)?;
        let name = self.ident()?;
        self.expect(T::LBrace)?;
        let env_decls = if self.eat(T::Env) {
            self.var_block()
        } else {
            Vec::new()
        };
        let blackboard_decls = if self.eat(T::Blackboard) {
            self.var_block()
        } else {
            Vec::new()
        };
        self.expect(T::Root)?;
        self.expect(T::Colon)?;
        let root = self.node();
        if root.is_err() {
            // skip the rest of the broken node so specs can still be checked
            while !self.at(T::Spec) && !self.at(T::Eof) && !self.at_final_brace() {
                self.advance();
            }
        }
        let mut specs = Vec::new();
        while self.at(T::Spec) {
            match self.spec() {
                Ok(s) => specs.push(s),
                Err(Failed) => self.synchronize(),
            }
        }
        self.expect(T::RBrace)?;
        if !self.at(T::Eof) {
            self.error_here(format!("unexpected `{}` after tree", self.peek().lexeme));
            return Err(Failed);
        }
        Ok(Ast {
            name,
            env_decls,
            blackboard_decls,
            root: root?,
            specs,
        })
    }

    fn var_block(&mut self) -> Vec<VarDeclAst> {
        let mut decls = Vec::new();
        if self.expect(T::LBrace).is_err() {
            self.synchronize();
            return decls;
        }
        while !matches!(self.peek_kind(), T::RBrace | T::Eof) {
            match self.var_decl() {
                Ok(d) => decls.push(d),
                Err(Failed) => self.synchronize(),
            }
        }
        let _ = self.expect(T::RBrace);
        decls
    }

    fn var_decl(&mut self) -> PResult<VarDeclAst> {
        let pos = self.here();
        let name = self.ident()?;
        self.expect(T::Colon)?;
        let domain = self.domain()?;
        let initial = if self.eat(T::Equals) {
            Some(self.literal()?)
        } else {
            None
        };
        let frozen = self.eat(T::Frozen);
        self.expect(T::Semi)?;
        Ok(VarDeclAst {
            name,
            domain,
            initial,
            frozen,
            pos,
        })
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let negative = self.eat(T::Minus);
        let tok = self.expect(T::Int)?;
        let Some(v) = parse_int(&tok.lexeme) else {
            let pos = Pos {
                line: tok.line,
                column: tok.column,
            };
            self.error_at(pos, "integer literal out of range");
            return Err(Failed);
        };
        Ok(if negative { -v } else { v })
    }

    fn domain(&mut self) -> PResult<DomainSpec> {
        match self.peek_kind() {
            T::IntKw => {
                self.advance();
                self.expect(T::LBracket)?;
                let lo = self.signed_int()?;
                self.expect(T::DotDot)?;
                let hi = self.signed_int()?;
                self.expect(T::RBracket)?;
                Ok(DomainSpec::Int { lo, hi })
            }
            T::BoolKw => {
                self.advance();
                Ok(DomainSpec::Bool)
            }
            T::EnumKw => {
                self.advance();
                self.expect(T::LBrace)?;
                let mut labels = vec![self.ident()?];
                while self.eat(T::Comma) {
                    labels.push(self.ident()?);
                }
                self.expect(T::RBrace)?;
                Ok(DomainSpec::Enum(labels))
            }
            _ => {
                self.error_here("expected a domain: `int[lo..hi]`, `bool` or `enum { ... }`");
                Err(Failed)
            }
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        match self.peek_kind() {
            T::True => {
                self.advance();
                Ok(Literal::Bool(true))
            }
            T::False => {
                self.advance();
                Ok(Literal::Bool(false))
            }
            T::Ident => Ok(Literal::Label(self.ident()?)),
            T::Int | T::Minus => Ok(Literal::Int(self.signed_int()?)),
            _ => {
                self.error_here("expected a literal value");
                Err(Failed)
            }
        }
    }

    fn opt_name(&mut self) -> Option<String> {
        self.at(T::Ident).then(|| self.advance().lexeme.clone())
    }

    fn node(&mut self) -> PResult<NodeAst> {
        let pos = self.here();
        let composite = match self.peek_kind() {
            T::Fallback => Some(CompositeKind::Fallback),
            T::FallbackM => Some(CompositeKind::FallbackM),
            T::Sequence => Some(CompositeKind::Sequence),
            T::SequenceM => Some(CompositeKind::SequenceM),
            T::Parallel => Some(CompositeKind::Parallel(0)),
            _ => None,
        };
        if let Some(mut kind) = composite {
            self.advance();
            if let CompositeKind::Parallel(_) = kind {
                self.expect(T::LParen)?;
                kind = CompositeKind::Parallel(self.signed_int()?);
                self.expect(T::RParen)?;
            }
            let name = self.opt_name();
            self.expect(T::LBrace)?;
            let mut children = Vec::new();
            let mut broken = false;
            while !matches!(self.peek_kind(), T::RBrace | T::Eof) {
                match self.node() {
                    Ok(c) => children.push(c),
                    Err(Failed) => {
                        broken = true;
                        self.synchronize();
                    }
                }
            }
            self.expect(T::RBrace)?;
            if children.is_empty() && !broken {
                self.error_at(pos, "composite node requires at least one child");
                return Err(Failed);
            }
            if broken {
                return Err(Failed);
            }
            return Ok(NodeAst::Composite {
                kind,
                name,
                children,
                pos,
            });
        }
        let decorator = match self.peek_kind() {
            T::Inverter => Some(DecoratorKind::Inverter),
            T::ForceSuccess => Some(DecoratorKind::ForceSuccess),
            T::ForceFailure => Some(DecoratorKind::ForceFailure),
            _ => None,
        };
        if let Some(kind) = decorator {
            self.advance();
            let name = self.opt_name();
            self.expect(T::LBrace)?;
            if self.at(T::RBrace) {
                self.error_at(pos, "decorator requires exactly one child");
                self.advance();
                return Err(Failed);
            }
            let child = self.node()?;
            if !self.at(T::RBrace) {
                self.error_here("decorator requires exactly one child");
                return Err(Failed);
            }
            self.advance();
            return Ok(NodeAst::Decorator {
                kind,
                name,
                child: Box::new(child),
                pos,
            });
        }
        match self.peek_kind() {
            T::Check => {
                self.advance();
                let name = self.ident()?;
                self.expect(T::LBrace)?;
                let cond = self.expr()?;
                self.expect(T::RBrace)?;
                Ok(NodeAst::Check { name, cond, pos })
            }
            T::Action => {
                self.advance();
                let name = self.ident()?;
                self.expect(T::LBrace)?;
                let mut commands = Vec::new();
                let mut broken = false;
                while !matches!(self.peek_kind(), T::RBrace | T::Eof) {
                    match self.guarded() {
                        Ok(c) => commands.push(c),
                        Err(Failed) => {
                            broken = true;
                            self.synchronize();
                        }
                    }
                }
                self.expect(T::RBrace)?;
                if broken {
                    return Err(Failed);
                }
                if commands.is_empty() {
                    self.error_at(pos, "action requires at least one guarded command");
                    return Err(Failed);
                }
                Ok(NodeAst::Action {
                    name,
                    commands,
                    pos,
                })
            }
            T::Eof => {
                self.error_here("expected a node, found end of input");
                Err(Failed)
            }
            _ => {
                self.error_here(format!("expected a node, found `{}`", self.peek().lexeme));
                Err(Failed)
            }
        }
    }

    fn guarded(&mut self) -> PResult<GuardedAst> {
        let pos = self.here();
        self.expect(T::On)?;
        let guard = self.expr()?;
        self.expect(T::Arrow)?;
        let mut assigns = Vec::new();
        while self.at(T::Ident) {
            let apos = self.here();
            let target = self.ident()?;
            self.expect(T::Assign)?;
            let value = self.expr()?;
            self.expect(T::Semi)?;
            assigns.push(AssignAst {
                target,
                value,
                pos: apos,
            });
        }
        self.expect(T::Return)?;
        let status = match self.peek_kind() {
            T::Success => Status::Success,
            T::Failure => Status::Failure,
            T::Running => Status::Running,
            _ => {
                self.error_here("expected `success`, `failure` or `running`");
                return Err(Failed);
            }
        };
        self.advance();
        self.expect(T::Semi)?;
        Ok(GuardedAst {
            guard,
            assigns,
            status,
            pos,
        })
    }

    fn spec(&mut self) -> PResult<SpecDecl> {
        let pos = self.here();
        self.expect(T::Spec)?;
        let name = self.ident()?;
        self.expect(T::Colon)?;
        let formula = self.ltl()?;
        self.expect(T::Semi)?;
        Ok(SpecDecl { name, formula, pos })
    }

    // ---- temporal formulas ----

    fn ltl(&mut self) -> PResult<LtlAst> {
        let lhs = self.ltl_or()?;
        if self.eat(T::Arrow) {
            let rhs = self.ltl()?;
            return Ok(Ltl::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn ltl_or(&mut self) -> PResult<LtlAst> {
        let mut lhs = self.ltl_and()?;
        while self.eat(T::OrOr) {
            let rhs = self.ltl_and()?;
            lhs = Ltl::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ltl_and(&mut self) -> PResult<LtlAst> {
        let mut lhs = self.ltl_binary_temporal()?;
        while self.eat(T::AndAnd) {
            let rhs = self.ltl_binary_temporal()?;
            lhs = Ltl::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ltl_binary_temporal(&mut self) -> PResult<LtlAst> {
        let lhs = self.ltl_unary()?;
        if self.eat(T::Until) {
            return Ok(Ltl::until(lhs, self.ltl_binary_temporal()?));
        }
        if self.eat(T::StrongRelease) {
            return Ok(Ltl::strong_release(lhs, self.ltl_binary_temporal()?));
        }
        Ok(lhs)
    }

    fn ltl_unary(&mut self) -> PResult<LtlAst> {
        match self.peek_kind() {
            T::Globally => {
                self.advance();
                Ok(Ltl::globally(self.ltl_unary()?))
            }
            T::Finally => {
                self.advance();
                Ok(Ltl::finally(self.ltl_unary()?))
            }
            T::Next => {
                self.advance();
                Ok(Ltl::next(self.ltl_unary()?))
            }
            T::Bang => {
                self.advance();
                Ok(Ltl::not(self.ltl_unary()?))
            }
            _ => self.ltl_primary(),
        }
    }

    fn ltl_primary(&mut self) -> PResult<LtlAst> {
        if self.at(T::Status) {
            let pos = self.here();
            self.advance();
            self.expect(T::LParen)?;
            let node = self.ident()?;
            self.expect(T::RParen)?;
            self.expect(T::EqEq)?;
            let status = match self.peek_kind() {
                T::Success => Status::Success,
                T::Failure => Status::Failure,
                T::Running => Status::Running,
                T::Invalid => Status::Invalid,
                _ => {
                    self.error_here("expected a status name");
                    return Err(Failed);
                }
            };
            self.advance();
            return Ok(Ltl::atom(AtomAst::Status { node, status, pos }));
        }
        if self.at(T::LParen) {
            // `(` may open an arithmetic operand of an atom, as in
            // `(x + 1) <= 4`, or a parenthesised formula.
            if let Some(e) = self.speculate_atom_expr() {
                return Ok(Ltl::atom(AtomAst::Expr(e)));
            }
            self.advance();
            let inner = self.ltl()?;
            self.expect(T::RParen)?;
            return Ok(inner);
        }
        Ok(Ltl::atom(AtomAst::Expr(self.atom_expr()?)))
    }

    fn speculate_atom_expr(&mut self) -> Option<ExprAst> {
        let saved = self.pos;
        self.quiet += 1;
        let result = self.atom_expr();
        self.quiet -= 1;
        let follows = matches!(
            self.peek_kind(),
            T::RParen | T::Semi | T::Until | T::StrongRelease | T::AndAnd | T::OrOr | T::Arrow
        );
        match result {
            Ok(e) if follows => Some(e),
            _ => {
                self.pos = saved;
                None
            }
        }
    }

    /// Comparison-level expression without boolean connectives.
    fn atom_expr(&mut self) -> PResult<ExprAst> {
        let lhs = self.arith(true)?;
        self.comparison_tail(lhs, true)
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<ExprAst> {
        let mut lhs = self.and_expr()?;
        while self.at(T::OrOr) {
            let pos = self.here();
            self.advance();
            let rhs = self.and_expr()?;
            lhs = ExprAst::Binary(BinaryOp::Or, Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<ExprAst> {
        let mut lhs = self.cmp_expr()?;
        while self.at(T::AndAnd) {
            let pos = self.here();
            self.advance();
            let rhs = self.cmp_expr()?;
            lhs = ExprAst::Binary(BinaryOp::And, Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> PResult<ExprAst> {
        let lhs = self.arith(false)?;
        self.comparison_tail(lhs, false)
    }

    fn comparison_tail(&mut self, lhs: ExprAst, atom: bool) -> PResult<ExprAst> {
        let op = match self.peek_kind() {
            T::EqEq => BinaryOp::Eq,
            T::NotEq => BinaryOp::Ne,
            T::Lt => BinaryOp::Lt,
            T::Le => BinaryOp::Le,
            T::Gt => BinaryOp::Gt,
            T::Ge => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        let pos = self.here();
        self.advance();
        let rhs = self.arith(atom)?;
        if matches!(
            self.peek_kind(),
            T::EqEq | T::NotEq | T::Lt | T::Le | T::Gt | T::Ge
        ) {
            self.error_here("comparison operators do not chain; add parentheses");
            return Err(Failed);
        }
        Ok(ExprAst::Binary(op, Box::new(lhs), Box::new(rhs), pos))
    }

    fn arith(&mut self, atom: bool) -> PResult<ExprAst> {
        let mut lhs = self.unary(atom)?;
        loop {
            let op = match self.peek_kind() {
                T::Plus => BinaryOp::Add,
                T::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.here();
            self.advance();
            let rhs = self.unary(atom)?;
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn unary(&mut self, atom: bool) -> PResult<ExprAst> {
        let pos = self.here();
        match self.peek_kind() {
            T::Minus => {
                self.advance();
                Ok(ExprAst::Unary(UnaryOp::Neg, Box::new(self.unary(atom)?), pos))
            }
            T::Bang if !atom => {
                self.advance();
                Ok(ExprAst::Unary(UnaryOp::Not, Box::new(self.unary(atom)?), pos))
            }
            _ => self.primary(atom),
        }
    }

    fn primary(&mut self, atom: bool) -> PResult<ExprAst> {
        let pos = self.here();
        match self.peek_kind() {
            T::Int => {
                let tok = self.advance();
                match parse_int(&tok.lexeme) {
                    Some(v) => Ok(ExprAst::Int(v, pos)),
                    None => {
                        self.error_at(pos, "integer literal out of range");
                        Err(Failed)
                    }
                }
            }
            T::True => {
                self.advance();
                Ok(ExprAst::Bool(true, pos))
            }
            T::False => {
                self.advance();
                Ok(ExprAst::Bool(false, pos))
            }
            T::Ident => Ok(ExprAst::Ident(self.advance().lexeme.clone(), pos)),
            T::LParen => {
                self.advance();
                let inner = if atom { self.arith(true)? } else { self.expr()? };
                self.expect(T::RParen)?;
                Ok(inner)
            }
            T::Eof => {
                self.error_here("expected an expression, found end of input");
                Err(Failed)
            }
            _ => {
                self.error_here(format!(
                    "expected an expression, found `{}`",
                    self.peek().lexeme
                ));
                Err(Failed)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::tokenize;

    fn parse_src(src: &str) -> Result<Ast, Vec<Diagnostic>> {
        parse(&tokenize(src).unwrap())
    }

    #[test]
    fn minimal_program() {
        let ast = parse_src("tree T { root: check c { true } }").unwrap();
        assert_eq!(ast.name, "T");
        assert!(matches!(
            ast.root,
            NodeAst::Check { ref name, cond: ExprAst::Bool(true, _), .. } if name == "c"
        ));
    }

    #[test]
    fn empty_composite_is_rejected() {
        let diags = parse_src("tree T { root: fallback { } }").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "composite node requires at least one child");
        assert_eq!((diags[0].line, diags[0].column), (1, 16));
    }

    #[test]
    fn recovers_to_report_several_errors() {
        let src = "tree T {\n  blackboard {\n    x: int[0..] = 0;\n    y: bool = ;\n  }\n  root: check c { true }\n  spec a: G ;\n}";
        let diags = parse_src(src).unwrap_err();
        assert_eq!(diags.len(), 3, "{diags:?}");
        assert_eq!(diags[0].line, 3);
        assert_eq!(diags[1].line, 4);
        assert_eq!(diags[2].line, 7);
    }

    #[test]
    fn comparisons_do_not_chain() {
        assert!(parse_src("tree T { root: check c { 1 == 1 == 1 } }").is_err());
    }

    fn spec_formula(src_ltl: &str) -> LtlAst {
        let src = format!("tree T {{ root: check c {{ true }} spec s: {src_ltl}; }}");
        parse_src(&src).unwrap().specs.remove(0).formula
    }

    fn var(n: &str) -> LtlAst {
        Ltl::atom(AtomAst::Expr(ExprAst::Ident(n.into(), Pos::default())))
    }

    #[test]
    fn temporal_precedence() {
        // unary binds tighter than U, U tighter than &&, && tighter than ->
        let f = spec_formula("G a U b && c -> d");
        let expected = Ltl::implies(
            Ltl::and(Ltl::until(Ltl::globally(var("a")), var("b")), var("c")),
            var("d"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn until_is_right_associative() {
        assert_eq!(
            spec_formula("a U b M c"),
            Ltl::until(var("a"), Ltl::strong_release(var("b"), var("c")))
        );
    }

    #[test]
    fn parenthesised_arithmetic_in_atom() {
        let f = spec_formula("G (x + 1) <= 4");
        let Ltl::Globally(inner) = f else { panic!() };
        let Ltl::Atom(AtomAst::Expr(ExprAst::Binary(BinaryOp::Le, lhs, _, _))) = *inner else {
            panic!("{inner:?}")
        };
        assert!(matches!(*lhs, ExprAst::Binary(BinaryOp::Add, ..)));
    }

    #[test]
    fn parenthesised_formula_and_atom_agree() {
        assert_eq!(spec_formula("G (x <= 4)"), spec_formula("G x <= 4"));
        assert_eq!(spec_formula("(a) U b"), spec_formula("a U b"));
    }

    #[test]
    fn status_atom() {
        let f = spec_formula("F (status(__root) == success)");
        assert!(matches!(
            f,
            Ltl::Finally(ref a) if matches!(**a, Ltl::Atom(AtomAst::Status { ref node, status: Status::Success, .. }) if node == "__root")
        ));
    }
}
