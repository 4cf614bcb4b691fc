//! Canonical source rendering: 4-space indentation, one child per line,
//! minimal parentheses.

use std::fmt::Write;

use super::ast::*;
use crate::ltl::Ltl;
use crate::model::UnaryOp;

const INDENT: &str = "    ";

pub fn pretty_print(ast: &Ast) -> String {
    let mut out = String::new();
    writeln!(out, "tree {} {{", ast.name).unwrap();
    for (keyword, decls) in [("env", &ast.env_decls), ("blackboard", &ast.blackboard_decls)] {
        if decls.is_empty() {
            continue;
        }
        writeln!(out, "{INDENT}{keyword} {{").unwrap();
        for d in decls {
            writeln!(out, "{INDENT}{INDENT}{}", var_decl(d)).unwrap();
        }
        writeln!(out, "{INDENT}}}").unwrap();
    }
    write!(out, "{INDENT}root: ").unwrap();
    node(&mut out, &ast.root, 1);
    for s in &ast.specs {
        writeln!(out, "{INDENT}spec {}: {};", s.name, ltl(&s.formula)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn var_decl(d: &VarDeclAst) -> String {
    let mut s = format!("{}: {}", d.name, domain(&d.domain));
    if let Some(init) = &d.initial {
        s.push_str(" = ");
        s.push_str(&literal(init));
    }
    if d.frozen {
        s.push_str(" frozen");
    }
    s.push(';');
    s
}

fn domain(d: &DomainSpec) -> String {
    match d {
        DomainSpec::Int { lo, hi } => format!("int[{lo}..{hi}]"),
        DomainSpec::Bool => "bool".into(),
        DomainSpec::Enum(labels) => format!("enum {{ {} }}", labels.join(", ")),
    }
}

fn literal(l: &Literal) -> String {
    match l {
        Literal::Int(v) => v.to_string(),
        Literal::Bool(b) => b.to_string(),
        Literal::Label(s) => s.clone(),
    }
}

/// Writes a node starting at the current column; `depth` is the indent
/// level of the line the node header sits on.
fn node(out: &mut String, n: &NodeAst, depth: usize) {
    let pad = INDENT.repeat(depth);
    let inner = INDENT.repeat(depth + 1);
    let header = |kw: &str, name: &Option<String>| match name {
        Some(name) => format!("{kw} {name} {{"),
        None => format!("{kw} {{"),
    };
    match n {
        NodeAst::Composite {
            kind,
            name,
            children,
            ..
        } => {
            let kw = match kind {
                CompositeKind::Parallel(m) => format!("parallel({m})"),
                k => k.keyword().to_string(),
            };
            out.push_str(&header(&kw, name));
            out.push('\n');
            for c in children {
                out.push_str(&inner);
                node(out, c, depth + 1);
            }
            writeln!(out, "{pad}}}").unwrap();
        }
        NodeAst::Decorator {
            kind, name, child, ..
        } => {
            out.push_str(&header(kind.keyword(), name));
            out.push('\n');
            out.push_str(&inner);
            node(out, child, depth + 1);
            writeln!(out, "{pad}}}").unwrap();
        }
        NodeAst::Check { name, cond, .. } => {
            writeln!(out, "check {name} {{").unwrap();
            writeln!(out, "{inner}{}", expr(cond)).unwrap();
            writeln!(out, "{pad}}}").unwrap();
        }
        NodeAst::Action { name, commands, .. } => {
            writeln!(out, "action {name} {{").unwrap();
            for c in commands {
                write!(out, "{inner}on {} ->", expr(&c.guard)).unwrap();
                for a in &c.assigns {
                    write!(out, " {} := {};", a.target, expr(&a.value)).unwrap();
                }
                writeln!(out, " return {};", c.status).unwrap();
            }
            writeln!(out, "{pad}}}").unwrap();
        }
    }
}

const UNARY_PREC: u8 = 5;

fn expr_prec(e: &ExprAst) -> u8 {
    match e {
        ExprAst::Binary(op, ..) => op.precedence(),
        ExprAst::Unary(..) => UNARY_PREC,
        _ => 6,
    }
}

/// Renders an expression with the fewest parentheses that re-parse to the
/// same tree.
pub fn expr(e: &ExprAst) -> String {
    match e {
        ExprAst::Int(v, _) => v.to_string(),
        ExprAst::Bool(b, _) => b.to_string(),
        ExprAst::Ident(s, _) => s.clone(),
        ExprAst::Unary(op, a, _) => {
            let sym = match op {
                UnaryOp::Not => "!",
                UnaryOp::Neg => "-",
            };
            if expr_prec(a) >= UNARY_PREC {
                format!("{sym}{}", expr(a))
            } else {
                format!("{sym}({})", expr(a))
            }
        }
        ExprAst::Binary(op, a, b, _) => {
            let p = op.precedence();
            // comparisons do not associate; everything else is left-assoc
            let left_needs = if op.is_comparison() {
                expr_prec(a) <= p
            } else {
                expr_prec(a) < p
            };
            let right_needs = expr_prec(b) <= p;
            format!(
                "{} {} {}",
                paren(expr(a), left_needs),
                op.symbol(),
                paren(expr(b), right_needs)
            )
        }
    }
}

fn paren(s: String, wrap: bool) -> String {
    if wrap {
        format!("({s})")
    } else {
        s
    }
}

fn ltl_prec(f: &LtlAst) -> u8 {
    match f {
        Ltl::Implies(..) => 1,
        Ltl::Or(..) => 2,
        Ltl::And(..) => 3,
        Ltl::Until(..) | Ltl::StrongRelease(..) | Ltl::Release(..) => 4,
        Ltl::Not(_) | Ltl::Next(_) | Ltl::Globally(_) | Ltl::Finally(_) => 5,
        Ltl::True | Ltl::False | Ltl::Atom(_) => 6,
    }
}

fn atom(a: &AtomAst) -> String {
    match a {
        AtomAst::Expr(e) => expr(e),
        AtomAst::Status { node, status, .. } => format!("status({node}) == {status}"),
    }
}

fn is_simple_atom(f: &LtlAst) -> bool {
    matches!(
        f,
        Ltl::True
            | Ltl::False
            | Ltl::Atom(AtomAst::Expr(ExprAst::Ident(..) | ExprAst::Bool(..) | ExprAst::Int(..)))
    )
}

/// Operand of a temporal or boolean operator; compound atoms are always
/// parenthesised for readability.
fn ltl_operand(f: &LtlAst, needs: bool) -> String {
    if needs || (matches!(f, Ltl::Atom(_)) && !is_simple_atom(f)) {
        format!("({})", ltl(f))
    } else {
        ltl(f)
    }
}

pub fn ltl(f: &LtlAst) -> String {
    match f {
        Ltl::True => "true".into(),
        Ltl::False => "false".into(),
        Ltl::Atom(a) => atom(a),
        Ltl::Not(a) => format!("!{}", ltl_operand(a, ltl_prec(a) < 5)),
        Ltl::Next(a) => format!("X {}", ltl_operand(a, ltl_prec(a) < 5)),
        Ltl::Globally(a) => format!("G {}", ltl_operand(a, ltl_prec(a) < 5)),
        Ltl::Finally(a) => format!("F {}", ltl_operand(a, ltl_prec(a) < 5)),
        // not part of the surface grammar; render through its definition
        Ltl::Release(a, b) => ltl(&Ltl::not(Ltl::until(
            Ltl::not((**a).clone()),
            Ltl::not((**b).clone()),
        ))),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) | Ltl::StrongRelease(a, b) => {
            let p = ltl_prec(f);
            let (op, right_assoc) = match f {
                Ltl::And(..) => ("&&", false),
                Ltl::Or(..) => ("||", false),
                Ltl::Implies(..) => ("->", true),
                Ltl::Until(..) => ("U", true),
                _ => ("M", true),
            };
            let (left_needs, right_needs) = if right_assoc {
                (ltl_prec(a) <= p, ltl_prec(b) < p)
            } else {
                (ltl_prec(a) < p, ltl_prec(b) <= p)
            };
            format!("{} {op} {}", ltl_operand(a, left_needs), ltl_operand(b, right_needs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, tokenize};

    fn reparse(src: &str) -> Ast {
        parse(&tokenize(src).unwrap()).unwrap()
    }

    #[test]
    fn minimal_program_round_trips() {
        let ast = reparse("tree T { root: check c { true } }");
        let text = pretty_print(&ast);
        assert_eq!(text, "tree T {\n    root: check c {\n        true\n    }\n}\n");
        assert_eq!(reparse(&text), ast);
    }

    #[test]
    fn nested_decorators_round_trip() {
        let src = "tree T { blackboard { x: int[-2..3] = -1; } root: inverter a { force_success { force_failure b { sequence_m { check c { -x < 2 - (1 - x) } action d { on !(x == 1) && true -> x := -(x + 1); return running; } } } } } spec s: !(a U b) -> X (x >= 0) M F c; }";
        let ast = reparse(src);
        let text = pretty_print(&ast);
        assert_eq!(reparse(&text), ast);
        assert_eq!(pretty_print(&reparse(&text)), text);
    }

    #[test]
    fn arithmetic_parenthesisation() {
        let ast = reparse("tree T { root: check c { a - (b - c) == (a - b) - c } }");
        let NodeAst::Check { cond, .. } = &ast.root else { panic!() };
        assert_eq!(expr(cond), "a - (b - c) == a - b - c");
    }
}
