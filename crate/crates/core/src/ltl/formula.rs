use std::fmt;

/// Linear temporal logic formula over atoms of type `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ltl<A> {
    True,
    False,
    Atom(A),
    Not(Box<Ltl<A>>),
    And(Box<Ltl<A>>, Box<Ltl<A>>),
    Or(Box<Ltl<A>>, Box<Ltl<A>>),
    Implies(Box<Ltl<A>>, Box<Ltl<A>>),
    Next(Box<Ltl<A>>),
    Until(Box<Ltl<A>>, Box<Ltl<A>>),
    /// Weak release, the dual of until. Produced by [`Ltl::to_nnf`].
    Release(Box<Ltl<A>>, Box<Ltl<A>>),
    /// Strong release `a M b`: `b` holds up to and including a moment where
    /// `a` holds, and that moment must come.
    StrongRelease(Box<Ltl<A>>, Box<Ltl<A>>),
    Globally(Box<Ltl<A>>),
    Finally(Box<Ltl<A>>),
}

use Ltl::*;

#[allow(clippy::should_implement_trait)]
impl<A> Ltl<A> {
    pub fn atom(a: A) -> Self {
        Atom(a)
    }
    pub fn not(f: Self) -> Self {
        Not(Box::new(f))
    }
    pub fn and(a: Self, b: Self) -> Self {
        And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Self, b: Self) -> Self {
        Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Self, b: Self) -> Self {
        Implies(Box::new(a), Box::new(b))
    }
    pub fn next(f: Self) -> Self {
        Next(Box::new(f))
    }
    pub fn until(a: Self, b: Self) -> Self {
        Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Self, b: Self) -> Self {
        Release(Box::new(a), Box::new(b))
    }
    pub fn strong_release(a: Self, b: Self) -> Self {
        StrongRelease(Box::new(a), Box::new(b))
    }
    pub fn globally(f: Self) -> Self {
        Globally(Box::new(f))
    }
    pub fn finally(f: Self) -> Self {
        Finally(Box::new(f))
    }

    /// Number of nested temporal or boolean operators above the atoms.
    pub fn depth(&self) -> usize {
        match self {
            True | False | Atom(_) => 0,
            Not(a) | Next(a) | Globally(a) | Finally(a) => 1 + a.depth(),
            And(a, b)
            | Or(a, b)
            | Implies(a, b)
            | Until(a, b)
            | Release(a, b)
            | StrongRelease(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            True | False | Atom(_) => 1,
            Not(a) | Next(a) | Globally(a) | Finally(a) => 1 + a.size(),
            And(a, b)
            | Or(a, b)
            | Implies(a, b)
            | Until(a, b)
            | Release(a, b)
            | StrongRelease(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// True when the formula contains no temporal operator.
    pub fn is_state_formula(&self) -> bool {
        match self {
            True | False | Atom(_) => true,
            Not(a) => a.is_state_formula(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.is_state_formula() && b.is_state_formula(),
            _ => false,
        }
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Ltl<B> {
        match self {
            True => True,
            False => False,
            Atom(a) => Atom(f(a)),
            Not(a) => Ltl::not(a.map_atoms(f)),
            And(a, b) => {
                let a = a.map_atoms(f);
                Ltl::and(a, b.map_atoms(f))
            }
            Or(a, b) => {
                let a = a.map_atoms(f);
                Ltl::or(a, b.map_atoms(f))
            }
            Implies(a, b) => {
                let a = a.map_atoms(f);
                Ltl::implies(a, b.map_atoms(f))
            }
            Next(a) => Ltl::next(a.map_atoms(f)),
            Until(a, b) => {
                let a = a.map_atoms(f);
                Ltl::until(a, b.map_atoms(f))
            }
            Release(a, b) => {
                let a = a.map_atoms(f);
                Ltl::release(a, b.map_atoms(f))
            }
            StrongRelease(a, b) => {
                let a = a.map_atoms(f);
                Ltl::strong_release(a, b.map_atoms(f))
            }
            Globally(a) => Ltl::globally(a.map_atoms(f)),
            Finally(a) => Ltl::finally(a.map_atoms(f)),
        }
    }

    /// Atoms in first-occurrence order, left to right.
    pub fn atoms(&self) -> Vec<&A>
    where
        A: PartialEq,
    {
        fn walk<'a, A: PartialEq>(f: &'a Ltl<A>, out: &mut Vec<&'a A>) {
            match f {
                True | False => {}
                Atom(a) => {
                    if !out.contains(&a) {
                        out.push(a)
                    }
                }
                Not(a) | Next(a) | Globally(a) | Finally(a) => walk(a, out),
                And(a, b)
                | Or(a, b)
                | Implies(a, b)
                | Until(a, b)
                | Release(a, b)
                | StrongRelease(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl<A: Clone> Ltl<A> {
    /// Rewrites into the core {true, false, atom, not, and, or, X, U}:
    /// `F a = true U a`, `G a = !(true U !a)`, `a M b = b U (a && b)`,
    /// `a -> b = !a || b`, `a R b = !(!a U !b)`.
    pub fn desugar(&self) -> Ltl<A> {
        match self {
            True => True,
            False => False,
            Atom(a) => Atom(a.clone()),
            Not(a) => Ltl::not(a.desugar()),
            And(a, b) => Ltl::and(a.desugar(), b.desugar()),
            Or(a, b) => Ltl::or(a.desugar(), b.desugar()),
            Implies(a, b) => Ltl::or(Ltl::not(a.desugar()), b.desugar()),
            Next(a) => Ltl::next(a.desugar()),
            Until(a, b) => Ltl::until(a.desugar(), b.desugar()),
            Release(a, b) => Ltl::not(Ltl::until(
                Ltl::not(a.desugar()),
                Ltl::not(b.desugar()),
            )),
            StrongRelease(a, b) => {
                let b = b.desugar();
                Ltl::until(b.clone(), Ltl::and(a.desugar(), b))
            }
            Globally(a) => Ltl::not(Ltl::until(True, Ltl::not(a.desugar()))),
            Finally(a) => Ltl::until(True, a.desugar()),
        }
    }

    /// Rewrites only the strong-release operator, leaving G/F/X/U intact.
    pub fn expand_strong_release(&self) -> Ltl<A> {
        match self {
            True => True,
            False => False,
            Atom(a) => Atom(a.clone()),
            Not(a) => Ltl::not(a.expand_strong_release()),
            And(a, b) => Ltl::and(a.expand_strong_release(), b.expand_strong_release()),
            Or(a, b) => Ltl::or(a.expand_strong_release(), b.expand_strong_release()),
            Implies(a, b) => Ltl::implies(a.expand_strong_release(), b.expand_strong_release()),
            Next(a) => Ltl::next(a.expand_strong_release()),
            Until(a, b) => Ltl::until(a.expand_strong_release(), b.expand_strong_release()),
            Release(a, b) => Ltl::release(a.expand_strong_release(), b.expand_strong_release()),
            StrongRelease(a, b) => {
                let b = b.expand_strong_release();
                Ltl::until(b.clone(), Ltl::and(a.expand_strong_release(), b))
            }
            Globally(a) => Ltl::globally(a.expand_strong_release()),
            Finally(a) => Ltl::finally(a.expand_strong_release()),
        }
    }

    /// Negation normal form of a formula. Sugar is removed first, so the
    /// result uses only true/false, literals, and, or, X, U and R.
    pub fn to_nnf(&self) -> Ltl<A> {
        nnf(&self.desugar(), true)
    }
}

fn nnf<A: Clone>(f: &Ltl<A>, positive: bool) -> Ltl<A> {
    match (f, positive) {
        (True, true) | (False, false) => True,
        (True, false) | (False, true) => False,
        (Atom(a), true) => Atom(a.clone()),
        (Atom(a), false) => Ltl::not(Atom(a.clone())),
        (Not(a), p) => nnf(a, !p),
        (And(a, b), true) => Ltl::and(nnf(a, true), nnf(b, true)),
        (And(a, b), false) => Ltl::or(nnf(a, false), nnf(b, false)),
        (Or(a, b), true) => Ltl::or(nnf(a, true), nnf(b, true)),
        (Or(a, b), false) => Ltl::and(nnf(a, false), nnf(b, false)),
        (Next(a), p) => Ltl::next(nnf(a, p)),
        (Until(a, b), true) => Ltl::until(nnf(a, true), nnf(b, true)),
        (Until(a, b), false) => Ltl::release(nnf(a, false), nnf(b, false)),
        (Release(a, b), true) => Ltl::release(nnf(a, true), nnf(b, true)),
        (Release(a, b), false) => Ltl::until(nnf(a, false), nnf(b, false)),
        // desugar() has removed the remaining operators
        (Implies(..) | StrongRelease(..) | Globally(_) | Finally(_), _) => {
            unreachable!("nnf expects a desugared formula")
        }
    }
}

impl<A: fmt::Display> fmt::Display for Ltl<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand<A: fmt::Display>(g: &Ltl<A>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match g {
                True | False | Atom(_) => write!(f, "{g}"),
                _ => write!(f, "({g})"),
            }
        }
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => write!(f, "{a}"),
            Not(a) => {
                f.write_str("!")?;
                operand(a, f)
            }
            Next(a) => {
                f.write_str("X ")?;
                operand(a, f)
            }
            Globally(a) => {
                f.write_str("G ")?;
                operand(a, f)
            }
            Finally(a) => {
                f.write_str("F ")?;
                operand(a, f)
            }
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b)
            | StrongRelease(a, b) => {
                let op = match self {
                    And(..) => "&&",
                    Or(..) => "||",
                    Implies(..) => "->",
                    Until(..) => "U",
                    Release(..) => "R",
                    _ => "M",
                };
                operand(a, f)?;
                write!(f, " {op} ")?;
                operand(b, f)
            }
        }
    }
}
