//! Direct LTL semantics on ultimately periodic words `u·v^ω`.
//!
//! Positions `0..stem_len + cycle_len` index the finite representation; the
//! successor of the last position is `stem_len`. Every temporal operator is
//! evaluated straight from its quantifier definition by walking forward at
//! most one full lap, which visits every position reachable from the start.

use super::Ltl;

/// Truth of `f` at position 0 of the word. `holds(i, a)` gives the truth of
/// atom `a` at position `i`.
pub fn evaluate<A>(
    f: &Ltl<A>,
    stem_len: usize,
    cycle_len: usize,
    holds: &dyn Fn(usize, &A) -> bool,
) -> bool {
    assert!(cycle_len > 0, "a lasso needs a non-empty cycle");
    let word = Word {
        n: stem_len + cycle_len,
        stem: stem_len,
    };
    word.values(f, holds)[0]
}

/// Truth of `f` at every position of the word.
pub fn evaluate_all<A>(
    f: &Ltl<A>,
    stem_len: usize,
    cycle_len: usize,
    holds: &dyn Fn(usize, &A) -> bool,
) -> Vec<bool> {
    assert!(cycle_len > 0, "a lasso needs a non-empty cycle");
    Word {
        n: stem_len + cycle_len,
        stem: stem_len,
    }
    .values(f, holds)
}

struct Word {
    n: usize,
    stem: usize,
}

impl Word {
    fn succ(&self, i: usize) -> usize {
        if i + 1 == self.n {
            self.stem
        } else {
            i + 1
        }
    }

    /// Positions i, succ(i), succ²(i), … for one lap (n steps).
    fn future(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(Some(i), move |&p| Some(self.succ(p))).take(self.n)
    }

    fn values<A>(&self, f: &Ltl<A>, holds: &dyn Fn(usize, &A) -> bool) -> Vec<bool> {
        let n = self.n;
        match f {
            Ltl::True => vec![true; n],
            Ltl::False => vec![false; n],
            Ltl::Atom(a) => (0..n).map(|i| holds(i, a)).collect(),
            Ltl::Not(a) => self.values(a, holds).into_iter().map(|v| !v).collect(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) => {
                let (x, y) = (self.values(a, holds), self.values(b, holds));
                (0..n)
                    .map(|i| match f {
                        Ltl::And(..) => x[i] && y[i],
                        Ltl::Or(..) => x[i] || y[i],
                        _ => !x[i] || y[i],
                    })
                    .collect()
            }
            Ltl::Next(a) => {
                let x = self.values(a, holds);
                (0..n).map(|i| x[self.succ(i)]).collect()
            }
            Ltl::Globally(a) => {
                let x = self.values(a, holds);
                (0..n).map(|i| self.future(i).all(|p| x[p])).collect()
            }
            Ltl::Finally(a) => {
                let x = self.values(a, holds);
                (0..n).map(|i| self.future(i).any(|p| x[p])).collect()
            }
            // exists k: b at k, and a at every j < k
            Ltl::Until(a, b) => {
                let (x, y) = (self.values(a, holds), self.values(b, holds));
                (0..n)
                    .map(|i| {
                        for p in self.future(i) {
                            if y[p] {
                                return true;
                            }
                            if !x[p] {
                                return false;
                            }
                        }
                        false
                    })
                    .collect()
            }
            // for all k: b at k, unless a held at some j < k
            Ltl::Release(a, b) => {
                let (x, y) = (self.values(a, holds), self.values(b, holds));
                (0..n)
                    .map(|i| {
                        for p in self.future(i) {
                            if !y[p] {
                                return false;
                            }
                            if x[p] {
                                return true;
                            }
                        }
                        true
                    })
                    .collect()
            }
            // exists k: a and b at k, and b at every j < k
            Ltl::StrongRelease(a, b) => {
                let (x, y) = (self.values(a, holds), self.values(b, holds));
                (0..n)
                    .map(|i| {
                        for p in self.future(i) {
                            if !y[p] {
                                return false;
                            }
                            if x[p] {
                                return true;
                            }
                        }
                        false
                    })
                    .collect()
            }
        }
    }
}
