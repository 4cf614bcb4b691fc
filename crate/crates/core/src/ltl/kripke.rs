/// A finite, total state graph with atom labelling: what the checker needs
/// from a system.
pub trait Kripke<A> {
    fn state_count(&self) -> usize;
    fn initial_states(&self) -> &[usize];
    fn successors(&self, s: usize) -> &[usize];
    fn holds(&self, s: usize, atom: &A) -> bool;
}

/// Explicit graph whose atoms are bit positions in a per-state label word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitKripke {
    pub initials: Vec<usize>,
    pub succ: Vec<Vec<usize>>,
    /// Atom `i` holds in state `s` iff bit `i` of `labels[s]` is set.
    pub labels: Vec<u64>,
}

impl Kripke<usize> for ExplicitKripke {
    fn state_count(&self) -> usize {
        self.succ.len()
    }

    fn initial_states(&self) -> &[usize] {
        &self.initials
    }

    fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    fn holds(&self, s: usize, atom: &usize) -> bool {
        self.labels[s] >> atom & 1 == 1
    }
}
