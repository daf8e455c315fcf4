//! Clauses and programs.
//!
//! A clause pairs a head goal with a body goal. Surface syntax only produces
//! single-atom heads, but the engine builds multi-atom heads internally (a
//! table's root clause `B ::- B` keeps the whole tabled goal as its head), so
//! both sides are goals.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::term::{rename_goal, Goal, Term, VarSupply};

/// A clause `Head ::- Body`, read: the head holds whenever the body does.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    /// Conclusion literals (exactly one for program clauses).
    pub head: Goal,
    /// Condition literals, selected left to right.
    pub body: Goal,
}

impl Clause {
    /// A clause from its parts.
    pub fn new(head: Goal, body: Goal) -> Clause {
        Clause { head, body }
    }

    /// Fresh variant of the clause, all variables drawn from `supply`.
    pub fn rename_apart(&self, supply: &mut VarSupply) -> Clause {
        let mut map = BTreeMap::new();
        Clause {
            head: rename_goal(&self.head, &mut map, supply),
            body: rename_goal(&self.body, &mut map, supply),
        }
    }
}

/// An immutable clause collection indexed by the functor of the first head
/// atom. Source order is preserved and drives resolution order.
#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    index: BTreeMap<(String, usize), Vec<usize>>,
}

impl Program {
    /// A program from clauses in source order.
    pub fn new(clauses: Vec<Clause>) -> Program {
        let mut index: BTreeMap<(String, usize), Vec<usize>> = BTreeMap::new();
        for (i, clause) in clauses.iter().enumerate() {
            if let Some(Term::App(name, args)) = clause.head.first() {
                index
                    .entry((name.clone(), args.len()))
                    .or_default()
                    .push(i);
            }
        }
        Program { clauses, index }
    }

    /// All clauses in source order.
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of clauses.
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    /// Whether the program has no clauses.
    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Indices of clauses whose head functor can match `lit`, in source
    /// order. A variable literal matches every clause.
    pub fn matching(&self, lit: &Term) -> Vec<usize> {
        match lit.functor() {
            Some((name, arity)) => self
                .index
                .get(&(String::from(name), arity))
                .cloned()
                .unwrap_or_default(),
            None => (0..self.clauses.len()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::VarId;
    use alloc::vec;

    #[test]
    fn index_respects_source_order() {
        let c = |name: &str| Clause::new(vec![Term::app(name, vec![Term::Var(VarId(0))])], vec![]);
        let prog = Program::new(vec![c("p"), c("q"), c("p")]);
        let lit = Term::app("p", vec![Term::atom("a")]);
        assert_eq!(prog.matching(&lit), vec![0, 2]);
        assert_eq!(prog.matching(&Term::Var(VarId(9))), vec![0, 1, 2]);
        assert!(prog.matching(&Term::app("p", vec![])).is_empty());
    }

    #[test]
    fn rename_apart_shares_nothing() {
        let clause = Clause::new(
            vec![Term::app("p", vec![Term::Var(VarId(0))])],
            vec![Term::app("q", vec![Term::Var(VarId(0)), Term::Var(VarId(1))])],
        );
        let mut supply = VarSupply::above(clause.head.iter().chain(clause.body.iter()));
        let renamed = clause.rename_apart(&mut supply);
        // Head/body sharing survives renaming.
        assert_eq!(renamed.head[0].functor(), Some(("p", 1)));
        let h = match &renamed.head[0] {
            Term::App(_, args) => args[0].clone(),
            _ => unreachable!(),
        };
        let b = match &renamed.body[0] {
            Term::App(_, args) => args[0].clone(),
            _ => unreachable!(),
        };
        assert_eq!(h, b);
        assert_ne!(h, Term::Var(VarId(0)));
    }
}
