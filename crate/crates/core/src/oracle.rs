//! Reference evaluators for differential testing, deliberately much simpler
//! than the tabled engine.
//!
//! [`sld_solve`] is a bounded depth-first resolver with the same
//! leftmost-non-delayed selection as the engine but no memoization: it is
//! the baseline that loops where the engine terminates. [`datalog_fixpoint`]
//! is a naive bottom-up evaluator for function-free, range-restricted
//! programs, sharing no inference code with either.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::policy::{select_program_literal, Policy};
use crate::program::{Clause, Program};
use crate::term::{
    goal_vars, term_vars, unify, Bindings, Goal, OccursCheck, Term, VarId, VarSupply,
};

/// One success of the depth-first resolver.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SldAnswer {
    /// The computed substitution, restricted to the query's variables.
    pub bindings: Bindings,
    /// Delayed literals left unresolved at success, fully instantiated.
    pub residual: Goal,
}

/// Everything [`sld_solve`] found within its depth bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SldResult {
    /// Successes in the order depth-first search found them.
    pub answers: Vec<SldAnswer>,
    /// False when some branch ran into the depth bound; only then can the
    /// answer list be incomplete.
    pub exhausted: bool,
}

/// Depth-first, program-order resolution with at most `depth` resolution
/// steps per branch. A goal whose literals are all delayed (or exhausted)
/// succeeds with those literals as its residual.
///
/// The first branch to exceed the bound stops the whole search: `exhausted`
/// comes back false together with whatever answers were found up to that
/// point. (Programs with always-unifiable recursive clauses otherwise force
/// the search to visit on the order of 2^depth nodes before reporting the
/// incompleteness it discovered on its very first branch.)
pub fn sld_solve(prog: &Program, policy: &Policy, query: &[Term], depth: usize) -> SldResult {
    let mut solver = Sld {
        prog,
        policy,
        supply: VarSupply::above(query),
        query_vars: goal_vars(query),
        answers: Vec::new(),
        exhausted: true,
    };
    solver.dfs(query, &Bindings::new(), depth);
    SldResult { answers: solver.answers, exhausted: solver.exhausted }
}

struct Sld<'a> {
    prog: &'a Program,
    policy: &'a Policy,
    supply: VarSupply,
    query_vars: Vec<VarId>,
    answers: Vec<SldAnswer>,
    exhausted: bool,
}

impl<'a> Sld<'a> {
    fn dfs(&mut self, goal: &[Term], b: &Bindings, depth_left: usize) {
        match select_program_literal(goal, self.policy, b) {
            None => {
                let mut restricted = Bindings::new();
                for &v in &self.query_vars {
                    let t = b.resolve(&Term::Var(v));
                    if t != Term::Var(v) {
                        restricted.bind(v, t);
                    }
                }
                self.answers.push(SldAnswer {
                    bindings: restricted,
                    residual: b.resolve_goal(goal),
                });
            }
            Some((lit, rest)) => {
                let lit_now = b.resolve(&lit);
                for ci in self.prog.matching(&lit_now) {
                    let clause = &self.prog.clauses()[ci];
                    if clause.head.len() != 1 {
                        continue;
                    }
                    let renamed = clause.rename_apart(&mut self.supply);
                    if let Some(b2) = unify(&lit, &renamed.head[0], b, OccursCheck::On) {
                        if depth_left == 0 {
                            self.exhausted = false;
                            return;
                        }
                        let mut next = renamed.body;
                        next.extend(rest.iter().cloned());
                        self.dfs(&next, &b2, depth_left - 1);
                        if !self.exhausted {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// Why a program is outside the function-free fragment the bottom-up
/// evaluator accepts. Each variant carries the offending clause index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DatalogError {
    /// A clause argument is a compound term.
    FunctionSymbol {
        /// Index of the offending clause.
        clause: usize,
    },
    /// A head variable does not occur in the body.
    NotRangeRestricted {
        /// Index of the offending clause.
        clause: usize,
    },
    /// The clause head has more than one literal.
    MultiAtomHead {
        /// Index of the offending clause.
        clause: usize,
    },
    /// A literal is a variable or headed by a list or operator constructor.
    MalformedLiteral {
        /// Index of the offending clause.
        clause: usize,
    },
}

impl fmt::Display for DatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatalogError::FunctionSymbol { clause } => {
                write!(f, "clause {clause} uses a function symbol; arguments must be constants or variables")
            }
            DatalogError::NotRangeRestricted { clause } => {
                write!(f, "clause {clause} is not range-restricted; every head variable must occur in the body")
            }
            DatalogError::MultiAtomHead { clause } => {
                write!(f, "clause {clause} has a multi-atom head")
            }
            DatalogError::MalformedLiteral { clause } => {
                write!(f, "clause {clause} has a non-relational literal")
            }
        }
    }
}

/// The least model of a function-free, range-restricted program, computed by
/// naive bottom-up iteration. Returns every derivable ground atom.
pub fn datalog_fixpoint(prog: &Program) -> Result<BTreeSet<Term>, DatalogError> {
    for (i, clause) in prog.clauses().iter().enumerate() {
        validate_clause(i, clause)?;
    }
    let mut model: BTreeSet<Term> = BTreeSet::new();
    loop {
        let mut fresh: Vec<Term> = Vec::new();
        for clause in prog.clauses() {
            derive(clause, &model, &mut fresh);
        }
        let before = model.len();
        model.extend(fresh);
        if model.len() == before {
            return Ok(model);
        }
    }
}

fn validate_clause(i: usize, clause: &Clause) -> Result<(), DatalogError> {
    if clause.head.len() != 1 {
        return Err(DatalogError::MultiAtomHead { clause: i });
    }
    for lit in clause.head.iter().chain(&clause.body) {
        match lit {
            Term::Var(_) => return Err(DatalogError::MalformedLiteral { clause: i }),
            Term::App(_, args) => {
                for arg in args {
                    match arg {
                        Term::Var(_) => {}
                        Term::App(_, inner) if inner.is_empty() => {}
                        Term::App(..) => {
                            return Err(DatalogError::FunctionSymbol { clause: i })
                        }
                    }
                }
            }
        }
    }
    let body_vars = goal_vars(&clause.body);
    if term_vars(&clause.head[0]).iter().any(|v| !body_vars.contains(v)) {
        return Err(DatalogError::NotRangeRestricted { clause: i });
    }
    Ok(())
}

/// All ways of matching the clause body against the model, emitting the
/// corresponding head instances.
fn derive(clause: &Clause, model: &BTreeSet<Term>, out: &mut Vec<Term>) {
    let mut env: BTreeMap<VarId, Term> = BTreeMap::new();
    join(clause, 0, model, &mut env, out);
}

fn join(
    clause: &Clause,
    idx: usize,
    model: &BTreeSet<Term>,
    env: &mut BTreeMap<VarId, Term>,
    out: &mut Vec<Term>,
) {
    if idx == clause.body.len() {
        out.push(instantiate(&clause.head[0], env));
        return;
    }
    let pattern = &clause.body[idx];
    for fact in model {
        let mut bound: Vec<VarId> = Vec::new();
        if match_atom(pattern, fact, env, &mut bound) {
            join(clause, idx + 1, model, env, out);
        }
        for v in bound {
            env.remove(&v);
        }
    }
}

/// One-way match of a function-free pattern against a ground atom,
/// extending `env`; records in `bound` the variables it added so the caller
/// can backtrack.
fn match_atom(
    pattern: &Term,
    fact: &Term,
    env: &mut BTreeMap<VarId, Term>,
    bound: &mut Vec<VarId>,
) -> bool {
    match (pattern, fact) {
        (Term::App(f, fa), Term::App(g, ga)) if f == g && fa.len() == ga.len() => {
            for (p, q) in fa.iter().zip(ga) {
                match p {
                    Term::Var(v) => match env.get(v) {
                        Some(t) => {
                            if t != q {
                                return false;
                            }
                        }
                        None => {
                            env.insert(*v, q.clone());
                            bound.push(*v);
                        }
                    },
                    _ => {
                        if p != q {
                            return false;
                        }
                    }
                }
            }
            true
        }
        _ => false,
    }
}

fn instantiate(head: &Term, env: &BTreeMap<VarId, Term>) -> Term {
    match head {
        Term::Var(v) => env.get(v).cloned().expect("range restriction guarantees a binding"),
        Term::App(f, args) => {
            Term::App(f.clone(), args.iter().map(|a| instantiate(a, env)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_query, parse_term};
    use alloc::vec;

    #[test]
    fn trivial_fact_succeeds_exhaustively() {
        let (prog, policy) = parse_program("p ::- [].").unwrap();
        let r = sld_solve(&prog, &policy, &parse_query("p").unwrap(), 5);
        assert!(r.exhausted);
        assert_eq!(r.answers.len(), 1);
        assert!(r.answers[0].bindings.is_empty());
        assert!(r.answers[0].residual.is_empty());
    }

    #[test]
    fn left_recursion_hits_the_bound() {
        let (prog, policy) = parse_program("p ::- [p].").unwrap();
        let r = sld_solve(&prog, &policy, &parse_query("p").unwrap(), 10);
        assert!(!r.exhausted);
        assert!(r.answers.is_empty());
    }

    #[test]
    fn bound_cut_stops_the_search_but_keeps_earlier_answers() {
        // Depth-first order: the fact succeeds at depths 3, 2, 1, then the
        // fact's unification at depth 0 trips the bound and ends the search
        // before the recursive clause at that level is ever tried.
        let (prog, policy) = parse_program("p.\np ::- [p].").unwrap();
        let r = sld_solve(&prog, &policy, &parse_query("p").unwrap(), 3);
        assert!(!r.exhausted);
        assert_eq!(r.answers.len(), 3);

        // With the recursive clause first, the leftmost branch runs straight
        // into the bound, so the fact never gets a chance to succeed.
        let (prog, policy) = parse_program("p ::- [p].\np.").unwrap();
        let r = sld_solve(&prog, &policy, &parse_query("p").unwrap(), 3);
        assert!(!r.exhausted);
        assert!(r.answers.is_empty());
    }

    #[test]
    fn answers_follow_clause_order_and_bind_query_vars() {
        let (prog, policy) = parse_program("q(b).\nq(a).\np(X) ::- [q(X)].").unwrap();
        let query = parse_query("p(Z)").unwrap();
        let r = sld_solve(&prog, &policy, &query, 10);
        assert!(r.exhausted);
        let vals: Vec<Term> = r
            .answers
            .iter()
            .map(|a| a.bindings.resolve(&query[0]))
            .collect();
        assert_eq!(vals, vec![parse_term("p(b)").unwrap(), parse_term("p(a)").unwrap()]);
    }

    #[test]
    fn delayed_literals_become_residual() {
        let src = ":- delay(d(_, Y), [Y]).\nw(X) ::- [d(X, Y)].\nd(a, b).";
        let (prog, policy) = parse_program(src).unwrap();
        let r = sld_solve(&prog, &policy, &parse_query("w(Z)").unwrap(), 10);
        assert!(r.exhausted);
        assert_eq!(r.answers.len(), 1);
        assert_eq!(r.answers[0].residual.len(), 1);
        assert_eq!(r.answers[0].residual[0].functor(), Some(("d", 2)));
        // The instantiated query plus residual is w(A) with residual d(A, B):
        // the query variable is constrained by the residual, not bound.
        let query = parse_query("w(Z)").unwrap();
        let mut full = r.answers[0].bindings.resolve_goal(&query);
        full.extend(r.answers[0].residual.iter().cloned());
        let expected = parse_query("[w(A), d(A, B)]").unwrap();
        assert!(crate::term::variant(&full, &expected));
    }

    #[test]
    fn depth_counts_per_branch_not_globally() {
        // Ten independent shallow branches all fit within a small depth.
        let src = "q(1).\nq(2).\nq(3).\nq(4).\nq(5).\nq(6).\nq(7).\nq(8).\nq(9).\nq(10).";
        let (prog, policy) = parse_program(src).unwrap();
        let r = sld_solve(&prog, &policy, &parse_query("q(N)").unwrap(), 2);
        assert!(r.exhausted);
        assert_eq!(r.answers.len(), 10);
    }

    #[test]
    fn transitive_closure_fixpoint() {
        let src = "edge(a, b).\nedge(b, c).\n\
                   path(X, Y) ::- [edge(X, Y)].\n\
                   path(X, Y) ::- [path(X, Z), edge(Z, Y)].";
        let (prog, _) = parse_program(src).unwrap();
        let model = datalog_fixpoint(&prog).unwrap();
        let paths: BTreeSet<Term> = model
            .iter()
            .filter(|t| t.functor() == Some(("path", 2)))
            .cloned()
            .collect();
        let expect: BTreeSet<Term> = ["path(a,b)", "path(b,c)", "path(a,c)"]
            .iter()
            .map(|s| parse_term(s).unwrap())
            .collect();
        assert_eq!(paths, expect);
        assert_eq!(model.len(), 5);
    }

    #[test]
    fn fixpoint_rejects_non_datalog() {
        let (prog, _) = parse_program("p(f(X)) ::- [q(X)].\nq(a).").unwrap();
        assert_eq!(datalog_fixpoint(&prog), Err(DatalogError::FunctionSymbol { clause: 0 }));
        let (prog, _) = parse_program("p(X, Y) ::- [q(X)].\nq(a).").unwrap();
        assert_eq!(datalog_fixpoint(&prog), Err(DatalogError::NotRangeRestricted { clause: 0 }));
        let (prog, _) = parse_program("[p, q] ::- [r].\nr.").unwrap();
        assert_eq!(datalog_fixpoint(&prog), Err(DatalogError::MultiAtomHead { clause: 0 }));
        let (prog, _) = parse_program("p([a]) ::- [].").unwrap();
        assert_eq!(datalog_fixpoint(&prog), Err(DatalogError::FunctionSymbol { clause: 0 }));
    }

    #[test]
    fn fixpoint_handles_cyclic_graphs() {
        let src = "edge(a, b).\nedge(b, a).\n\
                   path(X, Y) ::- [edge(X, Y)].\n\
                   path(X, Y) ::- [path(X, Z), edge(Z, Y)].";
        let (prog, _) = parse_program(src).unwrap();
        let model = datalog_fixpoint(&prog).unwrap();
        let paths = model.iter().filter(|t| t.functor() == Some(("path", 2))).count();
        // Complete relation over {a, b}.
        assert_eq!(paths, 4);
    }
}
