//! Control policies: which literals are memoized, which are delayed, and how
//! tabled goals are abstracted.
//!
//! All three checks are trial-based: a pattern is renamed apart and unified
//! against the candidate literal, and the trial bindings are thrown away, so
//! no check ever instantiates the goal it inspects. In particular a plain
//! variable argument *does* count as delayed when the pattern wants a
//! compound there — unification could still instantiate it either way.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::term::{
    canonical_key, rename_term, term_vars, unify, Bindings, Goal, OccursCheck, Term, VarId,
    VarSupply,
};

/// `pattern` delays a literal it unifies with, as long as every variable in
/// `unbound` is still a variable after the trial unification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DelayGuard {
    /// Literal shape this guard applies to.
    pub pattern: Term,
    /// Pattern variables that must still be unbound for the literal to wait.
    pub unbound: Vec<VarId>,
}

/// Rewrites tabled goals before table lookup. `to` must be `from` with zero
/// or more subterms replaced by fresh, unshared variables: abstraction may
/// drop bindings, never add them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbstractionTemplate {
    /// Goal shape to generalize.
    pub from: Goal,
    /// Generalized shape; same as `from` with some subterms turned into
    /// fresh variables.
    pub to: Goal,
}

/// Everything that steers the engine for one program: memoized literal
/// patterns, delay guards, and goal abstraction templates.
#[derive(Clone, Default, Debug)]
pub struct Policy {
    /// Literals unifying with any of these patterns go through lemma tables.
    pub memo: Vec<Term>,
    /// Literals matching these guards wait instead of being selected.
    pub delays: Vec<DelayGuard>,
    /// Applied to tabled goals before table lookup.
    pub abstractions: Vec<AbstractionTemplate>,
}

/// Rejection reasons for ill-formed abstraction templates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TemplateError {
    /// The two sides have different numbers of literals.
    LengthMismatch,
    /// `to` differs from `from` at a position where it is not a variable.
    NotAVariable,
    /// The replacement variable already occurs in `from` or occurs more than
    /// once in `to`; either would add an equality instead of dropping one.
    SharedReplacement(VarId),
}

impl fmt::Display for TemplateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateError::LengthMismatch => {
                write!(f, "abstraction sides must have the same number of literals")
            }
            TemplateError::NotAVariable => write!(
                f,
                "abstraction may only replace subterms by fresh variables"
            ),
            TemplateError::SharedReplacement(_) => write!(
                f,
                "abstraction replacement variables must be fresh and unshared"
            ),
        }
    }
}

/// Check the drop-only condition on an abstraction template.
pub fn validate_template(from: &[Term], to: &[Term]) -> Result<(), TemplateError> {
    if from.len() != to.len() {
        return Err(TemplateError::LengthMismatch);
    }
    let from_vars: Vec<VarId> = crate::term::goal_vars(from);
    let mut counts: BTreeMap<VarId, usize> = BTreeMap::new();
    for t in to {
        count_vars(t, &mut counts);
    }
    for (f, t) in from.iter().zip(to) {
        check_pair(f, t, &from_vars, &counts)?;
    }
    Ok(())
}

fn count_vars(t: &Term, counts: &mut BTreeMap<VarId, usize>) {
    match t {
        Term::Var(v) => *counts.entry(*v).or_insert(0) += 1,
        Term::App(_, args) => {
            for a in args {
                count_vars(a, counts);
            }
        }
    }
}

fn check_pair(
    from: &Term,
    to: &Term,
    from_vars: &[VarId],
    counts: &BTreeMap<VarId, usize>,
) -> Result<(), TemplateError> {
    if from == to {
        return Ok(());
    }
    match (from, to) {
        (Term::App(f, fa), Term::App(g, ga)) if f == g && fa.len() == ga.len() => {
            for (x, y) in fa.iter().zip(ga) {
                check_pair(x, y, from_vars, counts)?;
            }
            Ok(())
        }
        (_, Term::Var(v)) => {
            if from_vars.contains(v) || counts.get(v).copied().unwrap_or(0) != 1 {
                Err(TemplateError::SharedReplacement(*v))
            } else {
                Ok(())
            }
        }
        _ => Err(TemplateError::NotAVariable),
    }
}

fn trial_unify(lit: &Term, pattern: &Term) -> Option<(Bindings, BTreeMap<VarId, VarId>)> {
    let mut supply = VarSupply::above([lit, pattern]);
    let mut map = BTreeMap::new();
    let renamed = rename_term(pattern, &mut map, &mut supply);
    unify(lit, &renamed, &Bindings::new(), OccursCheck::On).map(|b| (b, map))
}

/// Does `lit` (resolved under `b`) match a delay guard with all guard
/// variables still unbound after the trial unification?
pub fn is_delayed(lit: &Term, policy: &Policy, b: &Bindings) -> bool {
    let lit = b.resolve(lit);
    policy.delays.iter().any(|guard| {
        match trial_unify(&lit, &guard.pattern) {
            None => false,
            Some((trial, map)) => guard.unbound.iter().all(|v| {
                let renamed = Term::Var(map[v]);
                trial.walk(&renamed).is_var()
            }),
        }
    })
}

/// Does `lit` (resolved under `b`) unify with some memo pattern? Bindings
/// from the trial are discarded.
pub fn matches_memo(lit: &Term, policy: &Policy, b: &Bindings) -> bool {
    let lit = b.resolve(lit);
    policy
        .memo
        .iter()
        .any(|pat| trial_unify(&lit, pat).is_some())
}

/// How the engine files a derived clause.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tag {
    /// Resolve the selected literal against program clauses.
    Program,
    /// Suspend on the leftmost memo-matching literal.
    Table {
        /// The memo-matching literal, as a one-literal goal.
        goal: Goal,
        /// The remaining body, resumed once the callee produces solutions.
        rest: Goal,
    },
    /// Nothing left to run: the clause is an answer of its table.
    Solution,
}

/// The fixed control rule: leftmost memo literal wins, otherwise a program
/// step if any literal is runnable, otherwise the clause is a solution (its
/// remaining literals are all delayed).
pub fn control(body: &[Term], policy: &Policy, b: &Bindings) -> Tag {
    for (i, lit) in body.iter().enumerate() {
        if matches_memo(lit, policy, b) {
            let mut rest = body.to_vec();
            let goal = alloc::vec![rest.remove(i)];
            return Tag::Table { goal, rest };
        }
    }
    if body.iter().any(|lit| !is_delayed(lit, policy, b)) {
        Tag::Program
    } else {
        Tag::Solution
    }
}

/// The fixed selection rule: the leftmost non-delayed literal, with the rest
/// of the body. `None` when the body is empty or everything is delayed.
pub fn select_program_literal(
    body: &[Term],
    policy: &Policy,
    b: &Bindings,
) -> Option<(Term, Goal)> {
    let i = body.iter().position(|lit| !is_delayed(lit, policy, b))?;
    let mut rest = body.to_vec();
    let lit = rest.remove(i);
    Some((lit, rest))
}

/// Match `goal` one-way against `from`: succeeds when `goal` is an instance
/// of `from`, binding `from`'s variables only.
fn match_instance(from: &[Term], goal: &[Term]) -> Option<BTreeMap<VarId, Term>> {
    if from.len() != goal.len() {
        return None;
    }
    let mut map = BTreeMap::new();
    for (p, g) in from.iter().zip(goal) {
        if !match_one(p, g, &mut map) {
            return None;
        }
    }
    Some(map)
}

fn match_one(pattern: &Term, goal: &Term, map: &mut BTreeMap<VarId, Term>) -> bool {
    match pattern {
        Term::Var(v) => match map.get(v) {
            Some(bound) => bound == goal,
            None => {
                map.insert(*v, goal.clone());
                true
            }
        },
        Term::App(f, fa) => match goal {
            Term::App(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga).all(|(p, q)| match_one(p, q, map))
            }
            _ => false,
        },
    }
}

fn instantiate(
    to: &Term,
    map: &BTreeMap<VarId, Term>,
    fresh: &mut BTreeMap<VarId, VarId>,
    supply: &mut VarSupply,
) -> Term {
    match to {
        Term::Var(v) => match map.get(v) {
            Some(t) => t.clone(),
            None => Term::Var(*fresh.entry(*v).or_insert_with(|| supply.fresh())),
        },
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| instantiate(a, map, fresh, supply))
                .collect(),
        ),
    }
}

/// Abstract a goal for table lookup: apply the first matching template, then
/// repeat until the result is stable up to renaming. Matching is one-way —
/// the goal must be an instance of the `from` side — so the result is always
/// the input with some bindings dropped, never anything more specific.
pub fn abstract_goal(goal: &[Term], policy: &Policy) -> Goal {
    let mut template_terms: Vec<&Term> = Vec::new();
    for t in &policy.abstractions {
        template_terms.extend(t.from.iter().chain(t.to.iter()));
    }
    let mut supply = VarSupply::above(goal.iter().chain(template_terms));
    let mut cur: Goal = goal.to_vec();
    loop {
        let next = policy.abstractions.iter().find_map(|template| {
            match_instance(&template.from, &cur).map(|map| {
                let mut fresh = BTreeMap::new();
                template
                    .to
                    .iter()
                    .map(|t| instantiate(t, &map, &mut fresh, &mut supply))
                    .collect::<Goal>()
            })
        });
        match next {
            None => return cur,
            Some(next) => {
                if canonical_key(&next) == canonical_key(&cur) {
                    return cur;
                }
                cur = next;
            }
        }
    }
}

/// Convenience used by the parser: the guard variables listed for a delay
/// pattern must occur in the pattern.
pub fn guard_vars_in_pattern(pattern: &Term, unbound: &[VarId]) -> bool {
    let vars = term_vars(pattern);
    unbound.iter().all(|v| vars.contains(v))
}
