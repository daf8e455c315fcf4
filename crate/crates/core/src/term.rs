//! First-order terms, substitutions, and variant-canonical keys.
//!
//! A term is a variable or a functor applied to arguments; atoms and integers
//! are zero-arity applications. Substitutions ([`Bindings`]) are extended
//! functionally: `unify` returns a new map on success and leaves the input
//! untouched on failure, so a failed attempt needs no undo step.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// List constructor functor (`[H|T]` sugar).
pub const CONS: &str = ".";
/// Empty-list atom.
pub const NIL: &str = "[]";

/// Identifier of a logic variable. Fresh ids come from a [`VarSupply`]; two
/// renamings drawn from the same supply never share variables.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(pub u64);

/// A first-order term: a variable or a functor applied to arguments.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    /// A logic variable.
    Var(VarId),
    /// A functor applied to zero or more arguments; atoms have zero.
    App(String, Vec<Term>),
}

impl Term {
    /// A zero-arity application.
    pub fn atom(name: &str) -> Term {
        Term::App(String::from(name), Vec::new())
    }

    /// An application of `name` to `args`.
    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(String::from(name), args)
    }

    /// Whether this term is a variable.
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Functor name and arity; `None` for a variable.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Var(_) => None,
            Term::App(name, args) => Some((name, args.len())),
        }
    }
}

/// A goal: an ordered list of literals, selected left to right.
pub type Goal = Vec<Term>;

/// Monotone source of fresh variable ids.
#[derive(Clone, Default, Debug)]
pub struct VarSupply {
    next: u64,
}

impl VarSupply {
    /// A supply starting at id 0.
    pub fn new() -> VarSupply {
        VarSupply { next: 0 }
    }

    /// A supply guaranteed not to collide with any variable in `terms`.
    pub fn above<'a>(terms: impl IntoIterator<Item = &'a Term>) -> VarSupply {
        let mut next = 0;
        for t in terms {
            walk_ids(t, &mut |VarId(n)| {
                if n + 1 > next {
                    next = n + 1;
                }
            });
        }
        VarSupply { next }
    }

    /// The next unused variable id.
    pub fn fresh(&mut self) -> VarId {
        let id = VarId(self.next);
        self.next += 1;
        id
    }
}

fn walk_ids(t: &Term, f: &mut impl FnMut(VarId)) {
    match t {
        Term::Var(v) => f(*v),
        Term::App(_, args) => {
            for a in args {
                walk_ids(a, f);
            }
        }
    }
}

/// Distinct variables of a term, in first-occurrence order.
pub fn term_vars(t: &Term) -> Vec<VarId> {
    let mut out = Vec::new();
    walk_ids(t, &mut |v| {
        if !out.contains(&v) {
            out.push(v);
        }
    });
    out
}

/// Distinct variables of a goal, in first-occurrence order.
pub fn goal_vars(goal: &[Term]) -> Vec<VarId> {
    let mut out = Vec::new();
    for t in goal {
        walk_ids(t, &mut |v| {
            if !out.contains(&v) {
                out.push(v);
            }
        });
    }
    out
}

/// Whether to reject bindings that would build a cyclic term. The default is
/// on; switching it off mirrors the usual Prolog behaviour.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum OccursCheck {
    /// Reject cyclic bindings (sound unification).
    #[default]
    On,
    /// Allow cyclic bindings.
    Off,
}

/// A substitution: a map from variables to terms, extended by [`unify`].
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Bindings {
    map: BTreeMap<VarId, Term>,
}

impl Bindings {
    /// The empty substitution.
    pub fn new() -> Bindings {
        Bindings::default()
    }

    /// Whether no variable is bound.
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Number of bound variables.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// The binding of `v`, if any (one step, not transitive).
    pub fn lookup(&self, v: VarId) -> Option<&Term> {
        self.map.get(&v)
    }

    /// Bind `v` to `t`, replacing any previous binding.
    pub fn bind(&mut self, v: VarId, t: Term) {
        self.map.insert(v, t);
    }

    /// All bindings in ascending variable order.
    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Term)> {
        self.map.iter().map(|(v, t)| (*v, t))
    }

    /// Follow variable links until an unbound variable or an application.
    /// Does not descend into arguments.
    pub fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Substitute transitively through the whole term. On acyclic bindings
    /// (guaranteed whenever the occurs check is on) resolution is idempotent:
    /// resolving an already resolved term is the identity. A cyclic binding
    /// (possible with the occurs check off) still resolves to a *finite*
    /// term — expansion stops at the variable that closes the cycle — but
    /// each pass unrolls one more layer, so no fixed point is reached.
    pub fn resolve(&self, t: &Term) -> Term {
        self.resolve_guarded(t, &mut Vec::new())
    }

    fn resolve_guarded(&self, t: &Term, path: &mut Vec<VarId>) -> Term {
        let mut followed = 0;
        let mut cur = t;
        let result = loop {
            match cur {
                Term::Var(v) => {
                    if path.contains(v) {
                        break Term::Var(*v);
                    }
                    match self.map.get(v) {
                        Some(next) => {
                            path.push(*v);
                            followed += 1;
                            cur = next;
                        }
                        None => break Term::Var(*v),
                    }
                }
                Term::App(f, args) => {
                    break Term::App(
                        f.clone(),
                        args.iter().map(|a| self.resolve_guarded(a, path)).collect(),
                    );
                }
            }
        };
        path.truncate(path.len() - followed);
        result
    }

    /// [`Bindings::resolve`] applied to every literal of a goal.
    pub fn resolve_goal(&self, goal: &[Term]) -> Goal {
        goal.iter().map(|t| self.resolve(t)).collect()
    }
}

fn occurs_in(v: VarId, t: &Term, b: &Bindings) -> bool {
    match b.walk(t) {
        Term::Var(w) => *w == v,
        Term::App(_, args) => args.iter().any(|a| occurs_in(v, a, b)),
    }
}

/// Most general unifier of `a` and `b` as an extension of `base`, or `None`
/// on clash (or on occurs-check failure when enabled). `base` is never
/// modified, so failure leaves no observable bindings.
pub fn unify(a: &Term, b: &Term, base: &Bindings, occurs: OccursCheck) -> Option<Bindings> {
    let mut out = base.clone();
    if unify_into(a, b, &mut out, occurs) {
        Some(out)
    } else {
        None
    }
}

/// Element-wise unification of two equal-length goals under one accumulated
/// substitution.
pub fn unify_goals(
    xs: &[Term],
    ys: &[Term],
    base: &Bindings,
    occurs: OccursCheck,
) -> Option<Bindings> {
    if xs.len() != ys.len() {
        return None;
    }
    let mut out = base.clone();
    for (x, y) in xs.iter().zip(ys) {
        if !unify_into(x, y, &mut out, occurs) {
            return None;
        }
    }
    Some(out)
}

fn unify_into(a: &Term, b: &Term, bnd: &mut Bindings, occurs: OccursCheck) -> bool {
    let ta = bnd.walk(a).clone();
    let tb = bnd.walk(b).clone();
    match (ta, tb) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs == OccursCheck::On && occurs_in(x, &t, bnd) {
                return false;
            }
            bnd.bind(x, t);
            true
        }
        (Term::App(f, fa), Term::App(g, ga)) => {
            if f != g || fa.len() != ga.len() {
                return false;
            }
            for (x, y) in fa.iter().zip(ga.iter()) {
                if !unify_into(x, y, bnd, occurs) {
                    return false;
                }
            }
            true
        }
    }
}

/// Copy of `t` with every variable replaced by a fresh one from `supply`,
/// consistently across one `map`. Share the map to rename several terms
/// apart together.
pub fn rename_term(t: &Term, map: &mut BTreeMap<VarId, VarId>, supply: &mut VarSupply) -> Term {
    match t {
        Term::Var(v) => {
            let id = *map.entry(*v).or_insert_with(|| supply.fresh());
            Term::Var(id)
        }
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| rename_term(a, map, supply)).collect(),
        ),
    }
}

/// [`rename_term`] applied to every literal of a goal under one shared map.
pub fn rename_goal(
    goal: &[Term],
    map: &mut BTreeMap<VarId, VarId>,
    supply: &mut VarSupply,
) -> Goal {
    goal.iter().map(|t| rename_term(t, map, supply)).collect()
}

/// Structural key identifying a goal up to consistent renaming: variables are
/// replaced by first-occurrence ordinals, so two goals have equal keys exactly
/// when they are variants of one another.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalKey(Goal);

/// The [`CanonicalKey`] of a goal.
pub fn canonical_key(goal: &[Term]) -> CanonicalKey {
    let mut map: BTreeMap<VarId, u64> = BTreeMap::new();
    CanonicalKey(goal.iter().map(|t| canonicalize(t, &mut map)).collect())
}

fn canonicalize(t: &Term, map: &mut BTreeMap<VarId, u64>) -> Term {
    match t {
        Term::Var(v) => {
            let next = map.len() as u64;
            Term::Var(VarId(*map.entry(*v).or_insert(next)))
        }
        Term::App(f, args) => {
            Term::App(f.clone(), args.iter().map(|a| canonicalize(a, map)).collect())
        }
    }
}

/// Two goals are variants when one is a consistent renaming of the other.
pub fn variant(a: &[Term], b: &[Term]) -> bool {
    canonical_key(a) == canonical_key(b)
}

/// Build a list term from elements and a tail (usually the `[]` atom).
pub fn make_list(items: Vec<Term>, tail: Term) -> Term {
    let mut out = tail;
    for item in items.into_iter().rev() {
        out = Term::App(String::from(CONS), alloc::vec![item, out]);
    }
    out
}

/// Elements of a proper list term, or `None` if the term is not one.
pub fn proper_list(t: &Term) -> Option<Vec<Term>> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::App(f, args) if f == NIL && args.is_empty() => return Some(out),
            Term::App(f, args) if f == CONS && args.len() == 2 => {
                out.push(args[0].clone());
                cur = &args[1];
            }
            _ => return None,
        }
    }
}
