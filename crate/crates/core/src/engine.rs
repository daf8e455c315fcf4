//! The tabled proof procedure: an agenda of derived clauses, a registry of
//! lemma tables keyed by abstracted goals, clause resolution, and solution
//! propagation between tables.
//!
//! A run starts from the query table holding `G ::- G` and repeatedly removes
//! an item from the agenda:
//!
//! * **Program** items resolve their selected literal against the program's
//!   clauses; each resolvent is tagged by the control rule and queued.
//! * **Table** items suspend on a memoized literal: the literal is
//!   abstracted, looked up in the registry (creating a table and its root
//!   item on a miss), and the suspended clause is registered as a parent of
//!   the callee table, to be resumed by each of the callee's solutions.
//! * **Solution** items are stored on their own table and resumed against
//!   every registered parent.
//!
//! The answer set is the bodies of the query table's solutions: each body is
//! a (possibly empty) residual constraint set, and the corresponding clause
//! head is the query instantiated by that answer.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::policy::{abstract_goal, control, select_program_literal, Policy, Tag};
use crate::program::{Clause, Program};
use crate::term::{
    canonical_key, rename_goal, unify_goals, variant, Bindings, CanonicalKey, Goal, OccursCheck,
    Term, VarSupply,
};

/// Which end of the agenda the next item comes from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum AgendaOrder {
    /// Breadth-first: items are processed in the order they were queued.
    #[default]
    Fifo,
    /// Depth-first: the most recently queued item is processed first.
    Lifo,
}

/// Knobs for one engine run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EngineConfig {
    /// Agenda discipline (answers are order-independent, traces are not).
    pub agenda: AgendaOrder,
    /// Upper bound on item-processings before the run stops with
    /// [`Status::StepLimit`].
    pub max_items: usize,
    /// Occurs-check mode for every unification in the run.
    pub occurs_check: OccursCheck,
    /// When set, a solution that is a variant of one already stored on the
    /// same table is logged but neither stored nor propagated.
    pub dedup_solutions: bool,
    /// When set, items carry the provenance needed by [`derivation_trees`].
    pub record_derivations: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            agenda: AgendaOrder::Fifo,
            max_items: 100_000,
            occurs_check: OccursCheck::On,
            dedup_solutions: true,
            record_derivations: true,
        }
    }
}

/// How a run ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    /// The agenda drained: the result is the full fixpoint.
    Completed,
    /// The item budget ran out; tables may be incomplete.
    StepLimit,
}

/// How an item's clause came to exist; all referenced item ids are smaller
/// than the item's own id.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    /// The initial `G ::- G` of the query table.
    Query,
    /// The `B ::- B` root of a freshly created table.
    TableRoot {
        /// Id of the Table item whose suspension created the table.
        creator: usize,
    },
    /// A resolution of an item's selected literal with a program clause.
    ProgramStep {
        /// Id of the item whose literal was resolved.
        from: usize,
        /// Index of the program clause used.
        clause: usize,
    },
    /// A resumption of a suspended item with a callee solution.
    Completion {
        /// Id of the suspended Table item.
        parent: usize,
        /// Id of the Solution item that resumed it.
        solution: usize,
    },
}

/// What processing decided to do with an item.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ItemTag {
    /// The selected literal was resolved against program clauses.
    Program,
    /// The item suspended on a memoized literal.
    Table {
        /// The suspended-on literal(s), as sent to the callee.
        sub_goal: Goal,
        /// Index of the table the item registered with.
        callee: usize,
    },
    /// The item's body was all-delayed: it is an answer clause.
    Solution {
        /// True for a variant-duplicate that was logged but neither stored
        /// nor propagated (only with `dedup_solutions`).
        suppressed: bool,
    },
}

impl ItemTag {
    /// One-letter code used in traces: `P`, `T`, or `S`.
    pub fn letter(&self) -> char {
        match self {
            ItemTag::Program => 'P',
            ItemTag::Table { .. } => 'T',
            ItemTag::Solution { .. } => 'S',
        }
    }
}

/// One processed agenda item. Ids are 1-based and assigned in processing
/// order, so the item log reads as a trace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ItemRecord {
    /// 1-based id in processing order.
    pub id: usize,
    /// Index of the item's home table.
    pub table: usize,
    /// Ids of the items this one was derived from (empty for the query).
    pub parents: Vec<usize>,
    /// What processing did with the item.
    pub tag: ItemTag,
    /// The derived clause itself.
    pub clause: Clause,
    /// The literal(s) this item acts on: the selected literal of a Program
    /// item or the suspended sub-goal of a Table item.
    pub selected: Option<Goal>,
    /// Present when the run recorded derivations.
    pub provenance: Option<Provenance>,
}

/// A clause suspended on a callee table, waiting for its solutions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParentItem {
    /// Id of the Table item that registered this parent.
    pub id: usize,
    /// Head of the suspended clause.
    pub head: Goal,
    /// The literal(s) sent to the callee; shares variables with `head` and
    /// `rest` exactly as in the suspended clause.
    pub sub_goal: Goal,
    /// Remaining body literals of the suspended clause.
    pub rest: Goal,
    /// The suspended clause's home table (where resolvents belong).
    pub home: usize,
}

/// A memoization table: one abstracted goal, its proven solutions, and the
/// suspended clauses consuming them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LemmaTable {
    /// Position in [`ProofResult::tables`] (table 0 is the query's).
    pub index: usize,
    /// The table's identity: the abstracted goal (the query itself for
    /// table 0, which is exempt from abstraction).
    pub goal: Goal,
    /// `goal`'s variant-identity key, used for table lookup.
    pub key: CanonicalKey,
    /// Ids of stored Solution items, in storage order.
    pub solutions: Vec<usize>,
    /// Suspended clauses waiting on this table, in registration order.
    pub parents: Vec<ParentItem>,
    solution_keys: BTreeSet<CanonicalKey>,
}

/// Everything one engine run produced.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofResult {
    /// All lemma tables, in creation order; table 0 belongs to the query.
    pub tables: Vec<LemmaTable>,
    /// The full item log, in processing order.
    pub items: Vec<ItemRecord>,
    /// Whether the run completed or hit the item budget.
    pub status: Status,
    /// The configuration the run used.
    pub config: EngineConfig,
}

impl ProofResult {
    /// Number of item-processings performed.
    pub fn steps(&self) -> usize {
        self.items.len()
    }

    /// The stored solution clauses of the query table: each head is the
    /// query instantiated by an answer, each body its residual constraints.
    pub fn answers(&self) -> Vec<&Clause> {
        self.tables[0].solutions.iter().map(|&id| &self.items[id - 1].clause).collect()
    }

    /// The answer set: bodies (residual constraint sets) of the query
    /// table's stored solutions.
    pub fn gamma(&self) -> Vec<Goal> {
        self.answers().into_iter().map(|c| c.body.clone()).collect()
    }
}

/// Errors from [`run`] and [`derivation_trees`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EngineError {
    /// [`run`] was given an empty query goal.
    EmptyQuery,
    /// `derivation_trees` needs a run made with `record_derivations`.
    DerivationsNotRecorded,
    /// The query handed to `derivation_trees` is not the one that was run.
    QueryMismatch,
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::EmptyQuery => write!(f, "the query goal is empty"),
            EngineError::DerivationsNotRecorded => {
                write!(f, "the run did not record derivations")
            }
            EngineError::QueryMismatch => {
                write!(f, "the query does not match the run's query table")
            }
        }
    }
}

/// Resolve `c0` on the body subset `on` against `c1`: `c1` is renamed apart
/// (using `supply`, which must dominate `c0`'s variables), `on` is unified
/// element-wise with `c1`'s head goal, and the resolvent keeps `c1`'s body
/// literals first, followed by what remains of `c0`'s body.
pub fn resolve_clause(
    c0: &Clause,
    c1: &Clause,
    on: &[Term],
    supply: &mut VarSupply,
    occurs: OccursCheck,
) -> Option<Clause> {
    if on.is_empty() {
        return None;
    }
    // Remove one occurrence of each selected literal from c0's body,
    // preserving the order of the remainder.
    let mut remaining: Vec<Option<&Term>> = c0.body.iter().map(Some).collect();
    for lit in on {
        let idx = remaining.iter().position(|slot| *slot == Some(lit))?;
        remaining[idx] = None;
    }
    let rest: Vec<&Term> = remaining.into_iter().flatten().collect();

    let c1r = c1.rename_apart(supply);
    let b = unify_goals(on, &c1r.head, &Bindings::new(), occurs)?;
    let head = c0.head.iter().map(|t| b.resolve(t)).collect();
    let mut body: Goal = c1r.body.iter().map(|t| b.resolve(t)).collect();
    body.extend(rest.into_iter().map(|t| b.resolve(t)));
    Some(Clause::new(head, body))
}

struct Pending {
    tag: Tag,
    clause: Clause,
    home: usize,
    parents: Vec<usize>,
    provenance: Provenance,
}

struct Engine<'a> {
    prog: &'a Program,
    policy: &'a Policy,
    cfg: EngineConfig,
    supply: VarSupply,
    tables: Vec<LemmaTable>,
    key_index: BTreeMap<CanonicalKey, usize>,
    items: Vec<ItemRecord>,
    agenda: VecDeque<Pending>,
}

/// Run the proof procedure to completion (or to the item limit).
pub fn run(
    prog: &Program,
    policy: &Policy,
    query: &[Term],
    cfg: EngineConfig,
) -> Result<ProofResult, EngineError> {
    if query.is_empty() {
        return Err(EngineError::EmptyQuery);
    }
    let mut eng = Engine {
        prog,
        policy,
        cfg,
        supply: VarSupply::above(query),
        tables: Vec::new(),
        key_index: BTreeMap::new(),
        items: Vec::new(),
        agenda: VecDeque::new(),
    };
    // The query table holds the query verbatim; abstraction applies only to
    // goals reached through Table steps.
    eng.new_table(query.to_vec(), Vec::new(), Provenance::Query);

    let status = loop {
        if eng.agenda.is_empty() {
            break Status::Completed;
        }
        if eng.items.len() >= cfg.max_items {
            break Status::StepLimit;
        }
        let pending = match cfg.agenda {
            AgendaOrder::Fifo => eng.agenda.pop_front().unwrap(),
            AgendaOrder::Lifo => eng.agenda.pop_back().unwrap(),
        };
        eng.process(pending);
    };

    Ok(ProofResult { tables: eng.tables, items: eng.items, status, config: cfg })
}

impl<'a> Engine<'a> {
    /// Register a table for `goal` and queue its root item `goal ::- goal`.
    /// The root is always a Program item: the first step of every table's
    /// subcomputation is a program resolution, never an immediate suspension
    /// (which would deadlock a self-recursive table).
    fn new_table(&mut self, goal: Goal, root_parents: Vec<usize>, root_provenance: Provenance) -> usize {
        let index = self.tables.len();
        let key = canonical_key(&goal);
        self.key_index.insert(key.clone(), index);
        self.tables.push(LemmaTable {
            index,
            goal: goal.clone(),
            key,
            solutions: Vec::new(),
            parents: Vec::new(),
            solution_keys: BTreeSet::new(),
        });
        self.agenda.push_back(Pending {
            tag: Tag::Program,
            clause: Clause::new(goal.clone(), goal),
            home: index,
            parents: root_parents,
            provenance: root_provenance,
        });
        index
    }

    fn log(
        &mut self,
        id: usize,
        pending: &Pending,
        tag: ItemTag,
        selected: Option<Goal>,
    ) {
        self.items.push(ItemRecord {
            id,
            table: pending.home,
            parents: pending.parents.clone(),
            tag,
            clause: pending.clause.clone(),
            selected,
            provenance: self.cfg.record_derivations.then_some(pending.provenance),
        });
    }

    fn queue(&mut self, clause: Clause, home: usize, parents: Vec<usize>, provenance: Provenance) {
        let tag = control(&clause.body, self.policy, &Bindings::new());
        self.agenda.push_back(Pending { tag, clause, home, parents, provenance });
    }

    fn process(&mut self, pending: Pending) {
        let id = self.items.len() + 1;
        match pending.tag.clone() {
            Tag::Program => {
                let selection =
                    select_program_literal(&pending.clause.body, self.policy, &Bindings::new());
                self.log(id, &pending, ItemTag::Program, selection.as_ref().map(|(s, _)| vec![s.clone()]));
                // A root whose body is entirely delayed selects nothing and
                // produces no resolvents.
                let Some((sel, _)) = selection else { return };
                for ci in self.prog.matching(&sel) {
                    let c1 = &self.prog.clauses()[ci];
                    if c1.head.len() != 1 {
                        continue;
                    }
                    if let Some(resolvent) = resolve_clause(
                        &pending.clause,
                        c1,
                        core::slice::from_ref(&sel),
                        &mut self.supply,
                        self.cfg.occurs_check,
                    ) {
                        self.queue(
                            resolvent,
                            pending.home,
                            vec![id],
                            Provenance::ProgramStep { from: id, clause: ci },
                        );
                    }
                }
            }
            Tag::Table { goal, rest } => {
                let abstracted = abstract_goal(&goal, self.policy);
                let mut map = BTreeMap::new();
                let abstracted = rename_goal(&abstracted, &mut map, &mut self.supply);
                let key = canonical_key(&abstracted);
                let parent = ParentItem {
                    id,
                    head: pending.clause.head.clone(),
                    sub_goal: goal.clone(),
                    rest,
                    home: pending.home,
                };
                match self.key_index.get(&key).copied() {
                    Some(callee) => {
                        self.log(
                            id,
                            &pending,
                            ItemTag::Table { sub_goal: goal.clone(), callee },
                            Some(goal),
                        );
                        self.tables[callee].parents.push(parent.clone());
                        let stored = self.tables[callee].solutions.clone();
                        for sid in stored {
                            self.complete(&parent, sid);
                        }
                    }
                    None => {
                        let callee = self.tables.len();
                        self.log(
                            id,
                            &pending,
                            ItemTag::Table { sub_goal: goal.clone(), callee },
                            Some(goal),
                        );
                        self.new_table(abstracted, vec![id], Provenance::TableRoot { creator: id });
                        self.tables[callee].parents.push(parent);
                    }
                }
            }
            Tag::Solution => {
                let key = clause_key(&pending.clause);
                let home = pending.home;
                let suppressed =
                    self.cfg.dedup_solutions && self.tables[home].solution_keys.contains(&key);
                self.log(id, &pending, ItemTag::Solution { suppressed }, None);
                if suppressed {
                    return;
                }
                self.tables[home].solutions.push(id);
                self.tables[home].solution_keys.insert(key);
                let parents = self.tables[home].parents.clone();
                for parent in &parents {
                    self.complete(parent, id);
                }
            }
        }
    }

    /// Resume a suspended parent with solution item `sid`; the resolvent (if
    /// any) joins the agenda in the parent's home table.
    fn complete(&mut self, parent: &ParentItem, sid: usize) {
        let solution = self.items[sid - 1].clause.clone();
        let mut body = parent.sub_goal.clone();
        body.extend(parent.rest.iter().cloned());
        let suspended = Clause::new(parent.head.clone(), body);
        if let Some(resolvent) = resolve_clause(
            &suspended,
            &solution,
            &parent.sub_goal,
            &mut self.supply,
            self.cfg.occurs_check,
        ) {
            self.queue(
                resolvent,
                parent.home,
                vec![parent.id, sid],
                Provenance::Completion { parent: parent.id, solution: sid },
            );
        }
    }
}

/// Identity of a solution clause up to renaming, with head/body sharing
/// taken into account.
fn clause_key(c: &Clause) -> CanonicalKey {
    let head = crate::term::make_list(c.head.clone(), Term::atom(crate::term::NIL));
    let body = crate::term::make_list(c.body.clone(), Term::atom(crate::term::NIL));
    canonical_key(&[Term::app("::-", vec![head, body])])
}

/// One way a query solution was derived. Leaves are table roots (or the
/// query itself); `Step` applies a program clause to an item's selected
/// literal; `Join` resumes a suspended item with a callee solution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DerivationTree {
    /// A table's initial `B ::- B` clause (or the query's `G ::- G`).
    Root {
        /// Id of the root item.
        item: usize,
    },
    /// A resolution of the premise's selected literal with a program clause.
    Step {
        /// Id of the resulting item.
        item: usize,
        /// Program clause index that was applied.
        clause: usize,
        /// Derivation of the item the clause was applied to.
        premise: alloc::boxed::Box<DerivationTree>,
    },
    /// A resumption of a suspended item with a callee-table solution.
    Join {
        /// Id of the resulting item.
        item: usize,
        /// Derivation of the suspended (consumer) item.
        parent: alloc::boxed::Box<DerivationTree>,
        /// Derivation of the callee solution that resumed it.
        solution: alloc::boxed::Box<DerivationTree>,
    },
}

/// Enumerate the distinct derivations of the query's solutions.
///
/// Every logged query-table solution (including suppressed duplicates) roots
/// one family of trees. With solution dedup on, a resume step recorded
/// against a stored solution stands for a resume against any variant of it
/// the callee logged, so the solution side of a `Join` branches over the
/// whole variant class; re-use of a solution inside its own derivation is
/// excluded (such a replay would not be a finite derivation).
pub fn derivation_trees(
    result: &ProofResult,
    query: &[Term],
) -> Result<Vec<DerivationTree>, EngineError> {
    if !result.config.record_derivations {
        return Err(EngineError::DerivationsNotRecorded);
    }
    if !variant(query, &result.tables[0].goal) {
        return Err(EngineError::QueryMismatch);
    }
    let mut solutions_by_table: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for item in &result.items {
        if matches!(item.tag, ItemTag::Solution { .. }) {
            solutions_by_table.entry(item.table).or_default().push(item.id);
        }
    }
    let ctx = TreeCtx { result, solutions_by_table };
    let mut trees = Vec::new();
    for &sid in ctx.solutions_by_table.get(&0).map(Vec::as_slice).unwrap_or(&[]) {
        let mut stack = vec![sid];
        trees.extend(ctx.unwind(sid, &mut stack));
    }
    Ok(trees)
}

struct TreeCtx<'a> {
    result: &'a ProofResult,
    solutions_by_table: BTreeMap<usize, Vec<usize>>,
}

impl<'a> TreeCtx<'a> {
    fn unwind(&self, id: usize, stack: &mut Vec<usize>) -> Vec<DerivationTree> {
        let item = &self.result.items[id - 1];
        match item.provenance.expect("derivations were recorded") {
            Provenance::Query | Provenance::TableRoot { .. } => {
                vec![DerivationTree::Root { item: id }]
            }
            Provenance::ProgramStep { from, clause } => self
                .unwind(from, stack)
                .into_iter()
                .map(|premise| DerivationTree::Step {
                    item: id,
                    clause,
                    premise: alloc::boxed::Box::new(premise),
                })
                .collect(),
            Provenance::Completion { parent, solution } => {
                let parent_trees = self.unwind(parent, stack);
                let mut out = Vec::new();
                for member in self.class_members(solution) {
                    if stack.contains(&member) {
                        continue;
                    }
                    stack.push(member);
                    let solution_trees = self.unwind(member, stack);
                    stack.pop();
                    for st in &solution_trees {
                        for pt in &parent_trees {
                            out.push(DerivationTree::Join {
                                item: id,
                                parent: alloc::boxed::Box::new(pt.clone()),
                                solution: alloc::boxed::Box::new(st.clone()),
                            });
                        }
                    }
                }
                out
            }
        }
    }

    /// The solution items a recorded resume stands for: with dedup on, all
    /// logged variants of the referenced solution in its table; otherwise
    /// exactly the referenced solution (nothing was suppressed).
    fn class_members(&self, solution: usize) -> Vec<usize> {
        if !self.result.config.dedup_solutions {
            return vec![solution];
        }
        let item = &self.result.items[solution - 1];
        let key = clause_key(&item.clause);
        self.solutions_by_table
            .get(&item.table)
            .map(Vec::as_slice)
            .unwrap_or(&[])
            .iter()
            .copied()
            .filter(|&sid| clause_key(&self.result.items[sid - 1].clause) == key)
            .collect()
    }
}
