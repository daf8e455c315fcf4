//! End-to-end acceptance checks for the engine and its bundled grammars.
//!
//! Each test is one acceptance criterion, so `cargo test --test acceptance`
//! prints one pass/fail line per criterion. The tests drive both the library
//! API (for structural assertions) and the installed binary (for the
//! command-line behaviour and wall-clock bounds).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use lemtab_core::engine::{
    derivation_trees, run, AgendaOrder, EngineConfig, ItemTag, ProofResult, Status,
};
use lemtab_core::grammars::load_bundled;
use lemtab_core::oracle::{datalog_fixpoint, sld_solve};
use lemtab_core::parser::{parse_program, parse_query};
use lemtab_core::policy::{abstract_goal, Policy};
use lemtab_core::printer::{format_clause, format_goal};
use lemtab_core::program::{Clause, Program};
use lemtab_core::term::{
    canonical_key, term_vars, unify, variant, Bindings, CanonicalKey, Goal, OccursCheck, Term,
};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TWO_WORD_QUERY: &str = "x(C,[lijkt_te,ontwijken],R)";
const SENTENCE_QUERY: &str = "x(s,['Frits',opzettelijk,'Marie',lijkt_te,ontwijken],[])";

/// The expected trace of the two-word query, as (table goal, tag, clause)
/// triples. Item numbering is agenda-order dependent, so the comparison is
/// multiset equality of these triples, each side canonicalised by printing
/// with fresh variable names.
const TWO_WORD_TRACE: &[(&str, char, &str)] = &[
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'P',
        "x(A,[lijkt_te,ontwijken],B) ::- [x(A,[lijkt_te,ontwijken],B)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'T',
        "x(A,[lijkt_te,ontwijken],B) ::- [x(A/C,[lijkt_te,ontwijken],D), x(C,D,B)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'T',
        "x(A,[lijkt_te,ontwijken],B) ::- [x(C,[lijkt_te,ontwijken],D), x(A\\C,D,B)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'P',
        "x(A,[lijkt_te,ontwijken],[ontwijken]) ::- [lex(lijkt_te,A)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'S',
        "x(A/#B,[lijkt_te,ontwijken],[ontwijken]) ::- [add_adjuncts(s\\np/(s\\np),C), division(C,A/B)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'T',
        "x(A,[lijkt_te,ontwijken],B) ::- [add_adjuncts(s\\np/(s\\np),C), division(C,A/D), x(#D,[ontwijken],B)]",
    ),
    (
        "x(A,[ontwijken],B)",
        'P',
        "x(A,[ontwijken],B) ::- [x(A,[ontwijken],B)]",
    ),
    (
        "x(A,[ontwijken],B)",
        'T',
        "x(A,[ontwijken],B) ::- [x(A/C,[ontwijken],D), x(C,D,B)]",
    ),
    (
        "x(A,[ontwijken],B)",
        'T',
        "x(A,[ontwijken],B) ::- [x(C,[ontwijken],D), x(A\\C,D,B)]",
    ),
    (
        "x(A,[ontwijken],B)",
        'P',
        "x(A,[ontwijken],[]) ::- [lex(ontwijken,A)]",
    ),
    (
        "x(A,[ontwijken],B)",
        'S',
        "x(#A,[ontwijken],[]) ::- [add_adjuncts(s\\np\\np,A)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'S',
        "x(A,[lijkt_te,ontwijken],[]) ::- [add_adjuncts(s\\np\\np,B), add_adjuncts(s\\np/(s\\np),C), division(C,A/B)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'T',
        "x(A,[lijkt_te,ontwijken],B) ::- [add_adjuncts(s\\np\\np,C), add_adjuncts(s\\np/(s\\np),D), division(D,A/E/C), x(E,[],B)]",
    ),
    ("x(A,[],B)", 'P', "x(A,[],B) ::- [x(A,[],B)]"),
    ("x(A,[],B)", 'T', "x(A,[],B) ::- [x(A/C,[],D), x(C,D,B)]"),
    ("x(A,[],B)", 'T', "x(A,[],B) ::- [x(C,[],D), x(A\\C,D,B)]"),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'T',
        "x(A,[lijkt_te,ontwijken],B) ::- [add_adjuncts(s\\np\\np,C), add_adjuncts(s\\np/(s\\np),D), division(D,E/C), x(A\\E,[],B)]",
    ),
    (
        "x(A,[ontwijken],B)",
        'T',
        "x(A,[ontwijken],B) ::- [add_adjuncts(s\\np\\np,C), x(A\\#C,[],B)]",
    ),
    (
        "x(A,[lijkt_te,ontwijken],B)",
        'T',
        "x(A,[lijkt_te,ontwijken],B) ::- [add_adjuncts(s\\np/(s\\np),C), division(C,D/E), x(A\\(D/#E),[ontwijken],B)]",
    ),
];

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lemtab"))
}

fn parse_clause(src: &str) -> Clause {
    let (prog, _) = parse_program(&format!("{src}."))
        .unwrap_or_else(|e| panic!("bad clause in expected data: {e}\n{src}"));
    prog.clauses()[0].clone()
}

/// Canonical printed form of a (table goal, tag, clause) triple; printing
/// with a fresh environment renames variables to first-occurrence order, so
/// variants map to the same string.
fn triple_string(goal: &[Term], tag: char, clause: &Clause) -> String {
    format!("{} | {} | {}", format_goal(goal), tag, format_clause(clause))
}

fn answer_key(clause: &Clause) -> CanonicalKey {
    let mut combined = clause.head.clone();
    combined.extend(clause.body.iter().cloned());
    canonical_key(&combined)
}

fn dutch() -> (Program, Policy) {
    load_bundled("dutch_cg").expect("dutch_cg is bundled")
}

/// Is a trace line an item line (`<table>.<id>[...] ...`)? Returns the table
/// index if so.
fn trace_table(line: &str) -> Option<usize> {
    let head = line.split_once('[')?.0;
    let (table, id) = head.split_once('.')?;
    let table: usize = table.parse().ok()?;
    let _: usize = id.parse().ok()?;
    Some(table)
}

#[test]
fn criterion_1_two_word_query_reproduces_the_reference_trace() {
    // Command-line run: wall-clock bound, item and table counts.
    let t0 = Instant::now();
    let out = binary()
        .args(["prove", "dutch_cg", TWO_WORD_QUERY, "--trace"])
        .output()
        .expect("binary runs");
    let elapsed = t0.elapsed();
    assert!(out.status.success(), "prove failed: {out:?}");
    assert!(elapsed < Duration::from_secs(1), "trace took {elapsed:?}, bound is 1s");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let item_tables: Vec<usize> = stdout.lines().filter_map(trace_table).collect();
    assert_eq!(item_tables.len(), 19, "expected 19 trace items:\n{stdout}");
    let distinct: BTreeSet<usize> = item_tables.iter().copied().collect();
    assert_eq!(distinct.len(), 3, "expected 3 tables:\n{stdout}");

    // Library run: the multiset of (table goal, tag, clause) triples is
    // pinned, up to variable renaming and item numbering.
    let (prog, policy) = dutch();
    let query = parse_query(TWO_WORD_QUERY).unwrap();
    let result = run(&prog, &policy, &query, EngineConfig::default()).unwrap();
    assert_eq!(result.status, Status::Completed);
    assert_eq!(result.items.len(), 19);
    assert_eq!(result.tables.len(), 3);

    let mut actual: Vec<String> = result
        .items
        .iter()
        .map(|it| triple_string(&result.tables[it.table].goal, it.tag.letter(), &it.clause))
        .collect();
    let mut expected: Vec<String> = TWO_WORD_TRACE
        .iter()
        .map(|(goal, tag, clause)| {
            triple_string(&parse_query(goal).unwrap(), *tag, &parse_clause(clause))
        })
        .collect();
    actual.sort();
    expected.sort();
    assert_eq!(actual, expected, "trace triples differ from the reference");

    // The query table stores exactly one solution whose residual body is the
    // fully reduced category constraint set.
    let target_body = parse_query(
        "[add_adjuncts(s\\np\\np,B), add_adjuncts(s\\np/(s\\np),C), division(C,A/B)]",
    )
    .unwrap();
    let matching = result
        .answers()
        .iter()
        .filter(|c| variant(&c.body, &target_body))
        .count();
    assert_eq!(matching, 1, "query table should store exactly one such solution");

    // The table for the fully consumed word list has no solutions.
    let empty_goal = parse_query("x(A,[],B)").unwrap();
    let empty_table = result
        .tables
        .iter()
        .find(|t| variant(&t.goal, &empty_goal))
        .expect("a table for the empty word list exists");
    assert!(empty_table.solutions.is_empty());

    println!("criterion 1: two-word trace matches the reference (19 items, 3 tables, <1s)");
}

#[test]
fn criterion_2_sentence_query_yields_exactly_two_readings() {
    // Command-line run with the wall-clock bound.
    let t0 = Instant::now();
    let out = binary()
        .args(["prove", "dutch_cg", SENTENCE_QUERY, "--derivations"])
        .output()
        .expect("binary runs");
    let elapsed = t0.elapsed();
    assert!(out.status.success(), "prove failed: {out:?}");
    assert!(elapsed < Duration::from_secs(5), "sentence took {elapsed:?}, bound is 5s");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.lines().any(|l| l.trim() == "2 derivations"),
        "expected a `2 derivations` line:\n{stdout}"
    );

    // Library run: at least one answer with no residual constraints, and
    // exactly two distinct derivation trees behind the answers.
    let (prog, policy) = dutch();
    let query = parse_query(SENTENCE_QUERY).unwrap();
    let result = run(&prog, &policy, &query, EngineConfig::default()).unwrap();
    assert_eq!(result.status, Status::Completed);
    assert!(
        result.answers().iter().any(|c| c.body.is_empty()),
        "expected an answer with an empty residual constraint set"
    );
    let trees = derivation_trees(&result, &query).unwrap();
    assert_eq!(trees.len(), 2, "expected exactly two derivation trees");

    println!("criterion 2: sentence query has one constraint-free answer and 2 readings (<5s)");
}

#[test]
fn criterion_3_engine_terminates_where_bounded_depth_first_search_does_not() {
    let (prog, policy) = dutch();
    let query = parse_query(TWO_WORD_QUERY).unwrap();

    let bounded = sld_solve(&prog, &policy, &query, 50);
    assert!(
        !bounded.exhausted,
        "depth-first search at depth 50 must hit its bound on the left-recursive grammar"
    );

    let result = run(&prog, &policy, &query, EngineConfig::default()).unwrap();
    assert_eq!(result.status, Status::Completed);
    assert!(
        result.steps() < 10_000,
        "engine took {} item-processings, bound is 10000",
        result.steps()
    );

    println!(
        "criterion 3: depth-50 search is cut off while the engine completes in {} steps",
        result.steps()
    );
}

/// A random function-free, range-restricted program over at most 3
/// predicates, with at most 10 ground facts and 4 rules, every predicate
/// memoized and nothing delayed.
fn random_ground_program(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let consts = ["a", "b", "c", "d"];
    let n_preds = rng.gen_range(1..=3);
    let preds: Vec<(String, usize)> =
        (0..n_preds).map(|i| (format!("p{i}"), rng.gen_range(1..=2))).collect();
    let mut src = String::new();
    for _ in 0..rng.gen_range(1..=10) {
        let (name, arity) = &preds[rng.gen_range(0..preds.len())];
        let args: Vec<&str> =
            (0..*arity).map(|_| consts[rng.gen_range(0..consts.len())]).collect();
        writeln!(src, "{}({}).", name, args.join(", ")).unwrap();
    }
    for _ in 0..rng.gen_range(1..=4) {
        let mut body = Vec::new();
        let mut body_vars: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let (name, arity) = &preds[rng.gen_range(0..preds.len())];
            let args: Vec<String> = (0..*arity)
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        let v = format!("X{}", rng.gen_range(0..3));
                        if !body_vars.contains(&v) {
                            body_vars.push(v.clone());
                        }
                        v
                    } else {
                        consts[rng.gen_range(0..consts.len())].to_string()
                    }
                })
                .collect();
            body.push(format!("{}({})", name, args.join(", ")));
        }
        let (name, arity) = &preds[rng.gen_range(0..preds.len())];
        // Head arguments come from body variables (or constants), keeping
        // the program range-restricted so every derivable atom is ground.
        let head_args: Vec<String> = (0..*arity)
            .map(|_| {
                if !body_vars.is_empty() && rng.gen_bool(0.8) {
                    body_vars[rng.gen_range(0..body_vars.len())].clone()
                } else {
                    consts[rng.gen_range(0..consts.len())].to_string()
                }
            })
            .collect();
        writeln!(src, "{}({}) ::- [{}].", name, head_args.join(", "), body.join(", ")).unwrap();
    }
    for (name, arity) in &preds {
        let wildcard = vec!["_"; *arity].join(", ");
        writeln!(src, ":- memo({}({})).", name, wildcard).unwrap();
    }
    src
}

/// Every predicate of the program, as (name, arity) pairs.
fn predicates(prog: &Program) -> BTreeSet<(String, usize)> {
    prog.clauses()
        .iter()
        .flat_map(|c| c.head.iter().chain(&c.body))
        .filter_map(|t| t.functor().map(|(n, a)| (n.to_string(), a)))
        .collect()
}

/// The query `name(V0, V1, ...)` with all-distinct fresh variables.
fn all_var_query(name: &str, arity: usize) -> Goal {
    let args: Vec<String> = (0..arity).map(|i| format!("V{i}")).collect();
    let text =
        if arity == 0 { name.to_string() } else { format!("{}({})", name, args.join(", ")) };
    parse_query(&text).unwrap()
}

/// Engine answers for each predicate must equal the bottom-up least model,
/// restricted to that predicate, exactly.
fn check_engine_against_fixpoint(prog: &Program, policy: &Policy, src: &str) {
    let model = datalog_fixpoint(prog)
        .unwrap_or_else(|e| panic!("program left the function-free fragment: {e}\n{src}"));
    for (name, arity) in predicates(prog) {
        let query = all_var_query(&name, arity);
        let result = run(prog, policy, &query, EngineConfig::default()).unwrap();
        assert_eq!(result.status, Status::Completed, "engine hit its step limit on\n{src}");
        let mut engine_atoms: BTreeSet<Term> = BTreeSet::new();
        for clause in result.answers() {
            assert!(
                clause.body.is_empty(),
                "no residual constraints can arise without delays:\n{src}"
            );
            assert_eq!(clause.head.len(), 1);
            assert!(
                term_vars(&clause.head[0]).is_empty(),
                "range restriction forces ground answers:\n{src}"
            );
            engine_atoms.insert(clause.head[0].clone());
        }
        let model_atoms: BTreeSet<Term> = model
            .iter()
            .filter(|t| t.functor() == Some((name.as_str(), arity)))
            .cloned()
            .collect();
        assert_eq!(
            engine_atoms, model_atoms,
            "engine answers differ from the least model for {name}/{arity} on\n{src}"
        );
    }
}

#[test]
fn criterion_4_memoized_engine_matches_bottom_up_fixpoint() {
    let (prog, policy) = load_bundled("transitive_closure").unwrap();
    check_engine_against_fixpoint(&prog, &policy, "transitive_closure");

    let mut checked = 0;
    for seed in 0..25u64 {
        let src = random_ground_program(seed);
        let (prog, policy) = parse_program(&src)
            .unwrap_or_else(|e| panic!("generated program failed to parse: {e}\n{src}"));
        check_engine_against_fixpoint(&prog, &policy, &src);
        checked += 1;
    }
    assert!(checked >= 20);

    println!(
        "criterion 4: engine answers equal the least model on transitive_closure and {checked} random programs"
    );
}

/// A random terminating, delay-free program: predicates are layered and each
/// rule body only calls strictly lower layers, so even unmemoized search is
/// finite. Heads may build compound terms over body variables.
fn random_layered_program(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let consts = ["a", "b", "c"];
    let n_layers = rng.gen_range(2..=3usize);
    let arities: Vec<usize> = (0..n_layers).map(|_| rng.gen_range(1..=2)).collect();
    let mut src = String::new();
    for _ in 0..rng.gen_range(1..=5) {
        let args: Vec<String> = (0..arities[0])
            .map(|_| {
                let c = consts[rng.gen_range(0..consts.len())];
                if rng.gen_bool(0.3) {
                    format!("f({c})")
                } else {
                    c.to_string()
                }
            })
            .collect();
        writeln!(src, "q0({}).", args.join(", ")).unwrap();
    }
    for layer in 1..n_layers {
        for _ in 0..rng.gen_range(1..=3) {
            let mut body = Vec::new();
            let mut vars: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let callee = rng.gen_range(0..layer);
                let args: Vec<String> = (0..arities[callee])
                    .map(|_| {
                        if rng.gen_bool(0.8) {
                            let v = format!("X{}", rng.gen_range(0..3));
                            if !vars.contains(&v) {
                                vars.push(v.clone());
                            }
                            v
                        } else {
                            consts[rng.gen_range(0..consts.len())].to_string()
                        }
                    })
                    .collect();
                body.push(format!("q{callee}({})", args.join(", ")));
            }
            let head_args: Vec<String> = (0..arities[layer])
                .map(|_| {
                    if !vars.is_empty() && rng.gen_bool(0.7) {
                        let v = vars[rng.gen_range(0..vars.len())].clone();
                        if rng.gen_bool(0.25) {
                            format!("f({v})")
                        } else {
                            v
                        }
                    } else {
                        consts[rng.gen_range(0..consts.len())].to_string()
                    }
                })
                .collect();
            writeln!(src, "q{layer}({}) ::- [{}].", head_args.join(", "), body.join(", "))
                .unwrap();
        }
    }
    src
}

#[test]
fn criterion_5_unmemoized_engine_matches_exhaustive_depth_first_search() {
    let mut checked = 0;
    for seed in 0..25u64 {
        let src = random_layered_program(seed);
        let (prog, _) = parse_program(&src).unwrap();
        let policy = Policy::default();
        for (name, arity) in predicates(&prog) {
            let query = all_var_query(&name, arity);
            let result = run(&prog, &policy, &query, EngineConfig::default()).unwrap();
            assert_eq!(result.status, Status::Completed);
            let engine_keys: BTreeSet<CanonicalKey> = result
                .answers()
                .iter()
                .map(|c| {
                    assert!(c.body.is_empty(), "delay-free programs leave no residual");
                    canonical_key(&c.head)
                })
                .collect();

            let search = sld_solve(&prog, &policy, &query, 1000);
            assert!(search.exhausted, "layered programs terminate:\n{src}");
            let search_keys: BTreeSet<CanonicalKey> = search
                .answers
                .iter()
                .map(|a| {
                    assert!(a.residual.is_empty());
                    canonical_key(&a.bindings.resolve_goal(&query))
                })
                .collect();
            assert_eq!(
                engine_keys, search_keys,
                "engine and exhaustive search disagree for {name}/{arity} on\n{src}"
            );
        }
        checked += 1;
    }
    assert!(checked >= 20);

    println!(
        "criterion 5: unmemoized engine equals exhaustive search on {checked} random terminating programs"
    );
}

/// Structural invariants that hold of any run, completed or truncated.
fn check_structure(result: &ProofResult, label: &str) {
    // Table keys are pairwise distinct: one table per goal variant class.
    let keys: BTreeSet<CanonicalKey> = result.tables.iter().map(|t| t.key.clone()).collect();
    assert_eq!(keys.len(), result.tables.len(), "duplicate table keys on {label}");

    for table in &result.tables {
        // The first item processed in every table is a Program item (the
        // root `goal ::- goal` clause is expanded before anything else).
        let first = result
            .items
            .iter()
            .find(|it| it.table == table.index)
            .unwrap_or_else(|| panic!("table {} has no items on {label}", table.index));
        assert!(
            matches!(first.tag, ItemTag::Program),
            "first item of table {} is not a Program item on {label}",
            table.index
        );
        // Tables store only non-suppressed Solution items, and only their own.
        for &id in &table.solutions {
            let item = &result.items[id - 1];
            assert_eq!(item.id, id);
            assert_eq!(item.table, table.index, "foreign solution stored on {label}");
            assert!(
                matches!(item.tag, ItemTag::Solution { suppressed: false }),
                "stored item {id} is not a live Solution on {label}"
            );
        }
    }
}

/// Invariants of one terminating engine run, including agenda-order
/// independence of the answer set.
fn check_run_invariants(prog: &Program, policy: &Policy, query: &Goal, label: &str) {
    let fifo = run(prog, policy, query, EngineConfig::default()).unwrap();
    assert_eq!(fifo.status, Status::Completed, "corpus entry {label} should terminate");
    check_structure(&fifo, label);

    let lifo_cfg = EngineConfig { agenda: AgendaOrder::Lifo, ..EngineConfig::default() };
    let lifo = run(prog, policy, query, lifo_cfg).unwrap();
    assert_eq!(lifo.status, Status::Completed);
    assert_eq!(answer_set(&fifo), answer_set(&lifo), "agenda order changed answers on {label}");
}

fn answer_set(result: &ProofResult) -> BTreeSet<CanonicalKey> {
    result.answers().iter().map(|c| answer_key(c)).collect()
}

#[test]
fn criterion_6_structural_invariants() {
    let t0 = Instant::now();

    let (dutch_prog, dutch_policy) = dutch();
    let mut corpus: Vec<(Program, Policy, Goal, String)> = vec![
        (
            dutch_prog.clone(),
            dutch_policy.clone(),
            parse_query(TWO_WORD_QUERY).unwrap(),
            "dutch_cg two-word".into(),
        ),
        (
            dutch_prog.clone(),
            dutch_policy.clone(),
            parse_query(SENTENCE_QUERY).unwrap(),
            "dutch_cg sentence".into(),
        ),
    ];
    for name in ["transitive_closure", "memo_loop"] {
        let (prog, policy) = load_bundled(name).unwrap();
        let query = match name {
            "transitive_closure" => parse_query("path(A,B)").unwrap(),
            _ => parse_query("p").unwrap(),
        };
        corpus.push((prog, policy, query, name.into()));
    }
    for seed in 0..5u64 {
        let src = random_ground_program(seed);
        let (prog, policy) = parse_program(&src).unwrap();
        let (name, arity) = predicates(&prog).into_iter().next().unwrap();
        let query = all_var_query(&name, arity);
        corpus.push((prog, policy, query, format!("random #{seed}")));
    }
    for (prog, policy, query, label) in &corpus {
        check_run_invariants(prog, policy, query, label);
    }

    // A memoized grammar of an infinite language accumulates answers without
    // end; the structural invariants must still hold of the truncated run.
    let (dcg_prog, dcg_policy) = load_bundled("right_recursive_dcg").unwrap();
    let query = parse_query("s([a,a,a],R)").unwrap();
    let budget = EngineConfig { max_items: 300, ..EngineConfig::default() };
    let truncated = run(&dcg_prog, &dcg_policy, &query, budget).unwrap();
    assert_eq!(truncated.status, Status::StepLimit);
    check_structure(&truncated, "right_recursive_dcg (truncated)");

    // Unification produces idempotent most-general unifiers: resolving twice
    // changes nothing, and both sides resolve to the same term.
    let pairs = [
        ("x(A,[lijkt_te,B],C)", "x(D/E,F,[])"),
        ("f(X,g(X,Y))", "f(h(Z),g(h(a),b))"),
        ("s\\np/(s\\np)", "A/B"),
        ("#X", "#(s\\np)"),
        ("[a,b|T]", "[a|R]"),
        ("x(A\\(B/#C),[],D)", "x(E,[],[])"),
    ];
    for (left, right) in pairs {
        // One parse for both sides, so their variables are distinct.
        let pair = parse_query(&format!("[wrap({left}), wrap({right})]")).unwrap();
        let (l, r) = (pair[0].clone(), pair[1].clone());
        let b = unify(&l, &r, &Bindings::new(), OccursCheck::On)
            .unwrap_or_else(|| panic!("expected {left} and {right} to unify"));
        let lr = b.resolve(&l);
        let rr = b.resolve(&r);
        assert_eq!(lr, rr, "unifier fails to equate {left} and {right}");
        assert_eq!(b.resolve(&lr), lr, "unifier is not idempotent on {left}");
        for v in term_vars(&l).into_iter().chain(term_vars(&r)) {
            let once = b.resolve(&Term::Var(v));
            assert_eq!(b.resolve(&once), once);
        }
    }
    // The occurs check rejects cyclic solutions.
    let pair = parse_query("[wrap(p(X,X)), wrap(p(Y,f(Y)))]").unwrap();
    assert!(unify(&pair[0], &pair[1], &Bindings::new(), OccursCheck::On).is_none());

    // Goal abstraction is idempotent up to variance.
    let samples = [
        "x(s,[lijkt_te,ontwijken],[])",
        "x(A/B,[a,b,c],R)",
        "x(#(s\\np),[ontwijken],[ontwijken])",
        "lex(a,B)",
    ];
    for sample in samples {
        let goal = parse_query(sample).unwrap();
        let once = abstract_goal(&goal, &dutch_policy);
        let twice = abstract_goal(&once, &dutch_policy);
        assert!(
            variant(&once, &twice),
            "abstraction is not idempotent on {sample}: {} vs {}",
            format_goal(&once),
            format_goal(&twice)
        );
    }

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(60), "invariant suite took {elapsed:?}");
    println!("criterion 6: structural invariants hold across the corpus ({elapsed:?})");
}
