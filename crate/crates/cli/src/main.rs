//! Command-line front end for the tabled constraint engine: prove queries,
//! print item traces and derivation trees, compare answer sets against the
//! reference provers, and export the bundled example programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lemtab_core::engine::{
    derivation_trees, run, AgendaOrder, DerivationTree, EngineConfig, ItemRecord, ItemTag,
    ProofResult, Status,
};
use lemtab_core::grammars::{find_asset, load_bundled, ASSETS};
use lemtab_core::oracle::{datalog_fixpoint, sld_solve};
use lemtab_core::parser::{parse_program, parse_query};
use lemtab_core::policy::Policy;
use lemtab_core::printer::{format_clause, format_goal, PrintEnv};
use lemtab_core::program::{Clause, Program};
use lemtab_core::term::{
    canonical_key, make_list, unify, Bindings, CanonicalKey, OccursCheck, Term, NIL,
};

const EXIT_OK: u8 = 0;
const EXIT_NO_SOLUTIONS: u8 = 1;
const EXIT_STEP_LIMIT: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

/// Like `outln!`, but exits quietly instead of panicking when stdout is
/// gone (e.g. the output is piped into a pager that quit).
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "lemtab",
    version,
    about = "Tabled resolution engine for constraint logic programs",
    long_about = "Proves queries against logic programs whose control policy may memoize \
                  predicates, delay constraint literals on unbound arguments, and abstract \
                  memoized goals. Answers are reported together with their residual \
                  (still-delayed) constraints."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove a query; print each answer as `Answer ::- ResidualConstraints`.
    ///
    /// Exit status: 0 = answers found, 1 = none, 2 = step limit hit,
    /// 3 = parse or usage error.
    Prove {
        /// Bundled program name (see `lemtab assets`) or path to a program file.
        program: String,
        /// Query goal, e.g. "x(C,[lijkt_te,ontwijken],R)" or "[p(X),q(X)]".
        query: String,
        /// Print one line per processed item, in processing order.
        #[arg(long)]
        trace: bool,
        /// Print the number of derivations of the answers, then the trees.
        #[arg(long)]
        derivations: bool,
        /// Dump the whole run as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Display with the short functor names add/div/lt/o
        /// (text output only; parsing such output back needs the same map).
        #[arg(long)]
        abbrev: bool,
        #[command(flatten)]
        run_opts: RunOpts,
    },
    /// Prove a query and compare the answer set against a reference prover.
    ///
    /// Verdicts: EQUAL, ENGINE-TERMINATES-ORACLE-BOUNDED (exit 0),
    /// MISMATCH (exit 4). Exit 2 if the engine hit its step limit first.
    Compare {
        /// Bundled program name (see `lemtab assets`) or path to a program file.
        program: String,
        /// Query goal.
        query: String,
        /// Reference prover: bounded depth-first resolution, or a bottom-up
        /// fixpoint for function-free programs.
        #[arg(long, value_enum)]
        oracle: OracleKind,
        /// Resolution-step bound per branch for the depth-first oracle.
        #[arg(long, value_name = "N", default_value_t = 1000)]
        depth: usize,
        #[command(flatten)]
        run_opts: RunOpts,
    },
    /// List the bundled example programs, or write them out as files.
    Assets {
        /// Write every bundled program to this directory as <name>.lt.
        #[arg(long, value_name = "DIR")]
        export: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Agenda discipline: fifo processes oldest items first, lifo newest.
    #[arg(long, value_enum, default_value_t = AgendaArg::Fifo)]
    agenda: AgendaArg,
    /// Stop the run after this many item-processings.
    #[arg(long, value_name = "N", default_value_t = 100_000)]
    max_steps: usize,
    /// Reject bindings that would build cyclic terms.
    #[arg(long, value_enum, default_value_t = OccursArg::On)]
    occurs_check: OccursArg,
    /// Store and propagate variant-duplicate solutions instead of
    /// suppressing them.
    #[arg(long)]
    no_dedup: bool,
}

impl RunOpts {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            agenda: match self.agenda {
                AgendaArg::Fifo => AgendaOrder::Fifo,
                AgendaArg::Lifo => AgendaOrder::Lifo,
            },
            max_items: self.max_steps,
            occurs_check: match self.occurs_check {
                OccursArg::On => OccursCheck::On,
                OccursArg::Off => OccursCheck::Off,
            },
            dedup_solutions: !self.no_dedup,
            record_derivations: true,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AgendaArg {
    Fifo,
    Lifo,
}

#[derive(Clone, Copy, ValueEnum)]
enum OccursArg {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Depth-first resolution with a per-branch step bound.
    Sld,
    /// Bottom-up least-model computation (function-free programs only).
    Fixpoint,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print to stdout and are not errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Prove {
            program,
            query,
            trace,
            derivations,
            json,
            abbrev,
            run_opts,
        } => cmd_prove(&program, &query, trace, derivations, json, abbrev, &run_opts),
        Command::Compare {
            program,
            query,
            oracle,
            depth,
            run_opts,
        } => cmd_compare(&program, &query, oracle, depth, &run_opts),
        Command::Assets { export } => cmd_assets(export),
    };
    ExitCode::from(code)
}

/// Resolve `name_or_path` as a bundled asset first, then as a file path.
fn load_program(name_or_path: &str) -> Result<(Program, Policy), String> {
    if find_asset(name_or_path).is_some() {
        return load_bundled(name_or_path).map_err(|e| e.to_string());
    }
    let text = fs::read_to_string(name_or_path).map_err(|e| {
        format!(
            "cannot read program `{name_or_path}`: {e} \
             (not a bundled program either; `lemtab assets` lists those)"
        )
    })?;
    parse_program(&text).map_err(|e| format!("{name_or_path}: {e}"))
}

fn abbrev_aliases() -> BTreeMap<String, String> {
    [
        ("add_adjuncts", "add"),
        ("division", "div"),
        ("lijkt_te", "lt"),
        ("ontwijken", "o"),
    ]
    .into_iter()
    .map(|(k, v)| (String::from(k), String::from(v)))
    .collect()
}

/// One trace line: `table.id[parents] TAG clause` plus, for items that act on
/// a literal, a tab-separated `sel <literals>` marker. The clause and the
/// selected literals share one variable-naming environment, and a parent list
/// of `0` means the item has none (the query root).
fn trace_line(item: &ItemRecord, aliases: &BTreeMap<String, String>) -> String {
    let mut env = PrintEnv::with_aliases(aliases.clone());
    let clause = env.clause(&item.clause);
    let parents = if item.parents.is_empty() {
        String::from("0")
    } else {
        item.parents
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut line = format!(
        "{}.{}[{}] {} {}",
        item.table,
        item.id,
        parents,
        item.tag.letter(),
        clause
    );
    if let Some(sel) = &item.selected {
        line.push_str("\tsel ");
        line.push_str(&env.literals(sel));
    }
    line
}

fn tree_item(tree: &DerivationTree) -> usize {
    match tree {
        DerivationTree::Root { item }
        | DerivationTree::Step { item, .. }
        | DerivationTree::Join { item, .. } => *item,
    }
}

fn render_tree(tree: &DerivationTree, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match tree {
        DerivationTree::Root { item } => {
            out.push_str(&format!("{pad}item {item}: table root\n"));
        }
        DerivationTree::Step {
            item,
            clause,
            premise,
        } => {
            out.push_str(&format!(
                "{pad}item {item}: program clause {clause} on item {}\n",
                tree_item(premise)
            ));
            render_tree(premise, indent + 1, out);
        }
        DerivationTree::Join {
            item,
            parent,
            solution,
        } => {
            out.push_str(&format!(
                "{pad}item {item}: resume item {} with solution {}\n",
                tree_item(parent),
                tree_item(solution)
            ));
            render_tree(parent, indent + 1, out);
            render_tree(solution, indent + 1, out);
        }
    }
}

// ---------------------------------------------------------------------------
// JSON layout (stable; see README for the field-by-field description).
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonReport {
    /// "completed" or "step_limit".
    status: &'static str,
    /// Number of item-processings performed.
    steps: usize,
    tables: Vec<JsonTable>,
    items: Vec<JsonItem>,
    /// Answers of the query table.
    gamma: Vec<JsonAnswer>,
}

#[derive(Serialize)]
struct JsonTable {
    index: usize,
    /// The table's goal in goal syntax, e.g. "[x(A,[ontwijken],B)]".
    goal: String,
    /// Ids of stored solution items, in storage order.
    solutions: Vec<usize>,
    /// Ids of the suspended items registered on this table.
    parents: Vec<usize>,
}

#[derive(Serialize)]
struct JsonItem {
    id: usize,
    table: usize,
    parents: Vec<usize>,
    /// "P", "T", or "S".
    tag: String,
    /// The item's clause in surface syntax (always full functor names).
    clause: String,
    /// Selected literal(s) in goal syntax; null for solutions.
    #[serde(skip_serializing_if = "Option::is_none")]
    selected: Option<String>,
    /// For "T" items: index of the table the item suspended on.
    #[serde(skip_serializing_if = "Option::is_none")]
    callee: Option<usize>,
    /// For "S" items: whether the solution was a suppressed variant duplicate.
    #[serde(skip_serializing_if = "Option::is_none")]
    suppressed: Option<bool>,
}

#[derive(Serialize)]
struct JsonAnswer {
    /// Instantiated query in goal syntax.
    answer: String,
    /// Residual constraints in goal syntax ("[]" when none).
    constraints: String,
}

fn json_report(result: &ProofResult) -> JsonReport {
    JsonReport {
        status: match result.status {
            Status::Completed => "completed",
            Status::StepLimit => "step_limit",
        },
        steps: result.steps(),
        tables: result
            .tables
            .iter()
            .map(|t| JsonTable {
                index: t.index,
                goal: format_goal(&t.goal),
                solutions: t.solutions.clone(),
                parents: t.parents.iter().map(|p| p.id).collect(),
            })
            .collect(),
        items: result
            .items
            .iter()
            .map(|item| {
                let mut env = PrintEnv::new();
                let clause = env.clause(&item.clause);
                let selected = item.selected.as_ref().map(|sel| env.goal(sel));
                JsonItem {
                    id: item.id,
                    table: item.table,
                    parents: item.parents.clone(),
                    tag: item.tag.letter().to_string(),
                    clause,
                    selected,
                    callee: match &item.tag {
                        ItemTag::Table { callee, .. } => Some(*callee),
                        _ => None,
                    },
                    suppressed: match &item.tag {
                        ItemTag::Solution { suppressed } => Some(*suppressed),
                        _ => None,
                    },
                }
            })
            .collect(),
        gamma: result
            .answers()
            .into_iter()
            .map(|c| {
                let mut env = PrintEnv::new();
                JsonAnswer {
                    answer: env.goal(&c.head),
                    constraints: env.goal(&c.body),
                }
            })
            .collect(),
    }
}

fn cmd_prove(
    program: &str,
    query_text: &str,
    trace: bool,
    derivations: bool,
    json: bool,
    abbrev: bool,
    run_opts: &RunOpts,
) -> u8 {
    let (prog, policy) = match load_program(program) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    let query = match parse_query(query_text) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("query: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match run(&prog, &policy, &query, run_opts.config()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };

    if json {
        outln!(
            "{}",
            serde_json::to_string_pretty(&json_report(&result))
                .expect("report serialization cannot fail")
        );
    } else {
        let aliases = if abbrev {
            abbrev_aliases()
        } else {
            BTreeMap::new()
        };
        if trace {
            for item in &result.items {
                outln!("{}", trace_line(item, &aliases));
            }
        }
        let answers = result.answers();
        if answers.is_empty() {
            outln!("no solutions");
        }
        for clause in &answers {
            let mut env = PrintEnv::with_aliases(aliases.clone());
            outln!("{}", env.clause(clause));
        }
        if derivations {
            match derivation_trees(&result, &query) {
                Ok(trees) => {
                    let plural = if trees.len() == 1 { "" } else { "s" };
                    outln!("{} derivation{}", trees.len(), plural);
                    for (i, tree) in trees.iter().enumerate() {
                        let mut text = String::new();
                        render_tree(tree, 1, &mut text);
                        outln!("derivation {}:\n{}", i + 1, text.trim_end());
                    }
                }
                Err(e) => eprintln!("{e}"),
            }
        }
    }

    match result.status {
        Status::StepLimit => EXIT_STEP_LIMIT,
        Status::Completed => {
            if result.answers().is_empty() {
                EXIT_NO_SOLUTIONS
            } else {
                EXIT_OK
            }
        }
    }
}

/// Identity of an answer clause up to renaming (head/body sharing included).
fn clause_key(c: &Clause) -> CanonicalKey {
    let head = make_list(c.head.clone(), Term::atom(NIL));
    let body = make_list(c.body.clone(), Term::atom(NIL));
    canonical_key(&[Term::app("::-", vec![head, body])])
}

fn cmd_compare(
    program: &str,
    query_text: &str,
    oracle: OracleKind,
    depth: usize,
    run_opts: &RunOpts,
) -> u8 {
    let (prog, policy) = match load_program(program) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    let query = match parse_query(query_text) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("query: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match run(&prog, &policy, &query, run_opts.config()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    let engine_answers: Vec<Clause> = result.answers().into_iter().cloned().collect();
    outln!("engine: {} answer(s)", engine_answers.len());
    for c in &engine_answers {
        outln!("  {}", format_clause(c));
    }
    if result.status == Status::StepLimit {
        outln!("verdict: STEP-LIMIT (engine stopped at --max-steps before completing)");
        return EXIT_STEP_LIMIT;
    }

    match oracle {
        OracleKind::Sld => {
            let sld = sld_solve(&prog, &policy, &query, depth);
            let oracle_answers: Vec<Clause> = sld
                .answers
                .iter()
                .map(|a| Clause::new(a.bindings.resolve_goal(&query), a.residual.clone()))
                .collect();
            outln!(
                "oracle: depth-first resolution, depth {depth}{}: {} answer(s)",
                if sld.exhausted {
                    ", search exhausted"
                } else {
                    ", depth bound hit"
                },
                oracle_answers.len()
            );
            for c in &oracle_answers {
                outln!("  {}", format_clause(c));
            }
            let engine_keys: BTreeSet<CanonicalKey> =
                engine_answers.iter().map(clause_key).collect();
            let oracle_keys: BTreeSet<CanonicalKey> =
                oracle_answers.iter().map(clause_key).collect();
            if engine_keys == oracle_keys {
                if sld.exhausted {
                    outln!("verdict: EQUAL");
                } else {
                    outln!("verdict: EQUAL (oracle depth bound hit; agreement is at this bound)");
                }
                EXIT_OK
            } else if !sld.exhausted && oracle_keys.is_subset(&engine_keys) {
                outln!(
                    "verdict: ENGINE-TERMINATES-ORACLE-BOUNDED \
                     (bounded oracle found a strict subset of the engine's answers)"
                );
                EXIT_OK
            } else {
                for c in &engine_answers {
                    if !oracle_keys.contains(&clause_key(c)) {
                        outln!("  only engine: {}", format_clause(c));
                    }
                }
                for c in &oracle_answers {
                    if !engine_keys.contains(&clause_key(c)) {
                        outln!("  only oracle: {}", format_clause(c));
                    }
                }
                outln!("verdict: MISMATCH");
                EXIT_MISMATCH
            }
        }
        OracleKind::Fixpoint => {
            if !policy.delays.is_empty() {
                eprintln!(
                    "the fixpoint oracle cannot model delayed literals; \
                     use --oracle sld for programs with delay directives"
                );
                return EXIT_USAGE;
            }
            if query.len() != 1 {
                eprintln!("the fixpoint oracle compares single-literal queries only");
                return EXIT_USAGE;
            }
            let model = match datalog_fixpoint(&prog) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_USAGE;
                }
            };
            let oracle_atoms: BTreeSet<Term> = model
                .into_iter()
                .filter(|atom| {
                    unify(&query[0], atom, &Bindings::new(), OccursCheck::On).is_some()
                })
                .collect();
            outln!("oracle: least model, {} matching atom(s)", oracle_atoms.len());
            for atom in &oracle_atoms {
                outln!("  {}", PrintEnv::new().term(atom));
            }
            let mut constrained = false;
            let mut engine_atoms: BTreeSet<Term> = BTreeSet::new();
            for c in &engine_answers {
                if c.body.is_empty() && c.head.len() == 1 {
                    engine_atoms.insert(c.head[0].clone());
                } else {
                    constrained = true;
                }
            }
            if !constrained && engine_atoms == oracle_atoms {
                outln!("verdict: EQUAL");
                EXIT_OK
            } else {
                for atom in engine_atoms.difference(&oracle_atoms) {
                    outln!("  only engine: {}", PrintEnv::new().term(atom));
                }
                for atom in oracle_atoms.difference(&engine_atoms) {
                    outln!("  only oracle: {}", PrintEnv::new().term(atom));
                }
                if constrained {
                    outln!("  (some engine answers carry residual constraints)");
                }
                outln!("verdict: MISMATCH");
                EXIT_MISMATCH
            }
        }
    }
}

fn cmd_assets(export: Option<PathBuf>) -> u8 {
    match export {
        None => {
            for asset in ASSETS {
                outln!("{:<22} {}", asset.name, asset.description);
            }
            EXIT_OK
        }
        Some(dir) => {
            if let Err(e) = fs::create_dir_all(&dir) {
                eprintln!("cannot create {}: {e}", dir.display());
                return EXIT_USAGE;
            }
            for asset in ASSETS {
                let path = dir.join(format!("{}.lt", asset.name));
                if let Err(e) = fs::write(&path, asset.source) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
                outln!("wrote {}", path.display());
            }
            EXIT_OK
        }
    }
}
