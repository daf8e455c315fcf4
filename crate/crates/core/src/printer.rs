//! Compact text rendering of terms, goals, and clauses.
//!
//! Output uses the same fixed operator table as the parser and inserts only
//! the parentheses that precedence requires, so `parse(format(t))` is always
//! a variant of `t`. Variables print as `A`, `B`, ..., `Z`, `A1`, `B1`, ...
//! in order of first appearance within one [`PrintEnv`] scope; share an env
//! across several calls to keep variable names consistent (e.g. a clause and
//! its selected literal).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::program::Clause;
use crate::term::{Term, VarId, CONS, NIL};

/// A naming scope plus optional display aliases (purely cosmetic functor and
/// atom renames such as `add_adjuncts` → `add`; aliased output is not meant
/// to be re-parsed).
#[derive(Default)]
pub struct PrintEnv {
    names: BTreeMap<VarId, String>,
    next: usize,
    aliases: BTreeMap<String, String>,
}

impl PrintEnv {
    /// An environment with no names assigned yet.
    pub fn new() -> Self {
        PrintEnv::default()
    }

    /// An environment that renders functor names through an alias map
    /// (display only; parsing aliased output requires the same aliases).
    pub fn with_aliases(aliases: BTreeMap<String, String>) -> Self {
        PrintEnv { aliases, ..PrintEnv::default() }
    }

    fn var_name(&mut self, v: VarId) -> String {
        if let Some(n) = self.names.get(&v) {
            return n.clone();
        }
        let letter = (b'A' + (self.next % 26) as u8) as char;
        let round = self.next / 26;
        let mut name = String::new();
        name.push(letter);
        if round > 0 {
            name.push_str(itoa(round).as_str());
        }
        self.next += 1;
        self.names.insert(v, name.clone());
        name
    }

    fn name_of(&self, s: &str) -> String {
        match self.aliases.get(s) {
            Some(alias) => alias.clone(),
            None => String::from(s),
        }
    }

    /// A single term with minimal parenthesization.
    pub fn term(&mut self, t: &Term) -> String {
        let mut out = String::new();
        self.fmt(t, 990, &mut out);
        out
    }

    /// A goal in its surface form: `[lit, ...]`.
    pub fn goal(&mut self, g: &[Term]) -> String {
        let mut out = String::new();
        out.push('[');
        for (i, lit) in g.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.fmt(lit, 990, &mut out);
        }
        out.push(']');
        out
    }

    /// Literals joined by commas, without the enclosing brackets.
    pub fn literals(&mut self, g: &[Term]) -> String {
        let mut out = String::new();
        for (i, lit) in g.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.fmt(lit, 990, &mut out);
        }
        out
    }

    /// `head ::- [body]`; a single-atom head prints bare, a multi-atom head
    /// prints as a goal list. No trailing '.'.
    pub fn clause(&mut self, c: &Clause) -> String {
        let mut out = String::new();
        if c.head.len() == 1 {
            self.fmt(&c.head[0], 989, &mut out);
        } else {
            out.push_str(&self.goal(&c.head));
        }
        out.push_str(" ::- ");
        out.push_str(&self.goal(&c.body));
        out
    }

    fn fmt(&mut self, t: &Term, max: u32, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&self.var_name(*v)),
            Term::App(f, args) => match (f.as_str(), args.len()) {
                (CONS, 2) => self.fmt_list(t, out),
                ("::-", 2) => self.fmt_infix(" ::- ", 990, &args[0], &args[1], max, out),
                ("/", 2) => self.fmt_infix("/", 400, &args[0], &args[1], max, out),
                ("\\", 2) => self.fmt_infix("\\", 400, &args[0], &args[1], max, out),
                ("#", 1) => {
                    let wrap = 300 > max;
                    if wrap {
                        out.push('(');
                    }
                    out.push('#');
                    self.fmt(&args[0], 300, out);
                    if wrap {
                        out.push(')');
                    }
                }
                (_, 0) => out.push_str(&quote_atom(&self.name_of(f))),
                _ => {
                    out.push_str(&quote_atom(&self.name_of(f)));
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.fmt(a, 990, out);
                    }
                    out.push(')');
                }
            },
        }
    }

    fn fmt_infix(&mut self, op: &str, prec: u32, a: &Term, b: &Term, max: u32, out: &mut String) {
        let wrap = prec > max;
        if wrap {
            out.push('(');
        }
        self.fmt(a, prec, out);
        out.push_str(op);
        self.fmt(b, prec - 1, out);
        if wrap {
            out.push(')');
        }
    }

    fn fmt_list(&mut self, t: &Term, out: &mut String) {
        out.push('[');
        let mut cur = t;
        let mut first = true;
        loop {
            match cur {
                Term::App(f, args) if f == CONS && args.len() == 2 => {
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    self.fmt(&args[0], 990, out);
                    cur = &args[1];
                }
                Term::App(f, args) if f == NIL && args.is_empty() => break,
                tail => {
                    out.push('|');
                    self.fmt(tail, 990, out);
                    break;
                }
            }
        }
        out.push(']');
    }
}

/// Quote an atom when its spelling would not lex back as a single atom.
fn quote_atom(s: &str) -> String {
    if atom_is_plain(s) {
        return String::from(s);
    }
    let mut out = String::new();
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn atom_is_plain(s: &str) -> bool {
    if s == NIL {
        return true;
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        Some(c) if c.is_ascii_digit() => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

fn itoa(mut n: usize) -> String {
    if n == 0 {
        return String::from("0");
    }
    let mut digits = Vec::new();
    while n > 0 {
        digits.push((b'0' + (n % 10) as u8) as char);
        n /= 10;
    }
    digits.iter().rev().collect()
}

/// [`PrintEnv::term`] in a throwaway environment.
pub fn format_term(t: &Term) -> String {
    PrintEnv::new().term(t)
}

/// [`PrintEnv::goal`] in a throwaway environment.
pub fn format_goal(g: &[Term]) -> String {
    PrintEnv::new().goal(g)
}

/// [`PrintEnv::clause`] in a throwaway environment.
pub fn format_clause(c: &Clause) -> String {
    PrintEnv::new().clause(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_term};
    use crate::term::variant;
    use alloc::string::ToString;
    use alloc::vec;

    fn roundtrips(src: &str) {
        let t = parse_term(src).unwrap();
        let printed = format_term(&t);
        let back = parse_term(&printed).unwrap();
        assert!(
            variant(core::slice::from_ref(&t), core::slice::from_ref(&back)),
            "{src} printed as {printed} which reparses differently"
        );
    }

    #[test]
    fn minimal_parentheses() {
        let t = parse_term("(s\\np)/(s\\np)").unwrap();
        assert_eq!(format_term(&t), "s\\np/(s\\np)");
        let t = parse_term("(a\\b)\\c").unwrap();
        assert_eq!(format_term(&t), "a\\b\\c");
        let t = parse_term("a\\(b\\c)").unwrap();
        assert_eq!(format_term(&t), "a\\(b\\c)");
        let t = parse_term("x/#y").unwrap();
        assert_eq!(format_term(&t), "x/#y");
        let t = parse_term("#x/y").unwrap();
        assert_eq!(format_term(&t), "#x/y");
        let t = parse_term("#(x/y)").unwrap();
        assert_eq!(format_term(&t), "#(x/y)");
    }

    #[test]
    fn hash_and_lists() {
        assert_eq!(format_term(&Term::app("#", vec![Term::atom("x")])), "#x");
        let singleton = Term::app(CONS, vec![Term::atom("a"), Term::atom(NIL)]);
        assert_eq!(format_term(&singleton), "[a]");
        roundtrips("[a,b|T]");
        roundtrips("[x(A/B,[lt,o],C)]");
        assert_eq!(format_term(&parse_term("[a,b|T]").unwrap()), "[a,b|A]");
        assert_eq!(format_term(&Term::atom(NIL)), "[]");
    }

    #[test]
    fn quoting() {
        assert_eq!(format_term(&Term::atom("Frits")), "'Frits'");
        assert_eq!(format_term(&Term::atom("don't")), "'don\\'t'");
        assert_eq!(format_term(&Term::atom("lijkt_te")), "lijkt_te");
        assert_eq!(format_term(&Term::atom("12")), "12");
        assert_eq!(format_term(&Term::atom("12a")), "'12a'");
        assert_eq!(format_term(&Term::atom("")), "''");
        roundtrips("'Frits'");
        roundtrips("'don''t'");
        roundtrips("'a\\\\b'");
    }

    #[test]
    fn variable_letters() {
        let mut env = PrintEnv::new();
        let mk = |n| Term::Var(VarId(n));
        assert_eq!(env.term(&mk(7)), "A");
        assert_eq!(env.term(&mk(3)), "B");
        assert_eq!(env.term(&mk(7)), "A");
        let mut env = PrintEnv::new();
        let many: Vec<Term> = (0..28).map(|n| Term::Var(VarId(n))).collect();
        let s = env.literals(&many);
        assert!(s.starts_with("A,B,"));
        assert!(s.ends_with("A1,B1"));
    }

    #[test]
    fn clause_rendering_shares_names() {
        let (prog, _) = parse_program("x(X,L,R) ::- [x(X/Y,L,M),x(Y,M,R)].").unwrap();
        let s = format_clause(&prog.clauses()[0]);
        assert_eq!(s, "x(A,B,C) ::- [x(A/D,B,E),x(D,E,C)]");
        let (prog, _) = parse_program("lex('Frits',np).").unwrap();
        assert_eq!(format_clause(&prog.clauses()[0]), "lex('Frits',np) ::- []");
    }

    #[test]
    fn multi_atom_head_prints_as_list() {
        let c = Clause::new(
            vec![Term::atom("p"), Term::atom("q")],
            vec![Term::atom("r")],
        );
        assert_eq!(format_clause(&c), "[p,q] ::- [r]");
    }

    #[test]
    fn aliases_rename_functors_and_atoms() {
        let mut aliases = BTreeMap::new();
        aliases.insert("add_adjuncts".to_string(), "add".to_string());
        aliases.insert("ontwijken".to_string(), "o".to_string());
        let mut env = PrintEnv::with_aliases(aliases);
        let t = parse_term("add_adjuncts(s\\np\\np,ontwijken)").unwrap();
        assert_eq!(env.term(&t), "add(s\\np\\np,o)");
    }

    #[test]
    fn assorted_roundtrips() {
        for src in [
            "x(A,[lt,o],B)",
            "x(A/#B,[lt,o],[o]) ::- [add(s\\np/(s\\np),C),div(C,A/B)]",
            "f(g(X),[a,'B c'|T],#(x/y)\\z)",
            "p ::- []",
            "[a|[b|[c|[]]]]",
        ] {
            roundtrips(src);
        }
    }
}
