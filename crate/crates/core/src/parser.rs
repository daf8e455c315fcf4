//! Surface syntax for programs, policies, and queries.
//!
//! Clauses are written `head ::- [lit, ...].` with an explicit list body; a
//! bare `head.` abbreviates an empty body. Policy directives are
//! `:- memo(Pattern).`, `:- delay(Pattern, [Vars...]).`, and
//! `:- abstract(FromGoal, ToGoal).`.
//!
//! The operator table is fixed: `::-` xfx 990, `\` and `/` yfx 400, `#` fy
//! 300, plus `[...|...]` list sugar. `%` starts a line comment. Variables
//! start with an upper-case letter or `_`; a lone `_` is fresh at every
//! occurrence.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::policy::{
    guard_vars_in_pattern, validate_template, AbstractionTemplate, DelayGuard, Policy,
};
use crate::program::{Clause, Program};
use crate::term::{make_list, proper_list, Goal, Term, VarId, VarSupply, CONS, NIL};

/// Highest precedence a term may have in clause position.
const TOP_PREC: u32 = 990;

/// A syntax error with its source position (1-based).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    /// Line of the offending token.
    pub line: usize,
    /// Column of the offending token.
    pub col: usize,
    /// What went wrong.
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Atom(String),
    Var(String),
    /// `(`; true when it immediately follows the previous token, which is
    /// what distinguishes a compound `f(...)` from a parenthesized term.
    Open(bool),
    Close,
    OpenList,
    CloseList,
    Comma,
    Bar,
    Slash,
    Backslash,
    Hash,
    /// `::-`
    ClauseArrow,
    /// `:-`
    DirectiveArrow,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom '{a}'"),
            Tok::Var(v) => format!("variable '{v}'"),
            Tok::Open(_) => "'('".to_string(),
            Tok::Close => "')'".to_string(),
            Tok::OpenList => "'['".to_string(),
            Tok::CloseList => "']'".to_string(),
            Tok::Comma => "','".to_string(),
            Tok::Bar => "'|'".to_string(),
            Tok::Slash => "'/'".to_string(),
            Tok::Backslash => "'\\'".to_string(),
            Tok::Hash => "'#'".to_string(),
            Tok::ClauseArrow => "'::-'".to_string(),
            Tok::DirectiveArrow => "':-'".to_string(),
            Tok::Dot => "'.'".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    line: usize,
    col: usize,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, message: message.into() })
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut toks = Vec::new();
        // Where the previous token ended, used to detect a glued `(`.
        let mut prev_end = (0, 0);
        loop {
            match self.chars.peek().copied() {
                None => {
                    toks.push(Token { kind: Tok::Eof, line: self.line, col: self.col });
                    return Ok(toks);
                }
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(c) => {
                    let (line, col) = (self.line, self.col);
                    let glued = (line, col) == prev_end;
                    let kind = self.token(c, line, col, glued)?;
                    prev_end = (self.line, self.col);
                    toks.push(Token { kind, line, col });
                }
            }
        }
    }

    fn token(&mut self, c: char, line: usize, col: usize, glued: bool) -> Result<Tok, ParseError> {
        match c {
            'a'..='z' => Ok(Tok::Atom(self.ident())),
            'A'..='Z' | '_' => Ok(Tok::Var(self.ident())),
            '0'..='9' => Ok(Tok::Atom(self.digits())),
            '\'' => self.quoted(line, col),
            '(' => {
                self.bump();
                Ok(Tok::Open(glued))
            }
            ')' => {
                self.bump();
                Ok(Tok::Close)
            }
            '[' => {
                self.bump();
                Ok(Tok::OpenList)
            }
            ']' => {
                self.bump();
                Ok(Tok::CloseList)
            }
            ',' => {
                self.bump();
                Ok(Tok::Comma)
            }
            '|' => {
                self.bump();
                Ok(Tok::Bar)
            }
            '/' => {
                self.bump();
                Ok(Tok::Slash)
            }
            '\\' => {
                self.bump();
                Ok(Tok::Backslash)
            }
            '#' => {
                self.bump();
                Ok(Tok::Hash)
            }
            ':' => {
                self.bump();
                match self.chars.peek() {
                    Some(':') => {
                        self.bump();
                        if self.chars.peek() == Some(&'-') {
                            self.bump();
                            Ok(Tok::ClauseArrow)
                        } else {
                            err(line, col, "expected '::-'")
                        }
                    }
                    Some('-') => {
                        self.bump();
                        Ok(Tok::DirectiveArrow)
                    }
                    _ => err(line, col, "expected ':-' or '::-'"),
                }
            }
            '.' => {
                self.bump();
                match self.chars.peek() {
                    None => Ok(Tok::Dot),
                    Some(&c) if c.is_whitespace() || c == '%' => Ok(Tok::Dot),
                    Some(&c) => err(
                        self.line,
                        self.col,
                        format!("unexpected character '{c}' after end-of-clause '.'"),
                    ),
                }
            }
            _ => err(line, col, format!("unexpected character '{c}'")),
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn quoted(&mut self, line: usize, col: usize) -> Result<Tok, ParseError> {
        self.bump(); // opening quote
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return err(line, col, "unterminated quoted atom"),
                Some('\n') => return err(line, col, "newline inside quoted atom"),
                Some('\'') => {
                    // '' inside quotes is a literal quote.
                    if self.chars.peek() == Some(&'\'') {
                        self.bump();
                        s.push('\'');
                    } else {
                        return Ok(Tok::Atom(s));
                    }
                }
                Some('\\') => match self.bump() {
                    Some('\\') => s.push('\\'),
                    Some('\'') => s.push('\''),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c) => {
                        return err(
                            self.line,
                            self.col,
                            format!("unsupported escape '\\{c}' in quoted atom"),
                        )
                    }
                    None => return err(line, col, "unterminated quoted atom"),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

/// Per-clause variable scope: named variables are shared within a clause or
/// directive, `_` is fresh at every occurrence.
struct VarScope {
    names: BTreeMap<String, VarId>,
    supply: VarSupply,
}

impl VarScope {
    fn new() -> Self {
        VarScope { names: BTreeMap::new(), supply: VarSupply::new() }
    }

    fn var(&mut self, name: &str) -> Term {
        if name == "_" {
            Term::Var(self.supply.fresh())
        } else {
            let supply = &mut self.supply;
            Term::Var(*self.names.entry(name.to_string()).or_insert_with(|| supply.fresh()))
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        let t = self.peek();
        err(t.line, t.col, format!("expected {expected}, found {}", t.kind.describe()))
    }

    fn expect(&mut self, kind: &Tok, expected: &str) -> Result<(), ParseError> {
        if &self.peek().kind == kind {
            self.advance();
            Ok(())
        } else {
            self.fail(expected)
        }
    }

    /// Precedence-climbing parse; returns the term and the precedence of its
    /// principal operator (0 for plain terms and parenthesized terms).
    fn term(&mut self, scope: &mut VarScope, max: u32) -> Result<(Term, u32), ParseError> {
        let (mut left, mut left_prec) = self.primary(scope, max)?;
        loop {
            let (name, prec, left_max, right_max) = match self.peek().kind {
                Tok::Slash => ("/", 400, 400, 399),
                Tok::Backslash => ("\\", 400, 400, 399),
                Tok::ClauseArrow => ("::-", 990, 989, 989),
                _ => break,
            };
            if prec > max {
                break;
            }
            if left_prec > left_max {
                let t = self.peek();
                return err(
                    t.line,
                    t.col,
                    format!("operator priority clash at '{name}'; use parentheses"),
                );
            }
            self.advance();
            let (right, _) = self.term(scope, right_max)?;
            left = Term::app(name, vec![left, right]);
            left_prec = prec;
        }
        Ok((left, left_prec))
    }

    fn primary(&mut self, scope: &mut VarScope, max: u32) -> Result<(Term, u32), ParseError> {
        let t = self.advance();
        match t.kind {
            Tok::Hash => {
                if max < 300 {
                    return err(t.line, t.col, "operator priority clash at '#'; use parentheses");
                }
                let (arg, _) = self.term(scope, 300)?;
                Ok((Term::app("#", vec![arg]), 300))
            }
            Tok::Atom(name) => {
                if matches!(self.peek().kind, Tok::Open(true)) {
                    self.advance();
                    let args = self.args(scope)?;
                    Ok((Term::App(name, args), 0))
                } else {
                    Ok((Term::App(name, Vec::new()), 0))
                }
            }
            Tok::Var(name) => Ok((scope.var(&name), 0)),
            Tok::OpenList => Ok((self.list(scope)?, 0)),
            Tok::Open(_) => {
                let (inner, _) = self.term(scope, TOP_PREC)?;
                self.expect(&Tok::Close, "')'")?;
                Ok((inner, 0))
            }
            kind => err(t.line, t.col, format!("expected a term, found {}", kind.describe())),
        }
    }

    fn args(&mut self, scope: &mut VarScope) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        loop {
            let (arg, _) = self.term(scope, TOP_PREC)?;
            args.push(arg);
            match self.peek().kind {
                Tok::Comma => {
                    self.advance();
                }
                Tok::Close => {
                    self.advance();
                    return Ok(args);
                }
                _ => return self.fail("',' or ')'"),
            }
        }
    }

    fn list(&mut self, scope: &mut VarScope) -> Result<Term, ParseError> {
        if self.peek().kind == Tok::CloseList {
            self.advance();
            return Ok(Term::atom(NIL));
        }
        let mut items = Vec::new();
        loop {
            let (item, _) = self.term(scope, TOP_PREC)?;
            items.push(item);
            match self.peek().kind {
                Tok::Comma => {
                    self.advance();
                }
                Tok::Bar => {
                    self.advance();
                    let (tail, _) = self.term(scope, TOP_PREC)?;
                    self.expect(&Tok::CloseList, "']'")?;
                    return Ok(make_list(items, tail));
                }
                Tok::CloseList => {
                    self.advance();
                    return Ok(make_list(items, Term::atom(NIL)));
                }
                _ => return self.fail("',', '|', or ']'"),
            }
        }
    }
}

/// Operators and list constructors name term structure, not predicates.
fn check_literal(t: &Term, line: usize, col: usize) -> Result<(), ParseError> {
    match t {
        Term::Var(_) => err(line, col, "a goal literal must not be a variable"),
        Term::App(f, _) if f == "::-" || f == "/" || f == "\\" || f == "#" || f == CONS || f == NIL => {
            err(line, col, format!("'{f}' cannot be used as a goal literal"))
        }
        Term::App(..) => Ok(()),
    }
}

fn goal_from_list(t: &Term, line: usize, col: usize, what: &str) -> Result<Goal, ParseError> {
    let items = match proper_list(t) {
        Some(items) => items,
        None => return err(line, col, format!("{what} must be written as a list [..]")),
    };
    for item in &items {
        check_literal(item, line, col)?;
    }
    Ok(items)
}

fn clause_from_term(t: Term, line: usize, col: usize) -> Result<Clause, ParseError> {
    match &t {
        Term::App(f, args) if f == "::-" && args.len() == 2 => {
            // A list head is a multi-atom head; a bare literal abbreviates a
            // one-atom head.
            let head = if proper_list(&args[0]).is_some() {
                let head = goal_from_list(&args[0], line, col, "a clause head")?;
                if head.is_empty() {
                    return err(line, col, "a clause head must contain at least one literal");
                }
                head
            } else {
                check_literal(&args[0], line, col)?;
                vec![args[0].clone()]
            };
            let body = goal_from_list(&args[1], line, col, "a clause body")?;
            Ok(Clause::new(head, body))
        }
        _ => {
            check_literal(&t, line, col)?;
            Ok(Clause::new(vec![t], Vec::new()))
        }
    }
}

fn apply_directive(t: Term, line: usize, col: usize, policy: &mut Policy) -> Result<(), ParseError> {
    match t {
        Term::App(name, args) => match (name.as_str(), args.len()) {
            ("memo", 1) => {
                check_literal(&args[0], line, col)?;
                policy.memo.push(args[0].clone());
                Ok(())
            }
            ("delay", 2) => {
                check_literal(&args[0], line, col)?;
                let items = match proper_list(&args[1]) {
                    Some(items) => items,
                    None => {
                        return err(line, col, "delay guard variables must be a list of variables")
                    }
                };
                let mut unbound = Vec::new();
                for item in items {
                    match item {
                        Term::Var(v) => unbound.push(v),
                        _ => {
                            return err(
                                line,
                                col,
                                "delay guard variables must be a list of variables",
                            )
                        }
                    }
                }
                if !guard_vars_in_pattern(&args[0], &unbound) {
                    return err(line, col, "every delay guard variable must occur in the pattern");
                }
                policy.delays.push(DelayGuard { pattern: args[0].clone(), unbound });
                Ok(())
            }
            ("abstract", 2) => {
                let from = goal_from_list(&args[0], line, col, "an abstraction side")?;
                let to = goal_from_list(&args[1], line, col, "an abstraction side")?;
                if let Err(e) = validate_template(&from, &to) {
                    return err(line, col, format!("invalid abstraction: {e}"));
                }
                policy.abstractions.push(AbstractionTemplate { from, to });
                Ok(())
            }
            (other, _) => err(line, col, format!("unknown directive '{other}'")),
        },
        Term::Var(_) => err(line, col, "malformed directive"),
    }
}

/// Parse a complete program text: clauses in source order plus the policy
/// collected from its directives.
pub fn parse_program(src: &str) -> Result<(Program, Policy), ParseError> {
    let toks = Lexer::new(src).run()?;
    let mut p = Parser { toks, pos: 0 };
    let mut clauses = Vec::new();
    let mut policy = Policy::default();
    loop {
        let at = p.peek().clone();
        match at.kind {
            Tok::Eof => break,
            Tok::DirectiveArrow => {
                p.advance();
                let mut scope = VarScope::new();
                let (t, _) = p.term(&mut scope, TOP_PREC)?;
                p.expect(&Tok::Dot, "'.'")?;
                apply_directive(t, at.line, at.col, &mut policy)?;
            }
            _ => {
                let mut scope = VarScope::new();
                let (t, _) = p.term(&mut scope, TOP_PREC)?;
                p.expect(&Tok::Dot, "'.'")?;
                clauses.push(clause_from_term(t, at.line, at.col)?);
            }
        }
    }
    Ok((Program::new(clauses), policy))
}

/// Parse a query: either a single literal or an explicit goal list
/// `[lit, ...]`. A trailing '.' is optional.
pub fn parse_query(src: &str) -> Result<Goal, ParseError> {
    let toks = Lexer::new(src).run()?;
    let mut p = Parser { toks, pos: 0 };
    let at = p.peek().clone();
    let mut scope = VarScope::new();
    let (t, _) = p.term(&mut scope, TOP_PREC)?;
    if p.peek().kind == Tok::Dot {
        p.advance();
    }
    if p.peek().kind != Tok::Eof {
        return p.fail("end of input");
    }
    if let Some(items) = proper_list(&t) {
        for item in &items {
            check_literal(item, at.line, at.col)?;
        }
        Ok(items)
    } else {
        check_literal(&t, at.line, at.col)?;
        Ok(vec![t])
    }
}

/// Parse a single term (no trailing '.'); used by tests and tools.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let toks = Lexer::new(src).run()?;
    let mut p = Parser { toks, pos: 0 };
    let mut scope = VarScope::new();
    let (t, _) = p.term(&mut scope, TOP_PREC)?;
    if p.peek().kind != Tok::Eof {
        return p.fail("end of input");
    }
    Ok(t)
}
