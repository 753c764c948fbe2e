//! Recursive-descent parser for the C subset.
//!
//! Anything that is not control flow, a `pact`/`pbool` call, a declaration
//! or an assignment of an integer literal is kept as opaque source text,
//! together with the identifiers it mentions.

use serde::Serialize;

use crate::syntax::Loc;

use super::lexer::{tokenize, Tok, Token};
use super::FrontendError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SourceFile {
    pub functions: Vec<SourceFunction>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SourceFunction {
    pub name: String,
    pub body: Vec<Stmt>,
    pub loc: Loc,
}

/// Text of a statement or expression the parser does not interpret.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Opaque {
    /// Whitespace-normalized source text.
    pub text: String,
    pub idents: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Declarator {
    pub name: String,
    pub init: Option<Init>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Init {
    Int(i64),
    Opaque(Opaque),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StmtKind {
    /// `pact(n);`
    Action(i64),
    /// `v = n;` with an integer literal.
    Assign { var: String, value: i64 },
    Decl { integer: bool, declarators: Vec<Declarator> },
    If(Cond, Box<Stmt>, Option<Box<Stmt>>),
    While(Cond, Box<Stmt>),
    DoWhile(Box<Stmt>, Cond),
    For { init: Option<Box<Stmt>>, cond: Option<Cond>, step: Option<Box<Stmt>>, body: Box<Stmt> },
    Goto(String),
    Labeled(String, Box<Stmt>),
    Break,
    Return(Option<Opaque>),
    Block(Vec<Stmt>),
    Empty,
    Opaque(Opaque),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cond {
    pub kind: CondKind,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CondKind {
    /// `pbool(n)`
    Test(i64),
    /// `v == n` or `v != n`
    Compare { var: String, op: CmpOp, value: i64 },
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Const(bool),
    Opaque(Opaque),
}

const TYPE_WORDS: &[&str] = &[
    "int", "long", "short", "unsigned", "signed", "char", "void", "bool", "_Bool", "size_t", "ssize_t", "float",
    "double", "static", "const", "volatile", "register", "auto", "struct", "enum", "extern", "inline",
];

const INTEGER_WORDS: &[&str] = &["int", "long", "short", "unsigned", "signed", "char", "bool", "_Bool", "size_t", "ssize_t"];

fn is_integer_type(words: &[String]) -> bool {
    words.iter().any(|w| {
        INTEGER_WORDS.contains(&w.as_str())
            || (w.starts_with("int") || w.starts_with("uint")) && w.ends_with("_t")
    }) && !words.iter().any(|w| w == "float" || w == "double" || w == "struct" || w == "void")
}

/// Parses every function definition in `src`. Top-level declarations
/// and prototypes are skipped.
pub fn parse_file(src: &str) -> Result<SourceFile, FrontendError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0, src };
    let mut functions = Vec::new();
    while !p.at_eof() {
        if let (Tok::Ident(name), Tok::Punct("(")) = (&p.peek().tok, &p.peek_at(1).tok) {
            let (name, loc) = (name.clone(), p.peek().loc);
            p.pos += 1;
            p.skip_balanced("(", ")")?;
            if p.is_punct("{") {
                let body = p.block()?;
                functions.push(SourceFunction { name, body, loc });
                continue;
            }
        }
        if p.is_punct("{") {
            p.skip_balanced("{", "}")?;
        } else {
            p.pos += 1;
        }
    }
    Ok(SourceFile { functions })
}

/// Parses the function `name` defined in `src`.
pub fn parse_function(src: &str, name: &str) -> Result<SourceFunction, FrontendError> {
    parse_file(src)?
        .functions
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| FrontendError::FunctionNotFound { name: name.to_string() })
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == w)
    }

    fn describe(t: &Token) -> String {
        match &t.tok {
            Tok::Ident(x) => format!("`{x}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Str => "a string literal".into(),
            Tok::Char => "a character literal".into(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of file".into(),
        }
    }

    fn error(&self, expected: &str) -> FrontendError {
        FrontendError::Syntax { loc: self.peek().loc, expected: expected.into(), found: Self::describe(self.peek()) }
    }

    fn expect(&mut self, p: &str) -> Result<(), FrontendError> {
        if self.is_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{p}`")))
        }
    }

    fn ident(&mut self) -> Result<String, FrontendError> {
        match &self.peek().tok {
            Tok::Ident(x) => {
                let x = x.clone();
                self.pos += 1;
                Ok(x)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> Result<(), FrontendError> {
        self.expect(open)?;
        let mut depth = 1;
        while depth > 0 {
            if self.at_eof() {
                return Err(self.error(&format!("`{close}`")));
            }
            if self.is_punct(open) {
                depth += 1;
            } else if self.is_punct(close) {
                depth -= 1;
            }
            self.pos += 1;
        }
        Ok(())
    }

    /// Renders tokens `[from, to)`, with one space wherever the source had
    /// any whitespace or comments.
    fn opaque(&self, from: usize, to: usize) -> Opaque {
        let mut text = String::new();
        let mut idents = Vec::new();
        for k in from..to {
            let t = &self.toks[k];
            if k > from && t.start > self.toks[k - 1].end {
                text.push(' ');
            }
            text.push_str(&self.src[t.start..t.end]);
            if let Tok::Ident(x) = &t.tok {
                idents.push(x.clone());
            }
        }
        Opaque { text, idents }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, FrontendError> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return Err(self.error("`}`"));
            }
            out.push(self.stmt()?);
        }
        self.pos += 1;
        Ok(out)
    }

    fn unsupported(&self, construct: &str) -> FrontendError {
        FrontendError::UnsupportedConstruct { loc: self.peek().loc, construct: construct.into() }
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let loc = self.peek().loc;
        let kind = match &self.peek().tok {
            Tok::Punct("{") => StmtKind::Block(self.block()?),
            Tok::Punct(";") => {
                self.pos += 1;
                StmtKind::Empty
            }
            Tok::Ident(w) => match w.as_str() {
                "if" => {
                    self.pos += 1;
                    let cond = self.paren_cond()?;
                    let then = Box::new(self.stmt()?);
                    let els = if self.is_word("else") {
                        self.pos += 1;
                        Some(Box::new(self.stmt()?))
                    } else {
                        None
                    };
                    StmtKind::If(cond, then, els)
                }
                "while" => {
                    self.pos += 1;
                    let cond = self.paren_cond()?;
                    StmtKind::While(cond, Box::new(self.stmt()?))
                }
                "do" => {
                    self.pos += 1;
                    let body = Box::new(self.stmt()?);
                    if !self.is_word("while") {
                        return Err(self.error("`while`"));
                    }
                    self.pos += 1;
                    let cond = self.paren_cond()?;
                    self.expect(";")?;
                    StmtKind::DoWhile(body, cond)
                }
                "for" => self.for_stmt()?,
                "goto" => {
                    self.pos += 1;
                    let l = self.ident()?;
                    self.expect(";")?;
                    StmtKind::Goto(l)
                }
                "break" => {
                    self.pos += 1;
                    self.expect(";")?;
                    StmtKind::Break
                }
                "return" => {
                    self.pos += 1;
                    let from = self.pos;
                    let to = self.expr_end(&[";"])?;
                    self.pos = to + 1;
                    StmtKind::Return((to > from).then(|| self.opaque(from, to)))
                }
                "continue" | "switch" | "case" | "default" => return Err(self.unsupported(w)),
                _ if matches!(self.peek_at(1).tok, Tok::Punct(":")) => {
                    let l = self.ident()?;
                    self.pos += 1;
                    let inner = if self.is_punct("}") {
                        Stmt { kind: StmtKind::Empty, loc: self.peek().loc }
                    } else {
                        self.stmt()?
                    };
                    StmtKind::Labeled(l, Box::new(inner))
                }
                _ if self.looks_like_decl() => {
                    let d = self.decl(&[";"])?;
                    self.expect(";")?;
                    d
                }
                _ => self.simple(&[";"], true)?,
            },
            _ => self.simple(&[";"], true)?,
        };
        Ok(Stmt { kind, loc })
    }

    fn for_stmt(&mut self) -> Result<StmtKind, FrontendError> {
        self.pos += 1;
        self.expect("(")?;
        let init = if self.is_punct(";") {
            None
        } else {
            let loc = self.peek().loc;
            let kind = if self.looks_like_decl() { self.decl(&[";"])? } else { self.simple(&[";"], false)? };
            Some(Box::new(Stmt { kind, loc }))
        };
        self.expect(";")?;
        let cond = if self.is_punct(";") { None } else { Some(self.cond()?) };
        self.expect(";")?;
        let step = if self.is_punct(")") {
            None
        } else {
            let loc = self.peek().loc;
            Some(Box::new(Stmt { kind: self.simple(&[")"], false)?, loc }))
        };
        self.expect(")")?;
        Ok(StmtKind::For { init, cond, step, body: Box::new(self.stmt()?) })
    }

    /// A declaration starts with a type word, or is `T name` with `T` an
    /// identifier (a typedef name).
    fn looks_like_decl(&self) -> bool {
        match &self.peek().tok {
            Tok::Ident(w) if TYPE_WORDS.contains(&w.as_str()) => true,
            Tok::Ident(w) if w.ends_with("_t") || w.chars().next().is_some_and(char::is_uppercase) => {
                matches!(self.peek_at(1).tok, Tok::Ident(_))
            }
            Tok::Ident(_) => {
                matches!(self.peek_at(1).tok, Tok::Ident(_))
                    && matches!(self.peek_at(2).tok, Tok::Punct(";" | "," | "=" | "["))
            }
            _ => false,
        }
    }

    /// Parses `type d1 [= init], d2 …` up to (not including) a terminator.
    fn decl(&mut self, terminators: &[&str]) -> Result<StmtKind, FrontendError> {
        let mut words = Vec::new();
        // type words: every identifier followed by another identifier
        while let (Tok::Ident(w), Tok::Ident(_)) = (&self.peek().tok, &self.peek_at(1).tok) {
            words.push(w.clone());
            self.pos += 1;
        }
        if self.is_punct("*") {
            return Err(self.unsupported("pointer declaration"));
        }
        let mut declarators = Vec::new();
        loop {
            let loc = self.peek().loc;
            let name = self.ident()?;
            if self.is_punct("[") {
                self.skip_balanced("[", "]")?;
            }
            let init = if self.is_punct("=") {
                self.pos += 1;
                let from = self.pos;
                let mut term: Vec<&str> = terminators.to_vec();
                term.push(",");
                let to = self.expr_end(&term)?;
                self.pos = to;
                Some(match &self.toks[from..to] {
                    [Token { tok: Tok::Int(v), .. }] => Init::Int(*v),
                    [Token { tok: Tok::Punct("-"), .. }, Token { tok: Tok::Int(v), .. }] => Init::Int(-v),
                    _ => Init::Opaque(self.opaque(from, to)),
                })
            } else {
                None
            };
            declarators.push(Declarator { name, init, loc });
            if self.is_punct(",") {
                self.pos += 1;
            } else {
                break;
            }
        }
        if !terminators.iter().any(|t| self.is_punct(t)) {
            return Err(self.error(&format!("`{}`", terminators[0])));
        }
        if words.is_empty() {
            return Err(self.error("a type"));
        }
        Ok(StmtKind::Decl { integer: is_integer_type(&words), declarators })
    }

    /// Index of the first terminator at nesting depth zero.
    fn expr_end(&self, terminators: &[&str]) -> Result<usize, FrontendError> {
        let mut depth = 0i32;
        let mut k = self.pos;
        loop {
            match &self.toks[k].tok {
                Tok::Eof => {
                    return Err(FrontendError::Syntax {
                        loc: self.toks[k].loc,
                        expected: format!("`{}`", terminators[0]),
                        found: "end of file".into(),
                    })
                }
                Tok::Punct(p) if depth == 0 && terminators.contains(p) => return Ok(k),
                Tok::Punct("(" | "[" | "{") => depth += 1,
                Tok::Punct(")" | "]" | "}") => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(FrontendError::Syntax {
                            loc: self.toks[k].loc,
                            expected: format!("`{}`", terminators[0]),
                            found: Self::describe(&self.toks[k]),
                        });
                    }
                }
                Tok::Punct("?") => {
                    return Err(FrontendError::UnsupportedConstruct {
                        loc: self.toks[k].loc,
                        construct: "ternary operator".into(),
                    })
                }
                _ => {}
            }
            k += 1;
        }
    }

    /// An expression statement up to a terminator, consuming the
    /// terminator when `consume` is set.
    fn simple(&mut self, terminators: &[&str], consume: bool) -> Result<StmtKind, FrontendError> {
        let from = self.pos;
        let to = self.expr_end(terminators)?;
        self.pos = if consume { to + 1 } else { to };
        Ok(match &self.toks[from..to] {
            [Token { tok: Tok::Ident(f), .. }, Token { tok: Tok::Punct("("), .. }, Token { tok: Tok::Int(n), .. }, Token { tok: Tok::Punct(")"), .. }]
                if f == "pact" =>
            {
                StmtKind::Action(*n)
            }
            [Token { tok: Tok::Ident(v), .. }, Token { tok: Tok::Punct("="), .. }, Token { tok: Tok::Int(n), .. }] => {
                StmtKind::Assign { var: v.clone(), value: *n }
            }
            [Token { tok: Tok::Ident(v), .. }, Token { tok: Tok::Punct("="), .. }, Token { tok: Tok::Punct("-"), .. }, Token { tok: Tok::Int(n), .. }] => {
                StmtKind::Assign { var: v.clone(), value: -n }
            }
            [] => StmtKind::Empty,
            _ => StmtKind::Opaque(self.opaque(from, to)),
        })
    }

    fn paren_cond(&mut self) -> Result<Cond, FrontendError> {
        self.expect("(")?;
        let c = self.cond()?;
        self.expect(")")?;
        Ok(c)
    }

    fn cond(&mut self) -> Result<Cond, FrontendError> {
        let mut left = self.cond_and()?;
        while self.is_punct("||") {
            self.pos += 1;
            let right = self.cond_and()?;
            let loc = left.loc;
            left = Cond { kind: CondKind::Or(Box::new(left), Box::new(right)), loc };
        }
        Ok(left)
    }

    fn cond_and(&mut self) -> Result<Cond, FrontendError> {
        let mut left = self.cond_unary()?;
        while self.is_punct("&&") {
            self.pos += 1;
            let right = self.cond_unary()?;
            let loc = left.loc;
            left = Cond { kind: CondKind::And(Box::new(left), Box::new(right)), loc };
        }
        Ok(left)
    }

    fn cond_unary(&mut self) -> Result<Cond, FrontendError> {
        let loc = self.peek().loc;
        if self.is_punct("!") {
            // `!a == b` compares `!a`; keep it opaque
            let save = self.pos;
            self.pos += 1;
            let inner = self.cond_unary()?;
            if matches!(self.peek().tok, Tok::Punct("==" | "!=" | "<" | ">" | "<=" | ">=")) {
                self.pos = save;
                return self.cond_atom();
            }
            return Ok(Cond { kind: CondKind::Not(Box::new(inner)), loc });
        }
        self.cond_atom()
    }

    /// A maximal operand of `&&`/`||`.
    fn cond_atom(&mut self) -> Result<Cond, FrontendError> {
        let loc = self.peek().loc;
        let from = self.pos;
        let to = self.atom_end()?;
        if to == from {
            return Err(self.error("a condition"));
        }
        // a fully parenthesized operand is a nested condition
        if matches!(self.toks[from].tok, Tok::Punct("(")) && self.matching_paren(from) == Some(to - 1) {
            self.pos = from + 1;
            let inner = self.cond()?;
            if self.pos != to - 1 {
                return Err(self.error("`)`"));
            }
            self.pos = to;
            return Ok(Cond { kind: inner.kind, loc });
        }
        self.pos = to;
        let kind = match &self.toks[from..to] {
            [Token { tok: Tok::Ident(f), .. }, Token { tok: Tok::Punct("("), .. }, Token { tok: Tok::Int(n), .. }, Token { tok: Tok::Punct(")"), .. }]
                if f == "pbool" =>
            {
                CondKind::Test(*n)
            }
            [Token { tok: Tok::Ident(v), .. }, Token { tok: Tok::Punct(op @ ("==" | "!=")), .. }, Token { tok: Tok::Int(n), .. }]
            | [Token { tok: Tok::Int(n), .. }, Token { tok: Tok::Punct(op @ ("==" | "!=")), .. }, Token { tok: Tok::Ident(v), .. }] => {
                CondKind::Compare { var: v.clone(), op: if *op == "==" { CmpOp::Eq } else { CmpOp::Ne }, value: *n }
            }
            [Token { tok: Tok::Int(n), .. }] => CondKind::Const(*n != 0),
            _ => CondKind::Opaque(self.opaque(from, to)),
        };
        Ok(Cond { kind, loc })
    }

    fn matching_paren(&self, open: usize) -> Option<usize> {
        let mut depth = 0;
        for k in open..self.toks.len() {
            match self.toks[k].tok {
                Tok::Punct("(") => depth += 1,
                Tok::Punct(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k);
                    }
                }
                Tok::Eof => return None,
                _ => {}
            }
        }
        None
    }

    /// End of the operand starting at the cursor: the first `&&`, `||`,
    /// `;` or unbalanced closing bracket at depth zero.
    fn atom_end(&self) -> Result<usize, FrontendError> {
        let mut depth = 0i32;
        let mut k = self.pos;
        loop {
            match &self.toks[k].tok {
                Tok::Eof => return Ok(k),
                Tok::Punct("&&" | "||" | ";" | ",") if depth == 0 => return Ok(k),
                Tok::Punct("(" | "[") => depth += 1,
                Tok::Punct(")" | "]") => {
                    if depth == 0 {
                        return Ok(k);
                    }
                    depth -= 1;
                }
                Tok::Punct("?") => {
                    return Err(FrontendError::UnsupportedConstruct {
                        loc: self.toks[k].loc,
                        construct: "ternary operator".into(),
                    })
                }
                _ => {}
            }
            k += 1;
        }
    }
}
