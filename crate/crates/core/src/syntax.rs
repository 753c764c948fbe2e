//! Abstract syntax of tests and programs, program validity and alphabets.
//!
//! Programs are immutable trees. Every [`Exp`] node carries the source
//! location it was lifted from (or [`Loc::UNKNOWN`] for programs built in
//! code); locations are ignored by equality.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::Error;

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                $name(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }
    };
}

name_type!(
    /// An uninterpreted primitive action.
    Action
);
name_type!(
    /// An uninterpreted primitive test.
    Test
);
name_type!(
    /// A jump target.
    Label
);

/// A value of the indicator variable.
///
/// `Fresh` is the reserved value added by [`collect_alphabets`]; it can never
/// be written in a program, whatever literals the program uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "IndicatorRepr", try_from = "IndicatorRepr")]
pub enum Indicator {
    Value(i64),
    Fresh,
}

/// Serialized form: an integer, or the string `"*"`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum IndicatorRepr {
    Value(i64),
    Fresh(String),
}

impl From<Indicator> for IndicatorRepr {
    fn from(i: Indicator) -> IndicatorRepr {
        match i {
            Indicator::Value(v) => IndicatorRepr::Value(v),
            Indicator::Fresh => IndicatorRepr::Fresh("*".into()),
        }
    }
}

impl TryFrom<IndicatorRepr> for Indicator {
    type Error = String;

    fn try_from(r: IndicatorRepr) -> Result<Indicator, String> {
        match r {
            IndicatorRepr::Value(v) => Ok(Indicator::Value(v)),
            IndicatorRepr::Fresh(s) if s == "*" => Ok(Indicator::Fresh),
            IndicatorRepr::Fresh(s) => Err(format!("invalid indicator value `{s}`")),
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Indicator::Value(v) => write!(f, "{v}"),
            Indicator::Fresh => f.write_str("*"),
        }
    }
}

/// Boolean tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BExp {
    False,
    True,
    Prim(Test),
    /// `x = i`
    IndEq(Indicator),
    Or(Box<BExp>, Box<BExp>),
    And(Box<BExp>, Box<BExp>),
    Not(Box<BExp>),
}

impl BExp {
    pub fn prim(name: &str) -> BExp {
        BExp::Prim(Test::new(name))
    }

    pub fn ind_eq(value: i64) -> BExp {
        BExp::IndEq(Indicator::Value(value))
    }

    pub fn and(a: BExp, b: BExp) -> BExp {
        BExp::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BExp, b: BExp) -> BExp {
        BExp::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(b: BExp) -> BExp {
        BExp::Not(Box::new(b))
    }

    fn visit(&self, f: &mut impl FnMut(&BExp)) {
        f(self);
        match self {
            BExp::Or(a, b) | BExp::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            BExp::Not(a) => a.visit(f),
            BExp::False | BExp::True | BExp::Prim(_) | BExp::IndEq(_) => {}
        }
    }
}

impl fmt::Display for BExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BExp::False => f.write_str("false"),
            BExp::True => f.write_str("true"),
            BExp::Prim(t) => write!(f, "{t}"),
            BExp::IndEq(i) => write!(f, "x = {i}"),
            BExp::Or(a, b) => write!(f, "({a} || {b})"),
            BExp::And(a, b) => write!(f, "({a} && {b})"),
            BExp::Not(a) => write!(f, "!{a}"),
        }
    }
}

/// A source position, 1-based. `(0, 0)` means unknown.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl Loc {
    pub const UNKNOWN: Loc = Loc { line: 0, col: 0 };

    pub fn new(line: u32, col: u32) -> Loc {
        Loc { line, col }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Loc::UNKNOWN {
            f.write_str("?:?")
        } else {
            write!(f, "{}:{}", self.line, self.col)
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ExpKind {
    Assert(BExp),
    Act(Action),
    /// `x := i`
    Assign(Indicator),
    /// Sequential composition. A `Seq` of k >= 2 children stands for k - 1
    /// nested binary sequencings; an empty `Seq` behaves as `assert true`.
    Seq(Vec<Exp>),
    If(BExp, Box<Exp>, Box<Exp>),
    While(BExp, Box<Exp>),
    Break,
    Return,
    Goto(Label),
    Label(Label),
}

/// A program expression.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Exp {
    pub kind: ExpKind,
    #[serde(default, skip_serializing_if = "is_unknown")]
    pub loc: Loc,
}

fn is_unknown(loc: &Loc) -> bool {
    *loc == Loc::UNKNOWN
}

impl PartialEq for Exp {
    fn eq(&self, other: &Exp) -> bool {
        use ExpKind::*;
        match (&self.kind, &other.kind) {
            (Assert(a), Assert(b)) => a == b,
            (Act(a), Act(b)) => a == b,
            (Assign(a), Assign(b)) => a == b,
            (Seq(a), Seq(b)) => a == b,
            (If(b1, t1, e1), If(b2, t2, e2)) => b1 == b2 && t1 == t2 && e1 == e2,
            (While(b1, e1), While(b2, e2)) => b1 == b2 && e1 == e2,
            (Break, Break) | (Return, Return) => true,
            (Goto(a), Goto(b)) => a == b,
            (Label(a), Label(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Exp {}

impl From<ExpKind> for Exp {
    fn from(kind: ExpKind) -> Exp {
        Exp { kind, loc: Loc::UNKNOWN }
    }
}

impl Exp {
    pub fn at(mut self, loc: Loc) -> Exp {
        self.loc = loc;
        self
    }

    pub fn assert(b: BExp) -> Exp {
        ExpKind::Assert(b).into()
    }

    pub fn skip() -> Exp {
        Exp::assert(BExp::True)
    }

    pub fn act(name: &str) -> Exp {
        ExpKind::Act(Action::new(name)).into()
    }

    pub fn assign(value: i64) -> Exp {
        ExpKind::Assign(Indicator::Value(value)).into()
    }

    /// Sequences `items`; zero items give `assert true`, one item is returned as is.
    pub fn seq(mut items: Vec<Exp>) -> Exp {
        match items.len() {
            0 => Exp::skip(),
            1 => items.pop().unwrap(),
            _ => ExpKind::Seq(items).into(),
        }
    }

    pub fn seq2(a: Exp, b: Exp) -> Exp {
        ExpKind::Seq(vec![a, b]).into()
    }

    pub fn if_(b: BExp, then: Exp, els: Exp) -> Exp {
        ExpKind::If(b, Box::new(then), Box::new(els)).into()
    }

    pub fn while_(b: BExp, body: Exp) -> Exp {
        ExpKind::While(b, Box::new(body)).into()
    }

    pub fn brk() -> Exp {
        ExpKind::Break.into()
    }

    pub fn ret() -> Exp {
        ExpKind::Return.into()
    }

    pub fn goto(label: &str) -> Exp {
        ExpKind::Goto(Label::new(label)).into()
    }

    pub fn label(label: &str) -> Exp {
        ExpKind::Label(Label::new(label)).into()
    }

    /// Pre-order traversal of the expression nodes.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Exp)) {
        f(self);
        match &self.kind {
            ExpKind::Seq(items) => items.iter().for_each(|e| e.visit(f)),
            ExpKind::If(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            ExpKind::While(_, a) => a.visit(f),
            _ => {}
        }
    }

    /// Number of program constructors. Tests inside guards and assertions do
    /// not count.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            n += match &e.kind {
                ExpKind::Seq(items) if items.is_empty() => 1,
                ExpKind::Seq(items) => items.len() - 1,
                _ => 1,
            }
        });
        n
    }

    /// Number of `Act` occurrences.
    pub fn action_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            if matches!(e.kind, ExpKind::Act(_)) {
                n += 1;
            }
        });
        n
    }

    /// True iff `Label(label)` occurs in the expression.
    pub fn contains_label(&self, label: &Label) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let ExpKind::Label(l) = &e.kind {
                found |= l == label;
            }
        });
        found
    }
}

/// Number of program constructors in `e`, see [`Exp::size`].
pub fn size(e: &Exp) -> usize {
    e.size()
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExpKind::Assert(b) => write!(f, "assert {b}"),
            ExpKind::Act(p) => write!(f, "{p}"),
            ExpKind::Assign(i) => write!(f, "x := {i}"),
            ExpKind::Seq(items) => {
                f.write_str("{ ")?;
                for (k, e) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(" }")
            }
            ExpKind::If(b, t, e) => write!(f, "if {b} then {t} else {e}"),
            ExpKind::While(b, e) => write!(f, "while {b} do {e}"),
            ExpKind::Break => f.write_str("break"),
            ExpKind::Return => f.write_str("return"),
            ExpKind::Goto(l) => write!(f, "goto {l}"),
            ExpKind::Label(l) => write!(f, "label {l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    DuplicateLabel { label: Label, first: Loc, second: Loc },
    UndefinedGotoTarget { label: Label, loc: Loc },
    BreakOutsideLoop { loc: Loc },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateLabel { label, first, second } => {
                write!(f, "{second}: label `{label}` defined twice (first at {first})")
            }
            Violation::UndefinedGotoTarget { label, loc } => {
                write!(f, "{loc}: goto targets undefined label `{label}`")
            }
            Violation::BreakOutsideLoop { loc } => write!(f, "{loc}: break outside a loop"),
        }
    }
}

/// The violations found by [`validate`]. Empty iff the program is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate(e: &Exp) -> ValidationReport {
    fn walk<'a>(
        e: &'a Exp,
        in_loop: bool,
        labels: &mut HashMap<&'a Label, Loc>,
        gotos: &mut Vec<(&'a Label, Loc)>,
        out: &mut Vec<Violation>,
    ) {
        match &e.kind {
            ExpKind::Label(l) => {
                if let Some(first) = labels.get(l) {
                    out.push(Violation::DuplicateLabel {
                        label: l.clone(),
                        first: *first,
                        second: e.loc,
                    });
                } else {
                    labels.insert(l, e.loc);
                }
            }
            ExpKind::Goto(l) => gotos.push((l, e.loc)),
            ExpKind::Break if !in_loop => out.push(Violation::BreakOutsideLoop { loc: e.loc }),
            ExpKind::Seq(items) => {
                for item in items {
                    walk(item, in_loop, labels, gotos, out);
                }
            }
            ExpKind::If(_, a, b) => {
                walk(a, in_loop, labels, gotos, out);
                walk(b, in_loop, labels, gotos, out);
            }
            ExpKind::While(_, body) => walk(body, true, labels, gotos, out),
            _ => {}
        }
    }

    let mut labels = HashMap::new();
    let mut gotos = Vec::new();
    let mut violations = Vec::new();
    walk(e, false, &mut labels, &mut gotos, &mut violations);
    for (label, loc) in gotos {
        if !labels.contains_key(label) {
            violations.push(Violation::UndefinedGotoTarget { label: label.clone(), loc });
        }
    }
    ValidationReport { violations }
}

/// The alphabets shared by the programs of one equivalence check.
///
/// All sets keep first-occurrence order. `indicators` ends with
/// [`Indicator::Fresh`] when built by [`collect_alphabets`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabets {
    pub actions: IndexSet<Action>,
    pub tests: IndexSet<Test>,
    pub labels: IndexSet<Label>,
    pub indicators: IndexSet<Indicator>,
}

impl Alphabets {
    pub fn new<A, T, L, I>(actions: A, tests: T, labels: L, indicators: I) -> Alphabets
    where
        A: IntoIterator<Item = Action>,
        T: IntoIterator<Item = Test>,
        L: IntoIterator<Item = Label>,
        I: IntoIterator<Item = Indicator>,
    {
        Alphabets {
            actions: actions.into_iter().collect(),
            tests: tests.into_iter().collect(),
            labels: labels.into_iter().collect(),
            indicators: indicators.into_iter().collect(),
        }
    }

    /// Number of atoms, `2^|T|`.
    pub fn n_atoms(&self) -> usize {
        1usize << self.tests.len()
    }

    pub fn n_indicators(&self) -> usize {
        self.indicators.len()
    }

    pub fn action_index(&self, a: &Action) -> Result<u32, Error> {
        self.actions
            .get_index_of(a)
            .map(|k| k as u32)
            .ok_or_else(|| Error::UnknownId(format!("action `{a}`")))
    }

    pub fn test_index(&self, t: &Test) -> Result<u32, Error> {
        self.tests
            .get_index_of(t)
            .map(|k| k as u32)
            .ok_or_else(|| Error::UnknownId(format!("test `{t}`")))
    }

    pub fn label_index(&self, l: &Label) -> Result<u32, Error> {
        self.labels
            .get_index_of(l)
            .map(|k| k as u32)
            .ok_or_else(|| Error::UnknownId(format!("label `{l}`")))
    }

    pub fn indicator_index(&self, i: &Indicator) -> Result<u32, Error> {
        self.indicators
            .get_index_of(i)
            .map(|k| k as u32)
            .ok_or_else(|| Error::UnknownId(format!("indicator value `{i}`")))
    }

    pub fn indicator(&self, index: u32) -> Indicator {
        self.indicators[index as usize]
    }

    /// Index of the fresh value, if present.
    pub fn fresh_index(&self) -> Option<u32> {
        self.indicators.get_index_of(&Indicator::Fresh).map(|k| k as u32)
    }

    /// Renders atom `atom` as the set of tests it makes true, e.g. `{t0,t2}`.
    pub fn atom_name(&self, atom: u32) -> String {
        let mut out = String::from("{");
        let mut first = true;
        for (k, t) in self.tests.iter().enumerate() {
            if atom & (1 << k) != 0 {
                if !first {
                    out.push(',');
                }
                out.push_str(t.as_str());
                first = false;
            }
        }
        out.push('}');
        out
    }

    fn add(&mut self, e: &Exp) {
        e.visit(&mut |node| match &node.kind {
            ExpKind::Assert(b) | ExpKind::While(b, _) | ExpKind::If(b, _, _) => self.add_test(b),
            ExpKind::Act(a) => {
                self.actions.insert(a.clone());
            }
            ExpKind::Assign(i) => {
                self.indicators.insert(*i);
            }
            ExpKind::Goto(l) | ExpKind::Label(l) => {
                self.labels.insert(l.clone());
            }
            ExpKind::Seq(_) | ExpKind::Break | ExpKind::Return => {}
        });
    }

    fn add_test(&mut self, b: &BExp) {
        b.visit(&mut |t| match t {
            BExp::Prim(p) => {
                self.tests.insert(p.clone());
            }
            BExp::IndEq(i) => {
                self.indicators.insert(*i);
            }
            _ => {}
        });
    }
}

/// Collects Σ, T, L and I from both programs, then appends the fresh
/// indicator value.
pub fn collect_alphabets(e: &Exp, f: &Exp) -> Alphabets {
    let mut alphabets = Alphabets::default();
    alphabets.add(e);
    alphabets.add(f);
    alphabets.indicators.shift_remove(&Indicator::Fresh);
    alphabets.indicators.insert(Indicator::Fresh);
    alphabets
}
