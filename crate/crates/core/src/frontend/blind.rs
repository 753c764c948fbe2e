//! Textual auto-blinding.
//!
//! Statements and conditions outside the subset are replaced by `pact(n)`
//! and `pbool(n)`, with `n` drawn from a table keyed by their normalized
//! source text. The same table is used for both functions of a comparison,
//! so identical text gets the same id. Texts that differ but mean the same
//! (`a++` and `a += 1`) get different ids, which can only make the checker
//! report "inequivalent".

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::syntax::Loc;

use super::parser::{CmpOp, Cond, CondKind, Init, SourceFunction, Stmt, StmtKind};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindingTable {
    /// Statement text to action id.
    pub actions: IndexMap<String, i64>,
    /// Condition text to test id.
    pub tests: IndexMap<String, i64>,
    /// Next id to hand out.
    next: i64,
}

impl BlindingTable {
    /// An empty table whose ids start above `max_existing`.
    pub fn above(max_existing: i64) -> BlindingTable {
        BlindingTable { next: max_existing + 1, ..Default::default() }
    }

    pub fn action(&mut self, text: &str) -> i64 {
        let key = normalize(text);
        if let Some(&id) = self.actions.get(&key) {
            return id;
        }
        let id = self.fresh();
        self.actions.insert(key, id);
        id
    }

    pub fn test(&mut self, text: &str) -> i64 {
        let key = normalize(text);
        if let Some(&id) = self.tests.get(&key) {
            return id;
        }
        let id = self.fresh();
        self.tests.insert(key, id);
        id
    }

    pub fn lookup_action(&self, text: &str) -> Option<i64> {
        self.actions.get(&normalize(text)).copied()
    }

    pub fn lookup_test(&self, text: &str) -> Option<i64> {
        self.tests.get(&normalize(text)).copied()
    }

    fn fresh(&mut self) -> i64 {
        let id = self.next;
        self.next += 1;
        id
    }
}

/// Collapses whitespace runs and strips a trailing semicolon.
pub fn normalize(text: &str) -> String {
    let t = text.split_whitespace().collect::<Vec<_>>().join(" ");
    t.trim_end_matches(';').trim_end().to_string()
}

/// Text used to key an assignment or comparison of a non-indicator.
pub(crate) fn assign_text(var: &str, value: &str) -> String {
    format!("{var} = {value}")
}

pub(crate) fn compare_text(var: &str, op: CmpOp, value: i64) -> String {
    let op = if op == CmpOp::Eq { "==" } else { "!=" };
    format!("{var} {op} {value}")
}

pub(crate) fn init_text(init: &Init) -> String {
    match init {
        Init::Int(v) => v.to_string(),
        Init::Opaque(o) => o.text.clone(),
    }
}

/// Blinds both functions against one table, detecting each indicator
/// automatically.
pub fn auto_blind(a: &SourceFunction, b: &SourceFunction) -> (BlindingTable, SourceFunction, SourceFunction) {
    let ia = super::detect_indicator(a);
    let ib = super::detect_indicator(b);
    auto_blind_with(a, b, ia.as_deref(), ib.as_deref())
}

/// Blinds both functions against one table, keeping the given indicator
/// variables.
pub fn auto_blind_with(
    a: &SourceFunction,
    b: &SourceFunction,
    ind_a: Option<&str>,
    ind_b: Option<&str>,
) -> (BlindingTable, SourceFunction, SourceFunction) {
    let mut table = table_for(&[a, b]);
    let a = blind_function(a, ind_a, &mut table);
    let b = blind_function(b, ind_b, &mut table);
    (table, a, b)
}

/// An empty table for blinding `fns`: its ids start above every `pact`
/// and `pbool` id already present.
pub fn table_for(fns: &[&SourceFunction]) -> BlindingTable {
    BlindingTable::above(fns.iter().map(|f| max_id(&f.body)).max().unwrap_or(0).max(0))
}

/// Blinds a single function, extending `table`.
pub fn blind_function(f: &SourceFunction, indicator: Option<&str>, table: &mut BlindingTable) -> SourceFunction {
    let mut b = Blinder { indicator, table };
    SourceFunction { name: f.name.clone(), body: f.body.iter().map(|s| b.stmt(s)).collect(), loc: f.loc }
}

fn max_id(stmts: &[Stmt]) -> i64 {
    fn cond(c: &Cond) -> i64 {
        match &c.kind {
            CondKind::Test(n) => *n,
            CondKind::Not(a) => cond(a),
            CondKind::And(a, b) | CondKind::Or(a, b) => cond(a).max(cond(b)),
            _ => i64::MIN,
        }
    }
    fn stmt(s: &Stmt) -> i64 {
        match &s.kind {
            StmtKind::Action(n) => *n,
            StmtKind::If(c, t, e) => cond(c).max(stmt(t)).max(e.as_deref().map_or(i64::MIN, stmt)),
            StmtKind::While(c, b) | StmtKind::DoWhile(b, c) => cond(c).max(stmt(b)),
            StmtKind::For { init, cond: c, step, body } => [init, step]
                .into_iter()
                .flatten()
                .map(|s| stmt(s))
                .chain(c.iter().map(cond))
                .fold(stmt(body), i64::max),
            StmtKind::Labeled(_, s) => stmt(s),
            StmtKind::Block(v) => max_id(v),
            _ => i64::MIN,
        }
    }
    stmts.iter().map(stmt).max().unwrap_or(i64::MIN)
}

struct Blinder<'a> {
    indicator: Option<&'a str>,
    table: &'a mut BlindingTable,
}

impl Blinder<'_> {
    fn is_ind(&self, var: &str) -> bool {
        self.indicator == Some(var)
    }

    fn action(&mut self, text: &str, loc: Loc) -> Stmt {
        Stmt { kind: StmtKind::Action(self.table.action(text)), loc }
    }

    fn stmt(&mut self, s: &Stmt) -> Stmt {
        let loc = s.loc;
        let boxed = |b: &mut Self, s: &Stmt| Box::new(b.stmt(s));
        let kind = match &s.kind {
            StmtKind::Assign { var, value } if !self.is_ind(var) => {
                return self.action(&assign_text(var, &value.to_string()), loc);
            }
            StmtKind::Opaque(o) => return self.action(&o.text, loc),
            StmtKind::Return(Some(o)) => StmtKind::Block(vec![
                self.action(&format!("return {}", o.text), loc),
                Stmt { kind: StmtKind::Return(None), loc },
            ]),
            StmtKind::Decl { integer, declarators } => {
                let mut out = Vec::new();
                for d in declarators {
                    if self.is_ind(&d.name) {
                        out.push(Stmt {
                            kind: StmtKind::Decl { integer: *integer, declarators: vec![d.clone()] },
                            loc: d.loc,
                        });
                    } else if let Some(init) = &d.init {
                        out.push(self.action(&assign_text(&d.name, &init_text(init)), d.loc));
                    }
                }
                match out.len() {
                    0 => StmtKind::Empty,
                    1 => return out.pop().unwrap(),
                    _ => StmtKind::Block(out),
                }
            }
            StmtKind::If(c, t, e) => StmtKind::If(self.cond(c), boxed(self, t), e.as_deref().map(|e| boxed(self, e))),
            StmtKind::While(c, b) => StmtKind::While(self.cond(c), boxed(self, b)),
            StmtKind::DoWhile(b, c) => {
                let b = boxed(self, b);
                StmtKind::DoWhile(b, self.cond(c))
            }
            StmtKind::For { init, cond, step, body } => StmtKind::For {
                init: init.as_deref().map(|s| boxed(self, s)),
                cond: cond.as_ref().map(|c| self.cond(c)),
                step: step.as_deref().map(|s| boxed(self, s)),
                body: boxed(self, body),
            },
            StmtKind::Labeled(l, s) => StmtKind::Labeled(l.clone(), boxed(self, s)),
            StmtKind::Block(v) => StmtKind::Block(v.iter().map(|s| self.stmt(s)).collect()),
            other => other.clone(),
        };
        Stmt { kind, loc }
    }

    fn cond(&mut self, c: &Cond) -> Cond {
        let loc = c.loc;
        let kind = match &c.kind {
            CondKind::Compare { var, op, value } if !self.is_ind(var) => {
                CondKind::Test(self.table.test(&compare_text(var, *op, *value)))
            }
            CondKind::Opaque(o) => CondKind::Test(self.table.test(&o.text)),
            CondKind::Not(a) => CondKind::Not(Box::new(self.cond(a))),
            CondKind::And(a, b) => CondKind::And(Box::new(self.cond(a)), Box::new(self.cond(b))),
            CondKind::Or(a, b) => CondKind::Or(Box::new(self.cond(a)), Box::new(self.cond(b))),
            other => other.clone(),
        };
        Cond { kind, loc }
    }
}
