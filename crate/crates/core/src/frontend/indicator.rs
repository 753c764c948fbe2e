//! Indicator-variable detection.
//!
//! A local variable qualifies when it is integer-typed, declared once, only
//! ever assigned integer literals, only ever read in `==`/`!=` comparisons
//! against literals, and used at least once after its declaration. Any
//! other mention (a call argument, arithmetic, `&v`, `v++`) disqualifies it.

use indexmap::IndexMap;
use serde::Serialize;

use crate::syntax::Loc;

use super::parser::{Cond, CondKind, Init, SourceFunction, Stmt, StmtKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub name: String,
    pub loc: Loc,
    /// Why the variable does not qualify, or why it lost the tie-break.
    pub reason: Option<String>,
    /// Whether it passes every rule.
    pub eligible: bool,
}

impl Candidate {
    pub fn qualifies(&self) -> bool {
        self.eligible
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndicatorAnalysis {
    pub chosen: Option<String>,
    /// Every local variable, in declaration order.
    pub candidates: Vec<Candidate>,
}

#[derive(Default)]
struct Usage {
    loc: Loc,
    declared: bool,
    integer: bool,
    uses: usize,
    violation: Option<String>,
}

impl Usage {
    fn violate(&mut self, why: impl FnOnce() -> String) {
        if self.violation.is_none() {
            self.violation = Some(why());
        }
    }
}

#[derive(Default)]
struct Scan {
    vars: IndexMap<String, Usage>,
}

impl Scan {
    fn var(&mut self, name: &str) -> &mut Usage {
        self.vars.entry(name.to_string()).or_default()
    }

    fn escapes(&mut self, idents: &[String], text: &str) {
        for x in idents {
            self.var(x).violate(|| format!("used in `{text}`"));
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Decl { integer, declarators } => {
                for d in declarators {
                    let u = self.var(&d.name);
                    if u.declared {
                        u.violate(|| "declared more than once".into());
                    } else {
                        u.declared = true;
                        u.integer = *integer;
                        u.loc = d.loc;
                    }
                    if let Some(Init::Opaque(o)) = &d.init {
                        self.var(&d.name).violate(|| format!("initialized with `{}`", o.text));
                        self.escapes(&o.idents, &o.text);
                    }
                }
            }
            StmtKind::Assign { var, .. } => self.var(var).uses += 1,
            StmtKind::Opaque(o) | StmtKind::Return(Some(o)) => self.escapes(&o.idents, &o.text),
            StmtKind::If(c, t, e) => {
                self.cond(c);
                self.stmt(t);
                if let Some(e) = e {
                    self.stmt(e);
                }
            }
            StmtKind::While(c, b) | StmtKind::DoWhile(b, c) => {
                self.cond(c);
                self.stmt(b);
            }
            StmtKind::For { init, cond, step, body } => {
                for s in [init, step].into_iter().flatten() {
                    self.stmt(s);
                }
                if let Some(c) = cond {
                    self.cond(c);
                }
                self.stmt(body);
            }
            StmtKind::Labeled(_, s) => self.stmt(s),
            StmtKind::Block(v) => v.iter().for_each(|s| self.stmt(s)),
            StmtKind::Action(_)
            | StmtKind::Goto(_)
            | StmtKind::Break
            | StmtKind::Return(None)
            | StmtKind::Empty => {}
        }
    }

    fn cond(&mut self, c: &Cond) {
        match &c.kind {
            CondKind::Compare { var, .. } => self.var(var).uses += 1,
            CondKind::Not(a) => self.cond(a),
            CondKind::And(a, b) | CondKind::Or(a, b) => {
                self.cond(a);
                self.cond(b);
            }
            CondKind::Opaque(o) => self.escapes(&o.idents, &o.text),
            CondKind::Test(_) | CondKind::Const(_) => {}
        }
    }
}

/// Classifies every local variable of `f`.
pub fn analyze_indicator(f: &SourceFunction) -> IndicatorAnalysis {
    let mut scan = Scan::default();
    f.body.iter().for_each(|s| scan.stmt(s));
    let mut chosen: Option<String> = None;
    let mut candidates = Vec::new();
    for (name, u) in scan.vars {
        if !u.declared {
            continue;
        }
        let failure = if !u.integer {
            Some("not integer-typed".to_string())
        } else if let Some(v) = u.violation {
            Some(v)
        } else if u.uses == 0 {
            Some("never assigned or compared after its declaration".to_string())
        } else {
            None
        };
        let eligible = failure.is_none();
        let reason = match (&failure, &chosen) {
            (Some(_), _) => failure,
            (None, Some(first)) => Some(format!("qualifies, but `{first}` is declared first")),
            (None, None) => {
                chosen = Some(name.clone());
                None
            }
        };
        candidates.push(Candidate { name, loc: u.loc, reason, eligible });
    }
    IndicatorAnalysis { chosen, candidates }
}

/// The first qualifying variable by declaration order, if any.
pub fn detect_indicator(f: &SourceFunction) -> Option<String> {
    analyze_indicator(f).chosen
}
