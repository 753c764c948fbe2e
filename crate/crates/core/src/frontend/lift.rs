//! Lifting statement trees to programs, with loop normalization.

use crate::syntax::{BExp, Exp, Loc};

use super::blind::{assign_text, compare_text, init_text, BlindingTable};
use super::parser::{CmpOp, Cond, CondKind, SourceFunction, Stmt, StmtKind};
use super::FrontendError;

/// Lifts `f` to a program.
///
/// `indicator` names the variable whose assignments and comparisons become
/// `x := n` and `x = n`. Without `blinding`, every other statement must
/// already be `pact`/`pbool` or control flow; with it, other statements are
/// looked up by their normalized text.
///
/// `for (init; c; step) body` becomes `init; while c { body; step }` with a
/// missing condition read as true. `do body while (c)` becomes
/// `body; while c { body }`, or just `body` when `c` is the literal `0`.
/// Return values are ignored.
pub fn lift_to_exp(
    f: &SourceFunction,
    indicator: Option<&str>,
    blinding: Option<&BlindingTable>,
) -> Result<Exp, FrontendError> {
    let l = Lifter { indicator, blinding };
    Ok(Exp::seq(l.stmts(&f.body)?).at(f.loc))
}

struct Lifter<'a> {
    indicator: Option<&'a str>,
    blinding: Option<&'a BlindingTable>,
}

fn opt_stmt_contains(s: &Option<Box<Stmt>>, p: &impl Fn(&StmtKind) -> bool, into_loops: bool) -> bool {
    s.as_deref().is_some_and(|s| contains(s, p, into_loops))
}

/// Whether a statement satisfying `p` occurs in `s`; loops are entered
/// only when `into_loops` is set.
fn contains(s: &Stmt, p: &impl Fn(&StmtKind) -> bool, into_loops: bool) -> bool {
    if p(&s.kind) {
        return true;
    }
    match &s.kind {
        StmtKind::If(_, t, e) => contains(t, p, into_loops) || opt_stmt_contains(e, p, into_loops),
        StmtKind::Labeled(_, s) => contains(s, p, into_loops),
        StmtKind::Block(v) => v.iter().any(|s| contains(s, p, into_loops)),
        StmtKind::While(_, b) | StmtKind::DoWhile(b, _) => into_loops && contains(b, p, into_loops),
        StmtKind::For { init, step, body, .. } => {
            into_loops
                && (contains(body, p, into_loops)
                    || opt_stmt_contains(init, p, into_loops)
                    || opt_stmt_contains(step, p, into_loops))
        }
        _ => false,
    }
}

impl Lifter<'_> {
    fn is_ind(&self, var: &str) -> bool {
        self.indicator == Some(var)
    }

    fn stmts(&self, v: &[Stmt]) -> Result<Vec<Exp>, FrontendError> {
        v.iter().map(|s| self.stmt(s)).collect()
    }

    fn opaque_action(&self, text: &str, loc: Loc) -> Result<Exp, FrontendError> {
        match self.blinding.and_then(|t| t.lookup_action(text)) {
            Some(id) => Ok(Exp::act(&id.to_string()).at(loc)),
            None => Err(FrontendError::NonBlindableStatement { loc, text: text.to_string() }),
        }
    }

    fn opaque_test(&self, text: &str, loc: Loc) -> Result<BExp, FrontendError> {
        match self.blinding.and_then(|t| t.lookup_test(text)) {
            Some(id) => Ok(BExp::prim(&id.to_string())),
            None => Err(FrontendError::NonBlindableStatement { loc, text: text.to_string() }),
        }
    }

    fn stmt(&self, s: &Stmt) -> Result<Exp, FrontendError> {
        let loc = s.loc;
        let e = match &s.kind {
            StmtKind::Action(n) => Exp::act(&n.to_string()),
            StmtKind::Assign { var, value } if self.is_ind(var) => Exp::assign(*value),
            StmtKind::Assign { var, value } => return self.opaque_action(&assign_text(var, &value.to_string()), loc),
            StmtKind::Decl { declarators, .. } => {
                let mut out = Vec::new();
                for d in declarators {
                    match &d.init {
                        None => {}
                        Some(super::parser::Init::Int(v)) if self.is_ind(&d.name) => {
                            out.push(Exp::assign(*v).at(d.loc))
                        }
                        Some(init) => out.push(self.opaque_action(&assign_text(&d.name, &init_text(init)), d.loc)?),
                    }
                }
                Exp::seq(out)
            }
            StmtKind::If(c, t, e) => {
                let els = match e {
                    Some(e) => self.stmt(e)?,
                    None => Exp::skip().at(loc),
                };
                Exp::if_(self.cond(c)?, self.stmt(t)?, els)
            }
            StmtKind::While(c, b) => Exp::while_(self.cond(c)?, self.stmt(b)?),
            StmtKind::DoWhile(b, c) => {
                // a break here would leave the do-while, not the unrolled copy
                if contains(b, &|k| matches!(k, StmtKind::Break), false) {
                    return Err(FrontendError::DoWhileWithBreakOrLabel { loc });
                }
                if c.kind == CondKind::Const(false) {
                    self.stmt(b)?
                } else {
                    if contains(b, &|k| matches!(k, StmtKind::Labeled(..)), true) {
                        return Err(FrontendError::DoWhileWithBreakOrLabel { loc });
                    }
                    let body = self.stmt(b)?;
                    Exp::seq2(body.clone(), Exp::while_(self.cond(c)?, body).at(loc))
                }
            }
            StmtKind::For { init, cond, step, body } => {
                let guard = match cond {
                    Some(c) => self.cond(c)?,
                    None => BExp::True,
                };
                let mut inner = vec![self.stmt(body)?];
                if let Some(step) = step {
                    inner.push(self.stmt(step)?);
                }
                let lp = Exp::while_(guard, Exp::seq(inner)).at(loc);
                match init {
                    Some(init) => Exp::seq2(self.stmt(init)?, lp),
                    None => lp,
                }
            }
            StmtKind::Goto(l) => Exp::goto(l),
            StmtKind::Labeled(l, s) => Exp::seq2(Exp::label(l).at(loc), self.stmt(s)?),
            StmtKind::Break => Exp::brk(),
            StmtKind::Return(_) => Exp::ret(),
            StmtKind::Block(v) => Exp::seq(self.stmts(v)?),
            StmtKind::Empty => Exp::skip(),
            StmtKind::Opaque(o) => return self.opaque_action(&o.text, loc),
        };
        Ok(e.at(loc))
    }

    fn cond(&self, c: &Cond) -> Result<BExp, FrontendError> {
        Ok(match &c.kind {
            CondKind::Test(n) => BExp::prim(&n.to_string()),
            CondKind::Compare { var, op, value } if self.is_ind(var) => match op {
                CmpOp::Eq => BExp::ind_eq(*value),
                CmpOp::Ne => BExp::not(BExp::ind_eq(*value)),
            },
            CondKind::Compare { var, op, value } => self.opaque_test(&compare_text(var, *op, *value), c.loc)?,
            CondKind::Not(a) => BExp::not(self.cond(a)?),
            CondKind::And(a, b) => BExp::and(self.cond(a)?, self.cond(b)?),
            CondKind::Or(a, b) => BExp::or(self.cond(a)?, self.cond(b)?),
            CondKind::Const(true) => BExp::True,
            CondKind::Const(false) => BExp::False,
            CondKind::Opaque(o) => self.opaque_test(&o.text, c.loc)?,
        })
    }
}
