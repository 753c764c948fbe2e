//! Thompson construction: CF-GKAT expressions to CF-GKAT automata.
//!
//! All sub-automata share one state arena, so the disjoint unions of the
//! construction need no renumbering. Each fragment remembers which of its
//! states still hold `acc` or `brk` entries; sequencing and loops only
//! patch those, which keeps long programs near-linear to compile.

use crate::automata::{continue_into, floor_in_place, iterated_start, CfAutomaton, Dynamics, Entry, Start};
use crate::boolean::denote;
use crate::error::Error;
use crate::syntax::{validate, Alphabets, Exp, ExpKind, Label};
use crate::word::Continuation;

/// Compiles a valid program into an automaton with start dynamics.
pub fn thompson(e: &Exp, alphabets: &Alphabets) -> Result<CfAutomaton, Error> {
    let report = validate(e);
    if !report.is_valid() {
        return Err(Error::InvalidProgram(report));
    }
    let mut b = Builder {
        alphabets,
        n_ind: alphabets.n_indicators(),
        n_atoms: alphabets.n_atoms(),
        states: Vec::new(),
        in_brk: Vec::new(),
    };
    let frag = b.build(e)?;
    let mut jumps = vec![Dynamics::reject(b.n_ind, b.n_atoms); alphabets.labels.len()];
    for (l, d) in frag.labels {
        jumps[l as usize] = d;
    }
    Ok(CfAutomaton {
        n_indicators: b.n_ind,
        n_atoms: b.n_atoms,
        states: b.states,
        jumps,
        start: Start::Dynamics(frag.start),
    })
}

/// Whether `Label(ℓ)` occurs in `e`.
pub fn contains_label(e: &Exp, label: &Label) -> bool {
    e.contains_label(label)
}

struct Fragment {
    start: Dynamics,
    /// Jump-map rows for the labels defined inside the fragment.
    labels: Vec<(u32, Dynamics)>,
    /// States with at least one `acc` entry.
    acc: Vec<u32>,
    /// States with at least one `brk` entry.
    brk: Vec<u32>,
}

struct Builder<'a> {
    alphabets: &'a Alphabets,
    n_ind: usize,
    n_atoms: usize,
    states: Vec<Dynamics>,
    in_brk: Vec<bool>,
}

impl Builder<'_> {
    fn emit(&self, f: impl Fn(u32) -> Continuation) -> Fragment {
        Fragment {
            start: Dynamics::from_fn(self.n_ind, self.n_atoms, |i, _| Entry::Cont(f(i))),
            labels: Vec::new(),
            acc: Vec::new(),
            brk: Vec::new(),
        }
    }

    fn build(&mut self, e: &Exp) -> Result<Fragment, Error> {
        let a = self.alphabets;
        Ok(match &e.kind {
            ExpKind::Break => self.emit(Continuation::Break),
            ExpKind::Return => self.emit(|_| Continuation::Return),
            ExpKind::Goto(l) => {
                let l = a.label_index(l)?;
                self.emit(|i| Continuation::Jump(l, i))
            }
            ExpKind::Assign(v) => {
                let j = a.indicator_index(v)?;
                self.emit(|_| Continuation::Accept(j))
            }
            ExpKind::Assert(b) => {
                let d = denote(b, a)?;
                let mut frag = self.emit(Continuation::Accept);
                frag.start = Dynamics::from_fn(self.n_ind, self.n_atoms, |i, al| {
                    if d.contains(i, al) {
                        Entry::Cont(Continuation::Accept(i))
                    } else {
                        Entry::Reject
                    }
                });
                frag
            }
            ExpKind::Act(p) => {
                let action = a.action_index(p)?;
                let state = self.states.len() as u32;
                self.states.push(Dynamics::accept(self.n_ind, self.n_atoms));
                self.in_brk.push(false);
                Fragment {
                    start: Dynamics::from_fn(self.n_ind, self.n_atoms, |ind, _| Entry::Step { action, state, ind }),
                    labels: Vec::new(),
                    acc: vec![state],
                    brk: Vec::new(),
                }
            }
            ExpKind::Label(l) => {
                let l = a.label_index(l)?;
                let mut frag = self.emit(Continuation::Accept);
                frag.labels.push((l, frag.start.clone()));
                frag
            }
            ExpKind::If(b, then, els) => {
                let d = denote(b, a)?;
                let mut t = self.build(then)?;
                let f = self.build(els)?;
                let start = Dynamics::from_fn(self.n_ind, self.n_atoms, |i, al| {
                    if d.contains(i, al) {
                        t.start.get(i, al)
                    } else {
                        f.start.get(i, al)
                    }
                });
                t.labels.extend(f.labels);
                t.acc.extend(f.acc);
                t.brk.extend(f.brk);
                Fragment { start, ..t }
            }
            ExpKind::Seq(items) => {
                let mut rev = items.iter().rev();
                let Some(last) = rev.next() else {
                    return Ok(self.emit(Continuation::Accept));
                };
                let mut rest = self.build(last)?;
                for item in rev {
                    let head = self.build(item)?;
                    rest = self.sequence(head, rest);
                }
                rest
            }
            ExpKind::While(b, body) => {
                let d = denote(b, a)?;
                let body = self.build(body)?;
                let ib = iterated_start(&body.start, &d);
                for &s in &body.acc {
                    continue_into(&mut self.states[s as usize], &ib);
                }
                let mut candidates = body.acc;
                candidates.extend(body.brk);
                candidates.sort_unstable();
                candidates.dedup();
                for &s in &candidates {
                    floor_in_place(&mut self.states[s as usize]);
                    self.in_brk[s as usize] = false;
                }
                let labels = body
                    .labels
                    .into_iter()
                    .map(|(l, mut d)| {
                        continue_into(&mut d, &ib);
                        floor_in_place(&mut d);
                        (l, d)
                    })
                    .collect();
                let mut start = ib;
                floor_in_place(&mut start);
                candidates.retain(|&s| self.states[s as usize].has_accept());
                Fragment { start, labels, acc: candidates, brk: Vec::new() }
            }
        })
    }

    /// `head ; rest`
    fn sequence(&mut self, head: Fragment, mut rest: Fragment) -> Fragment {
        let mut start = head.start;
        continue_into(&mut start, &rest.start);
        let mut acc = Vec::new();
        let mut brk = head.brk;
        for s in head.acc {
            let d = &mut self.states[s as usize];
            continue_into(d, &rest.start);
            if d.has_accept() {
                acc.push(s);
            }
            if d.has_break() && !std::mem::replace(&mut self.in_brk[s as usize], true) {
                brk.push(s);
            }
        }
        let mut labels: Vec<_> = head
            .labels
            .into_iter()
            .map(|(l, mut d)| {
                continue_into(&mut d, &rest.start);
                (l, d)
            })
            .collect();
        labels.append(&mut rest.labels);
        acc.append(&mut rest.acc);
        brk.append(&mut rest.brk);
        Fragment { start, labels, acc, brk }
    }
}
