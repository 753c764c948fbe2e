//! Guarded words and continuations, over alphabet indices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolean::Atom;
use crate::syntax::Alphabets;

/// How control flow proceeds after a trace ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Continuation {
    /// Normal completion with the given indicator value.
    Accept(u32),
    /// Exit the innermost enclosing loop with the given indicator value.
    Break(u32),
    Return,
    /// Resume at a label (first field) with an indicator value.
    Jump(u32, u32),
}

impl Continuation {
    /// Loop exit: `Break(i)` becomes `Accept(i)`, everything else is kept.
    pub fn floor(self) -> Continuation {
        match self {
            Continuation::Break(i) => Continuation::Accept(i),
            c => c,
        }
    }

    pub fn display<'a>(&'a self, alphabets: &'a Alphabets) -> impl fmt::Display + 'a {
        DisplayCont(self, alphabets)
    }
}

struct DisplayCont<'a>(&'a Continuation, &'a Alphabets);

impl fmt::Display for DisplayCont<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.1;
        match *self.0 {
            Continuation::Accept(i) => write!(f, "acc {}", a.indicator(i)),
            Continuation::Break(i) => write!(f, "brk {}", a.indicator(i)),
            Continuation::Return => f.write_str("ret"),
            Continuation::Jump(l, i) => write!(f, "jmp({}, {})", a.labels[l as usize], a.indicator(i)),
        }
    }
}

/// An alternating sequence `α₁ p₁ α₂ … pₙ αₙ₊₁` of atoms and action indices.
///
/// Stored flat: even positions are atoms, odd positions actions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GuardedWord(Vec<u32>);

impl GuardedWord {
    pub fn atom(atom: Atom) -> GuardedWord {
        GuardedWord(vec![atom.0])
    }

    /// Builds a word from its first atom and `(action, atom)` steps.
    pub fn from_steps(first: Atom, steps: impl IntoIterator<Item = (u32, Atom)>) -> GuardedWord {
        let mut w = GuardedWord::atom(first);
        for (p, a) in steps {
            w.push(p, a);
        }
        w
    }

    /// Wraps a flat atom/action sequence of odd length.
    pub(crate) fn from_flat(v: Vec<u32>) -> GuardedWord {
        debug_assert!(v.len() % 2 == 1);
        GuardedWord(v)
    }

    pub fn push(&mut self, action: u32, atom: Atom) {
        self.0.push(action);
        self.0.push(atom.0);
    }

    pub fn first_atom(&self) -> Atom {
        Atom(self.0[0])
    }

    pub fn last_atom(&self) -> Atom {
        Atom(*self.0.last().unwrap())
    }

    pub fn n_actions(&self) -> usize {
        self.0.len() / 2
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.0.iter().step_by(2).map(|&a| Atom(a))
    }

    pub fn actions(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().skip(1).step_by(2).copied()
    }

    /// The `(action, atom)` pairs after the first atom.
    pub fn steps(&self) -> impl Iterator<Item = (u32, Atom)> + '_ {
        self.0[1..].chunks(2).map(|c| (c[0], Atom(c[1])))
    }

    /// Coalesced product `wα · αx = wαx`; `None` if the boundary atoms differ.
    pub fn coalesce(&self, other: &GuardedWord) -> Option<GuardedWord> {
        if self.last_atom() != other.first_atom() {
            return None;
        }
        let mut v = Vec::with_capacity(self.0.len() + other.0.len() - 1);
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0[1..]);
        Some(GuardedWord(v))
    }

    pub fn display<'a>(&'a self, alphabets: &'a Alphabets) -> impl fmt::Display + 'a {
        DisplayWord(self, alphabets)
    }
}

impl fmt::Debug for GuardedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0[0])?;
        for (p, a) in self.steps() {
            write!(f, " p{} #{}", p, a.0)?;
        }
        Ok(())
    }
}

struct DisplayWord<'a>(&'a GuardedWord, &'a Alphabets);

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.1;
        write!(f, "{}", a.atom_name(self.0.first_atom().0))?;
        for (p, atom) in self.0.steps() {
            write!(f, " {} {}", a.actions[p as usize], a.atom_name(atom.0))?;
        }
        Ok(())
    }
}
