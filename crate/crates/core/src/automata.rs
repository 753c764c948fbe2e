//! CF-GKAT dynamics and automata, and their lowering to GKAT automata.
//!
//! A [`Dynamics`] is a dense table over `I × At`, indexed `i * |At| + α`.
//! States live in an arena and are referred to by `u32` ids.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boolean::{Atom, TestDenotation};
use crate::syntax::Alphabets;
use crate::word::{Continuation, GuardedWord};

/// One entry of a dynamics table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Entry {
    Reject,
    Cont(Continuation),
    /// Perform `action`, move to `state`, set the indicator to `ind`.
    Step { action: u32, state: u32, ind: u32 },
}

impl Entry {
    pub fn is_accept(self) -> bool {
        matches!(self, Entry::Cont(Continuation::Accept(_)))
    }

    pub fn is_break(self) -> bool {
        matches!(self, Entry::Cont(Continuation::Break(_)))
    }
}

/// A function `I × At → ⊥ + C + Σ×S×I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dynamics {
    n_atoms: usize,
    entries: Vec<Entry>,
}

impl Dynamics {
    pub fn from_fn(n_ind: usize, n_atoms: usize, mut f: impl FnMut(u32, Atom) -> Entry) -> Dynamics {
        let mut entries = Vec::with_capacity(n_ind * n_atoms);
        for i in 0..n_ind as u32 {
            for a in 0..n_atoms as u32 {
                entries.push(f(i, Atom(a)));
            }
        }
        Dynamics { n_atoms, entries }
    }

    pub fn constant(n_ind: usize, n_atoms: usize, e: Entry) -> Dynamics {
        Dynamics { n_atoms, entries: vec![e; n_ind * n_atoms] }
    }

    pub fn reject(n_ind: usize, n_atoms: usize) -> Dynamics {
        Dynamics::constant(n_ind, n_atoms, Entry::Reject)
    }

    /// `(i, α) ↦ acc i`
    pub fn accept(n_ind: usize, n_atoms: usize) -> Dynamics {
        Dynamics::from_fn(n_ind, n_atoms, |i, _| Entry::Cont(Continuation::Accept(i)))
    }

    pub fn n_indicators(&self) -> usize {
        self.entries.len() / self.n_atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn get(&self, i: u32, atom: Atom) -> Entry {
        self.entries[i as usize * self.n_atoms + atom.index()]
    }

    pub fn set(&mut self, i: u32, atom: Atom, e: Entry) {
        self.entries[i as usize * self.n_atoms + atom.index()] = e;
    }

    /// Entries in `(i, α)` order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Atom, Entry)> + '_ {
        let n = self.n_atoms;
        self.entries.iter().enumerate().map(move |(k, &e)| ((k / n) as u32, Atom((k % n) as u32), e))
    }

    pub fn has_accept(&self) -> bool {
        self.entries.iter().any(|e| e.is_accept())
    }

    pub fn has_break(&self) -> bool {
        self.entries.iter().any(|e| e.is_break())
    }

    pub fn is_reject(&self) -> bool {
        self.entries.iter().all(|e| *e == Entry::Reject)
    }
}

/// One step of an iterated function over a finite domain `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterStep<E> {
    Reject,
    Exit(E),
    /// Keep iterating from this domain element.
    Continue(usize),
}

/// Iteration lifting: follows `h` from every `x` until an exit value is
/// reached. Revisiting an element on the current path means the iteration
/// never exits, which yields `None` (rejection).
///
/// Each element is resolved once; `h` is called at most `n` times.
pub fn iterate<E: Clone>(n: usize, mut h: impl FnMut(usize) -> IterStep<E>) -> Vec<Option<E>> {
    #[derive(Clone)]
    enum Cell<E> {
        Unresolved,
        InProgress,
        Resolved(Option<E>),
    }
    let mut memo: Vec<Cell<E>> = vec![Cell::Unresolved; n];
    let mut path = Vec::new();
    for x in 0..n {
        let mut cur = x;
        let result = loop {
            match &memo[cur] {
                Cell::Resolved(r) => break r.clone(),
                Cell::InProgress => break None,
                Cell::Unresolved => {}
            }
            memo[cur] = Cell::InProgress;
            path.push(cur);
            match h(cur) {
                IterStep::Reject => break None,
                IterStep::Exit(e) => break Some(e),
                IterStep::Continue(y) => cur = y,
            }
        };
        for y in path.drain(..) {
            memo[y] = Cell::Resolved(result.clone());
        }
    }
    memo.into_iter()
        .map(|c| match c {
            Cell::Resolved(r) => r,
            _ => unreachable!("every element is resolved"),
        })
        .collect()
}

/// Jump resolution: chases `jmp(ℓ′, i′)` entries through the jump map at a
/// fixed atom until a non-jump entry. Cycles of jumps become `⊥`.
pub fn resolve_jumps(jumps: &[Dynamics]) -> Vec<Dynamics> {
    let Some(first) = jumps.first() else { return Vec::new() };
    let (n_ind, n_atoms) = (first.n_indicators(), first.n_atoms());
    let per_label = n_ind * n_atoms;
    let resolved = iterate(jumps.len() * per_label, |x| {
        let (l, rest) = (x / per_label, x % per_label);
        match jumps[l].entries[rest] {
            Entry::Cont(Continuation::Jump(l2, i2)) => {
                IterStep::Continue(l2 as usize * per_label + i2 as usize * n_atoms + rest % n_atoms)
            }
            e => IterStep::Exit(e),
        }
    });
    resolved
        .chunks(per_label)
        .map(|chunk| Dynamics { n_atoms, entries: chunk.iter().map(|e| e.unwrap_or(Entry::Reject)).collect() })
        .collect()
}

/// Uniform continuation `h₁[h₂]`: every `acc i′` entry of `h₁` at `(i, α)`
/// is replaced by `h₂(i′, α)`.
pub fn uniform_continuation(h1: &Dynamics, h2: &Dynamics) -> Dynamics {
    let mut out = h1.clone();
    continue_into(&mut out, h2);
    out
}

/// In-place `h[k]`.
pub(crate) fn continue_into(h: &mut Dynamics, k: &Dynamics) {
    let n = h.n_atoms;
    for (idx, e) in h.entries.iter_mut().enumerate() {
        if let Entry::Cont(Continuation::Accept(j)) = *e {
            *e = k.entries[j as usize * n + idx % n];
        }
    }
}

/// `⌊h⌋`: `brk i` becomes `acc i`.
pub fn floor_dynamics(h: &Dynamics) -> Dynamics {
    let mut out = h.clone();
    floor_in_place(&mut out);
    out
}

pub(crate) fn floor_in_place(h: &mut Dynamics) {
    for e in &mut h.entries {
        if let Entry::Cont(c) = *e {
            *e = Entry::Cont(c.floor());
        }
    }
}

/// Iterated start dynamics `hᵇ`: re-enters the loop body while the guard
/// holds and the body finishes without doing anything.
pub fn iterated_start(h: &Dynamics, b: &TestDenotation) -> Dynamics {
    let n = h.n_atoms;
    let resolved = iterate(h.entries.len(), |x| {
        let (i, a) = ((x / n) as u32, Atom((x % n) as u32));
        if !b.contains(i, a) {
            return IterStep::Exit(Entry::Cont(Continuation::Accept(i)));
        }
        match h.entries[x] {
            Entry::Cont(Continuation::Accept(j)) => IterStep::Continue(j as usize * n + x % n),
            e => IterStep::Exit(e),
        }
    });
    Dynamics { n_atoms: n, entries: resolved.into_iter().map(|e| e.unwrap_or(Entry::Reject)).collect() }
}

/// How an automaton starts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Start {
    State(u32),
    Dynamics(Dynamics),
}

/// A CF-GKAT automaton `⟨S, δ, start, λ⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfAutomaton {
    pub n_indicators: usize,
    pub n_atoms: usize,
    /// `δ`, one row per state.
    pub states: Vec<Dynamics>,
    /// `λ`, one row per label of the alphabet.
    pub jumps: Vec<Dynamics>,
    pub start: Start,
}

impl CfAutomaton {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    /// Replaces start dynamics `ι` by a new state `ŝ` with `δ(ŝ) = ι`.
    /// Automata that already have a start state are returned unchanged.
    pub fn add_start_state(mut self) -> CfAutomaton {
        if let Start::Dynamics(iota) = std::mem::replace(&mut self.start, Start::State(0)) {
            self.states.push(iota);
            self.start = Start::State(self.states.len() as u32 - 1);
        } else {
            unreachable!("the placeholder is never observed");
        }
        self
    }

    /// The start dynamics: `ι`, or `δ(ŝ)`.
    pub fn start_dynamics(&self) -> &Dynamics {
        match &self.start {
            Start::State(s) => &self.states[*s as usize],
            Start::Dynamics(d) => d,
        }
    }

    /// Lowering at starting indicator `i0`, resolving jumps first.
    pub fn lower(&self, i0: u32, n_actions: usize) -> GkatAutomaton {
        self.lower_with(&resolve_jumps(&self.jumps), i0, n_actions)
    }

    /// Lowering with a precomputed resolved jump map.
    ///
    /// States of the result are `S × I`, with `(s, i)` numbered
    /// `s * |I| + i`. Every state is materialized, reachable or not.
    pub fn lower_with(&self, resolved: &[Dynamics], i0: u32, n_actions: usize) -> GkatAutomaton {
        let Start::State(start) = self.start else {
            panic!("lowering requires a start state");
        };
        let n_ind = self.n_indicators;
        let mut table = Vec::with_capacity(self.states.len() * n_ind * self.n_atoms);
        for d in &self.states {
            for (_, a, e) in d.iter() {
                let e = match e {
                    Entry::Cont(Continuation::Jump(l, j)) => resolved[l as usize].get(j, a),
                    e => e,
                };
                table.push(match e {
                    Entry::Reject | Entry::Cont(Continuation::Break(_) | Continuation::Jump(..)) => {
                        GkatTransition::Reject
                    }
                    Entry::Cont(Continuation::Accept(_) | Continuation::Return) => GkatTransition::Accept,
                    Entry::Step { action, state, ind } => {
                        GkatTransition::Step { action, target: state * n_ind as u32 + ind }
                    }
                });
            }
        }
        let origin = (0..self.states.len() as u32).flat_map(|s| (0..n_ind as u32).map(move |i| (s, i))).collect();
        GkatAutomaton {
            n_actions,
            n_atoms: self.n_atoms,
            table,
            start: start * n_ind as u32 + i0,
            origin,
        }
    }

    /// Words with continuations produced from the start (`None`) or from a
    /// label, for starting indicator `i`, with at most `bound` actions.
    pub fn cont_language(
        &self,
        label: Option<u32>,
        i: u32,
        bound: usize,
    ) -> BTreeSet<(GuardedWord, Continuation)> {
        // `prefix` alternates atoms and actions and ends with an action
        fn walk(
            a: &CfAutomaton,
            d: &Dynamics,
            i: u32,
            bound: usize,
            prefix: &mut Vec<u32>,
            out: &mut BTreeSet<(GuardedWord, Continuation)>,
        ) {
            for atom in Atom::all_of(a.n_atoms) {
                match d.get(i, atom) {
                    Entry::Reject => {}
                    Entry::Cont(c) => {
                        let mut w = prefix.clone();
                        w.push(atom.0);
                        out.insert((GuardedWord::from_flat(w), c));
                    }
                    Entry::Step { action, state, ind } if bound > 0 => {
                        prefix.extend([atom.0, action]);
                        walk(a, &a.states[state as usize], ind, bound - 1, prefix, out);
                        prefix.truncate(prefix.len() - 2);
                    }
                    Entry::Step { .. } => {}
                }
            }
        }
        let d = match label {
            None => self.start_dynamics(),
            Some(l) => &self.jumps[l as usize],
        };
        let mut out = BTreeSet::new();
        walk(self, d, i, bound, &mut Vec::new(), &mut out);
        out
    }

    /// Graphviz rendering. Step edges are labeled `i,α | p,j`; continuation
    /// edges are drawn doubled into a box naming the continuation.
    pub fn to_dot(&self, alphabets: &Alphabets, name: &str) -> String {
        let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n  node [shape=circle];\n", escape(name));
        let mut rows: Vec<(String, String, &Dynamics)> = Vec::new();
        match &self.start {
            Start::Dynamics(d) => rows.push(("start".into(), "ι".into(), d)),
            Start::State(_) => {}
        }
        for (s, d) in self.states.iter().enumerate() {
            let label = match self.start {
                Start::State(st) if st as usize == s => "ŝ".to_string(),
                _ => format!("s{s}"),
            };
            rows.push((format!("s{s}"), label, d));
        }
        for (l, d) in self.jumps.iter().enumerate() {
            rows.push((format!("lambda{l}"), format!("λ({})", alphabets.labels[l]), d));
        }
        for (id, label, _) in &rows {
            let shape = if id.starts_with('s') && !id.starts_with("start") { "circle" } else { "plaintext" };
            let _ = writeln!(out, "  {id} [label=\"{}\", shape={shape}];", escape(label));
        }
        let mut sinks = BTreeSet::new();
        for (id, _, d) in &rows {
            let mut edges: Vec<(String, String, bool, Vec<String>)> = Vec::new();
            for (i, a, e) in d.iter() {
                let guard = format!("{},{}", alphabets.indicator(i), alphabets.atom_name(a.0));
                let (target, label, double) = match e {
                    Entry::Reject => continue,
                    Entry::Cont(c) => {
                        let sink = format!("c_{}", sink_id(c));
                        sinks.insert((sink.clone(), c.display(alphabets).to_string()));
                        (sink, String::new(), true)
                    }
                    Entry::Step { action, state, ind } => (
                        format!("s{state}"),
                        format!("{},{}", alphabets.actions[action as usize], alphabets.indicator(ind)),
                        false,
                    ),
                };
                match edges.iter_mut().find(|(t, l, _, _)| *t == target && *l == label) {
                    Some(edge) => edge.3.push(guard),
                    None => edges.push((target, label, double, vec![guard])),
                }
            }
            for (target, label, double, guards) in edges {
                let text = if label.is_empty() { guards.join("\\n") } else { format!("{} | {label}", guards.join("\\n")) };
                let style = if double { ", color=\"black:invis:black\"" } else { "" };
                let _ = writeln!(out, "  {id} -> {target} [label=\"{}\"{style}];", escape(&text));
            }
        }
        for (sink, label) in sinks {
            let _ = writeln!(out, "  {sink} [label=\"{}\", shape=box];", escape(&label));
        }
        out.push_str("}\n");
        out
    }
}

fn sink_id(c: Continuation) -> String {
    match c {
        Continuation::Accept(i) => format!("acc_{i}"),
        Continuation::Break(i) => format!("brk_{i}"),
        Continuation::Return => "ret".into(),
        Continuation::Jump(l, i) => format!("jmp_{l}_{i}"),
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One transition of a GKAT automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GkatTransition {
    Reject,
    Accept,
    Step { action: u32, target: u32 },
}

/// A GKAT automaton `⟨S, δ, ŝ⟩` with a dense `S × At` transition table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GkatAutomaton {
    pub n_actions: usize,
    pub n_atoms: usize,
    table: Vec<GkatTransition>,
    pub start: u32,
    /// The CF-GKAT `(state, indicator)` pair each state came from, if any.
    pub origin: Vec<(u32, u32)>,
}

impl GkatAutomaton {
    /// Builds an automaton from explicit rows (one per state, `|At|` each).
    pub fn from_rows(n_actions: usize, n_atoms: usize, rows: Vec<Vec<GkatTransition>>, start: u32) -> GkatAutomaton {
        assert!(rows.iter().all(|r| r.len() == n_atoms), "every row needs one entry per atom");
        let origin = (0..rows.len() as u32).map(|s| (s, 0)).collect();
        GkatAutomaton { n_actions, n_atoms, table: rows.concat(), start, origin }
    }

    pub fn n_states(&self) -> usize {
        self.table.len() / self.n_atoms
    }

    pub fn get(&self, s: u32, atom: Atom) -> GkatTransition {
        self.table[s as usize * self.n_atoms + atom.index()]
    }

    pub fn set(&mut self, s: u32, atom: Atom, t: GkatTransition) {
        self.table[s as usize * self.n_atoms + atom.index()] = t;
    }

    pub fn row(&self, s: u32) -> &[GkatTransition] {
        let n = self.n_atoms;
        &self.table[s as usize * n..(s as usize + 1) * n]
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        Atom::all_of(self.n_atoms)
    }

    /// States reachable from the start, in breadth-first order.
    pub fn reachable(&self) -> Vec<u32> {
        let mut seen = vec![false; self.n_states()];
        let mut order = vec![self.start];
        seen[self.start as usize] = true;
        let mut k = 0;
        while k < order.len() {
            let s = order[k];
            k += 1;
            for t in self.row(s) {
                if let GkatTransition::Step { target, .. } = *t {
                    if !std::mem::replace(&mut seen[target as usize], true) {
                        order.push(target);
                    }
                }
            }
        }
        order
    }

    /// Restriction to the states reachable from the start; the start
    /// becomes state 0. The language is unchanged.
    pub fn prune_unreachable(&self) -> GkatAutomaton {
        let order = self.reachable();
        let mut rename = vec![u32::MAX; self.n_states()];
        for (new, &old) in order.iter().enumerate() {
            rename[old as usize] = new as u32;
        }
        let mut table = Vec::with_capacity(order.len() * self.n_atoms);
        for &s in &order {
            table.extend(self.row(s).iter().map(|t| match *t {
                GkatTransition::Step { action, target } => {
                    GkatTransition::Step { action, target: rename[target as usize] }
                }
                t => t,
            }));
        }
        GkatAutomaton {
            n_actions: self.n_actions,
            n_atoms: self.n_atoms,
            table,
            start: 0,
            origin: order.iter().map(|&s| self.origin[s as usize]).collect(),
        }
    }

    /// Graphviz rendering. Nodes are `(state, i)`; accepting atoms are drawn
    /// as doubled edges into an accept marker.
    pub fn to_dot(&self, alphabets: &Alphabets, name: &str) -> String {
        let node = |s: u32| {
            let (q, i) = self.origin[s as usize];
            format!("(s{q},{})", alphabets.indicator(i))
        };
        let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n  node [shape=circle];\n", escape(name));
        let _ = writeln!(out, "  init [shape=point];\n  accept [shape=doublecircle, label=\"⊤\"];");
        let _ = writeln!(out, "  init -> q{};", self.start);
        for s in 0..self.n_states() as u32 {
            let _ = writeln!(out, "  q{s} [label=\"{}\"];", escape(&node(s)));
            let mut edges: Vec<(String, String, bool, Vec<String>)> = Vec::new();
            for a in self.atoms() {
                let (target, label, double) = match self.get(s, a) {
                    GkatTransition::Reject => continue,
                    GkatTransition::Accept => ("accept".to_string(), String::new(), true),
                    GkatTransition::Step { action, target } => {
                        (format!("q{target}"), alphabets.actions[action as usize].to_string(), false)
                    }
                };
                let guard = alphabets.atom_name(a.0);
                match edges.iter_mut().find(|(t, l, _, _)| *t == target && *l == label) {
                    Some(edge) => edge.3.push(guard),
                    None => edges.push((target, label, double, vec![guard])),
                }
            }
            for (target, label, double, guards) in edges {
                let text = if label.is_empty() { guards.join("\\n") } else { format!("{} | {label}", guards.join("\\n")) };
                let style = if double { ", color=\"black:invis:black\"" } else { "" };
                let _ = writeln!(out, "  q{s} -> {target} [label=\"{}\"{style}];", escape(&text));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Atom {
    /// All atoms of an `n_atoms`-element atom space, ascending.
    pub fn all_of(n_atoms: usize) -> impl Iterator<Item = Atom> {
        (0..n_atoms as u32).map(Atom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::denote;
    use crate::syntax::{BExp, Indicator};

    fn cont(c: Continuation) -> Entry {
        Entry::Cont(c)
    }

    #[test]
    fn iterate_chains_and_cycles() {
        // 0 -> 1 -> exit 7; 2 -> 2; 3 <-> 4; 5 rejects
        let r = iterate(6, |x| match x {
            0 => IterStep::Continue(1),
            1 => IterStep::Exit(7),
            2 => IterStep::Continue(2),
            3 => IterStep::Continue(4),
            4 => IterStep::Continue(3),
            _ => IterStep::Reject,
        });
        assert_eq!(r, vec![Some(7), Some(7), None, None, None, None]);
    }

    #[test]
    fn iterate_calls_each_element_once() {
        let mut calls = 0;
        let n = 50;
        let r = iterate(n, |x| {
            calls += 1;
            if x + 1 < n {
                IterStep::Continue(x + 1)
            } else {
                IterStep::Exit(x)
            }
        });
        assert_eq!(calls, n);
        assert!(r.iter().all(|v| *v == Some(n - 1)));
    }

    #[test]
    fn jump_resolution() {
        // labels 0, 1, 2; one indicator value, one atom
        let j = |l, i| cont(Continuation::Jump(l, i));
        let jumps = vec![
            Dynamics::constant(1, 1, j(1, 0)),
            Dynamics::constant(1, 1, cont(Continuation::Accept(0))),
            Dynamics::constant(1, 1, j(2, 0)),
        ];
        let r = resolve_jumps(&jumps);
        assert_eq!(r[0].get(0, Atom(0)), cont(Continuation::Accept(0)));
        assert_eq!(r[2].get(0, Atom(0)), Entry::Reject);

        let two_cycle = vec![Dynamics::constant(1, 1, j(1, 0)), Dynamics::constant(1, 1, j(0, 0))];
        assert!(resolve_jumps(&two_cycle).iter().all(Dynamics::is_reject));

        let step = Entry::Step { action: 0, state: 3, ind: 0 };
        assert_eq!(resolve_jumps(&[Dynamics::constant(1, 1, step)])[0].get(0, Atom(0)), step);
    }

    #[test]
    fn jump_resolution_keeps_the_atom() {
        // λ(0)(0, α) = jmp(1, 1); λ(1)(1, α) = Step to state α
        let jumps = vec![
            Dynamics::constant(2, 2, cont(Continuation::Jump(1, 1))),
            Dynamics::from_fn(2, 2, |i, a| {
                if i == 1 {
                    Entry::Step { action: 0, state: a.0, ind: 0 }
                } else {
                    Entry::Reject
                }
            }),
        ];
        let r = resolve_jumps(&jumps);
        for a in Atom::all(1) {
            assert_eq!(r[0].get(0, a), Entry::Step { action: 0, state: a.0, ind: 0 });
        }
        assert!(r.iter().flat_map(|d| d.iter()).all(|(_, _, e)| !matches!(e, Entry::Cont(Continuation::Jump(..)))));
    }

    #[test]
    fn uniform_continuation_cases() {
        let step = Entry::Step { action: 1, state: 0, ind: 1 };
        let h1 = Dynamics::from_fn(2, 1, |i, _| match i {
            0 => cont(Continuation::Accept(1)),
            _ => cont(Continuation::Break(0)),
        });
        let h2 = Dynamics::from_fn(2, 1, |i, _| if i == 1 { step } else { Entry::Reject });
        let r = uniform_continuation(&h1, &h2);
        assert_eq!(r.get(0, Atom(0)), step);
        assert_eq!(r.get(1, Atom(0)), cont(Continuation::Break(0)));
        let rej = Dynamics::reject(2, 1);
        assert_eq!(uniform_continuation(&rej, &h2), rej);
    }

    #[test]
    fn floor_cases() {
        let step = Entry::Step { action: 0, state: 0, ind: 0 };
        let h = Dynamics::from_fn(4, 1, |i, _| match i {
            0 => cont(Continuation::Break(2)),
            1 => cont(Continuation::Return),
            2 => cont(Continuation::Jump(0, 1)),
            _ => step,
        });
        let f = floor_dynamics(&h);
        assert_eq!(f.get(0, Atom(0)), cont(Continuation::Accept(2)));
        assert_eq!(f.get(1, Atom(0)), cont(Continuation::Return));
        assert_eq!(f.get(2, Atom(0)), cont(Continuation::Jump(0, 1)));
        assert_eq!(f.get(3, Atom(0)), step);
    }

    /// The loop body with `x = 0 ↦ x := 1`, `x = 1 ↦ break`, else skip, no
    /// tests: `ι₁(0,∅) = acc 1`, `ι₁(1,∅) = brk 1`, `ι₁(2,∅) = acc 2`.
    #[test]
    fn iterated_start_loop_example() {
        let iota = Dynamics::from_fn(3, 1, |i, _| match i {
            0 => cont(Continuation::Accept(1)),
            1 => cont(Continuation::Break(1)),
            _ => cont(Continuation::Accept(2)),
        });
        let a = Alphabets::new([], [], [], [Indicator::Value(0), Indicator::Value(1), Indicator::Value(2)]);
        let b = denote(&BExp::True, &a).unwrap();
        let r = iterated_start(&iota, &b);
        assert_eq!(r.get(0, Atom(0)), cont(Continuation::Break(1)));
        assert_eq!(r.get(1, Atom(0)), cont(Continuation::Break(1)));
        assert_eq!(r.get(2, Atom(0)), Entry::Reject);

        let f = denote(&BExp::False, &a).unwrap();
        let r = iterated_start(&iota, &f);
        assert!((0..3).all(|i| r.get(i, Atom(0)) == cont(Continuation::Accept(i))));
    }

    #[test]
    fn add_start_state_appends() {
        let a = CfAutomaton {
            n_indicators: 1,
            n_atoms: 2,
            states: vec![Dynamics::accept(1, 2)],
            jumps: vec![],
            start: Start::Dynamics(Dynamics::accept(1, 2)),
        };
        let b = a.clone().add_start_state();
        assert_eq!(b.n_states(), a.n_states() + 1);
        assert_eq!(b.start, Start::State(1));
        assert_eq!(b.states[1], Dynamics::accept(1, 2));
        assert_eq!(b.states[0], a.states[0]);
    }

    #[test]
    fn lowering_maps_continuations() {
        let a = CfAutomaton {
            n_indicators: 2,
            n_atoms: 1,
            states: vec![Dynamics::from_fn(2, 1, |i, _| match i {
                0 => cont(Continuation::Break(0)),
                _ => cont(Continuation::Return),
            })],
            jumps: vec![],
            start: Start::State(0),
        };
        let g0 = a.lower(0, 0);
        assert_eq!(g0.get(g0.start, Atom(0)), GkatTransition::Reject);
        let g1 = a.lower(1, 0);
        assert_eq!(g1.get(g1.start, Atom(0)), GkatTransition::Accept);
        assert_eq!(g1.n_states(), 2);
    }

    #[test]
    fn prune_keeps_reachable_states() {
        let g = GkatAutomaton::from_rows(
            1,
            1,
            vec![
                vec![GkatTransition::Accept],
                vec![GkatTransition::Step { action: 0, target: 0 }],
                vec![GkatTransition::Reject],
            ],
            1,
        );
        let p = g.prune_unreachable();
        assert_eq!(p.n_states(), 2);
        assert_eq!(p.start, 0);
        assert_eq!(p.get(0, Atom(0)), GkatTransition::Step { action: 0, target: 1 });
    }
}
