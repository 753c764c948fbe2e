//! The end-to-end decision procedure, plus program generators used by the
//! property suites: random valid programs, semantics-preserving rewrites
//! and single-loop normal forms.

use std::time::Instant;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{resolve_jumps, CfAutomaton, GkatAutomaton, GkatTransition, Start};
use crate::error::Error;
use crate::gkat::{bisim_equiv, EquivVerdict};
use crate::syntax::{collect_alphabets, validate, Alphabets, BExp, Exp, ExpKind, Indicator, Label};
use crate::thompson::thompson;

/// Default cap on the number of primitive tests.
pub const DEFAULT_MAX_TESTS: usize = 16;

#[derive(Clone, Debug)]
pub struct EquivOptions {
    /// Check the starting indicator values on the rayon pool.
    pub parallel: bool,
    /// Drop unreachable lowered states before the bisimulation check.
    pub prune: bool,
    pub max_tests: usize,
    /// Also require equal semantics when starting from each shared label.
    /// Not part of trace equivalence; off by default.
    pub compare_labels: bool,
}

impl Default for EquivOptions {
    fn default() -> EquivOptions {
        EquivOptions { parallel: true, prune: true, max_tests: DEFAULT_MAX_TESTS, compare_labels: false }
    }
}

/// Wall-clock time per stage, in microseconds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub alphabets_us: u64,
    pub thompson_us: u64,
    /// Lowering and bisimulation over all indicator values.
    pub check_us: u64,
    pub total_us: u64,
}

/// Sizes of the intermediate automata, left program first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateCounts {
    pub thompson: [usize; 2],
    /// `|S| + 1` states times `|I|`, for every starting value.
    pub lowered: [usize; 2],
    /// Reachable lowered states, per starting value (equal to `lowered`
    /// when pruning is off).
    pub checked: IndexMap<String, [usize; 2]>,
}

/// Result of [`equiv`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// True iff every per-indicator check succeeded.
    pub verdict: bool,
    /// Keyed by the starting indicator value (`"*"` for the fresh one).
    pub per_indicator: IndexMap<String, EquivVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_label: Option<IndexMap<String, EquivVerdict>>,
    pub alphabets: Alphabets,
    pub timings: Timings,
    pub state_counts: StateCounts,
}

/// Decides trace equivalence of two valid programs.
pub fn equiv(e: &Exp, f: &Exp) -> Result<EquivalenceReport, Error> {
    equiv_with(e, f, &EquivOptions::default())
}

pub fn equiv_with(e: &Exp, f: &Exp, options: &EquivOptions) -> Result<EquivalenceReport, Error> {
    let t = Instant::now();
    for p in [e, f] {
        let report = validate(p);
        if !report.is_valid() {
            return Err(Error::InvalidProgram(report));
        }
    }
    let alphabets = collect_alphabets(e, f);
    let mut report = equiv_in(e, f, &alphabets, options)?;
    let tm = &mut report.timings;
    tm.total_us = micros(t);
    tm.alphabets_us = tm.total_us.saturating_sub(tm.thompson_us + tm.check_us);
    Ok(report)
}

fn micros(t: Instant) -> u64 {
    t.elapsed().as_micros() as u64
}

/// The decision procedure over explicitly given alphabets, which must
/// cover both programs.
pub fn equiv_in(e: &Exp, f: &Exp, alphabets: &Alphabets, options: &EquivOptions) -> Result<EquivalenceReport, Error> {
    let start = Instant::now();
    if alphabets.tests.len() > options.max_tests {
        return Err(Error::TooManyTests {
            count: alphabets.tests.len(),
            max: options.max_tests,
            atoms: 1u128 << alphabets.tests.len().min(127),
        });
    }
    let t = Instant::now();
    let a = thompson(e, alphabets)?;
    let b = thompson(f, alphabets)?;
    let thompson_us = micros(t);
    let counts = [a.n_states(), b.n_states()];
    let (a, b) = (a.add_start_state(), b.add_start_state());

    let t = Instant::now();
    let pairs = Checker::new(&a, &b, alphabets.actions.len(), options.prune);
    let per: Vec<_> = run_indexed(alphabets.n_indicators(), options.parallel, |i| pairs.check(i as u32))
        .into_iter()
        .collect::<Result<_, _>>()?;
    let per_label = if options.compare_labels {
        let mut out = IndexMap::new();
        for l in 0..alphabets.labels.len() {
            let (la, lb) = (from_label(&a, l), from_label(&b, l));
            let c = Checker::new(&la, &lb, alphabets.actions.len(), options.prune);
            for i in 0..alphabets.n_indicators() as u32 {
                let (v, _) = c.check(i)?;
                out.insert(format!("{}@{}", alphabets.labels[l], alphabets.indicator(i)), v);
            }
        }
        Some(out)
    } else {
        None
    };
    let check_us = micros(t);

    let mut per_indicator = IndexMap::new();
    let mut checked = IndexMap::new();
    for (i, (mut v, sizes)) in per.into_iter().enumerate() {
        let key = alphabets.indicator(i as u32).to_string();
        if let Some(cex) = &mut v.counterexample {
            cex.description = cex.describe(alphabets);
        }
        per_indicator.insert(key.clone(), v);
        checked.insert(key, sizes);
    }
    let verdict = per_indicator.values().all(|v| v.equivalent)
        && per_label.as_ref().is_none_or(|m| m.values().all(|v| v.equivalent));
    let n_ind = alphabets.n_indicators();
    Ok(EquivalenceReport {
        verdict,
        per_indicator,
        per_label,
        alphabets: alphabets.clone(),
        timings: Timings { alphabets_us: 0, thompson_us, check_us, total_us: micros(start) },
        state_counts: StateCounts {
            thompson: counts,
            lowered: [(counts[0] + 1) * n_ind, (counts[1] + 1) * n_ind],
            checked,
        },
    })
}

fn run_indexed<T: Send>(n: usize, parallel: bool, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    if parallel && n > 1 {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// The automaton started at label `l` instead of at its start state.
fn from_label(a: &CfAutomaton, l: usize) -> CfAutomaton {
    let mut c = a.clone();
    c.states.push(a.jumps[l].clone());
    c.start = Start::State(c.states.len() as u32 - 1);
    c
}

struct Checker<'a> {
    automata: [&'a CfAutomaton; 2],
    resolved: [Vec<crate::automata::Dynamics>; 2],
    n_actions: usize,
    prune: bool,
}

impl<'a> Checker<'a> {
    fn new(a: &'a CfAutomaton, b: &'a CfAutomaton, n_actions: usize, prune: bool) -> Checker<'a> {
        Checker { automata: [a, b], resolved: [resolve_jumps(&a.jumps), resolve_jumps(&b.jumps)], n_actions, prune }
    }

    fn lower(&self, side: usize, i: u32) -> GkatAutomaton {
        let g = self.automata[side].lower_with(&self.resolved[side], i, self.n_actions);
        if self.prune {
            g.prune_unreachable()
        } else {
            g
        }
    }

    fn check(&self, i: u32) -> Result<(EquivVerdict, [usize; 2]), Error> {
        let (x, y) = (self.lower(0, i), self.lower(1, i));
        Ok((bisim_equiv(&x, &y)?, [x.n_states(), y.n_states()]))
    }
}

/// Lowers `e` over `alphabets` at starting indicator `i0`.
pub fn lower_program(e: &Exp, alphabets: &Alphabets, i0: u32) -> Result<GkatAutomaton, Error> {
    let a = thompson(e, alphabets)?.add_start_state();
    Ok(a.lower(i0, alphabets.actions.len()))
}

/// A single `while` loop over an indicator-encoded program counter that
/// has the same traces as `a`.
///
/// Reachable states are numbered from 0 (the start); two more values mark
/// acceptance (`HALT`) and rejection (`DEAD`). No case matches `DEAD`, so
/// the loop spins without acting, which denotes rejection.
pub fn single_loop_normal_form(a: &GkatAutomaton, alphabets: &Alphabets) -> Exp {
    let a = a.prune_unreachable();
    let n = a.n_states() as i64;
    let (halt, dead) = (n, n + 1);
    let atom_test = |atom: u32| {
        alphabets
            .tests
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let lit = BExp::Prim(t.clone());
                if atom & (1 << k) != 0 {
                    lit
                } else {
                    BExp::not(lit)
                }
            })
            .reduce(BExp::and)
            .unwrap_or(BExp::True)
    };
    let mut cases = Exp::skip();
    for s in (0..a.n_states() as u32).rev() {
        let mut row = Exp::skip();
        for atom in a.atoms().collect::<Vec<_>>().into_iter().rev() {
            let action = match a.get(s, atom) {
                GkatTransition::Reject => Exp::assign(dead),
                GkatTransition::Accept => Exp::assign(halt),
                GkatTransition::Step { action, target } => Exp::seq2(
                    Exp::act(alphabets.actions[action as usize].as_str()),
                    Exp::assign(target as i64),
                ),
            };
            row = Exp::if_(atom_test(atom.0), action, row);
        }
        cases = Exp::if_(BExp::ind_eq(s as i64), row, cases);
    }
    Exp::seq2(Exp::assign(0), Exp::while_(BExp::not(BExp::ind_eq(halt)), cases))
}

/// Bounds for [`random_program`].
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Maximum program size, see [`Exp::size`].
    pub max_nodes: usize,
    pub n_tests: usize,
    pub n_indicators: usize,
    pub n_labels: usize,
    pub n_actions: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_nodes: 15, n_tests: 2, n_indicators: 3, n_labels: 2, n_actions: 3 }
    }
}

/// A random valid program. Deterministic in `seed`.
///
/// Tests are named `t0, t1, …`, actions `p0, …`, labels `l0, …`, and
/// indicator values range over `0..n_indicators`. `break` only appears
/// inside loops, each label is defined at most once, and every `goto`
/// targets a defined label.
pub fn random_program(seed: u64, limits: Limits) -> Exp {
    let mut g = Generator { rng: ChaCha8Rng::seed_from_u64(seed), limits, unused_labels: Vec::new() };
    g.unused_labels = (0..limits.n_labels).rev().collect();
    let max = limits.max_nodes.max(1);
    let budget = g.rng.gen_range(max.div_ceil(3)..=max);
    let e = g.exp(budget, false);
    let mut defined = Vec::new();
    e.visit(&mut |x| {
        if let ExpKind::Label(l) = &x.kind {
            defined.push(l.clone());
        }
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let actions = limits.n_actions.max(1);
    map_exp(e, &mut |x| match x.kind {
        ExpKind::Goto(l) if !defined.contains(&l) => match defined.choose(&mut rng) {
            Some(d) => ExpKind::Goto(d.clone()).into(),
            None => Exp::act(&format!("p{}", rng.gen_range(0..actions))),
        },
        _ => x,
    })
}

/// Rebuilds `e` bottom-up, applying `f` to every node.
fn map_exp(e: Exp, f: &mut impl FnMut(Exp) -> Exp) -> Exp {
    let loc = e.loc;
    let kind = match e.kind {
        ExpKind::Seq(items) => ExpKind::Seq(items.into_iter().map(|x| map_exp(x, f)).collect()),
        ExpKind::If(b, t, x) => ExpKind::If(b, Box::new(map_exp(*t, f)), Box::new(map_exp(*x, f))),
        ExpKind::While(b, body) => ExpKind::While(b, Box::new(map_exp(*body, f))),
        k => k,
    };
    f(Exp { kind, loc })
}

struct Generator {
    rng: ChaCha8Rng,
    limits: Limits,
    unused_labels: Vec<usize>,
}

impl Generator {
    fn bexp(&mut self, depth: u32) -> BExp {
        if depth > 0 && self.rng.gen_bool(0.4) {
            return match self.rng.gen_range(0..3) {
                0 => BExp::not(self.bexp(depth - 1)),
                1 => BExp::and(self.bexp(depth - 1), self.bexp(depth - 1)),
                _ => BExp::or(self.bexp(depth - 1), self.bexp(depth - 1)),
            };
        }
        match self.rng.gen_range(0..20) {
            0..=8 if self.limits.n_tests > 0 => BExp::prim(&format!("t{}", self.rng.gen_range(0..self.limits.n_tests))),
            9..=15 if self.limits.n_indicators > 0 => {
                BExp::ind_eq(self.rng.gen_range(0..self.limits.n_indicators) as i64)
            }
            16..=17 => BExp::False,
            _ => BExp::True,
        }
    }

    fn leaf(&mut self, in_loop: bool) -> Exp {
        loop {
            return match self.rng.gen_range(0..8) {
                0 => Exp::assert(self.bexp(1)),
                1 | 2 => Exp::act(&format!("p{}", self.rng.gen_range(0..self.limits.n_actions.max(1)))),
                3 if self.limits.n_indicators > 0 => {
                    Exp::assign(self.rng.gen_range(0..self.limits.n_indicators) as i64)
                }
                4 => Exp::ret(),
                5 if in_loop => Exp::brk(),
                6 if self.limits.n_labels > 0 => {
                    Exp::goto(&format!("l{}", self.rng.gen_range(0..self.limits.n_labels)))
                }
                7 => match self.unused_labels.pop() {
                    Some(l) => Exp::label(&format!("l{l}")),
                    None => continue,
                },
                _ => continue,
            };
        }
    }

    /// A program of size at most `budget`.
    fn exp(&mut self, budget: usize, in_loop: bool) -> Exp {
        if budget <= 1 || self.rng.gen_bool(0.05) {
            return self.leaf(in_loop);
        }
        match self.rng.gen_range(0..20) {
            0..=7 if budget >= 3 => {
                let left = self.rng.gen_range(1..budget - 1);
                Exp::seq2(self.exp(left, in_loop), self.exp(budget - 1 - left, in_loop))
            }
            8..=14 if budget >= 3 => {
                let b = self.bexp(2);
                let left = self.rng.gen_range(1..budget - 1);
                Exp::if_(b, self.exp(left, in_loop), self.exp(budget - 1 - left, in_loop))
            }
            _ => {
                let b = self.bexp(2);
                Exp::while_(b, self.exp(budget - 1, true))
            }
        }
    }
}

/// The kinds of semantics-preserving rewrites used by [`rewrite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rewrite {
    /// `e` becomes `{ ℓ:; e }` for a label unused in the program.
    InsertLabel,
    /// `if b then e else f` becomes `if ¬b then f else e`.
    SwapBranches,
    /// `{ e; f; g… }` becomes `{ { e; f }; g… }`, or the reverse.
    Reassociate,
}

/// Applies `steps` random semantics-preserving rewrites to `e`.
pub fn rewrite(e: &Exp, seed: u64, steps: usize) -> (Exp, Vec<Rewrite>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = e.clone();
    let mut applied = Vec::new();
    let mut fresh = 0;
    for _ in 0..steps {
        let mut n = 0;
        e.visit(&mut |_| n += 1);
        let target = rng.gen_range(0..n);
        let kind = [Rewrite::InsertLabel, Rewrite::SwapBranches, Rewrite::Reassociate][rng.gen_range(0..3)];
        let label = loop {
            let l = Label::new(format!("fresh{fresh}"));
            fresh += 1;
            if !e.contains_label(&l) {
                break l;
            }
        };
        let mut k = 0;
        let mut done = false;
        e = map_pre(e, &mut k, target, &mut |x| {
            let (y, ok) = apply(x, kind, &label);
            done = ok;
            y
        });
        if done {
            applied.push(kind);
        }
    }
    (e, applied)
}

/// Applies `f` to the `target`-th node in pre-order.
fn map_pre(e: Exp, k: &mut usize, target: usize, f: &mut impl FnMut(Exp) -> Exp) -> Exp {
    let here = *k;
    *k += 1;
    if here == target {
        return f(e);
    }
    let loc = e.loc;
    let kind = match e.kind {
        ExpKind::Seq(items) => ExpKind::Seq(items.into_iter().map(|x| map_pre(x, k, target, f)).collect()),
        ExpKind::If(b, t, x) => {
            let t = map_pre(*t, k, target, f);
            ExpKind::If(b, Box::new(t), Box::new(map_pre(*x, k, target, f)))
        }
        ExpKind::While(b, body) => ExpKind::While(b, Box::new(map_pre(*body, k, target, f))),
        kind => kind,
    };
    Exp { kind, loc }
}

fn apply(e: Exp, kind: Rewrite, label: &Label) -> (Exp, bool) {
    match (kind, e.kind) {
        (Rewrite::InsertLabel, k) => {
            (ExpKind::Seq(vec![ExpKind::Label(label.clone()).into(), Exp { kind: k, loc: e.loc }]).into(), true)
        }
        (Rewrite::SwapBranches, ExpKind::If(b, t, x)) => (Exp { kind: ExpKind::If(BExp::not(b), x, t), loc: e.loc }, true),
        (Rewrite::Reassociate, ExpKind::Seq(mut items)) if items.len() >= 3 => {
            let rest = items.split_off(2);
            let mut out = vec![ExpKind::Seq(items).into()];
            out.extend(rest);
            (Exp { kind: ExpKind::Seq(out), loc: e.loc }, true)
        }
        (Rewrite::Reassociate, ExpKind::Seq(mut items)) if items.len() == 2 => {
            // { { a; b }; c } becomes { a; b; c }
            match items[0].kind {
                ExpKind::Seq(ref inner) if inner.len() >= 2 => {
                    let ExpKind::Seq(mut inner) = items.remove(0).kind else { unreachable!() };
                    inner.extend(items);
                    (Exp { kind: ExpKind::Seq(inner), loc: e.loc }, true)
                }
                _ => (Exp { kind: ExpKind::Seq(items), loc: e.loc }, false),
            }
        }
        (_, k) => (Exp { kind: k, loc: e.loc }, false),
    }
}

/// Adds an indicator value to `alphabets`, keeping the fresh value last.
pub fn with_extra_indicator(alphabets: &Alphabets, value: Indicator) -> Alphabets {
    let mut a = alphabets.clone();
    let fresh = a.indicators.shift_remove(&Indicator::Fresh);
    a.indicators.insert(value);
    if fresh {
        a.indicators.insert(Indicator::Fresh);
    }
    a
}
