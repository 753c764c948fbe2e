//! Language equivalence of GKAT automata.
//!
//! States from which nothing is ever accepted are first normalized into
//! explicit rejection; on normalized automata bisimilarity coincides with
//! language equality, and bisimilarity is checked with a union-find in the
//! style of Hopcroft and Karp.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::{GkatAutomaton, GkatTransition};
use crate::boolean::Atom;
use crate::error::Error;
use crate::syntax::Alphabets;
use crate::word::GuardedWord;

/// States that cannot reach an accepting transition.
pub fn dead_states(a: &GkatAutomaton) -> BTreeSet<u32> {
    let live = live_states(a);
    (0..a.n_states() as u32).filter(|&s| !live[s as usize]).collect()
}

fn live_states(a: &GkatAutomaton) -> Vec<bool> {
    let n = a.n_states();
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut live = vec![false; n];
    let mut queue = Vec::new();
    for s in 0..n as u32 {
        for t in a.row(s) {
            match *t {
                GkatTransition::Accept if !live[s as usize] => {
                    live[s as usize] = true;
                    queue.push(s);
                }
                GkatTransition::Step { target, .. } => preds[target as usize].push(s),
                _ => {}
            }
        }
    }
    while let Some(s) = queue.pop() {
        for &p in &preds[s as usize] {
            if !std::mem::replace(&mut live[p as usize], true) {
                queue.push(p);
            }
        }
    }
    live
}

/// Rewrites every step into a dead state as a rejection.
pub fn normalize(a: &GkatAutomaton) -> GkatAutomaton {
    let live = live_states(a);
    let mut out = a.clone();
    for s in 0..a.n_states() as u32 {
        for atom in a.atoms() {
            if let GkatTransition::Step { target, .. } = a.get(s, atom) {
                if !live[target as usize] {
                    out.set(s, atom, GkatTransition::Reject);
                }
            }
        }
    }
    out
}

/// Which automaton a witness belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Evidence of inequivalence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// `w·α`: both automata read `w` alike and disagree on atom `α`.
    pub prefix: GuardedWord,
    /// What each side does at the end of the prefix.
    pub left: GkatTransition,
    pub right: GkatTransition,
    /// A complete guarded word accepted by exactly one side.
    pub witness: GuardedWord,
    pub accepted_by: Side,
    pub description: String,
}

impl Counterexample {
    /// Re-renders the description with alphabet names.
    pub fn describe(&self, alphabets: &Alphabets) -> String {
        let what = |t: GkatTransition| match t {
            GkatTransition::Reject => "rejects".to_string(),
            GkatTransition::Accept => "accepts".to_string(),
            GkatTransition::Step { action, .. } => format!("performs {}", alphabets.actions[action as usize]),
        };
        let side = match self.accepted_by {
            Side::Left => "left",
            Side::Right => "right",
        };
        format!(
            "after {}: left {}, right {}; `{}` is accepted only by the {side} program",
            self.prefix.display(alphabets),
            what(self.left),
            what(self.right),
            self.witness.display(alphabets),
        )
    }
}

/// Outcome of an equivalence check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivVerdict {
    pub equivalent: bool,
    pub counterexample: Option<Counterexample>,
    /// Union operations performed by the union-find.
    pub unions: usize,
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
    unions: usize,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n as u32).collect(), rank: vec![0; n], unions: 0 }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            cur = std::mem::replace(&mut self.parent[cur as usize], root);
        }
        root
    }

    /// Merges the classes of `x` and `y`; false if already merged.
    fn union(&mut self, x: u32, y: u32) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.unions += 1;
        let (lo, hi) = if self.rank[rx as usize] < self.rank[ry as usize] { (rx, ry) } else { (ry, rx) };
        self.parent[lo as usize] = hi;
        if self.rank[lo as usize] == self.rank[hi as usize] {
            self.rank[hi as usize] += 1;
        }
        true
    }
}

struct Pair {
    left: u32,
    right: u32,
    /// The pair this one was reached from, with the atom and action read.
    via: Option<(usize, Atom, u32)>,
}

/// Decides whether two GKAT automata accept the same guarded language.
pub fn bisim_equiv(a0: &GkatAutomaton, a1: &GkatAutomaton) -> Result<EquivVerdict, Error> {
    if a0.n_actions != a1.n_actions || a0.n_atoms != a1.n_atoms {
        return Err(Error::AlphabetMismatch(format!(
            "{} actions and {} atoms vs {} actions and {} atoms",
            a0.n_actions, a0.n_atoms, a1.n_actions, a1.n_atoms
        )));
    }
    let (n0, n1) = (normalize(a0), normalize(a1));
    let offset = n0.n_states() as u32;
    let mut uf = UnionFind::new(n0.n_states() + n1.n_states());
    let mut pairs = vec![Pair { left: n0.start, right: n1.start, via: None }];
    uf.union(n0.start, n1.start + offset);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (x, y) = (pairs[k].left, pairs[k].right);
        for atom in n0.atoms() {
            let (t0, t1) = (n0.get(x, atom), n1.get(y, atom));
            match (t0, t1) {
                (GkatTransition::Reject, GkatTransition::Reject) | (GkatTransition::Accept, GkatTransition::Accept) => {}
                (GkatTransition::Step { action: p, target: x2 }, GkatTransition::Step { action: q, target: y2 })
                    if p == q =>
                {
                    if uf.union(x2, y2 + offset) {
                        pairs.push(Pair { left: x2, right: y2, via: Some((k, atom, p)) });
                        queue.push_back(pairs.len() - 1);
                    }
                }
                _ => {
                    let cex = counterexample(&n0, &n1, &pairs, k, atom, t0, t1);
                    return Ok(EquivVerdict { equivalent: false, counterexample: Some(cex), unions: uf.unions });
                }
            }
        }
    }
    Ok(EquivVerdict { equivalent: true, counterexample: None, unions: uf.unions })
}

fn counterexample(
    n0: &GkatAutomaton,
    n1: &GkatAutomaton,
    pairs: &[Pair],
    k: usize,
    atom: Atom,
    t0: GkatTransition,
    t1: GkatTransition,
) -> Counterexample {
    let mut steps = Vec::new();
    let mut cur = k;
    while let Some((parent, a, p)) = pairs[cur].via {
        steps.push((a, p));
        cur = parent;
    }
    steps.reverse();
    let prefix = match steps.first() {
        None => GuardedWord::atom(atom),
        Some(&(first, _)) => {
            let atoms = steps.iter().skip(1).map(|(a, _)| *a).chain([atom]);
            GuardedWord::from_steps(first, steps.iter().map(|(_, p)| *p).zip(atoms))
        }
    };
    // The side that accepts or steps into a (necessarily live) state owns
    // the witness; prefer the left one.
    let (side, aut, t) = match (t0, t1) {
        (GkatTransition::Reject, _) => (Side::Right, n1, t1),
        _ => (Side::Left, n0, t0),
    };
    let witness = match t {
        GkatTransition::Step { action, target } => {
            let mut w = prefix.clone();
            for (p, a) in shortest_accepted(aut, target).steps_from(action) {
                w.push(p, a);
            }
            w
        }
        _ => prefix.clone(),
    };
    let description = format!("after {prefix:?}: left {t0:?}, right {t1:?}");
    Counterexample { prefix, left: t0, right: t1, witness, accepted_by: side, description }
}

/// A shortest accepted word from a live state `s`.
fn shortest_accepted(a: &GkatAutomaton, s: u32) -> GuardedWord {
    let mut parent: Vec<Option<(u32, Atom, u32)>> = vec![None; a.n_states()];
    let mut seen = vec![false; a.n_states()];
    seen[s as usize] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        if let Some(acc) = a.atoms().find(|&al| a.get(x, al) == GkatTransition::Accept) {
            let mut steps = Vec::new();
            let mut cur = x;
            while let Some((prev, al, p)) = parent[cur as usize] {
                steps.push((al, p));
                cur = prev;
            }
            steps.reverse();
            let Some(&(first, _)) = steps.first() else { return GuardedWord::atom(acc) };
            let atoms = steps.iter().skip(1).map(|(al, _)| *al).chain([acc]);
            return GuardedWord::from_steps(first, steps.iter().map(|(_, p)| *p).zip(atoms));
        }
        for al in a.atoms() {
            if let GkatTransition::Step { action, target } = a.get(x, al) {
                if !std::mem::replace(&mut seen[target as usize], true) {
                    parent[target as usize] = Some((x, al, action));
                    queue.push_back(target);
                }
            }
        }
    }
    unreachable!("state {s} is live")
}

trait StepsFrom {
    fn steps_from(&self, action: u32) -> Vec<(u32, Atom)>;
}

impl StepsFrom for GuardedWord {
    /// Appending this word after `action`: `(action, α₁), (p₁, α₂), …`.
    fn steps_from(&self, action: u32) -> Vec<(u32, Atom)> {
        let mut out = vec![(action, self.first_atom())];
        out.extend(self.steps());
        out
    }
}

/// All accepted words with at most `bound` actions.
pub fn enumerate_language(a: &GkatAutomaton, bound: usize) -> BTreeSet<GuardedWord> {
    fn walk(a: &GkatAutomaton, s: u32, bound: usize, prefix: &mut Vec<u32>, out: &mut BTreeSet<GuardedWord>) {
        for al in a.atoms() {
            match a.get(s, al) {
                GkatTransition::Reject => {}
                GkatTransition::Accept => {
                    let mut w = prefix.clone();
                    w.push(al.0);
                    out.insert(GuardedWord::from_flat(w));
                }
                GkatTransition::Step { action, target } => {
                    if bound > 0 {
                        prefix.extend([al.0, action]);
                        walk(a, target, bound - 1, prefix, out);
                        prefix.truncate(prefix.len() - 2);
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(a, a.start, bound, &mut Vec::new(), &mut out);
    out
}

/// What the automaton does after reading `word` up to its last atom.
pub fn replay(a: &GkatAutomaton, word: &GuardedWord) -> GkatTransition {
    let mut s = a.start;
    let mut atom = word.first_atom();
    for (p, next) in word.steps() {
        match a.get(s, atom) {
            GkatTransition::Step { action, target } if action == p => s = target,
            _ => return GkatTransition::Reject,
        }
        atom = next;
    }
    a.get(s, atom)
}

/// Membership of a guarded word in the language of `a`.
pub fn accepts(a: &GkatAutomaton, word: &GuardedWord) -> bool {
    replay(a, word) == GkatTransition::Accept
}

#[cfg(test)]
mod tests {
    use super::*;
    use GkatTransition::{Accept, Reject};

    fn step(action: u32, target: u32) -> GkatTransition {
        GkatTransition::Step { action, target }
    }

    fn one_state(t: GkatTransition, n_atoms: usize) -> GkatAutomaton {
        GkatAutomaton::from_rows(1, n_atoms, vec![vec![t; n_atoms]], 0)
    }

    #[test]
    fn dead_state_cases() {
        let a = GkatAutomaton::from_rows(
            1,
            2,
            vec![vec![Reject, Reject], vec![step(0, 1), step(0, 1)], vec![Accept, Reject], vec![step(0, 2), Reject]],
            0,
        );
        assert_eq!(dead_states(&a), BTreeSet::from([0, 1]));
    }

    #[test]
    fn normalize_self_loop_and_idempotence() {
        let a = one_state(step(0, 0), 2);
        let n = normalize(&a);
        assert_eq!(n.row(0), &[Reject, Reject]);
        assert_eq!(normalize(&n), n);
        let live = one_state(Accept, 2);
        assert_eq!(normalize(&live), live);
    }

    #[test]
    fn accept_all_vs_reject_all() {
        let v = bisim_equiv(&one_state(Accept, 2), &one_state(Reject, 2)).unwrap();
        assert!(!v.equivalent);
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.prefix, GuardedWord::atom(Atom(0)));
        assert_eq!(cex.witness, GuardedWord::atom(Atom(0)));
        assert_eq!(cex.accepted_by, Side::Left);
    }

    #[test]
    fn divergence_equals_rejection() {
        let v = bisim_equiv(&one_state(step(0, 0), 2), &one_state(Reject, 2)).unwrap();
        assert!(v.equivalent);
        assert!(enumerate_language(&one_state(step(0, 0), 2), 6).is_empty());
    }

    #[test]
    fn alphabet_mismatch() {
        let r = bisim_equiv(&one_state(Accept, 2), &one_state(Accept, 4));
        assert!(matches!(r, Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn enumerate_small_cases() {
        assert_eq!(
            enumerate_language(&one_state(Accept, 2), 0),
            BTreeSet::from([GuardedWord::atom(Atom(0)), GuardedWord::atom(Atom(1))])
        );
        assert!(enumerate_language(&one_state(Reject, 2), 3).is_empty());
    }

    #[test]
    fn counterexample_extends_to_an_accepted_word() {
        // left: p then accept; right: p then p then accept
        let left = GkatAutomaton::from_rows(1, 1, vec![vec![step(0, 1)], vec![Accept]], 0);
        let right = GkatAutomaton::from_rows(1, 1, vec![vec![step(0, 1)], vec![step(0, 2)], vec![Accept]], 0);
        let v = bisim_equiv(&left, &right).unwrap();
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.prefix.n_actions(), 1);
        assert_eq!(cex.accepted_by, Side::Left);
        assert!(accepts(&left, &cex.witness));
        assert!(!accepts(&right, &cex.witness));
        assert_eq!(replay(&right, &cex.prefix), step(0, 2));
    }

    #[test]
    fn union_count_is_bounded() {
        let chain = |n: u32| {
            let mut rows: Vec<_> = (0..n).map(|s| vec![step(0, s + 1)]).collect();
            rows.push(vec![Accept]);
            GkatAutomaton::from_rows(1, 1, rows, 0)
        };
        let v = bisim_equiv(&chain(50), &chain(50)).unwrap();
        assert!(v.equivalent);
        assert!(v.unions <= 102);
    }
}
