//! Bounded, brute-force continuation semantics.
//!
//! Every denotation is computed directly from its defining rules: indexed
//! families of guarded words with continuations, sequencing, least fixed
//! points for loops, label-start semantics and jump flattening. Only words
//! with at most `bound` actions are kept. Since sequencing never shortens a
//! word, the bounded fragment of a least fixed point is the fixed point of
//! the bounded rules, reached by plain Kleene iteration.
//!
//! This module shares nothing with the automaton pipeline except the
//! Boolean semantics of tests, and is meant as a test oracle. It is
//! exponential in the bound.

use std::collections::BTreeSet;

use crate::boolean::{denote, Atom, TestDenotation};
use crate::error::Error;
use crate::syntax::{Alphabets, Exp, ExpKind};
use crate::word::{Continuation, GuardedWord};

/// A guarded language with continuations.
pub type LanguageC = BTreeSet<(GuardedWord, Continuation)>;
/// A guarded language.
pub type Language = BTreeSet<GuardedWord>;

/// One guarded language with continuations per starting indicator value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexedFamily(pub Vec<LanguageC>);

impl IndexedFamily {
    pub fn empty(n_indicators: usize) -> IndexedFamily {
        IndexedFamily(vec![LanguageC::new(); n_indicators])
    }

    pub fn get(&self, i: u32) -> &LanguageC {
        &self.0[i as usize]
    }

    fn total(&self) -> usize {
        self.0.iter().map(BTreeSet::len).sum()
    }

    fn map_floor(self) -> IndexedFamily {
        IndexedFamily(
            self.0
                .into_iter()
                .map(|l| l.into_iter().map(|(w, c)| (w, c.floor())).collect())
                .collect(),
        )
    }
}

/// Where execution starts: at the beginning (♯) or at a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntryPoint {
    Start,
    Label(u32),
}

/// Indexed families for the program start and for every label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledFamily {
    pub start: IndexedFamily,
    pub labels: Vec<IndexedFamily>,
}

impl LabeledFamily {
    pub fn get(&self, k: EntryPoint) -> &IndexedFamily {
        match k {
            EntryPoint::Start => &self.start,
            EntryPoint::Label(l) => &self.labels[l as usize],
        }
    }

    fn entry_points(&self) -> impl Iterator<Item = EntryPoint> {
        std::iter::once(EntryPoint::Start).chain((0..self.labels.len() as u32).map(EntryPoint::Label))
    }
}

/// A labeled family of guarded languages, the result of jump flattening.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedFamily {
    pub start: Vec<Language>,
    pub labels: Vec<Vec<Language>>,
}

impl ResolvedFamily {
    pub fn get(&self, k: EntryPoint, i: u32) -> &Language {
        match k {
            EntryPoint::Start => &self.start[i as usize],
            EntryPoint::Label(l) => &self.labels[l as usize][i as usize],
        }
    }

    fn get_mut(&mut self, k: EntryPoint, i: u32) -> &mut Language {
        match k {
            EntryPoint::Start => &mut self.start[i as usize],
            EntryPoint::Label(l) => &mut self.labels[l as usize][i as usize],
        }
    }

    fn total(&self) -> usize {
        self.start.iter().chain(self.labels.iter().flatten()).map(BTreeSet::len).sum()
    }
}

/// Words grouped by first atom, for coalesced products.
fn by_first_atom<'a, T: 'a>(
    n_atoms: usize,
    items: impl Iterator<Item = (&'a GuardedWord, T)>,
) -> Vec<Vec<(&'a GuardedWord, T)>> {
    let mut index: Vec<Vec<(&GuardedWord, T)>> = (0..n_atoms).map(|_| Vec::new()).collect();
    for (w, t) in items {
        index[w.first_atom().index()].push((w, t));
    }
    for bucket in &mut index {
        bucket.sort_by_key(|(w, _)| w.n_actions());
    }
    index
}

/// The sequencing `G ⋄ H`, truncated to `bound` actions.
///
/// Accepting words of `G_i` ending in `acc j` are coalesced with words of
/// `H_j`; words ending in any other continuation are copied unchanged.
pub fn seq_families(g: &IndexedFamily, h: &IndexedFamily, bound: usize) -> IndexedFamily {
    let n_atoms = g
        .0
        .iter()
        .chain(&h.0)
        .flatten()
        .map(|(w, _)| w.atoms().map(|a| a.index() + 1).max().unwrap_or(1))
        .max()
        .unwrap_or(1);
    let index: Vec<_> = h.0.iter().map(|hj| by_first_atom(n_atoms, hj.iter().map(|(w, c)| (w, *c)))).collect();
    seq_indexed(g, &index, bound)
}

fn seq_indexed(
    g: &IndexedFamily,
    h_index: &[Vec<Vec<(&GuardedWord, Continuation)>>],
    bound: usize,
) -> IndexedFamily {
    let mut out = IndexedFamily::empty(g.0.len());
    for (i, gi) in g.0.iter().enumerate() {
        let target = &mut out.0[i];
        for (w, c) in gi {
            match *c {
                Continuation::Accept(j) => {
                    let budget = bound - w.n_actions();
                    for (x, c2) in &h_index[j as usize][w.last_atom().index()] {
                        if x.n_actions() > budget {
                            break;
                        }
                        target.insert((w.coalesce(x).unwrap(), *c2));
                    }
                }
                _ => {
                    target.insert((w.clone(), *c));
                }
            }
        }
    }
    out
}

struct Ctx<'a> {
    alphabets: &'a Alphabets,
    bound: usize,
    n_ind: usize,
    n_atoms: usize,
}

/// Semantics of one subexpression: from the start, and from each label it
/// defines (absent labels denote the empty family).
struct Denotation {
    start: IndexedFamily,
    labels: Vec<(u32, IndexedFamily)>,
}

impl Ctx<'_> {
    fn atoms(&self) -> impl Iterator<Item = Atom> {
        Atom::all(self.alphabets.tests.len())
    }

    fn family(&self, mut f: impl FnMut(u32, &mut LanguageC)) -> IndexedFamily {
        let mut fam = IndexedFamily::empty(self.n_ind);
        for (i, l) in fam.0.iter_mut().enumerate() {
            f(i as u32, l);
        }
        fam
    }

    fn immediate(&self, cont: impl Fn(u32) -> Continuation) -> IndexedFamily {
        self.family(|i, l| l.extend(self.atoms().map(|a| (GuardedWord::atom(a), cont(i)))))
    }

    fn guarded(&self, fam: &IndexedFamily, b: &TestDenotation, positive: bool) -> IndexedFamily {
        self.family(|i, l| {
            l.extend(
                fam.get(i).iter().filter(|(w, _)| b.contains(i, w.first_atom()) == positive).cloned(),
            )
        })
    }

    fn seq(&self, g: &IndexedFamily, h: &IndexedFamily) -> IndexedFamily {
        let index: Vec<_> =
            h.0.iter().map(|hj| by_first_atom(self.n_atoms, hj.iter().map(|(w, c)| (w, *c)))).collect();
        seq_indexed(g, &index, self.bound)
    }

    fn eval(&self, e: &Exp) -> Result<Denotation, Error> {
        let a = self.alphabets;
        let start_only = |start| Denotation { start, labels: Vec::new() };
        Ok(match &e.kind {
            ExpKind::Assert(b) => {
                let d = denote(b, a)?;
                start_only(self.family(|i, l| {
                    l.extend(
                        self.atoms()
                            .filter(|&al| d.contains(i, al))
                            .map(|al| (GuardedWord::atom(al), Continuation::Accept(i))),
                    )
                }))
            }
            ExpKind::Act(p) => {
                let p = a.action_index(p)?;
                start_only(self.family(|i, l| {
                    if self.bound >= 1 {
                        for x in self.atoms() {
                            for y in self.atoms() {
                                l.insert((GuardedWord::from_steps(x, [(p, y)]), Continuation::Accept(i)));
                            }
                        }
                    }
                }))
            }
            ExpKind::Assign(v) => {
                let j = a.indicator_index(v)?;
                start_only(self.immediate(|_| Continuation::Accept(j)))
            }
            ExpKind::Break => start_only(self.immediate(Continuation::Break)),
            ExpKind::Return => start_only(self.immediate(|_| Continuation::Return)),
            ExpKind::Goto(l) => {
                let l = a.label_index(l)?;
                start_only(self.immediate(|i| Continuation::Jump(l, i)))
            }
            ExpKind::Label(l) => {
                let l = a.label_index(l)?;
                let fam = self.immediate(Continuation::Accept);
                Denotation { start: fam.clone(), labels: vec![(l, fam)] }
            }
            ExpKind::Seq(items) => {
                let mut rev = items.iter().rev();
                let Some(last) = rev.next() else {
                    return Ok(start_only(self.immediate(Continuation::Accept)));
                };
                let mut acc = self.eval(last)?;
                for item in rev {
                    let head = self.eval(item)?;
                    let mut labels: Vec<_> =
                        head.labels.iter().map(|(l, fam)| (*l, self.seq(fam, &acc.start))).collect();
                    labels.append(&mut acc.labels);
                    acc = Denotation { start: self.seq(&head.start, &acc.start), labels };
                }
                acc
            }
            ExpKind::If(b, then, els) => {
                let d = denote(b, a)?;
                let t = self.eval(then)?;
                let f = self.eval(els)?;
                let mut start = self.guarded(&t.start, &d, true);
                for (i, l) in self.guarded(&f.start, &d, false).0.into_iter().enumerate() {
                    start.0[i].extend(l);
                }
                let mut labels = t.labels;
                labels.extend(f.labels);
                Denotation { start, labels }
            }
            ExpKind::While(b, body) => {
                let d = denote(b, a)?;
                let body = self.eval(body)?;
                let entered = self.guarded(&body.start, &d, true);
                let exit = self.family(|i, l| {
                    l.extend(
                        self.atoms()
                            .filter(|&al| !d.contains(i, al))
                            .map(|al| (GuardedWord::atom(al), Continuation::Accept(i))),
                    )
                });
                let mut lfp = IndexedFamily::empty(self.n_ind);
                loop {
                    let mut next = self.seq(&entered, &lfp).map_floor();
                    for (i, l) in exit.0.iter().enumerate() {
                        next.0[i].extend(l.iter().cloned());
                    }
                    // the rules are monotone, so equal sizes mean equal sets
                    let done = next.total() == lfp.total();
                    lfp = next;
                    if done {
                        break;
                    }
                }
                let labels =
                    body.labels.iter().map(|(l, fam)| (*l, self.seq(fam, &lfp).map_floor())).collect();
                Denotation { start: lfp, labels }
            }
        })
    }
}

/// The continuation semantics of `e`, from the start and from every label,
/// restricted to words with at most `bound` actions.
pub fn cont_semantics(e: &Exp, alphabets: &Alphabets, bound: usize) -> Result<LabeledFamily, Error> {
    let ctx = Ctx { alphabets, bound, n_ind: alphabets.n_indicators(), n_atoms: alphabets.n_atoms() };
    let d = ctx.eval(e)?;
    let mut labels = vec![IndexedFamily::empty(ctx.n_ind); alphabets.labels.len()];
    for (l, fam) in d.labels {
        labels[l as usize] = fam;
    }
    Ok(LabeledFamily { start: d.start, labels })
}

/// Jump flattening: the least labeled family of guarded languages closed
/// under accepting, returning and following jumps, truncated to `bound`.
pub fn resolve(g: &LabeledFamily, bound: usize) -> ResolvedFamily {
    let n_ind = g.start.0.len();
    let n_labels = g.labels.len();
    let mut r = ResolvedFamily {
        start: vec![Language::new(); n_ind],
        labels: vec![vec![Language::new(); n_ind]; n_labels],
    };
    let mut jumps = Vec::new();
    for k in g.entry_points() {
        for i in 0..n_ind as u32 {
            for (w, c) in g.get(k).get(i) {
                match *c {
                    Continuation::Accept(_) | Continuation::Return => {
                        r.get_mut(k, i).insert(w.clone());
                    }
                    Continuation::Jump(l, j) => jumps.push((k, i, w, l, j)),
                    Continuation::Break(_) => {}
                }
            }
        }
    }
    let n_atoms = jumps
        .iter()
        .map(|(_, _, w, _, _)| w.last_atom().index() + 1)
        .chain(r.start.iter().chain(r.labels.iter().flatten()).flatten().map(|w| w.first_atom().index() + 1))
        .max()
        .unwrap_or(1);
    loop {
        let before = r.total();
        let mut additions = Vec::new();
        {
            let index: Vec<Vec<_>> = r
                .labels
                .iter()
                .map(|per_i| per_i.iter().map(|lang| by_first_atom(n_atoms, lang.iter().map(|w| (w, ())))).collect())
                .collect();
            for &(k, i, w, l, j) in &jumps {
                let budget = bound - w.n_actions();
                for (x, ()) in &index[l as usize][j as usize][w.last_atom().index()] {
                    if x.n_actions() > budget {
                        break;
                    }
                    additions.push((k, i, w.coalesce(x).unwrap()));
                }
            }
        }
        for (k, i, w) in additions {
            r.get_mut(k, i).insert(w);
        }
        if r.total() == before {
            return r;
        }
    }
}

/// The trace language of `e` started with indicator value index `i`.
pub fn trace_language(e: &Exp, alphabets: &Alphabets, i: u32, bound: usize) -> Result<Language, Error> {
    Ok(trace_languages(e, alphabets, bound)?.swap_remove(i as usize))
}

/// Trace languages for every starting indicator value.
pub fn trace_languages(e: &Exp, alphabets: &Alphabets, bound: usize) -> Result<Vec<Language>, Error> {
    let g = cont_semantics(e, alphabets, bound)?;
    Ok(resolve(&g, bound).start)
}
