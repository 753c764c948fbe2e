//! Atoms and the Boolean semantics of tests over (indicator, atom) pairs.

use std::fmt;

use crate::error::Error;
use crate::syntax::{Alphabets, BExp};

/// A complete truth assignment to the primitive tests: bit `k` is set iff
/// test `k` of the alphabet holds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(pub u32);

impl Atom {
    pub fn holds(self, test: u32) -> bool {
        self.0 & (1 << test) != 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// All atoms over `n_tests` tests, in ascending bitset order.
    pub fn all(n_tests: usize) -> impl Iterator<Item = Atom> {
        (0..1u32 << n_tests).map(Atom)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The set of (indicator, atom) pairs satisfying a test, one bit per pair.
#[derive(Clone, PartialEq, Eq)]
pub struct TestDenotation {
    n_indicators: usize,
    n_atoms: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for TestDenotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<_> = self.iter().collect();
        f.debug_struct("TestDenotation").field("pairs", &pairs).finish()
    }
}

impl TestDenotation {
    fn len(&self) -> usize {
        self.n_indicators * self.n_atoms
    }

    pub fn empty(n_indicators: usize, n_atoms: usize) -> TestDenotation {
        let words = (n_indicators * n_atoms).div_ceil(64);
        TestDenotation { n_indicators, n_atoms, bits: vec![0; words] }
    }

    pub fn full(n_indicators: usize, n_atoms: usize) -> TestDenotation {
        let mut d = TestDenotation::empty(n_indicators, n_atoms);
        d.bits.iter_mut().for_each(|w| *w = !0);
        d.trim();
        d
    }

    fn trim(&mut self) {
        let rem = self.len() % 64;
        if rem != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn set(&mut self, indicator: usize, atom: usize) {
        let k = indicator * self.n_atoms + atom;
        self.bits[k / 64] |= 1 << (k % 64);
    }

    pub fn contains(&self, indicator: u32, atom: Atom) -> bool {
        let k = indicator as usize * self.n_atoms + atom.index();
        self.bits[k / 64] & (1 << (k % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Member pairs as (indicator index, atom), indicator-major.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Atom)> + '_ {
        (0..self.n_indicators).flat_map(move |i| {
            (0..self.n_atoms)
                .map(move |a| (i as u32, Atom(a as u32)))
                .filter(move |&(i, a)| self.contains(i, a))
        })
    }

    fn union(mut self, other: &TestDenotation) -> TestDenotation {
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        self
    }

    fn intersect(mut self, other: &TestDenotation) -> TestDenotation {
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a &= b);
        self
    }

    fn complement(mut self) -> TestDenotation {
        self.bits.iter_mut().for_each(|w| *w = !*w);
        self.trim();
        self
    }
}

/// Boolean semantics of `b` as a subset of I × At.
pub fn denote(b: &BExp, alphabets: &Alphabets) -> Result<TestDenotation, Error> {
    let n_ind = alphabets.n_indicators();
    let n_atoms = alphabets.n_atoms();
    Ok(match b {
        BExp::False => TestDenotation::empty(n_ind, n_atoms),
        BExp::True => TestDenotation::full(n_ind, n_atoms),
        BExp::Prim(t) => {
            let t = alphabets.test_index(t)?;
            let mut d = TestDenotation::empty(n_ind, n_atoms);
            for i in 0..n_ind {
                for a in Atom::all(alphabets.tests.len()).filter(|a| a.holds(t)) {
                    d.set(i, a.index());
                }
            }
            d
        }
        BExp::IndEq(v) => {
            let i = alphabets.indicator_index(v)? as usize;
            let mut d = TestDenotation::empty(n_ind, n_atoms);
            for a in 0..n_atoms {
                d.set(i, a);
            }
            d
        }
        BExp::Or(x, y) => denote(x, alphabets)?.union(&denote(y, alphabets)?),
        BExp::And(x, y) => denote(x, alphabets)?.intersect(&denote(y, alphabets)?),
        BExp::Not(x) => denote(x, alphabets)?.complement(),
    })
}

/// Membership of `(indicator, atom)` in a denotation.
pub fn holds(d: &TestDenotation, indicator: u32, atom: Atom) -> bool {
    d.contains(indicator, atom)
}
