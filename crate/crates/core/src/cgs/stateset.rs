use std::fmt;

/// Dense bit set of state ids over a fixed universe `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    n: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn from_iter_in(n: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in ids {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.n, "state {i} outside universe of {}", self.n);
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        fresh
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.n {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> StateSet {
        StateSet::full(self.n).difference(self)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip(&self, other: &StateSet, op: impl Fn(u64, u64) -> u64) -> StateSet {
        debug_assert_eq!(self.n, other.n);
        StateSet { n: self.n, words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect() }
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
