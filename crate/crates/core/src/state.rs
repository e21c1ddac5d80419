//! Fixed-width bit vectors used for states and reaction candidate sets.

use std::fmt;

const WORD_BITS: usize = 64;

/// A subset of the background set, stored as one bit per entity.
///
/// The width is fixed at construction. Bits beyond `len` in the last word are
/// always zero, so word-wise equality and popcount are exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct State {
    words: Vec<u64>,
    len: usize,
}

impl State {
    pub fn empty(len: usize) -> Self {
        State {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = State {
            words: vec![u64::MAX; len.div_ceil(WORD_BITS)],
            len,
        };
        s.mask_tail();
        s
    }

    /// Builds a state from entity indices. Panics if an index is `>= len`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = State::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds a state from a 0/1 slice; any nonzero entry counts as present.
    pub fn from_bools(bits: &[bool]) -> Self {
        State::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn fill(&mut self) {
        self.words.iter_mut().for_each(|w| *w = u64::MAX);
        self.mask_tail();
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `self |= other`. Widths must match.
    pub fn union_with(&mut self, other: &State) {
        assert_eq!(self.len, other.len, "state width mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &State) -> State {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    /// Overwrites `self` with `a | b` without allocating.
    pub fn assign_union(&mut self, a: &State, b: &State) {
        assert!(
            self.len == a.len && a.len == b.len,
            "state width mismatch"
        );
        for ((o, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *o = x | y;
        }
    }

    pub fn is_subset(&self, other: &State) -> bool {
        assert_eq!(self.len, other.len, "state width mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &State) -> bool {
        assert_eq!(self.len, other.len, "state width mismatch");
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State[{}]", self.len)?;
        f.debug_set().entries(self.ones()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * WORD_BITS + tz);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}
