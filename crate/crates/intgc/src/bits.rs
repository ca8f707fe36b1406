//! Dense bitset primitives for world sets and binary relations.
//!
//! Frames in this crate are small (model checking and enumeration dominate
//! runtime), so both sets of worlds and relations are stored as flat `u64`
//! words. All operations keep the unused tail bits of the last word zero.

const WORD_BITS: usize = 64;

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the last word of an `n`-bit set.
fn tail_mask(n: usize) -> u64 {
    let rem = n % WORD_BITS;
    if rem == 0 {
        !0
    } else {
        (1u64 << rem) - 1
    }
}

/// A set of world indexes drawn from a fixed universe `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldSet {
    len: usize,
    words: Vec<u64>,
}

impl WorldSet {
    pub fn empty(len: usize) -> Self {
        WorldSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = WorldSet {
            len,
            words: vec![!0; words_for(len)],
        };
        if let Some(last) = s.words.last_mut() {
            *last &= tail_mask(len);
        }
        s
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut s = Self::empty(len);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        WorldSet { len, words }
    }

    /// Universe size (not the number of members).
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "world index {i} out of range 0..{}", self.len);
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn complement(&self) -> WorldSet {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.len);
        }
        WorldSet {
            len: self.len,
            words,
        }
    }

    /// Member indexes in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let base = wi * WORD_BITS;
            IterBits { word: w }.map(move |b| base + b)
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Numeric order with world `i` as bit value `2^i`; used wherever a
/// deterministic listing of sets is needed.
impl Ord for WorldSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

impl PartialOrd for WorldSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct IterBits {
    word: u64,
}

impl Iterator for IterBits {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let b = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(b)
    }
}

/// A binary relation on `0..n`, stored as one bitset row per source element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n: usize,
    wpr: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let wpr = words_for(n);
        Relation {
            n,
            wpr,
            rows: vec![0; n * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.set(i, i);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut r = Self::empty(n);
        for &(x, y) in pairs {
            r.set(x, y);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, x: usize, y: usize) {
        assert!(x < self.n && y < self.n);
        self.rows[x * self.wpr + y / WORD_BITS] |= 1u64 << (y % WORD_BITS);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.n && y < self.n && self.rows[x * self.wpr + y / WORD_BITS] >> (y % WORD_BITS) & 1 == 1
    }

    pub fn row(&self, x: usize) -> &[u64] {
        &self.rows[x * self.wpr..(x + 1) * self.wpr]
    }

    pub fn row_set(&self, x: usize) -> WorldSet {
        WorldSet::from_words(self.n, self.row(x).to_vec())
    }

    fn row_mut(&mut self, x: usize) -> &mut [u64] {
        &mut self.rows[x * self.wpr..(x + 1) * self.wpr]
    }

    /// Pairs `(x, y)` in row-major ascending order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| self.row_set(x).iter().map(move |y| (x, y)).collect::<Vec<_>>())
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// In-place reflexive-transitive closure.
    pub fn close_reflexive_transitive(&mut self) {
        for i in 0..self.n {
            self.set(i, i);
        }
        // Bitset Warshall: if x reaches k, x also reaches everything k does.
        for k in 0..self.n {
            for x in 0..self.n {
                if self.contains(x, k) {
                    let (head, tail) = split_rows(&mut self.rows, self.wpr, x, k);
                    for (a, b) in head.iter_mut().zip(tail.iter()) {
                        *a |= b;
                    }
                }
            }
        }
    }

    pub fn union_into_row(&mut self, x: usize, set: &WorldSet) {
        debug_assert_eq!(set.universe(), self.n);
        for (a, b) in self.row_mut(x).iter_mut().zip(set.words()) {
            *a |= b;
        }
    }

    pub fn transpose(&self) -> Relation {
        let mut t = Relation::empty(self.n);
        for x in 0..self.n {
            for y in self.row_set(x).iter() {
                t.set(y, x);
            }
        }
        t
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.n).all(|x| {
            self.row_set(x).iter().all(|y| {
                self.row(y)
                    .iter()
                    .zip(self.row(x))
                    .all(|(ry, rx)| ry & !rx == 0)
            })
        })
    }

    /// `{x : row(x) ∩ target ≠ ∅}` — sources related to some member of `target`.
    pub fn preimage(&self, target: &WorldSet) -> WorldSet {
        let mut out = WorldSet::empty(self.n);
        for x in 0..self.n {
            if any_and(self.row(x), target.words()) {
                out.insert(x);
            }
        }
        out
    }

    /// `⋃_{x ∈ source} row(x)` — everything related-from some member of `source`.
    pub fn image(&self, source: &WorldSet) -> WorldSet {
        let mut out = WorldSet::empty(self.n);
        for x in source.iter() {
            for (o, r) in out.words.iter_mut().zip(self.row(x)) {
                *o |= r;
            }
        }
        out
    }
}

/// Disjoint mutable/shared views of rows `x` and `k`.
fn split_rows(rows: &mut [u64], wpr: usize, x: usize, k: usize) -> (&mut [u64], &[u64]) {
    if x == k {
        // Self-union is a no-op; hand back an empty borrow pair.
        return (&mut [], &[]);
    }
    if x < k {
        let (a, b) = rows.split_at_mut(k * wpr);
        (&mut a[x * wpr..(x + 1) * wpr], &b[..wpr])
    } else {
        let (a, b) = rows.split_at_mut(x * wpr);
        (&mut b[..wpr], &a[k * wpr..(k + 1) * wpr])
    }
}

pub(crate) fn any_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}
