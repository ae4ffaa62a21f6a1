//! Variable sets and canonical CI query keys.

use core::cmp::Ordering;
use core::fmt;

/// Maximum number of variables a graph or dataset may hold.
pub const MAX_VARS: usize = 64;

/// A set of variable indices backed by a 64-bit mask.
///
/// Ordering is by cardinality first, then lexicographic over the sorted
/// members, which is the canonical order for separator lists.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        VarSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        debug_assert!(v < MAX_VARS);
        VarSet(1u64 << v)
    }

    /// `{0, 1, .., p-1}`
    pub fn full(p: usize) -> Self {
        debug_assert!(p <= MAX_VARS);
        if p == 64 {
            VarSet(u64::MAX)
        } else {
            VarSet((1u64 << p) - 1)
        }
    }

    pub fn from_slice(vs: &[usize]) -> Self {
        vs.iter().fold(VarSet::EMPTY, |s, &v| s.with(v))
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VARS && self.0 >> v & 1 == 1
    }

    #[must_use]
    pub fn with(self, v: usize) -> Self {
        VarSet(self.0 | 1u64 << v)
    }

    #[must_use]
    pub fn without(self, v: usize) -> Self {
        VarSet(self.0 & !(1u64 << v))
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[must_use]
    pub fn union(self, o: VarSet) -> Self {
        VarSet(self.0 | o.0)
    }

    #[must_use]
    pub fn intersection(self, o: VarSet) -> Self {
        VarSet(self.0 & o.0)
    }

    #[must_use]
    pub fn minus(self, o: VarSet) -> Self {
        VarSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: VarSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_proper_subset(self, o: VarSet) -> bool {
        self.is_subset(o) && self != o
    }

    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// All subsets of `self` with exactly `k` members, in lexicographic
    /// order of their sorted members.
    pub fn subsets_of_size(self, k: usize) -> Subsets {
        let members: [u8; MAX_VARS] = {
            let mut m = [0u8; MAX_VARS];
            for (i, v) in self.iter().enumerate() {
                m[i] = v as u8;
            }
            m
        };
        let n = self.len();
        let mut idx = [0u8; MAX_VARS];
        for (i, slot) in idx.iter_mut().enumerate().take(k) {
            *slot = i as u8;
        }
        Subsets {
            members,
            n,
            k,
            idx,
            done: k > n,
        }
    }

    /// All subsets with at most `max` members, by size then lexicographic.
    pub fn subsets_up_to(self, max: usize) -> impl Iterator<Item = VarSet> {
        let top = max.min(self.len());
        (0..=top).flat_map(move |k| self.subsets_of_size(k))
    }
}

impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(VarSet::EMPTY, |s, v| s.with(v))
    }
}

impl IntoIterator for VarSet {
    type Item = usize;
    type IntoIter = Members;
    fn into_iter(self) -> Members {
        self.iter()
    }
}

/// Ascending iterator over the members of a [`VarSet`].
#[derive(Clone)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Fixed-size subset enumerator, see [`VarSet::subsets_of_size`].
pub struct Subsets {
    members: [u8; MAX_VARS],
    n: usize,
    k: usize,
    idx: [u8; MAX_VARS],
    done: bool,
}

impl Iterator for Subsets {
    type Item = VarSet;
    fn next(&mut self) -> Option<VarSet> {
        if self.done {
            return None;
        }
        let out = (0..self.k).fold(VarSet::EMPTY, |s, i| {
            s.with(self.members[self.idx[i] as usize] as usize)
        });
        // advance to the next combination
        let mut i = self.k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if (self.idx[i] as usize) < self.n - self.k + i {
                self.idx[i] += 1;
                for j in i + 1..self.k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// A canonical conditional-independence query `(x, y | z)` with `x < y`
/// and neither endpoint in `z`. Direction-free, so it doubles as a cache key
/// and as the key of a hypothesis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CiKey {
    pub x: usize,
    pub y: usize,
    pub z: VarSet,
}

impl CiKey {
    /// Builds a canonical key; returns `None` if `x == y` or an endpoint
    /// sits in the conditioning set.
    pub fn new(a: usize, b: usize, z: VarSet) -> Option<Self> {
        if a == b || z.contains(a) || z.contains(b) {
            return None;
        }
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        Some(CiKey { x, y, z })
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.x, self.y)
    }

    /// Highest variable index mentioned by the key.
    pub fn max_var(&self) -> usize {
        match self.z.bits() {
            0 => self.y,
            bits => self.y.max(63 - bits.leading_zeros() as usize),
        }
    }
}

impl fmt::Debug for CiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} | {:?})", self.x, self.y, self.z)
    }
}

/// Binomial coefficient as `u128`, exact for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
