//! Index sets M(m,n) (all m-tuples over {1,..,n}) and J(m,n) (the
//! nondecreasing ones), coordinate subsets, index composition, and
//! permutation classes.
//!
//! Index values are 1-based throughout the public API. Storage offsets are
//! 0-based and follow lexicographic order of the indices, so offset
//! arithmetic never leaves this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Enumeration cap used when none is configured.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Builds an index over {1,..,n}.
    pub fn new(entries: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|&&v| v == 0 || v > n) {
            return Err(Error::BadParams(format!("index entry {bad} outside [1, {n}]")));
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_vec(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn sorted(&self) -> MultiIndex {
        let mut v = self.0.clone();
        v.sort_unstable();
        MultiIndex(v)
    }

    /// Exponent vector alpha with alpha[v-1] = multiplicity of value v.
    pub fn exponents(&self, n: usize) -> Vec<usize> {
        let mut alpha = vec![0; n];
        for &v in &self.0 {
            alpha[v - 1] += 1;
        }
        alpha
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(i: MultiIndex) -> Self {
        i.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Full,
    Nondecreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexSetSpec {
    pub m: usize,
    pub n: usize,
    pub kind: IndexKind,
}

impl IndexSetSpec {
    pub fn full(m: usize, n: usize) -> Self {
        Self { m, n, kind: IndexKind::Full }
    }

    pub fn nondecreasing(m: usize, n: usize) -> Self {
        Self { m, n, kind: IndexKind::Nondecreasing }
    }

    /// n^m for the full set, binom(n+m-1, m) for the nondecreasing one.
    /// Saturates at `u128::MAX`.
    pub fn cardinality(&self) -> u128 {
        match self.kind {
            IndexKind::Full => (self.n as u128).checked_pow(self.m as u32).unwrap_or(u128::MAX),
            IndexKind::Nondecreasing => binomial((self.n + self.m).saturating_sub(1) as u64, self.m as u64),
        }
    }

    /// Cardinality as a `usize`, or `InstanceTooLarge` above `limit`.
    pub fn checked_len(&self, limit: usize) -> Result<usize> {
        let size = self.cardinality();
        if size > limit as u128 {
            return Err(Error::InstanceTooLarge { size, limit });
        }
        Ok(size as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::BadParams(format!(
                "index set needs m >= 1 and n >= 1 (got m={}, n={})",
                self.m, self.n
            )));
        }
        Ok(())
    }

    pub fn enumerate(&self) -> Result<Vec<MultiIndex>> {
        self.enumerate_with_limit(DEFAULT_ENUMERATION_LIMIT)
    }

    /// All indices of the set, each once, in lexicographic order.
    pub fn enumerate_with_limit(&self, limit: usize) -> Result<Vec<MultiIndex>> {
        self.validate()?;
        let len = self.checked_len(limit)?;
        let mut out = Vec::with_capacity(len);
        let mut cur = vec![1usize; self.m];
        loop {
            out.push(MultiIndex(cur.clone()));
            // odometer step from the right
            let Some(pos) = (0..self.m).rev().find(|&p| cur[p] < self.n) else {
                break;
            };
            cur[pos] += 1;
            let reset = match self.kind {
                IndexKind::Full => 1,
                IndexKind::Nondecreasing => cur[pos],
            };
            for v in cur.iter_mut().skip(pos + 1) {
                *v = reset;
            }
        }
        debug_assert_eq!(out.len(), len);
        Ok(out)
    }

    /// Position of `i` in the lexicographic enumeration of this set.
    pub fn offset(&self, i: &MultiIndex) -> Option<usize> {
        let e = i.entries();
        if e.len() != self.m || e.iter().any(|&v| v == 0 || v > self.n) {
            return None;
        }
        match self.kind {
            IndexKind::Full => Some(e.iter().fold(0usize, |acc, &v| acc * self.n + (v - 1))),
            IndexKind::Nondecreasing => {
                if !i.is_nondecreasing() {
                    return None;
                }
                // count nondecreasing tuples that precede i
                let mut rank: u128 = 0;
                let mut lo = 1usize;
                for (k, &v) in e.iter().enumerate() {
                    let rest = (self.m - k - 1) as u64;
                    for smaller in lo..v {
                        // tails of length `rest` with values in [smaller, n]
                        rank += binomial((self.n - smaller) as u64 + rest, rest);
                    }
                    lo = v;
                }
                usize::try_from(rank).ok()
            }
        }
    }
}

/// Offset of a full index given as 1-based entries, no validation.
#[inline]
pub(crate) fn full_offset(entries: &[usize], n: usize) -> usize {
    entries.iter().fold(0usize, |acc, &v| acc * n + (v - 1))
}

/// Inverse of `full_offset`; writes 1-based entries into `out`.
#[inline]
pub(crate) fn full_entries(mut offset: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = offset % n + 1;
        offset /= n;
    }
}

/// Exact binomial coefficient; saturates on overflow.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)).unwrap_or(u128::MAX)
}

/// A subset S of the coordinates {1,..,m}, stored as a bitmask
/// (bit k-1 set iff coordinate k is a member).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordinateSubset {
    m: usize,
    mask: u32,
}

impl CoordinateSubset {
    pub fn from_members(m: usize, members: &[usize]) -> Result<Self> {
        if m == 0 || m > 31 {
            return Err(Error::MalformedSubset(format!("ambient arity {m} outside [1, 31]")));
        }
        let mut mask = 0u32;
        for &k in members {
            if k == 0 || k > m {
                return Err(Error::MalformedSubset(format!("coordinate {k} outside [1, {m}]")));
            }
            if mask & (1 << (k - 1)) != 0 {
                return Err(Error::MalformedSubset(format!("coordinate {k} listed twice")));
            }
            mask |= 1 << (k - 1);
        }
        Ok(Self { m, mask })
    }

    pub fn singleton(m: usize, k: usize) -> Result<Self> {
        Self::from_members(m, &[k])
    }

    pub fn all(m: usize) -> Self {
        Self { m, mask: if m >= 32 { u32::MAX } else { (1u32 << m) - 1 } }
    }

    pub fn ambient(&self) -> usize {
        self.m
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= 1 && k <= self.m && self.mask & (1 << (k - 1)) != 0
    }

    /// Members in increasing order, 1-based.
    pub fn members(&self) -> Vec<usize> {
        (1..=self.m).filter(|&k| self.contains(k)).collect()
    }

    pub fn complement(&self) -> Self {
        Self { m: self.m, mask: Self::all(self.m).mask & !self.mask }
    }

    /// P_k(m): all k-subsets, in increasing order of their bitmask.
    pub fn all_of_size(m: usize, k: usize) -> Vec<Self> {
        (0u32..(1u32 << m))
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| Self { m, mask })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexClass {
    pub representative: MultiIndex,
    pub cardinality: u64,
}

/// Number of distinct rearrangements of the entries: m! / prod(mult_v!).
pub fn class_cardinality(entries: &[usize]) -> u64 {
    let mut sorted = entries.to_vec();
    sorted.sort_unstable();
    let mut card: u128 = factorial(sorted.len() as u64);
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            card /= factorial(run);
            run = 1;
        }
    }
    card /= factorial(run);
    card as u64
}

pub fn class_of(i: &MultiIndex) -> IndexClass {
    IndexClass { representative: i.sorted(), cardinality: class_cardinality(i.entries()) }
}

/// i (+) j: the index that agrees with `i` on S and with `j` on the
/// complement of S. `i` lists the values on S in increasing coordinate
/// order, `j` those on the complement.
pub fn compose(i: &[usize], j: &[usize], s: &CoordinateSubset) -> Result<MultiIndex> {
    let m = s.ambient();
    if i.len() != s.len() || j.len() != m - s.len() {
        return Err(Error::MalformedSubset(format!(
            "|S| = {} and |complement| = {} but got {} and {} values",
            s.len(),
            m - s.len(),
            i.len(),
            j.len()
        )));
    }
    let (mut ii, mut jj) = (i.iter(), j.iter());
    let out = (1..=m)
        .map(|k| if s.contains(k) { *ii.next().unwrap() } else { *jj.next().unwrap() })
        .collect();
    Ok(MultiIndex(out))
}

/// E(S) = max over coordinates k of the number of distinct values i_k
/// taken over the set.
pub fn coordinate_extent(set: &[MultiIndex]) -> Result<usize> {
    let first = set.first().ok_or(Error::EmptyInput("coordinate_extent needs a nonempty set"))?;
    let m = first.arity();
    if let Some(bad) = set.iter().find(|i| i.arity() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: bad.arity() });
    }
    let extent = (0..m)
        .map(|k| {
            let mut values: Vec<usize> = set.iter().map(|i| i.entries()[k]).collect();
            values.sort_unstable();
            values.dedup();
            values.len()
        })
        .max()
        .unwrap_or(0);
    Ok(extent)
}
