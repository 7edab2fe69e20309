//! Coefficient tensors over M(m,n) and the mixed norms
//! `l_p(S)[l_q(complement of S)]` together with their sum over all k-subsets.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lorentz::lp_norm;
use crate::multiindex::{
    class_cardinality, full_entries, full_offset, CoordinateSubset, IndexSetSpec, MultiIndex,
    DEFAULT_ENUMERATION_LIMIT,
};
use crate::sum::pairwise_sum;

/// A complex family `(a_i)` indexed by M(m,n), stored in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTensor {
    m: usize,
    n: usize,
    values: Vec<Complex64>,
    symmetric: bool,
}

impl CoefficientTensor {
    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        let spec = IndexSetSpec::full(m, n);
        if m == 0 || n == 0 {
            return Err(Error::BadParams(format!("tensor needs m, n >= 1 (got m={m}, n={n})")));
        }
        let len = spec.checked_len(DEFAULT_ENUMERATION_LIMIT)?;
        Ok(Self { m, n, values: vec![Complex64::new(0.0, 0.0); len], symmetric: true })
    }

    pub fn from_values(m: usize, n: usize, values: Vec<Complex64>) -> Result<Self> {
        let zero = Self::zeros(m, n)?;
        if values.len() != zero.values.len() {
            return Err(Error::DimensionMismatch { expected: zero.values.len(), found: values.len() });
        }
        Ok(Self { m, n, values, symmetric: false })
    }

    /// Fills each entry from its 1-based index.
    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(&[usize]) -> Complex64) -> Result<Self> {
        let mut t = Self::zeros(m, n)?;
        let mut e = vec![0; m];
        for (off, v) in t.values.iter_mut().enumerate() {
            full_entries(off, n, &mut e);
            *v = f(&e);
        }
        t.symmetric = false;
        Ok(t)
    }

    /// `u^1 (x) ... (x) u^m`; all factors must have the same length.
    pub fn rank_one(factors: &[Vec<Complex64>]) -> Result<Self> {
        let n = factors.first().map(Vec::len).ok_or(Error::EmptyInput("rank_one needs at least one factor"))?;
        if let Some(bad) = factors.iter().find(|u| u.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        Self::from_fn(factors.len(), n, |e| e.iter().zip(factors).map(|(&i, u)| u[i - 1]).product())
    }

    /// Symmetric tensor with `a_i = value(sorted i)`.
    pub fn symmetric_from_fn(m: usize, n: usize, mut value: impl FnMut(&MultiIndex) -> Complex64) -> Result<Self> {
        let mut t = Self::from_fn(m, n, |e| {
            let mut s = e.to_vec();
            s.sort_unstable();
            value(&MultiIndex::from_vec(s))
        })?;
        t.symmetric = true;
        Ok(t)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> IndexSetSpec {
        IndexSetSpec::full(self.m, self.n)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The symmetry flag recorded at construction.
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: &[usize]) -> Complex64 {
        self.values[full_offset(i, self.n)]
    }

    pub fn set(&mut self, i: &[usize], v: Complex64) {
        let off = full_offset(i, self.n);
        self.values[off] = v;
        self.symmetric = false;
    }

    /// First index whose entry differs (beyond `rel_tol`) from the entry at
    /// its sorted representative.
    pub fn symmetry_defect(&self, rel_tol: f64) -> Option<MultiIndex> {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut e = vec![0; self.m];
        for (off, v) in self.values.iter().enumerate() {
            full_entries(off, self.n, &mut e);
            let mut s = e.clone();
            s.sort_unstable();
            if (v - self.get(&s)).norm() > rel_tol * scale {
                return Some(MultiIndex::from_vec(e));
            }
        }
        None
    }

    /// Validates symmetry and sets the flag.
    pub fn into_symmetric(mut self) -> Result<Self> {
        if let Some(i) = self.symmetry_defect(1e-12) {
            return Err(Error::SymmetryViolation { index: i.into() });
        }
        self.symmetric = true;
        Ok(self)
    }

    /// Average over each permutation class.
    pub fn symmetrize(&self) -> Self {
        let mut sums = std::collections::HashMap::<Vec<usize>, Complex64>::new();
        let mut e = vec![0; self.m];
        for (off, v) in self.values.iter().enumerate() {
            full_entries(off, self.n, &mut e);
            let mut s = e.clone();
            s.sort_unstable();
            *sums.entry(s).or_default() += v;
        }
        let mut out = Self::symmetric_from_fn(self.m, self.n, |j| {
            sums[j.entries()] / class_cardinality(j.entries()) as f64
        })
        .expect("same shape as self");
        out.symmetric = true;
        out
    }

    /// `a^S`: entries outside the kept set set to zero.
    pub fn restrict(&self, mut keep: impl FnMut(&[usize]) -> bool) -> Self {
        let mut out = self.clone();
        let mut e = vec![0; self.m];
        for (off, v) in out.values.iter_mut().enumerate() {
            full_entries(off, self.n, &mut e);
            if !keep(&e) {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        out.symmetric = false;
        out
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * lambda).collect(), ..self.clone() }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `sum_i |a_i|`.
    pub fn l1(&self) -> f64 {
        pairwise_sum(&self.magnitudes())
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v >= 1.0 {
        Ok(())
    } else {
        Err(Error::BadParams(format!("exponent {name} must lie in [1, inf], got {v}")))
    }
}

/// `|a|_{l_p(S)[l_q(S^)]}`: outer `l_p` over the coordinates in S of the
/// inner `l_q` norms over the complementary coordinates.
pub fn block_norm(a: &CoefficientTensor, s: &CoordinateSubset, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if s.ambient() != a.m {
        return Err(Error::MalformedSubset(format!(
            "subset lives in {} coordinates but the tensor has arity {}",
            s.ambient(),
            a.m
        )));
    }
    let members = s.members();
    let outer_len = a.n.pow(members.len() as u32);
    let inner_len = a.len() / outer_len;
    let mut groups = vec![Vec::with_capacity(inner_len); outer_len];
    let mut e = vec![0; a.m];
    for (off, v) in a.values.iter().enumerate() {
        full_entries(off, a.n, &mut e);
        let o = members.iter().fold(0usize, |acc, &k| acc * a.n + (e[k - 1] - 1));
        groups[o].push(v.norm());
    }
    let inner: Vec<f64> = groups.iter().map(|g| lp_norm(g, q)).collect();
    Ok(lp_norm(&inner, p))
}

/// `|a|_{(m,n,k,p,q)}`: the sum of `block_norm` over all k-subsets, taken in
/// bitmask order.
pub fn aggregate_norm(a: &CoefficientTensor, k: usize, p: f64, q: f64) -> Result<f64> {
    if k == 0 || k >= a.m {
        return Err(Error::BadParams(format!("aggregate norm needs 1 <= k < m = {}, got k = {k}", a.m)));
    }
    let parts: Vec<f64> = CoordinateSubset::all_of_size(a.m, k)
        .par_iter()
        .map(|s| block_norm(a, s, p, q))
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn random_tensor(m: usize, n: usize, seed: u64) -> CoefficientTensor {
        let mut rng = stream_rng(seed, 0);
        CoefficientTensor::from_fn(m, n, |_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn block_norm_examples() {
        let id = CoefficientTensor::from_values(2, 2, re(&[1.0, 0.0, 0.0, 1.0])).unwrap();
        let s1 = CoordinateSubset::singleton(2, 1).unwrap();
        assert!(close(block_norm(&id, &s1, 1.0, 2.0).unwrap(), 2.0));

        let a = CoefficientTensor::from_values(2, 2, re(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert!(close(block_norm(&a, &s1, f64::INFINITY, 1.0).unwrap(), 7.0));
        // columns instead of rows
        let s2 = CoordinateSubset::singleton(2, 2).unwrap();
        assert!(close(block_norm(&a, &s2, f64::INFINITY, 1.0).unwrap(), 6.0));

        assert!(block_norm(&a, &s1, 0.5, 1.0).is_err());
        let wrong = CoordinateSubset::singleton(3, 1).unwrap();
        assert!(block_norm(&a, &wrong, 1.0, 1.0).is_err());
    }

    #[test]
    fn full_subset_and_equal_exponents_give_plain_lp() {
        let a = random_tensor(3, 3, 5);
        let all = CoordinateSubset::all(3);
        for p in [1.0, 1.5, 2.0, f64::INFINITY] {
            for q in [1.0, 2.0, 3.0] {
                assert!(close(block_norm(&a, &all, p, q).unwrap(), lp_norm(a.values(), p)));
            }
            for s in CoordinateSubset::all_of_size(3, 1).iter().chain(&CoordinateSubset::all_of_size(3, 2)) {
                if p.is_finite() {
                    assert!(close(block_norm(&a, s, p, p).unwrap(), lp_norm(a.values(), p)));
                }
            }
        }
    }

    #[test]
    fn aggregate_examples() {
        let a = random_tensor(2, 3, 9);
        let direct: f64 = (1..=2)
            .map(|k| block_norm(&a, &CoordinateSubset::singleton(2, k).unwrap(), 1.0, 2.0).unwrap())
            .sum();
        assert!(close(aggregate_norm(&a, 1, 1.0, 2.0).unwrap(), direct));
        assert_eq!(aggregate_norm(&CoefficientTensor::zeros(3, 2).unwrap(), 2, 1.5, 2.0).unwrap(), 0.0);
        assert!(aggregate_norm(&a, 2, 1.0, 2.0).is_err());
        assert!(aggregate_norm(&a, 0, 1.0, 2.0).is_err());
    }

    #[test]
    fn symmetric_tensors_have_equal_summands() {
        for seed in 0..20 {
            let a = random_tensor(3, 3, seed).symmetrize();
            assert!(a.symmetric());
            for k in 1..3 {
                let subsets = CoordinateSubset::all_of_size(3, k);
                let direct: f64 = subsets.iter().map(|s| block_norm(&a, s, 1.5, 2.0).unwrap()).sum();
                let one = block_norm(&a, &subsets[0], 1.5, 2.0).unwrap();
                assert!(close(direct, subsets.len() as f64 * one));
                assert!(close(aggregate_norm(&a, k, 1.5, 2.0).unwrap(), direct));
            }
        }
    }

    #[test]
    fn sup_outer_is_smallest_and_restriction_contracts() {
        for seed in 0..20 {
            let a = random_tensor(3, 3, 100 + seed);
            let s = CoordinateSubset::from_members(3, &[1, 3]).unwrap();
            for q in [1.0, 2.0] {
                let sup = block_norm(&a, &s, f64::INFINITY, q).unwrap();
                for p in [1.0, 1.5, 4.0] {
                    let full = block_norm(&a, &s, p, q).unwrap();
                    assert!(sup <= full * (1.0 + 1e-12));
                    let r = a.restrict(|e| (e[0] + e[1] * 7 + e[2] * 3 + seed as usize) % 3 != 0);
                    assert!(block_norm(&r, &s, p, q).unwrap() <= full * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn symmetry_checks() {
        let mut a = CoefficientTensor::zeros(2, 2).unwrap();
        a.set(&[1, 2], Complex64::new(1.0, 0.0));
        assert!(a.clone().into_symmetric().is_err());
        a.set(&[2, 1], Complex64::new(1.0, 0.0));
        assert!(a.into_symmetric().unwrap().symmetric());
    }

    #[test]
    fn rank_one_entries() {
        let u = re(&[1.0, 2.0]);
        let v = re(&[3.0, -1.0]);
        let t = CoefficientTensor::rank_one(&[u, v]).unwrap();
        assert_eq!(t.get(&[2, 1]), Complex64::new(6.0, 0.0));
        assert_eq!(t.get(&[1, 2]), Complex64::new(-1.0, 0.0));
    }
}
