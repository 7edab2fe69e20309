//! The Bohr lift between m-homogeneous polynomials and m-homogeneous
//! Dirichlet series: `c_alpha = a_n` whenever `n = p^alpha`, with `p` the
//! sequence of primes. Also the weight `omega_n`, the two growth tables
//! separating `l_1(omega)` from `l_{2m/(m+1),1}`, and membership reports.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::forms::{PolynomialCoefficients, SupNormEstimate};
use crate::lorentz::{log_power_weight, lorentz_norm, rearrange, LorentzParams};
use crate::multiindex::MultiIndex;
use crate::sum::pairwise_sum;
use crate::verify::{hash_poly, BHConstantTable, InequalityReport};

pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

/// Primes up to a bound, by sieve.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(bound: u64) -> Self {
        let b = bound as usize;
        let mut composite = vec![false; b + 1];
        let mut primes = Vec::new();
        for i in 2..=b {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= b {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        Self { bound, primes }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The k-th prime, 1-based.
    pub fn nth(&self, k: usize) -> Result<u64> {
        k.checked_sub(1)
            .and_then(|i| self.primes.get(i))
            .copied()
            .ok_or_else(|| Error::PrimeTable(format!("prime number {k} is beyond the table (bound {})", self.bound)))
    }

    /// 1-based position of a prime in the table.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }

    /// Prime factorization as (prime, exponent), ascending.
    pub fn factor_primes(&self, n: u64) -> Result<Vec<(u64, usize)>> {
        if n == 0 {
            return Err(Error::Domain("0 has no factorization".into()));
        }
        let mut rest = n;
        let mut out = Vec::new();
        let mut exhausted = true;
        for &p in &self.primes {
            if p.saturating_mul(p) > rest {
                exhausted = false;
                break;
            }
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
        }
        if rest > 1 {
            // the cofactor is prime unless trial division ran out of primes
            let last = self.primes.last().copied().unwrap_or(1);
            if exhausted && last.saturating_mul(last) < rest {
                return Err(Error::PrimeTable(format!("cannot factor {n} with primes up to {}", self.bound)));
            }
            out.push((rest, 1));
        }
        Ok(out)
    }

    /// Prime factorization as (1-based prime index, exponent), ascending.
    pub fn factorize(&self, n: u64) -> Result<Vec<(usize, usize)>> {
        self.factor_primes(n)?
            .into_iter()
            .map(|(p, e)| {
                self.index_of(p)
                    .map(|i| (i, e))
                    .ok_or_else(|| Error::PrimeTable(format!("prime factor {p} of {n} exceeds the table bound {}", self.bound)))
            })
            .collect()
    }

    /// Omega(n): the number of prime factors counted with multiplicity.
    pub fn big_omega(&self, n: u64) -> Result<usize> {
        Ok(self.factor_primes(n)?.iter().map(|f| f.1).sum())
    }

    /// The exponent vector alpha with `n = p^alpha`.
    pub fn prime_power_index(&self, n: u64) -> Result<PrimePowerIndex> {
        let f = self.factorize(n)?;
        let len = f.last().map_or(0, |x| x.0);
        let mut alpha = vec![0; len];
        for (i, e) in f {
            alpha[i - 1] = e;
        }
        Ok(PrimePowerIndex { n, alpha })
    }

    /// `p_{j_1} ... p_{j_m}` for an index of variables.
    pub fn lift_index(&self, j: &[usize]) -> Result<u64> {
        j.iter().try_fold(1u64, |acc, &v| acc.checked_mul(self.nth(v)?).ok_or(Error::Overflow("prime product")))
    }

    /// The sorted variable index of an m-homogeneous n.
    pub fn unlift_index(&self, n: u64, m: usize) -> Result<MultiIndex> {
        let f = self.factorize(n)?;
        let omega: usize = f.iter().map(|x| x.1).sum();
        if omega != m {
            return Err(Error::NotHomogeneous { n, m, omega });
        }
        let entries = f.iter().flat_map(|&(i, e)| std::iter::repeat_n(i, e)).collect::<Vec<_>>();
        let top = entries.last().copied().unwrap_or(1);
        MultiIndex::new(entries, top)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimePowerIndex {
    pub n: u64,
    pub alpha: Vec<usize>,
}

impl PrimePowerIndex {
    pub fn degree(&self) -> usize {
        self.alpha.iter().sum()
    }
}

/// Coefficients `a_n` of an m-homogeneous Dirichlet series, supported on n
/// with exactly m prime factors.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletCoefficients {
    m: usize,
    entries: BTreeMap<u64, Complex64>,
}

impl DirichletCoefficients {
    pub fn new(m: usize, entries: BTreeMap<u64, Complex64>, table: &PrimeTable) -> Result<Self> {
        for &n in entries.keys() {
            let omega = table.big_omega(n)?;
            if omega != m {
                return Err(Error::NotHomogeneous { n, m, omega });
            }
        }
        Ok(Self { m, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &BTreeMap<u64, Complex64> {
        &self.entries
    }

    pub fn get(&self, n: u64) -> Complex64 {
        self.entries.get(&n).copied().unwrap_or_default()
    }

    /// Values in increasing order of n.
    pub fn values(&self) -> Vec<Complex64> {
        self.entries.values().copied().collect()
    }
}

/// `a_{p_{j_1} ... p_{j_m}} = c_j`; every coefficient is kept, zeros too.
pub fn bohr_lift(c: &PolynomialCoefficients, table: &PrimeTable) -> Result<DirichletCoefficients> {
    let mut entries = BTreeMap::new();
    for (j, v) in c.iter() {
        entries.insert(table.lift_index(j.entries())?, *v);
    }
    Ok(DirichletCoefficients { m: c.m(), entries })
}

/// The inverse of [`bohr_lift`] into polynomials in `nvars` variables.
pub fn unlift(d: &DirichletCoefficients, nvars: usize, table: &PrimeTable) -> Result<PolynomialCoefficients> {
    let mut c = PolynomialCoefficients::zeros(d.m, nvars)?;
    for (&n, v) in &d.entries {
        let j = table.unlift_index(n, d.m)?;
        if j.entries().iter().any(|&k| k > nvars) {
            return Err(Error::BadParams(format!("{n} involves a prime beyond the first {nvars}")));
        }
        c.set(&j, *v)?;
    }
    Ok(c)
}

/// `omega_n = (log n)^{(m-1)/2} / n^{(m-1)/(2m)}` for n >= 2.
pub fn bcq_weight(n: u64, m: usize) -> Result<f64> {
    log_power_weight(n, m)
}

/// The same weight with the log exponent `(m-1)/m`.
pub fn bcq_weight_alt(n: u64, m: usize) -> Result<f64> {
    let base = log_power_weight(n, m)?;
    let mm = m as f64;
    Ok(base * (n as f64).ln().powf((mm - 1.0) / mm - (mm - 1.0) / 2.0))
}

/// `|a|_{2m/(m+1),1} <= C_chain(m) |P|_inf` for the lifted coefficients.
pub fn dirichlet_bh_check(
    c: &PolynomialCoefficients,
    sup: &SupNormEstimate,
    constants: &BHConstantTable,
    table: &PrimeTable,
) -> Result<InequalityReport> {
    let d = bohr_lift(c, table)?;
    let m = c.m() as f64;
    let lhs = lorentz_norm(&d.values(), &LorentzParams::new(2.0 * m / (m + 1.0), 1.0)?)?;
    Ok(InequalityReport::against_sup(
        "dirichlet-bh",
        lhs,
        constants.chain_constant(c.m()),
        sup,
        json!({"m": c.m(), "n": c.n(), "largest_n": d.entries.keys().last(), "sup_method": sup.method}),
        hash_poly(c),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtomRow {
    pub n: u64,
    /// `|e_n / omega_n|_{2m/(m+1),1} = n^{(m-1)/(2m)} / (log n)^{(m-1)/2}`.
    pub value: f64,
    /// The same with log exponent `(m-1)/m`.
    pub value_alt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartialSumRow {
    #[serde(rename = "N")]
    pub n: u64,
    /// `sum_{n<=N} omega_n`.
    pub weight_sum: f64,
    /// Divided by `N^{(m-1)/(2m)}`.
    pub ratio: f64,
    /// Divided by `N^{(m+1)/(2m)}`, the l_{2m/(m+1),1} norm of the indicator.
    pub ratio_fundamental: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonEmbeddingTables {
    pub m: usize,
    pub atoms: Vec<AtomRow>,
    pub partial_sums: Vec<PartialSumRow>,
    /// Smallest n from which the atom column increases up to the end.
    pub atoms_increasing_from: u64,
}

/// Both growth tables for n, N up to `n_max`. The atom table lists every n
/// in 2..=n_max; the partial-sum table lists N at `checkpoints`.
pub fn non_embedding_witnesses(m: usize, n_max: u64, checkpoints: &[u64]) -> Result<NonEmbeddingTables> {
    if m < 2 {
        return Err(Error::BadArity(format!("the separation needs m >= 2, got {m}")));
    }
    if n_max < 2 {
        return Err(Error::BadParams("need n_max >= 2".into()));
    }
    let atoms: Vec<AtomRow> = (2..=n_max)
        .into_par_iter()
        .map(|n| Ok(AtomRow { n, value: 1.0 / bcq_weight(n, m)?, value_alt: 1.0 / bcq_weight_alt(n, m)? }))
        .collect::<Result<_>>()?;
    let mut from = n_max;
    while from > 2 && atoms[(from - 3) as usize].value < atoms[(from - 2) as usize].value {
        from -= 1;
    }
    let weights: Vec<f64> = (2..=n_max).map(|n| bcq_weight(n, m)).collect::<Result<_>>()?;
    let mm = m as f64;
    let mut partial_sums = Vec::new();
    for &big_n in checkpoints {
        if big_n < 2 || big_n > n_max {
            return Err(Error::BadParams(format!("checkpoint {big_n} outside 2..={n_max}")));
        }
        let s = pairwise_sum(&weights[..(big_n - 1) as usize]);
        let nf = big_n as f64;
        partial_sums.push(PartialSumRow {
            n: big_n,
            weight_sum: s,
            ratio: s / nf.powf((mm - 1.0) / (2.0 * mm)),
            ratio_fundamental: s / nf.powf((mm + 1.0) / (2.0 * mm)),
        });
    }
    Ok(NonEmbeddingTables { m, atoms, partial_sums, atoms_increasing_from: from })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    /// `sum |a_n| omega_n`.
    pub weighted_l1: f64,
    /// `|a|_{2m/(m+1),1}`.
    pub lorentz: f64,
}

pub fn corollary_membership(c: &PolynomialCoefficients, table: &PrimeTable) -> Result<MembershipReport> {
    let d = bohr_lift(c, table)?;
    let m = c.m();
    let mut terms = Vec::new();
    for (&n, v) in &d.entries {
        if v.norm() > 0.0 {
            let w = if m == 1 { 1.0 } else { bcq_weight(n, m)? };
            terms.push(v.norm() * w);
        }
    }
    let mf = m as f64;
    let lorentz = lorentz_norm(&d.values(), &LorentzParams::new(2.0 * mf / (mf + 1.0), 1.0)?)?;
    Ok(MembershipReport { weighted_l1: pairwise_sum(&terms), lorentz })
}

/// `sum |a_n| n^{-(m-1)/(2m)}` against `sum_k a*_k k^{-(m-1)/(2m)}`.
pub fn rearrangement_comparison(d: &DirichletCoefficients) -> (f64, f64) {
    let mm = d.m as f64;
    let e = -(mm - 1.0) / (2.0 * mm);
    let lhs: Vec<f64> = d.entries.iter().map(|(&n, v)| v.norm() * (n as f64).powf(e)).collect();
    let rhs: Vec<f64> = rearrange(&d.values()).iter().enumerate().map(|(k, v)| v * ((k + 1) as f64).powf(e)).collect();
    (pairwise_sum(&lhs), pairwise_sum(&rhs))
}

/// Every n <= bound with Omega(n) = m, ascending.
pub fn homogeneous_support(m: usize, bound: u64, table: &PrimeTable) -> Result<Vec<u64>> {
    let hits: Vec<Option<u64>> = (1..=bound)
        .into_par_iter()
        .map(|n| Ok((table.big_omega(n)? == m).then_some(n)))
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}
