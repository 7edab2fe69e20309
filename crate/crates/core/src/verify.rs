//! Statement-level checks of the coefficient inequalities: each verifier
//! computes both sides for one instance and returns an [`InequalityReport`].
//!
//! Checks split into two kinds. Exact ones compare two computable norms.
//! Sup-norm ones compare against `C * |A|_inf`, which is only known up to a
//! bracket `[lower, upper]`; the report then holds when the lower end already
//! suffices, is violated when even the certified upper end fails, and is
//! inconclusive in between or when no upper end is available.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forms::{polarization_factor, PolynomialCoefficients, SupNormEstimate};
use crate::lorentz::{conjugate, lorentz_norm, lp_norm, LorentzParams};
use crate::mixed::{block_norm, CoefficientTensor};
use crate::multiindex::{binomial, class_cardinality, coordinate_extent, full_offset, CoordinateSubset, IndexSetSpec, MultiIndex};
use crate::rng::stream_rng;

/// Relative slack for checks between computed norms.
pub const REL_TOL: f64 = 1e-12;
/// Relative slack for checks involving an optimized sup norm.
pub const SUP_REL_TOL: f64 = 1e-9;

/// Statement identifiers with a one-line description each.
pub const LEMMAS: &[(&str, &str)] = &[
    ("slice-sum", "sum over S of |a_i| <= m E(S) |a|_{m/(m-1),inf}"),
    ("partition", "greedy split of M(m,n) into m sets with |a^{S_k}|_{l_inf(k)[l_q]} <= m^{1/q} |a|_{qm/(m-1),inf}"),
    ("dual-partition", "|a|_{qm/((q-1)m+1),1} <= m^{1/q} sum_k |a|_{l_1(k)[l_q']}"),
    ("mixed-bh", "|a|_{l_1(k)[l_2]} <= sqrt2^{m-1} |A|_inf"),
    ("blei-fournier", "|a|_{2m/(m+1),1} <= sqrt(m) sqrt2^{m-1} |A|_inf"),
    ("diagonal", "D a = (card[j]^{(m+1)/(2m)} a_j): l_1 norm does not grow, l_2 norm grows by at most sqrt(m)"),
    ("lorentz-blocks", "|a|_{2m/(m+1),2k/(k+1)} <= 2 binom(m,k)^{3/2} sum_{|S|=k} |a|_{l_{2k/(k+1)}(S)[l_2]}"),
    ("polarization", "|A|_inf <= m^m/m! |P|_inf for the symmetric form of P"),
    ("poly-bh", "|c|_{2m/(m+1),1} <= C_chain(m) |P|_inf"),
    ("dirichlet-bh", "the same bound for the lifted Dirichlet coefficients"),
    ("khinchine", "|alpha|_2 <= sqrt2 E|sum alpha_k z_k| for Steinhaus z"),
    ("marcinkiewicz", "(1/p') |x|_{m_p} <= |x|_{p,inf} <= |x|_{m_p}"),
    ("power-sum", "sum_{k<=N} k^{-alpha} < N^{1-alpha}/(1-alpha)"),
    ("indicator", "|chi_N|_{p,1} = N^{1/p}"),
    ("ratio-floor", "|a|_{2m/(m+1),1} <= |a|_1"),
    ("envelope", "C^{-1} lower (l_1,l_2)_{theta,q} factor |x|_{p,q} <= |x|_{theta,q} <= C upper factor |x|_{p,q}"),
    ("block-average", "block averaging contracts l_1, l_inf and the K-functional"),
    ("synthetic", "the false comparison |x|_1 <= |x|_2, for exercising failure paths"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lemma_id: String,
    pub lhs: f64,
    /// Right side evaluated with the certified lower end of any sup norm.
    pub rhs: f64,
    /// Right side evaluated with the certified upper end, when one exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs_upper: Option<f64>,
    pub constant_used: f64,
    pub margin: f64,
    pub instance: Value,
    pub instance_hash: String,
    pub verdict: Verdict,
}

impl InequalityReport {
    /// `lhs <= rhs` between computed quantities.
    pub fn exact(lemma_id: &str, lhs: f64, rhs: f64, constant_used: f64, instance: Value, hash: String) -> Self {
        Self::bracketed(lemma_id, lhs, rhs, Some(rhs), constant_used, instance, hash, REL_TOL)
    }

    /// `lhs <= constant * sup` with the sup norm known only as an estimate.
    pub fn against_sup(
        lemma_id: &str,
        lhs: f64,
        constant: f64,
        sup: &SupNormEstimate,
        instance: Value,
        hash: String,
    ) -> Self {
        let upper = sup.upper.map(|u| constant * u);
        Self::bracketed(lemma_id, lhs, constant * sup.lower, upper, constant, instance, hash, SUP_REL_TOL)
    }

    #[allow(clippy::too_many_arguments)]
    fn bracketed(
        lemma_id: &str,
        lhs: f64,
        rhs: f64,
        rhs_upper: Option<f64>,
        constant_used: f64,
        instance: Value,
        instance_hash: String,
        rel_tol: f64,
    ) -> Self {
        let mut r = Self {
            lemma_id: lemma_id.to_string(),
            lhs,
            rhs,
            rhs_upper,
            constant_used,
            margin: rhs - lhs,
            instance,
            instance_hash,
            verdict: Verdict::Inconclusive,
        };
        r.judge(rel_tol);
        r
    }

    /// Recomputes the verdict under a different relative tolerance.
    pub fn judge(&mut self, rel_tol: f64) {
        let within = |bound: f64| self.lhs <= bound * (1.0 + rel_tol) || self.lhs <= bound + f64::MIN_POSITIVE;
        self.verdict = if within(self.rhs) {
            Verdict::Holds
        } else if self.rhs_upper.is_some_and(|u| !within(u)) {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        };
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Smallest constant that would make every report hold: the max of
/// `lhs / (rhs / constant_used)`.
pub fn fit_constant(reports: &[InequalityReport]) -> Option<f64> {
    reports
        .iter()
        .filter(|r| r.rhs > 0.0 && r.constant_used > 0.0)
        .map(|r| r.lhs * r.constant_used / r.rhs)
        .reduce(f64::max)
}

fn hash_bytes(chunks: impl IntoIterator<Item = u64>) -> String {
    let mut h = Sha256::new();
    for c in chunks {
        h.update(c.to_le_bytes());
    }
    hex::encode(&h.finalize()[..16])
}

pub fn hash_tensor(a: &CoefficientTensor) -> String {
    let head = [a.m() as u64, a.n() as u64];
    hash_bytes(head.into_iter().chain(a.values().iter().flat_map(|v| [v.re.to_bits(), v.im.to_bits()])))
}

pub fn hash_poly(c: &PolynomialCoefficients) -> String {
    let head = [c.m() as u64, c.n() as u64, u64::MAX];
    hash_bytes(head.into_iter().chain(c.values().iter().flat_map(|v| [v.re.to_bits(), v.im.to_bits()])))
}

pub fn hash_reals(x: &[f64]) -> String {
    hash_bytes(std::iter::once(x.len() as u64).chain(x.iter().map(|v| v.to_bits())))
}

/// Universal constants used by the checks. Values not known in closed form
/// default to 1 and can be overridden or fitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BHConstantTable {
    /// Khinchine constant A_p for p in [1, 2].
    pub khinchine: f64,
    /// Steinhaus constant for degree-one polynomials.
    pub steinhaus: f64,
    /// Upper bounds for the multilinear constants on l_{2k/(k+1)}, by k.
    pub bh_mult: BTreeMap<usize, f64>,
    pub ksz: f64,
    pub kappa: f64,
    /// The constant L of the diagonal step in the chain.
    pub l: f64,
    /// The constant C_2 of the l_2-block step in the chain.
    pub c2: f64,
    /// Euler-Mascheroni; kept here for exponent bookkeeping, not a constant
    /// of any inequality.
    pub euler_gamma: f64,
}

impl Default for BHConstantTable {
    fn default() -> Self {
        Self {
            khinchine: SQRT_2,
            steinhaus: SQRT_2,
            bh_mult: BTreeMap::from([(1, 1.0)]),
            ksz: 1.0,
            kappa: 1.0,
            l: 1.0,
            c2: 1.0,
            euler_gamma: 0.577_215_664_901_532_9,
        }
    }
}

impl BHConstantTable {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("khinchine", self.khinchine),
            ("steinhaus", self.steinhaus),
            ("ksz", self.ksz),
            ("kappa", self.kappa),
            ("L", self.l),
            ("C2", self.c2),
        ];
        for (name, v) in named.into_iter().chain(self.bh_mult.values().map(|&v| ("bh_mult", v))) {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::BadParams(format!("constant {name} must be a finite value >= 1, got {v}")));
            }
        }
        Ok(())
    }

    /// Sets one constant by name (`khinchine`, `steinhaus`, `ksz`, `kappa`,
    /// `L`, `C2`, or `bh_mult.K`).
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value >= 1.0 && value.is_finite()) {
            return Err(Error::BadParams(format!("constant {key} must be a finite value >= 1, got {value}")));
        }
        match key {
            "khinchine" => self.khinchine = value,
            "steinhaus" => self.steinhaus = value,
            "ksz" => self.ksz = value,
            "kappa" => self.kappa = value,
            "L" | "l" => self.l = value,
            "C2" | "c2" => self.c2 = value,
            _ => {
                let k = key
                    .strip_prefix("bh_mult.")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| Error::BadParams(format!("unknown constant {key:?}")))?;
                self.bh_mult.insert(k, value);
            }
        }
        Ok(())
    }

    /// The product of the step constants in the polynomial chain:
    /// `L m C_2 m m^{(m-1)/(2m)} sqrt2^{m-1} (m-1)! m^m / ((m-1)^{m-1} m!)`.
    pub fn chain_constant(&self, m: usize) -> f64 {
        let mf = m as f64;
        // (m-1)! m^m / ((m-1)^{m-1} m!) = m^{m-1} / (m-1)^{m-1}
        let polar = if m == 1 { 1.0 } else { (mf / (mf - 1.0)).powi(m as i32 - 1) };
        self.l * mf * self.c2 * mf * mf.powf((mf - 1.0) / (2.0 * mf)) * SQRT_2.powi(m as i32 - 1) * polar
    }
}

fn sqrt2_pow(k: usize) -> f64 {
    SQRT_2.powi(k as i32)
}

fn weak_norm(a: &CoefficientTensor, p: f64) -> Result<f64> {
    if p.is_infinite() {
        Ok(lp_norm(a.values(), f64::INFINITY))
    } else {
        lorentz_norm(a.values(), &LorentzParams::weak(p)?)
    }
}

fn check_members(a: &CoefficientTensor, set: &[MultiIndex]) -> Result<()> {
    for i in set {
        if i.arity() != a.m() || i.entries().iter().any(|&v| v == 0 || v > a.n()) {
            return Err(Error::BadParams(format!("{:?} is not in M({}, {})", i.entries(), a.m(), a.n())));
        }
    }
    Ok(())
}

/// `sum_{i in S} |a_i| <= m E(S) |a|_{m/(m-1),inf}`.
pub fn verify_slice_sum(a: &CoefficientTensor, set: &[MultiIndex]) -> Result<InequalityReport> {
    if set.is_empty() {
        return Err(Error::EmptyInput("index set"));
    }
    check_members(a, set)?;
    let mut s = set.to_vec();
    s.sort();
    s.dedup();
    let lhs: f64 = s.iter().map(|i| a.get(i.entries()).norm()).sum();
    let e = coordinate_extent(&s)?;
    let m = a.m() as f64;
    let weak = weak_norm(a, conjugate(m))?;
    let constant = m * e as f64;
    Ok(InequalityReport::exact(
        "slice-sum",
        lhs,
        constant * weak,
        constant,
        json!({"m": a.m(), "n": a.n(), "set_size": s.len(), "extent": e}),
        hash_tensor(a),
    ))
}

/// The greedy split of M(m,n) into m disjoint sets. Each of n rounds picks,
/// for every coordinate k, the remaining value of minimal slice mass
/// (smallest value on ties) over the indices still in play, and hands those
/// indices to set k (smallest k on overlaps). For q > 1 the masses are taken
/// of `|a|^q`.
pub fn greedy_partition(a: &CoefficientTensor, q: f64) -> Result<Vec<Vec<MultiIndex>>> {
    let (m, n) = (a.m(), a.n());
    if m < 2 {
        return Err(Error::BadArity(format!("the partition needs m >= 2, got {m}")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::BadParams(format!("q must lie in [1, inf), got {q}")));
    }
    let mass: Vec<f64> = a.values().iter().map(|v| v.norm().powf(q)).collect();
    let indices = a.spec().enumerate()?;
    let mut owner: Vec<Option<usize>> = vec![None; indices.len()];
    // alive[k][v-1]: value v still available in coordinate k
    let mut alive = vec![vec![true; n]; m];
    for _ in 0..n {
        let mut slices = vec![vec![0.0; n]; m];
        for (off, i) in indices.iter().enumerate() {
            if owner[off].is_none() {
                for (k, &v) in i.entries().iter().enumerate() {
                    slices[k][v - 1] += mass[off];
                }
            }
        }
        let chosen: Vec<usize> = (0..m)
            .map(|k| {
                (0..n)
                    .filter(|&v| alive[k][v])
                    .fold(None, |best: Option<usize>, v| match best {
                        Some(b) if slices[k][b] <= slices[k][v] => Some(b),
                        _ => Some(v),
                    })
                    .expect("one value per round is removed")
            })
            .collect();
        for (off, i) in indices.iter().enumerate() {
            if owner[off].is_none() {
                owner[off] = (0..m).find(|&k| i.entries()[k] - 1 == chosen[k]);
            }
        }
        for (k, &v) in chosen.iter().enumerate() {
            alive[k][v] = false;
        }
    }
    let mut sets = vec![Vec::new(); m];
    for (off, i) in indices.into_iter().enumerate() {
        let k = owner[off].expect("every index loses a coordinate value within n rounds");
        sets[k].push(i);
    }
    Ok(sets)
}

/// True when the sets are pairwise disjoint and cover M(m,n).
pub fn is_partition(sets: &[Vec<MultiIndex>], m: usize, n: usize) -> bool {
    let len = match IndexSetSpec::full(m, n).checked_len(usize::MAX) {
        Ok(l) => l,
        Err(_) => return false,
    };
    let mut seen = vec![false; len];
    for i in sets.iter().flatten() {
        if i.arity() != m || i.entries().iter().any(|&v| v == 0 || v > n) {
            return false;
        }
        let off = full_offset(i.entries(), n);
        if std::mem::replace(&mut seen[off], true) {
            return false;
        }
    }
    seen.into_iter().all(|s| s)
}

/// Checks the slice bound for each set of a partition:
/// `|a^{S_k}|_{l_inf(k)[l_q]} <= m^{1/q} |a|_{qm/(m-1),inf}`.
pub fn verify_partition(a: &CoefficientTensor, sets: &[Vec<MultiIndex>], q: f64) -> Result<Vec<InequalityReport>> {
    let m = a.m();
    if sets.len() != m {
        return Err(Error::MalformedPartition(format!("expected {m} sets, got {}", sets.len())));
    }
    let mf = m as f64;
    let weak = weak_norm(a, q * mf / (mf - 1.0))?;
    let constant = mf.powf(1.0 / q);
    let hash = hash_tensor(a);
    sets.iter()
        .enumerate()
        .map(|(k, set)| {
            let mut keep = vec![false; a.len()];
            for i in set {
                keep[full_offset(i.entries(), a.n())] = true;
            }
            let restricted = a.restrict(|e| keep[full_offset(e, a.n())]);
            let lhs = block_norm(&restricted, &CoordinateSubset::singleton(m, k + 1)?, f64::INFINITY, q)?;
            Ok(InequalityReport::exact(
                "partition",
                lhs,
                constant * weak,
                constant,
                json!({"m": m, "n": a.n(), "q": q, "k": k + 1, "set_size": set.len()}),
                hash.clone(),
            ))
        })
        .collect()
}

/// `|a|_{qm/((q-1)m+1),1} <= m^{1/q} sum_k |a|_{l_1(k)[l_q']}`.
pub fn verify_dual_partition(a: &CoefficientTensor, q: f64) -> Result<InequalityReport> {
    if !(q > 1.0) {
        return Err(Error::BadParams(format!("q must exceed 1, got {q}")));
    }
    let m = a.m() as f64;
    let r = q * m / ((q - 1.0) * m + 1.0);
    let lhs = lorentz_norm(a.values(), &LorentzParams::new(r, 1.0)?)?;
    let qc = conjugate(q);
    let mut blocks = 0.0;
    for k in 1..=a.m() {
        blocks += block_norm(a, &CoordinateSubset::singleton(a.m(), k)?, 1.0, qc)?;
    }
    let constant = m.powf(1.0 / q);
    Ok(InequalityReport::exact(
        "dual-partition",
        lhs,
        constant * blocks,
        constant,
        json!({"m": a.m(), "n": a.n(), "q": q}),
        hash_tensor(a),
    ))
}

/// `|a|_{l_1(k)[l_2]} <= sqrt2^{m-1} |A|_inf`.
pub fn verify_mixed_bh(a: &CoefficientTensor, sup: &SupNormEstimate, k: usize) -> Result<InequalityReport> {
    let lhs = block_norm(a, &CoordinateSubset::singleton(a.m(), k)?, 1.0, 2.0)?;
    let constant = sqrt2_pow(a.m() - 1);
    Ok(InequalityReport::against_sup(
        "mixed-bh",
        lhs,
        constant,
        sup,
        json!({"m": a.m(), "n": a.n(), "k": k, "sup_method": sup.method}),
        hash_tensor(a),
    ))
}

/// `|a|_{2m/(m+1),1} <= sqrt(m) sqrt2^{m-1} |A|_inf`.
pub fn verify_blei_fournier(a: &CoefficientTensor, sup: &SupNormEstimate) -> Result<InequalityReport> {
    let m = a.m() as f64;
    let lhs = lorentz_norm(a.values(), &LorentzParams::new(2.0 * m / (m + 1.0), 1.0)?)?;
    let constant = m.sqrt() * sqrt2_pow(a.m() - 1);
    Ok(InequalityReport::against_sup(
        "blei-fournier",
        lhs,
        constant,
        sup,
        json!({"m": a.m(), "n": a.n(), "sup_method": sup.method}),
        hash_tensor(a),
    ))
}

/// `D a = (card[j]^{(m+1)/(2m)} a_j)` over J(m,n) for a symmetric tensor.
pub fn diagonal_apply(a: &CoefficientTensor) -> Result<PolynomialCoefficients> {
    if let Some(i) = a.symmetry_defect(1e-12) {
        return Err(Error::SymmetryViolation { index: i.into() });
    }
    let m = a.m() as f64;
    let expo = (m + 1.0) / (2.0 * m);
    PolynomialCoefficients::from_fn(a.m(), a.n(), |j| {
        a.get(j.entries()) * (class_cardinality(j.entries()) as f64).powf(expo)
    })
}

/// The two endpoint estimates of the diagonal operator:
/// `|Da|_{l_1(J)} <= |a|_{l_1(M)}` and `|Da|_{l_2(J)} <= sqrt(m) |a|_{l_2(M)}`.
pub fn verify_diagonal(a: &CoefficientTensor) -> Result<[InequalityReport; 2]> {
    let d = diagonal_apply(a)?;
    let hash = hash_tensor(a);
    let inst = |p: u8| json!({"m": a.m(), "n": a.n(), "endpoint": p});
    let sm = (a.m() as f64).sqrt();
    Ok([
        InequalityReport::exact("diagonal", lp_norm(d.values(), 1.0), lp_norm(a.values(), 1.0), 1.0, inst(1), hash.clone()),
        InequalityReport::exact("diagonal", lp_norm(d.values(), 2.0), sm * lp_norm(a.values(), 2.0), sm, inst(2), hash),
    ])
}

/// `|a|_{2m/(m+1),2k/(k+1)} <= 2 binom(m,k)^{3/2} sum_{|S|=k} |a|_{l_{2k/(k+1)}(S)[l_2]}`.
pub fn verify_lorentz_blocks(a: &CoefficientTensor, k: usize) -> Result<InequalityReport> {
    let m = a.m();
    if k == 0 || k > m {
        return Err(Error::BadParams(format!("k must lie in 1..={m}, got {k}")));
    }
    let (mf, kf) = (m as f64, k as f64);
    let inner = 2.0 * kf / (kf + 1.0);
    let lhs = lorentz_norm(a.values(), &LorentzParams::new(2.0 * mf / (mf + 1.0), inner)?)?;
    let mut blocks = 0.0;
    for s in CoordinateSubset::all_of_size(m, k) {
        blocks += block_norm(a, &s, inner, 2.0)?;
    }
    let constant = 2.0 * (binomial(m as u64, k as u64) as f64).powf(1.5);
    Ok(InequalityReport::exact(
        "lorentz-blocks",
        lhs,
        constant * blocks,
        constant,
        json!({"m": m, "n": a.n(), "k": k}),
        hash_tensor(a),
    ))
}

/// `|A|_inf <= m^m/m! |P|_inf`, with `A` the symmetric form of `P`. Both
/// sides are estimates: a lower bound for `|A|_inf` against a certified upper
/// bound for `|P|_inf`, so a failure is a genuine contradiction.
pub fn verify_polarization(
    c: &PolynomialCoefficients,
    form_sup: &SupNormEstimate,
    poly_sup: &SupNormEstimate,
) -> Result<InequalityReport> {
    let upper = poly_sup
        .upper
        .ok_or_else(|| Error::BadParams("polarization check needs a certified polynomial sup norm".into()))?;
    let constant = polarization_factor(c.m());
    Ok(InequalityReport::exact(
        "polarization",
        form_sup.lower,
        constant * upper,
        constant,
        json!({"m": c.m(), "n": c.n(), "poly_lower": poly_sup.lower, "poly_upper": upper}),
        hash_poly(c),
    ))
}

/// `|c|_{2m/(m+1),1} <= C_chain(m) |P|_inf`.
pub fn verify_poly_bh(
    c: &PolynomialCoefficients,
    sup: &SupNormEstimate,
    constants: &BHConstantTable,
) -> Result<InequalityReport> {
    let m = c.m() as f64;
    let lhs = lorentz_norm(c.values(), &LorentzParams::new(2.0 * m / (m + 1.0), 1.0)?)?;
    Ok(InequalityReport::against_sup(
        "poly-bh",
        lhs,
        constants.chain_constant(c.m()),
        sup,
        json!({"m": c.m(), "n": c.n(), "sup_method": sup.method}),
        hash_poly(c),
    ))
}

/// `|a|_{2m/(m+1),1} <= |a|_1`.
pub fn verify_ratio_floor(a: &CoefficientTensor) -> Result<InequalityReport> {
    let m = a.m() as f64;
    let lhs = lorentz_norm(a.values(), &LorentzParams::new(2.0 * m / (m + 1.0), 1.0)?)?;
    Ok(InequalityReport::exact(
        "ratio-floor",
        lhs,
        lp_norm(a.values(), 1.0),
        1.0,
        json!({"m": a.m(), "n": a.n()}),
        hash_tensor(a),
    ))
}

/// Both sides of the Marcinkiewicz sandwich as two reports.
pub fn verify_marcinkiewicz(x: &[f64], p: f64) -> Result<[InequalityReport; 2]> {
    let mp = crate::lorentz::marcinkiewicz_norm(x, p)?;
    let weak = lorentz_norm(x, &LorentzParams::weak(p)?)?;
    let pc = conjugate(p);
    let hash = hash_reals(x);
    let inst = |side: &str| json!({"len": x.len(), "p": p, "side": side});
    Ok([
        InequalityReport::exact("marcinkiewicz", mp / pc, weak, 1.0 / pc, inst("lower"), hash.clone()),
        InequalityReport::exact("marcinkiewicz", weak, mp, 1.0, inst("upper"), hash),
    ])
}

/// `sum_{k<=N} k^{-alpha} < N^{1-alpha}/(1-alpha)`; strictness is checked on
/// top of the report (`margin > 0`).
pub fn verify_power_sum(alpha: f64, n: usize) -> Result<InequalityReport> {
    if !(alpha > 0.0 && alpha < 1.0) || n == 0 {
        return Err(Error::BadParams(format!("need alpha in (0,1) and N >= 1, got {alpha}, {n}")));
    }
    let lhs = crate::lorentz::power_sum(alpha, n);
    let rhs = crate::lorentz::power_sum_bound(alpha, n);
    let mut r = InequalityReport::exact(
        "power-sum",
        lhs,
        rhs,
        1.0 / (1.0 - alpha),
        json!({"alpha": alpha, "N": n}),
        hash_reals(&[alpha, n as f64]),
    );
    if r.margin <= 0.0 {
        r.verdict = Verdict::Violated;
    }
    Ok(r)
}

/// `|chi_N|_{p,1}` against `N^{1/p}`; reported as the one-sided check
/// `|difference| <= 1e-12 N^{1/p}` encoded in the margin.
pub fn verify_indicator(p: f64, n: usize) -> Result<InequalityReport> {
    let phi = crate::lorentz::fundamental_function(&LorentzParams::new(p, 1.0)?, n)?;
    let target = (n as f64).powf(1.0 / p);
    let mut r = InequalityReport::exact(
        "indicator",
        phi,
        target,
        1.0,
        json!({"p": p, "N": n}),
        hash_reals(&[p, n as f64]),
    );
    r.verdict = if (phi - target).abs() <= 1e-12 * target.max(1.0) { Verdict::Holds } else { Verdict::Violated };
    Ok(r)
}

/// The deliberately false comparison `|x|_1 <= |x|_2`.
pub fn verify_synthetic(x: &[f64]) -> InequalityReport {
    InequalityReport::exact(
        "synthetic",
        lp_norm(x, 1.0),
        lp_norm(x, 2.0),
        1.0,
        json!({"len": x.len()}),
        hash_reals(x),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KhinchineEstimate {
    /// `|alpha|_2 / mean |sum alpha_k z_k|`.
    pub ratio: f64,
    /// Delta-method standard error of the ratio.
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of the l_2 versus L_1 ratio of the degree-one form
/// `z -> sum alpha_k z_k` under uniform torus samples.
pub fn khinchine_ratio(alpha: &[Complex64], samples: usize, seed: u64) -> Result<KhinchineEstimate> {
    if alpha.is_empty() || samples < 2 {
        return Err(Error::BadParams("need a nonempty form and at least two samples".into()));
    }
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let v: Complex64 =
                    alpha.iter().map(|a| a * Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>())).sum();
                let r = v.norm();
                s1 += r;
                s2 += r * r;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let l2 = lp_norm(alpha, 2.0);
    let ratio = l2 / mean;
    let std_error = l2 / (mean * mean) * (var / nf).sqrt();
    Ok(KhinchineEstimate { ratio, std_error, samples })
}

/// Report: the estimated ratio against `A + 3 SE`.
pub fn verify_khinchine(alpha: &[Complex64], samples: usize, seed: u64, constants: &BHConstantTable) -> Result<InequalityReport> {
    let est = khinchine_ratio(alpha, samples, seed)?;
    let flat: Vec<f64> = alpha.iter().flat_map(|a| [a.re, a.im]).collect();
    Ok(InequalityReport::exact(
        "khinchine",
        est.ratio,
        constants.steinhaus + 3.0 * est.std_error,
        constants.steinhaus,
        json!({"n": alpha.len(), "samples": samples, "std_error": est.std_error}),
        hash_reals(&flat),
    ))
}

/// Exact sup norm of a rank-one form: the product of the factor l_1 norms,
/// attained at the conjugate phases.
pub fn rank_one_certified(factors: &[Vec<Complex64>]) -> Result<(CoefficientTensor, SupNormEstimate)> {
    let a = CoefficientTensor::rank_one(factors)?;
    let value = factors.iter().map(|u| lp_norm(u, 1.0)).product();
    let witness = factors
        .iter()
        .map(|u| u.iter().map(|v| if v.norm() > 0.0 { v.conj() / v.norm() } else { Complex64::new(1.0, 0.0) }).collect())
        .collect();
    Ok((a, SupNormEstimate::exact(value, witness)))
}

/// A single entry `value` at index `i`; its sup norm is `|value|`.
pub fn monomial_certified(m: usize, n: usize, i: &[usize], value: Complex64) -> Result<(CoefficientTensor, SupNormEstimate)> {
    let mut a = CoefficientTensor::zeros(m, n)?;
    MultiIndex::new(i.to_vec(), n)?;
    if i.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: i.len() });
    }
    a.set(i, value);
    let witness = vec![vec![Complex64::new(1.0, 0.0); n]; m];
    Ok((a, SupNormEstimate::exact(value.norm(), witness)))
}

/// Entries with independent real and imaginary parts uniform on [-1, 1].
pub fn random_tensor<R: Rng>(rng: &mut R, m: usize, n: usize) -> Result<CoefficientTensor> {
    CoefficientTensor::from_fn(m, n, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_symmetric_poly<R: Rng>(rng: &mut R, m: usize, n: usize) -> Result<PolynomialCoefficients> {
    PolynomialCoefficients::from_fn(m, n, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_complex_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// A nonempty random subset of M(m,n), each index kept with probability 1/2.
pub fn random_index_set<R: Rng>(rng: &mut R, m: usize, n: usize) -> Result<Vec<MultiIndex>> {
    let all = IndexSetSpec::full(m, n).enumerate()?;
    let mut set: Vec<MultiIndex> = all.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
    if set.is_empty() {
        set.push(all[rng.random_range(0..all.len())].clone());
    }
    Ok(set)
}

/// Runs `trial(t, seed)` for `t in 0..trials` in parallel and concatenates
/// the reports in trial order.
pub fn run_trials<F>(trials: usize, trial: F) -> Result<Vec<InequalityReport>>
where
    F: Fn(usize) -> Result<Vec<InequalityReport>> + Sync,
{
    let per: Vec<Vec<InequalityReport>> = (0..trials).into_par_iter().map(&trial).collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}
