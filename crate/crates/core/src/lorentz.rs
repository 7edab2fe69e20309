//! Rearrangement-invariant sequence norms: Lorentz `l_{p,q}`, weak `l_{p,inf}`,
//! Marcinkiewicz `m_p`, the fundamental function, and weighted `l_1`.
//!
//! All norms work on the non-increasing rearrangement `x*` of the input
//! magnitudes, so every function accepts real or complex sequences through
//! [`Magnitude`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// How the `q < inf` Lorentz sum weights the rearrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LorentzScheme {
    /// `(sum_k x*_k^q (k^{q/p} - (k-1)^{q/p}))^{1/q}`; this is the sequence
    /// form of the integral `(q/p) int f*(t)^q t^{q/p-1} dt`.
    #[default]
    Telescoping,
    /// `(sum_k k^{q/p-1} x*_k^q)^{1/q}`.
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzParams {
    pub p: f64,
    /// `f64::INFINITY` selects the weak space.
    pub q: f64,
    pub scheme: LorentzScheme,
}

impl LorentzParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        Self::with_scheme(p, q, LorentzScheme::Telescoping)
    }

    pub fn with_scheme(p: f64, q: f64, scheme: LorentzScheme) -> Result<Self> {
        let params = Self { p, q, scheme };
        params.validate()?;
        Ok(params)
    }

    /// `l_p` itself.
    pub fn minkowski(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn weak(p: f64) -> Result<Self> {
        Self::new(p, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::BadParams(format!("Lorentz p must lie in [1, inf), got {}", self.p)));
        }
        if !(self.q >= 1.0) {
            return Err(Error::BadParams(format!("Lorentz q must lie in [1, inf], got {}", self.q)));
        }
        Ok(())
    }

    /// Conjugate exponent p' = p/(p-1); infinite at p = 1.
    pub fn conjugate(&self) -> f64 {
        conjugate(self.p)
    }
}

pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Magnitudes sorted non-increasingly.
pub fn rearrange<T: Magnitude>(x: &[T]) -> Vec<f64> {
    let mut r: Vec<f64> = x.iter().map(Magnitude::magnitude).collect();
    r.sort_unstable_by(|a, b| b.total_cmp(a));
    r
}

/// `k^a - (k-1)^a` without cancellation for large k.
pub(crate) fn power_increment(k: usize, a: f64) -> f64 {
    if k == 1 {
        return 1.0;
    }
    let kf = k as f64;
    -kf.powf(a) * (a * (-1.0 / kf).ln_1p()).exp_m1()
}

pub fn lorentz_norm<T: Magnitude>(x: &[T], params: &LorentzParams) -> Result<f64> {
    params.validate()?;
    Ok(lorentz_norm_sorted(&rearrange(x), params))
}

/// Lorentz norm of an already rearranged (non-increasing, nonnegative)
/// sequence. Parameters are assumed valid.
pub fn lorentz_norm_sorted(xs: &[f64], params: &LorentzParams) -> f64 {
    let (p, q) = (params.p, params.q);
    if q.is_infinite() {
        return xs
            .iter()
            .enumerate()
            .map(|(k, &v)| ((k + 1) as f64).powf(1.0 / p) * v)
            .fold(0.0, f64::max);
    }
    let terms: Vec<f64> = xs
        .iter()
        .enumerate()
        .take_while(|(_, &v)| v > 0.0)
        .map(|(k, &v)| {
            let w = match params.scheme {
                LorentzScheme::Telescoping => power_increment(k + 1, q / p),
                LorentzScheme::Power => ((k + 1) as f64).powf(q / p - 1.0),
            };
            v.powf(q) * w
        })
        .collect();
    let s = pairwise_sum(&terms);
    if q == 1.0 {
        s
    } else {
        s.powf(1.0 / q)
    }
}

/// Plain `l_p` norm (`p = inf` gives the max).
pub fn lp_norm<T: Magnitude>(x: &[T], p: f64) -> f64 {
    if p.is_infinite() {
        return x.iter().map(Magnitude::magnitude).fold(0.0, f64::max);
    }
    let terms: Vec<f64> = x.iter().map(|v| v.magnitude().powf(p)).collect();
    let s = pairwise_sum(&terms);
    if p == 1.0 {
        s
    } else {
        s.powf(1.0 / p)
    }
}

/// Marcinkiewicz norm `sup_k k^{1/p - 1} sum_{j<=k} x*_j`, i.e. the partial
/// sums of `x*` divided by `k^{1/p'}`.
///
/// With this normalization `(1/p') |x|_{m_p} <= |x|_{p,inf} <= |x|_{m_p}`.
/// The dual of `l_{r,1}` is `m_{r'}`: partial sums over `k^{1/r}`.
pub fn marcinkiewicz_norm<T: Magnitude>(x: &[T], p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::BadParams(format!("Marcinkiewicz norm needs p > 1, got {p}")));
    }
    Ok(partial_sum_sup(&rearrange(x), 1.0 - 1.0 / p))
}

/// `sup_k (sum_{j<=k} xs_j) / k^{expo}` over a rearranged sequence.
pub(crate) fn partial_sum_sup(xs: &[f64], expo: f64) -> f64 {
    let mut acc = 0.0;
    let mut best = 0.0f64;
    for (k, &v) in xs.iter().enumerate() {
        acc += v;
        best = best.max(acc / ((k + 1) as f64).powf(expo));
    }
    best
}

/// `phi(N)`: the norm of an indicator of N atoms.
pub fn fundamental_function(params: &LorentzParams, atoms: usize) -> Result<f64> {
    params.validate()?;
    Ok(lorentz_norm_sorted(&vec![1.0; atoms], params))
}

/// Positive weight sequence indexed from 1.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    /// `values[n-1]` is the weight at n.
    Explicit(Vec<f64>),
    /// `(log n)^{(m-1)/2} / n^{(m-1)/(2m)}`, defined for n >= 2.
    LogPower { m: usize },
}

impl Weight {
    pub fn value(&self, n: u64) -> Result<f64> {
        match self {
            Weight::Explicit(values) => values
                .get((n as usize).wrapping_sub(1))
                .copied()
                .filter(|w| *w > 0.0)
                .ok_or(Error::WeightDomain(n)),
            Weight::LogPower { m } => log_power_weight(n, *m).map_err(|_| Error::WeightDomain(n)),
        }
    }
}

pub(crate) fn log_power_weight(n: u64, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("log-power weight needs n >= 2, got {n}")));
    }
    if m == 0 {
        return Err(Error::BadParams("homogeneity m must be positive".into()));
    }
    let mm = m as f64;
    let nf = n as f64;
    Ok(nf.ln().powf((mm - 1.0) / 2.0) / nf.powf((mm - 1.0) / (2.0 * mm)))
}

/// `sum_n |x_n| w_n` with `x[0]` at position n = 1. Zero entries never
/// consult the weight.
pub fn weighted_l1_norm<T: Magnitude>(x: &[T], w: &Weight) -> Result<f64> {
    let mut terms = Vec::with_capacity(x.len());
    for (k, v) in x.iter().enumerate() {
        let mag = v.magnitude();
        if mag != 0.0 {
            terms.push(mag * w.value(k as u64 + 1)?);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `sum_{k<=N} k^{-alpha}` summed from the small terms up.
pub fn power_sum(alpha: f64, n: usize) -> f64 {
    (1..=n).rev().map(|k| (k as f64).powf(-alpha)).sum()
}

/// The integral comparison bound `N^{1-alpha} / (1-alpha)` for alpha in (0,1).
pub fn power_sum_bound(alpha: f64, n: usize) -> f64 {
    (n as f64).powf(1.0 - alpha) / (1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn rearrangement_examples() {
        let r = rearrange(&[c(1.0, 1.0), c(-2.0, 0.0), c(0.5, 0.0)]);
        assert!(close(r[0], 2.0, 1e-15) && close(r[1], 2f64.sqrt(), 1e-15) && close(r[2], 0.5, 1e-15));
        assert_eq!(rearrange(&[0.0, 0.0, 0.0]), vec![0.0; 3]);
        assert_eq!(rearrange(&[3.0, 1.0, 2.0]), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn lorentz_examples() {
        let ind = [1.0; 4];
        let p = LorentzParams::new(4.0 / 3.0, 1.0).unwrap();
        assert!(close(lorentz_norm(&ind, &p).unwrap(), 4f64.powf(0.75), 1e-14));

        let x = [1.0, 2f64.powf(-0.75), 3f64.powf(-0.75)];
        let weak = LorentzParams::weak(4.0 / 3.0).unwrap();
        assert!(close(lorentz_norm(&x, &weak).unwrap(), 1.0, 1e-14));

        assert!(LorentzParams::new(0.5, 1.0).is_err());
        assert!(LorentzParams::new(2.0, 0.5).is_err());
    }

    #[test]
    fn p_equals_q_is_minkowski() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..50 {
            let x: Vec<Complex64> = (0..17).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            for p in [1.0, 1.5, 2.0, 3.7] {
                let params = LorentzParams::minkowski(p).unwrap();
                assert!(close(lorentz_norm(&x, &params).unwrap(), lp_norm(&x, p), 1e-12));
            }
        }
    }

    #[test]
    fn marcinkiewicz_examples() {
        // brute force over k of sum_{j<=k} 1 / k^{1/p'} for an indicator
        for p in [1.25, 4.0 / 3.0, 2.0, 3.0] {
            for n in [1usize, 2, 5, 40] {
                let brute = (1..=n)
                    .map(|k| k as f64 / (k as f64).powf(1.0 - 1.0 / p))
                    .fold(0.0, f64::max);
                let got = marcinkiewicz_norm(&vec![1.0; n], p).unwrap();
                assert!(close(got, brute, 1e-14));
                assert!(close(got, (n as f64).powf(1.0 / p), 1e-12));
            }
        }
        assert!(close(marcinkiewicz_norm(&[2.5], 1.7).unwrap(), 2.5, 1e-15));
        assert!(marcinkiewicz_norm(&[1.0], 1.0).is_err());
    }

    #[test]
    fn partial_sums_over_k_to_the_one_over_p_is_the_dual_index() {
        // sup_k sum_{j<=k} x*_j / k^{1/p} equals the m_{p'} norm
        let x = [1.0; 9];
        let p: f64 = 4.0 / 3.0;
        let printed = partial_sum_sup(&rearrange(&x), 1.0 / p);
        assert!(close(printed, 9f64.powf(1.0 - 1.0 / p), 1e-13));
        assert!(close(printed, marcinkiewicz_norm(&x, conjugate(p)).unwrap(), 1e-13));
    }

    #[test]
    fn fundamental_function_examples() {
        let p = LorentzParams::new(4.0 / 3.0, 1.0).unwrap();
        assert!(close(fundamental_function(&p, 16).unwrap(), 8.0, 1e-13));
        let p = LorentzParams::new(2.7, 1.0).unwrap();
        assert_eq!(fundamental_function(&p, 1).unwrap(), 1.0);
        let mut prev = f64::INFINITY;
        for n in 1..200 {
            let r = fundamental_function(&p, n).unwrap() / n as f64;
            assert!(r <= prev * (1.0 + 1e-12));
            prev = r;
        }
    }

    #[test]
    fn weighted_l1_examples() {
        let w = Weight::LogPower { m: 2 };
        let e2 = [0.0, 1.0];
        let expected = 2f64.ln().sqrt() / 2f64.powf(0.25);
        assert!(close(weighted_l1_norm(&e2, &w).unwrap(), expected, 1e-15));
        assert_eq!(weighted_l1_norm(&[0.0; 5], &w).unwrap(), 0.0);
        let scaled = [0.0, 0.0, 0.0, 1.0 / w.value(4).unwrap()];
        assert!(close(weighted_l1_norm(&scaled, &w).unwrap(), 1.0, 1e-15));
        assert!(matches!(weighted_l1_norm(&[1.0], &w), Err(Error::WeightDomain(1))));
        assert!(matches!(weighted_l1_norm(&[1.0, 1.0], &Weight::Explicit(vec![1.0])), Err(Error::WeightDomain(2))));
    }

    #[test]
    fn power_sum_is_below_integral_bound() {
        for alpha in [0.25, 0.5, 0.75] {
            let mut acc = 0.0;
            for n in 1..=20_000usize {
                acc += (n as f64).powf(-alpha);
                assert!(acc < power_sum_bound(alpha, n));
            }
        }
    }

    #[test]
    fn power_increment_matches_direct_difference() {
        for k in 1..50usize {
            for a in [0.3, 0.75, 1.0, 1.5] {
                let direct = (k as f64).powf(a) - ((k - 1) as f64).powf(a);
                assert!(close(power_increment(k, a), direct, 1e-12));
            }
        }
    }

    fn rand_vec(seed: u64, len: usize) -> Vec<Complex64> {
        let mut rng = stream_rng(seed, 0);
        (0..len).map(|_| c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)).collect()
    }

    proptest! {
        #[test]
        fn rearrangement_invariant_and_homogeneous(seed in any::<u64>(), len in 1usize..30, lambda in -5.0f64..5.0, phase in 0.0f64..6.3) {
            let x = rand_vec(seed, len);
            let mut y = x.clone();
            y.reverse();
            y.rotate_left(len / 3);
            let scale = Complex64::from_polar(lambda, phase);
            let z: Vec<Complex64> = x.iter().map(|v| v * scale).collect();
            for params in [LorentzParams::new(1.5, 1.0).unwrap(), LorentzParams::new(2.0, 3.0).unwrap(), LorentzParams::weak(1.2).unwrap(),
                           LorentzParams::with_scheme(1.5, 1.0, LorentzScheme::Power).unwrap()] {
                let base = lorentz_norm(&x, &params).unwrap();
                prop_assert!(close(lorentz_norm(&y, &params).unwrap(), base, 1e-12));
                prop_assert!(close(lorentz_norm(&z, &params).unwrap(), lambda.abs() * base, 1e-12));
            }
        }

        #[test]
        fn triangle_inequality_when_q_le_p(s1 in any::<u64>(), s2 in any::<u64>(), len in 1usize..25) {
            let x = rand_vec(s1, len);
            let y = rand_vec(s2, len);
            let sum: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            for (p, q) in [(1.5, 1.0), (4.0 / 3.0, 4.0 / 3.0), (3.0, 2.0)] {
                let params = LorentzParams::new(p, q).unwrap();
                let lhs = lorentz_norm(&sum, &params).unwrap();
                let rhs = lorentz_norm(&x, &params).unwrap() + lorentz_norm(&y, &params).unwrap();
                prop_assert!(lhs <= rhs * (1.0 + 1e-12));
            }
        }

        #[test]
        fn marcinkiewicz_sandwich(seed in any::<u64>(), len in 1usize..40, p in 1.05f64..6.0) {
            let x = rand_vec(seed, len);
            let mp = marcinkiewicz_norm(&x, p).unwrap();
            let weak = lorentz_norm(&x, &LorentzParams::weak(p).unwrap()).unwrap();
            prop_assert!(mp / conjugate(p) <= weak * (1.0 + 1e-12));
            prop_assert!(weak <= mp * (1.0 + 1e-12));
        }
    }
}
