//! Lower-bound constructions: the Fourier-matrix tensor, its exponent
//! sweep, and random-sign (Kahane-Salem-Zygmund) polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{supnorm_form, supnorm_poly, AscentOptions, PolySupOptions, PolynomialCoefficients, SupNormEstimate};
use crate::lorentz::{fundamental_function, LorentzParams};
use crate::mixed::CoefficientTensor;
use crate::multiindex::binomial;
use crate::rng::{child_seed, stream_rng};

/// `a_rs = exp(2 pi i r s / N)` for r, s in 1..=N (row r - 1, column s - 1).
pub fn fourier_matrix(n: usize) -> Vec<Vec<Complex64>> {
    (1..=n)
        .map(|r| (1..=n).map(|s| Complex64::from_polar(1.0, 2.0 * PI * ((r * s) % n) as f64 / n as f64)).collect())
        .collect()
}

/// `max_{r,s} |sum_k a_rk conj(a_sk) - N delta_rs|`.
pub fn orthogonality_residual(a: &[Vec<Complex64>]) -> f64 {
    let n = a.len();
    let mut worst = 0.0f64;
    for r in 0..n {
        for s in 0..n {
            let dot: Complex64 = (0..n).map(|k| a[r][k] * a[s][k].conj()).sum();
            let target = if r == s { n as f64 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct FourierTensor {
    pub base: usize,
    pub m: usize,
    /// `a_{i_1..i_m} = a_{i_1 i_2} ... a_{i_{m-1} i_m}`.
    pub tensor: CoefficientTensor,
    pub orthogonality_residual: f64,
}

impl FourierTensor {
    /// `N^{(m+1)/2}`, an upper bound for the sup norm of the form.
    pub fn sup_bound(&self) -> f64 {
        (self.base as f64).powf((self.m as f64 + 1.0) / 2.0)
    }

    /// Ascent lower estimate bracketed by the analytic upper bound.
    pub fn certified_sup(&self, opts: &AscentOptions, seed: u64) -> Result<SupNormEstimate> {
        Ok(supnorm_form(&self.tensor, opts, seed)?.with_upper(self.sup_bound()))
    }
}

pub fn fourier_tensor(n: usize, m: usize) -> Result<FourierTensor> {
    if n < 2 {
        return Err(Error::BadParams(format!("the Fourier construction needs N >= 2, got {n}")));
    }
    if m < 2 {
        return Err(Error::BadArity(format!("the Fourier construction needs m >= 2, got {m}")));
    }
    let base = fourier_matrix(n);
    // the phase of the product is sum_k i_k i_{k+1} mod N
    let tensor = CoefficientTensor::from_fn(m, n, |e| {
        let phase = e.windows(2).map(|w| w[0] * w[1]).sum::<usize>() % n;
        Complex64::from_polar(1.0, 2.0 * PI * phase as f64 / n as f64)
    })?;
    Ok(FourierTensor { base: n, m, tensor, orthogonality_residual: orthogonality_residual(&base) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalityRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub phi: f64,
    pub sup_bound: f64,
    pub ascent_estimate: f64,
    pub ratio: f64,
}

/// For each N: the X-norm of the Fourier tensor (its entries are
/// unimodular, so this is `phi_X(N^m)`), the bound `N^{(m+1)/2}`, their
/// ratio, and an ascent estimate of the sup norm, which must stay below the
/// bound.
pub fn optimality_experiment(
    ns: &[usize],
    m: usize,
    x: &LorentzParams,
    opts: &AscentOptions,
    seed: u64,
) -> Result<Vec<OptimalityRow>> {
    ns.iter()
        .map(|&n| {
            let ft = fourier_tensor(n, m)?;
            let atoms = n.checked_pow(m as u32).ok_or(Error::Overflow("N^m"))?;
            let phi = fundamental_function(x, atoms)?;
            let sup_bound = ft.sup_bound();
            let ascent = supnorm_form(&ft.tensor, opts, child_seed(seed, n as u64))?.lower;
            if ascent > sup_bound * (1.0 + 1e-6) {
                return Err(Error::BoundViolated(format!(
                    "ascent estimate {ascent} exceeds N^((m+1)/2) = {sup_bound} at N = {n}, m = {m}"
                )));
            }
            Ok(OptimalityRow { n, phi, sup_bound, ascent_estimate: ascent, ratio: phi / sup_bound })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::BadParams("need at least two paired points".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// `C (N binom(m+N-1, m) ln m)^{1/2}`.
pub fn ksz_bound(n: usize, m: usize, constant: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::BadArity(format!("the random-sign bound needs m >= 2, got {m}")));
    }
    let count = binomial((m + n - 1) as u64, m as u64) as f64;
    Ok(constant * (n as f64 * count * (m as f64).ln()).sqrt())
}

#[derive(Clone, Debug)]
pub struct KszResult {
    /// Signs of the best trial, in the order of J(m,N).
    pub signs: Vec<i8>,
    pub best_trial: usize,
    pub estimate: SupNormEstimate,
    /// The value compared against the bound: the certified upper end when
    /// available, else the ascent lower end.
    pub best_value: f64,
    pub bound: f64,
    /// `best_value / (N binom(m+N-1,m) ln m)^{1/2}`.
    pub fitted_constant: f64,
    pub per_trial: Vec<f64>,
}

pub fn sign_polynomial(m: usize, n: usize, signs: &[i8]) -> Result<PolynomialCoefficients> {
    let values = signs.iter().map(|&s| Complex64::new(s as f64, 0.0)).collect();
    PolynomialCoefficients::from_values(m, n, values)
}

/// Draws `trials` random sign vectors, estimates each polynomial's sup norm
/// and keeps the smallest (ties to the earliest trial).
pub fn ksz_random_poly(
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    opts: &PolySupOptions,
    constant: f64,
) -> Result<KszResult> {
    let bound = ksz_bound(n, m, constant)?;
    if trials == 0 {
        return Err(Error::BadParams("need at least one trial".into()));
    }
    let count = PolynomialCoefficients::zeros(m, n)?.values().len();
    let runs: Vec<(Vec<i8>, SupNormEstimate, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let signs: Vec<i8> = (0..count).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
            let p = sign_polynomial(m, n, &signs)?;
            let est = supnorm_poly(&p, opts, child_seed(seed, t as u64))?;
            let value = est.upper.unwrap_or(est.lower);
            Ok((signs, est, value))
        })
        .collect::<Result<_>>()?;
    let per_trial: Vec<f64> = runs.iter().map(|r| r.2).collect();
    let best_trial = (0..trials).fold(0, |b, t| if per_trial[t] < per_trial[b] { t } else { b });
    let (signs, estimate, best_value) = runs.into_iter().nth(best_trial).expect("trial exists");
    let fitted_constant = best_value / ksz_bound(n, m, 1.0)?;
    Ok(KszResult { signs, best_trial, estimate, best_value, bound, fitted_constant, per_trial })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::eval_form;
    use crate::multiindex::MultiIndex;

    #[test]
    fn base_matrix_for_two() {
        let a = fourier_matrix(2);
        let expect = [[-1.0, 1.0], [1.0, 1.0]];
        for r in 0..2 {
            for s in 0..2 {
                assert!((a[r][s] - Complex64::new(expect[r][s], 0.0)).norm() < 1e-15);
            }
        }
        assert!(orthogonality_residual(&a) < 1e-15);
    }

    #[test]
    fn tensor_entries_are_products_of_the_base() {
        for (n, m) in [(2, 2), (3, 3), (4, 2), (5, 3)] {
            let ft = fourier_tensor(n, m).unwrap();
            let base = fourier_matrix(n);
            let spec = ft.tensor.spec();
            for i in spec.enumerate().unwrap() {
                let e = i.entries();
                let prod: Complex64 = e.windows(2).map(|w| base[w[0] - 1][w[1] - 1]).product();
                let v = ft.tensor.get(e);
                assert!((v - prod).norm() < 1e-12);
                assert!((v.norm() - 1.0).abs() < 1e-15);
            }
        }
        assert!(fourier_tensor(1, 2).is_err());
        assert!(fourier_tensor(3, 1).is_err());
    }

    #[test]
    fn orthogonality_up_to_sixteen() {
        for n in 2..=16 {
            assert!(orthogonality_residual(&fourier_matrix(n)) < 1e-9);
        }
    }

    #[test]
    fn sharp_space_has_unit_ratio() {
        for m in [2usize, 3] {
            let mf = m as f64;
            let x = LorentzParams::new(2.0 * mf / (mf + 1.0), 1.0).unwrap();
            let rows = optimality_experiment(&[2, 3, 4], m, &x, &AscentOptions { starts: 8, ..Default::default() }, 1).unwrap();
            for r in rows {
                assert!((r.ratio - 1.0).abs() < 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn ascent_reaches_the_bound_for_two() {
        let ft = fourier_tensor(2, 2).unwrap();
        let est = ft.certified_sup(&AscentOptions::default(), 3).unwrap();
        assert!((est.lower - 2f64.powf(1.5)).abs() < 1e-9);
        assert!((eval_form(&ft.tensor, &est.witness).unwrap().norm() - est.lower).abs() < 1e-12);
    }

    #[test]
    fn slope_of_a_power_law() {
        let xs = [2.0, 3.0, 5.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.7)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn ksz_bound_value() {
        let b = ksz_bound(2, 2, 1.0).unwrap();
        assert!((b - (6.0 * 2f64.ln()).sqrt()).abs() < 1e-15);
        assert!((b - 2.039).abs() < 1e-3);
        assert!(ksz_bound(2, 1, 1.0).is_err());
    }

    #[test]
    fn all_plus_polynomial_peaks_at_one() {
        // z1^2 + z1 z2 + z2^2 reaches its coefficient sum 3 at (1, 1)
        let p = sign_polynomial(2, 2, &[1, 1, 1]).unwrap();
        assert_eq!(p.get(&MultiIndex::new(vec![1, 2], 2).unwrap()), Some(Complex64::new(1.0, 0.0)));
        let est = supnorm_poly(&p, &PolySupOptions::default(), 0).unwrap();
        assert!((est.lower - 3.0).abs() < 1e-9);
        assert!(est.upper.unwrap() >= 3.0 && est.upper.unwrap() < 3.0 * 1.001);
    }

    #[test]
    fn ksz_is_reproducible() {
        let opts = PolySupOptions { starts: 4, ..Default::default() };
        let a = ksz_random_poly(3, 2, 1, 11, &opts, 1.0).unwrap();
        let b = ksz_random_poly(3, 2, 1, 11, &opts, 1.0).unwrap();
        assert_eq!(a.signs, b.signs);
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        let many = ksz_random_poly(3, 2, 6, 11, &opts, 1.0).unwrap();
        assert!(many.best_value <= a.best_value);
        assert_eq!(many.per_trial[0].to_bits(), a.best_value.to_bits());
    }
}
