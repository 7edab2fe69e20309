//! m-linear forms and m-homogeneous polynomials on C^n: evaluation,
//! symmetrization, and sup-norm estimation on the polytorus.
//!
//! Sup norms over the unit polydisc are attained on the torus (maximum
//! modulus in each variable), so every estimator works with unimodular
//! arguments. Two estimators are provided:
//!
//! * multilinear forms: alternating phase maximization. With every argument
//!   but `x^k` fixed the form is `sum_l g_l x^k_l`, maximized exactly by
//!   `x^k_l = conj(g_l)/|g_l|` with value `|g|_1`. Sweeping k is monotone.
//! * polynomials: seeded multistart gradient ascent on the angles, plus for
//!   n <= 3 a dense grid over the angles (the first angle is pinned to 0 by
//!   homogeneity) that yields a certified lower bound and, through a
//!   curvature bound on the coefficients, a certified upper bound.
//!
//! Every reported `lower` is the modulus of the form at the recorded witness.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixed::CoefficientTensor;
use crate::multiindex::{class_cardinality, full_entries, IndexSetSpec, MultiIndex, DEFAULT_ENUMERATION_LIMIT};
use crate::rng::stream_rng;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients `(c_j)` of `P(z) = sum_{j in J(m,n)} c_j z_{j_1} ... z_{j_m}`,
/// stored in lexicographic order of J(m,n).
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialCoefficients {
    m: usize,
    n: usize,
    indices: Vec<MultiIndex>,
    values: Vec<Complex64>,
}

impl PolynomialCoefficients {
    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        let indices = IndexSetSpec::nondecreasing(m, n).enumerate()?;
        let values = vec![ZERO; indices.len()];
        Ok(Self { m, n, indices, values })
    }

    pub fn from_values(m: usize, n: usize, values: Vec<Complex64>) -> Result<Self> {
        let mut p = Self::zeros(m, n)?;
        if values.len() != p.values.len() {
            return Err(Error::DimensionMismatch { expected: p.values.len(), found: values.len() });
        }
        p.values = values;
        Ok(p)
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(&MultiIndex) -> Complex64) -> Result<Self> {
        let mut p = Self::zeros(m, n)?;
        for (v, j) in p.values.iter_mut().zip(&p.indices) {
            *v = f(j);
        }
        Ok(p)
    }

    /// `value * z^alpha` for one nondecreasing index.
    pub fn monomial(m: usize, n: usize, j: &MultiIndex, value: Complex64) -> Result<Self> {
        let mut p = Self::zeros(m, n)?;
        p.set(j, value)?;
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> IndexSetSpec {
        IndexSetSpec::nondecreasing(self.m, self.n)
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.indices.iter().zip(&self.values)
    }

    pub fn get(&self, j: &MultiIndex) -> Option<Complex64> {
        self.spec().offset(j).map(|o| self.values[o])
    }

    pub fn set(&mut self, j: &MultiIndex, value: Complex64) -> Result<()> {
        let off = self
            .spec()
            .offset(j)
            .ok_or_else(|| Error::BadParams(format!("{:?} is not in J({}, {})", j.entries(), self.m, self.n)))?;
        self.values[off] = value;
        Ok(())
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: z.len() });
        }
        Ok(self.iter().map(|(j, c)| c * j.entries().iter().map(|&v| z[v - 1]).product::<Complex64>()).sum())
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).sum()
    }

    fn terms(&self) -> Vec<(Complex64, Vec<usize>)> {
        self.iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(j, c)| (*c, j.exponents(self.n)))
            .collect()
    }
}

/// `c_j = card[j] a_j`: coefficients of the polynomial `P(z) = A(z,..,z)`.
pub fn poly_from_symmetric(a: &CoefficientTensor) -> Result<PolynomialCoefficients> {
    if let Some(i) = a.symmetry_defect(1e-12) {
        return Err(Error::SymmetryViolation { index: i.into() });
    }
    PolynomialCoefficients::from_fn(a.m(), a.n(), |j| a.get(j.entries()) * class_cardinality(j.entries()) as f64)
}

/// The symmetric tensor associated with P: `a_i = c_[i] / card[i]`.
pub fn symmetric_from_poly(c: &PolynomialCoefficients) -> Result<CoefficientTensor> {
    CoefficientTensor::symmetric_from_fn(c.m(), c.n(), |j| {
        c.get(j).expect("sorted index lies in J") / class_cardinality(j.entries()) as f64
    })
}

fn check_arguments(a: &CoefficientTensor, xs: &[Vec<Complex64>]) -> Result<()> {
    if xs.len() != a.m() {
        return Err(Error::DimensionMismatch { expected: a.m(), found: xs.len() });
    }
    if let Some(bad) = xs.iter().find(|x| x.len() != a.n()) {
        return Err(Error::DimensionMismatch { expected: a.n(), found: bad.len() });
    }
    Ok(())
}

/// `sum_i a_i x^1_{i_1} ... x^m_{i_m}`.
pub fn eval_form(a: &CoefficientTensor, xs: &[Vec<Complex64>]) -> Result<Complex64> {
    check_arguments(a, xs)?;
    let mut e = vec![0; a.m()];
    let mut acc = ZERO;
    for (off, v) in a.values().iter().enumerate() {
        full_entries(off, a.n(), &mut e);
        acc += v * e.iter().zip(xs).map(|(&i, x)| x[i - 1]).product::<Complex64>();
    }
    Ok(acc)
}

/// The linear coefficients `g` of the form in its k-th argument (0-based)
/// with the others fixed: `A(x) = sum_l g_l x^k_l`.
pub fn coefficient_vector(a: &CoefficientTensor, xs: &[Vec<Complex64>], k: usize) -> Result<Vec<Complex64>> {
    check_arguments(a, xs)?;
    let mut g = vec![ZERO; a.n()];
    let mut e = vec![0; a.m()];
    for (off, v) in a.values().iter().enumerate() {
        full_entries(off, a.n(), &mut e);
        let mut prod = *v;
        for (r, (&i, x)) in e.iter().zip(xs).enumerate() {
            if r != k {
                prod *= x[i - 1];
            }
        }
        g[e[k] - 1] += prod;
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupMethod {
    Alternating,
    Grid,
    ExactFamily,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupNormEstimate {
    /// Attained at `witness`, hence a true lower bound.
    pub lower: f64,
    /// A certified upper bound, when the method provides one.
    pub upper: Option<f64>,
    pub witness: Vec<Vec<Complex64>>,
    pub method: SupMethod,
}

impl SupNormEstimate {
    /// An exactly known sup norm.
    pub fn exact(value: f64, witness: Vec<Vec<Complex64>>) -> Self {
        Self { lower: value, upper: Some(value), witness, method: SupMethod::ExactFamily }
    }

    /// A family with a known analytic upper bound and a computed lower bound.
    pub fn with_upper(mut self, upper: f64) -> Self {
        self.upper = Some(upper.max(self.lower));
        self
    }

    pub fn is_certified(&self) -> bool {
        self.upper.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AscentOptions {
    pub starts: usize,
    pub sweeps: usize,
    /// Stop a start once a full sweep gains less than this, relatively.
    pub rel_tol: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { starts: 32, sweeps: 200, rel_tol: 1e-12 }
    }
}

/// One alternating ascent from a given start.
#[derive(Clone, Debug)]
pub struct AscentRun {
    pub value: f64,
    pub witness: Vec<Vec<Complex64>>,
    /// Form modulus after every half-step (one argument updated).
    pub trace: Vec<f64>,
}

fn unit_phase(g: Complex64) -> Complex64 {
    let r = g.norm();
    if r > 0.0 {
        g.conj() / r
    } else {
        ONE
    }
}

pub fn ascend_from(a: &CoefficientTensor, start: Vec<Vec<Complex64>>, opts: &AscentOptions) -> Result<AscentRun> {
    check_arguments(a, &start)?;
    let mut xs = start;
    let mut value = eval_form(a, &xs)?.norm();
    let mut trace = vec![value];
    for _ in 0..opts.sweeps {
        let before = value;
        for k in 0..a.m() {
            let g = coefficient_vector(a, &xs, k)?;
            xs[k] = g.iter().map(|&gl| unit_phase(gl)).collect();
            value = g.iter().map(|gl| gl.norm()).sum();
            trace.push(value);
        }
        if value - before <= opts.rel_tol * value {
            break;
        }
    }
    // report the modulus actually attained at the witness
    let attained = eval_form(a, &xs)?.norm();
    Ok(AscentRun { value: attained, witness: xs, trace })
}

fn random_phases<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>())).collect()
}

/// Multistart alternating phase maximization of `|A(x^1,..,x^m)|` over the
/// torus. Start `s` draws its phases from stream `s` of `seed`; the best
/// start wins, ties going to the lowest start index.
pub fn supnorm_form(a: &CoefficientTensor, opts: &AscentOptions, seed: u64) -> Result<SupNormEstimate> {
    let starts = opts.starts.max(1);
    let runs: Vec<AscentRun> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s as u64);
            let start = (0..a.m()).map(|_| random_phases(&mut rng, a.n())).collect();
            ascend_from(a, start, opts)
        })
        .collect::<Result<_>>()?;
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.value > best.value { r } else { best })
        .expect("at least one start");
    Ok(SupNormEstimate { lower: best.value, upper: None, witness: best.witness, method: SupMethod::Alternating })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolySupOptions {
    pub starts: usize,
    pub iterations: usize,
    /// Points per angle for the grid oracle.
    pub grid_points: usize,
    /// Largest number of variables for which the grid oracle runs.
    pub grid_max_vars: usize,
}

impl Default for PolySupOptions {
    fn default() -> Self {
        Self { starts: 32, iterations: 500, grid_points: 720, grid_max_vars: 3 }
    }
}

struct Terms {
    coeffs: Vec<Complex64>,
    exps: Vec<Vec<usize>>,
}

impl Terms {
    fn new(c: &PolynomialCoefficients) -> Self {
        let (coeffs, exps) = c.terms().into_iter().unzip();
        Self { coeffs, exps }
    }

    fn value_and_grad(&self, theta: &[f64]) -> (Complex64, Vec<Complex64>) {
        let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let mut value = ZERO;
        let mut grad = vec![ZERO; theta.len()];
        for (c, alpha) in self.coeffs.iter().zip(&self.exps) {
            let mono = c * alpha.iter().zip(&z).map(|(&e, zj)| zj.powu(e as u32)).product::<Complex64>();
            value += mono;
            for (g, &e) in grad.iter_mut().zip(alpha) {
                if e > 0 {
                    // d/dtheta_j of z^alpha = i alpha_j z^alpha
                    *g += Complex64::new(0.0, e as f64) * mono;
                }
            }
        }
        (value, grad)
    }
}

/// Gradient ascent of `|P(e^{i theta})|^2` with backtracking. Returns the
/// final angles and modulus.
fn ascend_angles(terms: &Terms, mut theta: Vec<f64>, iterations: usize) -> (Vec<f64>, f64) {
    let (mut value, mut grad) = terms.value_and_grad(&theta);
    let mut f = value.norm_sqr();
    let mut step = 0.1;
    for _ in 0..iterations {
        // d|P|^2/dtheta_j = 2 Re(conj(P) dP/dtheta_j)
        let dir: Vec<f64> = grad.iter().map(|g| 2.0 * (value.conj() * g).re).collect();
        let slope: f64 = dir.iter().map(|d| d * d).sum();
        if slope <= 1e-30 * f.max(1e-300) {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + step * d).collect();
            let (tv, tg) = terms.value_and_grad(&trial);
            let tf = tv.norm_sqr();
            if tf >= f + 1e-4 * step * slope {
                let gain = tf - f;
                theta = trial;
                value = tv;
                grad = tg;
                f = tf;
                step *= 2.0;
                accepted = true;
                if gain <= 1e-15 * f {
                    return (theta, f.sqrt());
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (theta, f.sqrt())
}

/// Dense grid over the torus with the first angle pinned to zero.
/// Returns (best modulus, best angles, certified upper bound).
fn grid_oracle(c: &PolynomialCoefficients, points: usize) -> (f64, Vec<f64>, f64) {
    let n = c.n();
    let m = c.m();
    let terms = Terms::new(c);
    if n == 1 {
        let v = c.values()[0].norm();
        return (v, vec![0.0], v);
    }
    let h = 2.0 * PI / points as f64;
    let angle = |g: usize| g as f64 * h;
    // pow[g][e] = exp(i e theta_g)
    let pow: Vec<Vec<Complex64>> =
        (0..points).map(|g| (0..=m).map(|e| Complex64::from_polar(1.0, e as f64 * angle(g))).collect()).collect();

    let (best, arg) = match n {
        2 => {
            let mut d = vec![ZERO; m + 1];
            for (cf, alpha) in terms.coeffs.iter().zip(&terms.exps) {
                d[alpha[1]] += cf;
            }
            (0..points)
                .map(|g| (d.iter().zip(&pow[g]).map(|(a, b)| a * b).sum::<Complex64>().norm(), vec![0.0, angle(g)]))
                .fold((-1.0, vec![]), |acc, x| if x.0 > acc.0 { x } else { acc })
        }
        3 => {
            let rows: Vec<(f64, usize)> = (0..points)
                .into_par_iter()
                .map(|g2| {
                    let mut e = vec![ZERO; m + 1];
                    for (cf, alpha) in terms.coeffs.iter().zip(&terms.exps) {
                        e[alpha[2]] += cf * pow[g2][alpha[1]];
                    }
                    (0..points)
                        .map(|g3| (e.iter().zip(&pow[g3]).map(|(a, b)| a * b).sum::<Complex64>().norm(), g3))
                        .fold((-1.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc })
                })
                .collect();
            let (g2, (v, g3)) = rows
                .into_iter()
                .enumerate()
                .fold((0, (-1.0, 0)), |acc, (g2, r)| if r.0 > acc.1 .0 { (g2, r) } else { acc });
            (v, vec![0.0, angle(g2), angle(g3)])
        }
        _ => unreachable!("grid oracle runs for n <= 3 only"),
    };

    // Every torus point is within h/2 of a grid point in each free angle.
    // First order: |P| is Lipschitz with constants L_j = sum |c| alpha_j.
    // Second order: at an interior maximizer the gradient of Re(e^{-i phi} P)
    // vanishes, so the loss to the nearest grid point is at most
    // (1/2) sum_{j,k} W_jk (h/2)^2 with W_jk = sum |c| alpha_j alpha_k.
    let delta = h / 2.0;
    let mut lip = 0.0;
    let mut curv = 0.0;
    for (cf, alpha) in terms.coeffs.iter().zip(&terms.exps) {
        let free: f64 = alpha[1..].iter().map(|&e| e as f64).sum();
        lip += cf.norm() * free;
        curv += cf.norm() * free * free;
    }
    let slack = (lip * delta).min(0.5 * curv * delta * delta);
    (best.max(0.0), arg, best.max(0.0) + slack)
}

/// Sup norm of an m-homogeneous polynomial over the unit polydisc.
pub fn supnorm_poly(c: &PolynomialCoefficients, opts: &PolySupOptions, seed: u64) -> Result<SupNormEstimate> {
    let n = c.n();
    let terms = Terms::new(c);
    let witness_of = |theta: &[f64]| theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>();

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut upper = None;
    let mut method = SupMethod::Alternating;
    if n <= opts.grid_max_vars {
        let (_, arg, up) = grid_oracle(c, opts.grid_points.max(1));
        candidates.push(arg);
        upper = Some(up);
        method = SupMethod::Grid;
    }
    let from_starts: Vec<Vec<f64>> = (0..opts.starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s as u64);
            (0..n).map(|_| 2.0 * PI * rng.random::<f64>()).collect()
        })
        .collect();
    candidates.extend(from_starts);

    let polished: Vec<(Vec<f64>, f64)> = candidates
        .into_par_iter()
        .map(|theta| {
            let (t, _) = ascend_angles(&terms, theta, opts.iterations);
            let v = c.eval(&witness_of(&t)).expect("n angles").norm();
            (t, v)
        })
        .collect();
    let (theta, lower) = polished
        .into_iter()
        .reduce(|best, x| if x.1 > best.1 { x } else { best })
        .unwrap_or_else(|| (vec![0.0; n], c.eval(&vec![ONE; n]).map(|v| v.norm()).unwrap_or(0.0)));
    Ok(SupNormEstimate { lower, upper: upper.map(|u: f64| u.max(lower)), witness: vec![witness_of(&theta)], method })
}

/// `m^m / m!`, the polarization constant.
pub fn polarization_factor(m: usize) -> f64 {
    let mf = m as f64;
    (1..=m).map(|k| mf / k as f64).product()
}

/// Checks that the tensor fits the enumeration cap before a sup-norm run.
pub fn check_form_size(m: usize, n: usize) -> Result<usize> {
    IndexSetSpec::full(m, n).checked_len(DEFAULT_ENUMERATION_LIMIT)
}
