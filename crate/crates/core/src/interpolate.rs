//! Real interpolation of sequence spaces: K-functionals for the couples
//! (l_1, l_inf) and (l_1, l_2), the (theta, q) norms built from them, the
//! Lorentz envelope comparison, and block averaging.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::lorentz::{conjugate, lorentz_norm, rearrange, LorentzParams, Magnitude};
use crate::sum::pairwise_sum;
use crate::verify::{hash_reals, InequalityReport};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpParams {
    pub theta: f64,
    pub q: f64,
}

impl InterpParams {
    pub fn new(theta: f64, q: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::BadParams(format!("theta must lie in (0, 1), got {theta}")));
        }
        if !(q >= 1.0) {
            return Err(Error::BadParams(format!("q must lie in [1, inf], got {q}")));
        }
        Ok(Self { theta, q })
    }
}

/// K(t, x; l_1, l_inf) on a rearranged sequence: the integral of the step
/// function x* over [0, t].
pub fn k_functional_sorted(xs: &[f64], t: f64) -> f64 {
    let whole = t.floor() as usize;
    let head = pairwise_sum(&xs[..whole.min(xs.len())]);
    let frac = t - t.floor();
    head + xs.get(whole).map_or(0.0, |v| frac * v)
}

pub fn k_functional<T: Magnitude>(x: &[T], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("K-functional needs t > 0, got {t}")));
    }
    Ok(k_functional_sorted(&rearrange(x), t))
}

/// K(t, x; l_1, l_2) = inf over splittings of |x_0|_1 + t |x_1|_2.
///
/// The minimizer truncates at a level mu: `x_1 = min(|x|, mu)`. On the range
/// of mu where exactly r entries exceed it the cost
/// `sum_{i<=r} x*_i - r mu + t sqrt(r mu^2 + R)` is convex with stationary
/// point `mu = sqrt(R / (t^2 - r))`, so minimizing piece by piece is exact.
pub fn k_functional_l1_l2<T: Magnitude>(x: &[T], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("K-functional needs t > 0, got {t}")));
    }
    let xs: Vec<f64> = rearrange(x).into_iter().filter(|v| *v > 0.0).collect();
    Ok(k_l1_l2_sorted(&xs, t).0)
}

/// Returns K and the optimal truncation level.
pub(crate) fn k_l1_l2_sorted(xs: &[f64], t: f64) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    // tail[r] = sum_{i >= r} x_i^2 (0-based)
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + xs[i] * xs[i];
    }
    let total: f64 = pairwise_sum(xs);
    let cost = |r: usize, head: f64, mu: f64| head - r as f64 * mu + t * (r as f64 * mu * mu + tail[r]).sqrt();
    let mut best = (t * tail[0].sqrt(), xs[0]);
    let mut head = 0.0;
    for r in 0..=n {
        let hi = if r == 0 { xs[0] } else { xs[r - 1] };
        let lo = if r == n { 0.0 } else { xs[r] };
        let mut candidates = vec![lo, hi];
        let t2 = t * t;
        if t2 > r as f64 && tail[r] > 0.0 {
            candidates.push((tail[r] / (t2 - r as f64)).sqrt().clamp(lo, hi));
        }
        for mu in candidates {
            let c = cost(r, head, mu);
            if c < best.0 {
                best = (c, mu);
            }
        }
        if r < n {
            head += xs[r];
        }
    }
    (best.0.min(total), best.1)
}

/// Adaptive Simpson on [a, b] with an absolute tolerance.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `(int_0^inf (t^{-theta} K(t))^q dt/t)^{1/q}` for a K that equals
/// `slope * t` on [0, t0] and `total` on [t1, inf), integrating the middle
/// numerically segment by segment.
fn interp_integral(
    k: impl Fn(f64) -> f64,
    slope: f64,
    total: f64,
    breakpoints: &[f64],
    params: &InterpParams,
) -> f64 {
    let (theta, q) = (params.theta, params.q);
    let t0 = breakpoints[0];
    let t1 = *breakpoints.last().expect("at least one breakpoint");
    let head = slope.powf(q) * t0.powf((1.0 - theta) * q) / ((1.0 - theta) * q);
    let tail = total.powf(q) * t1.powf(-theta * q) / (theta * q);
    let integrand = |t: f64| (t.powf(-theta) * k(t)).powf(q) / t;
    let mut parts = vec![head, tail];
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            let scale = integrand(a).max(integrand(b)) * (b - a);
            parts.push(simpson(&integrand, a, b, 1e-10 * scale.max(f64::MIN_POSITIVE)));
        }
    }
    pairwise_sum(&parts).powf(1.0 / q)
}

/// Norm in (l_1, l_inf)_{theta, q}.
pub fn real_interp_norm<T: Magnitude>(x: &[T], params: &InterpParams) -> Result<f64> {
    InterpParams::new(params.theta, params.q)?;
    let xs: Vec<f64> = rearrange(x).into_iter().filter(|v| *v > 0.0).collect();
    if xs.is_empty() {
        return Ok(0.0);
    }
    let support = xs.len();
    let theta = params.theta;
    if params.q.is_infinite() {
        // t^{-theta} K(t) on [k-1, k] is t^{-theta}(A + B t); it peaks at
        // t = theta A / ((1 - theta) B) when that lies inside.
        let mut best = 0.0f64;
        let mut partial = 0.0;
        for (i, &b) in xs.iter().enumerate() {
            let lo = i as f64;
            let a = partial - lo * b;
            partial += b;
            best = best.max((lo + 1.0).powf(-theta) * partial);
            if a > 0.0 {
                let crit = theta * a / ((1.0 - theta) * b);
                if crit > lo && crit < lo + 1.0 {
                    best = best.max(crit.powf(-theta) * (a + b * crit));
                }
            }
        }
        return Ok(best);
    }
    let breakpoints: Vec<f64> = (1..=support).map(|k| k as f64).collect();
    let total = pairwise_sum(&xs);
    Ok(interp_integral(|t| k_functional_sorted(&xs, t), xs[0], total, &breakpoints, params))
}

/// Norm in (l_1, l_2)_{theta, q}, q finite.
pub fn real_interp_norm_l1_l2<T: Magnitude>(x: &[T], params: &InterpParams) -> Result<f64> {
    InterpParams::new(params.theta, params.q)?;
    if params.q.is_infinite() {
        return Err(Error::BadParams("the (l_1, l_2) interpolation norm is implemented for finite q".into()));
    }
    let xs: Vec<f64> = rearrange(x).into_iter().filter(|v| *v > 0.0).collect();
    if xs.is_empty() {
        return Ok(0.0);
    }
    let l2 = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let total = pairwise_sum(&xs);
    // K(t) = t |x|_2 up to t0 and |x|_1 from sqrt(T) on
    let t0 = l2 / xs[0];
    let t1 = (xs.len() as f64).sqrt();
    let pieces = 16 * xs.len();
    let ratio = (t1 / t0).max(1.0);
    let breakpoints: Vec<f64> = (0..=pieces).map(|i| t0 * ratio.powf(i as f64 / pieces as f64)).collect();
    Ok(interp_integral(|t| k_l1_l2_sorted(&xs, t).0, l2, total, &breakpoints, params))
}

/// Both sides of the two-sided Lorentz envelope for one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub p: f64,
    pub theta: f64,
    pub q: f64,
    pub interp_norm: f64,
    pub lorentz_norm: f64,
    pub lower_factor: f64,
    pub upper_factor: f64,
    /// Smallest C with `C^{-1} lower L <= I <= C upper L` on this instance.
    pub instance_constant: f64,
}

impl EnvelopeReport {
    /// The upper side with C = 1.
    pub fn to_report(&self, x: &[f64]) -> InequalityReport {
        InequalityReport::exact(
            "envelope",
            self.interp_norm,
            self.upper_factor * self.lorentz_norm,
            1.0,
            json!({"len": x.len(), "p": self.p, "theta": self.theta, "q": self.q,
                   "instance_constant": self.instance_constant}),
            hash_reals(x),
        )
    }
}

/// Compares the (l_{p0}, l_{p1})_{theta,q} norm with the l_{p,q} norm, where
/// `1/p = (1-theta)/p0 + theta/p1`, using the factors
/// `theta^{-min/max(1/q,1/p0)} (1-theta)^{-min/max(1/q,1/p1)} (p/q)^{1/q}`.
/// Only the couple (l_1, l_2) is implemented.
pub fn check_lorentz_envelope<T: Magnitude>(x: &[T], p0: f64, p1: f64, theta: f64, q: f64) -> Result<EnvelopeReport> {
    let params = InterpParams::new(theta, q)?;
    if p0 == p1 {
        return Err(Error::BadParams("the envelope needs p0 != p1".into()));
    }
    if (p0, p1) != (1.0, 2.0) {
        return Err(Error::BadParams(format!("only the couple (l_1, l_2) is implemented, got ({p0}, {p1})")));
    }
    if q.is_infinite() {
        return Err(Error::BadParams("the envelope is implemented for finite q".into()));
    }
    let p = 1.0 / ((1.0 - theta) / p0 + theta / p1);
    let interp = real_interp_norm_l1_l2(x, &params)?;
    let lorentz = lorentz_norm(x, &LorentzParams::new(p, q)?)?;
    let lower = theta.powf(-(1.0 / q).min(1.0 / p0)) * (1.0 - theta).powf(-(1.0 / q).min(1.0 / p1)) * (p / q).powf(1.0 / q);
    let upper = theta.powf(-(1.0 / q).max(1.0 / p0)) * (1.0 - theta).powf(-(1.0 / q).max(1.0 / p1)) * (p / q).powf(1.0 / q);
    let instance_constant = if interp > 0.0 {
        (lower * lorentz / interp).max(interp / (upper * lorentz))
    } else {
        f64::NAN
    };
    Ok(EnvelopeReport { p, theta, q, interp_norm: interp, lorentz_norm: lorentz, lower_factor: lower, upper_factor: upper, instance_constant })
}

/// The comparison of `|x|_{p,q}` with (l_1, l_inf) interpolation norms at
/// `theta = 1 - 1/p`, under two readings of the right-hand index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SandwichReadings {
    /// `|x|_{theta,q}` and `|x|_{theta,p}`.
    pub interp_q: f64,
    pub interp_p: f64,
    pub lorentz: f64,
    /// `(1/p') |x|_{theta,q} <= |x|_{p,q}`.
    pub lower_holds: bool,
    /// `|x|_{p,q} <= |x|_{theta,p}`.
    pub upper_p_holds: bool,
    /// `|x|_{p,q} <= |x|_{theta,q}`.
    pub upper_q_holds: bool,
    /// `(1/p') |x|_{theta,q} <= (p/q)^{1/q} |x|_{p,q} <= |x|_{theta,q}`.
    pub normalized_holds: bool,
}

pub fn sandwich_readings(x: &[f64], p: f64, q: f64, rel_tol: f64) -> Result<SandwichReadings> {
    let theta = 1.0 - 1.0 / p;
    let interp_q = real_interp_norm(x, &InterpParams::new(theta, q)?)?;
    let interp_p = real_interp_norm(x, &InterpParams::new(theta, p)?)?;
    let lorentz = lorentz_norm(x, &LorentzParams::new(p, q)?)?;
    let le = |a: f64, b: f64| a <= b * (1.0 + rel_tol);
    let scale = if q.is_infinite() { 1.0 } else { (p / q).powf(1.0 / q) };
    let pc = conjugate(p);
    Ok(SandwichReadings {
        interp_q,
        interp_p,
        lorentz,
        lower_holds: le(interp_q / pc, lorentz),
        upper_p_holds: le(lorentz, interp_p),
        upper_q_holds: le(lorentz, interp_q),
        normalized_holds: le(interp_q / pc, scale * lorentz) && le(scale * lorentz, interp_q),
    })
}

/// Replaces x on every block by the block average. Blocks are 0-based
/// positions and must partition `0..x.len()`.
pub fn block_average(x: &[f64], blocks: &[Vec<usize>]) -> Result<Vec<f64>> {
    let mut seen = vec![false; x.len()];
    for b in blocks {
        if b.is_empty() {
            return Err(Error::MalformedPartition("empty block".into()));
        }
        for &i in b {
            if i >= x.len() {
                return Err(Error::MalformedPartition(format!("position {i} outside 0..{}", x.len())));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::MalformedPartition(format!("position {i} appears twice")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::MalformedPartition(format!("position {missing} is not covered")));
    }
    let mut out = vec![0.0; x.len()];
    for b in blocks {
        let avg = b.iter().map(|&i| x[i]).sum::<f64>() / b.len() as f64;
        for &i in b {
            out[i] = avg;
        }
    }
    Ok(out)
}
