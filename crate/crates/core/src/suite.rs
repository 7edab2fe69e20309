//! Seeded trial suites: one random (or certified) instance per trial for
//! each statement id in [`crate::verify::LEMMAS`]. Trial `t` draws from
//! stream `t` of the seed, so reports come back in trial order and are
//! reproducible bit for bit.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::dirichlet::{dirichlet_bh_check, PrimeTable};
use crate::error::{Error, Result};
use crate::forms::{supnorm_form, supnorm_poly, symmetric_from_poly, AscentOptions, PolySupOptions, SupNormEstimate};
use crate::interpolate::{block_average, check_lorentz_envelope, k_functional};
use crate::lowerbounds::fourier_tensor;
use crate::mixed::CoefficientTensor;
use crate::rng::{child_seed, stream_rng};
use crate::verify::*;

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Inner exponent for the partition checks (default 1, or 2 for the
    /// dual form).
    pub q: Option<f64>,
    /// Coordinate or subset size; all admissible values when absent.
    pub k: Option<usize>,
    /// Lorentz index for the one-dimensional checks.
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub samples: usize,
    /// Allow random instances without certified sup norms.
    pub heuristic: bool,
    pub starts: usize,
    pub constants: BHConstantTable,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            m: 2,
            n: 3,
            trials: 100,
            seed: 0,
            q: None,
            k: None,
            p: None,
            alpha: None,
            samples: 100_000,
            heuristic: false,
            starts: 32,
            constants: BHConstantTable::default(),
        }
    }
}

impl SuiteParams {
    fn ascent(&self) -> AscentOptions {
        AscentOptions { starts: self.starts, ..Default::default() }
    }

    fn poly_opts(&self) -> PolySupOptions {
        PolySupOptions { starts: self.starts, ..Default::default() }
    }

    fn coords(&self) -> Vec<usize> {
        self.k.map_or_else(|| (1..=self.m).collect(), |k| vec![k])
    }

    fn rng(&self, t: usize) -> ChaCha8Rng {
        stream_rng(self.seed, t as u64)
    }

    fn sub_seed(&self, t: usize) -> u64 {
        child_seed(self.seed, t as u64)
    }

    fn needs_grid(&self, what: &str) -> Result<()> {
        if self.n > 3 && !self.heuristic {
            return Err(Error::BadParams(format!(
                "{what} needs a certified polynomial sup norm (n <= 3); pass the heuristic switch to run uncertified"
            )));
        }
        Ok(())
    }
}

/// Instance `t` of the certified families: rank-one, unimodular monomial,
/// and the Fourier tensor on N = n points.
fn certified_instance(params: &SuiteParams, t: usize) -> Result<(CoefficientTensor, SupNormEstimate, &'static str)> {
    let (m, n) = (params.m, params.n);
    let mut rng = params.rng(t);
    match t % 3 {
        0 => {
            let factors: Vec<Vec<Complex64>> = (0..m).map(|_| random_complex_vec(&mut rng, n)).collect();
            let (a, s) = rank_one_certified(&factors)?;
            Ok((a, s, "rank-one"))
        }
        1 => {
            let i: Vec<usize> = (0..m).map(|_| rng.random_range(1..=n)).collect();
            let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let (a, s) = monomial_certified(m, n, &i, phase)?;
            Ok((a, s, "monomial"))
        }
        _ => {
            let ft = fourier_tensor(n.max(2), m.max(2))?;
            let s = ft.certified_sup(&params.ascent(), params.sub_seed(t))?;
            Ok((ft.tensor, s, "fourier"))
        }
    }
}

fn sup_instance(params: &SuiteParams, t: usize) -> Result<(CoefficientTensor, SupNormEstimate, &'static str)> {
    if params.heuristic {
        let a = random_tensor(&mut params.rng(t), params.m, params.n)?;
        let s = supnorm_form(&a, &params.ascent(), params.sub_seed(t))?;
        Ok((a, s, "random"))
    } else {
        certified_instance(params, t)
    }
}

fn tag(mut r: InequalityReport, t: usize, family: Option<&str>) -> InequalityReport {
    if let Some(obj) = r.instance.as_object_mut() {
        obj.insert("trial".into(), json!(t));
        if let Some(f) = family {
            obj.insert("family".into(), json!(f));
        }
    }
    r
}

fn random_blocks(rng: &mut ChaCha8Rng, len: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut blocks = Vec::new();
    let mut rest = order.as_slice();
    while !rest.is_empty() {
        let take = rng.random_range(1..=rest.len());
        blocks.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    blocks
}

fn trial(id: &str, params: &SuiteParams, t: usize, primes: &PrimeTable) -> Result<Vec<InequalityReport>> {
    let (m, n) = (params.m, params.n);
    let mut rng = params.rng(t);
    let reports = match id {
        "slice-sum" => {
            let a = random_tensor(&mut rng, m, n)?;
            let set = random_index_set(&mut rng, m, n)?;
            vec![verify_slice_sum(&a, &set)?]
        }
        "partition" => {
            let q = params.q.unwrap_or(1.0);
            let a = random_tensor(&mut rng, m, n)?;
            let sets = greedy_partition(&a, q)?;
            let cover = InequalityReport::exact(
                "partition",
                if is_partition(&sets, m, n) { 0.0 } else { 1.0 },
                0.0,
                1.0,
                json!({"m": m, "n": n, "q": q, "check": "cover"}),
                hash_tensor(&a),
            );
            std::iter::once(cover).chain(verify_partition(&a, &sets, q)?).collect()
        }
        "dual-partition" => {
            let a = random_tensor(&mut rng, m, n)?;
            vec![verify_dual_partition(&a, params.q.unwrap_or(2.0))?]
        }
        "mixed-bh" => {
            let (a, s, fam) = sup_instance(params, t)?;
            let reports: Vec<_> = params.coords().into_iter().map(|k| verify_mixed_bh(&a, &s, k)).collect::<Result<_>>()?;
            return Ok(reports.into_iter().map(|r| tag(r, t, Some(fam))).collect());
        }
        "blei-fournier" => {
            let (a, s, fam) = sup_instance(params, t)?;
            return Ok(vec![tag(verify_blei_fournier(&a, &s)?, t, Some(fam))]);
        }
        "diagonal" => {
            let a = symmetric_from_poly(&random_symmetric_poly(&mut rng, m, n)?)?;
            verify_diagonal(&a)?.into()
        }
        "lorentz-blocks" => {
            let a = random_tensor(&mut rng, m, n)?;
            params.coords().into_iter().map(|k| verify_lorentz_blocks(&a, k)).collect::<Result<_>>()?
        }
        "polarization" => {
            params.needs_grid("polarization")?;
            let c = random_symmetric_poly(&mut rng, m, n)?;
            let a = symmetric_from_poly(&c)?;
            let form = supnorm_form(&a, &params.ascent(), params.sub_seed(t))?;
            let poly = supnorm_poly(&c, &params.poly_opts(), params.sub_seed(t))?;
            vec![verify_polarization(&c, &form, &poly)?]
        }
        "poly-bh" | "dirichlet-bh" => {
            params.needs_grid(id)?;
            let c = random_symmetric_poly(&mut rng, m, n)?;
            let sup = supnorm_poly(&c, &params.poly_opts(), params.sub_seed(t))?;
            if id == "poly-bh" {
                vec![verify_poly_bh(&c, &sup, &params.constants)?]
            } else {
                vec![dirichlet_bh_check(&c, &sup, &params.constants, primes)?]
            }
        }
        "khinchine" => {
            let alpha = random_complex_vec(&mut rng, n);
            vec![verify_khinchine(&alpha, params.samples, params.sub_seed(t), &params.constants)?]
        }
        "marcinkiewicz" => {
            let len = rng.random_range(1..=n.max(1));
            let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            verify_marcinkiewicz(&x, params.p.unwrap_or(1.5))?.into()
        }
        "power-sum" => vec![verify_power_sum(params.alpha.unwrap_or(0.5), t + 1)?],
        "indicator" => vec![verify_indicator(params.p.unwrap_or(4.0 / 3.0), t + 1)?],
        "ratio-floor" => vec![verify_ratio_floor(&random_tensor(&mut rng, m, n)?)?],
        "envelope" => {
            let mf = m as f64;
            let x: Vec<f64> = (0..n.max(1)).map(|_| rng.random_range(0.0..1.0)).collect();
            vec![check_lorentz_envelope(&x, 1.0, 2.0, (mf - 1.0) / mf, 1.0)?.to_report(&x)]
        }
        "block-average" => {
            let x: Vec<f64> = (0..n.max(1)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let blocks = random_blocks(&mut rng, x.len());
            let px = block_average(&x, &blocks)?;
            (1..=2 * x.len())
                .map(|i| {
                    let s = 0.5 * i as f64;
                    Ok(InequalityReport::exact(
                        "block-average",
                        k_functional(&px, s)?,
                        k_functional(&x, s)?,
                        1.0,
                        json!({"len": x.len(), "blocks": blocks.len(), "t": s}),
                        hash_reals(&x),
                    ))
                })
                .collect::<Result<_>>()?
        }
        "synthetic" => {
            let x: Vec<f64> = (0..n.max(2)).map(|_| rng.random_range(0.1..1.0)).collect();
            vec![verify_synthetic(&x)]
        }
        other => return Err(Error::BadParams(format!("unknown statement id {other:?}"))),
    };
    Ok(reports.into_iter().map(|r| tag(r, t, None)).collect())
}

/// Runs `params.trials` trials of statement `id`.
pub fn run_lemma(id: &str, params: &SuiteParams) -> Result<Vec<InequalityReport>> {
    if !LEMMAS.iter().any(|(l, _)| *l == id) {
        return Err(Error::BadParams(format!("unknown statement id {id:?}")));
    }
    if params.m == 0 || params.n == 0 {
        return Err(Error::BadParams("m and n must be positive".into()));
    }
    if let Some(k) = params.k {
        if k == 0 || k > params.m {
            return Err(Error::BadParams(format!("k must lie in 1..={}, got {k}", params.m)));
        }
    }
    params.constants.validate()?;
    let primes = if id == "dirichlet-bh" { PrimeTable::new(1000) } else { PrimeTable::new(1) };
    run_trials(params.trials, |t| trial(id, params, t, &primes))
}
