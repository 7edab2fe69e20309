//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.

use std::process::Command;
use std::time::{Duration, Instant};

use bhlab::dirichlet::{bohr_lift, homogeneous_support, non_embedding_witnesses, unlift, PrimeTable};
use bhlab::forms::AscentOptions;
use bhlab::interpolate::{check_lorentz_envelope, k_functional, k_functional_l1_l2};
use bhlab::lorentz::{fundamental_function, lorentz_norm, lp_norm, power_sum_bound, LorentzParams};
use bhlab::lowerbounds::{fourier_tensor, loglog_slope};
use bhlab::rng::stream_rng;
use bhlab::suite::{run_lemma, SuiteParams};
use bhlab::verify::{random_symmetric_poly, verify_indicator, verify_marcinkiewicz, verify_power_sum, InequalityReport, Verdict};
use rand::Rng;

fn report(n: &str, ok: bool, start: Instant, limit: Duration, detail: String) {
    let elapsed = start.elapsed();
    let pass = ok && elapsed <= limit;
    println!(
        "criterion {n}: {} ({detail}; {:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(elapsed <= limit, "criterion {n} took {elapsed:?}, limit {limit:?}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn tally(reports: &[InequalityReport]) -> (usize, usize) {
    (reports.iter().filter(|r| r.verdict == Verdict::Holds).count(), reports.len())
}

fn suite(id: &str, m: usize, n: usize, trials: usize, seed: u64) -> Vec<InequalityReport> {
    let params = SuiteParams { m, n, trials, seed, ..Default::default() };
    run_lemma(id, &params).unwrap()
}

#[test]
fn criterion_01_indicator_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut all_hold = true;
    for p in [4.0 / 3.0, 1.5, 1.6, 2.0] {
        let params = LorentzParams::new(p, 1.0).unwrap();
        for n in 1..=100usize {
            let v = lorentz_norm(&vec![1.0; n], &params).unwrap();
            worst = worst.max((v - (n as f64).powf(1.0 / p)).abs());
            all_hold &= verify_indicator(p, n).unwrap().holds();
        }
    }
    report("1", worst < 1e-12 && all_hold, start, secs(1), format!("max deviation {worst:.2e}"));
}

#[test]
fn criterion_02_marcinkiewicz_sandwich() {
    let start = Instant::now();
    let mut failures = 0;
    for t in 0..10_000u64 {
        let mut rng = stream_rng(2, t);
        let p = [4.0 / 3.0, 1.5, 2.0, 3.0][rng.random_range(0..4)];
        let len = rng.random_range(1..=50);
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        failures += verify_marcinkiewicz(&x, p).unwrap().iter().filter(|r| !r.holds()).count();
    }
    report("2", failures == 0, start, secs(5), format!("{failures} failures over 10^4 vectors"));
}

#[test]
fn criterion_03_power_sum_estimate() {
    let start = Instant::now();
    let mut failures = 0;
    for alpha in [0.25, 0.5, 0.75] {
        // running sum over every N, plus the statement check at sampled N
        let mut s = 0.0;
        for n in 1..=100_000usize {
            s += (n as f64).powf(-alpha);
            if s >= power_sum_bound(alpha, n) {
                failures += 1;
            }
        }
        for n in (1..=1000).chain([10_000, 50_000, 100_000]) {
            if !verify_power_sum(alpha, n).unwrap().holds() {
                failures += 1;
            }
        }
    }
    report("3", failures == 0, start, secs(1), format!("{failures} non-strict cases"));
}

#[test]
fn criterion_04_fourier_construction() {
    let start = Instant::now();
    let opts = AscentOptions::default();
    let mut ok = true;
    let mut worst_residual = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut at_2_2 = f64::NAN;
    for m in [2, 3] {
        for n in 2..=8 {
            let f = fourier_tensor(n, m).unwrap();
            worst_residual = worst_residual.max(f.orthogonality_residual);
            let est = f.certified_sup(&opts, 4 + n as u64).unwrap();
            worst_ratio = worst_ratio.max(est.lower / f.sup_bound());
            ok &= est.lower <= f.sup_bound() * (1.0 + 1e-6);
            if (n, m) == (2, 2) {
                at_2_2 = est.lower;
            }
        }
    }
    let gap = (at_2_2 - 2f64.powf(1.5)).abs();
    ok &= worst_residual < 1e-9 && gap < 1e-9;
    report(
        "4",
        ok,
        start,
        secs(30),
        format!("residual {worst_residual:.2e}, max ascent/bound {worst_ratio:.12}, |sup(2,2) - 2^1.5| {gap:.2e}"),
    );
}

#[test]
fn criterion_05_sharpness_witness() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut slopes = Vec::new();
    for m in [2usize, 3] {
        let mf = m as f64;
        let p = 2.0 * mf / (mf + 1.0);
        let ns: Vec<f64> = (2..=8).map(|n| n as f64).collect();
        let ratio = |p: f64, n: f64| {
            let phi = fundamental_function(&LorentzParams::new(p, 1.0).unwrap(), n.powi(m as i32) as usize).unwrap();
            phi / n.powf((mf + 1.0) / 2.0)
        };
        for &n in &ns {
            worst = worst.max((ratio(p, n) - 1.0).abs());
        }
        let reduced: Vec<f64> = ns.iter().map(|&n| ratio(p - 0.05, n)).collect();
        slopes.push(loglog_slope(&ns, &reduced).unwrap());
    }
    let ok = worst < 1e-9 && slopes.iter().all(|s| *s > 0.0);
    report("5", ok, start, secs(10), format!("max |ratio - 1| {worst:.2e}, reduced-p slopes {slopes:?}"));
}

#[test]
fn criterion_06_exact_statements() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (id, ms) in [("slice-sum", 2..=3), ("dual-partition", 2..=3), ("lorentz-blocks", 2..=3), ("diagonal", 2..=4)] {
        let mut all = Vec::new();
        let combos = ms.clone().count() * 4;
        for m in ms {
            for n in 1..=4 {
                all.extend(suite(id, m, n, 500usize.div_ceil(combos), 6 + 10 * m as u64 + n as u64));
            }
        }
        let (h, total) = tally(&all);
        let instances = all.iter().map(|r| (&r.instance["trial"], &r.instance_hash)).collect::<std::collections::HashSet<_>>().len();
        ok &= h == total && instances >= 500usize.min(total);
        lines.push(format!("{id} {h}/{total}"));
    }
    report("6", ok, start, secs(60), lines.join(", "));
}

#[test]
fn criterion_07_partition() {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for q in [1.0, 2.0] {
        let mut all = Vec::new();
        for m in [2, 3] {
            for n in [2, 3, 4] {
                let params = SuiteParams { m, n, trials: 84, seed: 7 + m as u64 * 10 + n as u64, q: Some(q), ..Default::default() };
                all.extend(run_lemma("partition", &params).unwrap());
            }
        }
        let covers = all.iter().filter(|r| r.lhs == 0.0 && r.rhs == 0.0).count();
        let (h, total) = tally(&all);
        ok &= h == total && covers >= 500;
        lines.push(format!("q={q}: {h}/{total} holds"));
    }
    report("7", ok, start, secs(30), lines.join(", "));
}

#[test]
fn criterion_08_mixed_and_blei_fournier() {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for id in ["mixed-bh", "blei-fournier"] {
        for m in [2, 3] {
            let all = suite(id, m, 3, 30, 8 + m as u64);
            let (h, total) = tally(&all);
            let certified = all.iter().all(|r| r.rhs_upper.is_some());
            ok &= h == total && certified;
            lines.push(format!("{id} m={m} {h}/{total}"));
        }
    }
    report("8", ok, start, secs(30), lines.join(", "));
}

#[test]
fn criterion_09_polarization_chain() {
    let start = Instant::now();
    let mut all = Vec::new();
    for m in [2, 3] {
        for n in [2, 3] {
            all.extend(suite("polarization", m, n, 50, 9 + 10 * m as u64 + n as u64));
        }
    }
    let (h, total) = tally(&all);
    report("9", h == total && total == 200, start, secs(120), format!("{h}/{total} holds"));
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    f(0.5 * (lo + hi))
}

/// Minimum over splits x = x0 + x1 where x1 clips |x| at a level.
fn brute_k_inf(x: &[f64], t: f64) -> f64 {
    let top = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cost = |lam: f64| x.iter().map(|v| (v.abs() - lam).max(0.0)).sum::<f64>() + t * lam;
    let mut best = cost(0.0).min(cost(top));
    for v in x {
        best = best.min(cost(v.abs()));
    }
    best.min(golden_min(cost, 0.0, top))
}

/// Same for the l2 endpoint, scanning the clip level densely.
fn brute_k_2(x: &[f64], t: f64) -> f64 {
    let top = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cost = |lam: f64| {
        let head: f64 = x.iter().map(|v| (v.abs() - lam).max(0.0)).sum();
        let tail: f64 = x.iter().map(|v| v.abs().min(lam).powi(2)).sum();
        head + t * tail.sqrt()
    };
    let steps = 4000;
    let h = top / steps as f64;
    let (mut best, mut arg) = (f64::INFINITY, 0.0);
    for i in 0..=steps {
        let c = cost(i as f64 * h);
        if c < best {
            best = c;
            arg = i as f64 * h;
        }
    }
    best.min(golden_min(cost, (arg - h).max(0.0), (arg + h).min(top)))
}

#[test]
fn criterion_10_k_functional_oracle() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for s in 0..1000u64 {
        let mut rng = stream_rng(10, s);
        let len = rng.random_range(1..=8);
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = rng.random_range(0.01..10.0);
        worst = worst.max((k_functional(&x, t).unwrap() - brute_k_inf(&x, t)).abs());
        worst = worst.max((k_functional_l1_l2(&x, t).unwrap() - brute_k_2(&x, t)).abs());
    }
    report("10", worst < 1e-6, start, secs(30), format!("max deviation {worst:.2e}"));
}

#[test]
fn criterion_11_interpolation_envelope() {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for m in [2usize, 3] {
        let theta = (m as f64 - 1.0) / m as f64;
        let mut cs = Vec::new();
        for n in 1..=64 {
            cs.push(check_lorentz_envelope(&vec![1.0; n], 1.0, 2.0, theta, 1.0).unwrap().instance_constant);
        }
        for t in 0..100u64 {
            let mut rng = stream_rng(11 + m as u64, t);
            let len = rng.random_range(1..=64);
            let x: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..1.0)).collect();
            cs.push(check_lorentz_envelope(&x, 1.0, 2.0, theta, 1.0).unwrap().instance_constant);
        }
        let lo = cs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cs.iter().copied().fold(0.0, f64::max);
        ok &= lo > 0.0 && hi / lo <= 4.0;
        lines.push(format!("m={m} constants in [{lo:.4}, {hi:.4}], spread {:.4}", hi / lo));
    }
    report("11", ok, start, secs(60), lines.join("; "));
}

#[test]
fn criterion_12_bohr_lift() {
    let start = Instant::now();
    let table = PrimeTable::new(1_000_000);
    let mut ok = true;
    let mut counted = Vec::new();
    for m in [2usize, 3] {
        let support = homogeneous_support(m, 1_000_000, &table).unwrap();
        let bad = support
            .iter()
            .filter(|&&n| {
                let j = table.unlift_index(n, m).unwrap();
                table.lift_index(j.entries()).unwrap() != n || !j.is_nondecreasing()
            })
            .count();
        ok &= bad == 0 && !support.is_empty();
        counted.push(format!("m={m}: {} admissible n", support.len()));
    }
    let mut worst = 0.0f64;
    for t in 0..100u64 {
        let mut rng = stream_rng(12, t);
        let m = rng.random_range(2..=3);
        let nvars = rng.random_range(1..=5);
        let c = random_symmetric_poly(&mut rng, m, nvars).unwrap();
        let d = bohr_lift(&c, &table).unwrap();
        ok &= unlift(&d, nvars, &table).unwrap() == c;
        let (a, b) = (c.values().to_vec(), d.values());
        for params in [LorentzParams::new(4.0 / 3.0, 1.0).unwrap(), LorentzParams::new(1.5, 2.0).unwrap()] {
            let (x, y) = (lorentz_norm(&a, &params).unwrap(), lorentz_norm(&b, &params).unwrap());
            worst = worst.max((x - y).abs() / x.max(1.0));
        }
        worst = worst.max((lp_norm(&a, 1.0) - lp_norm(&b, 1.0)).abs());
    }
    ok &= worst < 1e-12;
    report("12", ok, start, secs(60), format!("{}, norm gap {worst:.2e}", counted.join(", ")));
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

#[test]
fn criterion_13a_partial_sum_table() {
    let start = Instant::now();
    let t = non_embedding_witnesses(2, 10_000, &[100, 1000, 10_000]).unwrap();
    let r: Vec<f64> = t.partial_sums.iter().map(|row| row.ratio).collect();
    let growth = r[r.len() - 1] / r[0];
    report("13 (partial sums)", increasing(&r) && growth > 3.0, start, secs(10), format!("ratios {r:?}, growth {growth:.3}"));
}

#[test]
fn criterion_13b_atom_table() {
    let start = Instant::now();
    let t = non_embedding_witnesses(2, 10_000, &[100, 1000, 10_000]).unwrap();
    let v: Vec<f64> = t.atoms.iter().filter(|a| a.n >= 100).map(|a| a.value).collect();
    let growth = v[v.len() - 1] / v[0];
    report("13 (atoms)", increasing(&v) && growth > 3.0, start, secs(10), format!("monotone {}, growth {growth:.3}", increasing(&v)));
}

#[test]
fn criterion_14_khinchine_steinhaus() {
    let start = Instant::now();
    let mut all = Vec::new();
    for n in 1..=4 {
        let params = SuiteParams { m: 1, n, trials: 3, seed: 14 + n as u64, samples: 100_000, ..Default::default() };
        all.extend(run_lemma("khinchine", &params).unwrap());
    }
    let worst = all.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let (h, total) = tally(&all);
    report("14", h == total, start, secs(30), format!("{h}/{total} holds, largest ratio {worst:.4}"));
}

#[test]
fn criterion_15_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 6] = [
        &["verify", "--lemma", "mixed-bh", "--m", "2", "--n", "3", "--trials", "6"],
        &["verify", "--lemma", "khinchine", "--n", "3", "--trials", "2", "--samples", "20000"],
        &["verify", "--lemma", "polarization", "--m", "2", "--n", "2", "--trials", "4"],
        &["optimality", "--m", "2", "--N", "2..4"],
        &["ksz", "--m", "2", "--N", "3", "--trials", "3"],
        &["envelope", "--N", "16", "--trials", "10"],
    ];
    let mut ok = true;
    for (i, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, threads) in [(0, "1"), (1, "4")] {
            let csv = dir.path().join(format!("{i}-{run}.csv"));
            let out = Command::new(env!("CARGO_BIN_EXE_bhlab"))
                .args(*args)
                .args(["--seed", "15", "--csv"])
                .arg(&csv)
                .env("BHLAB_THREADS", threads)
                .output()
                .unwrap();
            ok &= out.status.code() == Some(0);
            outputs.push((out.stdout, std::fs::read(&csv).ok()));
        }
        ok &= !outputs[0].0.is_empty() && outputs[0] == outputs[1];
    }
    report("15", ok, start, secs(120), format!("{} commands rerun with 1 and 4 threads", commands.len()));
}
