//! Command-line front end: parses a [`RunConfig`], runs the requested
//! experiment and returns its report lines and tables.

use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use bhlab::dirichlet::{bohr_lift, corollary_membership, non_embedding_witnesses, PrimeTable, DEFAULT_PRIME_BOUND};
use bhlab::forms::{supnorm_form, supnorm_poly, AscentOptions, PolySupOptions, SupNormEstimate};
use bhlab::interpolate::check_lorentz_envelope;
use bhlab::lorentz::{lorentz_norm, lp_norm, marcinkiewicz_norm, LorentzParams};
use bhlab::lowerbounds::{ksz_random_poly, loglog_slope, optimality_experiment};
use bhlab::mixed::{aggregate_norm, block_norm};
use bhlab::multiindex::CoordinateSubset;
use bhlab::rng::stream_rng;
use bhlab::schema::{coefficients_from_json, dirichlet_to_json, Coefficients};
use bhlab::suite::{run_lemma, SuiteParams};
use bhlab::verify::{fit_constant, BHConstantTable, InequalityReport, Verdict, LEMMAS};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

pub type Error = bhlab::Error;

#[derive(Parser, Debug, Clone)]
#[command(name = "bhlab", version, about = "Seeded experiments on Bohnenblust-Hille type inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write JSON lines here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Write the command's table as CSV here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Override a constant, e.g. `--set L=2` or `--set bh_mult.2=3`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Relative tolerance for verdicts.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Random starts for every sup-norm search.
    #[arg(long, global = true, default_value_t = 32)]
    pub starts: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// A norm of the coefficients in a JSON file.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Space::Lorentz)]
        space: Space,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Outer coordinates for the block norm, e.g. `1,3`.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        /// Subset size for the aggregate norm.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Sup norm estimate on the polydisc for a form or polynomial.
    Supnorm {
        #[arg(long)]
        input: PathBuf,
    },
    /// Greedy partition trials with the slice bound.
    Partition {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Seeded trials of one statement.
    Verify(VerifyArgs),
    /// Fourier tensor sweep against the sup bound N^{(m+1)/2}.
    Optimality {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "N", value_parser = parse_range, default_value = "2..8")]
        big_n: RangeInclusive<usize>,
        /// Lorentz p of the target space; 2m/(m+1) by default.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Random-sign polynomials against the KSZ bound.
    Ksz {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "N", default_value_t = 2)]
        big_n: usize,
        #[arg(long, default_value_t = 16)]
        trials: usize,
    },
    /// Bohr lift of a polynomial, or the two growth tables.
    Dirichlet {
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Polynomial JSON to lift; without it the growth tables are printed.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
    /// Interpolation envelope constants over indicators and random vectors.
    Envelope {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "N", default_value_t = 64)]
        big_n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// List statement ids.
    Lemmas,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long)]
    pub lemma: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Run sup-norm statements on random instances without certificates.
    #[arg(long)]
    pub heuristic: bool,
    /// Append the smallest constant that makes every trial hold.
    #[arg(long)]
    pub fit: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Lorentz,
    Lp,
    Weak,
    Marcinkiewicz,
    Block,
    Aggregate,
}

/// Inclusive ranges `a..b`, or comma lists.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

/// A parsed run: the command plus everything shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub constants: BHConstantTable,
    pub rel_tol: Option<f64>,
    pub starts: usize,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, Error> {
        let mut constants = BHConstantTable::default();
        for kv in &cli.common.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::BadParams(format!("expected KEY=VALUE, got {kv:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::BadParams(format!("bad number in {kv:?}")))?;
            constants.set(k.trim(), v)?;
        }
        if let Some(t) = cli.common.rel_tol {
            if !(t >= 0.0) {
                return Err(Error::BadParams(format!("tolerance must be nonnegative, got {t}")));
            }
        }
        Ok(Self {
            command: cli.command,
            seed: cli.common.seed,
            constants,
            rel_tol: cli.common.rel_tol,
            starts: cli.common.starts.max(1),
            output: cli.common.output,
            csv: cli.common.csv,
        })
    }

    pub fn parse_from<I, T>(args: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
        Self::from_cli(cli).map_err(|e| e.to_string())
    }
}

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    /// JSON lines in emission order.
    pub lines: Vec<String>,
    pub csv: Option<String>,
    pub violated: usize,
    pub inconclusive: usize,
}

impl RunOutput {
    fn push_value(&mut self, v: Value) {
        self.lines.push(v.to_string());
    }

    fn push_reports(&mut self, reports: &[InequalityReport]) {
        for r in reports {
            match r.verdict {
                Verdict::Violated => self.violated += 1,
                Verdict::Inconclusive => self.inconclusive += 1,
                Verdict::Holds => {}
            }
            self.lines.push(r.to_json_line());
        }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.violated > 0)
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

fn read_coefficients(path: &PathBuf) -> Result<Coefficients, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::BadParams(format!("cannot read {}: {e}", path.display())))?;
    coefficients_from_json(&text)
}

fn coefficient_values(c: &Coefficients) -> Vec<Complex64> {
    match c {
        Coefficients::Form(a) => a.values().to_vec(),
        Coefficients::Polynomial(p) => p.values().to_vec(),
    }
}

fn csv_of<T: serde::Serialize>(rows: &[T]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::BadParams(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::BadParams(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn sup_json(s: &SupNormEstimate) -> Value {
    let witness: Vec<Vec<[f64; 2]>> = s.witness.iter().map(|x| x.iter().map(|z| [z.re, z.im]).collect()).collect();
    json!({"lower": s.lower, "upper": s.upper, "method": s.method, "witness": witness})
}

fn rejudge(reports: &mut [InequalityReport], tol: Option<f64>) {
    if let Some(t) = tol {
        for r in reports.iter_mut() {
            r.judge(t);
        }
    }
}

/// Executes the configured command.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, Error> {
    let mut out = RunOutput::default();
    let ascent = AscentOptions { starts: cfg.starts, ..Default::default() };
    match &cfg.command {
        Command::Lemmas => {
            for (id, statement) in LEMMAS {
                out.push_value(json!({"lemma_id": id, "statement": statement}));
            }
        }
        Command::Norm { input, space, p, q, subset, k } => {
            let c = read_coefficients(input)?;
            let values = coefficient_values(&c);
            let value = match space {
                Space::Lorentz => lorentz_norm(&values, &LorentzParams::new(*p, *q)?)?,
                Space::Lp => lp_norm(&values, *p),
                Space::Weak => lorentz_norm(&values, &LorentzParams::weak(*p)?)?,
                Space::Marcinkiewicz => marcinkiewicz_norm(&values, *p)?,
                Space::Block | Space::Aggregate => {
                    let Coefficients::Form(a) = &c else {
                        return Err(Error::BadParams("block norms need a full-index form".into()));
                    };
                    if *space == Space::Block {
                        block_norm(a, &CoordinateSubset::from_members(a.m(), subset)?, *p, *q)?
                    } else {
                        let k = k.ok_or_else(|| Error::BadParams("the aggregate norm needs --k".into()))?;
                        aggregate_norm(a, k, *p, *q)?
                    }
                }
            };
            out.push_value(json!({"space": format!("{space:?}").to_lowercase(), "p": p, "q": q, "value": value}));
        }
        Command::Supnorm { input } => {
            let est = match read_coefficients(input)? {
                Coefficients::Form(a) => supnorm_form(&a, &ascent, cfg.seed)?,
                Coefficients::Polynomial(p) => {
                    supnorm_poly(&p, &PolySupOptions { starts: cfg.starts, ..Default::default() }, cfg.seed)?
                }
            };
            out.push_value(sup_json(&est));
        }
        Command::Partition { m, n, q, trials } => {
            let params = SuiteParams {
                m: *m,
                n: *n,
                trials: *trials,
                seed: cfg.seed,
                q: Some(*q),
                starts: cfg.starts,
                constants: cfg.constants.clone(),
                ..Default::default()
            };
            let mut reports = run_lemma("partition", &params)?;
            rejudge(&mut reports, cfg.rel_tol);
            out.push_reports(&reports);
        }
        Command::Verify(v) => {
            let params = SuiteParams {
                m: v.m,
                n: v.n,
                trials: v.trials,
                seed: cfg.seed,
                q: v.q,
                k: v.k,
                p: v.p,
                alpha: v.alpha,
                samples: v.samples,
                heuristic: v.heuristic,
                starts: cfg.starts,
                constants: cfg.constants.clone(),
            };
            let mut reports = run_lemma(&v.lemma, &params)?;
            rejudge(&mut reports, cfg.rel_tol);
            out.push_reports(&reports);
            if v.fit {
                out.push_value(json!({"lemma_id": v.lemma, "fitted_constant": fit_constant(&reports)}));
            }
        }
        Command::Optimality { m, big_n, p, q } => {
            let mf = *m as f64;
            let x = LorentzParams::new(p.unwrap_or(2.0 * mf / (mf + 1.0)), *q)?;
            let ns: Vec<usize> = big_n.clone().collect();
            let rows = optimality_experiment(&ns, *m, &x, &ascent, cfg.seed)?;
            for r in &rows {
                out.push_value(serde_json::to_value(r)?);
            }
            if rows.len() >= 2 {
                let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
                let ys: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
                out.push_value(json!({"m": m, "p": x.p, "q": x.q, "ratio_loglog_slope": loglog_slope(&xs, &ys)?}));
            }
            out.csv = Some(csv_of(&rows)?);
        }
        Command::Ksz { m, big_n, trials } => {
            let opts = PolySupOptions { starts: cfg.starts, ..Default::default() };
            let r = ksz_random_poly(*big_n, *m, *trials, cfg.seed, &opts, cfg.constants.ksz)?;
            out.push_value(json!({
                "m": m, "N": big_n, "trials": trials, "best_trial": r.best_trial,
                "signs": r.signs, "best_value": r.best_value, "estimate": sup_json(&r.estimate),
                "bound": r.bound, "fitted_constant": r.fitted_constant,
            }));
        }
        Command::Dirichlet { m, input, n_max } => match input {
            Some(path) => {
                let Coefficients::Polynomial(c) = read_coefficients(path)? else {
                    return Err(Error::BadParams("the lift needs a nondecreasing-index polynomial".into()));
                };
                let table = PrimeTable::new(DEFAULT_PRIME_BOUND);
                let d = bohr_lift(&c, &table)?;
                let member = corollary_membership(&c, &table)?;
                out.lines.push(dirichlet_to_json(&d)?);
                out.push_value(serde_json::to_value(member)?);
            }
            None => {
                let checkpoints: Vec<u64> =
                    std::iter::successors(Some(100u64), |v| v.checked_mul(10)).take_while(|v| v <= n_max).collect();
                let t = non_embedding_witnesses(*m, *n_max, &checkpoints)?;
                let pick = |n: u64| t.atoms.get((n - 2) as usize).copied();
                for &c in &checkpoints {
                    out.push_value(json!({"table": "atoms", "row": pick(c)}));
                }
                for r in &t.partial_sums {
                    out.push_value(json!({"table": "partial_sums", "row": r}));
                }
                out.push_value(json!({"m": m, "atoms_increasing_from": t.atoms_increasing_from}));
                out.csv = Some(csv_of(&t.partial_sums)?);
            }
        },
        Command::Envelope { m, big_n, trials } => {
            let mf = *m as f64;
            let theta = (mf - 1.0) / mf;
            let mut constants = Vec::new();
            let mut reports = Vec::new();
            for size in 1..=*big_n {
                let e = check_lorentz_envelope(&vec![1.0; size], 1.0, 2.0, theta, 1.0)?;
                constants.push(e.instance_constant);
                reports.push(e.to_report(&vec![1.0; size]));
            }
            for t in 0..*trials {
                use rand::Rng;
                let mut rng = stream_rng(cfg.seed, t as u64);
                let len = rng.random_range(1..=*big_n);
                let x: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..1.0)).collect();
                let e = check_lorentz_envelope(&x, 1.0, 2.0, theta, 1.0)?;
                constants.push(e.instance_constant);
                reports.push(e.to_report(&x));
            }
            rejudge(&mut reports, cfg.rel_tol);
            // the upper side with C = 1 is informational; the envelope is a fit
            for r in &reports {
                out.lines.push(r.to_json_line());
            }
            let lo = constants.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = constants.iter().copied().fold(0.0, f64::max);
            out.push_value(json!({"m": m, "theta": theta, "min_constant": lo, "max_constant": hi, "spread": hi / lo}));
        }
    }
    Ok(out)
}

/// Writes the run's outputs where the configuration asks.
pub fn emit(cfg: &RunConfig, out: &RunOutput) -> std::io::Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, out.text())?,
        None => print!("{}", out.text()),
    }
    if let (Some(path), Some(csv)) = (&cfg.csv, &out.csv) {
        fs::write(path, csv)?;
    }
    Ok(())
}
