//! Verification suites: parameter grids over the analysis experiments.

use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::Rng;
use residueseq::analysis::{
    carry_report, certificate_report, highest_level_report, legendre_report, periods_report,
    recurrence_report, relation_lemma_report, thm7_report, thm8_report, thm9_report,
    verify_alpha_k_injectivity,
};
use residueseq::{
    certify, enumerate_primitive, find_primitive, CompressingMap, Error, MultivariatePoly,
    PrimitivityCertificate, Result, RingContext, UnivariateFn, UniformityReport,
};
use serde_json::Value;

use crate::parse_f;

/// Largest η grid `--all-eta` will enumerate.
const MAX_ETA: u64 = 100_000;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Recurrence,
    Carry,
    Periods,
    Distribution,
    AlphaK,
    Thm7,
    Thm8,
    Thm9,
    Legendre,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Recurrence => "recurrence",
            Suite::Carry => "carry",
            Suite::Periods => "periods",
            Suite::Distribution => "distribution",
            Suite::AlphaK => "alpha-k",
            Suite::Thm7 => "thm7",
            Suite::Thm8 => "thm8",
            Suite::Thm9 => "thm9",
            Suite::Legendre => "legendre",
            Suite::All => "all",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Primes to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<u32>,
    /// Exponents to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub e: Vec<u32>,
    /// Degree of f when searching for one.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coefficients c0,...,cn of f (default: first primitive f found).
    #[arg(long)]
    pub f: Option<String>,
    /// Single compressing map for alpha-k.
    #[arg(long)]
    pub map: Option<String>,
    /// g for thm7/thm8.
    #[arg(long)]
    pub g: Option<String>,
    /// alpha-k uses g = x^deg-g.
    #[arg(long)]
    pub deg_g: Option<u32>,
    /// alpha-k over every η.
    #[arg(long)]
    pub all_eta: bool,
    /// alpha-k over this many seeded random η besides η = 0.
    #[arg(long, default_value_t = 0)]
    pub eta_samples: usize,
    #[arg(long)]
    pub k: Option<u32>,
    /// w for thm9 (default: the count-achieving choice).
    #[arg(long)]
    pub w: Option<u32>,
    /// Require a strongly primitive f.
    #[arg(long)]
    pub strong: bool,
    /// Primitive states per recurrence check.
    #[arg(long, default_value_t = 10)]
    pub states: usize,
    /// Seeded ψ(z, W) assignments per thm8 cell, besides the default one.
    #[arg(long, default_value_t = 2)]
    pub assignments: usize,
}

pub struct Cell {
    pub report: UniformityReport,
    pub repro: String,
}

struct Runner {
    budget: u64,
    seed: u64,
    timing: bool,
    cells: Vec<Cell>,
}

fn quote(v: &Value) -> String {
    match v {
        Value::String(s) => format!("'{s}'"),
        Value::Array(items) => items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

impl Runner {
    fn push(&mut self, suite: Suite, run: impl FnOnce() -> Result<UniformityReport>) -> Result<()> {
        let start = Instant::now();
        let mut report = run()?;
        if self.timing {
            report.set_ms(start.elapsed().as_millis() as u64);
        }
        let mut repro = format!("residueseq verify {}", suite.name());
        for key in ["p", "e", "f", "map", "k", "g", "w", "states", "assignments"] {
            if let Some(v) = report.params().get(key) {
                repro.push_str(&format!(" --{key} {}", quote(v)));
            }
        }
        repro.push_str(&format!(" --seed {} --budget {}", self.seed, self.budget));
        self.cells.push(Cell { report, repro });
        Ok(())
    }
}

fn or_default<T: Clone>(given: &[T], default: &[T]) -> Vec<T> {
    if given.is_empty() {
        default.to_vec()
    } else {
        given.to_vec()
    }
}

fn resolve_cert(
    args: &VerifyArgs,
    p: u32,
    e: u32,
    strong: bool,
    budget: u64,
    seed: u64,
) -> Result<PrimitivityCertificate> {
    let cert = match &args.f {
        Some(list) => certify(&parse_f(p, e, list)?)?,
        None => {
            let ctx = RingContext::new(p, e)?;
            let n = args.n.unwrap_or(2);
            find_primitive(ctx, n, strong, budget, seed)?.ok_or_else(|| {
                Error::InvalidInput(format!("no primitive polynomial of degree {n} over {ctx} found"))
            })?
        }
    };
    if strong && !cert.strongly_primitive() {
        return Err(Error::InvalidInput(format!("{} is not strongly primitive", cert.f())));
    }
    Ok(cert)
}

fn eta_grid(args: &VerifyArgs, p: u32, e: u32, seed: u64) -> Result<Vec<MultivariatePoly>> {
    let arity = e as usize - 1;
    let points = (p as u64).pow(arity as u32);
    if args.all_eta {
        let total = (p as u64)
            .checked_pow(points as u32)
            .filter(|&t| t <= MAX_ETA)
            .ok_or_else(|| Error::InvalidInput(format!("more than {MAX_ETA} η for p={p} e={e}")))?;
        return (0..total)
            .map(|mut idx| {
                let table = (0..points)
                    .map(|_| {
                        let v = (idx % p as u64) as u32;
                        idx /= p as u64;
                        v
                    })
                    .collect();
                MultivariatePoly::from_table(p, arity, table)
            })
            .collect();
    }
    let mut rng = rand_chacha_rng(seed);
    let mut out = vec![MultivariatePoly::zero(p, arity)?];
    for _ in 0..args.eta_samples {
        let table = (0..points).map(|_| rng.gen_range(0..p)).collect();
        out.push(MultivariatePoly::from_table(p, arity, table)?);
    }
    Ok(out)
}

fn rand_chacha_rng(seed: u64) -> impl Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

fn run_one(args: &VerifyArgs, suite: Suite, r: &mut Runner) -> Result<()> {
    let (budget, seed) = (r.budget, r.seed);
    match suite {
        Suite::Legendre => {
            for p in or_default(&args.p, &[3, 5, 7, 11, 13]) {
                r.push(suite, || legendre_report(p, seed))?;
            }
        }
        Suite::Carry => {
            for p in or_default(&args.p, &[3, 5, 7, 11]) {
                r.push(suite, || carry_report(p, seed))?;
            }
        }
        Suite::Periods => {
            for p in or_default(&args.p, &[3]) {
                for e in or_default(&args.e, &[2, 3]) {
                    let certs = match &args.f {
                        Some(_) => vec![resolve_cert(args, p, e, args.strong, budget, seed)?],
                        None => enumerate_primitive(RingContext::new(p, e)?, args.n.unwrap_or(2), args.strong)?,
                    };
                    for cert in &certs {
                        r.push(suite, || certificate_report(cert, seed))?;
                        r.push(suite, || periods_report(cert, seed))?;
                    }
                }
            }
        }
        Suite::Recurrence => {
            for p in or_default(&args.p, &[3]) {
                for e in or_default(&args.e, &[2, 3, 4]) {
                    let cert = resolve_cert(args, p, e, args.strong, budget, seed)?;
                    r.push(suite, || recurrence_report(&cert, args.states, seed))?;
                }
            }
        }
        Suite::Distribution => {
            for p in or_default(&args.p, &[3]) {
                for e in or_default(&args.e, &[2]) {
                    let cert = resolve_cert(args, p, e, true, budget, seed)?;
                    r.push(suite, || relation_lemma_report(&cert, budget, seed))?;
                    r.push(suite, || highest_level_report(&cert, budget, seed))?;
                }
            }
        }
        Suite::AlphaK => {
            for p in or_default(&args.p, &[3]) {
                for e in or_default(&args.e, &[2]) {
                    let maps = match &args.map {
                        Some(spec) => vec![CompressingMap::parse_spec(p, e, spec)?],
                        None => {
                            let d = args.deg_g.unwrap_or(1);
                            let g = UnivariateFn::monomial(p, d)?;
                            eta_grid(args, p, e, seed)?
                                .into_iter()
                                .map(|eta| CompressingMap::new(g.clone(), eta, e))
                                .collect::<Result<_>>()?
                        }
                    };
                    let strong = args.strong || maps.iter().any(|m| m.g().degree().unwrap_or(0) >= 2);
                    let cert = resolve_cert(args, p, e, strong, budget, seed)?;
                    let ks = match args.k {
                        Some(k) => vec![k],
                        None => (1..p).collect(),
                    };
                    for m in &maps {
                        for &k in &ks {
                            r.push(suite, || verify_alpha_k_injectivity(&cert, m, k, budget, seed))?;
                        }
                    }
                }
            }
        }
        Suite::Thm7 => {
            for p in or_default(&args.p, &[3, 5]) {
                for e in or_default(&args.e, &[2]) {
                    let g = UnivariateFn::parse(p, args.g.as_deref().unwrap_or("x"))?;
                    let cert = resolve_cert(args, p, e, args.strong, budget, seed)?;
                    r.push(suite, || thm7_report(&cert, &g, budget, seed))?;
                }
            }
        }
        Suite::Thm8 => {
            for p in or_default(&args.p, &[5, 7]) {
                for e in or_default(&args.e, &[2]) {
                    let g = UnivariateFn::parse(p, args.g.as_deref().unwrap_or("x^2"))?;
                    let cert = resolve_cert(args, p, e, args.strong, budget, seed)?;
                    r.push(suite, || thm8_report(&cert, &g, args.assignments, budget, seed))?;
                }
            }
        }
        Suite::Thm9 => {
            for p in or_default(&args.p, &[5, 7, 11]) {
                for e in or_default(&args.e, &[2]) {
                    let cert = resolve_cert(args, p, e, true, budget, seed)?;
                    r.push(suite, || thm9_report(&cert, args.w, budget, seed))?;
                }
            }
        }
        Suite::All => {
            let plain = VerifyArgs {
                suite: Suite::All,
                p: vec![],
                e: vec![],
                n: None,
                f: None,
                map: None,
                g: None,
                deg_g: None,
                all_eta: false,
                eta_samples: 0,
                k: None,
                w: None,
                strong: false,
                states: args.states,
                assignments: args.assignments,
            };
            for s in [
                Suite::Legendre,
                Suite::Carry,
                Suite::Periods,
                Suite::Recurrence,
                Suite::Distribution,
                Suite::Thm7,
                Suite::Thm8,
                Suite::Thm9,
            ] {
                run_one(&plain, s, r)?;
            }
            for d in [1, 2] {
                let grid = VerifyArgs {
                    deg_g: Some(d),
                    all_eta: true,
                    ..plain.clone()
                };
                run_one(&grid, Suite::AlphaK, r)?;
            }
        }
    }
    Ok(())
}

pub fn run_suite(args: &VerifyArgs, budget: u64, seed: u64, timing: bool) -> Result<Vec<Cell>> {
    let mut runner = Runner {
        budget,
        seed,
        timing,
        cells: Vec::new(),
    };
    run_one(args, args.suite, &mut runner)?;
    Ok(runner.cells)
}
