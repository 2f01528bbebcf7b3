//! `residueseq`: primitivity certificates, sequence dumps and verification suites.

mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use residueseq::{
    alpha_sequence, certify, compress_sequence, find_primitive, generate, is_primitive,
    is_primitive_sequence, CompressingMap, Error, Result, RingContext, RingPolynomial,
};

#[derive(Parser, Debug)]
#[command(name = "residueseq", version, about = "Primitive sequences over Z/(p^e) and their compressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Elementary-check budget before scans switch to sampling (overrides RESIDUESEQ_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Record wall time in reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check or search for primitive polynomials.
    Primitive {
        #[command(subcommand)]
        action: PrimitiveAction,
    },
    /// Dump one period of a sequence as CSV.
    Seq {
        #[command(subcommand)]
        action: SeqAction,
    },
    /// Run a verification suite and emit one report per experiment.
    Verify(suites::VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum PrimitiveAction {
    Check {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        e: u32,
        /// Coefficients c0,c1,...,cn of a monic f.
        #[arg(long)]
        f: String,
        /// Also require strong primitivity.
        #[arg(long)]
        strong: bool,
    },
    Find {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        strong: bool,
    },
}

#[derive(Args, Debug)]
struct SeqArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    e: u32,
    /// Coefficients c0,c1,...,cn of a monic f.
    #[arg(long)]
    f: String,
    /// Initial state a(0),...,a(n-1).
    #[arg(long)]
    init: String,
}

#[derive(Subcommand, Debug)]
enum SeqAction {
    Gen(SeqArgs),
    /// Adds the α column.
    Alpha(SeqArgs),
    /// Adds the φ column for a map spec.
    Compress {
        #[command(flatten)]
        seq: SeqArgs,
        /// `g=<poly in x>; eta=<terms | psi(z,w) | table@file | 0>`.
        #[arg(long)]
        map: String,
    },
}

fn budget(global: &GlobalOpts) -> Result<u64> {
    if let Some(b) = global.budget {
        return Ok(b);
    }
    match std::env::var("RESIDUESEQ_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("RESIDUESEQ_BUDGET = {v:?} is not a number"))),
        Err(_) => Ok(residueseq::analysis::DEFAULT_BUDGET),
    }
}

fn emit(global: &GlobalOpts, text: &str) -> Result<()> {
    let io_err = |err: std::io::Error| Error::InvalidInput(format!("cannot write output: {err}"));
    match &global.out {
        Some(path) => std::fs::write(path, text).map_err(io_err),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io_err),
    }
}

pub(crate) fn parse_f(p: u32, e: u32, list: &str) -> Result<RingPolynomial> {
    RingPolynomial::parse_coeffs(RingContext::new(p, e)?, list)
}

fn join(coeffs: &[u32]) -> String {
    coeffs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn cert_output(cert: &residueseq::PrimitivityCertificate, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut value = serde_json::to_value(cert.to_json()).expect("certificates serialize");
            value["primitive"] = serde_json::Value::Bool(true);
            Ok(format!("{value}\n"))
        }
        Format::Text => Ok(format!(
            "primitive=true period={} strongly_primitive={} f={} h_f={}\n",
            cert.period(),
            cert.strongly_primitive(),
            join(cert.f().coeffs()),
            join(cert.h_f().coeffs())
        )),
        Format::Csv => Err(Error::InvalidInput("certificates have no CSV form".into())),
    }
}

fn run_primitive(action: &PrimitiveAction, global: &GlobalOpts) -> Result<u8> {
    let format = global.format.unwrap_or(Format::Json);
    match action {
        PrimitiveAction::Check { p, e, f, strong } => {
            let f = parse_f(*p, *e, f)?;
            if !is_primitive(&f)? {
                let text = match format {
                    Format::Text => format!("primitive=false f={}\n", join(f.coeffs())),
                    _ => format!(
                        "{}\n",
                        serde_json::json!({"p": p, "e": e, "f": f.coeffs(), "primitive": false})
                    ),
                };
                emit(global, &text)?;
                return Ok(1);
            }
            let cert = certify(&f)?;
            emit(global, &cert_output(&cert, format)?)?;
            Ok(u8::from(*strong && !cert.strongly_primitive()))
        }
        PrimitiveAction::Find { p, e, n, strong } => {
            let ctx = RingContext::new(*p, *e)?;
            match find_primitive(ctx, *n, *strong, budget(global)?, global.seed)? {
                Some(cert) => {
                    emit(global, &cert_output(&cert, format)?)?;
                    Ok(0)
                }
                None => {
                    eprintln!("no qualifying polynomial found within the budget");
                    Ok(1)
                }
            }
        }
    }
}

fn parse_state(list: &str) -> Result<Vec<u32>> {
    list.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad state entry {v:?} in {list:?}")))
        })
        .collect()
}

fn run_seq(action: &SeqAction, global: &GlobalOpts) -> Result<u8> {
    if global.format.is_some_and(|f| f != Format::Csv) {
        return Err(Error::InvalidInput("sequence dumps are CSV only".into()));
    }
    let (args, extra) = match action {
        SeqAction::Gen(a) => (a, None),
        SeqAction::Alpha(a) => (a, Some(None)),
        SeqAction::Compress { seq, map } => (seq, Some(Some(map))),
    };
    let f = parse_f(args.p, args.e, &args.f)?;
    let s = generate(&f, &parse_state(&args.init)?)?;
    let csv = match extra {
        None => s.to_csv(&[]),
        Some(None) => {
            let cert = certify(&f)?;
            if !is_primitive_sequence(&s, &cert)? {
                return Err(Error::InvalidInput(
                    "α needs an initial state that is nonzero mod p".into(),
                ));
            }
            s.to_csv(&[("alpha", &alpha_sequence(&s, &cert)?)])
        }
        Some(Some(spec)) => {
            let m = CompressingMap::parse_spec(args.p, args.e, spec)?;
            s.to_csv(&[("phi", &compress_sequence(&m, &s)?)])
        }
    };
    emit(global, &csv)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Primitive { action } => run_primitive(action, &cli.global),
        Command::Seq { action } => run_seq(action, &cli.global),
        Command::Verify(args) => {
            let budget = budget(&cli.global)?;
            let format = cli.global.format.unwrap_or(Format::Json);
            if format == Format::Csv {
                return Err(Error::InvalidInput("verify reports are json or text".into()));
            }
            let reports = suites::run_suite(args, budget, cli.global.seed, cli.global.timing)?;
            let mut out = String::new();
            let mut failed = false;
            for cell in &reports {
                let r = &cell.report;
                match format {
                    Format::Text => {
                        let verdict = if r.holds() { "PASS" } else { "FAIL" };
                        let params: Vec<String> =
                            r.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
                        out.push_str(&format!("{verdict} {} {}\n", r.experiment(), params.join(" ")));
                    }
                    _ => {
                        out.push_str(&r.to_json_line());
                        out.push('\n');
                    }
                }
                if !r.holds() {
                    failed = true;
                    eprintln!(
                        "{} failed, witness {}",
                        r.experiment(),
                        r.witness().map(|w| w.to_string()).unwrap_or_default()
                    );
                    eprintln!("reproduce: {}", cell.repro);
                }
            }
            emit(&cli.global, &out)?;
            Ok(u8::from(failed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
