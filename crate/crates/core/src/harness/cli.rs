//! `dgda` command line: `gen | run | bench | certify | rates`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 a `run` whose
//! verdict is `diverged`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use super::bench::{run_bench, write_outputs, Abscissa, BenchSpec};
use super::table::{rate_table, write_rate_table};
use crate::certify::{certify, RateBound};
use crate::error::{Error, Result};
use crate::problems::{generate, load_problem, save_problem, Problem, ProblemKind, ShiftMode};
use crate::solvers::{
    default_config, read_trace_csv, run, write_trace, Method, SolverConfig, Verdict, DEFAULT_MAX_ITERS,
    DEFAULT_STOP_DIST_SQ,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dgda", version, about = "Saddle-point solvers, benchmarks and rate certificates")]
pub struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a problem instance with a prescribed condition number.
    Gen(GenArgs),
    /// Run one solver on a problem file and write its trace.
    Run(RunArgs),
    /// Multi-trial benchmark of several solvers.
    Bench(BenchArgs),
    /// Emit a DGDA rate certificate for a problem file.
    Certify(CertifyArgs),
    /// Tabulate theoretical rates over a range of condition numbers.
    Rates(RatesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bilinear,
    Scsc,
}

impl From<KindArg> for ProblemKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Bilinear => ProblemKind::Bilinear,
            KindArg::Scsc => ProblemKind::Scsc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShiftArg {
    Zero,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Evals,
    Iters,
}

/// `auto` or a positive step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaArg {
    Auto,
    Value(f64),
}

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(EtaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(EtaArg::Value(v)),
            _ => Err(format!("expected 'auto' or a positive number, got '{s}'")),
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "zero")]
    pub shift: ShiftArg,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(short, long)]
    pub problem: PathBuf,
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value = "auto")]
    pub eta: EtaArg,
    /// DGDA damping; defaults to 1/2.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub iters: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, default_value_t = DEFAULT_STOP_DIST_SQ)]
    pub stop: f64,
    /// Seed of the initial point; defaults to the problem's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trace CSV; metadata goes next to it with a `.json` extension.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub iters: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "gda,eg,ogda,dgda")]
    pub methods: Vec<Method>,
    #[arg(long, alias = "seed", default_value_t = 0)]
    pub base_seed: u64,
    #[arg(long, short = 'o', alias = "out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
    #[arg(long, value_enum, default_value = "evals")]
    pub x_axis: AxisArg,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(short, long)]
    pub problem: PathBuf,
    /// Trace CSV to fit an empirical factor from.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long, default_value_t = 1.0)]
    pub kappa_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub kappa_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn print_json(v: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("json value serializes"));
}

pub fn cmd_gen(args: &GenArgs, json: bool) -> Result<i32> {
    let shift = match args.shift {
        ShiftArg::Zero => ShiftMode::Zero,
        ShiftArg::Random => ShiftMode::Random,
    };
    let p = generate(args.kind.into(), args.n, args.m, args.kappa, args.seed, shift)?;
    save_problem(&p, &args.out)?;
    let (a, b) = match &p.problem {
        Problem::Bilinear(b) => (("sigma_min", b.sigma_min()), ("sigma_max", b.sigma_max())),
        Problem::Scsc(q) => (("mu", q.mu()), ("L", q.lipschitz())),
    };
    if json {
        print_json(json!({
            "path": args.out,
            "digest": p.digest(),
            "kind": p.kind(),
            "kappa_actual": p.kappa(),
            a.0: a.1,
            b.0: b.1,
        }));
    } else {
        println!("wrote {}", args.out.display());
        println!("digest {}", p.digest());
        println!("kappa_actual {}", p.kappa());
        println!("{} {}", a.0, a.1);
        println!("{} {}", b.0, b.1);
    }
    Ok(EXIT_OK)
}

pub fn cmd_run(args: &RunArgs, json: bool) -> Result<i32> {
    let p = load_problem(&args.problem)?;
    let cfg = match args.eta {
        EtaArg::Auto => {
            let mut cfg = default_config(args.method, &p);
            if let Some(rho) = args.rho {
                cfg.rho = rho;
            }
            cfg
        }
        EtaArg::Value(eta) => {
            let rho = args.rho.unwrap_or(if args.method == Method::Dgda { 0.5 } else { 0.0 });
            SolverConfig::new(args.method, eta, rho)
        }
    }
    .with_max_iters(args.iters)
    .with_stop(args.stop);
    let z0 = super::bench::initial_point(args.seed.unwrap_or(p.seed), p.dim());
    let trace = run(&p, &cfg, &z0, args.stride)?;
    let meta_path = write_trace(&trace, &args.out)?;
    let last = trace.last();
    if json {
        print_json(json!({
            "trace": args.out,
            "meta": meta_path,
            "verdict": trace.verdict,
            "iterations": last.k,
            "grad_evals": last.grad_evals,
            "final_dist_sq": last.dist_sq,
            "eta": cfg.eta,
            "rho": cfg.rho,
        }));
    } else {
        println!(
            "{} {}: {} after {} iterations ({} gradient evaluations), final dist_sq {:e}",
            cfg.method,
            p.kind(),
            trace.verdict.as_str(),
            last.k,
            last.grad_evals,
            last.dist_sq
        );
        println!("wrote {} and {}", args.out.display(), meta_path.display());
    }
    Ok(if trace.verdict == Verdict::Diverged {
        EXIT_DIVERGED
    } else {
        EXIT_OK
    })
}

pub fn cmd_bench(args: &BenchArgs, json: bool) -> Result<i32> {
    let spec = BenchSpec {
        trials: args.trials,
        methods: args.methods.clone(),
        iters: args.iters,
        base_seed: args.base_seed,
        record_stride: args.stride,
        abscissa: match args.x_axis {
            AxisArg::Evals => Abscissa::GradEvals,
            AxisArg::Iters => Abscissa::Iterations,
        },
        ..BenchSpec::new(args.kind.into(), args.n, args.m, args.kappa)
    };
    spec.validate()?;
    let bench = run_bench(&spec)?;
    let art = write_outputs(&args.out_dir, &bench)?;
    let theory = |b: RateBound| b.factor().map_or(json!("divergent_or_unknown"), |f| json!(f));
    if json {
        let methods: Vec<_> = bench
            .summary
            .methods
            .iter()
            .map(|m| {
                json!({
                    "method": m.method,
                    "converged": m.converged,
                    "max_iters": m.max_iters,
                    "diverged": m.diverged,
                    "factor_mean": m.factor_mean,
                    "factor_max": m.factor_max,
                    "theoretical_factor": theory(m.theoretical),
                })
            })
            .collect();
        print_json(json!({
            "out_dir": args.out_dir,
            "summary": art.summary_csv,
            "rates": art.rates_csv,
            "plot": art.plot_svg,
            "methods": methods,
        }));
    } else {
        for m in &bench.summary.methods {
            let factor = m.factor_mean.map_or("n/a".to_string(), |f| format!("{f:.5}"));
            let th = m.theoretical.factor().map_or("none".to_string(), |f| format!("{f:.5}"));
            println!(
                "{:<5} converged {:>3}  max_iters {:>3}  diverged {:>3}  factor {factor}  reference {th}",
                m.method.as_str(),
                m.converged,
                m.max_iters,
                m.diverged
            );
        }
        println!("wrote {}", args.out_dir.display());
    }
    Ok(EXIT_OK)
}

pub fn cmd_certify(args: &CertifyArgs, json: bool) -> Result<i32> {
    let p = load_problem(&args.problem)?;
    let mut cert = certify(&p, args.rho, args.eta)?;
    if let Some(trace) = &args.trace {
        cert = cert.with_trace(&read_trace_csv(trace)?)?;
    }
    let text = cert.to_json();
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            if json {
                print!("{text}");
            } else {
                let factor = cert
                    .theoretical_factor
                    .factor()
                    .map_or("divergent_or_unknown".to_string(), |f| f.to_string());
                println!("{} certificate for dgda: {factor}", cert.regime);
                if let Some(e) = cert.empirical_factor {
                    println!("empirical factor {e} (pass: {})", cert.empirical_pass.unwrap_or(false));
                }
                println!("wrote {}", path.display());
            }
        }
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

pub fn cmd_rates(args: &RatesArgs, json: bool) -> Result<i32> {
    let rows = rate_table(args.kappa_min, args.kappa_max, args.points)?;
    match &args.out {
        Some(path) => {
            let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            write_rate_table(&rows, io::BufWriter::new(f))?;
            if json {
                print_json(json!({ "path": path, "rows": rows.len() }));
            } else {
                println!("wrote {} rows to {}", rows.len(), path.display());
            }
        }
        None if json => print_json(serde_json::to_value(&rows)?),
        None => write_rate_table(&rows, io::stdout().lock())?,
    }
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, cli.json),
        Command::Run(a) => cmd_run(a, cli.json),
        Command::Bench(a) => cmd_bench(a, cli.json),
        Command::Certify(a) => cmd_certify(a, cli.json),
        Command::Rates(a) => cmd_rates(a, cli.json),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            let _ = io::stdout().flush();
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}
