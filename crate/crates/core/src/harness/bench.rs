use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{
    bilinear_rate_bound, fit_empirical_rate, gda_scsc_rate, quarter_kappa_rate, scsc_alpha_sq,
    RateBound, DEFAULT_BURN_IN, DEFAULT_FLOOR,
};
use crate::error::{Error, Result};
use crate::numerics::SeededRng;
use crate::problems::{generate, Problem, ProblemInstance, ProblemKind, ShiftMode};
use crate::solvers::{
    default_config, run, write_trace, Method, Trace, Verdict, DEFAULT_MAX_ITERS, DEFAULT_STOP_DIST_SQ,
};

/// Horizontal axis of the aggregated curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    GradEvals,
    Iterations,
}

impl Abscissa {
    pub fn column(self) -> &'static str {
        match self {
            Abscissa::GradEvals => "grad_evals",
            Abscissa::Iterations => "k",
        }
    }
}

/// A multi-trial benchmark. Trial `i` uses seed `base_seed + i` (wrapping)
/// both for its instance and for its initial point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub kind: ProblemKind,
    pub n: usize,
    pub m: usize,
    pub kappa: f64,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub iters: usize,
    pub base_seed: u64,
    pub record_stride: usize,
    pub stop_dist_sq: f64,
    pub abscissa: Abscissa,
}

impl BenchSpec {
    pub fn new(kind: ProblemKind, n: usize, m: usize, kappa: f64) -> Self {
        Self {
            kind,
            n,
            m,
            kappa,
            trials: 20,
            methods: Method::ALL.to_vec(),
            iters: DEFAULT_MAX_ITERS,
            base_seed: 0,
            record_stride: 10,
            stop_dist_sq: DEFAULT_STOP_DIST_SQ,
            abscissa: Abscissa::GradEvals,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::Config(format!("method '{m}' listed twice")));
            }
        }
        if self.iters == 0 || self.record_stride == 0 {
            return Err(Error::Config("iters and record stride must be at least 1".into()));
        }
        if !(self.stop_dist_sq >= 0.0) {
            return Err(Error::Config("stop threshold must be non-negative".into()));
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

/// Uniform draw on `(0, 1)^dim`, from a stream separate from instance
/// generation.
pub fn initial_point(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = SeededRng::with_stream(seed, 1);
    (0..dim).map(|_| rng.uniform_open01()).collect()
}

/// Where a method's reference factor comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorBasis {
    /// Certified for DGDA at its default step sizes.
    Certified,
    /// Literature comparison rate.
    Baseline,
    /// No contraction guarantee.
    Divergent,
}

/// Per-iteration reference factor of `method` at its default step sizes.
pub fn reference_factor(method: Method, p: &ProblemInstance) -> Result<(RateBound, FactorBasis)> {
    let kappa = p.kappa();
    Ok(match (&p.problem, method) {
        (Problem::Bilinear(b), Method::Dgda) => {
            let cfg = default_config(method, p);
            let bound = bilinear_rate_bound(b.sigma_min(), b.sigma_max(), cfg.rho, cfg.eta);
            let basis = match bound {
                RateBound::Factor(_) => FactorBasis::Certified,
                RateBound::Divergent(_) => FactorBasis::Divergent,
            };
            (bound, basis)
        }
        (Problem::Scsc(q), Method::Dgda) => (
            RateBound::Factor(scsc_alpha_sq(q.lipschitz(), q.mu())?),
            FactorBasis::Certified,
        ),
        (_, Method::Eg | Method::Ogda) => (RateBound::Factor(quarter_kappa_rate(kappa)), FactorBasis::Baseline),
        (Problem::Bilinear(_), Method::Gda) => (RateBound::DIVERGENT, FactorBasis::Divergent),
        (Problem::Scsc(_), Method::Gda) => (RateBound::Factor(gda_scsc_rate(kappa)), FactorBasis::Baseline),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub problem_digest: String,
    pub kappa_actual: f64,
    /// One trace per method, in `BenchSpec::methods` order.
    pub traces: Vec<Trace>,
}

pub fn run_trial(spec: &BenchSpec, trial: usize) -> Result<TrialOutcome> {
    let seed = spec.trial_seed(trial);
    let p = generate(spec.kind, spec.n, spec.m, spec.kappa, seed, ShiftMode::Zero)?;
    let z0 = initial_point(seed, p.dim());
    let traces = spec
        .methods
        .iter()
        .map(|&method| {
            let cfg = default_config(method, &p)
                .with_max_iters(spec.iters)
                .with_stop(spec.stop_dist_sq);
            run(&p, &cfg, &z0, spec.record_stride)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialOutcome {
        trial,
        seed,
        problem_digest: p.digest(),
        kappa_actual: p.kappa(),
        traces,
    })
}

/// Runs all trials in parallel; results come back in trial order.
pub fn run_trials(spec: &BenchSpec) -> Result<Vec<TrialOutcome>> {
    spec.validate()?;
    (0..spec.trials)
        .into_par_iter()
        .map(|i| run_trial(spec, i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: u64,
    /// Trials contributing (non-divergent ones).
    pub trials: usize,
    pub mean_log10: f64,
    pub std_log10: f64,
    pub mean_dist_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub converged: usize,
    pub max_iters: usize,
    pub diverged: usize,
    pub curve: Vec<CurvePoint>,
    /// Fitted per-iteration factor per trial; `None` when too few records.
    pub factors: Vec<Option<f64>>,
    pub factor_mean: Option<f64>,
    pub factor_std: Option<f64>,
    pub factor_max: Option<f64>,
    pub theoretical: RateBound,
    pub basis: FactorBasis,
}

impl MethodSummary {
    /// Step-held curve mean (log₁₀) at `x`; `None` before the first point or
    /// when every trial diverged.
    pub fn mean_log10_at(&self, x: u64) -> Option<f64> {
        let i = self.curve.partition_point(|p| p.x <= x);
        (i > 0).then(|| self.curve[i - 1].mean_log10)
    }

    pub fn x_end(&self) -> Option<u64> {
        self.curve.last().map(|p| p.x)
    }

    pub fn factor_per_eval(&self) -> Option<f64> {
        self.factor_mean.map(|f| f.powf(1.0 / self.method.evals_per_step() as f64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub spec: BenchSpec,
    pub methods: Vec<MethodSummary>,
}

impl BenchSummary {
    pub fn method(&self, m: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m)
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn series(trace: &Trace, abscissa: Abscissa) -> Vec<(u64, f64)> {
    trace
        .records
        .iter()
        .map(|r| {
            let x = match abscissa {
                Abscissa::GradEvals => r.grad_evals,
                Abscissa::Iterations => r.k,
            };
            (x, r.dist_sq)
        })
        .collect()
}

/// Mean and population σ of `log₁₀ dist_sq` over non-divergent trials at
/// every abscissa any of them recorded. Trials that stopped early hold their
/// final value.
pub fn aggregate_curve(traces: &[&Trace], abscissa: Abscissa) -> Vec<CurvePoint> {
    let all: Vec<Vec<(u64, f64)>> = traces
        .iter()
        .filter(|t| t.verdict != Verdict::Diverged)
        .map(|t| series(t, abscissa))
        .collect();
    if all.is_empty() {
        return Vec::new();
    }
    let mut xs: Vec<u64> = all.iter().flat_map(|s| s.iter().map(|p| p.0)).collect();
    xs.sort_unstable();
    xs.dedup();

    let mut cursors = vec![0usize; all.len()];
    let mut logs = vec![0.0; all.len()];
    let mut raws = vec![0.0; all.len()];
    xs.into_iter()
        .map(|x| {
            for (j, s) in all.iter().enumerate() {
                while cursors[j] + 1 < s.len() && s[cursors[j] + 1].0 <= x {
                    cursors[j] += 1;
                }
                let v = s[cursors[j]].1;
                raws[j] = v;
                logs[j] = v.max(f64::MIN_POSITIVE).log10();
            }
            let (mean_log10, std_log10) = mean_std(&logs);
            CurvePoint {
                x,
                trials: all.len(),
                mean_log10,
                std_log10,
                mean_dist_sq: raws.iter().sum::<f64>() / raws.len() as f64,
            }
        })
        .collect()
}

pub fn summarize(spec: &BenchSpec, outcomes: &[TrialOutcome]) -> Result<BenchSummary> {
    let first = outcomes
        .first()
        .ok_or_else(|| Error::Validation("no trial outcomes to summarize".into()))?;
    let reference = generate(spec.kind, spec.n, spec.m, spec.kappa, first.seed, ShiftMode::Zero)?;
    let methods = spec
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let traces: Vec<&Trace> = outcomes.iter().map(|o| &o.traces[mi]).collect();
            let count = |v: Verdict| traces.iter().filter(|t| t.verdict == v).count();
            let factors = traces
                .iter()
                .map(|t| match fit_empirical_rate(&t.records, DEFAULT_BURN_IN, DEFAULT_FLOOR) {
                    Ok(f) => Ok(Some(f)),
                    Err(Error::InsufficientData { .. }) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?;
            let fitted: Vec<f64> = factors.iter().flatten().copied().collect();
            let (factor_mean, factor_std, factor_max) = if fitted.is_empty() {
                (None, None, None)
            } else {
                let (m, s) = mean_std(&fitted);
                (Some(m), Some(s), Some(fitted.iter().copied().fold(f64::MIN, f64::max)))
            };
            let (theoretical, basis) = reference_factor(method, &reference)?;
            Ok(MethodSummary {
                method,
                converged: count(Verdict::Converged),
                max_iters: count(Verdict::MaxIters),
                diverged: count(Verdict::Diverged),
                curve: aggregate_curve(&traces, spec.abscissa),
                factors,
                factor_mean,
                factor_std,
                factor_max,
                theoretical,
                basis,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchSummary {
        spec: spec.clone(),
        methods,
    })
}

/// Comparison of two mean curves past a burn-in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub checked: usize,
    pub violations: usize,
    /// Largest `lower − upper` in log₁₀ units; negative when dominance holds.
    pub worst_margin: f64,
}

/// Checks that `lower`'s mean curve is strictly below `upper`'s at every
/// abscissa of `lower` with `x ≥ burn_in·x_end(lower)`. `upper` is step-held.
pub fn dominance(lower: &MethodSummary, upper: &MethodSummary, burn_in: f64) -> Dominance {
    let mut out = Dominance {
        checked: 0,
        violations: 0,
        worst_margin: f64::NEG_INFINITY,
    };
    let Some(end) = lower.x_end() else {
        return out;
    };
    let start = burn_in * end as f64;
    for p in lower.curve.iter().filter(|p| p.x as f64 >= start) {
        let Some(u) = upper.mean_log10_at(p.x) else {
            continue;
        };
        out.checked += 1;
        let margin = p.mean_log10 - u;
        out.worst_margin = out.worst_margin.max(margin);
        if margin >= 0.0 {
            out.violations += 1;
        }
    }
    out
}

pub struct BenchRun {
    pub outcomes: Vec<TrialOutcome>,
    pub summary: BenchSummary,
}

pub fn run_bench(spec: &BenchSpec) -> Result<BenchRun> {
    let outcomes = run_trials(spec)?;
    let summary = summarize(spec, &outcomes)?;
    Ok(BenchRun { outcomes, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TrialManifest {
    trial: usize,
    seed: u64,
    problem_digest: String,
    kappa_actual: f64,
    verdicts: Vec<(Method, Verdict)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BenchManifest {
    spec: BenchSpec,
    trials: Vec<TrialManifest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchArtifacts {
    pub summary_csv: PathBuf,
    pub rates_csv: PathBuf,
    pub plot_svg: PathBuf,
    pub manifest_json: PathBuf,
    pub traces: Vec<PathBuf>,
}

fn opt(v: Option<f64>) -> String {
    v.map(float_text).unwrap_or_default()
}

/// Shortest round-trip text for a float, as the CSV writer would emit it.
fn float_text(x: f64) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(vec![]);
    w.serialize(x).expect("float serializes");
    let bytes = w.into_inner().expect("in-memory writer");
    String::from_utf8(bytes).expect("utf8").trim_end().to_string()
}

pub fn write_summary_csv(summary: &BenchSummary, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record([
        "method",
        summary.spec.abscissa.column(),
        "trials",
        "mean_log10_dist_sq",
        "std_log10_dist_sq",
        "mean_dist_sq",
    ])?;
    for m in &summary.methods {
        for p in &m.curve {
            w.serialize((m.method, p.x, p.trials, p.mean_log10, p.std_log10, p.mean_dist_sq))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_rates_csv(summary: &BenchSummary, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "method",
        "trials",
        "converged",
        "max_iters",
        "diverged",
        "fitted",
        "factor_mean",
        "factor_std",
        "factor_max",
        "factor_per_eval_mean",
        "theoretical_factor",
        "theoretical_basis",
    ])?;
    for m in &summary.methods {
        let basis = match m.basis {
            FactorBasis::Certified => "certified",
            FactorBasis::Baseline => "baseline",
            FactorBasis::Divergent => "divergent",
        };
        let theory = match m.theoretical {
            RateBound::Factor(f) => float_text(f),
            RateBound::Divergent(_) => "divergent_or_unknown".into(),
        };
        w.write_record([
            m.method.as_str().to_string(),
            m.factors.len().to_string(),
            m.converged.to_string(),
            m.max_iters.to_string(),
            m.diverged.to_string(),
            m.factors.iter().flatten().count().to_string(),
            opt(m.factor_mean),
            opt(m.factor_std),
            opt(m.factor_max),
            opt(m.factor_per_eval()),
            theory,
            basis.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `summary.csv`, `rates.csv`, `plot.svg`, `bench.json` and
/// `traces/{method}_trial{i:03}.{csv,json}` under `dir`.
pub fn write_outputs(dir: &Path, run: &BenchRun) -> Result<BenchArtifacts> {
    let spec = &run.summary.spec;
    let trace_dir = dir.join("traces");
    fs::create_dir_all(&trace_dir).map_err(|e| Error::io(&trace_dir, e))?;
    let mut traces = Vec::new();
    for o in &run.outcomes {
        for (method, t) in spec.methods.iter().zip(&o.traces) {
            let path = trace_dir.join(format!("{method}_trial{:03}.csv", o.trial));
            write_trace(t, &path)?;
            traces.push(path);
        }
    }

    let summary_csv = dir.join("summary.csv");
    write_summary_csv(&run.summary, &summary_csv)?;
    let rates_csv = dir.join("rates.csv");
    write_rates_csv(&run.summary, &rates_csv)?;
    let plot_svg = dir.join("plot.svg");
    fs::write(&plot_svg, super::svg::render(&run.summary)).map_err(|e| Error::io(&plot_svg, e))?;

    let manifest = BenchManifest {
        spec: spec.clone(),
        trials: run
            .outcomes
            .iter()
            .map(|o| TrialManifest {
                trial: o.trial,
                seed: o.seed,
                problem_digest: o.problem_digest.clone(),
                kappa_actual: o.kappa_actual,
                verdicts: spec.methods.iter().copied().zip(o.traces.iter().map(|t| t.verdict)).collect(),
            })
            .collect(),
    };
    let manifest_json = dir.join("bench.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&manifest_json, text).map_err(|e| Error::io(&manifest_json, e))?;

    Ok(BenchArtifacts {
        summary_csv,
        rates_csv,
        plot_svg,
        manifest_json,
        traces,
    })
}
