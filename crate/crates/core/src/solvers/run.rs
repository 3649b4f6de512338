use serde::{Deserialize, Serialize};

use super::{init_state, lyapunov, step, Method, SolverConfig};
use crate::error::{Error, Result};
use crate::numerics;
use crate::problems::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    MaxIters,
    Diverged,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::MaxIters => "max_iters",
            Verdict::Diverged => "diverged",
        }
    }
}

/// One recorded iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub k: u64,
    pub grad_evals: u64,
    pub dist_sq: f64,
    pub lyapunov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub problem_digest: String,
    pub problem_kind: String,
    pub method: Method,
    pub eta: f64,
    pub rho: f64,
    pub seed: u64,
    pub max_iters: usize,
    pub stop_dist_sq: f64,
    pub divergence_factor: f64,
    pub record_stride: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<Record>,
    pub verdict: Verdict,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn last(&self) -> &Record {
        self.records.last().expect("traces always hold the initial record")
    }
}

/// Iterates `cfg.method` from `z0` until the squared distance to the saddle
/// drops to `cfg.stop_dist_sq`, exceeds `divergence_factor` times its initial
/// value, or `max_iters` is reached.
///
/// Records iteration 0, every `record_stride`-th iteration and the final one.
pub fn run(
    p: &ProblemInstance,
    cfg: &SolverConfig,
    z0: &[f64],
    record_stride: usize,
) -> Result<Trace> {
    cfg.validate()?;
    if record_stride == 0 {
        return Err(Error::Config("record stride must be at least 1".into()));
    }
    if z0.len() != p.dim() {
        return Err(Error::Shape(format!(
            "initial point has length {}, problem needs {}",
            z0.len(),
            p.dim()
        )));
    }
    if !numerics::all_finite(z0) {
        return Err(Error::InvalidInput("initial point has non-finite entries".into()));
    }

    let mut state = init_state(cfg.method, z0)?;
    let d0 = p.saddle_distance_sq(z0);
    let mut records = vec![Record {
        k: 0,
        grad_evals: 0,
        dist_sq: d0,
        lyapunov: lyapunov(p, &state),
    }];
    let divergence_level = cfg.divergence_factor * d0;

    let mut verdict = if d0 <= cfg.stop_dist_sq {
        Verdict::Converged
    } else {
        Verdict::MaxIters
    };
    let mut k = 0u64;
    while verdict == Verdict::MaxIters && (k as usize) < cfg.max_iters {
        step(p, &mut state, cfg)?;
        k += 1;
        let dist_sq = p.saddle_distance_sq(&state.z);
        if state.overflow || !dist_sq.is_finite() || dist_sq > divergence_level {
            verdict = Verdict::Diverged;
        } else if dist_sq <= cfg.stop_dist_sq {
            verdict = Verdict::Converged;
        }
        let is_final = verdict != Verdict::MaxIters || k as usize == cfg.max_iters;
        if is_final || k % record_stride as u64 == 0 {
            records.push(Record {
                k,
                grad_evals: state.grad_evals,
                dist_sq,
                lyapunov: lyapunov(p, &state),
            });
        }
    }

    Ok(Trace {
        records,
        verdict,
        meta: TraceMeta {
            problem_digest: p.digest(),
            problem_kind: p.kind().as_str().to_string(),
            method: cfg.method,
            eta: cfg.eta,
            rho: cfg.rho,
            seed: p.seed,
            max_iters: cfg.max_iters,
            stop_dist_sq: cfg.stop_dist_sq,
            divergence_factor: cfg.divergence_factor,
            record_stride,
            verdict,
        },
    })
}
