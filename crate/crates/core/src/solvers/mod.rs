//! Explicit first-order saddle-point methods behind one stepper interface.
//!
//! All four methods share [`SolverState`]; the method-specific pieces are the
//! hat variables of dissipative GDA and the stored gradient of optimistic GDA.

mod run;
mod trace_io;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::problems::{Problem, ProblemInstance};

pub use run::{run, Record, Trace, TraceMeta, Verdict};
pub use trace_io::{read_trace_csv, write_trace, write_trace_csv, write_trace_meta};

pub const DEFAULT_STOP_DIST_SQ: f64 = 1e-20;
pub const DEFAULT_DIVERGENCE_FACTOR: f64 = 1e12;
pub const DEFAULT_MAX_ITERS: usize = 40_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gda,
    Eg,
    Ogda,
    Dgda,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Gda, Method::Eg, Method::Ogda, Method::Dgda];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Gda => "gda",
            Method::Eg => "eg",
            Method::Ogda => "ogda",
            Method::Dgda => "dgda",
        }
    }

    /// Gradient evaluations per iteration, excluding OGDA's one-time bootstrap.
    pub fn evals_per_step(self) -> u64 {
        match self {
            Method::Eg => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gda" => Ok(Method::Gda),
            "eg" => Ok(Method::Eg),
            "ogda" => Ok(Method::Ogda),
            "dgda" => Ok(Method::Dgda),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    pub eta: f64,
    /// Damping; only read by DGDA.
    pub rho: f64,
    pub max_iters: usize,
    pub stop_dist_sq: f64,
    pub divergence_factor: f64,
}

impl SolverConfig {
    pub fn new(method: Method, eta: f64, rho: f64) -> Self {
        Self {
            method,
            eta,
            rho,
            max_iters: DEFAULT_MAX_ITERS,
            stop_dist_sq: DEFAULT_STOP_DIST_SQ,
            divergence_factor: DEFAULT_DIVERGENCE_FACTOR,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_stop(mut self, stop_dist_sq: f64) -> Self {
        self.stop_dist_sq = stop_dist_sq;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::Config(format!("rho must be non-negative, got {}", self.rho)));
        }
        if self.method != Method::Dgda && self.rho != 0.0 {
            return Err(Error::Config(format!(
                "rho is only meaningful for dgda, got rho={} for {}",
                self.rho, self.method
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if !(self.stop_dist_sq >= 0.0) {
            return Err(Error::Config("stop threshold must be non-negative".into()));
        }
        if !(self.divergence_factor > 0.0) {
            return Err(Error::Config("divergence factor must be positive".into()));
        }
        Ok(())
    }
}

/// Step sizes backed by the convergence theory for each method and family.
///
/// | method | bilinear                 | SCSC            |
/// |--------|--------------------------|-----------------|
/// | DGDA   | ρ = ½, η = 1/σ_max       | ρ = ½, η = 1/(L+μ) |
/// | EG/OGDA| η = 1/(4σ_max)           | η = 1/(4L)      |
/// | GDA    | η = 1/σ_max (diverges)   | η = μ/L²        |
pub fn default_config(method: Method, p: &ProblemInstance) -> SolverConfig {
    let (eta, rho) = match (&p.problem, method) {
        (Problem::Bilinear(b), Method::Dgda) => (1.0 / b.sigma_max(), 0.5),
        (Problem::Bilinear(b), Method::Eg | Method::Ogda) => (1.0 / (4.0 * b.sigma_max()), 0.0),
        (Problem::Bilinear(b), Method::Gda) => (1.0 / b.sigma_max(), 0.0),
        (Problem::Scsc(q), Method::Dgda) => (1.0 / (q.lipschitz() + q.mu()), 0.5),
        (Problem::Scsc(q), Method::Eg | Method::Ogda) => (1.0 / (4.0 * q.lipschitz()), 0.0),
        (Problem::Scsc(q), Method::Gda) => (q.mu() / (q.lipschitz() * q.lipschitz()), 0.0),
    };
    SolverConfig::new(method, eta, rho)
}

/// Iterate state shared by all methods.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub method: Method,
    /// Current `(x; y)`.
    pub z: Vec<f64>,
    /// DGDA hat variables `(x̂; ŷ)`.
    pub z_hat: Option<Vec<f64>>,
    /// OGDA's `F(z_{k-1})`; filled on the first step.
    pub prev_grad: Option<Vec<f64>>,
    pub grad_evals: u64,
    pub overflow: bool,
}

/// Hats start at `z0`; OGDA's history is bootstrapped on the first step.
pub fn init_state(method: Method, z0: &[f64]) -> Result<SolverState> {
    if !numerics::all_finite(z0) {
        return Err(Error::InvalidInput("initial point has non-finite entries".into()));
    }
    Ok(SolverState {
        method,
        z: z0.to_vec(),
        z_hat: (method == Method::Dgda).then(|| z0.to_vec()),
        prev_grad: None,
        grad_evals: 0,
        overflow: false,
    })
}

fn check_state(p: &ProblemInstance, state: &SolverState, method: Method) -> Result<()> {
    if state.method != method {
        return Err(Error::Config(format!(
            "state was initialized for {}, not {method}",
            state.method
        )));
    }
    if state.z.len() != p.dim() {
        return Err(Error::Shape(format!(
            "iterate has length {}, problem needs {}",
            state.z.len(),
            p.dim()
        )));
    }
    Ok(())
}

fn finish(state: &mut SolverState) {
    let hats_ok = state.z_hat.as_deref().is_none_or(numerics::all_finite);
    if !numerics::all_finite(&state.z) || !hats_ok {
        state.overflow = true;
    }
}

/// `z ← z − η F(z)`
pub fn gda_step(p: &ProblemInstance, state: &mut SolverState, eta: f64) -> Result<()> {
    check_state(p, state, Method::Gda)?;
    let g = p.grad(&state.z)?;
    state.grad_evals += 1;
    for (z, g) in state.z.iter_mut().zip(&g) {
        *z -= eta * g;
    }
    finish(state);
    Ok(())
}

/// Extrapolate with `F(z)`, then step from `z` with the gradient at the
/// extrapolated point. Two evaluations.
pub fn eg_step(p: &ProblemInstance, state: &mut SolverState, eta: f64) -> Result<()> {
    check_state(p, state, Method::Eg)?;
    let g = p.grad(&state.z)?;
    let half: Vec<f64> = state.z.iter().zip(&g).map(|(z, g)| z - eta * g).collect();
    let g_half = p.grad(&half)?;
    state.grad_evals += 2;
    for (z, g) in state.z.iter_mut().zip(&g_half) {
        *z -= eta * g;
    }
    finish(state);
    Ok(())
}

/// `z ← z − 2η F(z_k) + η F(z_{k−1})`. The first call stores `F(z0)` as the
/// history (one extra evaluation), which makes it a plain GDA step.
pub fn ogda_step(p: &ProblemInstance, state: &mut SolverState, eta: f64) -> Result<()> {
    check_state(p, state, Method::Ogda)?;
    let g = p.grad(&state.z)?;
    state.grad_evals += 1;
    let prev = match state.prev_grad.take() {
        Some(prev) => prev,
        None => {
            state.grad_evals += 1;
            g.clone()
        }
    };
    for ((z, g), h) in state.z.iter_mut().zip(&g).zip(&prev) {
        *z = *z - 2.0 * eta * g + eta * h;
    }
    state.prev_grad = Some(g);
    finish(state);
    Ok(())
}

/// Dissipative GDA: GDA on `z` plus a coupling `−ρ(z − ẑ)`, with the hats
/// relaxing toward `z`. Both updates read the same pre-step `(z, ẑ)`.
pub fn dgda_step(p: &ProblemInstance, state: &mut SolverState, eta: f64, rho: f64) -> Result<()> {
    check_state(p, state, Method::Dgda)?;
    let g = p.grad(&state.z)?;
    state.grad_evals += 1;
    let hat = state
        .z_hat
        .as_mut()
        .ok_or_else(|| Error::Config("dgda state has no hat variables".into()))?;
    for ((z, h), g) in state.z.iter_mut().zip(hat.iter_mut()).zip(&g) {
        let (z0, h0) = (*z, *h);
        *z = z0 - eta * g - rho * (z0 - h0);
        *h = h0 - rho * (h0 - z0);
    }
    finish(state);
    Ok(())
}

/// One iteration of `cfg.method`.
pub fn step(p: &ProblemInstance, state: &mut SolverState, cfg: &SolverConfig) -> Result<()> {
    match cfg.method {
        Method::Gda => gda_step(p, state, cfg.eta),
        Method::Eg => eg_step(p, state, cfg.eta),
        Method::Ogda => ogda_step(p, state, cfg.eta),
        Method::Dgda => dgda_step(p, state, cfg.eta, cfg.rho),
    }
}

/// `V = ‖z − z*‖² (+ ‖ẑ − z*‖² for DGDA)`, distances to the saddle set.
pub fn lyapunov(p: &ProblemInstance, state: &SolverState) -> f64 {
    let d = p.saddle_distance_sq(&state.z);
    match &state.z_hat {
        Some(h) => d + p.saddle_distance_sq(h),
        None => d,
    }
}
