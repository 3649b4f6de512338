//! Bilinear and strongly convex–strongly concave quadratic saddle problems
//! with an exactly controlled condition number and a known saddle point.

mod io;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    self, orthonormal_column_basis, random_orthogonal, singular_values, spectral_norm,
    symmetric_eigenvalues, DenseMatrix, SeededRng, RNG_ALGORITHM_ID,
};

pub use io::{load_problem, save_problem, ProblemFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMode {
    Zero,
    Random,
}

impl FromStr for ShiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(ShiftMode::Zero),
            "random" => Ok(ShiftMode::Random),
            other => Err(Error::InvalidParameter(format!("unknown shift mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Bilinear,
    Scsc,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Bilinear => "bilinear",
            ProblemKind::Scsc => "scsc",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bilinear" => Ok(ProblemKind::Bilinear),
            "scsc" => Ok(ProblemKind::Scsc),
            other => Err(Error::InvalidParameter(format!("unknown problem kind '{other}'"))),
        }
    }
}

/// `f(x, y) = (x - s_x)ᵀ A (y - s_y)` with a full column rank `n×m` coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearProblem {
    pub(crate) a: DenseMatrix,
    pub(crate) shift: Vec<f64>,
    pub(crate) sigma_max: f64,
    pub(crate) sigma_min: f64,
    pub(crate) kappa: f64,
    // orthonormal basis of range(A); present only when n > m
    range_basis: Option<DenseMatrix>,
}

impl BilinearProblem {
    /// Validates rank and shapes and caches the spectral metadata.
    pub fn new(a: DenseMatrix, shift: Vec<f64>) -> Result<Self> {
        let (n, m) = (a.rows(), a.cols());
        if m > n {
            return Err(Error::UnsupportedShape(format!(
                "bilinear coupling must have m <= n, got n={n}, m={m}"
            )));
        }
        check_shift(&shift, n + m)?;
        let s = singular_values(&a)?;
        let (sigma_max, sigma_min) = (s[0], s[s.len() - 1]);
        if !(sigma_min > 0.0) {
            return Err(Error::Validation("coupling matrix is rank deficient".into()));
        }
        let ratio = sigma_max / sigma_min;
        Self::from_parts(a, shift, sigma_max, sigma_min, ratio * ratio)
    }

    pub(crate) fn from_parts(
        a: DenseMatrix,
        shift: Vec<f64>,
        sigma_max: f64,
        sigma_min: f64,
        kappa: f64,
    ) -> Result<Self> {
        let range_basis = if a.rows() > a.cols() {
            Some(orthonormal_column_basis(&a)?)
        } else {
            None
        };
        Ok(Self {
            a,
            shift,
            sigma_max,
            sigma_min,
            kappa,
            range_basis,
        })
    }

    pub fn coupling(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    /// `σ_max² / σ_min²`
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.a.cols()
    }

    pub fn is_square(&self) -> bool {
        self.a.is_square()
    }

    /// The skew operator `[[0, A], [-Aᵀ, 0]]` such that `F(z) = M (z - shift)`.
    pub fn operator_matrix(&self) -> DenseMatrix {
        let (n, m) = (self.n(), self.m());
        DenseMatrix::block2x2(
            &DenseMatrix::zeros(n, n),
            &self.a,
            &self.a.transpose().scale(-1.0),
            &DenseMatrix::zeros(m, m),
        )
        .expect("consistent blocks")
    }

    fn grad_into(&self, z: &[f64], out: &mut [f64]) {
        let n = self.n();
        let dz = numerics::sub(z, &self.shift);
        let (dx, dy) = dz.split_at(n);
        let (gx, gy) = out.split_at_mut(n);
        self.a.matvec_into(dy, gx);
        self.a.matvec_transpose_into(dx, gy);
        for v in gy.iter_mut() {
            *v = -*v;
        }
    }

    fn objective(&self, z: &[f64]) -> f64 {
        let dz = numerics::sub(z, &self.shift);
        let (dx, dy) = dz.split_at(self.n());
        numerics::dot(dx, &self.a.matvec(dy))
    }

    fn distance_sq(&self, z: &[f64]) -> f64 {
        let n = self.n();
        let dz = numerics::sub(z, &self.shift);
        let (dx, dy) = dz.split_at(n);
        match &self.range_basis {
            // the saddle set is shift + (null(Aᵀ) × {0})
            Some(q) => numerics::norm_sq(&q.matvec_transpose(dx)) + numerics::norm_sq(dy),
            None => numerics::norm_sq(&dz),
        }
    }
}

/// `f(x, y) = ½ dxᵀ Aq dx − ½ dyᵀ Bq dy + dxᵀ C dy` with `d = z − shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticScscProblem {
    pub(crate) aq: DenseMatrix,
    pub(crate) bq: DenseMatrix,
    pub(crate) c: DenseMatrix,
    pub(crate) shift: Vec<f64>,
    pub(crate) mu: f64,
    pub(crate) lipschitz: f64,
    pub(crate) kappa: f64,
    operator: DenseMatrix,
}

impl QuadraticScscProblem {
    /// Validates symmetry and definiteness and caches `μ`, `L`, `κ = L/μ`.
    pub fn new(aq: DenseMatrix, bq: DenseMatrix, c: DenseMatrix, shift: Vec<f64>) -> Result<Self> {
        let operator = scsc_operator(&aq, &bq, &c)?;
        let mu = strong_monotonicity(&aq, &bq)?;
        let lipschitz = spectral_norm(&operator)?;
        Self::from_parts(aq, bq, c, shift, mu, lipschitz, lipschitz / mu)
    }

    pub(crate) fn from_parts(
        aq: DenseMatrix,
        bq: DenseMatrix,
        c: DenseMatrix,
        shift: Vec<f64>,
        mu: f64,
        lipschitz: f64,
        kappa: f64,
    ) -> Result<Self> {
        let operator = scsc_operator(&aq, &bq, &c)?;
        check_shift(&shift, aq.rows() + bq.rows())?;
        for (name, block) in [("Aq", &aq), ("Bq", &bq)] {
            if block.max_asymmetry() > 1e-12 {
                return Err(Error::Validation(format!("{name} is not symmetric")));
            }
        }
        if !(mu > 0.0) {
            return Err(Error::Validation(format!(
                "blocks must be positive definite, smallest eigenvalue {mu}"
            )));
        }
        Ok(Self {
            aq,
            bq,
            c,
            shift,
            mu,
            lipschitz,
            kappa,
            operator,
        })
    }

    pub fn aq(&self) -> &DenseMatrix {
        &self.aq
    }

    pub fn bq(&self) -> &DenseMatrix {
        &self.bq
    }

    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `L / μ`
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn n(&self) -> usize {
        self.aq.rows()
    }

    pub fn m(&self) -> usize {
        self.bq.rows()
    }

    /// `[[Aq, C], [-Cᵀ, Bq]]`
    pub fn operator_matrix(&self) -> &DenseMatrix {
        &self.operator
    }

    fn grad_into(&self, z: &[f64], out: &mut [f64]) {
        let dz = numerics::sub(z, &self.shift);
        self.operator.matvec_into(&dz, out);
    }

    fn objective(&self, z: &[f64]) -> f64 {
        let dz = numerics::sub(z, &self.shift);
        let (dx, dy) = dz.split_at(self.n());
        0.5 * numerics::dot(dx, &self.aq.matvec(dx)) - 0.5 * numerics::dot(dy, &self.bq.matvec(dy))
            + numerics::dot(dx, &self.c.matvec(dy))
    }
}

fn check_shift(shift: &[f64], len: usize) -> Result<()> {
    if shift.len() != len {
        return Err(Error::Shape(format!(
            "shift has length {}, expected {len}",
            shift.len()
        )));
    }
    if !numerics::all_finite(shift) {
        return Err(Error::InvalidInput("non-finite shift".into()));
    }
    Ok(())
}

fn scsc_operator(aq: &DenseMatrix, bq: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    if !aq.is_square() || !bq.is_square() || c.rows() != aq.rows() || c.cols() != bq.rows() {
        return Err(Error::Shape(format!(
            "Aq {}x{}, Bq {}x{}, C {}x{} do not form a saddle operator",
            aq.rows(),
            aq.cols(),
            bq.rows(),
            bq.cols(),
            c.rows(),
            c.cols()
        )));
    }
    DenseMatrix::block2x2(aq, c, &c.transpose().scale(-1.0), bq)
}

fn strong_monotonicity(aq: &DenseMatrix, bq: &DenseMatrix) -> Result<f64> {
    let a_min = symmetric_eigenvalues(aq)?[0];
    let b_min = symmetric_eigenvalues(bq)?[0];
    Ok(a_min.min(b_min))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Bilinear(BilinearProblem),
    Scsc(QuadraticScscProblem),
}

/// A generated or loaded problem together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub problem: Problem,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub kappa_target: f64,
    pub rng_algorithm: String,
}

impl ProblemInstance {
    pub fn new(problem: Problem, seed: u64, kappa_target: f64) -> Self {
        let (n, m) = match &problem {
            Problem::Bilinear(b) => (b.n(), b.m()),
            Problem::Scsc(q) => (q.n(), q.m()),
        };
        Self {
            problem,
            n,
            m,
            seed,
            kappa_target,
            rng_algorithm: RNG_ALGORITHM_ID.to_string(),
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self.problem {
            Problem::Bilinear(_) => ProblemKind::Bilinear,
            Problem::Scsc(_) => ProblemKind::Scsc,
        }
    }

    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    pub fn as_bilinear(&self) -> Option<&BilinearProblem> {
        match &self.problem {
            Problem::Bilinear(b) => Some(b),
            Problem::Scsc(_) => None,
        }
    }

    pub fn as_scsc(&self) -> Option<&QuadraticScscProblem> {
        match &self.problem {
            Problem::Scsc(q) => Some(q),
            Problem::Bilinear(_) => None,
        }
    }

    /// The saddle point; equal to the shift for both families.
    pub fn saddle(&self) -> &[f64] {
        match &self.problem {
            Problem::Bilinear(b) => &b.shift,
            Problem::Scsc(q) => &q.shift,
        }
    }

    /// `κ` as defined for the family: `σ_max²/σ_min²` or `L/μ`.
    pub fn kappa(&self) -> f64 {
        match &self.problem {
            Problem::Bilinear(b) => b.kappa,
            Problem::Scsc(q) => q.kappa,
        }
    }

    /// Lipschitz constant of `F`: `σ_max(A)` for bilinear problems.
    pub fn lipschitz(&self) -> f64 {
        match &self.problem {
            Problem::Bilinear(b) => b.sigma_max,
            Problem::Scsc(q) => q.lipschitz,
        }
    }

    /// Matrix `M` with `F(z) = M (z − saddle)`.
    pub fn operator_matrix(&self) -> DenseMatrix {
        match &self.problem {
            Problem::Bilinear(b) => b.operator_matrix(),
            Problem::Scsc(q) => q.operator.clone(),
        }
    }

    fn check_point(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::Shape(format!(
                "point has length {}, expected {}",
                z.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `F(z) = (∇ₓf, −∇ᵧf)`. Does not count evaluations.
    pub fn grad(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_point(z)?;
        let mut out = vec![0.0; z.len()];
        self.grad_into(z, &mut out);
        Ok(out)
    }

    /// Unchecked variant of [`grad`](Self::grad) for solver inner loops.
    pub(crate) fn grad_into(&self, z: &[f64], out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.dim());
        match &self.problem {
            Problem::Bilinear(b) => b.grad_into(z, out),
            Problem::Scsc(q) => q.grad_into(z, out),
        }
    }

    pub fn objective(&self, z: &[f64]) -> Result<f64> {
        self.check_point(z)?;
        Ok(match &self.problem {
            Problem::Bilinear(b) => b.objective(z),
            Problem::Scsc(q) => q.objective(z),
        })
    }

    /// Squared distance to the saddle set. For rectangular bilinear problems
    /// the component of `x` in `null(Aᵀ)` does not count.
    pub fn saddle_distance_sq(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.dim());
        match &self.problem {
            Problem::Bilinear(b) => b.distance_sq(z),
            Problem::Scsc(q) => numerics::dist_sq(z, &q.shift),
        }
    }
}

fn log_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.uniform() * (hi.ln() - lo.ln())).exp()
}

fn draw_shift(rng: &mut SeededRng, len: usize, mode: ShiftMode) -> Vec<f64> {
    match mode {
        ShiftMode::Zero => vec![0.0; len],
        ShiftMode::Random => (0..len).map(|_| rng.uniform_open01()).collect(),
    }
}

/// Bilinear instance `A = U·D·Vᵀ` with singular values spanning `[1, √κ]`.
///
/// The extreme singular values are pinned to `√κ` and `1`; interior values are
/// log-uniform in between. Draw order from the seed: `U`, `V`, interior
/// values, then the shift.
pub fn gen_bilinear(
    n: usize,
    m: usize,
    kappa: f64,
    seed: u64,
    shift_mode: ShiftMode,
) -> Result<ProblemInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    if m > n {
        return Err(Error::UnsupportedShape(format!(
            "bilinear generation needs m <= n, got n={n}, m={m}"
        )));
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa must be >= 1, got {kappa}")));
    }
    if m == 1 && kappa != 1.0 {
        return Err(Error::InvalidParameter(
            "a single singular value only admits kappa = 1".into(),
        ));
    }
    let mut rng = SeededRng::new(seed);
    let u = random_orthogonal(n, &mut rng);
    let v = random_orthogonal(m, &mut rng);
    let top = kappa.sqrt();
    let mut sigmas = Vec::with_capacity(m);
    sigmas.push(top);
    for _ in 1..m.saturating_sub(1) {
        sigmas.push(log_uniform(&mut rng, 1.0, top));
    }
    if m > 1 {
        sigmas.push(1.0);
    }
    sigmas.sort_by(|a, b| b.total_cmp(a));

    // U·D scales the first m columns of U
    let mut ud = DenseMatrix::zeros(n, m);
    for i in 0..n {
        for (j, s) in sigmas.iter().enumerate() {
            ud.set(i, j, u.get(i, j) * s);
        }
    }
    let a = ud.matmul(&v.transpose())?;
    let shift = draw_shift(&mut rng, n + m, shift_mode);
    let problem = BilinearProblem::new(a, shift)?;
    Ok(ProblemInstance::new(Problem::Bilinear(problem), seed, kappa))
}

fn random_spd(dim: usize, top: f64, rng: &mut SeededRng) -> DenseMatrix {
    let q = random_orthogonal(dim, rng);
    let mut eig: Vec<f64> = (0..dim).map(|_| log_uniform(rng, 1.0, top)).collect();
    let argmin = eig
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("dim >= 1");
    eig[argmin] = 1.0;
    let mut qd = q.clone();
    for i in 0..dim {
        for (j, e) in eig.iter().enumerate() {
            qd.set(i, j, q.get(i, j) * e);
        }
    }
    qd.matmul(&q.transpose())
        .expect("square")
        .symmetric_part()
}

/// Quadratic SCSC instance with `μ = 1` and `L = σ_max([[Aq, C], [−Cᵀ, Bq]]) = κ`.
///
/// `Aq` and `Bq` have log-uniform spectra in `[1, κ/2]` with the minimum
/// pinned to 1. The coupling is `C = s·C₀` for a Gaussian `C₀`; `s` is found
/// by bisection so the operator norm hits `κ`.
pub fn gen_scsc(
    n: usize,
    m: usize,
    kappa: f64,
    seed: u64,
    shift_mode: ShiftMode,
) -> Result<ProblemInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa must be > 1, got {kappa}")));
    }
    let mut rng = SeededRng::new(seed);
    let block_top = (kappa / 2.0).max(1.0);
    let aq = random_spd(n, block_top, &mut rng);
    let bq = random_spd(m, block_top, &mut rng);
    let c0 = DenseMatrix::new(n, m, rng.normal_vec(n * m))?;
    let shift = draw_shift(&mut rng, n + m, shift_mode);

    let norm_at = |s: f64| -> Result<f64> { spectral_norm(&scsc_operator(&aq, &bq, &c0.scale(s))?) };
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while norm_at(hi)? < kappa {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Generation(format!(
                "could not bracket coupling scale for kappa={kappa}"
            )));
        }
    }
    if norm_at(lo)? >= kappa {
        return Err(Error::Generation(format!(
            "operator norm at zero coupling already exceeds kappa={kappa}"
        )));
    }
    let mut scale = 0.5 * (lo + hi);
    for _ in 0..200 {
        scale = 0.5 * (lo + hi);
        let l = norm_at(scale)?;
        if (l - kappa).abs() <= 1e-13 * kappa || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if l < kappa {
            lo = scale;
        } else {
            hi = scale;
        }
    }
    let problem = QuadraticScscProblem::new(aq, bq, c0.scale(scale), shift)?;
    if ((problem.kappa - kappa) / kappa).abs() > 1e-9 {
        return Err(Error::Generation(format!(
            "bisection reached kappa={} instead of {kappa}",
            problem.kappa
        )));
    }
    Ok(ProblemInstance::new(Problem::Scsc(problem), seed, kappa))
}

/// Dispatches to [`gen_bilinear`] or [`gen_scsc`].
pub fn generate(
    kind: ProblemKind,
    n: usize,
    m: usize,
    kappa: f64,
    seed: u64,
    shift_mode: ShiftMode,
) -> Result<ProblemInstance> {
    match kind {
        ProblemKind::Bilinear => gen_bilinear(n, m, kappa, seed, shift_mode),
        ProblemKind::Scsc => gen_scsc(n, m, kappa, seed, shift_mode),
    }
}
