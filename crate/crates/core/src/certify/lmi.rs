use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, random_orthogonal, symmetric_eigenvalues, DenseMatrix, SeededRng};

/// Off-diagonal entry of the supply-rate matrix `X`.
///
/// `PaperExact` uses `c = L − μ`; `SymmetricSector` uses the
/// standard sector form `c = −(μ + L)`, which is non-positive on every
/// symmetric operator with spectrum in `[μ, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    PaperExact,
    SymmetricSector,
}

impl SignConvention {
    pub const ALL: [SignConvention; 2] = [SignConvention::SymmetricSector, SignConvention::PaperExact];

    pub fn as_str(self) -> &'static str {
        match self {
            SignConvention::PaperExact => "paper_exact",
            SignConvention::SymmetricSector => "symmetric_sector",
        }
    }

    pub fn off_diagonal(self, lipschitz: f64, mu: f64) -> f64 {
        match self {
            SignConvention::PaperExact => lipschitz - mu,
            SignConvention::SymmetricSector => -(mu + lipschitz),
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `S(z, w) = 2μL‖z‖² + 2c·zᵀw + 2‖w‖²`.
pub fn supply_rate(lipschitz: f64, mu: f64, convention: SignConvention, z: &[f64], w: &[f64]) -> f64 {
    let c = convention.off_diagonal(lipschitz, mu);
    2.0 * mu * lipschitz * numerics::norm_sq(z) + 2.0 * c * numerics::dot(z, w) + 2.0 * numerics::norm_sq(w)
}

/// Largest `S(z, Hz)` over random symmetric `H` with spectrum in `[μ, L]`
/// and random unit `z`. The first two probes use `H = μI` and `H = LI`.
pub fn supply_rate_sign_probe(
    lipschitz: f64,
    mu: f64,
    convention: SignConvention,
    samples: usize,
    rng: &mut SeededRng,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParameter("probe needs at least one sample".into()));
    }
    if !(mu > 0.0 && lipschitz >= mu) {
        return Err(Error::InvalidParameter(format!(
            "need L >= mu > 0, got L={lipschitz}, mu={mu}"
        )));
    }
    let mut worst = f64::NEG_INFINITY;
    for s in 0..samples {
        let dim = rng.uniform_int(1, 6);
        let spectrum: Vec<f64> = match s {
            0 => vec![mu; dim],
            1 => vec![lipschitz; dim],
            _ => (0..dim).map(|_| rng.uniform_range(mu, lipschitz)).collect(),
        };
        let q = random_orthogonal(dim, rng);
        let h = q
            .matmul(&DenseMatrix::from_diagonal(&spectrum))?
            .matmul(&q.transpose())?
            .symmetric_part();
        let mut z = rng.normal_vec(dim);
        let len = numerics::norm(&z);
        z.iter_mut().for_each(|v| *v /= len);
        let w = h.matvec(&z);
        worst = worst.max(supply_rate(lipschitz, mu, convention, &z, &w));
    }
    Ok(worst)
}

/// Largest probe value a convention may reach and still count as valid.
pub const PROBE_TOLERANCE: f64 = 1e-10;

/// First convention whose probe maximum stays within [`PROBE_TOLERANCE`].
pub fn validated_convention(
    lipschitz: f64,
    mu: f64,
    samples: usize,
    rng: &mut SeededRng,
) -> Result<SignConvention> {
    for conv in SignConvention::ALL {
        if supply_rate_sign_probe(lipschitz, mu, conv, samples, rng)? <= PROBE_TOLERANCE {
            return Ok(conv);
        }
    }
    Err(Error::Validation(format!(
        "no supply-rate convention is non-positive for L={lipschitz}, mu={mu}"
    )))
}

/// The dissipation LMI reduced to the `(z, ẑ, w)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmiParams {
    pub lipschitz: f64,
    pub mu: f64,
    pub rho: f64,
    pub eta: f64,
    pub alpha_sq: f64,
    pub p_scalar: f64,
    pub convention: SignConvention,
    /// Multiplier on `X`; 1 for the LMI itself.
    pub supply_scale: f64,
}

impl LmiParams {
    /// The closed-form feasible point: `ρ = ½`, `η = 1/(L+μ)`,
    /// `p = (L+μ)²` and `α²` from [`scsc_alpha_sq`](super::scsc_alpha_sq).
    pub fn feasible_point(lipschitz: f64, mu: f64, convention: SignConvention) -> Result<Self> {
        let alpha_sq = super::scsc_alpha_sq(lipschitz, mu)?;
        Ok(Self {
            lipschitz,
            mu,
            rho: 0.5,
            eta: 1.0 / (lipschitz + mu),
            alpha_sq,
            p_scalar: (lipschitz + mu).powi(2),
            convention,
            supply_scale: 1.0,
        })
    }

    /// `[[AᵀPA − α²P, AᵀPB], [BᵀPA, BᵀPB]] − X` as a 3×3 matrix.
    pub fn matrix(&self) -> DenseMatrix {
        let (r, p, e) = (self.rho, self.p_scalar, self.eta);
        let a = [[1.0 - r, r], [r, 1.0 - r]];
        let b = [-e, 0.0];
        let mut m = DenseMatrix::zeros(3, 3);
        for i in 0..2 {
            for j in 0..2 {
                let ata = a[0][i] * a[0][j] + a[1][i] * a[1][j];
                let id = if i == j { 1.0 } else { 0.0 };
                m.set(i, j, p * (ata - self.alpha_sq * id));
            }
            let atb = a[0][i] * b[0] + a[1][i] * b[1];
            m.set(i, 2, p * atb);
            m.set(2, i, p * atb);
        }
        m.set(2, 2, p * (b[0] * b[0] + b[1] * b[1]));

        let c = self.convention.off_diagonal(self.lipschitz, self.mu);
        let s = self.supply_scale;
        m.set(0, 0, m.get(0, 0) - s * 2.0 * self.mu * self.lipschitz);
        m.set(0, 2, m.get(0, 2) - s * c);
        m.set(2, 0, m.get(2, 0) - s * c);
        m.set(2, 2, m.get(2, 2) - s * 2.0);
        m
    }

    /// Largest eigenvalue of [`matrix`](Self::matrix).
    pub fn residual(&self) -> Result<f64> {
        let ev = symmetric_eigenvalues(&self.matrix())?;
        Ok(ev[ev.len() - 1])
    }
}

/// Threshold below which the LMI counts as satisfied.
pub const LMI_TOLERANCE: f64 = 1e-8;

pub fn lmi_residual(
    lipschitz: f64,
    mu: f64,
    rho: f64,
    eta: f64,
    alpha_sq: f64,
    p_scalar: f64,
    convention: SignConvention,
) -> Result<f64> {
    LmiParams {
        lipschitz,
        mu,
        rho,
        eta,
        alpha_sq,
        p_scalar,
        convention,
        supply_scale: 1.0,
    }
    .residual()
}
