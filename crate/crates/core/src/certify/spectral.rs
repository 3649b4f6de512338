use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, singular_values, DenseMatrix};
use crate::problems::BilinearProblem;

/// Squared moduli of the DGDA iteration-matrix eigenvalues attached to each
/// singular value `σ`, two per `σ` (the `+` branch first).
///
/// With `d = 4ρ² − η²σ²`:
/// - `d ≥ 0`: `1 − 2ρ + 2ρ² ± (1 − ρ)√d`
/// - `d < 0`: `1 − 2ρ + ½η²σ² ± ½ησ√(−d)`
pub fn dgda_bilinear_eig_magnitudes(sigmas: &[f64], rho: f64, eta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * sigmas.len());
    for &sigma in sigmas {
        let es = eta * sigma;
        let disc = 4.0 * rho * rho - es * es;
        let (center, radius) = if disc >= 0.0 {
            (1.0 - 2.0 * rho + 2.0 * rho * rho, (1.0 - rho) * disc.sqrt())
        } else {
            (1.0 - 2.0 * rho + 0.5 * es * es, 0.5 * es * (-disc).sqrt())
        };
        out.push(center + radius);
        out.push(center - radius);
    }
    out
}

/// `[[(1−ρ)I − ηM, ρI], [ρI, (1−ρ)I]]` with `M = [[0, A], [−Aᵀ, 0]]`; the
/// linear map taking `(z − z*, ẑ − z*)` one DGDA step forward.
pub fn dgda_iteration_matrix(a: &DenseMatrix, rho: f64, eta: f64) -> DenseMatrix {
    let (n, m) = (a.rows(), a.cols());
    let d = n + m;
    let mut t = DenseMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        t.set(i, i, 1.0 - rho);
        t.set(i, d + i, rho);
        t.set(d + i, i, rho);
        t.set(d + i, d + i, 1.0 - rho);
    }
    for i in 0..n {
        for j in 0..m {
            let v = eta * a.get(i, j);
            // -η·A in the (x, y) block, +η·Aᵀ in the (y, x) block
            t.set(i, n + j, -v);
            t.set(n + j, i, v);
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCheck {
    /// Max abs difference between the sorted lists below.
    pub deviation: f64,
    /// `|μ|²` of the numerically computed eigenvalues, descending.
    pub numerical: Vec<f64>,
    /// Closed-form `|μ|²`, each `σ` counted once per `±iσ`, descending.
    pub closed_form: Vec<f64>,
}

/// Compares the closed-form magnitudes against a numerical eigensolve of the
/// full iteration matrix. Square couplings only.
pub fn verify_spectrum(p: &BilinearProblem, rho: f64, eta: f64) -> Result<SpectrumCheck> {
    if !p.is_square() {
        return Err(Error::UnsupportedShape(format!(
            "spectral verification needs a square coupling, got {}x{}",
            p.n(),
            p.m()
        )));
    }
    let sigmas = singular_values(p.coupling())?;
    let mut closed_form: Vec<f64> = dgda_bilinear_eig_magnitudes(&sigmas, rho, eta)
        .into_iter()
        .flat_map(|v| [v, v])
        .collect();
    let t = dgda_iteration_matrix(p.coupling(), rho, eta);
    let mut numerical: Vec<f64> = eigenvalues(&t)?.iter().map(|e| e.norm_sqr()).collect();
    closed_form.sort_by(|a, b| b.total_cmp(a));
    numerical.sort_by(|a, b| b.total_cmp(a));
    let deviation = closed_form
        .iter()
        .zip(&numerical)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumCheck {
        deviation,
        numerical,
        closed_form,
    })
}

/// Marker serialized as `"divergent_or_unknown"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotCertified {
    DivergentOrUnknown,
}

/// Per-iteration contraction factor of `V`, or no guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateBound {
    Factor(f64),
    Divergent(NotCertified),
}

impl RateBound {
    pub const DIVERGENT: RateBound = RateBound::Divergent(NotCertified::DivergentOrUnknown);

    pub fn factor(&self) -> Option<f64> {
        match *self {
            RateBound::Factor(f) => Some(f),
            RateBound::Divergent(_) => None,
        }
    }
}

/// `1 − 2ρ + 2ρ² + (1 − ρ)√(4ρ² − η²σ_min²)` on the region
/// `0 < ρ ≤ 1`, `0 < η ≤ 2ρ/σ_max`; no guarantee elsewhere.
pub fn bilinear_rate_bound(sigma_min: f64, sigma_max: f64, rho: f64, eta: f64) -> RateBound {
    let valid = rho > 0.0
        && rho <= 1.0
        && eta > 0.0
        && sigma_min > 0.0
        && sigma_max >= sigma_min
        && eta * sigma_max <= 2.0 * rho * (1.0 + 4.0 * f64::EPSILON);
    if !valid {
        return RateBound::DIVERGENT;
    }
    let disc = (4.0 * rho * rho - eta * eta * sigma_min * sigma_min).max(0.0);
    RateBound::Factor(1.0 - 2.0 * rho + 2.0 * rho * rho + (1.0 - rho) * disc.sqrt())
}

/// `½ + ½√(1 − σ_min²/σ_max²)`: the bound at `ρ = ½`, `η = 1/σ_max`.
pub fn bilinear_optimal_factor(kappa: f64) -> f64 {
    0.5 + 0.5 * (1.0 - 1.0 / kappa).sqrt()
}
