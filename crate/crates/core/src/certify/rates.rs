use crate::error::{Error, Result};

/// Certified DGDA contraction factor on strongly convex–strongly concave
/// quadratics:
/// `(3L² + 2Lμ + 3μ² + √((L+μ)⁴ + 16L²μ²)) / (4(L+μ)²)`.
pub fn scsc_alpha_sq(lipschitz: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && lipschitz >= mu && lipschitz.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need L >= mu > 0, got L={lipschitz}, mu={mu}"
        )));
    }
    let (l, m) = (lipschitz, mu);
    let s = l + m;
    let root = (s.powi(4) + 16.0 * l * l * m * m).sqrt();
    Ok((3.0 * l * l + 2.0 * l * m + 3.0 * m * m + root) / (4.0 * s * s))
}

/// `1 − 1/(4κ)`: the DGDA bilinear bound at its best step size and the
/// EG/OGDA baseline rate.
pub fn quarter_kappa_rate(kappa: f64) -> f64 {
    1.0 - 1.0 / (4.0 * kappa)
}

/// `1 − 1/κ²`: GDA on strongly monotone problems with `η = μ/L²`.
pub fn gda_scsc_rate(kappa: f64) -> f64 {
    1.0 - 1.0 / (kappa * kappa)
}

/// `1 − 1/(4κ) − α²(κ, 1)`; non-negative for `κ ≥ 2`.
pub fn corollary_gap(kappa: f64) -> Result<f64> {
    if !(kappa >= 1.0) {
        return Err(Error::InvalidParameter(format!("kappa must be >= 1, got {kappa}")));
    }
    Ok(quarter_kappa_rate(kappa) - scsc_alpha_sq(kappa, 1.0)?)
}

/// `points` values spaced evenly in `ln κ` over `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..points)
                .map(|i| match i {
                    0 => lo,
                    i if i == points - 1 => hi,
                    i => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
                })
                .collect()
        }
    }
}
