//! Convergence-rate certificates for DGDA.
//!
//! Bilinear problems are certified through the closed-form spectrum of the
//! linear iteration; strongly convex–strongly concave quadratics through a
//! 3×3 dissipation LMI evaluated at an explicit feasible point. Both report
//! per-iteration contraction factors of `V = ‖z − z*‖² + ‖ẑ − z*‖²`.

mod fit;
mod lmi;
mod rates;
mod spectral;

use serde::{Deserialize, Serialize};

pub use fit::{fit_empirical_rate, DEFAULT_BURN_IN, DEFAULT_FLOOR, MIN_FIT_RECORDS};
pub use lmi::{
    lmi_residual, supply_rate, supply_rate_sign_probe, validated_convention, LmiParams,
    SignConvention, LMI_TOLERANCE, PROBE_TOLERANCE,
};
pub use rates::{corollary_gap, gda_scsc_rate, log_grid, quarter_kappa_rate, scsc_alpha_sq};
pub use spectral::{
    bilinear_optimal_factor, bilinear_rate_bound, dgda_bilinear_eig_magnitudes,
    dgda_iteration_matrix, verify_spectrum, NotCertified, RateBound, SpectrumCheck,
};

use crate::error::{Error, Result};
use crate::numerics::{singular_values, SeededRng};
use crate::problems::{Problem, ProblemInstance};
use crate::solvers::{default_config, Method, Record};

/// Margin allowed between a fitted and a certified factor.
pub const EMPIRICAL_SLACK: f64 = 0.005;

/// Probes used to pick the supply-rate convention for a certificate.
pub const CERTIFY_PROBES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    DivergentOrUnknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub rho: f64,
    pub eta: f64,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub mu: Option<f64>,
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
}

/// Machine-readable DGDA rate certificate for one problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate {
    pub method: Method,
    pub regime: String,
    pub status: CertificateStatus,
    pub theoretical_factor: RateBound,
    /// Closed-form worst-case factor in terms of `σ_min` only (bilinear).
    pub premise_bound: Option<RateBound>,
    pub alpha_sq: Option<f64>,
    /// `|μ|²` per singular value, `+` then `−` branch (bilinear).
    pub eigen_magnitudes: Option<Vec<f64>>,
    pub spectral_deviation: Option<f64>,
    pub p_scalar: Option<f64>,
    pub lmi_max_eig: Option<f64>,
    pub sign_convention: Option<SignConvention>,
    /// Same LMI under the convention that was not validated.
    pub lmi_max_eig_other_convention: Option<f64>,
    pub empirical_factor: Option<f64>,
    pub empirical_pass: Option<bool>,
    pub problem_digest: String,
    pub params: CertificateParams,
}

impl RateCertificate {
    /// Fits the trace and compares against the theoretical factor.
    pub fn with_trace(mut self, records: &[Record]) -> Result<Self> {
        let f = fit_empirical_rate(records, DEFAULT_BURN_IN, DEFAULT_FLOOR)?;
        self.empirical_factor = Some(f);
        self.empirical_pass = self
            .theoretical_factor
            .factor()
            .map(|t| f <= t + EMPIRICAL_SLACK);
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}

/// Step sizes used when none are given: the instance's DGDA defaults.
pub fn default_dgda_params(p: &ProblemInstance) -> (f64, f64) {
    let cfg = default_config(Method::Dgda, p);
    (cfg.rho, cfg.eta)
}

/// Certificate for DGDA with `(ρ, η)` (defaults when `None`).
pub fn certify(p: &ProblemInstance, rho: Option<f64>, eta: Option<f64>) -> Result<RateCertificate> {
    let (rho0, eta0) = default_dgda_params(p);
    let rho = rho.unwrap_or(rho0);
    let eta = eta.unwrap_or(eta0);
    if !(rho >= 0.0 && rho.is_finite()) || !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "certification needs rho >= 0 and eta > 0, got rho={rho}, eta={eta}"
        )));
    }
    match &p.problem {
        Problem::Bilinear(_) => certify_bilinear(p, rho, eta),
        Problem::Scsc(_) => certify_scsc(p, rho, eta),
    }
}

fn certify_bilinear(p: &ProblemInstance, rho: f64, eta: f64) -> Result<RateCertificate> {
    let b = p.as_bilinear().expect("bilinear instance");
    let sigmas = singular_values(b.coupling())?;
    let magnitudes = dgda_bilinear_eig_magnitudes(&sigmas, rho, eta);
    let bound = bilinear_rate_bound(b.sigma_min(), b.sigma_max(), rho, eta);
    let theoretical = match bound {
        RateBound::Factor(_) => RateBound::Factor(magnitudes.iter().cloned().fold(f64::MIN, f64::max)),
        RateBound::Divergent(_) => RateBound::DIVERGENT,
    };
    let deviation = if b.is_square() {
        Some(verify_spectrum(b, rho, eta)?.deviation)
    } else {
        None
    };
    Ok(RateCertificate {
        method: Method::Dgda,
        regime: p.kind().as_str().to_string(),
        status: status_of(theoretical),
        theoretical_factor: theoretical,
        premise_bound: Some(bound),
        alpha_sq: None,
        eigen_magnitudes: Some(magnitudes),
        spectral_deviation: deviation,
        p_scalar: None,
        lmi_max_eig: None,
        sign_convention: None,
        lmi_max_eig_other_convention: None,
        empirical_factor: None,
        empirical_pass: None,
        problem_digest: p.digest(),
        params: CertificateParams {
            rho,
            eta,
            lipschitz: b.sigma_max(),
            mu: None,
            sigma_min: Some(b.sigma_min()),
            sigma_max: Some(b.sigma_max()),
        },
    })
}

fn certify_scsc(p: &ProblemInstance, rho: f64, eta: f64) -> Result<RateCertificate> {
    let q = p.as_scsc().expect("scsc instance");
    let (l, mu) = (q.lipschitz(), q.mu());
    let mut rng = SeededRng::with_stream(p.seed, 7);
    let convention = validated_convention(l, mu, CERTIFY_PROBES, &mut rng)?;
    let other = SignConvention::ALL
        .into_iter()
        .find(|c| *c != convention)
        .expect("two conventions");
    let mut lmi = LmiParams::feasible_point(l, mu, convention)?;
    lmi.rho = rho;
    lmi.eta = eta;
    let residual = lmi.residual()?;
    let other_residual = LmiParams { convention: other, ..lmi }.residual()?;
    let theoretical = if residual <= LMI_TOLERANCE {
        RateBound::Factor(lmi.alpha_sq)
    } else {
        RateBound::DIVERGENT
    };
    Ok(RateCertificate {
        method: Method::Dgda,
        regime: p.kind().as_str().to_string(),
        status: status_of(theoretical),
        theoretical_factor: theoretical,
        premise_bound: None,
        alpha_sq: Some(lmi.alpha_sq),
        eigen_magnitudes: None,
        spectral_deviation: None,
        p_scalar: Some(lmi.p_scalar),
        lmi_max_eig: Some(residual),
        sign_convention: Some(convention),
        lmi_max_eig_other_convention: Some(other_residual),
        empirical_factor: None,
        empirical_pass: None,
        problem_digest: p.digest(),
        params: CertificateParams {
            rho,
            eta,
            lipschitz: l,
            mu: Some(mu),
            sigma_min: None,
            sigma_max: None,
        },
    })
}

fn status_of(b: RateBound) -> CertificateStatus {
    match b {
        RateBound::Factor(_) => CertificateStatus::Certified,
        RateBound::Divergent(_) => CertificateStatus::DivergentOrUnknown,
    }
}

/// Result of checking `V_{k+1} ≤ α²·V_k + tol·V_0` along a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationCheck {
    pub steps: usize,
    pub violations: usize,
    /// Largest `(V_{k+1} − α²V_k) / V_0`.
    pub worst_excess: f64,
    /// Largest one-step ratio `V_{k+1}/V_k`.
    pub worst_ratio: f64,
}

impl DissipationCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks consecutive Lyapunov values; they must come from every iteration.
pub fn check_dissipation(lyapunov: &[f64], alpha_sq: f64, tol: f64) -> DissipationCheck {
    let v0 = lyapunov.first().copied().unwrap_or(0.0);
    let mut out = DissipationCheck {
        steps: lyapunov.len().saturating_sub(1),
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
        worst_ratio: 0.0,
    };
    for w in lyapunov.windows(2) {
        let excess = w[1] - alpha_sq * w[0];
        if excess > tol * v0 {
            out.violations += 1;
        }
        out.worst_excess = out.worst_excess.max(excess / v0);
        if w[0] > 0.0 {
            out.worst_ratio = out.worst_ratio.max(w[1] / w[0]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DenseMatrix;
    use crate::problems::{gen_bilinear, gen_scsc, QuadraticScscProblem, ShiftMode};
    use crate::solvers::{run, SolverConfig};

    #[test]
    fn bilinear_certificate_at_defaults() {
        let p = gen_bilinear(6, 6, 25.0, 3, ShiftMode::Zero).unwrap();
        let c = certify(&p, None, None).unwrap();
        assert_eq!(c.status, CertificateStatus::Certified);
        let f = c.theoretical_factor.factor().unwrap();
        assert!((f - (0.5 + 0.5 * 0.96f64.sqrt())).abs() < 1e-12);
        assert!(f <= 0.99);
        // the default step is on the discriminant boundary: defective spectrum
        assert!(c.spectral_deviation.unwrap() <= 1e-6);
        let max = c.eigen_magnitudes.unwrap().into_iter().fold(f64::MIN, f64::max);
        assert_eq!(max, f);
    }

    #[test]
    fn zero_damping_is_not_certified() {
        let p = gen_bilinear(3, 3, 4.0, 3, ShiftMode::Zero).unwrap();
        let c = certify(&p, Some(0.0), None).unwrap();
        assert_eq!(c.status, CertificateStatus::DivergentOrUnknown);
        assert!(c.to_json().contains("\"theoretical_factor\": \"divergent_or_unknown\""));
        assert!(certify(&p, None, Some(-1.0)).is_err());
    }

    #[test]
    fn scsc_certificate_uses_validated_convention() {
        let p = gen_scsc(8, 4, 31.0, 2, ShiftMode::Zero).unwrap();
        let c = certify(&p, None, None).unwrap();
        assert_eq!(c.sign_convention, Some(SignConvention::SymmetricSector));
        assert!(c.lmi_max_eig.unwrap() <= LMI_TOLERANCE);
        assert!(c.lmi_max_eig_other_convention.unwrap() > 0.0);
        let q = p.as_scsc().unwrap();
        let a = scsc_alpha_sq(q.lipschitz(), q.mu()).unwrap();
        assert_eq!(c.theoretical_factor, RateBound::Factor(a));

        let back: RateCertificate = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn empirical_factor_on_bilinear() {
        let p = gen_bilinear(10, 10, 25.0, 1, ShiftMode::Zero).unwrap();
        let mut rng = SeededRng::with_stream(1, 1);
        let z0: Vec<f64> = (0..20).map(|_| rng.uniform_open01()).collect();
        let t = run(&p, &default_config(Method::Dgda, &p), &z0, 10).unwrap();
        let c = certify(&p, None, None).unwrap().with_trace(&t.records).unwrap();
        assert!(c.empirical_factor.unwrap() <= 0.99 + EMPIRICAL_SLACK);
        assert_eq!(c.empirical_pass, Some(true));
    }

    /// With no coupling the operator is symmetric and the sector condition
    /// holds, so every DGDA step dissipates.
    #[test]
    fn symmetric_operators_dissipate() {
        let mut rng = SeededRng::new(77);
        for _ in 0..20 {
            let n = rng.uniform_int(1, 6);
            let m = rng.uniform_int(1, 6);
            let diag = |rng: &mut SeededRng, k| -> Vec<f64> {
                (0..k).map(|_| rng.uniform_range(1.0, 20.0)).collect()
            };
            let mut da = diag(&mut rng, n);
            da[0] = 1.0;
            let q = QuadraticScscProblem::new(
                DenseMatrix::from_diagonal(&da),
                DenseMatrix::from_diagonal(&diag(&mut rng, m)),
                DenseMatrix::zeros(n, m),
                vec![0.0; n + m],
            )
            .unwrap();
            let (l, mu) = (q.lipschitz(), q.mu());
            let p = ProblemInstance::new(Problem::Scsc(q), 0, l / mu);
            let cfg = SolverConfig::new(Method::Dgda, 1.0 / (l + mu), 0.5).with_max_iters(100);
            let z0 = rng.normal_vec(n + m);
            let t = run(&p, &cfg.with_stop(0.0), &z0, 1).unwrap();
            let v: Vec<f64> = t.records.iter().map(|r| r.lyapunov).collect();
            let check = check_dissipation(&v, scsc_alpha_sq(l, mu).unwrap(), 1e-9);
            assert!(check.holds(), "{check:?}");
        }
    }

    /// `F = [[1, c], [−c, 1]]` has `μ = 1`, `L = √(1+c²)` but its skew part
    /// breaks the sector inequality, so one DGDA step can expand `V`.
    #[test]
    fn skew_coupling_breaks_the_sector_inequality() {
        let c = 3.0;
        let q = QuadraticScscProblem::new(
            DenseMatrix::identity(1),
            DenseMatrix::identity(1),
            DenseMatrix::from_rows(&[vec![c]]).unwrap(),
            vec![0.0; 2],
        )
        .unwrap();
        let (l, mu) = (q.lipschitz(), q.mu());
        let z = [1.0, 0.0];
        let w = q.operator_matrix().matvec(&z);
        let s = supply_rate(l, mu, SignConvention::SymmetricSector, &z, &w);
        assert!((s - 2.0 * c * c).abs() < 1e-9, "{s}");

        // from z = ẑ = (1, 0): V₁/V₀ = ½ + ½(1 − 2η + η²L²) with η = 1/(L+μ)
        let p = ProblemInstance::new(Problem::Scsc(q), 0, l / mu);
        let cfg = default_config(Method::Dgda, &p).with_max_iters(1).with_stop(0.0);
        let t = run(&p, &cfg, &z, 1).unwrap();
        let eta = 1.0 / (l + mu);
        let expected = 0.5 + 0.5 * (1.0 - 2.0 * eta + eta * eta * l * l);
        let ratio = t.records[1].lyapunov / t.records[0].lyapunov;
        assert!((ratio - expected).abs() < 1e-14);
        assert!(ratio > 1.0);
        assert!(ratio > scsc_alpha_sq(l, mu).unwrap());
    }

    #[test]
    fn dissipation_check_counts() {
        let v = [1.0, 0.5, 0.3, 0.2];
        let ok = check_dissipation(&v, 0.7, 0.0);
        assert!(ok.holds());
        let bad = check_dissipation(&v, 0.5, 0.0);
        assert_eq!(bad.violations, 2);
        assert!((bad.worst_ratio - 0.2 / 0.3).abs() < 1e-15);
    }
}
