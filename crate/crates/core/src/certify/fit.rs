use crate::error::{Error, Result};
use crate::solvers::Record;

pub const DEFAULT_BURN_IN: f64 = 0.2;
pub const DEFAULT_FLOOR: f64 = 1e-24;
pub const MIN_FIT_RECORDS: usize = 10;

/// Per-iteration factor `exp(slope)` of a least-squares line through
/// `(k, ln dist_sq)`, using records with `k ≥ burn_in·k_max` and
/// `dist_sq ≥ floor`.
pub fn fit_empirical_rate(records: &[Record], burn_in_fraction: f64, floor: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(Error::InvalidParameter(format!(
            "burn-in fraction must lie in [0, 1), got {burn_in_fraction}"
        )));
    }
    let k_max = records.iter().map(|r| r.k).max().unwrap_or(0) as f64;
    let start = burn_in_fraction * k_max;
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.k as f64 >= start && r.dist_sq >= floor && r.dist_sq.is_finite())
        .map(|r| (r.k as f64, r.dist_sq.ln()))
        .collect();
    if pts.len() < MIN_FIT_RECORDS {
        return Err(Error::InsufficientData {
            usable: pts.len(),
            required: MIN_FIT_RECORDS,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DenseMatrix;
    use crate::problems::{BilinearProblem, Problem, ProblemInstance};
    use crate::solvers::{run, Method, SolverConfig, Verdict};

    fn geometric(q: f64, n: u64) -> Vec<Record> {
        (0..n)
            .map(|k| {
                let d = q.powi(k as i32);
                Record {
                    k,
                    grad_evals: k,
                    dist_sq: d,
                    lyapunov: d,
                }
            })
            .collect()
    }

    #[test]
    fn exact_geometric_input() {
        let f = fit_empirical_rate(&geometric(0.9, 200), DEFAULT_BURN_IN, DEFAULT_FLOOR).unwrap();
        assert!((f - 0.9).abs() < 1e-6);
    }

    #[test]
    fn gda_on_scalar_bilinear() {
        let b = BilinearProblem::new(DenseMatrix::identity(1), vec![0.0; 2]).unwrap();
        let p = ProblemInstance::new(Problem::Bilinear(b), 0, 1.0);
        let t = run(&p, &SolverConfig::new(Method::Gda, 0.1, 0.0), &[1.0, 0.5], 1).unwrap();
        assert_eq!(t.verdict, Verdict::Diverged);
        let f = fit_empirical_rate(&t.records, DEFAULT_BURN_IN, DEFAULT_FLOOR).unwrap();
        assert!((f - 1.01).abs() < 1e-6, "{f}");
    }

    #[test]
    fn floor_and_burn_in_filter() {
        let recs = geometric(0.5, 100);
        // 0.5^k ≥ 1e-24 only for k ≤ 79; burn-in keeps k ≥ 19.8
        assert!(fit_empirical_rate(&recs, 0.2, DEFAULT_FLOOR).is_ok());
        match fit_empirical_rate(&recs, 0.2, 1e-8) {
            Err(Error::InsufficientData { usable, .. }) => assert_eq!(usable, 7),
            other => panic!("{other:?}"),
        }
        assert!(fit_empirical_rate(&recs[..5], 0.0, DEFAULT_FLOOR).is_err());
        assert!(fit_empirical_rate(&recs, 1.0, DEFAULT_FLOOR).is_err());
    }
}
