use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BilinearProblem, Problem, ProblemInstance, QuadraticScscProblem};
use crate::error::{Error, Result};
use crate::numerics::{singular_values, spectral_norm, symmetric_eigenvalues, DenseMatrix};

/// Relative tolerance for cached spectral fields against recomputed values.
const LOAD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSet {
    Bilinear {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Scsc {
        #[serde(rename = "Aq")]
        aq: Vec<Vec<f64>>,
        #[serde(rename = "Bq")]
        bq: Vec<Vec<f64>>,
        #[serde(rename = "C")]
        c: Vec<Vec<f64>>,
    },
}

/// On-disk problem schema (one JSON object per file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub rng_algorithm: String,
    pub kappa_target: f64,
    pub kappa_actual: f64,
    pub mu: Option<f64>,
    #[serde(rename = "L")]
    pub lipschitz: Option<f64>,
    pub sigma_max: Option<f64>,
    pub sigma_min: Option<f64>,
    pub shift: Vec<f64>,
    pub matrices: MatrixSet,
}

impl ProblemFile {
    pub fn from_instance(p: &ProblemInstance) -> Self {
        let base = |kappa_actual, mu, lipschitz, sigma_max, sigma_min, shift: &[f64], matrices| Self {
            kind: p.kind().as_str().to_string(),
            n: p.n,
            m: p.m,
            seed: p.seed,
            rng_algorithm: p.rng_algorithm.clone(),
            kappa_target: p.kappa_target,
            kappa_actual,
            mu,
            lipschitz,
            sigma_max,
            sigma_min,
            shift: shift.to_vec(),
            matrices,
        };
        match &p.problem {
            Problem::Bilinear(b) => base(
                b.kappa,
                None,
                None,
                Some(b.sigma_max),
                Some(b.sigma_min),
                &b.shift,
                MatrixSet::Bilinear { a: b.a.to_rows() },
            ),
            Problem::Scsc(q) => base(
                q.kappa,
                Some(q.mu),
                Some(q.lipschitz),
                None,
                None,
                &q.shift,
                MatrixSet::Scsc {
                    aq: q.aq.to_rows(),
                    bq: q.bq.to_rows(),
                    c: q.c.to_rows(),
                },
            ),
        }
    }

    /// Rebuilds the instance, enforcing every invariant and checking the
    /// cached spectral fields against recomputed ones.
    pub fn into_instance(self) -> Result<ProblemInstance> {
        let required = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Validation(format!("{} problem is missing '{name}'", self.kind)))
        };
        let problem = match (&*self.kind, &self.matrices) {
            ("bilinear", MatrixSet::Bilinear { a }) => {
                let a = DenseMatrix::from_rows(a)?;
                expect_shape(&a, self.n, self.m, "A")?;
                let sigma_max = required(self.sigma_max, "sigma_max")?;
                let sigma_min = required(self.sigma_min, "sigma_min")?;
                let s = singular_values(&a)?;
                check_close("sigma_max", sigma_max, s[0])?;
                check_close("sigma_min", sigma_min, s[s.len() - 1])?;
                check_close("kappa_actual", self.kappa_actual, (s[0] / s[s.len() - 1]).powi(2))?;
                if a.cols() > a.rows() {
                    return Err(Error::Validation("bilinear problems need m <= n".into()));
                }
                if !(s[s.len() - 1] > 0.0) {
                    return Err(Error::Validation("coupling matrix is rank deficient".into()));
                }
                super::check_shift(&self.shift, self.n + self.m)
                    .map_err(|e| Error::Validation(e.to_string()))?;
                Problem::Bilinear(BilinearProblem::from_parts(
                    a,
                    self.shift,
                    sigma_max,
                    sigma_min,
                    self.kappa_actual,
                )?)
            }
            ("scsc", MatrixSet::Scsc { aq, bq, c }) => {
                let aq = DenseMatrix::from_rows(aq)?;
                let bq = DenseMatrix::from_rows(bq)?;
                let c = DenseMatrix::from_rows(c)?;
                expect_shape(&aq, self.n, self.n, "Aq")?;
                expect_shape(&bq, self.m, self.m, "Bq")?;
                expect_shape(&c, self.n, self.m, "C")?;
                let mu = required(self.mu, "mu")?;
                let lipschitz = required(self.lipschitz, "L")?;
                let mu_actual = symmetric_eigenvalues(&aq)?[0].min(symmetric_eigenvalues(&bq)?[0]);
                let op = super::scsc_operator(&aq, &bq, &c)?;
                let l_actual = spectral_norm(&op)?;
                check_close("mu", mu, mu_actual)?;
                check_close("L", lipschitz, l_actual)?;
                check_close("kappa_actual", self.kappa_actual, l_actual / mu_actual)?;
                Problem::Scsc(QuadraticScscProblem::from_parts(
                    aq,
                    bq,
                    c,
                    self.shift,
                    mu,
                    lipschitz,
                    self.kappa_actual,
                )?)
            }
            (kind @ ("bilinear" | "scsc"), _) => {
                return Err(Error::Validation(format!(
                    "matrices do not match problem kind '{kind}'"
                )))
            }
            (other, _) => return Err(Error::Validation(format!("unknown problem kind '{other}'"))),
        };
        Ok(ProblemInstance {
            problem,
            n: self.n,
            m: self.m,
            seed: self.seed,
            kappa_target: self.kappa_target,
            rng_algorithm: self.rng_algorithm,
        })
    }
}

fn expect_shape(m: &DenseMatrix, rows: usize, cols: usize, name: &str) -> Result<()> {
    if m.rows() == rows && m.cols() == cols {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            m.rows(),
            m.cols()
        )))
    }
}

fn check_close(name: &str, stored: f64, actual: f64) -> Result<()> {
    let rel = (stored - actual).abs() / actual.abs().max(f64::MIN_POSITIVE);
    if rel > LOAD_TOLERANCE {
        return Err(Error::Validation(format!(
            "{name} = {stored} is inconsistent with the matrices (recomputed {actual}, relative error {rel:e})"
        )));
    }
    Ok(())
}

impl ProblemInstance {
    /// Canonical JSON text; what [`save_problem`] writes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ProblemFile::from_instance(self))
            .expect("problem file serializes");
        s.push('\n');
        s
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_json().as_bytes());
        hex::encode(&hash[..8])
    }
}

pub fn save_problem(p: &ProblemInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, p.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ProblemFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_instance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_bilinear, gen_scsc, ShiftMode};

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        for p in [
            gen_bilinear(5, 3, 9.0, 4, ShiftMode::Random).unwrap(),
            gen_scsc(4, 3, 7.0, 4, ShiftMode::Random).unwrap(),
        ] {
            let path = dir.path().join(format!("{}.json", p.kind()));
            save_problem(&p, &path).unwrap();
            let q = load_problem(&path).unwrap();
            assert_eq!(p, q);
            assert_eq!(p.digest(), q.digest());
        }
    }

    #[test]
    fn inconsistent_kappa_is_rejected() {
        let p = gen_bilinear(4, 4, 9.0, 4, ShiftMode::Zero).unwrap();
        let mut file = ProblemFile::from_instance(&p);
        file.kappa_actual *= 1.0 + 1e-5;
        assert!(matches!(file.into_instance(), Err(Error::Validation(_))));

        let mut file = ProblemFile::from_instance(&p);
        file.kappa_actual *= 1.0 + 1e-8;
        assert!(file.into_instance().is_ok());
    }

    #[test]
    fn cached_sigmas_match_recomputation() {
        let p = gen_bilinear(6, 6, 16.0, 8, ShiftMode::Zero).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        save_problem(&p, &path).unwrap();
        let q = load_problem(&path).unwrap();
        let b = q.as_bilinear().unwrap();
        let s = singular_values(b.coupling()).unwrap();
        assert!((s[0] - b.sigma_max()).abs() <= 1e-9 * s[0]);
        assert!((s[5] - b.sigma_min()).abs() <= 1e-9 * s[5]);
    }

    #[test]
    fn malformed_file_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\n  \"kind\": \"bilinear\",\n  \"n\": oops\n}\n").unwrap();
        match load_problem(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_matrices_are_rejected() {
        let p = gen_scsc(3, 2, 5.0, 1, ShiftMode::Zero).unwrap();
        let mut file = ProblemFile::from_instance(&p);
        file.kind = "bilinear".into();
        assert!(matches!(file.into_instance(), Err(Error::Validation(_))));

        let mut file = ProblemFile::from_instance(&p);
        file.shift.pop();
        assert!(file.into_instance().is_err());
    }
}
